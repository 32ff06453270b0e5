"""Finite-horizon tools for uniform distribution, Buck density and independence."""

from .seqcore import (BlockShuffle, Constant, Identity, MultiplicativeAlpha, PartitionExtension,
                      PeriodicList, VanDerCorput, alpha_eval, evaluate, index_eval, radical_inverse,
                      sample)
from .meanstats import (ConvergenceTable, Monomial, PiecewiseLinear, empirical_cdf, partial_mean,
                        periodic_mean_exact, star_discrepancy, subsequence_mean_test, ud_in_Z_test,
                        ud_test)
from .buck import (ArithProg, Covering, SetWindow, asymptotic_density_estimate,
                   measurability_gap, mu_upper_bound, verify_cover)
from .polyadic import (SequenceSystem, example1_build, oscillation, polyadic_modulus_search,
                       semigroup_moduli, uniform_limit_check)
from .independence import (crt_product_mean_exact, independence_gap, independence_suite)
from .partition import (PartitionSystem, check_conditions_lim, check_conditions_un, decompose,
                        periodic_extension, system_ud_test)

__version__ = "0.1.0"

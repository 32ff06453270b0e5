"""Statistical independence of sequences.

The empirical gap ``|E_N(prod g_j(v_j)) - prod E_N(g_j(v_j))|`` is computed
for arbitrary specs.  For periodic sequences with coprime periods the
factorization of the product mean is exact, and :func:`crt_product_mean_exact`
checks it by enumerating the product sequence over a full joint period.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np

from . import seqcore
from ._reduce import ordered_map, pairwise_mean
from .errors import ArityError, CoprimalityError, EmptyInputError, ExactnessUnavailableError
from .meanstats import IDENTITY, Monomial, _check_horizons, format_number, periodic_mean_exact

DEFAULT_FAMILY = tuple(Monomial(d) for d in range(1, 5))


def _gap_from_samples(gvals, N):
    product = np.prod([g[:N] for g in gvals], axis=0)
    return abs(pairwise_mean(product) - math.prod(pairwise_mean(g[:N]) for g in gvals))


def independence_gap(specs, gs, N):
    if len(specs) != len(gs):
        raise ArityError(f"{len(specs)} sequences but {len(gs)} test functions")
    if len(specs) < 2:
        raise ArityError("independence needs at least two sequences")
    gvals = [g(seqcore.sample(s, N)) for s, g in zip(specs, gs)]
    return _gap_from_samples(gvals, N)


def crt_product_mean_exact(v1, v2):
    """Exact ``(E(v1*v2), E(v1), E(v2))`` for coprime-period periodic lists.

    ``E(v1*v2)`` comes from enumerating ``v1(n) * v2(n)`` for n over one joint
    period; the two marginal means come from the lists themselves.
    """
    v1, v2 = seqcore.as_periodic(v1), seqcore.as_periodic(v2)
    M1, M2 = v1.period, v2.period
    if math.gcd(M1, M2) != 1:
        raise CoprimalityError(f"periods {M1} and {M2} are not coprime")
    if not all(seqcore.is_exact(v) for v in v1.values + v2.values):
        raise ExactnessUnavailableError("periodic values are not all rational")
    joint = sum((v1.values[(n - 1) % M1] * v2.values[(n - 1) % M2]
                 for n in range(1, M1 * M2 + 1)), Fraction(0)) / (M1 * M2)
    return joint, periodic_mean_exact(v1), periodic_mean_exact(v2)


def full_cycle_gap_exact(specs, gs):
    """Exact gap over one joint period of periodic specs (pairwise coprime or not)."""
    lists = [seqcore.as_periodic(s) for s in specs]
    if len(lists) != len(gs) or len(lists) < 2:
        raise ArityError("need matching sequences and test functions, at least two")
    N = reduce(math.lcm, (p.period for p in lists), 1)
    cols = [[Fraction(g(v)) for v in seqcore.exact_values(p, N)] for p, g in zip(lists, gs)]
    joint = sum((math.prod(row) for row in zip(*cols)), Fraction(0)) / N
    return abs(joint - math.prod(sum(c, Fraction(0)) / N for c in cols))


@dataclass
class IndependenceReport:
    horizons: list
    gaps: list
    labels: list = field(default_factory=list)  # argmax function tuple per horizon

    def to_dict(self):
        return {"rows": [{"horizon": h, "gap": format_number(g), "functions": lab}
                         for h, g, lab in zip(self.horizons, self.gaps, self.labels)]}

    def to_csv(self):
        lines = ["horizon,gap,functions"]
        for h, g, lab in zip(self.horizons, self.gaps, self.labels):
            lines.append(f"{h},{format_number(g)},{'*'.join(lab)}")
        return "\n".join(lines) + "\n"


def independence_suite(specs, function_family=DEFAULT_FAMILY, horizons=(1000,), jobs=1):
    """Max gap over every k-tuple of functions from the family, per horizon."""
    if not function_family:
        raise EmptyInputError("empty function family", field="function_family")
    if len(specs) < 2:
        raise ArityError("independence needs at least two sequences")
    horizons = _check_horizons(horizons)
    Nmax = horizons[-1]
    raw = [seqcore.sample(s, Nmax) for s in specs]
    cache = {}

    def gvals(j, g):
        key = (j, g)
        if key not in cache:
            cache[key] = g(raw[j])
        return cache[key]

    tuples = list(itertools.product(function_family, repeat=len(specs)))
    columns = {t: [gvals(j, g) for j, g in enumerate(t)] for t in tuples}

    def row(N):
        best, label = -1.0, None
        for t in tuples:
            gap = _gap_from_samples(columns[t], N)
            if gap > best:
                best, label = gap, [g.label for g in t]
        return best, label

    out = ordered_map(row, horizons, jobs)
    return IndependenceReport(horizons, [g for g, _ in out], [lab for _, lab in out])

"""Polyadic continuity diagnostics and sequence systems.

``oscillation(spec, m, N)`` is the largest spread of values inside a residue
class mod m among the first N terms; a sequence is polyadically continuous
when this can be pushed below any epsilon by a suitable modulus.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import seqcore
from ._reduce import ordered_map
from .errors import InvalidChainError, InvalidSpecError
from .meanstats import periodic_mean_exact
from .seqcore import PeriodicList


def _class_spread(vals, m):
    res = np.arange(vals.size) % m  # index n-1; same partition as n mod m
    hi = np.full(m, -np.inf)
    lo = np.full(m, np.inf)
    np.maximum.at(hi, res, vals)
    np.minimum.at(lo, res, vals)
    spread = hi - lo
    spread[~np.isfinite(spread)] = 0.0
    return spread


def oscillation(spec, m, N):
    """Max over residue classes r mod m of (max - min) of v(n), n <= N, n = r."""
    if m < 1:
        raise InvalidSpecError("modulus must be >= 1", field="m")
    if N < m:
        raise InvalidSpecError(f"horizon {N} is shorter than modulus {m}", field="N")
    return float(_class_spread(seqcore.sample(spec, N), m).max())


def exceptional_fraction(spec, m, N, epsilon):
    """Fraction of residue classes mod m whose spread is at least epsilon.

    A windowed stand-in for the small exceptional set allowed by almost
    polyadic continuity.
    """
    return float(np.mean(_class_spread(seqcore.sample(spec, N), m) >= epsilon))


@dataclass
class OscillationProfile:
    rows: list  # (modulus, horizon, oscillation)

    def to_dict(self):
        return {"rows": [{"modulus": m, "horizon": n, "oscillation": o} for m, n, o in self.rows]}


def oscillation_profile(spec, moduli, horizons, jobs=1):
    pairs = [(m, N) for m in moduli for N in horizons]
    vals = seqcore.sample(spec, max(horizons))

    def row(pair):
        m, N = pair
        return m, N, float(_class_spread(vals[:N], m).max())

    return OscillationProfile(ordered_map(row, pairs, jobs))


def polyadic_modulus_search(spec, epsilon, candidate_moduli, N):
    """Least candidate modulus with oscillation below epsilon, else None."""
    if epsilon <= 0:
        raise InvalidSpecError("epsilon must be positive", field="epsilon")
    if not candidate_moduli:
        raise InvalidSpecError("no candidate moduli", field="candidate_moduli")
    for m in sorted(candidate_moduli):
        if oscillation(spec, m, N) < epsilon:
            return m
    return None


def semigroup_moduli(primes, bound):
    """All products of powers of ``primes`` up to ``bound``, including 1."""
    if bound < 1:
        raise InvalidSpecError("bound must be >= 1", field="bound")
    out = {1}
    for p in sorted(set(primes)):
        if not seqcore.is_prime(p):
            raise InvalidSpecError(f"{p!r} is not prime", field="primes")
        step = set()
        for q in out:
            while q * p <= bound:
                q *= p
                step.add(q)
        out |= step
    return sorted(out)


# -- sequence systems -------------------------------------------------------


@dataclass
class SequenceSystem:
    """Levels ``v_1, v_2, ...`` with an optional bound series ``a_1, a_2, ...``."""

    levels: list
    bound_series: Optional[list] = None

    def __post_init__(self):
        if not self.levels:
            raise InvalidSpecError("a system needs at least one level", field="levels")
        if self.bound_series is not None:
            if any(not a > 0 for a in self.bound_series):
                raise InvalidSpecError("bound series must be positive", field="bound_series")

    def level(self, L):
        return self.levels[L - 1]


@dataclass
class LimitRow:
    level: int
    sup_difference: float
    bound: Optional[Union[float, Fraction]] = None

    @property
    def passed(self):
        return None if self.bound is None else self.sup_difference <= self.bound


def uniform_limit_check(system, depth, N, jobs=1):
    """Sup over n <= N of |v_L(n) - v_{L+1}(n)| for levels L = 1..depth."""
    if len(system.levels) < depth + 1:
        raise InvalidSpecError(f"need {depth + 1} levels, system has {len(system.levels)}",
                               field="depth")

    def row(L):
        diff = np.abs(seqcore.sample(system.level(L), N) - seqcore.sample(system.level(L + 1), N))
        bound = None
        if system.bound_series is not None and L <= len(system.bound_series):
            bound = system.bound_series[L - 1]
        return LimitRow(L, float(diff.max()), bound)

    return ordered_map(row, range(1, depth + 1), jobs)


def _vdc_offset(level, digit, c):
    return digit * min(Fraction(c), Fraction(1))


def _zero_offset(level, digit, c):
    return Fraction(0)


REFINEMENT_RULES = {"vdc": _vdc_offset, "zero": _zero_offset}


def example1_build(chain, c=1, rule="vdc", first_level=None):
    """Periodic system refined along a divisor chain ``B_1 | B_2 | ...``.

    Level N is a :class:`PeriodicList` of period ``B_N``.  The value at index
    n of level N+1 is the level-N value at n plus ``offset / B_{N+1}``, where
    ``digit = (n mod B_{N+1}) // B_N`` and ``offset = rule(N, digit, c)``
    must lie in ``[0, c * B_{N+1} / B_N)``.  The default ``"vdc"`` rule with
    ``c >= 1`` reproduces the mixed-radix radical inverse, so a chain of
    powers of 2 yields base-2 van der Corput values on residues mod ``B_N``.
    ``first_level`` overrides the level-1 values, default ``(j mod B_1) / B_1``.
    """
    chain = [int(b) for b in chain]
    if not chain or chain[0] < 1:
        raise InvalidChainError("chain must start with a positive integer", field="chain")
    for a, b in zip(chain, chain[1:]):
        if b <= a or b % a:
            raise InvalidChainError(f"{a} does not properly divide {b}", field="chain")
    c = Fraction(c)
    if c <= 0:
        raise InvalidSpecError("c must be positive", field="c")
    offset_rule = REFINEMENT_RULES[rule] if isinstance(rule, str) else rule

    B1 = chain[0]
    if first_level is None:
        values = [Fraction(j % B1, B1) for j in range(1, B1 + 1)]
    else:
        values = [seqcore.as_unit(v) for v in first_level]
        if len(values) != B1:
            raise InvalidChainError("first level must have B_1 values", field="first_level")
    levels = [PeriodicList(tuple(values))]
    for N, (B, B_next) in enumerate(zip(chain, chain[1:]), 1):
        ratio = B_next // B
        child = []
        for j in range(B_next):  # position j holds index n = j + 1 (mod B_next)
            digit = ((j + 1) % B_next) // B
            offset = Fraction(offset_rule(N, digit, c))
            if not 0 <= offset < c * ratio:
                raise InvalidSpecError(f"rule offset {offset} outside [0, {c * ratio})",
                                       field="rule")
            child.append(levels[-1].values[j % B] + offset / B_next)
        levels.append(PeriodicList(tuple(child)))
    bounds = [c / B for B in chain[:-1]]
    return SequenceSystem(levels, bounds)


def mean_drift(system):
    """Exact ``|E(v_L) - E(v_{L+1})|`` for consecutive periodic levels."""
    means = [periodic_mean_exact(spec) for spec in system.levels]
    return [abs(a - b) for a, b in zip(means, means[1:])]

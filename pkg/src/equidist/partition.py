"""Partition systems: families of sorted finite sequences V_N in [0, 1].

A level is split into consecutive blocks at cut indices ``1 = j_1 < ... <
j_k``.  Block k has length ``l(k) = v(j_{k+1}) - v(j_k)`` (the last one runs
to 1) and count ``|V(k)|``.  Two sufficient conditions for uniform
distribution are checked level by level: max length -> 0 together with
``|V(k)| / (l(k) B_N) -> 1`` uniformly in k (the "UN" pair), and max length -> 0
together with ``M_N l_N / (m_N L_N) -> 1`` (the "LIM" pair).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import seqcore
from ._reduce import ordered_map
from .errors import (DegenerateBlockError, InvalidPartitionError, InvalidSpecError,
                     MissingLevelError)
from .meanstats import ConvergenceTable, _cdf_deviation, dyadic_grid


class PartitionSystem:
    """Levels produced by ``generator(N) -> sorted sequence`` for N in ``levels``.

    ``levels`` is the supported range (any container), ``natural_cuts`` an
    optional ``N -> cut indices`` rule that a decomposition can refer to as
    ``{"kind": "natural"}``.
    """

    def __init__(self, generator, levels, name="custom", natural_cuts=None, params=None,
                 strict=False):
        self.generator = generator
        self.levels = levels
        self.name = name
        self.natural_cuts = natural_cuts
        self.params = dict(params or {})
        self.strict = strict
        self._cache = {}

    @classmethod
    def explicit(cls, levels, strict=False):
        data = {int(N): tuple(seqcore.as_unit(v, f"levels[{N}][{i}]") for i, v in enumerate(vs))
                for N, vs in levels.items()}
        system = cls(data.__getitem__, sorted(data), "explicit", strict=strict)
        system.data = data
        return system

    def has_level(self, N):
        return N in self.levels

    def values(self, N):
        if not self.has_level(N):
            raise MissingLevelError(f"system {self.name!r} has no level {N}", field="level")
        if N not in self._cache:
            vals = tuple(self.generator(N))
            check_sorted(vals, self.strict)
            self._cache[N] = vals
        return self._cache[N]

    def array(self, N):
        return np.array([float(v) for v in self.values(N)])

    def size(self, N):
        return len(self.values(N))

    def validate(self, levels):
        """Finite-horizon checks that sizes grow and the first point falls toward 0.

        Returns a dict of booleans rather than raising: these are diagnostics
        of limit properties, not preconditions.
        """
        sizes = [self.size(N) for N in levels]
        firsts = [self.values(N)[0] for N in levels]
        return {
            "sizes_increasing": all(a < b for a, b in zip(sizes, sizes[1:])),
            "first_nonincreasing": all(a >= b for a, b in zip(firsts, firsts[1:])),
            "first_value_last": float(firsts[-1]),
        }


def check_sorted(values, strict=False):
    bad = [i for i in range(len(values) - 1)
           if values[i] > values[i + 1] or (strict and values[i] == values[i + 1])]
    if bad:
        raise InvalidPartitionError(f"level is not {'increasing' if strict else 'sorted'} "
                                    f"at position {bad[0] + 1}", field="values")


# -- decomposition ----------------------------------------------------------


@dataclass
class BlockStats:
    lengths: list
    counts: list
    cuts: tuple

    @property
    def size(self):
        return sum(self.counts)

    @property
    def max_count(self):
        return max(self.counts)

    @property
    def min_count(self):
        return min(self.counts)

    @property
    def max_length(self):
        return max(self.lengths)

    @property
    def min_length(self):
        return min(self.lengths)

    @property
    def degenerate(self):
        return [k for k, l in enumerate(self.lengths) if l == 0]


def decompose(values, cuts):
    """Block lengths and counts of a sorted sequence split at 1-based ``cuts``."""
    values = list(values)
    check_sorted(values)
    B = len(values)
    cuts = tuple(int(j) for j in cuts)
    if not cuts or cuts[0] != 1:
        raise InvalidPartitionError("the first cut must be index 1", field="cuts")
    if any(a >= b for a, b in zip(cuts, cuts[1:])) or cuts[-1] > B:
        raise InvalidPartitionError(f"cuts must increase within 1..{B}", field="cuts")
    starts = [values[j - 1] for j in cuts]
    lengths = [b - a for a, b in zip(starts, starts[1:])] + [1 - starts[-1]]
    bounds = list(cuts) + [B + 1]
    counts = [b - a for a, b in zip(bounds, bounds[1:])]
    return BlockStats(lengths, counts, cuts)


def singleton_cuts(values):
    return tuple(range(1, len(values) + 1))


def every_cuts(values, step):
    return tuple(range(1, len(values) + 1, step))


def grid_cuts(values, base, digits):
    """Cut at the first index whose value reaches each grid point ``i / base**digits``."""
    arr = np.array([float(v) for v in values])
    pts = np.arange(base ** digits) / base ** digits
    idx = np.unique(np.searchsorted(arr, pts, side="left"))
    idx = idx[idx < arr.size] + 1
    return tuple(sorted({1, *idx.tolist()}))


@dataclass(frozen=True)
class DecompositionRule:
    """How cut indices are chosen at each level.

    kind: ``singleton`` | ``every`` (param ``step``) | ``grid`` (params
    ``base``, ``digits``; digits may be ``"level"`` to use N) | ``natural``.
    """

    kind: str = "singleton"
    step: int = 1
    base: int = 2
    digits: object = "level"

    def cuts(self, system, N):
        values = system.values(N)
        if self.kind == "singleton":
            return singleton_cuts(values)
        if self.kind == "every":
            return every_cuts(values, self.step)
        if self.kind == "grid":
            digits = N if self.digits == "level" else int(self.digits)
            return grid_cuts(values, self.base, digits)
        if self.kind == "natural":
            if system.natural_cuts is None:
                raise InvalidSpecError(f"system {system.name!r} has no natural cuts",
                                       field="rule")
            return tuple(system.natural_cuts(N))
        raise InvalidSpecError(f"unknown decomposition rule {self.kind!r}", field="rule")


def level_stats(system, rule, N):
    return decompose(system.values(N), rule.cuts(system, N))


# -- condition checks -------------------------------------------------------


@dataclass
class ConditionReport:
    first: ConvergenceTable
    second: ConvergenceTable
    degenerate: dict = field(default_factory=dict)  # level -> block indices excluded

    def tables(self):
        return [self.first, self.second]


def check_conditions_un(system, rule, levels, jobs=1):
    """Max block length (target 0) and max |count/(length*B_N) - 1| (target 0).

    Zero-length blocks cannot enter the ratio; they are skipped and listed
    in ``degenerate``.
    """
    def row(N):
        st = level_stats(system, rule, N)
        B = st.size
        ratios = [abs(c / (float(l) * B) - 1) for l, c in zip(st.lengths, st.counts) if l != 0]
        return float(st.max_length), (max(ratios) if ratios else float("nan")), st.degenerate

    out = ordered_map(row, levels, jobs)
    return ConditionReport(
        ConvergenceTable([(N, r[0]) for N, r in zip(levels, out)], 0.0, "un1_max_length"),
        ConvergenceTable([(N, r[1]) for N, r in zip(levels, out)], 0.0, "un2_count_ratio"),
        {N: r[2] for N, r in zip(levels, out) if r[2]},
    )


def check_conditions_lim(system, rule, levels, jobs=1):
    """``L_N`` (target 0) and ``M_N l_N / (m_N L_N)`` (target 1)."""
    def row(N):
        st = level_stats(system, rule, N)
        if st.min_length == 0 or st.max_length == 0:
            raise DegenerateBlockError(f"level {N} has a zero-length extremal block",
                                       field="level")
        ratio = st.max_count * st.min_length / (st.min_count * st.max_length)
        return st.max_length, ratio

    out = ordered_map(row, levels, jobs)
    return ConditionReport(
        ConvergenceTable([(N, float(r[0])) for N, r in zip(levels, out)], 0.0, "lim0_max_length"),
        ConvergenceTable([(N, float(r[1])) for N, r in zip(levels, out)], 1.0, "lim1_ratio"),
    )


def system_ud_test(system, levels, x_grid, jobs=1):
    """Max over the grid of | |{n <= B_N : v_N(n) < x}| / B_N - x | per level."""
    grid = np.asarray(x_grid, dtype=np.float64)
    rows = ordered_map(lambda N: (N, _cdf_deviation(system.array(N), grid)), levels, jobs)
    return ConvergenceTable(rows, 0.0, "system_ud")


def periodic_extension(system, N):
    return seqcore.PeriodicList(system.values(N))


# -- builtins ---------------------------------------------------------------


class _AllLevels:
    def __contains__(self, N):
        return isinstance(N, (int, np.integer)) and N >= 1


def equipartition():
    """``V_N = (0, 1/N, ..., (N-1)/N)``."""
    return PartitionSystem(lambda N: [Fraction(j, N) for j in range(N)], _AllLevels(),
                           "equipartition", natural_cuts=lambda N: range(1, N + 1))


def vdc_prefix(max_level=24):
    """Sorted van der Corput base-2 values of indices 0..2**N - 1 (B_N = 2**N)."""
    def gen(N):
        n = np.arange(2 ** N, dtype=np.int64)
        num = np.zeros_like(n)
        for bit in range(N):  # radical inverse numerator = bit reversal over N bits
            num |= ((n >> bit) & 1) << (N - 1 - bit)
        den = 2 ** N
        return [Fraction(int(a), den) for a in np.sort(num)]

    levels = range(1, max_level + 1)
    return PartitionSystem(gen, levels, "vdc_prefix", natural_cuts=lambda N: range(1, 2 ** N + 1))


def clustered():
    """All mass in [0, 1/2): ``V_N = (j / (2N))`` for j < N.  Not uniformly distributed."""
    return PartitionSystem(lambda N: [Fraction(j, 2 * N) for j in range(N)], _AllLevels(),
                           "clustered", natural_cuts=lambda N: (1,))


def ragged(seed=0):
    """Level N: 2**N equal-length blocks holding 1 or 2 points each, chosen by a seeded RNG.

    Both counts occur at every level, so ``M_N l_N / (m_N L_N) = 2``; use the
    ``natural`` decomposition rule to recover the blocks.
    """
    def counts(N):
        k = 2 ** N
        rng = np.random.default_rng([seed, N])
        c = rng.integers(1, 3, size=k)
        c[0], c[-1] = 1, 2
        return c

    def gen(N):
        k = 2 ** N
        out = []
        for b, c in enumerate(counts(N)):
            out.extend(Fraction(b, k) + Fraction(i, k * int(c)) for i in range(int(c)))
        return out

    def cuts(N):
        return (np.concatenate([[0], np.cumsum(counts(N))[:-1]]) + 1).tolist()

    return PartitionSystem(gen, _AllLevels(), "ragged", natural_cuts=cuts, params={"seed": seed})


BUILTINS = {"equipartition": equipartition, "vdc_prefix": vdc_prefix, "clustered": clustered,
            "ragged": ragged}


def builtin(name, **params):
    if name not in BUILTINS:
        raise InvalidSpecError(f"unknown partition builtin {name!r}", field="name")
    system = BUILTINS[name](**params)
    system.params = dict(params)
    return system

"""Asymptotic density and Buck measure density on finite windows.

A :class:`SetWindow` is a subset of ``{1, ..., N_h}``.  Coverings by residue
classes ``r + (m)`` with ``m <= M`` are verified on the window only, so every
cost returned here is an upper bound for the windowed set and says nothing
about the set beyond the window.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from pathlib import Path

import numpy as np

from .errors import (InvalidSpecError, OutOfWindowError, ResourceCapError, SpecParseError,
                     StrategyUnavailableError)
from .meanstats import ConvergenceTable, _check_horizons

DEFAULT_WINDOW = 10_000
DEFAULT_EXACT_BOUND = 12
DEFAULT_GREEDY_BOUND = 1000
EXACT_CANDIDATE_CAP = 300
DEFAULT_NODE_LIMIT = 2_000_000


@dataclass(frozen=True)
class ArithProg:
    """The residue class ``r + (m) = {n >= 1 : n = r (mod m)}``.

    Ordering is by modulus, then residue.
    """

    r: int
    m: int

    def __lt__(self, other):
        return (self.m, self.r) < (other.m, other.r)

    def __post_init__(self):
        if self.m < 1 or not 0 <= self.r < self.m:
            raise InvalidSpecError(f"need 0 <= r < m, got r={self.r}, m={self.m}")

    def __contains__(self, n):
        return n % self.m == self.r

    def mask(self, horizon):
        n = np.arange(1, horizon + 1)
        return n % self.m == self.r

    def __str__(self):
        return f"{self.r}+({self.m})"


@dataclass(frozen=True)
class Covering:
    progressions: tuple

    def __post_init__(self):
        object.__setattr__(self, "progressions", tuple(sorted(self.progressions)))

    @property
    def cost(self):
        return sum((Fraction(1, p.m) for p in self.progressions), Fraction(0))

    def mask(self, horizon):
        out = np.zeros(horizon, dtype=bool)
        for p in self.progressions:
            out |= p.mask(horizon)
        return out

    def to_dict(self):
        return {"cost": str(self.cost),
                "progressions": [{"r": p.r, "m": p.m} for p in self.progressions]}

    def __str__(self):
        return " | ".join(map(str, self.progressions)) or "<empty>"


class SetWindow:
    """Finite truncation ``A ∩ [1, horizon]`` stored as a boolean array."""

    def __init__(self, horizon, membership):
        membership = np.asarray(membership, dtype=bool)
        if membership.shape != (horizon,):
            raise InvalidSpecError("membership must have one entry per index 1..horizon")
        self.horizon = int(horizon)
        self.membership = membership

    @classmethod
    def from_members(cls, members, horizon=None):
        members = [int(n) for n in members]
        if any(n < 1 for n in members):
            raise InvalidSpecError("set members must be positive integers")
        if horizon is None:
            horizon = max(members, default=1)
        mem = np.zeros(horizon, dtype=bool)
        inside = [n for n in members if n <= horizon]
        mem[np.array(inside, dtype=np.int64) - 1] = True
        return cls(horizon, mem)

    @classmethod
    def from_file(cls, path, horizon=None):
        members = []
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                members.append(int(line))
            except ValueError:
                raise SpecParseError(f"not an integer: {line!r}", field=str(path),
                                     line=lineno, column=1) from None
        return cls.from_members(members, horizon)

    @classmethod
    def from_expression(cls, expr, horizon=DEFAULT_WINDOW):
        """Union of progressions, e.g. ``"(2) | 1+(4)"``; ``"N"`` is everything."""
        mem = np.zeros(horizon, dtype=bool)
        for term in re.split(r"\s*(?:\||∪|,|\bu\b)\s*", expr.strip()):
            if term in ("N", "ℕ", "all"):
                mem[:] = True
                continue
            if not term or term in ("{}", "empty"):
                continue
            match = re.fullmatch(r"(?:(\d+)\s*\+\s*)?\(\s*(\d+)\s*\)", term)
            if not match:
                raise SpecParseError(f"cannot parse progression {term!r}", field="set")
            r, m = int(match.group(1) or 0), int(match.group(2))
            if m < 1:
                raise SpecParseError(f"modulus must be >= 1 in {term!r}", field="set")
            mem |= ArithProg(r % m, m).mask(horizon)
        return cls(horizon, mem)

    @classmethod
    def builtin(cls, name, horizon=DEFAULT_WINDOW):
        n = np.arange(1, horizon + 1)
        if name == "evens":
            return cls(horizon, n % 2 == 0)
        if name == "odds":
            return cls(horizon, n % 2 == 1)
        if name == "all":
            return cls(horizon, np.ones(horizon, dtype=bool))
        if name == "squarefree":
            mem = np.ones(horizon, dtype=bool)
            for d in range(2, math.isqrt(horizon) + 1):
                mem[d * d - 1 :: d * d] = False
            return cls(horizon, mem)
        if name in ("primes", "primes-in-window"):
            mem = np.ones(horizon, dtype=bool)
            mem[0] = False
            for d in range(2, math.isqrt(horizon) + 1):
                if mem[d - 1]:
                    mem[d * d - 1 :: d] = False
            return cls(horizon, mem)
        raise SpecParseError(f"unknown builtin set {name!r}", field="set")

    def complement(self):
        return SetWindow(self.horizon, ~self.membership)

    @property
    def members(self):
        return np.flatnonzero(self.membership) + 1

    def __len__(self):
        return int(np.count_nonzero(self.membership))

    def __contains__(self, n):
        return 1 <= n <= self.horizon and bool(self.membership[n - 1])


def asymptotic_density_estimate(A, horizons):
    """``|A ∩ [1, N]| / N`` per horizon."""
    horizons = _check_horizons(horizons)
    if horizons[-1] > A.horizon:
        raise OutOfWindowError(f"horizon {horizons[-1]} exceeds window {A.horizon}",
                               field="horizons")
    counts = np.cumsum(A.membership)
    rows = [(N, int(counts[N - 1]) / N) for N in horizons]
    return ConvergenceTable(rows, target=None, name="density")


def verify_cover(c, A):
    return bool(np.all(c.mask(A.horizon)[A.membership])) if len(A) else True


# -- covering search --------------------------------------------------------


def _candidates(M):
    return [ArithProg(r, m) for m in range(1, M + 1) for r in range(m)]


def _to_int(bits):
    return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")


class _Instance:
    """Members of A as bit positions; each candidate as an int bitmask.

    Costs are scaled by ``L = lcm(1..M)`` so all arithmetic is integral.
    """

    def __init__(self, A, M):
        self.members = A.members
        self.full = (1 << len(self.members)) - 1
        self.scale = reduce(math.lcm, range(1, M + 1), 1)
        self.cands = []
        for m in range(1, M + 1):
            res = self.members % m
            for r in range(m):
                mask = _to_int(res == r)
                if mask:
                    self.cands.append((ArithProg(r, m), self.scale // m, mask))

    def lower_bound(self, uncovered, allowed):
        """Admissible bound: |U| times the best cost-per-element among candidates."""
        size = uncovered.bit_count()
        if not size:
            return 0
        best = None
        for i in allowed:
            _, w, mask = self.cands[i]
            k = (mask & uncovered).bit_count()
            if k and (best is None or w * best[1] < best[0] * k):
                best = (w, k)
        if best is None:
            return None
        return -(-size * best[0] // best[1])


def _greedy(A, M):
    members = A.members
    uncovered = np.ones(members.size, dtype=bool)
    picks = []
    while uncovered.any():
        left = members[uncovered]
        best = None
        for m in range(1, M + 1):
            counts = np.bincount(left % m, minlength=m)
            r = int(np.argmax(counts * m))
            score = int(counts[r]) * m
            # strict improvement keeps the lowest modulus, then lowest residue
            if best is None or score > best[0]:
                best = (score, ArithProg(r, m))
        p = best[1]
        picks.append(p)
        uncovered &= members % p.m != p.r
    # drop redundant picks, latest first
    kept = list(picks)
    for p in reversed(picks):
        trial = [q for q in kept if q != p]
        if Covering(tuple(trial)).mask(A.horizon)[A.membership].all():
            kept = trial
    return Covering(tuple(kept))


def _exact(A, M, node_limit):
    inst = _Instance(A, M)
    incumbent = _greedy(A, M)
    best_cost = int(incumbent.cost * inst.scale)
    best_pick = None
    nodes = 0
    n_cands = len(inst.cands)

    # element j is covered by the candidates (j mod m, m); precompute by bit
    by_modulus = {}
    for i, (p, _, _) in enumerate(inst.cands):
        by_modulus[(p.m, p.r)] = i

    def covering_of(pos):
        n = int(inst.members[pos])
        return [by_modulus[(m, n % m)] for m in range(1, M + 1)]

    # phase 1: optimum cost by branching on the lowest uncovered element
    def branch(uncovered, cost, allowed, picked):
        nonlocal best_cost, best_pick, nodes
        nodes += 1
        if nodes > node_limit:
            raise ResourceCapError(f"exact covering search exceeded {node_limit} nodes; "
                                   "try strategy greedy")
        if not uncovered:
            if cost < best_cost:
                best_cost, best_pick = cost, list(picked)
            return
        lb = inst.lower_bound(uncovered, allowed)
        if lb is None or cost + lb >= best_cost:
            return
        pos = (uncovered & -uncovered).bit_length() - 1
        options = [i for i in covering_of(pos) if i in allowed]
        options.sort(key=lambda i: (-(inst.cands[i][2] & uncovered).bit_count() * inst.cands[i][0].m,
                                    inst.cands[i][0]))
        remaining = set(allowed)
        for i in options:
            _, w, mask = inst.cands[i]
            picked.append(i)
            branch(uncovered & ~mask, cost + w, remaining, picked)
            picked.pop()
            remaining = remaining - {i}

    branch(inst.full, 0, frozenset(range(n_cands)), [])
    optimum = best_cost

    # phase 2: lexicographically least covering at the optimum cost
    order = sorted(range(n_cands), key=lambda i: inst.cands[i][0])
    suffix_union = [0] * (n_cands + 1)
    for idx in range(n_cands - 1, -1, -1):
        suffix_union[idx] = suffix_union[idx + 1] | inst.cands[order[idx]][2]

    def lex(idx, uncovered, cost, picked):
        nonlocal nodes
        nodes += 1
        if nodes > node_limit:
            raise ResourceCapError(f"exact covering search exceeded {node_limit} nodes; "
                                   "try strategy greedy")
        if not uncovered:
            return list(picked)
        if idx == n_cands or uncovered & ~suffix_union[idx]:
            return None
        lb = inst.lower_bound(uncovered, [order[j] for j in range(idx, n_cands)])
        if lb is None or cost + lb > optimum:
            return None
        i = order[idx]
        _, w, mask = inst.cands[i]
        if mask & uncovered and cost + w <= optimum:
            picked.append(i)
            found = lex(idx + 1, uncovered & ~mask, cost + w, picked)
            picked.pop()
            if found is not None:
                return found
        return lex(idx + 1, uncovered, cost, picked)

    chosen = lex(0, inst.full, 0, [])
    if chosen is None:  # pragma: no cover - phase 1 found a cover of this cost
        chosen = best_pick
    return Covering(tuple(inst.cands[i][0] for i in chosen))


def mu_upper_bound(A, modulus_bound=None, strategy="exact", candidate_cap=EXACT_CANDIDATE_CAP,
                   node_limit=DEFAULT_NODE_LIMIT):
    """Cheapest covering of the windowed set by progressions with moduli <= M.

    ``strategy="exact"`` runs branch-and-bound and returns the least cost,
    with ties resolved to the lexicographically least covering (progressions
    sorted by modulus then residue).  ``"greedy"`` repeatedly takes the class
    with the most newly covered members per unit cost and then drops
    redundant picks.  Returns ``(cost, covering)``.
    """
    if strategy not in ("exact", "greedy"):
        raise InvalidSpecError(f"unknown strategy {strategy!r}", field="strategy")
    if modulus_bound is None:
        modulus_bound = DEFAULT_EXACT_BOUND if strategy == "exact" else DEFAULT_GREEDY_BOUND
    M = int(modulus_bound)
    if M < 1:
        raise InvalidSpecError("modulus bound must be >= 1", field="modulus_bound")
    if not len(A):
        return Fraction(0), Covering(())
    if strategy == "exact":
        n_cands = M * (M + 1) // 2
        if n_cands > candidate_cap:
            raise StrategyUnavailableError(
                f"{n_cands} candidate progressions exceed the exact-search cap of "
                f"{candidate_cap}; use strategy greedy", field="modulus_bound")
        cover = _exact(A, M, node_limit)
    else:
        cover = _greedy(A, M)
    assert verify_cover(cover, A)
    return cover.cost, cover


def measurability_gap(A, modulus_bound=None, strategy="exact", **kw):
    """``mu*(A) + mu*(complement) - 1`` from windowed upper bounds.

    A diagnostic: it is an upper bound on the true gap only insofar as both
    covering costs are close to the true densities.
    """
    a, _ = mu_upper_bound(A, modulus_bound, strategy, **kw)
    b, _ = mu_upper_bound(A.complement(), modulus_bound, strategy, **kw)
    return a + b - 1

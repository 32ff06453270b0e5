"""Partial means, empirical distribution functions and uniformity tests.

Every tester returns a :class:`ConvergenceTable`: a finite-horizon view of a
limit statement.  Tables report, they never decide; thresholds belong to
the caller.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from . import seqcore
from ._reduce import ordered_map, pairwise_mean
from .errors import EmptyInputError, ExactnessUnavailableError, InvalidSpecError

MAX_MONOMIAL_DEGREE = 8


def format_number(x):
    """JSON/CSV rendering: Fractions as "p/q" strings, floats by repr."""
    if x is None:
        return "unknown"
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(x)


# -- test functions ---------------------------------------------------------


@dataclass(frozen=True)
class Monomial:
    degree: int

    def __post_init__(self):
        if isinstance(self.degree, bool) or not isinstance(self.degree, int):
            raise InvalidSpecError("monomial degree must be an integer", field="degree")
        if not 0 <= self.degree <= MAX_MONOMIAL_DEGREE:
            raise InvalidSpecError(
                f"monomial degree must lie in 0..{MAX_MONOMIAL_DEGREE}", field="degree")

    def __call__(self, x):
        if isinstance(x, np.ndarray):
            return x ** self.degree if self.degree else np.ones_like(x, dtype=np.float64)
        return x ** self.degree

    def integral(self):
        return Fraction(1, self.degree + 1)

    @property
    def label(self):
        return f"x^{self.degree}"


@dataclass(frozen=True)
class PiecewiseLinear:
    knots: tuple

    def __post_init__(self):
        knots = tuple((seqcore.as_unit(x, f"knots[{i}].x"), _finite(y, f"knots[{i}].y"))
                      for i, (x, y) in enumerate(self.knots))
        if len(knots) < 2:
            raise InvalidSpecError("need at least two knots", field="knots")
        xs = [x for x, _ in knots]
        if any(a >= b for a, b in zip(xs, xs[1:])):
            raise InvalidSpecError("knot abscissae must be strictly increasing", field="knots")
        if xs[0] != 0 or xs[-1] != 1:
            raise InvalidSpecError("knots must span [0, 1]", field="knots")
        object.__setattr__(self, "knots", knots)

    @property
    def exact(self):
        return all(seqcore.is_exact(x) and seqcore.is_exact(y) for x, y in self.knots)

    def __call__(self, x):
        if isinstance(x, np.ndarray):
            xs = np.array([float(a) for a, _ in self.knots])
            ys = np.array([float(b) for _, b in self.knots])
            return np.interp(x, xs, ys)
        for (x0, y0), (x1, y1) in zip(self.knots, self.knots[1:]):
            if x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        return self.knots[-1][1]

    def integral(self):
        total = Fraction(0)
        for (x0, y0), (x1, y1) in zip(self.knots, self.knots[1:]):
            total += (Fraction(x1) - Fraction(x0)) * (Fraction(y0) + Fraction(y1)) / 2
        return total

    @property
    def label(self):
        return "pwl(" + ";".join(f"{x},{y}" for x, y in self.knots) + ")"


def _finite(y, where):
    if isinstance(y, bool) or not isinstance(y, (int, float, Fraction)):
        raise InvalidSpecError(f"{where} must be a number", field=where)
    if isinstance(y, float) and not np.isfinite(y):
        raise InvalidSpecError(f"{where} must be finite", field=where)
    return Fraction(y) if isinstance(y, int) else y


TestFunctionSpec = Union[Monomial, PiecewiseLinear]
IDENTITY = Monomial(1)


def exact_integral(g):
    """Integral of ``g`` over [0, 1] as an exact rational."""
    return g.integral()


# -- tables -----------------------------------------------------------------


@dataclass
class ConvergenceTable:
    rows: list
    target: Optional[Union[float, Fraction]] = None
    name: str = "statistic"

    def __post_init__(self):
        self.rows = [(int(h), s) for h, s in self.rows]
        hs = [h for h, _ in self.rows]
        if any(a >= b for a, b in zip(hs, hs[1:])):
            raise ValueError("horizons must be strictly increasing")

    @property
    def horizons(self):
        return [h for h, _ in self.rows]

    @property
    def statistics(self):
        return [s for _, s in self.rows]

    def __getitem__(self, horizon):
        for h, s in self.rows:
            if h == horizon:
                return s
        raise KeyError(horizon)

    def to_dict(self):
        return {
            "name": self.name,
            "target": format_number(self.target),
            "rows": [{"horizon": h, "statistic": format_number(s)} for h, s in self.rows],
        }

    def to_csv(self, with_name=False):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        head = ["horizon", "statistic", "target"]
        w.writerow((["table"] + head) if with_name else head)
        for h, s in self.rows:
            row = [h, format_number(s), format_number(self.target)]
            w.writerow(([self.name] + row) if with_name else row)
        return buf.getvalue()

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def _check_horizons(horizons):
    horizons = [int(h) for h in horizons]
    if not horizons:
        raise EmptyInputError("need at least one horizon", field="horizons")
    if horizons[0] < 1 or any(a >= b for a, b in zip(horizons, horizons[1:])):
        raise InvalidSpecError("horizons must be strictly increasing positive integers",
                               field="horizons")
    return horizons


# -- means ------------------------------------------------------------------


def partial_mean(spec, N, g=IDENTITY, exact=False, jobs=1):
    """``(1/N) * sum_{n<=N} g(v(n))``.

    The float path uses the deterministic pairwise tree; ``exact=True`` sums
    Fractions and needs a rational sequence and rational ``g``.
    """
    if N < 1:
        raise InvalidSpecError("horizon must be >= 1", field="N")
    if exact:
        if isinstance(g, PiecewiseLinear) and not g.exact:
            raise ExactnessUnavailableError("test function has non-rational knots")
        return sum((Fraction(g(v)) for v in seqcore.exact_values(spec, N)), Fraction(0)) / N
    return pairwise_mean(g(seqcore.sample(spec, N)), jobs)


def periodic_mean_exact(spec, g=IDENTITY):
    """Exact mean value ``(1/B) * sum_{j<=B} g(v(j))`` of a periodic list.

    The normalization by the period is deliberate: the mean of a periodic
    sequence is its average over one period.
    """
    spec = seqcore.as_periodic(spec)
    if not all(seqcore.is_exact(v) for v in spec.values):
        raise ExactnessUnavailableError("periodic values are not all rational")
    if isinstance(g, PiecewiseLinear) and not g.exact:
        raise ExactnessUnavailableError("test function has non-rational knots")
    return sum((Fraction(g(v)) for v in spec.values), Fraction(0)) / spec.period


def empirical_cdf(spec, N, x):
    """``|{n <= N : v(n) < x}| / N`` (strict inequality)."""
    return float(np.count_nonzero(seqcore.sample(spec, N) < x)) / N


def star_discrepancy(values):
    """Star discrepancy of a finite point set in [0, 1].

    With the points sorted, the supremum of |F_N(x) - x| is attained at a
    point and equals ``max_i max(i/N - x_i, x_i - (i-1)/N)``.
    """
    x = np.sort(np.asarray(values, dtype=np.float64).ravel())
    if x.size == 0:
        raise EmptyInputError("star discrepancy of an empty point set", field="values")
    n = x.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - x), np.max(x - (i - 1) / n)))


def dyadic_grid(bits):
    return [i / 2 ** bits for i in range(2 ** bits + 1)]


def _cdf_deviation(sorted_vals, grid):
    counts = np.searchsorted(sorted_vals, grid, side="left")
    return float(np.max(np.abs(counts / sorted_vals.size - grid)))


def ud_test(spec, horizons, x_grid, jobs=1):
    """Max over the grid of |F_N(x) - x| at each horizon; target 0."""
    horizons = _check_horizons(horizons)
    grid = np.asarray(x_grid, dtype=np.float64)
    if grid.size == 0:
        raise EmptyInputError("empty x grid", field="x_grid")
    vals = seqcore.sample(spec, horizons[-1])

    def row(N):
        return N, _cdf_deviation(np.sort(vals[:N]), grid)

    return ConvergenceTable(ordered_map(row, horizons, jobs), target=0.0, name="ud")


def ud_in_Z_test(spec, moduli, N):
    """Residue-frequency deviation of an index sequence, one table per modulus.

    ``N`` may be a single horizon or an increasing list of horizons.  The
    statistic is ``max_r | |{n <= N : k_n = r (mod m)}| / N - 1/m |``, kept
    exact as a Fraction.
    """
    horizons = _check_horizons([N] if isinstance(N, int) else N)
    if max(moduli) > horizons[0]:
        raise InvalidSpecError("horizon must be at least the largest modulus", field="N")
    k = seqcore.index_sample(spec, horizons[-1])
    out = {}
    for m in moduli:
        rows = []
        for h in horizons:
            counts = np.bincount(k[:h] % m, minlength=m)
            rows.append((h, max(abs(Fraction(int(c), h) - Fraction(1, m)) for c in counts)))
        out[m] = ConvergenceTable(rows, target=Fraction(0), name=f"mod{m}")
    return out


def subsequence_mean_test(v, k, g, horizons, jobs=1):
    """|E_N(g(v(k_n))) - integral of g| per horizon; target 0."""
    horizons = _check_horizons(horizons)
    idx = seqcore.index_sample(k, horizons[-1])
    gv = g(seqcore.sample_at(v, idx))
    target = float(exact_integral(g))

    def row(N):
        return N, abs(pairwise_mean(gv[:N]) - target)

    return ConvergenceTable(ordered_map(row, horizons, jobs), target=0.0, name="subsequence")


def mean_table(spec, horizons, g=IDENTITY, jobs=1):
    """Partial means per horizon; target is the exact mean for periodic specs."""
    horizons = _check_horizons(horizons)
    gv = g(seqcore.sample(spec, horizons[-1]))
    target = None
    if seqcore.period_of(spec) is not None:
        try:
            target = periodic_mean_exact(spec, g)
        except ExactnessUnavailableError:
            target = pairwise_mean(g(seqcore.sample(spec, seqcore.period_of(spec))))
    rows = ordered_map(lambda N: (N, pairwise_mean(gv[:N])), horizons, jobs)
    return ConvergenceTable(rows, target=target, name="mean")


def discrepancy_table(spec, horizons, jobs=1):
    horizons = _check_horizons(horizons)
    vals = seqcore.sample(spec, horizons[-1])
    rows = ordered_map(lambda N: (N, star_discrepancy(vals[:N])), horizons, jobs)
    return ConvergenceTable(rows, target=0.0, name="star_discrepancy")

"""Sequence classes and their evaluation.

Sequences are 1-based: ``evaluate(spec, n)`` is defined for ``n >= 1``.
Two kernels are offered.  :func:`evaluate` returns exact
:class:`~fractions.Fraction` values whenever the underlying definition is
rational, and :func:`sample` returns a float64 array of the first ``N``
terms for large-horizon empirics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Sequence, Union

import numpy as np

from .errors import ExactnessUnavailableError, InvalidSpecError, MissingLevelError

Rational = Fraction
UnitValue = Union[float, Fraction]


def is_prime(p):
    if not isinstance(p, (int, np.integer)) or p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    return all(p % d for d in range(3, math.isqrt(p) + 1, 2))


def as_unit(value, where="value"):
    """Validate a unit-interval value, keeping ints/Fractions exact."""
    if isinstance(value, bool):
        raise InvalidSpecError(f"{where} must be a number", field=where)
    if isinstance(value, _RationalABC):
        value = Fraction(value)
    elif isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            raise InvalidSpecError(f"{where} must be finite", field=where)
    else:
        raise InvalidSpecError(f"{where} must be a number, got {value!r}", field=where)
    if not 0 <= value <= 1:
        raise InvalidSpecError(f"{where}={value} lies outside [0, 1]", field=where)
    return value


def is_exact(value):
    return isinstance(value, (int, Fraction))


# -- sequence specs ---------------------------------------------------------


@dataclass(frozen=True)
class VanDerCorput:
    base: int

    def __post_init__(self):
        if isinstance(self.base, bool) or not isinstance(self.base, int) or self.base < 2:
            raise InvalidSpecError(f"van der Corput base must be an integer >= 2, got {self.base!r}",
                                   field="base")


@dataclass(frozen=True)
class PeriodicList:
    values: tuple

    def __post_init__(self):
        vals = tuple(as_unit(v, f"values[{i}]") for i, v in enumerate(self.values))
        if not vals:
            raise InvalidSpecError("periodic list must be nonempty", field="values")
        object.__setattr__(self, "values", vals)

    @property
    def period(self):
        return len(self.values)


@dataclass(frozen=True)
class MultiplicativeAlpha:
    primes: tuple
    exponent: Union[int, float, Fraction]

    def __post_init__(self):
        primes = tuple(sorted(set(self.primes)))
        if len(primes) != len(self.primes):
            raise InvalidSpecError("primes must be distinct", field="primes")
        for p in primes:
            if not is_prime(p):
                raise InvalidSpecError(f"{p!r} is not prime", field="primes")
        s = self.exponent
        if isinstance(s, bool) or not isinstance(s, (int, float, Fraction)):
            raise InvalidSpecError("exponent must be a number", field="exponent")
        if not s > 1:
            raise InvalidSpecError(f"exponent must exceed 1, got {s}", field="exponent")
        object.__setattr__(self, "primes", tuple(int(p) for p in primes))


@dataclass(frozen=True)
class PartitionExtension:
    """Periodic extension of level ``level`` of a partition system.

    ``system`` is any object with ``values(level)`` returning the sorted
    finite sequence and ``has_level(level)``.
    """

    system: object = field(compare=False)
    level: int = 1

    def resolve(self):
        if not self.system.has_level(self.level):
            raise MissingLevelError(f"partition system has no level {self.level}", field="level")
        return PeriodicList(tuple(self.system.values(self.level)))


@dataclass(frozen=True)
class Constant:
    c: UnitValue

    def __post_init__(self):
        object.__setattr__(self, "c", as_unit(self.c, "c"))


SequenceSpec = Union[VanDerCorput, PeriodicList, MultiplicativeAlpha, PartitionExtension, Constant]


# -- index sequences --------------------------------------------------------


@dataclass(frozen=True)
class Identity:
    pass


@dataclass(frozen=True)
class BlockShuffle:
    """Permute positions inside consecutive blocks ``{bM+1, ..., bM+M}``.

    ``permutation[p]`` is the 0-based in-block offset returned for position p.
    """

    modulus: int
    permutation: tuple

    def __post_init__(self):
        perm = tuple(int(p) for p in self.permutation)
        if self.modulus < 1:
            raise InvalidSpecError("block modulus must be >= 1", field="modulus")
        if sorted(perm) != list(range(self.modulus)):
            raise InvalidSpecError(f"permutation must be a bijection on 0..{self.modulus - 1}",
                                   field="permutation")
        object.__setattr__(self, "permutation", perm)


IndexSeqSpec = Union[Identity, BlockShuffle]


# -- scalar kernels ---------------------------------------------------------


def radical_inverse(n, base):
    """Exact van der Corput value of ``n``: digits of n mirrored about the point."""
    if base < 2:
        raise InvalidSpecError(f"base must be >= 2, got {base}", field="base")
    if n < 0:
        raise InvalidSpecError(f"index must be nonnegative, got {n}", field="n")
    num, den = 0, 1
    while n:
        n, digit = divmod(n, base)
        num = num * base + digit
        den *= base
    return Fraction(num, den)


def alpha_eval(n, primes, s, exact=None):
    """Product of ``1 - p**-s`` over the primes of ``primes`` dividing ``n``.

    Exact (a Fraction) when ``s`` is an integer; ``exact=True`` with any other
    exponent raises :class:`ExactnessUnavailableError`.
    """
    for p in primes:
        if not is_prime(p):
            raise InvalidSpecError(f"{p!r} is not prime", field="primes")
    if not s > 1:
        raise InvalidSpecError(f"exponent must exceed 1, got {s}", field="exponent")
    integral_s = isinstance(s, int) or (isinstance(s, Fraction) and s.denominator == 1)
    if exact is None:
        exact = integral_s
    if exact and not integral_s:
        raise ExactnessUnavailableError(f"p**-s is irrational for s={s}")
    result = Fraction(1) if exact else 1.0
    for p in primes:
        if n % p == 0:
            result *= (1 - Fraction(1, p ** int(s))) if exact else (1.0 - float(p) ** -float(s))
    return result


def evaluate(spec, n, exact=None):
    """Value of the sequence ``spec`` at index ``n >= 1``."""
    if n < 1:
        raise InvalidSpecError(f"indices are 1-based, got {n}", field="n")
    if isinstance(spec, VanDerCorput):
        v = radical_inverse(n, spec.base)
        return float(v) if exact is False else v
    if isinstance(spec, PeriodicList):
        v = spec.values[(n - 1) % spec.period]
        if exact and not is_exact(v):
            raise ExactnessUnavailableError(f"value {v!r} is not rational")
        return float(v) if exact is False else v
    if isinstance(spec, MultiplicativeAlpha):
        return alpha_eval(n, spec.primes, spec.exponent, exact)
    if isinstance(spec, Constant):
        if exact and not is_exact(spec.c):
            raise ExactnessUnavailableError(f"constant {spec.c!r} is not rational")
        return float(spec.c) if exact is False else spec.c
    if isinstance(spec, PartitionExtension):
        return evaluate(spec.resolve(), n, exact)
    raise InvalidSpecError(f"unknown sequence spec {spec!r}")


def index_eval(spec, n):
    if n < 1:
        raise InvalidSpecError(f"indices are 1-based, got {n}", field="n")
    if isinstance(spec, Identity):
        return n
    if isinstance(spec, BlockShuffle):
        block, pos = divmod(n - 1, spec.modulus)
        return block * spec.modulus + spec.permutation[pos] + 1
    raise InvalidSpecError(f"unknown index spec {spec!r}")


# -- vectorized kernels -----------------------------------------------------


def radical_inverse_array(n, base):
    n = np.asarray(n, dtype=np.int64).copy()
    out = np.zeros(n.shape)
    scale = 1.0 / base
    while n.any():
        out += (n % base) * scale
        n //= base
        scale /= base
    return out


def sample_at(spec, idx):
    """Float values of ``spec`` at the 1-based integer array ``idx``."""
    idx = np.asarray(idx, dtype=np.int64)
    if idx.size and idx.min() < 1:
        raise InvalidSpecError("indices are 1-based", field="n")
    if isinstance(spec, VanDerCorput):
        return radical_inverse_array(idx, spec.base)
    if isinstance(spec, PeriodicList):
        vals = np.array([float(v) for v in spec.values])
        return vals[(idx - 1) % spec.period]
    if isinstance(spec, MultiplicativeAlpha):
        out = np.ones(idx.shape)
        for p in spec.primes:
            out[idx % p == 0] *= 1.0 - float(p) ** -float(spec.exponent)
        return out
    if isinstance(spec, Constant):
        return np.full(idx.shape, float(spec.c))
    if isinstance(spec, PartitionExtension):
        return sample_at(spec.resolve(), idx)
    raise InvalidSpecError(f"unknown sequence spec {spec!r}")


def sample(spec, N):
    """First ``N`` terms ``v(1), ..., v(N)`` as a float64 array."""
    return sample_at(spec, np.arange(1, N + 1, dtype=np.int64))


def index_sample(spec, N):
    n = np.arange(1, N + 1, dtype=np.int64)
    if isinstance(spec, Identity):
        return n
    if isinstance(spec, BlockShuffle):
        block, pos = np.divmod(n - 1, spec.modulus)
        return block * spec.modulus + np.asarray(spec.permutation, dtype=np.int64)[pos] + 1
    raise InvalidSpecError(f"unknown index spec {spec!r}")


def exact_values(spec, N):
    """First ``N`` terms as exact Fractions (raises if unavailable)."""
    return [evaluate(spec, n, exact=True) for n in range(1, N + 1)]


def period_of(spec):
    """Period of a periodic spec, or None."""
    if isinstance(spec, PeriodicList):
        return spec.period
    if isinstance(spec, Constant):
        return 1
    if isinstance(spec, PartitionExtension):
        return spec.resolve().period
    return None


def as_periodic(spec):
    if isinstance(spec, PeriodicList):
        return spec
    if isinstance(spec, Constant):
        return PeriodicList((spec.c,))
    if isinstance(spec, PartitionExtension):
        return spec.resolve()
    raise InvalidSpecError(f"{type(spec).__name__} is not periodic")


def crt_pair(r1, m1, r2, m2):
    """The unique ``r`` in ``[0, m1*m2)`` with r = r1 (mod m1), r = r2 (mod m2)."""
    if math.gcd(m1, m2) != 1:
        raise ValueError("moduli must be coprime")
    t = ((r2 - r1) * pow(m1, -1, m2)) % m2 if m2 > 1 else 0
    return (r1 + m1 * t) % (m1 * m2)

"""Exact Gaussian-rational matrices.

Entries are stored as two integer numerator arrays (real and imaginary part)
over one shared positive denominator.  Integer arithmetic on numpy object
arrays keeps products of small exact matrices fast enough for desk-scale
work, which matters because every certificate in exact mode is rebuilt and
re-verified from matrices.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from numbers import Rational
from typing import Iterable, NamedTuple, Sequence

import numpy as np


class GaussianRational(NamedTuple):
    re: Fraction
    im: Fraction

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    @property
    def is_real(self) -> bool:
        return self.im == 0


def parse_rational(value) -> Fraction:
    """Parse ``"p/q"``, a decimal string, an int or a Fraction exactly."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        # binary floats are exact dyadic rationals
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as a rational")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def rational_sqrt(q: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None if irrational."""
    if q < 0:
        raise ValueError("negative input")
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _as_entry(x) -> tuple[Fraction, Fraction]:
    if isinstance(x, GaussianRational):
        return Fraction(x.re), Fraction(x.im)
    if isinstance(x, (tuple, list)):
        re, im = x
        return parse_rational(re), parse_rational(im)
    if isinstance(x, complex):
        return Fraction(x.real), Fraction(x.imag)
    return parse_rational(x), Fraction(0)


def _int_array(values, shape) -> np.ndarray:
    arr = np.empty(shape, dtype=object)
    arr.flat[:] = [int(v) for v in values]
    return arr


class ExactMatrix:
    """Immutable complex matrix with Gaussian-rational entries."""

    __slots__ = ("re", "im", "den")

    def __init__(self, re: np.ndarray, im: np.ndarray, den: int = 1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if re.shape != im.shape or re.ndim != 2:
            raise ValueError("real and imaginary parts must be 2-d of equal shape")
        if den < 0:
            re, im, den = -re, -im, -den
        g = reduce(math.gcd, re.flat, den)
        g = reduce(math.gcd, im.flat, g)
        if g > 1:
            re = re // g
            im = im // g
            den //= g
        self.re = re
        self.im = im
        self.den = int(den)

    # -- construction -----------------------------------------------------
    @classmethod
    def from_entries(cls, rows: Sequence[Sequence]) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("matrix rows must be nonempty and of equal length")
        shape = (len(rows), len(rows[0]))
        entries = [_as_entry(x) for r in rows for x in r]
        den = reduce(lambda a, b: a * b // math.gcd(a, b),
                     (f.denominator for e in entries for f in e), 1)
        re = _int_array((e[0] * den for e in entries), shape)
        im = _int_array((e[1] * den for e in entries), shape)
        return cls(re, im, den)

    @classmethod
    def zeros(cls, n: int, m: int | None = None) -> "ExactMatrix":
        m = n if m is None else m
        return cls(_int_array([0] * (n * m), (n, m)), _int_array([0] * (n * m), (n, m)))

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls.diag([1] * n)

    @classmethod
    def diag(cls, values: Iterable) -> "ExactMatrix":
        entries = [_as_entry(x) for x in values]
        n = len(entries)
        if not n:
            return cls.zeros(0)
        den = reduce(lambda a, b: a * b // math.gcd(a, b),
                     (f.denominator for e in entries for f in e), 1)
        re = _int_array([0] * (n * n), (n, n))
        im = _int_array([0] * (n * n), (n, n))
        for i, (a, b) in enumerate(entries):
            re[i, i] = int(a * den)
            im[i, i] = int(b * den)
        return cls(re, im, den)

    # -- basic protocol ---------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.re.shape

    def entry(self, i: int, j: int) -> GaussianRational:
        return GaussianRational(Fraction(int(self.re[i, j]), self.den),
                                Fraction(int(self.im[i, j]), self.den))

    def tolist(self) -> list[list[GaussianRational]]:
        n, m = self.shape
        return [[self.entry(i, j) for j in range(m)] for i in range(n)]

    def to_complex(self) -> np.ndarray:
        re = np.array([Fraction(int(x), self.den) for x in self.re.flat], dtype=float)
        im = np.array([Fraction(int(x), self.den) for x in self.im.flat], dtype=float)
        return (re + 1j * im).reshape(self.shape)

    def __repr__(self) -> str:
        return f"ExactMatrix(shape={self.shape}, den={self.den})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (self.shape == other.shape and self.den == other.den
                and bool(np.all(self.re == other.re)) and bool(np.all(self.im == other.im)))

    def __hash__(self):
        return hash((self.shape, self.den, tuple(self.re.flat), tuple(self.im.flat)))

    def is_zero(self) -> bool:
        return not any(self.re.flat) and not any(self.im.flat)

    # -- arithmetic -------------------------------------------------------
    def _aligned(self, other: "ExactMatrix"):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        den = self.den * other.den // math.gcd(self.den, other.den)
        a, b = den // self.den, den // other.den
        return self.re * a, self.im * a, other.re * b, other.im * b, den

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        r1, i1, r2, i2, den = self._aligned(other)
        return ExactMatrix(r1 + r2, i1 + i2, den)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        r1, i1, r2, i2, den = self._aligned(other)
        return ExactMatrix(r1 - r2, i1 - i2, den)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(-self.re, -self.im, self.den)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        if self.shape[1] == 0:
            return ExactMatrix.zeros(self.shape[0], other.shape[1])
        re = self.re.dot(other.re) - self.im.dot(other.im)
        im = self.re.dot(other.im) + self.im.dot(other.re)
        return ExactMatrix(re, im, self.den * other.den)

    def __mul__(self, scalar) -> "ExactMatrix":
        if isinstance(scalar, GaussianRational):
            a, b = scalar
        elif isinstance(scalar, (Rational, str)):
            a, b = parse_rational(scalar), Fraction(0)
        else:
            return NotImplemented
        den = a.denominator * b.denominator
        an, bn = a.numerator * b.denominator, b.numerator * a.denominator
        return ExactMatrix(self.re * an - self.im * bn, self.re * bn + self.im * an,
                           self.den * den)

    __rmul__ = __mul__

    def adjoint(self) -> "ExactMatrix":
        return ExactMatrix(self.re.T.copy(), -self.im.T.copy(), self.den)

    def trace(self) -> GaussianRational:
        n = min(self.shape)
        return GaussianRational(Fraction(sum(int(self.re[i, i]) for i in range(n)), self.den),
                                Fraction(sum(int(self.im[i, i]) for i in range(n)), self.den))

    def diagonal(self) -> list[GaussianRational]:
        return [self.entry(i, i) for i in range(min(self.shape))]

    def is_diagonal(self) -> bool:
        n, m = self.shape
        for i in range(n):
            for j in range(m):
                if i != j and (self.re[i, j] or self.im[i, j]):
                    return False
        return True

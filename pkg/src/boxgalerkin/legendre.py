"""Legendre and associated Legendre polynomials in exact rational arithmetic.

Polynomials are kept as exact ``Fraction`` coefficient vectors from the
Rodrigues expansion; conversion to mpf happens only at evaluation time.
Only even orders ``m`` are supported, for which ``P_l^m`` is a polynomial.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import mpmath
from mpmath import mp, mpf

from .numerics import to_mpf


class Poly:
    """Polynomial with exact rational coefficients, lowest degree first."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        c = [Fraction(x) for x in coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        self.c = tuple(c) if c else (Fraction(0),)

    @property
    def degree(self) -> int:
        return -1 if self.c == (0,) else len(self.c) - 1

    def __add__(self, other):
        other = other if isinstance(other, Poly) else Poly([other])
        n = max(len(self.c), len(other.c))
        a = self.c + (Fraction(0),) * (n - len(self.c))
        b = other.c + (Fraction(0),) * (n - len(other.c))
        return Poly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-x for x in self.c])

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else Poly([-Fraction(other)]))

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly([x * other for x in self.c])
        out = [Fraction(0)] * (len(self.c) + len(other.c) - 1)
        for i, x in enumerate(self.c):
            if x:
                for j, y in enumerate(other.c):
                    out[i + j] += x * y
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly([1])
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, Poly) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"Poly({[str(x) for x in self.c]})"

    def deriv(self, k: int = 1) -> "Poly":
        c = list(self.c)
        for _ in range(k):
            if len(c) <= 1:
                return Poly([0])
            c = [i * c[i] for i in range(1, len(c))]
        return Poly(c)

    def integral(self, a=-1, b=1) -> Fraction:
        """Exact definite integral."""
        a, b = Fraction(a), Fraction(b)
        return sum(x * (b ** (i + 1) - a ** (i + 1)) / (i + 1) for i, x in enumerate(self.c))

    def __call__(self, x):
        """Exact for int/Fraction ``x``; mpf with guard digits otherwise."""
        if isinstance(x, (int, Fraction)):
            x = Fraction(x)
            acc = Fraction(0)
            for coef in reversed(self.c):
                acc = acc * x + coef
            return acc
        # cancellation can cost up to log10(sum |c|) digits
        size = sum(abs(coef) for coef in self.c)
        guard = 5 + (max(int(mpmath.log10(to_mpf(size))), 0) if size else 0)
        with mp.workdps(mp.dps + guard):
            x = mpmath.mpmathify(x)
            acc = mpf(0)
            for coef in reversed(self.c):
                acc = acc * x + to_mpf(coef)
        return +acc


ONE_MINUS_X2 = Poly([1, 0, -1])


@dataclass(frozen=True)
class AssocLegendreIndex:
    """Degree ``l`` and even order ``m`` with ``l >= m``."""

    l: int
    m: int

    def __post_init__(self):
        if self.m < 0 or self.m % 2:
            raise ValueError(f"order m must be even and non-negative, got {self.m}")
        if self.l < self.m:
            raise ValueError(f"degree l={self.l} must be >= order m={self.m}")


@lru_cache(maxsize=None)
def legendre_poly(l: int) -> Poly:
    """``P_l = (d/dx)^l (x^2-1)^l / (2^l l!)``."""
    if l < 0:
        raise ValueError("l must be >= 0")
    return (Poly([-1, 0, 1]) ** l).deriv(l) * Fraction(1, 2 ** l * factorial(l))


@lru_cache(maxsize=None)
def assoc_legendre_poly(l: int, m: int) -> Poly:
    """``P_l^m = (-1)^m (1-x^2)^{m/2} d^m P_l / dx^m`` for even ``m``."""
    AssocLegendreIndex(l, m)
    sign = -1 if m % 2 else 1
    return ONE_MINUS_X2 ** (m // 2) * legendre_poly(l).deriv(m) * sign


def eval_legendre(l: int, x):
    return legendre_poly(l)(x)


def eval_assoc_legendre(idx: AssocLegendreIndex, x):
    return assoc_legendre_poly(idx.l, idx.m)(x)


def norm_sq_assoc_legendre(idx: AssocLegendreIndex) -> Fraction:
    """Exact ``||P_l^m||^2 = 2 (l+m)! / ((2l+1) (l-m)!)``."""
    l, m = idx.l, idx.m
    return Fraction(2 * factorial(l + m), (2 * l + 1) * factorial(l - m))


def norm_assoc_legendre(idx: AssocLegendreIndex) -> mpf:
    q = norm_sq_assoc_legendre(idx)
    return mpmath.sqrt(mpf(q.numerator) / q.denominator)


def deriv_legendre_at_one_exact(l: int, alpha: int) -> Fraction:
    """``d^alpha P_l / dx^alpha`` at ``x = 1``: ``2^-a (l+a)! / (a! (l-a)!)``."""
    if l < 0 or alpha < 0:
        raise ValueError("l and alpha must be >= 0")
    if alpha > l:
        return Fraction(0)
    return Fraction(factorial(l + alpha), 2 ** alpha * factorial(alpha) * factorial(l - alpha))


def deriv_legendre_at_one(l: int, alpha: int) -> mpf:
    return to_mpf(deriv_legendre_at_one_exact(l, alpha))


@lru_cache(maxsize=None)
def deriv_assoc_legendre_at_one_exact(l: int, m: int, alpha: int) -> Fraction:
    """``d^alpha P_l^m / dx^alpha`` at ``x = 1`` from the finite endpoint sum.

    The sum runs over ``t = m/2 .. min(m, alpha)`` and is empty (zero) for
    ``alpha < m/2``.  Terms whose factorial arguments go negative vanish
    because the corresponding derivative of ``P_l`` exceeds its degree.
    """
    AssocLegendreIndex(l, m)
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if alpha > l:
        return Fraction(0)
    h = m // 2
    total = Fraction(0)
    for t in range(h, min(m, alpha) + 1):
        if l - m - alpha + t < 0:
            continue
        total += Fraction(
            factorial(l + m + alpha - t),
            factorial(alpha - t) * factorial(t - h) * factorial(m - t)
            * factorial(m - t + alpha) * factorial(l - m - alpha + t),
        )
    return (-1) ** h * Fraction(factorial(alpha) * factorial(h), 2 ** alpha) * total


def deriv_assoc_legendre_at_one(idx: AssocLegendreIndex, alpha: int) -> mpf:
    return to_mpf(deriv_assoc_legendre_at_one_exact(idx.l, idx.m, alpha))


def deriv_assoc_legendre_at_minus_one_exact(l: int, m: int, alpha: int) -> Fraction:
    """Parity: ``P_l^m(-x) = (-1)^(l+m) P_l^m(x)`` so the derivatives at -1 pick up ``(-1)^(l+alpha)``."""
    return (-1) ** ((l + alpha) % 2) * deriv_assoc_legendre_at_one_exact(l, m, alpha)


def integral_assoc_legendre_exact(l: int, m: int) -> Fraction:
    """``int_{-1}^{1} P_l^m dx``: closed form for even ``l``, zero for odd ``l``."""
    AssocLegendreIndex(l, m)
    if l % 2:
        return Fraction(0)
    if m == 0:
        return Fraction(2 if l == 0 else 0)
    return Fraction(
        2 * m * factorial(l // 2) ** 2 * factorial(l + m),
        l * factorial((l - m) // 2) * factorial((l + m) // 2) * factorial(l + 1),
    )



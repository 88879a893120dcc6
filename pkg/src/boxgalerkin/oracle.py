"""Quadrature oracle for the closed-form matrix elements and coefficients.

Each closed form is compared with an adaptive Gauss-Legendre integral of the
defining inner product.  Entries that vanish identically by parity are
checked absolutely against the Cauchy-Schwarz bound of the integral.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from .basis import Wave, legendre_wave_coeff
from .legendre import assoc_legendre_poly
from .numerics import PrecisionContext, integrate_adaptive, to_mpf
from .operator import raw_matrix_element


@dataclass(frozen=True)
class OracleCheck:
    kind: str  # "element" or a wave tag family
    l: int
    k: int  # second degree, or wave label j
    m: int
    closed: object
    quadrature: object
    rel_error: mpf
    passed: bool


def _compare(closed, quad, bound, tol):
    if closed == 0:
        err = abs(quad) / bound
    else:
        err = abs(closed - quad) / abs(quad)
    return err, err <= tol


def check_element(l: int, k: int, m: int, tol) -> OracleCheck:
    p, q2 = assoc_legendre_poly(l, m), assoc_legendre_poly(k, m).deriv(2)
    closed = raw_matrix_element(l, k, m)
    quad = -integrate_adaptive(lambda x: p(x) * q2(x))
    bound = mpmath.sqrt(to_mpf((p * p).integral() * (q2 * q2).integral()))
    err, ok = _compare(to_mpf(closed), quad, bound, tol)
    return OracleCheck("element", l, k, m, closed, quad, err, ok)


def check_coefficient(l: int, m: int, wave: Wave, label: int, tol) -> OracleCheck:
    p = assoc_legendre_poly(l, m)
    closed = legendre_wave_coeff(l, m, wave)
    quad = integrate_adaptive(lambda x: p(x) * wave(x))
    bound = mpmath.sqrt(to_mpf((p * p).integral())) * wave.norm()
    err, ok = _compare(closed, quad, bound, tol)
    return OracleCheck(wave.kind, l, label, m, closed, quad, err, ok)


def coefficient_waves(jmax: int):
    """``(family, j, wave)`` for the Dirichlet, Neumann and periodic modes."""
    for j in range(1, jmax + 1):
        yield "dirichlet", j, Wave("sin", Fraction(j))
    for j in range(0, jmax + 1):
        yield "neumann", j, Wave("cos", Fraction(j))
    for j in range(-jmax, jmax + 1):
        yield "periodic", j, Wave("exp", Fraction(2 * j))


def oracle_equivalence(m_values=(4, 6), span: int = 8, jmax: int = 5, digits: int = 50,
                       tol=mpf("1e-30"), progress=None) -> list[OracleCheck]:
    """Every element ``<P_l^m, -(P_k^m)''>`` and coefficient with
    ``m <= l, k <= m + span`` and ``|j| <= jmax``, closed form vs quadrature."""
    out = []
    with PrecisionContext(digits):
        tol = mpf(tol)
        for m in m_values:
            for l in range(m, m + span + 1):
                for k in range(m, m + span + 1):
                    out.append(check_element(l, k, m, tol))
                for family, j, wave in coefficient_waves(jmax):
                    c = check_coefficient(l, m, wave, j, tol)
                    out.append(OracleCheck(family, c.l, c.k, c.m, c.closed, c.quadrature, c.rel_error, c.passed))
                if progress:
                    progress(m, l)
    return out


__all__ = ["OracleCheck", "check_coefficient", "check_element", "coefficient_waves", "oracle_equivalence"]

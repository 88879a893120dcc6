"""Truncated Hamiltonians ``P_n H P_n`` of ``H = -d^2/dx^2`` and Galerkin residuals."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import mpmath
from mpmath import mp, mpf

from .basis import (
    BasisSpec,
    BoundaryCondition,
    eigenbasis_wave,
    eigenstate,
    expand_wave,
    augment_overlaps,
    gram_schmidt_augmented,
    basis_element,
)
from .legendre import (
    ONE_MINUS_X2,
    AssocLegendreIndex,
    assoc_legendre_poly,
    deriv_legendre_at_one_exact,
    norm_assoc_legendre,
    norm_sq_assoc_legendre,
)
from .numerics import (
    Eigensystem,
    HermitianMatrix,
    conj,
    eigendecompose_hermitian,
    integrate_adaptive,
    matmul,
)


class SingularTruncation(ArithmeticError):
    """Truncated Hamiltonian has an eigenvalue too close to zero to invert."""


CLOSED_FORM = "closed-form"
QUADRATURE = "quadrature"


def _ratio(a: int, b: int) -> int:
    """``a! / b!`` for ``a >= b``, else 0."""
    if b < 0 or a < b:
        return 0
    return factorial(a) // factorial(b)


@lru_cache(maxsize=None)
def _h_general(l: int, k: int, m: int) -> Fraction:
    """Endpoint sum for ``l >= k``, ``t = m/2 + 1 .. m``."""
    q = ONE_MINUS_X2 ** (m // 2) * assoc_legendre_poly(k, m).deriv(2)
    total = Fraction(0)
    for t in range(m // 2 + 1, m + 1):
        a = deriv_legendre_at_one_exact(l, m - t)
        if a == 0:
            continue
        total += (-1) ** t * a * q.deriv(t - 1)(1)
    return total


def _h4(l: int, k: int) -> Fraction:
    return (2 - Fraction(l * (l + 1), 12)) * _ratio(k + 4, k - 4) + Fraction(18, 120) * _ratio(k + 5, k - 5)


def raw_matrix_element(l: int, k: int, m: int) -> Fraction:
    """Exact ``<P_l^m, -(P_k^m)''>``, identical for every boundary condition.

    Zero unless ``l + k`` is even.  ``m = 4`` uses the two-term closed form,
    other even ``m`` the general endpoint sum.
    """
    AssocLegendreIndex(l, m)
    AssocLegendreIndex(k, m)
    if m < 4:
        raise ValueError("closed form requires m >= 4")
    if (l + k) % 2:
        return Fraction(0)
    if l < k:
        l, k = k, l
    h = _h4(l, k) if m == 4 else _h_general(l, k, m)
    return 2 * h


def normalized_matrix_element(l: int, k: int, m: int) -> mpf:
    raw = raw_matrix_element(l, k, m)
    if raw == 0:
        return mpf(0)
    n2 = norm_sq_assoc_legendre(AssocLegendreIndex(l, m)) * norm_sq_assoc_legendre(AssocLegendreIndex(k, m))
    # raw / sqrt(n2) in one rounding-friendly step
    return mpf(raw.numerator) / raw.denominator / mpmath.sqrt(mpf(n2.numerator) / n2.denominator)


@dataclass(frozen=True)
class TruncatedHamiltonian:
    basis: BasisSpec
    n: int
    matrix: HermitianMatrix
    provenance: str = CLOSED_FORM

    def eigensystem(self) -> Eigensystem:
        return _eigensystem(self, mp.dps)

    @property
    def lambda_min(self) -> mpf:
        return self.eigensystem().values[0]


@lru_cache(maxsize=256)
def _eigensystem(h: TruncatedHamiltonian, dps: int) -> Eigensystem:
    return eigendecompose_hermitian(h.matrix)


def truncated_hamiltonian(spec: BasisSpec, n: int) -> TruncatedHamiltonian:
    """``Ĥ_n`` in the first ``n`` elements of ``spec``, entries in closed form.

    Legendre bases take no boundary condition: every realization of the
    Laplacian gives the same matrix on them.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return _truncated(spec, n, mp.dps)


@lru_cache(maxsize=256)
def _truncated(spec: BasisSpec, n: int, dps: int) -> TruncatedHamiltonian:
    if spec.kind == "eigen":
        diag = [eigenbasis_wave(spec.bc, i).energy for i in range(n)]
        return TruncatedHamiltonian(spec, n, HermitianMatrix.diagonal(diag))
    m = spec.m
    if spec.kind == "legendre":
        mat = HermitianMatrix.from_function(n, lambda i, j: normalized_matrix_element(m + i, m + j, m))
        return TruncatedHamiltonian(spec, n, mat)
    lam0 = spec.augment.wave.energy
    g = augment_overlaps(spec.augment, m, n - 1)
    # raw family (f0, p_m, ..., p_{m+n-2}); <f0, -p''> = lam0 <f0, p> since p, p' vanish at +-1
    raw = [[mpf(0)] * n for _ in range(n)]
    raw[0][0] = lam0
    for i in range(1, n):
        raw[0][i] = raw[i][0] = lam0 * g[i - 1]
        for j in range(1, i + 1):
            raw[i][j] = raw[j][i] = normalized_matrix_element(m + i - 1, m + j - 1, m)
    c = [list(row) for row in gram_schmidt_augmented(spec.augment, m, n)]
    ct = [[c[j][i] for j in range(n)] for i in range(n)]
    full = matmul(matmul(c, raw), ct)
    return TruncatedHamiltonian(spec, n, HermitianMatrix.from_dense(full))


def quadrature_hamiltonian(spec: BasisSpec, n: int, digits: int | None = None) -> TruncatedHamiltonian:
    """Oracle route: ``<phi_i, -phi_j''>`` by adaptive quadrature.

    Second derivatives come from the exact polynomials (Legendre part) and
    from ``-f0'' = lam0 f0`` (augmentation), never from the closed forms.
    """
    digits = mp.dps if digits is None else digits
    if spec.kind == "eigen":
        return truncated_hamiltonian(spec, n)
    m = spec.m
    polys = [assoc_legendre_poly(m + i, m) for i in range(n)]
    norms = [norm_assoc_legendre(AssocLegendreIndex(m + i, m)) for i in range(n)]
    if spec.kind == "legendre":
        def entry(i, j):
            pi_, pj2 = polys[i], polys[j].deriv(2)
            return -integrate_adaptive(lambda x: pi_(x) * pj2(x), digits) / (norms[i] * norms[j])
        return TruncatedHamiltonian(spec, n, HermitianMatrix.from_function(n, entry), QUADRATURE)
    w = spec.augment.wave
    wn = w.norm()
    lam0 = w.energy
    c = gram_schmidt_augmented(spec.augment, m, n)
    # phi_i = c_i0 f0 + sum_k c_ik p_k ;  -phi_i'' = c_i0 lam0 f0 - sum_k c_ik p_k''
    d2 = [polys[i].deriv(2) for i in range(n)]

    def phi(i, x):
        return c[i][0] * w(x) / wn + mpmath.fsum(c[i][k + 1] * polys[k](x) / norms[k] for k in range(i))

    def hphi(j, x):
        return c[j][0] * lam0 * w(x) / wn - mpmath.fsum(c[j][k + 1] * d2[k](x) / norms[k] for k in range(j))

    def entry(i, j):
        val = integrate_adaptive(lambda x: conj(phi(i, x)) * hphi(j, x), digits)
        return val.real if isinstance(val, mpmath.mpc) else val

    return TruncatedHamiltonian(spec, n, HermitianMatrix.from_function(n, entry), QUADRATURE)


def galerkin_projection_residual(spec: BasisSpec, bc: BoundaryCondition, j: int, n: int, form: str = "exp") -> mpf:
    """``||Q_n psi_j - psi_j||`` for the eigenfunction ``psi_j`` of ``bc``.

    ``Q_n psi = Ĥ_n^{-1} P_n H psi = E_j Ĥ_n^{-1} c``; the distance is taken
    in coefficient space together with the tail mass outside the span.
    """
    wave = eigenstate(bc, j, form)
    state = expand_wave(spec, wave, n)
    h = truncated_hamiltonian(spec, n)
    es = h.eigensystem()
    floor = mpf(10) ** (-(mp.dps // 2))
    if min(abs(x) for x in es.values) < floor:
        raise SingularTruncation(f"Ĥ_{n} has an eigenvalue below {mpmath.nstr(floor, 3)}")
    v = es.vectors
    e = wave.energy
    # y = V diag(E / lam) V^dagger c
    w = [mpmath.fsum(conj(v[i][k]) * state.c[i] for i in range(n)) * e / es.values[k] for k in range(n)]
    y = [mpmath.fsum(v[i][k] * w[k] for k in range(n)) for i in range(n)]
    inside = mpmath.fsum(abs(yi - ci) ** 2 for yi, ci in zip(y, state.c))
    return mpmath.sqrt(inside + max(state.tail_mass, mpf(0)))


__all__ = [
    "CLOSED_FORM",
    "QUADRATURE",
    "SingularTruncation",
    "TruncatedHamiltonian",
    "basis_element",
    "galerkin_projection_residual",
    "normalized_matrix_element",
    "quadrature_hamiltonian",
    "raw_matrix_element",
    "truncated_hamiltonian",
]

"""Orthonormal bases on (-1, 1) and closed-form expansion coefficients.

Three families are supported:

* eigenbases of the Dirichlet, Neumann and alpha-periodic Laplacians,
* normalized associated Legendre polynomials ``p_l^m`` (even ``m >= 4``),
* Gram-Schmidt augmented families ``GS(f0, (p_l^m)_{l>=m})``.

Every reference state is a single trigonometric *wave* (``sin``, ``cos`` or
``exp`` of ``k pi (x+1) / 2``), so all inner products needed downstream have
finite closed forms.  Expansion coefficients against ``P_l^m`` are computed
non-normalized and divided by ``||P_l^m||`` once, in :func:`expand_state`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import mpmath
from mpmath import mp, mpc, mpf

from .legendre import (
    AssocLegendreIndex,
    assoc_legendre_poly,
    deriv_assoc_legendre_at_one_exact,
    integral_assoc_legendre_exact,
    norm_assoc_legendre,
)
from .numerics import default_tol, to_mpf


class UnsupportedPair(ValueError):
    """No closed form for the requested (basis, state) combination."""


class DegenerateBasis(ArithmeticError):
    """Gram-Schmidt residual vanished: f0 is numerically in the Legendre span."""


# boundary conditions -------------------------------------------------------

@dataclass(frozen=True)
class BoundaryCondition:
    """Dirichlet, Neumann or alpha-periodic boundary conditions.

    ``alpha_pi`` stores ``alpha / pi`` exactly, in ``[0, 2)``; alpha = 0 is
    periodic and alpha = pi anti-periodic.
    """

    kind: str
    alpha_pi: Fraction = Fraction(0)

    def __post_init__(self):
        if self.kind not in ("dirichlet", "neumann", "alpha"):
            raise ValueError(f"unknown boundary condition kind {self.kind!r}")
        a = Fraction(self.alpha_pi)
        if self.kind != "alpha" and a != 0:
            raise ValueError("alpha only applies to alpha-periodic conditions")
        if not 0 <= a < 2:
            raise ValueError(f"alpha/pi must lie in [0, 2), got {a}")
        object.__setattr__(self, "alpha_pi", a)

    @classmethod
    def dirichlet(cls):
        return cls("dirichlet")

    @classmethod
    def neumann(cls):
        return cls("neumann")

    @classmethod
    def periodic(cls):
        return cls("alpha", Fraction(0))

    @classmethod
    def antiperiodic(cls):
        return cls("alpha", Fraction(1))

    @classmethod
    def alpha_periodic(cls, alpha_over_pi):
        return cls("alpha", Fraction(alpha_over_pi))

    @property
    def alpha(self) -> mpf:
        return to_mpf(self.alpha_pi) * mp.pi

    @property
    def tag(self) -> str:
        if self.kind != "alpha":
            return self.kind
        if self.alpha_pi == 0:
            return "periodic"
        if self.alpha_pi == 1:
            return "antiperiodic"
        return f"alpha:{self.alpha_pi}"

    @classmethod
    def parse(cls, token: str) -> "BoundaryCondition":
        token = token.strip().lower()
        named = {"dirichlet": cls.dirichlet, "neumann": cls.neumann,
                 "periodic": cls.periodic, "antiperiodic": cls.antiperiodic}
        if token in named:
            return named[token]()
        if token.startswith("alpha:"):
            return cls.alpha_periodic(Fraction(token.split(":", 1)[1]))
        raise ValueError(f"unknown boundary condition {token!r}")

    def __str__(self):
        return self.tag


# waves ---------------------------------------------------------------------

def _pi_phase(r) -> mpc:
    """``exp(i pi r)``, exact for integer and half-integer ``r``."""
    if isinstance(r, (int, Fraction)) and Fraction(r).denominator in (1, 2):
        r = Fraction(r)
        twice = (2 * r) % 4
        return [mpc(1, 0), mpc(0, 1), mpc(-1, 0), mpc(0, -1)][int(twice)]
    r = to_mpf(r)
    return mpc(mpmath.cospi(r), mpmath.sinpi(r))


@dataclass(frozen=True)
class Wave:
    """``sin``/``cos``/``exp(i .)`` of ``k pi (x + 1) / 2`` (not normalized)."""

    kind: str
    k: Fraction

    def __post_init__(self):
        if self.kind not in ("sin", "cos", "exp"):
            raise ValueError(f"unknown wave kind {self.kind!r}")
        k = Fraction(self.k)
        if self.kind in ("sin", "cos") and k < 0:
            raise ValueError("sin/cos waves take k >= 0")
        if self.kind == "sin" and k == 0:
            raise ValueError("sin wave with k = 0 vanishes identically")
        object.__setattr__(self, "k", k)

    @property
    def energy(self) -> mpf:
        """Eigenvalue of ``-d^2/dx^2``: ``(k pi / 2)^2``."""
        return (to_mpf(self.k) * mp.pi / 2) ** 2

    def exponentials(self) -> list[tuple[mpc, Fraction]]:
        """Expansion into ``e_k(x) = exp(i k pi (x+1)/2)`` terms."""
        k = self.k
        if self.kind == "exp":
            return [(mpc(1), k)]
        if self.kind == "cos":
            if k == 0:
                return [(mpc(1), k)]
            return [(mpc(0.5), k), (mpc(0.5), -k)]
        return [(mpc(0, -0.5), k), (mpc(0, 0.5), -k)]

    def __call__(self, x):
        arg = to_mpf(self.k) * (mpmath.mpmathify(x) + 1) / 2
        if self.kind == "sin":
            return mpmath.sinpi(arg)
        if self.kind == "cos":
            return mpmath.cospi(arg)
        return mpc(mpmath.cospi(arg), mpmath.sinpi(arg))

    def deriv(self, x):
        w = to_mpf(self.k) * mp.pi / 2
        arg = to_mpf(self.k) * (mpmath.mpmathify(x) + 1) / 2
        if self.kind == "sin":
            return w * mpmath.cospi(arg)
        if self.kind == "cos":
            return -w * mpmath.sinpi(arg)
        return mpc(0, w) * mpc(mpmath.cospi(arg), mpmath.sinpi(arg))

    def norm_sq(self) -> mpf:
        return inner_wave(self, self).real

    def norm(self) -> mpf:
        return mpmath.sqrt(self.norm_sq())

    @property
    def tag(self) -> str:
        return f"{self.kind}:{self.k}"


def _exp_integral(d: Fraction):
    """``int_{-1}^{1} exp(i d pi (x+1)/2) dx``."""
    if d == 0:
        return mpc(2)
    return (_pi_phase(d) - 1) / (mpc(0, 1) * to_mpf(d) * mp.pi / 2)


def inner_wave(a: Wave, b: Wave):
    """``<a, b> = int conj(a) b`` in closed form (conjugate-linear in ``a``)."""
    total = mpc(0)
    for ca, ka in a.exponentials():
        for cb, kb in b.exponentials():
            total += ca.conjugate() * cb * _exp_integral(kb - ka)
    return total.real if total.imag == 0 else total


def satisfies(wave: Wave, bc: BoundaryCondition) -> bool:
    """Whether ``wave`` lies in the domain of the Laplacian with ``bc``."""
    vals = [wave(-1), wave(1), wave.deriv(-1), wave.deriv(1)]
    scale = max([abs(v) for v in vals] + [mpf(1)])
    tol = default_tol() * scale * 100
    lo, hi, dlo, dhi = vals
    if bc.kind == "dirichlet":
        return abs(lo) <= tol and abs(hi) <= tol
    if bc.kind == "neumann":
        return abs(dlo) <= tol and abs(dhi) <= tol
    ph = _pi_phase(bc.alpha_pi)
    return abs(lo - ph * hi) <= tol and abs(dlo - ph * dhi) <= tol


def _alpha_k(bc: BoundaryCondition, j: int) -> Fraction:
    return 2 * j - bc.alpha_pi


def eigenstate(bc: BoundaryCondition, j: int, form: str = "exp") -> Wave:
    """Eigenfunction ``psi_j`` of the Laplacian with ``bc`` (unnormalized).

    Dirichlet ``sin(j pi (x+1)/2)``, ``j >= 1``; Neumann ``cos``, ``j >= 0``;
    alpha-periodic ``exp(i (2j - alpha/pi) pi (x+1)/2)``, ``j`` any integer.
    For periodic and anti-periodic conditions ``form`` may be ``"cos"`` or
    ``"sin"`` to pick the real standing wave of the same energy.
    """
    if bc.kind in ("dirichlet", "neumann") and form not in ("exp", "sin" if bc.kind == "dirichlet" else "cos"):
        raise UnsupportedPair(f"{bc.tag} eigenstates have no {form!r} form")
    if bc.kind == "dirichlet":
        if j < 1:
            raise ValueError("Dirichlet modes start at j = 1")
        return Wave("sin", Fraction(j))
    if bc.kind == "neumann":
        if j < 0:
            raise ValueError("Neumann modes start at j = 0")
        return Wave("cos", Fraction(j))
    k = _alpha_k(bc, j)
    if form == "exp":
        return Wave("exp", k)
    if form not in ("cos", "sin"):
        raise ValueError(f"unknown form {form!r}")
    if bc.alpha_pi not in (0, 1):
        raise UnsupportedPair("standing-wave forms exist only for periodic and anti-periodic conditions")
    w = Wave(form, abs(k))
    if not satisfies(w, bc):
        raise UnsupportedPair(f"{w.tag} does not satisfy {bc.tag} conditions")
    return w


def eigenbasis_wave(bc: BoundaryCondition, index: int) -> Wave:
    """``index``-th element of the eigenbasis, ordered by energy.

    Ties among alpha-periodic modes put ``+j`` before ``-j``.
    """
    if index < 0:
        raise ValueError("index must be >= 0")
    if bc.kind == "dirichlet":
        return Wave("sin", Fraction(index + 1))
    if bc.kind == "neumann":
        return Wave("cos", Fraction(index))
    return Wave("exp", _alpha_k(bc, alpha_mode_order(bc, index + 1)[index]))


@lru_cache(maxsize=None)
def alpha_mode_order(bc: BoundaryCondition, count: int) -> tuple[int, ...]:
    span = count // 2 + 3
    js = sorted(range(-span, span + 1), key=lambda j: (abs(_alpha_k(bc, j)), -j))
    return tuple(js[:count])


def eigenbasis_mode(bc: BoundaryCondition, index: int) -> int:
    """Mode label ``j`` of the ``index``-th eigenbasis element."""
    if bc.kind == "dirichlet":
        return index + 1
    if bc.kind == "neumann":
        return index
    return alpha_mode_order(bc, index + 1)[index]


# closed-form coefficients against P_l^m ------------------------------------

def _check_lm(l, m):
    AssocLegendreIndex(l, m)
    if m < 4:
        raise ValueError("closed forms require m >= 4")


def _guarded_sum(terms: Callable[[], list]):
    """Sum ``terms()`` with enough guard digits to absorb cancellation.

    The endpoint sums alternate in sign with terms much larger than the
    result, so precision is raised by the observed cancellation ratio.
    """
    base = mp.dps
    extra = 20
    for _ in range(3):
        with mp.workdps(base + extra):
            ts = terms()
            total = mpmath.fsum(ts)
            big = max((abs(t) for t in ts), default=mpf(0))
            if big == 0 or total == 0:
                break
            lost = int(mpmath.log10(big / abs(total))) + 1
            if lost + 10 <= extra:
                break
            extra = lost + 20
    return +total


def _D(l, m, alpha):
    return deriv_assoc_legendre_at_one_exact(l, m, alpha)


def coeff_dirichlet(l: int, m: int, j: int) -> mpf:
    """Non-normalized ``<P_l^m, sin(j pi (x+1)/2)>``, ``j >= 1``."""
    _check_lm(l, m)
    if j < 1:
        raise ValueError("j must be >= 1")
    parity = (-1) ** j - (-1) ** l
    if parity == 0:
        return mpf(0)
    t_min = (m - 2) // 4 + 1  # floor(m/4 - 1/2) + 1

    def terms():
        r = 2 / (j * mp.pi)
        return [-r * parity * (-1) ** t * r ** (2 * t) * to_mpf(_D(l, m, 2 * t)) for t in range(t_min, l // 2 + 1)]

    return _guarded_sum(terms)


def coeff_periodic(l: int, m: int, j: int):
    """Non-normalized ``<P_l^m, exp(i j pi (x+1))>``.

    Real for even ``l``, purely imaginary for odd ``l`` and zero for odd
    ``l`` at ``j = 0``.  The sum runs over every derivative order of the right
    parity; orders below ``m/2`` contribute zero.
    """
    _check_lm(l, m)
    if j == 0:
        return to_mpf(integral_assoc_legendre_exact(l, m))
    if l % 2 == 0:
        return _guarded_sum(lambda: [2 * (-1) ** t / (j * mp.pi) ** (2 * t + 2) * to_mpf(_D(l, m, 2 * t + 1))
                                     for t in range(0, l // 2 + 1)])
    s = _guarded_sum(lambda: [-2 * (-1) ** t / (j * mp.pi) ** (2 * t + 1) * to_mpf(_D(l, m, 2 * t))
                              for t in range(0, l // 2 + 1)])
    return mpc(0, s)


def coeff_neumann(l: int, m: int, j: int) -> mpf:
    """Non-normalized ``<cos(j pi (x+1)/2), P_l^m>``, ``j >= 0``."""
    _check_lm(l, m)
    if j < 0:
        raise ValueError("j must be >= 0")
    if j == 0:
        return coeff_periodic(l, m, 0)
    parity = (-1) ** j - (-1) ** (l + 1)
    if parity == 0:
        return mpf(0)

    def terms():
        r = 2 / (j * mp.pi)
        return [r * r * parity * (-1) ** t * r ** (2 * t) * to_mpf(_D(l, m, 2 * t + 1)) for t in range(0, l // 2 + 1)]

    return _guarded_sum(terms)


def coeff_exponential(l: int, m: int, kappa) -> mpc:
    """Non-normalized ``<P_l^m, exp(i kappa pi (x+1))>`` for any real ``kappa``.

    Full endpoint sum after ``l + 1`` integrations by parts; used for
    alpha-periodic modes whose wavenumber is not a half-integer multiple of pi.
    """
    _check_lm(l, m)
    if kappa == 0:
        return mpc(coeff_periodic(l, m, 0))

    def terms():
        ikp = mpc(0, to_mpf(kappa) * mp.pi)
        edge = _pi_phase(2 * Fraction(kappa)) if isinstance(kappa, (int, Fraction)) else mpmath.expjpi(2 * kappa)
        out = []
        for t in range(l + 1):
            d1 = to_mpf(_D(l, m, t))
            if d1 == 0:
                continue
            dm1 = d1 if (l + t) % 2 == 0 else -d1
            out.append((-1) ** t / ikp ** (t + 1) * (edge * d1 - dm1))
        return out

    return mpc(_guarded_sum(terms))


def legendre_wave_coeff(l: int, m: int, wave: Wave):
    """Non-normalized ``<P_l^m, wave>``."""
    k = wave.k
    if k.denominator == 1:
        ki = int(k)
        if wave.kind == "sin":
            return coeff_dirichlet(l, m, ki)
        if wave.kind == "cos":
            return coeff_neumann(l, m, ki)
        if ki % 2 == 0:
            return coeff_periodic(l, m, ki // 2)
        c = coeff_neumann(l, m, abs(ki))
        s = coeff_dirichlet(l, m, abs(ki))
        return mpc(c, s if ki > 0 else -s)
    total = mpc(0)
    for coef, kk in wave.exponentials():
        total += coef * coeff_exponential(l, m, kk / 2)
    return total.real if total.imag == 0 else total


# basis specifications ------------------------------------------------------

class AugmentKind(enum.Enum):
    """Function prepended to the Legendre family before Gram-Schmidt."""

    CONSTANT_PERIODIC = "constant"
    COSINE_ANTIPERIODIC = "cosine"

    @property
    def wave(self) -> Wave:
        if self is AugmentKind.CONSTANT_PERIODIC:
            return Wave("cos", Fraction(0))
        return Wave("cos", Fraction(1))

    @property
    def boundary_condition(self) -> BoundaryCondition:
        if self is AugmentKind.CONSTANT_PERIODIC:
            return BoundaryCondition.periodic()
        return BoundaryCondition.antiperiodic()


@dataclass(frozen=True)
class BasisSpec:
    """Which orthonormal family is in use."""

    kind: str
    m: int = 4
    bc: BoundaryCondition | None = None
    augment: AugmentKind | None = None

    def __post_init__(self):
        if self.kind == "eigen":
            if self.bc is None:
                raise ValueError("eigenbasis needs a boundary condition")
        elif self.kind in ("legendre", "augmented"):
            if self.m < 4 or self.m % 2:
                raise ValueError(f"Legendre families need even m >= 4, got {self.m}")
            if self.kind == "augmented" and self.augment is None:
                raise ValueError("augmented basis needs an AugmentKind")
        else:
            raise ValueError(f"unknown basis kind {self.kind!r}")

    @classmethod
    def eigen(cls, bc: BoundaryCondition):
        return cls("eigen", 0, bc)

    @classmethod
    def legendre(cls, m: int = 4):
        return cls("legendre", m)

    @classmethod
    def augmented(cls, augment: AugmentKind, m: int = 4):
        return cls("augmented", m, None, augment)

    @property
    def tag(self) -> str:
        if self.kind == "eigen":
            return f"eigen:{self.bc.tag}"
        if self.kind == "legendre":
            return f"legendre:{self.m}"
        return f"augmented:{self.augment.value}:{self.m}"

    @property
    def m_tag(self) -> int:
        return 0 if self.kind == "eigen" else self.m

    @classmethod
    def parse(cls, token: str) -> "BasisSpec":
        parts = token.strip().lower().split(":")
        if parts[0] == "eigen" and len(parts) >= 2:
            return cls.eigen(BoundaryCondition.parse(":".join(parts[1:])))
        if parts[0] == "legendre":
            return cls.legendre(int(parts[1]) if len(parts) > 1 else 4)
        if parts[0] == "augmented" and len(parts) >= 2:
            return cls.augmented(AugmentKind(parts[1]), int(parts[2]) if len(parts) > 2 else 4)
        raise ValueError(f"cannot parse basis {token!r}")

    def __str__(self):
        return self.tag


@dataclass(frozen=True)
class BasisElement:
    """One orthonormal basis function with its boundary data."""

    spec: BasisSpec
    index: int
    evaluate: Callable = field(repr=False, compare=False)
    derivative: Callable = field(repr=False, compare=False)

    def __call__(self, x):
        return self.evaluate(x)

    @property
    def boundary(self) -> tuple:
        """``(phi(-1), phi(1), phi'(-1), phi'(1))``."""
        return (self.evaluate(-1), self.evaluate(1), self.derivative(-1), self.derivative(1))


def _legendre_element_fns(l, m):
    poly = assoc_legendre_poly(l, m)
    dpoly = poly.deriv()
    norm = norm_assoc_legendre(AssocLegendreIndex(l, m))
    return (lambda x: poly(mpmath.mpmathify(x)) / norm), (lambda x: dpoly(mpmath.mpmathify(x)) / norm)


def basis_element(spec: BasisSpec, index: int) -> BasisElement:
    if index < 0:
        raise ValueError("index must be >= 0")
    if spec.kind == "eigen":
        w = eigenbasis_wave(spec.bc, index)
        nrm = w.norm()
        return BasisElement(spec, index, lambda x: w(x) / nrm, lambda x: w.deriv(x) / nrm)
    if spec.kind == "legendre":
        f, df = _legendre_element_fns(spec.m + index, spec.m)
        return BasisElement(spec, index, f, df)
    c = gram_schmidt_augmented(spec.augment, spec.m, index + 1)[index]
    w = spec.augment.wave
    wn = w.norm()
    parts = [(lambda x: w(x) / wn, lambda x: w.deriv(x) / wn)]
    parts += [_legendre_element_fns(spec.m + i, spec.m) for i in range(index)]

    def f(x):
        return mpmath.fsum(ci * p[0](x) for ci, p in zip(c, parts))

    def df(x):
        return mpmath.fsum(ci * p[1](x) for ci, p in zip(c, parts))

    return BasisElement(spec, index, f, df)


# augmented Gram-Schmidt ----------------------------------------------------

def augment_overlaps(f0: AugmentKind, m: int, count: int) -> list[mpf]:
    """``<f0, p_l^m>`` for ``l = m .. m + count - 1`` (normalized ``f0``)."""
    w = f0.wave
    wn = w.norm()
    out = []
    for i in range(count):
        l = m + i
        out.append(legendre_wave_coeff(l, m, w) / (wn * norm_assoc_legendre(AssocLegendreIndex(l, m))))
    return out


def gram_schmidt_augmented(f0: AugmentKind, m: int, n: int) -> tuple[tuple, ...]:
    """Coefficient rows of ``GS(f0, p_m^m, p_{m+1}^m, ...)`` truncated to ``n``.

    Row ``l`` expresses ``phi_l`` over the raw family
    ``(f0, p_m^m, ..., p_{m+n-2}^m)``; the matrix is lower triangular with
    row 0 equal to ``(1, 0, ..., 0)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return _gram_schmidt(f0, m, n, mp.dps)


@lru_cache(maxsize=128)
def _gram_schmidt(f0, m, n, dps):
    g = augment_overlaps(f0, m, n - 1)
    floor = mpf(10) ** (-(dps // 2))

    # Gram matrix is an arrowhead: identity plus overlaps in row/column 0
    def gram_apply(v):
        out = list(v)
        out[0] = v[0] + mpmath.fsum(gi * vi for gi, vi in zip(g, v[1:]))
        for i, gi in enumerate(g, start=1):
            out[i] = gi * v[0] + v[i]
        return out

    rows = []
    for l in range(n):
        v = [mpf(0)] * n
        v[l] = mpf(1)
        for _ in range(2):  # re-orthogonalize once
            gv = gram_apply(v)
            for phi in rows:
                proj = mpmath.fsum(a * b for a, b in zip(phi, gv))
                if proj:
                    v = [vi - proj * pi for vi, pi in zip(v, phi)]
                    gv = gram_apply(v)
        nrm2 = mpmath.fsum(a * b for a, b in zip(v, gram_apply(v)))
        if nrm2 <= floor ** 2:
            raise DegenerateBasis(f"Gram-Schmidt residual {mpmath.nstr(mpmath.sqrt(max(nrm2, 0)), 5)} at row {l}")
        nrm = mpmath.sqrt(nrm2)
        rows.append(tuple(vi / nrm for vi in v))
    return tuple(rows)


def augmented_gram_matrix(f0: AugmentKind, m: int, n: int) -> list[list[mpf]]:
    g = augment_overlaps(f0, m, n - 1)
    out = [[mpf(1) if i == j else mpf(0) for j in range(n)] for i in range(n)]
    for i, gi in enumerate(g, start=1):
        out[0][i] = out[i][0] = gi
    return out


# state expansion -----------------------------------------------------------

@dataclass(frozen=True)
class StateCoefficients:
    """First ``n`` basis coefficients of a unit state plus the mass outside them."""

    basis: BasisSpec
    n: int
    c: tuple
    tail_mass: mpf

    def __post_init__(self):
        if len(self.c) != self.n:
            raise ValueError(f"expected {self.n} coefficients, got {len(self.c)}")

    @property
    def captured_mass(self) -> mpf:
        return mpmath.fsum(abs(x) ** 2 for x in self.c)


def raw_overlaps(spec: BasisSpec, wave: Wave, n: int) -> list:
    """``<phi_l, wave>`` for ``l < n`` with the wave left unnormalized."""
    if spec.kind == "eigen":
        out = []
        for i in range(n):
            e = eigenbasis_wave(spec.bc, i)
            out.append(inner_wave(e, wave) / e.norm())
        return out
    m = spec.m
    if spec.kind == "legendre":
        return [legendre_wave_coeff(m + i, m, wave) / norm_assoc_legendre(AssocLegendreIndex(m + i, m)) for i in range(n)]
    f0 = spec.augment.wave
    raw = [inner_wave(f0, wave) / f0.norm()]
    raw += [legendre_wave_coeff(m + i, m, wave) / norm_assoc_legendre(AssocLegendreIndex(m + i, m)) for i in range(n - 1)]
    rows = gram_schmidt_augmented(spec.augment, m, n)
    return [mpmath.fsum(ci * ri for ci, ri in zip(row, raw)) for row in rows]


def _same_function(a: Wave, b: Wave) -> bool:
    if a == b:
        return True
    # cos(0) and exp(0) are the same constant
    return a.k == 0 and b.k == 0 and {a.kind, b.kind} <= {"cos", "exp"}


def expand_wave(spec: BasisSpec, wave: Wave, n: int) -> StateCoefficients:
    """Coefficients of the normalized ``wave`` in the first ``n`` elements."""
    if n < 1:
        raise ValueError("n must be >= 1")
    # matching basis element: exact Kronecker delta
    if spec.kind == "eigen":
        for i in range(n):
            if _same_function(eigenbasis_wave(spec.bc, i), wave):
                c = tuple(mpf(1) if l == i else mpf(0) for l in range(n))
                return StateCoefficients(spec, n, c, mpf(0))
    if spec.kind == "augmented" and _same_function(spec.augment.wave, wave):
        c = tuple(mpf(1) if l == 0 else mpf(0) for l in range(n))
        return StateCoefficients(spec, n, c, mpf(0))
    nrm = wave.norm()
    c = tuple(_clean(x / nrm) for x in raw_overlaps(spec, wave, n))
    tail = 1 - mpmath.fsum(abs(x) ** 2 for x in c)
    return StateCoefficients(spec, n, c, tail)


def expand_state(spec: BasisSpec, bc: BoundaryCondition, j: int, n: int, form: str = "exp") -> StateCoefficients:
    """Expand the normalized eigenfunction ``psi_j`` of ``bc`` in ``spec``."""
    wave = eigenstate(bc, j, form)
    if not satisfies(wave, bc):
        raise UnsupportedPair(f"{wave.tag} is not in the domain of the {bc.tag} Laplacian")
    return expand_wave(spec, wave, n)


def _clean(x):
    if isinstance(x, mpc) and x.imag == 0:
        return x.real
    return x

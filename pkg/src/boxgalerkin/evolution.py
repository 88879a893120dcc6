"""Unitary propagation: truncated ``exp(-i t Ĥ_n)``, exact eigen-phases and
the exact mirror/identity maps at ``t = 4/pi``."""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp, mpc, mpf

from .basis import BoundaryCondition, StateCoefficients, _pi_phase, eigenstate
from .numerics import default_tol, integrate_adaptive, reconstruct, to_mpf, unitarity_defect
from .operator import TruncatedHamiltonian


class DimensionMismatch(ValueError):
    pass


class UnsupportedTime(ValueError):
    pass


_OVER_PI = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?/\s*pi\s*$")


@dataclass(frozen=True)
class SimTime:
    """A time ``coef`` or ``coef / pi`` with ``coef`` rational.

    Keeping ``4/pi`` symbolic makes ``E_j t`` an exact rational multiple of
    ``pi`` for the box spectra ``(k pi / 2)^2``.
    """

    coef: Fraction
    over_pi: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coef", Fraction(self.coef))

    @classmethod
    def parse(cls, token) -> "SimTime":
        """``"0.1"``, ``"1"``, ``"4/1/pi"``, ``"4/pi"`` or a number."""
        if isinstance(token, SimTime):
            return token
        if isinstance(token, (int, Fraction)):
            return cls(Fraction(token))
        if isinstance(token, float):
            return cls(Fraction(str(token)))
        s = str(token).strip()
        m = _OVER_PI.match(s)
        if m:
            return cls(Fraction(int(m.group(1)), int(m.group(2) or 1)), True)
        try:
            return cls(Fraction(s))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"cannot parse time {token!r}; use a decimal or p/q/pi") from None

    @property
    def value(self) -> mpf:
        v = to_mpf(self.coef)
        return v / mp.pi if self.over_pi else v

    @property
    def tag(self) -> str:
        if self.over_pi:
            return f"{self.coef.numerator}/{self.coef.denominator}/pi"
        return _exact_decimal(self.coef)

    def __str__(self):
        return self.tag


def _exact_decimal(q: Fraction) -> str:
    """Terminating decimal if there is one, else ``p/q``."""
    d, digits = q.denominator, 0
    for f in (2, 5):
        while d % f == 0:
            d //= f
    if d != 1:
        return f"{q.numerator}/{q.denominator}"
    while (q * 10 ** digits).denominator != 1:
        digits += 1
    scaled = abs(q.numerator * 10 ** digits // q.denominator)
    sign = "-" if q < 0 else ""
    if digits == 0:
        return f"{sign}{scaled}"
    body = str(scaled).rjust(digits + 1, "0")
    return f"{sign}{body[:-digits]}.{body[-digits:]}"


SPECIAL_TIME = SimTime(Fraction(4), True)


@dataclass(frozen=True)
class Propagator:
    H: TruncatedHamiltonian
    t: SimTime
    U: tuple  # rows

    @property
    def unitarity_defect(self) -> mpf:
        return unitarity_defect(self.U)

    def apply(self, c) -> list:
        return [mpmath.fsum(u * x for u, x in zip(row, c)) for row in self.U]


def propagator(H: TruncatedHamiltonian, t) -> Propagator:
    """``V diag(exp(-i lambda t)) V^dagger`` from the Jacobi eigensystem."""
    return _propagator(H, SimTime.parse(t), mp.dps)


@lru_cache(maxsize=256)
def _propagator(H, t, dps):
    es = H.eigensystem()
    tv = t.value
    u = reconstruct(es, lambda lam: mpc(mpmath.cos(lam * tv), -mpmath.sin(lam * tv)))
    return Propagator(H, t, tuple(tuple(row) for row in u))


def propagate_truncated(H: TruncatedHamiltonian, t, state: StateCoefficients) -> StateCoefficients:
    """``c -> Û_n(t) c``; the tail mass is carried by the identity block."""
    if state.basis != H.basis or state.n != H.n:
        raise DimensionMismatch(
            f"state lives in {state.basis.tag}[{state.n}], Hamiltonian in {H.basis.tag}[{H.n}]"
        )
    t = SimTime.parse(t)
    if t.coef == 0:
        return state
    return StateCoefficients(state.basis, state.n, tuple(propagator(H, t).apply(state.c)), state.tail_mass)


def exact_phase(bc: BoundaryCondition, j: int, t, form: str = "exp") -> mpc:
    """``exp(-i E_j t)``; exact for ``t`` a rational multiple of ``1/pi``
    whenever ``E_j t / pi`` is an integer or half-integer."""
    t = SimTime.parse(t)
    k = eigenstate(bc, j, form).k
    if t.over_pi:
        # E t = (k pi / 2)^2 * coef / pi = pi * k^2 coef / 4
        return _pi_phase(-(k * k * t.coef / 4))
    e = (to_mpf(k) * mp.pi / 2) ** 2
    return mpmath.expj(-e * to_mpf(t.coef))


def special_time_map(bc: BoundaryCondition, samples, t=SPECIAL_TIME) -> list:
    """Exact evolution of sampled values ``[(x, psi(x)), ...]`` to ``t = 4/pi``.

    Dirichlet evolution is ``psi(x) -> -psi(-x)``, periodic evolution is the
    identity.  The Dirichlet map needs every mirror point ``-x`` sampled.
    """
    t = SimTime.parse(t)
    if t != SPECIAL_TIME:
        raise UnsupportedTime(f"exact map only known at t = 4/pi, got {t}")
    samples = [(mpmath.mpmathify(x), v) for x, v in samples]
    if bc.kind == "alpha" and bc.alpha_pi == 0:
        return samples
    if bc.kind != "dirichlet":
        raise UnsupportedTime(f"no exact map at t = 4/pi for {bc.tag}")
    tol = default_tol() * 100
    out = []
    for x, _ in samples:
        mirror = [v for y, v in samples if abs(y + x) <= tol]
        if not mirror:
            raise ValueError(f"mirror point {-x} of {x} not sampled")
        out.append((x, -mirror[0]))
    return out


def l2_distance(f, g, digits: int | None = None) -> mpf:
    """``||f - g||`` on (-1, 1) by adaptive quadrature, for callables."""
    return mpmath.sqrt(integrate_adaptive(lambda x: abs(f(x) - g(x)) ** 2, digits))

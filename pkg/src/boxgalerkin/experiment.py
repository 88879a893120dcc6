"""Approximation error ``||U_W(t) psi - U_n(t) psi||`` and (n, t) sweeps.

Everything happens in coefficient space.  With ``c`` the first ``n``
coefficients of the eigenvector ``psi`` (energy ``E``) and ``tail`` the mass
outside the span, ``U_n(t)`` acts as ``exp(-i t Ĥ_n)`` on ``c`` and as the
identity on the tail while the exact evolution multiplies everything by
``exp(-i E t)``::

    err^2 = sum_l |exp(-iEt) c_l - (U_n c)_l|^2 + |exp(-iEt) - 1|^2 * tail
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from .basis import BasisSpec, BoundaryCondition, expand_state
from .evolution import SimTime, exact_phase, propagator
from .numerics import PrecisionContext
from .operator import truncated_hamiltonian

DEFAULT_N_VALUES = tuple(range(8, 41, 2))
DEFAULT_T_VALUES = (SimTime(Fraction(1, 10)), SimTime(Fraction(1, 2)), SimTime(Fraction(1)), SimTime(Fraction(4), True))


class SweepError(RuntimeError):
    """A sweep point failed; ``rows`` holds every row that did complete."""

    def __init__(self, point: dict, cause: BaseException, rows: list):
        super().__init__(f"sweep point {point} failed: {type(cause).__name__}: {cause}")
        self.point = point
        self.cause = cause
        self.rows = rows


@dataclass(frozen=True)
class ExperimentSpec:
    basis: BasisSpec
    bc: BoundaryCondition
    j: int
    n_values: tuple = DEFAULT_N_VALUES
    t_values: tuple = DEFAULT_T_VALUES
    digits: int = 200
    form: str = "exp"

    def __post_init__(self):
        ns = tuple(int(n) for n in self.n_values)
        if not ns:
            raise ValueError("n_values is empty")
        if any(n < 1 for n in ns) or any(a >= b for a, b in zip(ns, ns[1:])):
            raise ValueError(f"n_values must be positive and strictly ascending, got {list(ns)}")
        ts = tuple(SimTime.parse(t) for t in self.t_values)
        if not ts:
            raise ValueError("t_values is empty")
        object.__setattr__(self, "n_values", ns)
        object.__setattr__(self, "t_values", ts)
        PrecisionContext(self.digits)
        # reject unsupported (basis, bc, j) up front
        with PrecisionContext(max(self.digits, 30)):
            expand_state(self.basis, self.bc, self.j, 1, self.form)


@dataclass(frozen=True)
class SweepRow:
    basis: str
    m: int
    bc: str
    j: int
    n: int
    t: SimTime
    error: mpf = field(compare=False)
    lambda_min: mpf = field(compare=False)
    unitarity_defect: mpf = field(compare=False)


def approximation_error(basis: BasisSpec, bc: BoundaryCondition, j: int, n: int, t, form: str = "exp") -> mpf:
    """Distance between exact and truncated evolutions of ``psi_j`` at ``t``."""
    t = SimTime.parse(t)
    state = expand_state(basis, bc, j, n, form)
    if t.coef == 0:
        return mpf(0)
    ph = exact_phase(bc, j, t, form)
    uc = propagator(truncated_hamiltonian(basis, n), t).apply(state.c)
    inside = mpmath.fsum(abs(ph * c - u) ** 2 for c, u in zip(state.c, uc))
    tail = max(state.tail_mass, mpf(0))
    return mpmath.sqrt(inside + abs(ph - 1) ** 2 * tail)


def approximation_error_direct(basis: BasisSpec, bc: BoundaryCondition, j: int, n: int, t, form: str = "exp") -> mpf:
    """Same distance from the two evolved vectors, tail carried as one extra
    coordinate, with no algebraic simplification."""
    t = SimTime.parse(t)
    state = expand_state(basis, bc, j, n, form)
    h = truncated_hamiltonian(basis, n)
    ph = exact_phase(bc, j, t, form)
    r = mpmath.sqrt(max(state.tail_mass, mpf(0)))
    exact = [ph * c for c in state.c] + [ph * r]
    approx = propagator(h, t).apply(state.c) + [r]
    return mpmath.sqrt(mpmath.fsum(abs(a - b) ** 2 for a, b in zip(exact, approx)))


def _rows_for_n(spec: ExperimentSpec, n: int) -> list[SweepRow]:
    h = truncated_hamiltonian(spec.basis, n)
    lam = h.lambda_min
    rows = []
    for t in spec.t_values:
        err = approximation_error(spec.basis, spec.bc, spec.j, n, t, spec.form)
        defect = propagator(h, t).unitarity_defect
        rows.append(SweepRow(spec.basis.tag, spec.basis.m_tag, spec.bc.tag, spec.j, n, t, err, lam, defect))
    return rows


def _job(spec: ExperimentSpec, n: int):
    with PrecisionContext(spec.digits):
        rows = _rows_for_n(spec, n)
    # mpf objects pickle with their own precision, so no loss across processes
    return rows


def run_sweep(spec: ExperimentSpec, workers: int | None = 1) -> list[SweepRow]:
    """One row per ``(n, t)`` ordered n-major then t, independent of scheduling.

    ``workers > 1`` spreads the ``n`` values over a process pool.  On failure
    a :class:`SweepError` carries the rows of every ``n`` before the first
    failing one.
    """
    if not workers:
        workers = os.cpu_count() or 1
    results: dict[int, list] = {}
    failure = None
    if workers <= 1 or len(spec.n_values) == 1:
        for n in spec.n_values:
            try:
                results[n] = _job(spec, n)
            except Exception as exc:  # noqa: BLE001 - re-raised with context
                failure = (n, exc)
                break
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            # largest n first: they dominate the wall clock
            futures = {n: pool.submit(_job, spec, n) for n in sorted(spec.n_values, reverse=True)}
            for n in spec.n_values:
                try:
                    results[n] = futures[n].result()
                except Exception as exc:  # noqa: BLE001
                    failure = (n, exc)
                    for f in futures.values():
                        f.cancel()
                    break
    rows = []
    for n in spec.n_values:
        if n not in results:
            break
        rows.extend(results[n])
    if failure:
        n, exc = failure
        point = {"basis": spec.basis.tag, "bc": spec.bc.tag, "j": spec.j, "n": n}
        raise SweepError(point, exc, rows) from exc
    return rows

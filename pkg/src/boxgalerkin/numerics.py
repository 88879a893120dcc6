"""Arbitrary-precision numerics: precision control, Hermitian matrices,
cyclic Jacobi eigensolver and an adaptive Gauss-Legendre quadrature oracle.

All big-float values are ``mpmath.mpf`` / ``mpmath.mpc``.  Working precision
is the ambient ``mpmath.mp.dps``; :class:`PrecisionContext` sets it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

import mpmath
from mpmath import mp, mpc, mpf

DEFAULT_DIGITS = 500
MIN_DIGITS = 30


class NonConvergence(ArithmeticError):
    """Jacobi sweeps exhausted before the off-diagonal mass fell below tol."""


class BudgetExceeded(ArithmeticError):
    """Adaptive quadrature hit its subdivision limit."""


@dataclass(frozen=True)
class PrecisionContext:
    """Decimal working precision for every big-float operation.

    Usable as a context manager::

        with PrecisionContext(200):
            ...
    """

    digits: int = DEFAULT_DIGITS
    _saved: list = field(default_factory=list, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.digits, int) or self.digits < MIN_DIGITS:
            raise ValueError(f"digits must be an integer >= {MIN_DIGITS}, got {self.digits!r}")

    def __enter__(self):
        self._saved.append(mp.dps)
        mp.dps = self.digits
        return self

    def __exit__(self, *exc):
        mp.dps = self._saved.pop()
        return False


def working_digits() -> int:
    return mp.dps


def default_tol() -> mpf:
    """Loosest tolerance the solvers guarantee at the current precision."""
    return mpf(10) ** (-(mp.dps - 10))


def to_mpf(x) -> mpf:
    """Convert int / Fraction / str / float to mpf at current precision."""
    if hasattr(x, "numerator") and hasattr(x, "denominator") and not isinstance(x, int):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


class HermitianMatrix:
    """Dense Hermitian matrix; only the lower triangle is stored.

    ``rows[i]`` holds entries ``(i, 0) .. (i, i)``.  The upper triangle is the
    conjugate of the lower one by construction.
    """

    __slots__ = ("n", "_lower", "is_real")

    def __init__(self, lower: Sequence[Sequence]):
        n = len(lower)
        rows = []
        real = True
        for i, row in enumerate(lower):
            if len(row) != i + 1:
                raise ValueError(f"row {i} of lower triangle must have {i + 1} entries")
            r = []
            for j, v in enumerate(row):
                v = mpmath.mpmathify(v) if not isinstance(v, (mpf, mpc)) else v
                if j == i:
                    if isinstance(v, mpc):
                        if v.imag != 0 and abs(v.imag) > default_tol() * (1 + abs(v.real)):
                            raise ValueError(f"diagonal entry {i} has imaginary part {v.imag}")
                        v = v.real
                elif isinstance(v, mpc):
                    if v.imag == 0:
                        v = v.real
                    else:
                        real = False
                r.append(v)
            rows.append(tuple(r))
        self.n = n
        self._lower = tuple(rows)
        self.is_real = real

    @classmethod
    def from_function(cls, n: int, entry: Callable[[int, int], object]) -> "HermitianMatrix":
        """Build from ``entry(i, j)`` evaluated on the lower triangle only."""
        return cls([[entry(i, j) for j in range(i + 1)] for i in range(n)])

    @classmethod
    def from_dense(cls, a: Sequence[Sequence]) -> "HermitianMatrix":
        return cls([[a[i][j] for j in range(i + 1)] for i in range(len(a))])

    @classmethod
    def diagonal(cls, values: Sequence) -> "HermitianMatrix":
        return cls.from_function(len(values), lambda i, j: values[i] if i == j else mpf(0))

    def __getitem__(self, ij):
        i, j = ij
        if j <= i:
            return self._lower[i][j]
        v = self._lower[j][i]
        return v.conjugate() if isinstance(v, mpc) else v

    def to_dense(self) -> list[list]:
        return [[self[i, j] for j in range(self.n)] for i in range(self.n)]

    def max_abs(self) -> mpf:
        return max((abs(v) for row in self._lower for v in row), default=mpf(0))

    def __eq__(self, other):
        return isinstance(other, HermitianMatrix) and self._lower == other._lower

    def __hash__(self):
        return hash(self._lower)

    def __repr__(self):
        return f"HermitianMatrix(n={self.n}, real={self.is_real})"


# dense helpers -------------------------------------------------------------

def conj(v):
    return v.conjugate() if isinstance(v, mpc) else v


def matmul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        ai = a[i]
        row = [mpf(0)] * m
        for p in range(k):
            x = ai[p]
            if x == 0:
                continue
            bp = b[p]
            for j in range(m):
                row[j] += x * bp[j]
        out.append(row)
    return out


def adjoint(a):
    return [[conj(a[i][j]) for i in range(len(a))] for j in range(len(a[0]))]


def matvec(a, v):
    return [mpmath.fsum(x * y for x, y in zip(row, v)) for row in a]


def identity(n):
    return [[mpf(1) if i == j else mpf(0) for j in range(n)] for i in range(n)]


def max_abs(a) -> mpf:
    return max((abs(x) for row in a for x in row), default=mpf(0))


def unitarity_defect(u) -> mpf:
    """max |(U U^dagger - I)_ij|."""
    n = len(u)
    worst = mpf(0)
    for i in range(n):
        for j in range(i, n):
            s = mpmath.fsum(u[i][k] * conj(u[j][k]) for k in range(n))
            if i == j:
                s -= 1
            worst = max(worst, abs(s))
    return worst


def norm2(v) -> mpf:
    return mpmath.fsum(abs(x) ** 2 for x in v)


# eigensolver ---------------------------------------------------------------

class Eigensystem(NamedTuple):
    values: list  # ascending mpf
    vectors: list  # n x n, column k is the eigenvector of values[k]


def eigendecompose_hermitian(m: HermitianMatrix, tol=None, max_sweeps: int = 60) -> Eigensystem:
    """Cyclic Jacobi diagonalisation ``M = V diag(values) V^dagger``.

    ``tol`` defaults to ``10**-(dps-10)`` and may not be tighter than that.
    Eigenvalues come back ascending; near-degenerate groups are ordered by the
    index of the first significant eigenvector component, and each eigenvector
    is phased so that component is real positive.
    """
    n = m.n
    floor = default_tol()
    tol = floor if tol is None else mpmath.mpf(tol)
    if tol <= 0 or tol < floor * mpf("0.999"):
        raise ValueError(f"tol must be >= 1e-{mp.dps - 10} at {mp.dps} digits")
    if n == 0:
        return Eigensystem([], [])
    a = m.to_dense()
    v = identity(n)
    scale = m.max_abs()
    if scale == 0:
        return _finish([mpf(0)] * n, v, tol, scale)
    target = tol * scale / 4
    sweep = _jacobi_sweep_real if m.is_real else _jacobi_sweep_complex
    for _ in range(max_sweeps):
        off = mpmath.sqrt(mpmath.fsum(abs(a[i][j]) ** 2 for i in range(n) for j in range(i)) * 2)
        if off <= target:
            break
        sweep(a, v, n)
    else:
        raise NonConvergence(f"Jacobi did not reach tol={mpmath.nstr(tol, 5)} in {max_sweeps} sweeps at {mp.dps} digits")
    values = [a[i][i].real if isinstance(a[i][i], mpc) else a[i][i] for i in range(n)]
    return _finish(values, v, tol, scale)


def _jacobi_sweep_real(a, v, n):
    one = mpf(1)
    for p in range(n - 1):
        for q in range(p + 1, n):
            apq = a[p][q]
            if apq == 0:
                continue
            app, aqq = a[p][p], a[q][q]
            theta = (aqq - app) / (2 * apq)
            t = one / (abs(theta) + mpmath.sqrt(theta * theta + one))
            if theta < 0:
                t = -t
            c = one / mpmath.sqrt(t * t + one)
            s = t * c
            ap, aq = a[p], a[q]
            for r in range(n):
                arp, arq = ap[r], aq[r]
                if arp == 0 and arq == 0:
                    continue
                x = c * arp - s * arq
                y = s * arp + c * arq
                ap[r] = x
                aq[r] = y
                a[r][p] = x
                a[r][q] = y
            ap[p] = app - t * apq
            aq[q] = aqq + t * apq
            ap[q] = aq[p] = mpf(0)
            for row in v:
                vp, vq = row[p], row[q]
                row[p] = c * vp - s * vq
                row[q] = s * vp + c * vq


def _jacobi_sweep_complex(a, v, n):
    one = mpf(1)
    for p in range(n - 1):
        for q in range(p + 1, n):
            apq = a[p][q]
            if apq == 0:
                continue
            r_ = abs(apq)
            ph = apq / r_  # e^{i phi}
            app = a[p][p].real if isinstance(a[p][p], mpc) else a[p][p]
            aqq = a[q][q].real if isinstance(a[q][q], mpc) else a[q][q]
            theta = (aqq - app) / (2 * r_)
            t = one / (abs(theta) + mpmath.sqrt(theta * theta + one))
            if theta < 0:
                t = -t
            c = one / mpmath.sqrt(t * t + one)
            s = t * c
            sph = s * ph
            sphc = s * ph.conjugate()
            # columns: A J, J = [[c, s e^{i phi}], [-s e^{-i phi}, c]]
            for row in a:
                xp, xq = row[p], row[q]
                row[p] = c * xp - sphc * xq
                row[q] = sph * xp + c * xq
            # rows: J^dagger A
            ap, aq = a[p], a[q]
            for k in range(n):
                xp, xq = ap[k], aq[k]
                ap[k] = c * xp - sph * xq
                aq[k] = sphc * xp + c * xq
            ap[p] = app - t * r_
            aq[q] = aqq + t * r_
            ap[q] = aq[p] = mpf(0)
            for row in v:
                xp, xq = row[p], row[q]
                row[p] = c * xp - sphc * xq
                row[q] = sph * xp + c * xq


def _finish(values, v, tol, scale):
    n = len(values)
    sig = tol * 10
    lead = []
    for k in range(n):
        col = [v[i][k] for i in range(n)]
        idx = next((i for i, x in enumerate(col) if abs(x) > sig), 0)
        x = col[idx]
        if isinstance(x, mpc):
            ph = abs(x) / x
            for i in range(n):
                v[i][k] = v[i][k] * ph
                if isinstance(v[i][k], mpc) and v[i][k].imag == 0:
                    v[i][k] = v[i][k].real
        elif x < 0:
            for i in range(n):
                v[i][k] = -v[i][k]
        lead.append(idx)
    order = sorted(range(n), key=lambda k: values[k])
    # within near-degenerate groups fall back to leading-component index
    gap = tol * max(scale, mpf(1)) * 10
    out, i = [], 0
    while i < n:
        j = i + 1
        while j < n and values[order[j]] - values[order[j - 1]] <= gap:
            j += 1
        out.extend(sorted(order[i:j], key=lambda k: (lead[k], values[k])))
        i = j
    vals = [values[k] for k in out]
    vecs = [[v[i][k] for k in out] for i in range(n)]
    return Eigensystem(vals, vecs)


def reconstruct(es: Eigensystem, f=None):
    """``V diag(f(values)) V^dagger`` (``f`` defaults to the identity)."""
    n = len(es.values)
    d = es.values if f is None else [f(x) for x in es.values]
    v = es.vectors
    scaled = [[v[i][k] * d[k] for k in range(n)] for i in range(n)]
    return matmul(scaled, adjoint(v))


# quadrature ----------------------------------------------------------------

@lru_cache(maxsize=64)
def gauss_legendre_rule(order: int, digits: int) -> tuple[tuple, tuple]:
    """Nodes and weights of the ``order``-point rule on [-1, 1] at ``digits``."""
    with mp.workdps(digits + 10):
        nodes, weights = [], []
        eps = mpf(10) ** (-(digits + 5))
        for i in range(1, order // 2 + 1):
            x = mpmath.cos(mp.pi * (i - mpf(1) / 4) / (order + mpf(1) / 2))
            for _ in range(100):
                p0, p1 = mpf(1), x
                for k in range(2, order + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = order * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < eps:
                    break
            p0, p1 = mpf(1), x
            for k in range(2, order + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = order * (x * p1 - p0) / (x * x - 1)
            w = 2 / ((1 - x * x) * dp * dp)
            nodes += [x, -x]
            weights += [w, w]
        if order % 2:
            p0, p1 = mpf(1), mpf(0)
            for k in range(2, order + 1):
                p0, p1 = p1, (-(k - 1) * p0) / k
            dp = order * (-p0) / mpf(-1)
            nodes.append(mpf(0))
            weights.append(2 / (dp * dp))
    return tuple(nodes), tuple(weights)


def _panel(f, a, b, rule):
    nodes, weights = rule
    h = (b - a) / 2
    mid = (a + b) / 2
    return h * mpmath.fsum(w * f(mid + h * x) for x, w in zip(nodes, weights))


def integrate_adaptive(f: Callable, digits: int | None = None, a=-1, b=1, order: int | None = None,
                       max_panels: int = 4096):
    """Adaptive Gauss-Legendre integral of ``f`` over ``[a, b]``.

    Each panel is accepted once the rule on the panel agrees with the rule on
    its two halves to ``10**-(digits-10) * width / 2``.  ``f`` may return real
    or complex values; evaluation runs at ``digits + 10`` guard precision.
    """
    digits = mp.dps if digits is None else digits
    if order is None:
        order = max(24, (7 * digits) // 10)
    with mp.workdps(digits + 10):
        rule = gauss_legendre_rule(order, digits)
        a, b = mpf(a), mpf(b)
        tol = mpf(10) ** (-(digits - 10))
        total = []
        stack = [(a, b, _panel(f, a, b, rule))]
        panels = 1
        while stack:
            lo, hi, whole = stack.pop()
            mid = (lo + hi) / 2
            left = _panel(f, lo, mid, rule)
            right = _panel(f, mid, hi, rule)
            panels += 2
            if abs(left + right - whole) <= tol * (hi - lo) / (b - a) / 4:
                total.append(left + right)
                continue
            if panels > max_panels:
                raise BudgetExceeded(f"quadrature used more than {max_panels} panels at {digits} digits")
            stack.append((mid, hi, right))
            stack.append((lo, mid, left))
        result = mpmath.fsum(total)
    return +result

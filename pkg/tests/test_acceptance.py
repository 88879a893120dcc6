"""Acceptance gate: the eight end-to-end criteria at their stated tolerances.

Each test prints one ``CRITERION k PASS|FAIL`` line (shown again in the
terminal summary) and then asserts.  Thresholds that had to be fixed from a
pre-build oracle run are given with the measured value next to them.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""
from functools import lru_cache

import mpmath
import pytest
from mpmath import mp, mpf

from boxgalerkin import basis as basis_mod
from boxgalerkin import evolution as evolution_mod
from boxgalerkin import operator as operator_mod
from boxgalerkin.basis import AugmentKind, BasisSpec, BoundaryCondition, Wave, expand_state
from boxgalerkin.cli import rows_to_csv
from boxgalerkin.evolution import SPECIAL_TIME, exact_phase, l2_distance, propagate_truncated, special_time_map
from boxgalerkin.experiment import ExperimentSpec, run_sweep
from boxgalerkin.numerics import PrecisionContext
from boxgalerkin.operator import galerkin_projection_residual, truncated_hamiltonian
from boxgalerkin.oracle import oracle_equivalence

pytestmark = pytest.mark.slow

DIGITS = 200
DIR, PER, APER = BoundaryCondition.dirichlet(), BoundaryCondition.periodic(), BoundaryCondition.antiperiodic()
L4 = BasisSpec.legendre(4)

# pre-build oracle run (200 digits): error(40) = 1.97534 for the periodic
# constant at t = 4/pi; the band below leaves 0.005 of slack toward the exact limit 2
PERIODIC_ERROR40_FLOOR = "1.97"
# pre-build oracle run: residual(8) = 0.0413, residual(32) = 0.00376 (Dirichlet j=1);
# periodic j=0 residual is exactly 1 because E_0 = 0
RESIDUAL_PERIODIC_FLOOR = "0.3"

RESULTS = {}


def report(k: int, ok: bool, summary: str, capsys):
    line = f"CRITERION {k} {'PASS' if ok else 'FAIL'}: {summary}"
    RESULTS[k] = line
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def fmt(x, d=6):
    return mpmath.nstr(x, d)


@lru_cache(maxsize=None)
def sweep(name: str):
    specs = {
        "dirichlet": ExperimentSpec(L4, DIR, 5, tuple(range(8, 41, 2)), ("0.1", "1", "4/1/pi"), DIGITS),
        "periodic": ExperimentSpec(L4, PER, 0, tuple(range(8, 41)), ("4/1/pi",), DIGITS),
        "aug-constant": ExperimentSpec(BasisSpec.augmented(AugmentKind.CONSTANT_PERIODIC, 4), PER, 0,
                                       (8, 16, 24, 32, 40), ("1",), DIGITS),
        "aug-cosine": ExperimentSpec(BasisSpec.augmented(AugmentKind.COSINE_ANTIPERIODIC, 4), APER, 1,
                                     (8, 16, 24, 32, 40), ("1",), DIGITS, "cos"),
    }
    return tuple(run_sweep(specs[name]))


def by_t(rows):
    out = {}
    for r in rows:
        out.setdefault(r.t.tag, {})[r.n] = r.error
    return out


def test_criterion_1_oracle_equivalence(capsys):
    checks = oracle_equivalence(m_values=(4, 6), span=8, jmax=5, digits=50, tol=mpf("1e-30"))
    failed = [c for c in checks if not c.passed]
    worst = max(checks, key=lambda c: c.rel_error)
    n_el = sum(c.kind == "element" for c in checks)
    report(1, not failed,
           f"{len(checks)} checks ({n_el} elements, {len(checks) - n_el} coefficients), "
           f"{len(failed)} failed, worst rel {fmt(worst.rel_error, 3)} ({worst.kind} l={worst.l} m={worst.m})", capsys)


def test_criterion_2_dirichlet_convergence(capsys):
    errs = by_t(sweep("dirichlet"))
    problems = []
    for t, e in errs.items():
        if not e[40] < mpf("0.1"):
            problems.append(f"t={t}: error(40)={fmt(e[40])} !< 0.1")
        if not e[40] < e[8] / 5:
            problems.append(f"t={t}: error(40)={fmt(e[40])} !< error(8)/5={fmt(e[8] / 5)}")
        for n in e:
            if n + 8 in e and not e[n + 8] <= e[n] + mpf("1e-3"):
                problems.append(f"t={t}: error({n + 8}) > error({n}) + 1e-3")
    summary = "; ".join(f"t={t} error(8)={fmt(e[8])} error(40)={fmt(e[40])}" for t, e in errs.items())
    report(2, not problems, summary + (" | " + "; ".join(problems) if problems else ""), capsys)


def test_criterion_3_periodic_non_convergence(capsys):
    e = by_t(sweep("periodic"))["4/1/pi"]
    problems = []
    low = [n for n in e if not e[n] >= mpf("0.5")]
    if low:
        problems.append(f"error < 0.5 at n={low}")
    drops = [(n, fmt(e[n] - e[n + 1], 3)) for n in range(16, 40) if e[n + 1] < e[n]]
    if drops:
        problems.append(f"decreases at (n, drop) {drops}")
    if not e[40] > mpf(PERIODIC_ERROR40_FLOOR):
        problems.append(f"error(40)={fmt(e[40])} !> {PERIODIC_ERROR40_FLOOR}")
    if not e[40] <= 2:
        problems.append("error(40) > 2")
    summary = f"min error={fmt(min(e.values()))}, error(16)={fmt(e[16])}, error(40)={fmt(e[40])} (floor {PERIODIC_ERROR40_FLOOR})"
    report(3, not problems, summary + (" | " + "; ".join(problems) if problems else ""), capsys)


def test_criterion_4_augmented_repair(capsys):
    c = by_t(sweep("aug-constant"))["1"][40]
    a = by_t(sweep("aug-cosine"))["1"][40]
    ok = c < mpf("0.1") and a < mpf("0.1")
    report(4, ok, f"constant/periodic error(40)={fmt(c)}, cosine/antiperiodic error(40)={fmt(a)}", capsys)


def test_criterion_5_special_time_identities(capsys):
    with PrecisionContext(DIGITS):
        tol = mpf(10) ** -(DIGITS - 15)
        spec = BasisSpec.eigen(DIR)
        n = 12
        h = truncated_hamiltonian(spec, n)
        worst = mpf(0)
        for j in range(1, n + 1):
            s = expand_state(spec, DIR, j, n)
            out = propagate_truncated(h, SPECIAL_TIME, s)
            worst = max(worst, abs(out.c[j - 1] - (-1) ** j), max(abs(x) for i, x in enumerate(out.c) if i != j - 1))
        # symmetric state (psi_1 + psi_3)/sqrt2: Dirichlet gives -psi, periodic gives psi
        c = [mpf(0)] * n
        c[0] = c[2] = 1 / mpmath.sqrt(2)
        sym = basis_mod.StateCoefficients(spec, n, tuple(c), mpf(0))
        dir_out = propagate_truncated(h, SPECIAL_TIME, sym).c
        dist = mpmath.sqrt(mpmath.fsum(abs(a - b) ** 2 for a, b in zip(dir_out, c)))
        # the same distance from the exact sample maps, for the unit constant
        w = Wave("cos", 0)
        psi = lambda x: w(x) / w.norm()  # noqa: E731
        xs = [mpf(k) / 16 for k in range(-16, 17)]
        mapped_dir = dict(special_time_map(DIR, [(x, psi(x)) for x in xs]))
        mapped_per = dict(special_time_map(PER, [(x, psi(x)) for x in xs]))
        map_ok = all(abs(mapped_dir[x] + mapped_per[x]) <= tol for x in xs)
        dist_fn = l2_distance(lambda x: -psi(-x), psi, digits=60)
        phase_ok = all(exact_phase(DIR, j, SPECIAL_TIME) == (-1) ** j for j in range(1, 20))
    ok = worst <= tol and abs(dist - 2) <= tol and map_ok and phase_ok and abs(dist_fn - 2) < mpf(10) ** -45
    report(5, ok, f"max phase deviation {fmt(worst, 3)}, |dist-2|={fmt(abs(dist - 2), 3)} "
                  f"(tol 1e-{DIGITS - 15}), function-space |dist-2|={fmt(abs(dist_fn - 2), 3)}", capsys)


def test_criterion_6_rayleigh_ritz(capsys):
    with PrecisionContext(DIGITS):
        e0 = mpmath.pi ** 2 / 4
        lam = {n: truncated_hamiltonian(L4, n).lambda_min for n in range(1, 41)}
        below = [n for n in lam if lam[n] < e0]
        ups = [n for n in range(1, 40) if lam[n + 1] > lam[n]]
        gap = lam[40] - e0
    problems = []
    if below:
        problems.append(f"below pi^2/4 at n={below}")
    if ups:
        problems.append(f"increases at n={ups}")
    if not abs(gap) < mpf("1e-3"):
        problems.append(f"|lambda_min(40) - pi^2/4| = {fmt(gap)} !< 1e-3")
    summary = f"lambda_min(1)={fmt(lam[1])}, lambda_min(40)-pi^2/4={fmt(gap)}"
    report(6, not problems, summary + (" | " + "; ".join(problems) if problems else ""), capsys)


def _clear_caches():
    operator_mod._truncated.cache_clear()
    operator_mod._eigensystem.cache_clear()
    evolution_mod._propagator.cache_clear()
    basis_mod._gram_schmidt.cache_clear()


def test_criterion_7_unitarity_and_determinism(capsys):
    rows = [r for name in ("dirichlet", "periodic", "aug-constant", "aug-cosine") for r in sweep(name)]
    worst = max(r.unitarity_defect for r in rows)
    spec = ExperimentSpec(BasisSpec.augmented(AugmentKind.COSINE_ANTIPERIODIC, 4), APER, 1,
                          (8, 16, 24), ("0.1", "4/1/pi"), DIGITS, "cos")
    spec2 = ExperimentSpec(L4, DIR, 5, (8, 16, 24), ("0.1", "4/1/pi"), DIGITS)
    _clear_caches()
    first = rows_to_csv(run_sweep(spec) + run_sweep(spec2)).encode()
    _clear_caches()
    second = rows_to_csv(run_sweep(spec, workers=2) + run_sweep(spec2, workers=2)).encode()
    ok = worst < mpf(10) ** -(DIGITS - 20) and first == second
    report(7, ok, f"{len(rows)} propagators, max defect {fmt(worst, 3)} (bound 1e-{DIGITS - 20}); "
                  f"CSV identical across runs: {first == second}", capsys)


def test_criterion_8_galerkin_residual(capsys):
    with PrecisionContext(DIGITS):
        ns = range(2, 33, 2)
        r = {n: galerkin_projection_residual(L4, DIR, 1, n) for n in range(1, 33)}
        p = {n: galerkin_projection_residual(L4, PER, 0, n) for n in range(1, 33)}
        slack = mpf(10) ** -(DIGITS - 15)
        problems = []
        ns = list(ns)
        # odd-l elements do not couple to the even state, so consecutive n may tie
        if not all(r[b] < r[a] for a, b in zip(ns, ns[1:])):
            problems.append("Dirichlet residual not strictly decreasing over even n")
        if not all(r[n + 1] <= r[n] + slack for n in range(1, 32)):
            problems.append("Dirichlet residual increases between consecutive n")
        if not r[32] < r[8] / 5:
            problems.append(f"residual(32)={fmt(r[32])} !< residual(8)/5={fmt(r[8] / 5)}")
        if not all(v > mpf(RESIDUAL_PERIODIC_FLOOR) for v in p.values()):
            problems.append("periodic residual drops below 0.3")
    summary = f"Dirichlet residual(8)={fmt(r[8])}, residual(32)={fmt(r[32])}; periodic min={fmt(min(p.values()))}"
    report(8, not problems, summary + (" | " + "; ".join(problems) if problems else ""), capsys)

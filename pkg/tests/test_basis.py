from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mp, mpc, mpf

from boxgalerkin.basis import (
    AugmentKind,
    BasisSpec,
    BoundaryCondition,
    DegenerateBasis,
    UnsupportedPair,
    Wave,
    alpha_mode_order,
    augment_overlaps,
    augmented_gram_matrix,
    basis_element,
    coeff_dirichlet,
    coeff_exponential,
    coeff_neumann,
    coeff_periodic,
    eigenbasis_wave,
    eigenstate,
    expand_state,
    expand_wave,
    gram_schmidt_augmented,
    inner_wave,
    legendre_wave_coeff,
    satisfies,
)
from boxgalerkin.legendre import assoc_legendre_poly
from boxgalerkin.numerics import integrate_adaptive

DIR, NEU, PER, APER = (BoundaryCondition.dirichlet(), BoundaryCondition.neumann(),
                       BoundaryCondition.periodic(), BoundaryCondition.antiperiodic())
pi = mpmath.pi

# exact symbolic integrals <P_l^m, wave> (sympy, frozen)
SYMBOLIC = [
    ("sin", 4, 4, 5, lambda: 2688 * (12 - 25 * pi ** 2) / (625 * pi ** 5)),
    ("sin", 7, 4, 3, lambda: mpf(0)),
    ("sin", 9, 6, 4, lambda: 6081075 * (-2625 * pi ** 2 + 5355 + 184 * pi ** 4) / (4 * pi ** 9)),
    ("cos", 6, 4, 3, lambda: mpf(0)),
    ("cos", 8, 6, 0, lambda: mpf(41184)),
    ("cos", 5, 4, 1, lambda: 1451520 * (-10 + pi ** 2) / pi ** 6),
    ("exp", 5, 4, 1, lambda: mpc(0, 15120 * (-15 + pi ** 2) / pi ** 5)),
    ("exp", 4, 4, 1, lambda: -5040 / pi ** 4),
    ("exp", 8, 6, -2, lambda: 405405 * (-705 * pi ** 2 + 1575 + 28 * pi ** 4) / (2 * pi ** 8)),
    ("exp", 6, 4, 0, lambda: mpf(288)),
]


@pytest.mark.parametrize("kind, l, m, j, exact", SYMBOLIC)
def test_coefficients_match_symbolic_integrals(kind, l, m, j, exact):
    fn = {"sin": coeff_dirichlet, "cos": coeff_neumann, "exp": coeff_periodic}[kind]
    got, want = fn(l, m, j), exact()
    assert abs(got - want) <= mpf(10) ** -45 * max(abs(want), 1)


def test_documented_examples():
    assert abs(coeff_dirichlet(4, 4, 5) - mpf("-3.29903700774508107422090419334912")) < mpf(10) ** -30
    assert coeff_periodic(4, 4, 0) == 112
    assert coeff_dirichlet(4, 4, 2) == 0
    assert coeff_neumann(4, 4, 1) == 0


@pytest.mark.parametrize("l, m", [(3, 4), (4, 2), (5, 5)])
def test_coefficient_domain(l, m):
    with pytest.raises(ValueError):
        coeff_dirichlet(l, m, 1)


@given(st.integers(4, 12), st.sampled_from([4, 6]), st.integers(1, 6))
def test_parity_zeros(l, m, j):
    if l < m:
        return
    if (j + l) % 2 == 0:
        assert coeff_dirichlet(l, m, j) == 0
    if (j + l) % 2 == 1:
        assert coeff_neumann(l, m, j) == 0


@pytest.mark.parametrize("k", [Fraction(1, 3), Fraction(5, 2), Fraction(-7, 4)])
def test_general_exponential_against_quadrature(k):
    p = assoc_legendre_poly(8, 4)
    w = Wave("exp", k)
    quad = integrate_adaptive(lambda x: p(x) * w(x))
    got = legendre_wave_coeff(8, 4, w)
    assert abs(got - quad) < mpf(10) ** -40 * abs(quad)
    assert abs(coeff_exponential(8, 4, k / 2) - quad) < mpf(10) ** -40 * abs(quad)


@pytest.mark.parametrize("a, b", [
    (Wave("sin", 3), Wave("sin", 3)),
    (Wave("cos", 0), Wave("cos", 2)),
    (Wave("exp", Fraction(1, 2)), Wave("cos", 1)),
    (Wave("exp", -3), Wave("sin", 4)),
])
def test_inner_wave_against_quadrature(a, b):
    quad = integrate_adaptive(lambda x: mpmath.conj(a(x)) * b(x))
    assert abs(inner_wave(a, b) - quad) < mpf(10) ** -40


@pytest.mark.parametrize("bc, j, form, kind", [
    (DIR, 5, "exp", "sin"), (NEU, 0, "exp", "cos"), (PER, -2, "exp", "exp"),
    (PER, 0, "cos", "cos"), (APER, 1, "cos", "cos"), (APER, 0, "exp", "exp"),
])
def test_eigenstates_satisfy_their_condition(bc, j, form, kind):
    w = eigenstate(bc, j, form)
    assert w.kind == kind and satisfies(w, bc)


def test_eigenstate_energy():
    assert abs(eigenstate(DIR, 5).energy - 25 * pi ** 2 / 4) < mpf(10) ** -45
    assert eigenstate(PER, 0).energy == 0
    assert abs(eigenstate(APER, 1, "cos").energy - pi ** 2 / 4) < mpf(10) ** -45


def test_periodic_ordering():
    assert alpha_mode_order(PER, 5) == (0, 1, -1, 2, -2)
    assert [eigenbasis_wave(PER, i).k for i in range(3)] == [0, 2, -2]


def test_unsupported_pair():
    with pytest.raises(UnsupportedPair):
        expand_state(BasisSpec.legendre(4), DIR, 2, 4, form="cos")
    with pytest.raises(UnsupportedPair):
        eigenstate(BoundaryCondition.alpha_periodic(Fraction(1, 3)), 0, "cos")


@pytest.mark.parametrize("token", ["dirichlet", "neumann", "periodic", "antiperiodic", "alpha:1/3"])
def test_boundary_condition_roundtrip(token):
    assert BoundaryCondition.parse(token).tag == token


@pytest.mark.parametrize("token", ["eigen:dirichlet", "legendre:6", "augmented:constant:4", "augmented:cosine:4"])
def test_basis_spec_roundtrip(token):
    assert BasisSpec.parse(token).tag == token


@pytest.mark.parametrize("spec", [BasisSpec.legendre(4), BasisSpec.legendre(6)])
def test_legendre_elements_are_boundary_blind(spec):
    for i in range(4):
        assert all(v == 0 for v in basis_element(spec, i).boundary)


@pytest.mark.parametrize("aug", list(AugmentKind))
def test_gram_schmidt_orthonormal(aug):
    n = 8
    c = gram_schmidt_augmented(aug, 4, n)
    g = augmented_gram_matrix(aug, 4, n)
    for i in range(n):
        for j in range(n):
            s = mpmath.fsum(c[i][a] * g[a][b] * c[j][b] for a in range(n) for b in range(n))
            assert abs(s - (1 if i == j else 0)) < mpf(10) ** -40
    assert c[0][0] == 1 and all(x == 0 for x in c[0][1:])


def test_augmented_elements_orthonormal_by_quadrature():
    spec = BasisSpec.augmented(AugmentKind.COSINE_ANTIPERIODIC, 4)
    mp.dps = 30
    e = [basis_element(spec, i) for i in range(3)]
    for i in range(3):
        for j in range(i + 1):
            s = integrate_adaptive(lambda x: e[i](x) * e[j](x))
            assert abs(s - (1 if i == j else 0)) < mpf(10) ** -20


def test_constant_overlap_value():
    # <1/sqrt2, p_4^4> = 112 / sqrt(2 * 8960)
    g = augment_overlaps(AugmentKind.CONSTANT_PERIODIC, 4, 2)
    assert abs(g[0] - 112 / mpmath.sqrt(2 * 8960)) < mpf(10) ** -45
    assert g[1] == 0


def test_expand_wave_exact_delta():
    s = expand_state(BasisSpec.eigen(DIR), DIR, 3, 5)
    assert s.c == (0, 0, 1, 0, 0) and s.tail_mass == 0
    s = expand_wave(BasisSpec.augmented(AugmentKind.CONSTANT_PERIODIC, 4), Wave("exp", 0), 4)
    assert s.c[0] == 1 and s.tail_mass == 0


@given(st.integers(1, 12))
def test_tail_mass_non_increasing(n):
    a = expand_state(BasisSpec.legendre(4), DIR, 5, n)
    b = expand_state(BasisSpec.legendre(4), DIR, 5, n + 1)
    assert b.tail_mass <= a.tail_mass + mpf(10) ** -45
    assert 0 <= b.tail_mass <= 1


def test_degenerate_basis_detected(monkeypatch):
    import boxgalerkin.basis as B

    # f0 coinciding with p_4^4 makes the raw family linearly dependent
    monkeypatch.setattr(B, "augment_overlaps", lambda f0, m, count: [mpf(1)] + [mpf(0)] * (count - 1))
    B._gram_schmidt.cache_clear()
    try:
        with pytest.raises(DegenerateBasis):
            gram_schmidt_augmented(AugmentKind.CONSTANT_PERIODIC, 4, 3)
    finally:
        B._gram_schmidt.cache_clear()

from fractions import Fraction

import pytest
import sympy

from morava_kit.fgl import (
    TheoryDescriptor,
    additive_fgl,
    bp_logarithm,
    check_fgl_axioms,
    formal_inverse,
    lubin_tate_mod_I,
    morava_fgl,
    morava_logarithm,
    multiplicative_fgl,
    phi_morphism,
    reduce_mod_I,
    theory,
)
from morava_kit.series import CoefficientRing, SeriesRing, p_local_check

CASES = [(2, 1), (2, 2), (3, 1)]


# -- logarithms ------------------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3, 5])
def test_bp_logarithm_low_coefficients(p):
    log = bp_logarithm(p, p * p + 1)
    R = log.ring
    v1, v2 = R.gen("v1"), R.gen("v2")
    assert log[1] == 1
    assert log[p] == v1 / p
    assert log[p * p] == v2 / p + v1 ** (p + 1) / p**2


def test_bp_logarithm_recursion_oracle():
    # m_3 at p = 2, expanded by hand from the recursion
    log = bp_logarithm(2, 9)
    R = log.ring
    v1, v2, v3 = (R.gen(f"v{i}") for i in (1, 2, 3))
    m1 = v1 / 2
    m2 = (v2 + m1 * v1**2) / 2
    m3 = (v3 + m1 * v2**2 + m2 * v1**4) / 2
    assert log[8] == m3
    assert log.degree() == 1


def test_morava_logarithm_small():
    log = morava_logarithm(2, 1, 3)
    T = SeriesRing(("t",), 3, log.ring)
    t = T.var("t")
    assert log == t + T.coeff_gen("v1") * t**2 / 2


@pytest.mark.parametrize("p,n", CASES)
def test_morava_logarithm_closed_form(p, n):
    # only v_n survives: m_{kn} = v_n^((p^{kn}-1)/(p^n-1)) / p^k
    q = p**n
    N = q * q + 1
    log = morava_logarithm(p, n, N)
    R = log.ring
    assert log[q] == R.gen(f"v{n}") / p
    assert log[q * q] == R.gen(f"v{n}", q + 1) / p**2
    for d in range(2, N):
        if d not in (q, q * q):
            assert log[d] == 0
    ungraded = morava_logarithm(p, n, 2 * q - 1, vn=1)
    assert ungraded[q] == Fraction(1, p)


def test_morava_logarithm_beyond_truncation():
    log = morava_logarithm(2, 3, 6)
    assert log == SeriesRing(("t",), 6, log.ring).var("t")


# -- the laws ----------------------------------------------------------------------


@pytest.mark.parametrize("p,n", CASES)
def test_morava_axioms(p, n):
    F = morava_fgl(p, n, 10)
    report = check_fgl_axioms(F)
    assert report.passed, list(report.lines())


def test_associativity_p3_order10():
    report = check_fgl_axioms(morava_fgl(3, 1, 10))
    assert report.residuals["associativity"].is_zero()


def test_additive_and_corrupted_law():
    assert check_fgl_axioms(additive_fgl(8)).passed
    S = SeriesRing(("x", "y"), 6)
    x, y = S.gens
    report = check_fgl_axioms(x + y + x**2)
    assert "unit_left" in report.failures
    X = SeriesRing(("x",), 6)
    assert report.residuals["unit_left"] == X.var("x") ** 2


@pytest.mark.parametrize("p,n", CASES)
def test_morava_law_properties(p, n):
    F = morava_fgl(p, n, 9)
    X = SeriesRing(("x",), 9, F.ring)
    assert F.F.substitute({"x": X.var("x"), "y": X.zero}) == X.var("x")
    assert F.F.is_homogeneous() and F.F.degree() == 1
    assert p_local_check(F.F, p)[0]


def test_morava_2_1_is_multiplicative_in_low_degree():
    F = morava_fgl(2, 1, 3)
    S = SeriesRing(("x", "y"), 3, F.ring)
    x, y = S.gens
    assert F.F == x + y - S.coeff_gen("v1") * x * y


def test_morava_2_1_strictly_isomorphic_to_multiplicative():
    # g = e_K(l_mult(t)) is a strict isomorphism with 2-integral coefficients
    N = 12
    K = morava_fgl(2, 1, N)
    M = multiplicative_fgl(N, K.ring)
    g = K.exponential().substitute({"t": M.logarithm})
    assert g[1] == 1
    assert p_local_check(g, 2)[0]
    # g(F_mult(x, y)) = F_K(g(x), g(y))
    XY = SeriesRing(("x", "y"), N, K.ring)
    x, y = XY.gens
    gx, gy = g.substitute({"t": x}), g.substitute({"t": y})
    assert g.substitute({"t": M(x, y)}) == K(gx, gy)


def test_multiplicative_log_matches_law():
    M = multiplicative_fgl(8)
    XY = SeriesRing(("x", "y"), 8, M.ring)
    x, y = XY.gens
    log = M.logarithm
    assert log.substitute({"t": M(x, y)}) == log.substitute({"t": x}) + log.substitute({"t": y})


# -- mod I ------------------------------------------------------------------------


def test_lubin_tate_closed_forms():
    for p, n in CASES:
        lt = lubin_tate_mod_I(p, n)
        S = SeriesRing(("x", "y"), lt.order, lt.ring)
        x, y = S.gens
        v = S.coeff_gen(f"v{n}")
        expect = {
            (2, 1): x + y - v * x * y,
            (3, 1): x + y - v * (x * y**2 + x**2 * y),
            (2, 2): x + y - v * x**2 * y**2,
        }[(p, n)]
        assert lt == expect


@pytest.mark.parametrize("p,n", CASES + [(3, 2)])
def test_morava_law_mod_I(p, n):
    F = morava_fgl(p, n, 2 * p**n - 1)
    assert reduce_mod_I(F, p, n) == reduce_mod_I(lubin_tate_mod_I(p, n), p, n)


def test_reduce_mod_I_rejects_non_integral():
    S = SeriesRing(("x", "y"), 3)
    x, y = S.gens
    with pytest.raises(ValueError):
        reduce_mod_I(x + y + x * y / 2, 2, 1)


# -- phi -----------------------------------------------------------------------


@pytest.mark.parametrize("p,n", CASES)
def test_phi_lemma(p, n):
    q = p**n
    phi = phi_morphism(p, n, 2 * q - 1)
    T = SeriesRing(("t",), 2 * q - 1, phi.ring)
    t = T.var("t")
    assert phi == t - T.coeff_gen(f"v{n}") * t**q / p
    assert phi[1] == 1


@pytest.mark.parametrize("p,n", CASES)
def test_phi_is_morphism(p, n):
    N = 10
    phi = phi_morphism(p, n, N)
    F = morava_fgl(p, n, N)
    XY = SeriesRing(("x", "y"), N, F.ring)
    x, y = XY.gens
    assert F(phi.substitute({"t": x}), phi.substitute({"t": y})) == phi.substitute({"t": x + y})
    log = morava_logarithm(p, n, N)
    assert log.substitute({"t": phi}) == SeriesRing(("t",), N, phi.ring).var("t")


def test_phi_additive_is_identity():
    th = theory("chow", order=8)
    assert th.phi == SeriesRing(("t",), 8).var("t")


# -- formal inverse ---------------------------------------------------------------


def test_formal_inverse_additive():
    assert formal_inverse(additive_fgl(7)) == -SeriesRing(("t",), 7).var("t")


def test_formal_inverse_multiplicative():
    M = multiplicative_fgl(8)
    T = SeriesRing(("t",), 8, M.ring)
    t = T.var("t")
    v = T.coeff_gen("v1")
    expect = sum((-(v ** (k - 1)) * t**k for k in range(1, 8)), T.zero)
    assert formal_inverse(M) == expect
    # sympy oracle: -t/(1 - v t)
    ts, vs = sympy.symbols("t v1")
    ser = sympy.series(-ts / (1 - vs * ts), ts, 0, 8).removeO()
    assert sympy.expand(ser - sum(-(vs ** (k - 1)) * ts**k for k in range(1, 8))) == 0


@pytest.mark.parametrize("p,n", [(2, 2), (2, 1), (3, 1)])
def test_formal_inverse_morava(p, n):
    F = morava_fgl(p, n, 10)
    inv = formal_inverse(F)
    t = SeriesRing(("t",), 10, F.ring).var("t")
    assert F(t, inv).is_zero()
    assert F(inv, t).is_zero()
    assert formal_inverse(F) == F.exponential().substitute({"t": -F.logarithm})


# -- registry ---------------------------------------------------------------------


def test_descriptor_validation():
    with pytest.raises(ValueError):
        TheoryDescriptor("morava", 4, 1)
    with pytest.raises(ValueError):
        TheoryDescriptor("morava", 2)
    with pytest.raises(ValueError):
        TheoryDescriptor("chow", 2)
    with pytest.raises(ValueError):
        TheoryDescriptor("elliptic")


def test_registry_rings():
    assert "v2" in theory("morava", 2, 2).ring.laurent
    assert not theory("connective_morava", 2, 2).ring.laurent
    assert theory("chow").fgl.F == additive_fgl(12).F
    k0 = theory("k0", order=6)
    S = SeriesRing(("x", "y"), 6, k0.ring)
    x, y = S.gens
    assert k0.fgl.F == x + y - S.coeff_gen("v1") * x * y
    assert theory("bp", 2, order=9).ring.gens == ("v1", "v2", "v3")
    assert theory("morava", 2, 1) is theory("morava", 2, 1)
    assert check_fgl_axioms(theory("bp", 2, order=8).fgl).passed
    assert check_fgl_axioms(theory("connective_morava", 3, 1, order=8).fgl).passed
    assert isinstance(theory("morava", 2, 1).ring, CoefficientRing)

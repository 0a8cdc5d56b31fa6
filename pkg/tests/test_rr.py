import random

import pytest

from morava_kit.fgl import TheoryDescriptor, phi_morphism, theory
from morava_kit.rr import (
    PolynomialClass,
    ch_component,
    ch_transport,
    integrality_report,
    line_bundle_classes,
    operation_c,
    random_line_bundle_class,
    todd_classes,
    witt_hom_C,
)
from morava_kit.series import SeriesRing, p_local_check

K21 = TheoryDescriptor("morava", 2, 1)
K22 = TheoryDescriptor("morava", 2, 2)
K31 = TheoryDescriptor("morava", 3, 1)


def chow_gens(alpha):
    S = SeriesRing(alpha.generators, alpha.dim + 1, alpha.series.ring)
    return S, S.gens


# -- Todd classes ----------------------------------------------------------------


def test_todd_additive():
    t = SeriesRing(("t",), 8).var("t")
    data = todd_classes(t)
    assert data.td == 1 and data.itd == 1


def test_inverse_todd_leading_terms():
    data = todd_classes(phi_morphism(2, 1, 4))
    T = SeriesRing(("t",), 2, data.itd.ring)
    expect = 1 - T.coeff_gen("v1") * T.var("t") / 2
    assert data.itd.truncate(2) == expect


def test_todd_product_is_one():
    data = todd_classes(phi_morphism(3, 1, 13))
    assert data.td.order == 12
    assert data.td * data.itd == 1
    assert data.td.constant_term() == 1 and data.itd.constant_term() == 1


# -- transport ---------------------------------------------------------------------


@pytest.mark.parametrize("desc", [K21, K22, K31])
def test_transport_of_generator(desc):
    p, q = desc.p, desc.p**desc.n
    (x,) = line_bundle_classes(desc, ["x"], q)
    S, (xb,) = chow_gens(x)
    expect = xb - S.coeff_gen(desc.vgen) * xb**q / p
    assert ch_transport(x) == PolynomialClass(expect, None, q)
    assert ch_component(x, 1) == PolynomialClass(xb, None, q)
    assert ch_component(x, 0).is_zero()
    assert ch_component(x, q) == PolynomialClass(-S.coeff_gen(desc.vgen) * xb**q / p, None, q)


def test_transport_constant_and_square():
    (x,) = line_bundle_classes(K21, ["x"], 2)
    one = x * 0 + 1
    assert ch_transport(one) == PolynomialClass(one.series, None, 2)
    S, (xb,) = chow_gens(x)
    assert ch_transport(x * x) == PolynomialClass(xb**2, None, 2)


def test_transport_is_ring_homomorphism():
    rng = random.Random(3)
    for _ in range(5):
        a = random_line_bundle_class(rng, K22, ["x", "y"], 5)
        b = random_line_bundle_class(rng, K22, ["x", "y"], 5)
        assert ch_transport(a * b) == ch_transport(a) * ch_transport(b)
        assert ch_transport(a + b) == ch_transport(a) + ch_transport(b)


def test_transport_of_fgl_sum():
    # c_1(L (x) M) = F(x, y) is sent to phi(x_bar + y_bar)
    dim = 5
    x, y = line_bundle_classes(K21, ["x", "y"], dim)
    F = theory(K21, order=dim + 1).fgl
    s = PolynomialClass(F(x.series, y.series), K21, dim)
    S, (xb, yb) = chow_gens(x)
    phi = phi_morphism(2, 1, dim + 1)
    assert ch_transport(s) == PolynomialClass(phi.substitute({"t": xb + yb}), None, dim)


# -- the operation c ------------------------------------------------------------------


@pytest.mark.parametrize("desc", [K21, K22, K31])
def test_c_kills_line_bundles(desc):
    q = desc.p**desc.n
    x, y = line_bundle_classes(desc, ["x", "y"], q + 1)
    assert operation_c(x).is_zero()
    F = theory(desc, order=q + 2).fgl
    s = PolynomialClass(F(x.series, y.series), desc, q + 1)
    assert operation_c(s).is_zero()
    assert operation_c(x * 0).is_zero()


def test_c_graded_variant_on_line_bundle():
    (x,) = line_bundle_classes(K21, ["x"], 3)
    assert operation_c(x, graded=True).is_zero()


@pytest.mark.parametrize("desc", [K21, K22])
def test_c_deviation_identity(desc):
    p, q = desc.p, desc.p**desc.n
    rng = random.Random(5)

    def ch1(alpha):
        return ch_transport(alpha).specialize({desc.vgen: 1}).series.homogeneous_part(1)

    for _ in range(6):
        a = random_line_bundle_class(rng, desc, ["x", "y"], q + 1)
        b = random_line_bundle_class(rng, desc, ["x", "y"], q + 1)
        lhs = operation_c(a + b) - operation_c(a) - operation_c(b)
        rhs = ((ch1(a) + ch1(b)) ** q - ch1(a) ** q - ch1(b) ** q) / p
        assert lhs.series == rhs


@pytest.mark.parametrize("desc", [K21, K22, K31])
def test_integrality_random(desc):
    q = desc.p**desc.n
    rng = random.Random(17)
    for _ in range(5):
        a = random_line_bundle_class(rng, desc, ["x", "y", "z"], q + 1)
        for key, (ok, witness) in integrality_report(a).items():
            assert ok, (key, witness)


def test_ch_additive_below_q():
    rng = random.Random(2)
    q = 4
    for _ in range(4):
        a = random_line_bundle_class(rng, K22, ["x", "y"], q + 1)
        b = random_line_bundle_class(rng, K22, ["x", "y"], q + 1)
        for i in range(q):
            assert ch_component(a + b, i) == ch_component(a, i) + ch_component(b, i)


# -- Witt homomorphism --------------------------------------------------------------


def test_witt_image_zero():
    (x,) = line_bundle_classes(K21, ["x"], 3)
    img = witt_hom_C(x * 0)
    assert all(c.is_zero() for c in img)
    assert len(img) == 2


def test_witt_additivity_worked_example():
    # p=2, n=1: coordinate 2 of C(x) +_W C(y) is -c(x) - c(y) - x_bar*y_bar
    x, y = line_bundle_classes(K21, ["x", "y"], 3)
    s = witt_hom_C(x) + witt_hom_C(y)
    xb, yb = SeriesRing(("x", "y"), 4).gens
    assert s[1] == -operation_c(x).series - operation_c(y).series - xb * yb
    assert s[1] == witt_hom_C(x + y)[1]
    assert s[0] == xb + yb


@pytest.mark.parametrize("desc", [K21, K22])
@pytest.mark.parametrize("graded", [False, True])
def test_witt_additivity_random(desc, graded):
    q = desc.p**desc.n
    rng = random.Random(23)
    for _ in range(5):
        a = random_line_bundle_class(rng, desc, ["x", "y"], q + 1)
        b = random_line_bundle_class(rng, desc, ["x", "y"], q + 1)
        assert witt_hom_C(a + b, graded) == witt_hom_C(a, graded) + witt_hom_C(b, graded)


def test_c_requires_morava():
    (x,) = line_bundle_classes(TheoryDescriptor("k0"), ["x"], 3)
    with pytest.raises(ValueError):
        operation_c(x)


def test_c_integral_on_products():
    x, y = line_bundle_classes(K21, ["x", "y"], 4)
    ok, _ = p_local_check(operation_c(x * y).series, 2)
    assert ok
    xb, yb = SeriesRing(("x", "y"), 5).gens
    assert operation_c(x * y).series == xb * yb

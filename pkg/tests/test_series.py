import json
import random
from fractions import Fraction

import pytest
import sympy

from conftest import random_series
from morava_kit.series import (
    CoefficientRing,
    InexactDivisionError,
    SeriesRing,
    TruncatedSeries,
    divide_exact,
    p_local_check,
)


def to_sympy(s, syms):
    out = 0
    for xe, ce, c in s.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for v, e in zip(s.vars, xe):
            term *= syms[v] ** e
        for g, e in zip(s.ring.gens, ce):
            term *= syms[g] ** e
        out += term
    return sympy.expand(out)


def sympy_truncate(expr, vars, order):
    poly = sympy.Poly(sympy.expand(expr), *vars)
    out = 0
    for mon, c in poly.terms():
        if sum(mon) < order:
            term = c
            for v, e in zip(vars, mon):
                term *= v**e
            out += term
    return sympy.expand(out)


# -- basic arithmetic ---------------------------------------------------------


def test_products():
    S = SeriesRing(("t",), 4)
    t = S.var("t")
    assert t * t == t**2
    assert (t + t**2 / 2) * (t - t**2 / 2) == t**2
    XY = SeriesRing(("x", "y"), 5)
    x, y = XY.gens
    assert (x + y) * (x - y) == x**2 - y**2


def test_truncation_order_is_min():
    a = SeriesRing(("t",), 6).var("t")
    b = SeriesRing(("t",), 4).var("t")
    assert (a * b).order == 4
    assert (a + b).order == 4


def test_variable_mismatch():
    a = SeriesRing(("t",), 4).var("t")
    b = SeriesRing(("s",), 4).var("s")
    with pytest.raises(ValueError):
        a + b


def test_zero_terms_never_stored():
    S = SeriesRing(("t",), 4)
    t = S.var("t")
    assert (t - t).is_zero()
    assert (t - t)._terms == {}


@pytest.mark.parametrize("seed", range(6))
def test_ring_axioms_random(seed, graded_ring):
    rng = random.Random(seed)
    S = SeriesRing(("x", "y"), 7, graded_ring)
    a, b, c = (random_series(rng, S, density=0.3) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)


@pytest.mark.parametrize("seed", range(4))
def test_product_matches_sympy(seed):
    rng = random.Random(100 + seed)
    S = SeriesRing(("x", "y"), 6)
    a = random_series(rng, S, density=0.4)
    b = random_series(rng, S, density=0.4)
    x, y = sympy.symbols("x y")
    syms = {"x": x, "y": y}
    expect = sympy_truncate(to_sympy(a, syms) * to_sympy(b, syms), (x, y), 6)
    assert to_sympy(a * b, syms) == expect


# -- substitution ---------------------------------------------------------------


def test_substitute_zero():
    S = SeriesRing(("t",), 6)
    t = S.var("t")
    log = t + t**2 / 2 + t**3 / 3
    assert log.substitute({"t": S.zero}).is_zero()


def test_substitute_additive_law():
    T = SeriesRing(("t",), 5)
    XY = SeriesRing(("x", "y"), 5)
    x, y = XY.gens
    ident = T.var("t")
    assert ident.substitute({"t": ident.substitute({"t": x}) + ident.substitute({"t": y})}) == x + y


def test_substitute_hand_expansion():
    # (t+t^2) - (t+t^2)^2 + 2(t+t^2)^3 = t + 0*t^2 + 0*t^3 mod t^4
    S = SeriesRing(("t",), 4)
    t = S.var("t")
    f = t - t**2 + 2 * t**3
    assert f.substitute({"t": t + t**2}) == t


def test_substitute_rejects_constant_term():
    S = SeriesRing(("t",), 4)
    t = S.var("t")
    with pytest.raises(ValueError, match="constant term"):
        t.substitute({"t": 1 + t})


@pytest.mark.parametrize("seed", range(3))
def test_substitute_matches_sympy(seed):
    rng = random.Random(seed)
    S = SeriesRing(("x", "y"), 6)
    x, y = sympy.symbols("x y")
    syms = {"x": x, "y": y}
    f = random_series(rng, S, density=0.4)
    a = random_series(rng, S, density=0.3, constant=0)
    b = random_series(rng, S, density=0.3, constant=0)
    a = a - a.constant_term()
    b = b - b.constant_term()
    got = f.substitute({"x": a, "y": b})
    expect = to_sympy(f, syms).subs({x: to_sympy(a, syms), y: to_sympy(b, syms)}, simultaneous=True)
    assert to_sympy(got, syms) == sympy_truncate(expect, (x, y), 6)


# -- reversion ---------------------------------------------------------------------


def test_reversion_identity():
    t = SeriesRing(("t",), 8).var("t")
    assert t.reversion() == t


def test_reversion_known():
    S = SeriesRing(("t",), 5)
    t = S.var("t")
    g = (t + t**2 / 2).reversion()
    assert g == t - t**2 / 2 + t**3 / 2 - Fraction(5, 8) * t**4


def test_reversion_rejects_bad_leading_coefficient():
    t = SeriesRing(("t",), 5).var("t")
    with pytest.raises(ValueError):
        (2 * t).reversion()


@pytest.mark.parametrize("seed", range(5))
def test_reversion_round_trip(seed, graded_ring):
    rng = random.Random(seed)
    S = SeriesRing(("t",), 10, graded_ring)
    t = S.var("t")
    f = random_series(rng, S, density=0.6)
    f = f - f.constant_term() - f.homogeneous_part(1) + t
    g = f.reversion()
    assert f.substitute({"t": g}) == t
    assert g.substitute({"t": f}) == t
    assert g.reversion() == f


# -- division -------------------------------------------------------------------


def test_divide_trivial():
    S = SeriesRing(("t",), 6)
    t = S.var("t")
    assert divide_exact(t, t) == S.one
    q = divide_exact(t, t - t**2 / 2)
    assert q == 1 + t / 2 + t**2 / 4 + t**3 / 8 + t**4 / 16
    assert q.order == 5
    assert q * (t - t**2 / 2) == t


def test_divide_two_variables():
    S = SeriesRing(("x", "y"), 6)
    x, y = S.gens
    assert (x**2 - y**2) / (x + y) == x - y


@pytest.mark.parametrize("seed", range(5))
def test_divide_random_units(seed, graded_ring):
    rng = random.Random(seed)
    S = SeriesRing(("x", "y"), 7, graded_ring)
    a = random_series(rng, S, density=0.4)
    b = random_series(rng, S, density=0.4, constant=Fraction(rng.randint(1, 4), rng.randint(1, 4)))
    assert divide_exact(a * b, b) == a


def test_divide_by_laurent_coefficient(graded_ring):
    S = SeriesRing(("x",), 5, graded_ring)
    x = S.var("x")
    v1 = S.coeff_gen("v1")
    assert divide_exact(x, v1 * x) * v1 == S.one
    with pytest.raises(InexactDivisionError):
        divide_exact(x, S.coeff_gen("v2") * x)


def test_inexact_division_reports_monomial():
    S = SeriesRing(("x", "y"), 6)
    x, y = S.gens
    with pytest.raises(InexactDivisionError) as err:
        divide_exact(x**2 + y**2, x + y)
    assert err.value.monomial == (0, 2)
    with pytest.raises(InexactDivisionError) as err:
        divide_exact(x, x**2)
    assert err.value.monomial == (1, 0)


# -- p-locality ---------------------------------------------------------------------


def test_p_local_check():
    assert p_local_check(Fraction(3, 2), 3) == (True, None)
    ok, w = p_local_check(Fraction(1, 2), 2)
    assert not ok and w[1] == Fraction(1, 2)
    R = CoefficientRing(("v1",), p=2)
    ok, w = p_local_check(R.gen("v1") / 4, 2)
    assert not ok and w == ((1,), Fraction(1, 4))


# -- grading ---------------------------------------------------------------------------


def test_grading_preserved(graded_ring):
    S = SeriesRing(("x", "y"), 9, graded_ring)
    x, y = S.gens
    v1 = S.coeff_gen("v1")
    v2 = S.coeff_gen("v2")
    assert graded_ring.degrees == (-1, -3)
    a = x + v1 * x * y + v2 * x**2 * y**2
    b = y - v1**2 * y**3 + v2 * v1 * x**5
    for s in (a, b, a * b, a + b, a.substitute({"x": b, "y": a})):
        assert s.is_homogeneous()
    assert (a * b).degree() == 2
    T = SeriesRing(("t",), 9, graded_ring)
    t = T.var("t")
    f = t + T.coeff_gen("v1") * t**2 / 2 + T.coeff_gen("v2") * t**4 / 2
    assert f.reversion().degree() == 1
    assert divide_exact(t, f).degree() == 0


# -- serialisation ---------------------------------------------------------------------


def test_json_round_trip(graded_ring):
    S = SeriesRing(("x", "y"), 6, graded_ring)
    x, y = S.gens
    s = x - S.coeff_gen("v1") * x * y / 3 + y**3
    text = s.to_json()
    assert TruncatedSeries.from_json(text, graded_ring) == s
    assert s.to_json() == text
    data = json.loads(text)
    assert [t["exp"] for t in data["terms"]] == [[1, 0], [1, 1], [0, 3]]
    assert data["terms"][1]["coeff"] == {"monomial": [1, 0], "num": "-1", "den": "3"}

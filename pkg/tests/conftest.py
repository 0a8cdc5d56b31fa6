import random
from fractions import Fraction

import pytest

from morava_kit.series import CoefficientRing, SeriesRing


def random_series(rng, S, density=0.5, max_deg=None, constant=None, height=5):
    """Random element of the series ring ``S`` with small rational coefficients."""
    from itertools import product

    nv = len(S.vars)
    top = S.order if max_deg is None else min(max_deg + 1, S.order)
    terms = {}
    for exp in product(range(top), repeat=nv):
        if sum(exp) >= top or rng.random() > density:
            continue
        c = Fraction(rng.randint(-height, height), rng.randint(1, 3))
        coeff = S.ring(c)
        if S.ring.gens and rng.random() < 0.5:
            g = rng.choice(S.ring.gens)
            coeff = coeff * S.ring.gen(g, rng.randint(0, 2))
        terms[exp] = coeff
    if constant is not None:
        terms[(0,) * nv] = S.ring(constant)
    return S(terms)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def graded_ring():
    return CoefficientRing(("v1", "v2"), p=2, laurent=("v1",))


@pytest.fixture
def t_ring():
    return SeriesRing(("t",), 8)

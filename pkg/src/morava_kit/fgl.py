"""Formal group laws of the theories in play.

Supported kinds:

========================  =========================================  ==================
kind                      coefficient ring                          law
========================  =========================================  ==================
``chow``                  ``Z``                                      ``x + y``
``k0``                    ``Z[v1, v1^-1]``, ``deg v1 = -1``          ``x + y - v1 x y``
``morava`` (p, n)         ``Z_(p)[v_n, v_n^-1]``                     Lubin-Tate
``connective_morava``     ``Z_(p)[v_n]``                             Lubin-Tate
``bp`` (p)                ``Z_(p)[v_1, ..., v_k]``                   Brown-Peterson
========================  =========================================  ==================

Every law except the additive and multiplicative ones is produced from its
logarithm as ``F(x, y) = e(l(x) + l(y))`` with ``e`` the compositional
inverse of ``l``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

from .series import (
    CoefficientElement,
    CoefficientRing,
    SeriesRing,
    TruncatedSeries,
    is_prime,
)

__all__ = [
    "TheoryDescriptor",
    "Theory",
    "FormalGroupLaw",
    "FGLReport",
    "theory",
    "bp_logarithm",
    "morava_logarithm",
    "morava_fgl",
    "phi_morphism",
    "lubin_tate_mod_I",
    "reduce_mod_I",
    "formal_inverse",
    "check_fgl_axioms",
    "additive_fgl",
    "multiplicative_fgl",
]

KINDS = ("chow", "k0", "morava", "connective_morava", "bp")


@dataclass(frozen=True)
class TheoryDescriptor:
    """Which theory: ``kind`` plus ``p``/``n`` where they make sense."""

    kind: str
    p: int | None = None
    n: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown theory kind {self.kind!r}; expected one of {KINDS}")
        needs_p = self.kind in ("morava", "connective_morava", "bp")
        needs_n = self.kind in ("morava", "connective_morava")
        if needs_p and (self.p is None or not is_prime(self.p)):
            raise ValueError(f"{self.kind} needs a prime p, got {self.p}")
        if needs_n and (self.n is None or self.n < 1):
            raise ValueError(f"{self.kind} needs n >= 1, got {self.n}")
        if not needs_p and self.p is not None:
            raise ValueError(f"{self.kind} takes no prime")
        if not needs_n and self.n is not None:
            raise ValueError(f"{self.kind} takes no height")

    @property
    def label(self) -> str:
        if self.kind == "chow":
            return "CH"
        if self.kind == "k0":
            return "K0"
        if self.kind == "bp":
            return f"BP(p={self.p})"
        prefix = "K" if self.kind == "morava" else "CK"
        return f"{prefix}({self.n}), p={self.p}"

    @property
    def vgen(self) -> str | None:
        """Name of the distinguished periodicity generator, if any."""
        if self.kind == "k0":
            return "v1"
        if self.kind in ("morava", "connective_morava"):
            return f"v{self.n}"
        return None

    def coefficient_ring(self, order: int | None = None) -> CoefficientRing:
        if self.kind == "chow":
            return CoefficientRing()
        if self.kind == "k0":
            return CoefficientRing(("v1",), degrees=(-1,), laurent=("v1",))
        if self.kind in ("morava", "connective_morava"):
            g = self.vgen
            laurent = (g,) if self.kind == "morava" else ()
            return CoefficientRing((g,), laurent=laurent, p=self.p, p_local=True)
        return _bp_ring(self.p, order if order is not None else 2)


def _bp_ring(p: int, order: int) -> CoefficientRing:
    # v_j can only appear in front of t^(p^j), so stop at the first p^(k+1) >= order
    k = 1
    while p ** (k + 1) < order:
        k += 1
    return CoefficientRing(tuple(f"v{j}" for j in range(1, k + 1)), p=p, p_local=True)


# ---------------------------------------------------------------------------
# formal group laws
# ---------------------------------------------------------------------------


class FormalGroupLaw:
    """A two-variable series ``F(x, y)`` with optional logarithm ``l(t)``."""

    def __init__(self, F: TruncatedSeries, logarithm: TruncatedSeries | None = None, label: str = ""):
        if F.vars != ("x", "y"):
            raise ValueError(f"a formal group law is a series in (x, y), got {F.vars}")
        self.F = F
        self.logarithm = logarithm
        self.label = label

    def __repr__(self):
        return f"FormalGroupLaw({self.label or '?'}: {self.F})"

    @property
    def ring(self) -> CoefficientRing:
        return self.F.ring

    @property
    def order(self) -> int:
        return self.F.order

    def __call__(self, a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
        """Formal sum ``F(a, b)`` of two series with zero constant terms."""
        return self.F.substitute({"x": a, "y": b})

    def exponential(self) -> TruncatedSeries | None:
        return None if self.logarithm is None else self.logarithm.reversion()

    def inverse(self) -> TruncatedSeries:
        return formal_inverse(self)


def law_from_logarithm(log: TruncatedSeries, label: str = "") -> FormalGroupLaw:
    """``F = e(l(x) + l(y))`` for a univariate logarithm ``l(t) = t + ...``."""
    exp = log.reversion()
    S = SeriesRing(("x", "y"), log.order, log.ring)
    x, y = S.gens
    s = log.substitute({"t": x}) + log.substitute({"t": y})
    return FormalGroupLaw(exp.substitute({"t": s}), log, label)


def additive_fgl(order: int) -> FormalGroupLaw:
    S = SeriesRing(("x", "y"), order)
    x, y = S.gens
    return FormalGroupLaw(x + y, SeriesRing(("t",), order).var("t"), "CH")


def multiplicative_fgl(order: int, ring: CoefficientRing | None = None, gen: str = "v1") -> FormalGroupLaw:
    """``x + y - v x y`` with logarithm ``sum v^(k-1) t^k / k``."""
    ring = ring or CoefficientRing((gen,), degrees=(-1,), laurent=(gen,))
    S = SeriesRing(("x", "y"), order, ring)
    x, y = S.gens
    v = S.coeff_gen(gen)
    T = SeriesRing(("t",), order, ring)
    log = T({(k,): ring.gen(gen, k - 1) * Fraction(1, k) for k in range(1, order)})
    return FormalGroupLaw(x + y - v * x * y, log, "K0")


def bp_logarithm(p: int, order: int) -> TruncatedSeries:
    """``l(t) = sum m_i t^(p^i)`` with ``m_0 = 1`` and the Hazewinkel-type recursion."""
    if order < 2:
        raise ValueError("order must be at least 2")
    ring = _bp_ring(p, order)
    m = [ring.one()]
    j = 1
    while p**j < order:
        acc = ring.gen(f"v{j}")
        for i in range(1, j):
            acc = acc + m[i] * ring.gen(f"v{j - i}", p**i)
        m.append(acc * Fraction(1, p))
        j += 1
    T = SeriesRing(("t",), order, ring)
    return T({(p**i,): mi for i, mi in enumerate(m)})


def morava_logarithm(p: int, n: int, order: int, connective: bool = False, vn: object = None) -> TruncatedSeries:
    """BP logarithm with ``v_j -> 0`` for ``j != n``, over the Morava ring.

    ``vn`` optionally specialises ``v_n`` to a number (``vn=1`` gives the
    ungraded logarithm ``x + x^(p^n)/p + ...``).
    """
    bp = bp_logarithm(p, order)
    desc = TheoryDescriptor("connective_morava" if connective else "morava", p, n)
    ring = desc.coefficient_ring()
    kill = {g: 0 for g in bp.ring.gens if g != f"v{n}"}
    log = bp.specialize(kill).with_ring(ring)
    if vn is not None:
        log = log.specialize({f"v{n}": vn})
    return log


def morava_fgl(p: int, n: int, order: int, connective: bool = False) -> FormalGroupLaw:
    desc = TheoryDescriptor("connective_morava" if connective else "morava", p, n)
    return law_from_logarithm(morava_logarithm(p, n, order, connective), desc.label)


def phi_morphism(p: int, n: int, order: int) -> TruncatedSeries:
    """``phi(t) = e(t)`` for the Morava logarithm: the morphism from the additive law."""
    return morava_logarithm(p, n, order).reversion()


def formal_inverse(F: FormalGroupLaw) -> TruncatedSeries:
    """``i(t)`` with ``F(t, i(t)) = 0``, found by Newton iteration on ``F``."""
    N = F.order
    T = SeriesRing(("t",), N, F.ring)
    t = T.var("t")
    inv = -t
    Fy = F.F.derivative("y")
    prec = 2  # inv is correct modulo t^prec
    while prec < N:
        prec = min(2 * prec, N)
        resid = F(t, inv)
        slope = Fy.substitute({"x": t, "y": inv})  # a unit, known mod t^(N-1)
        # resid has valuation >= 2, so resid / slope is still known mod t^N
        corr = resid * _pad(slope.inverse(), N)
        inv = (inv - corr).truncate(prec)
        inv = TruncatedSeries._raw(inv.vars, inv.ring, N, inv._terms)
    return inv


def _pad(s: TruncatedSeries, order: int) -> TruncatedSeries:
    return TruncatedSeries._raw(s.vars, s.ring, order, s._terms)


# ---------------------------------------------------------------------------
# axioms and the mod-I comparison
# ---------------------------------------------------------------------------


@dataclass
class FGLReport:
    """Residuals of the formal group law axioms (all zero when the law is valid)."""

    label: str
    order: int
    residuals: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.is_zero() for r in self.residuals.values())

    @property
    def failures(self) -> list:
        return [k for k, r in self.residuals.items() if not r.is_zero()]

    def lines(self):
        for k, r in self.residuals.items():
            status = "ok" if r.is_zero() else f"FAIL residual {r}"
            yield f"{k}: {status}"


def check_fgl_axioms(F: FormalGroupLaw | TruncatedSeries, order: int | None = None) -> FGLReport:
    if isinstance(F, TruncatedSeries):
        F = FormalGroupLaw(F)
    N = min(order, F.order) if order is not None else F.order
    law = F.F.truncate(N)
    ring = law.ring
    X = SeriesRing(("x",), N, ring)
    Y = SeriesRing(("y",), N, ring)
    XY = SeriesRing(("x", "y"), N, ring)
    XYZ = SeriesRing(("x", "y", "z"), N, ring)
    x1 = X.var("x")
    y1 = Y.var("y")
    x, y = XY.gens
    a, b, c = XYZ.gens
    res = {}
    res["unit_left"] = law.substitute({"x": x1, "y": X.zero}) - x1
    res["unit_right"] = law.substitute({"x": Y.zero, "y": y1}) - y1
    res["commutativity"] = law - law.substitute({"x": y, "y": x})
    ab = law.substitute({"x": a, "y": b})
    bc = law.substitute({"x": b, "y": c})
    res["associativity"] = law.substitute({"x": ab, "y": c}) - law.substitute({"x": a, "y": bc})
    return FGLReport(F.label, N, res)


def lubin_tate_mod_I(p: int, n: int) -> TruncatedSeries:
    """``x + y - v_n sum_{i=1}^{p-1} C(p,i)/p x^(i p^(n-1)) y^((p-i) p^(n-1))``.

    Returned as an integral polynomial over ``Z_(p)[v_n^{+-1}]``; it is only
    meaningful modulo ``(p, x^(p^n), y^(p^n))``.
    """
    desc = TheoryDescriptor("morava", p, n)
    ring = desc.coefficient_ring()
    q = p ** (n - 1)
    S = SeriesRing(("x", "y"), 2 * p**n - 1, ring)
    x, y = S.gens
    out = x + y
    for i in range(1, p):
        out = out - S.coeff_gen(desc.vgen) * (comb(p, i) // p) * x ** (i * q) * y ** ((p - i) * q)
    return out


def reduce_mod_I(F: TruncatedSeries | FormalGroupLaw, p: int, n: int) -> dict:
    """Image modulo ``I = (p, x^(p^n), y^(p^n))`` as ``{(xexp, cexp): residue}``.

    Residues are integers in ``[0, p)``; zero residues are dropped.  Raises
    ``ValueError`` on a coefficient whose denominator is divisible by ``p``.
    """
    if isinstance(F, FormalGroupLaw):
        F = F.F
    bound = p**n
    if F.order < 2 * bound - 1:
        raise ValueError(f"order {F.order} too small to see all monomials below x^{bound}, y^{bound}")
    out = {}
    for xe, ce, c in F.items():
        if max(xe) >= bound:
            continue
        if c.denominator % p == 0:
            raise ValueError(f"coefficient {c} at {xe} is not {p}-integral")
        r = c.numerator * pow(c.denominator, -1, p) % p
        if r:
            out[(xe, ce)] = r
    return out


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------


class Theory:
    """Registry entry: formal group law, phi and coefficient ring of one theory.

    Objects are cached per ``(descriptor, order)``; use :func:`theory`.
    """

    def __init__(self, desc: TheoryDescriptor, order: int):
        if order < 2:
            raise ValueError("order must be at least 2")
        self.desc = desc
        self.order = order
        self._fgl = None
        self._inv = None
        self._phi = None

    def __repr__(self):
        return f"Theory({self.desc.label}, order={self.order})"

    @property
    def kind(self):
        return self.desc.kind

    @property
    def ring(self) -> CoefficientRing:
        return self.desc.coefficient_ring(self.order)

    @property
    def fgl(self) -> FormalGroupLaw:
        if self._fgl is None:
            d = self.desc
            if d.kind == "chow":
                self._fgl = additive_fgl(self.order)
            elif d.kind == "k0":
                self._fgl = multiplicative_fgl(self.order)
            elif d.kind == "bp":
                self._fgl = law_from_logarithm(bp_logarithm(d.p, self.order), d.label)
            else:
                self._fgl = morava_fgl(d.p, d.n, self.order, d.kind == "connective_morava")
        return self._fgl

    @property
    def logarithm(self) -> TruncatedSeries:
        return self.fgl.logarithm

    @property
    def phi(self) -> TruncatedSeries:
        """Morphism from the additive law: the exponential of the logarithm."""
        if self._phi is None:
            self._phi = self.logarithm.reversion()
        return self._phi

    @property
    def inverse(self) -> TruncatedSeries:
        if self._inv is None:
            if self.kind == "chow":
                self._inv = -SeriesRing(("t",), self.order).var("t")
            else:
                self._inv = formal_inverse(self.fgl)
        return self._inv

    def vgen(self) -> CoefficientElement | None:
        g = self.desc.vgen
        return None if g is None else self.ring.gen(g)

    def euler_characteristic_unit(self, dim: int) -> CoefficientElement | None:
        """``v^dim`` for the periodic theories (Euler characteristic of a cellular variety)."""
        g = self.desc.vgen
        return None if g is None else self.ring.gen(g, dim)


@lru_cache(maxsize=64)
def _theory_cached(desc: TheoryDescriptor, order: int) -> Theory:
    return Theory(desc, order)


def theory(kind: str | TheoryDescriptor, p: int | None = None, n: int | None = None, order: int = 12) -> Theory:
    """Registry lookup, e.g. ``theory("morava", 2, 1, order=10)``."""
    desc = kind if isinstance(kind, TheoryDescriptor) else TheoryDescriptor(kind, p, n)
    return _theory_cached(desc, order)

"""Riemann-Roch transport from a Morava-type theory to rational Chow groups.

A morphism of formal group laws ``phi`` from the additive law gives the
Chern character ``ch``: on a first Chern class it is ``ch(x) = phi(x_bar)``
with ``x_bar`` the Chow first Chern class of the same line bundle, and it is
multiplicative.  ``ch_i`` is the part of Chow codimension ``i``, i.e. of
degree ``i`` in the Chow generators (``v_n`` carries no codimension).

For height ``n`` at ``p`` with ``q = p^n`` the operation

    c(alpha) = ch_q(alpha) + (1/p) ch_1(alpha)^q

is integral, and ``(ch_1, ..., ch_{q-1}, -c)`` is additive for the Witt
addition of the Morava logarithm.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .fgl import TheoryDescriptor, theory
from .series import SeriesRing, TruncatedSeries, divide_exact, p_local_check
from .witt import GhostData, WittVector, morava_ghost

__all__ = [
    "ToddData",
    "PolynomialClass",
    "WittImage",
    "todd_classes",
    "line_bundle_classes",
    "random_line_bundle_class",
    "ch_transport",
    "ch_component",
    "operation_c",
    "witt_hom_C",
    "integrality_report",
]


@dataclass(frozen=True)
class ToddData:
    phi: TruncatedSeries
    td: TruncatedSeries
    itd: TruncatedSeries


def todd_classes(phi: TruncatedSeries) -> ToddData:
    """``td = t / phi(t)`` and ``itd = phi(t) / t``."""
    if phi.vars != ("t",):
        raise ValueError("phi must be a series in t")
    t = SeriesRing(("t",), phi.order, phi.ring).var("t")
    return ToddData(phi, divide_exact(t, phi), divide_exact(phi, t))


class PolynomialClass:
    """A polynomial in first Chern classes of line bundles on a ``dim``-fold.

    ``theory`` is the descriptor of the theory the generators live in; the
    Chow side of the transport uses ``theory=None`` while keeping ``v_n`` in
    the coefficient ring.
    """

    def __init__(self, series: TruncatedSeries, theory: TheoryDescriptor | None, dim: int):
        if series.order > dim + 1:
            series = series.truncate(dim + 1)
        elif series.order < dim + 1:
            raise ValueError(f"class known only below degree {series.order}, variety has dimension {dim}")
        self.series = series
        self.theory = theory
        self.dim = dim

    @property
    def generators(self):
        return self.series.vars

    @property
    def side(self) -> str:
        return "chow" if self.theory is None else self.theory.label

    def _check(self, other):
        if not isinstance(other, PolynomialClass):
            return PolynomialClass(self.series.one() * other, self.theory, self.dim)
        if other.theory != self.theory or other.dim != self.dim:
            raise ValueError("classes in different theories or on different varieties")
        return other

    def __add__(self, other):
        return PolynomialClass(self.series + self._check(other).series, self.theory, self.dim)

    __radd__ = __add__

    def __sub__(self, other):
        return PolynomialClass(self.series - self._check(other).series, self.theory, self.dim)

    def __neg__(self):
        return PolynomialClass(-self.series, self.theory, self.dim)

    def __mul__(self, other):
        return PolynomialClass(self.series * self._check(other).series, self.theory, self.dim)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return PolynomialClass(self.series**k, self.theory, self.dim)

    def __truediv__(self, c):
        return PolynomialClass(self.series / c, self.theory, self.dim)

    def __eq__(self, other):
        if isinstance(other, PolynomialClass):
            return self.theory == other.theory and self.series == other.series
        return self.series == other

    __hash__ = None

    def is_zero(self) -> bool:
        return self.series.is_zero()

    def specialize(self, values) -> "PolynomialClass":
        return PolynomialClass(self.series.specialize(values), self.theory, self.dim)

    def __repr__(self):
        return f"PolynomialClass[{self.side}, dim {self.dim}]({self.series})"

    def __str__(self):
        return str(self.series).rsplit(" + O(", 1)[0]


def line_bundle_classes(desc: TheoryDescriptor, names: Sequence[str], dim: int):
    """Generators ``c_1(L_i)`` as :class:`PolynomialClass` objects."""
    ring = desc.coefficient_ring()
    S = SeriesRing(tuple(names), dim + 1, ring)
    return tuple(PolynomialClass(g, desc, dim) for g in S.gens)


def random_line_bundle_class(rng, desc: TheoryDescriptor, names: Sequence[str], dim: int, terms: int = 4, vpow: int = 2):
    """Random ``Z``-combination of monomials in line-bundle classes (times powers of ``v_n``)."""
    S = SeriesRing(tuple(names), dim + 1, desc.coefficient_ring())
    total = S.zero
    for _ in range(terms):
        mono = S.one * rng.randint(-3, 3)
        for g in S.gens:
            mono = mono * g ** rng.randint(0, dim // len(names) + 1)
        if desc.vgen is not None and vpow:
            mono = mono * S.coeff_gen(desc.vgen, rng.randint(0, vpow))
        total = total + mono
    return PolynomialClass(total, desc, dim)


# ---------------------------------------------------------------------------
# transport
# ---------------------------------------------------------------------------


def _phi_for(desc: TheoryDescriptor, order: int) -> TruncatedSeries:
    return theory(desc, order=max(order, 2)).phi


def ch_transport(alpha: PolynomialClass) -> PolynomialClass:
    """``ch(alpha)``: substitute ``phi(x_bar)`` for every generator ``x``."""
    if alpha.theory is None:
        raise ValueError("class is already on the Chow side")
    N = alpha.dim + 1
    phi = _phi_for(alpha.theory, N)
    S = SeriesRing(alpha.generators, N, alpha.series.ring)
    images = {g: phi.substitute({"t": S.var(g)}) for g in alpha.generators}
    return PolynomialClass(alpha.series.substitute(images), None, alpha.dim)


def ch_component(alpha: PolynomialClass, i: int) -> PolynomialClass:
    """Codimension-``i`` part of ``ch(alpha)`` (degree ``i`` in the Chow generators)."""
    ch = ch_transport(alpha) if alpha.theory is not None else alpha
    return PolynomialClass(ch.series.homogeneous_part(i), None, alpha.dim)


def _q(desc: TheoryDescriptor) -> tuple:
    if desc is None or desc.kind not in ("morava", "connective_morava"):
        raise ValueError("the operation c is defined for Morava theories")
    return desc.p, desc.p**desc.n


def _chow_side(alpha: PolynomialClass, graded: bool) -> PolynomialClass:
    ch = ch_transport(alpha)
    if graded:
        return ch
    return ch.specialize({alpha.theory.vgen: 1})


def operation_c(alpha: PolynomialClass, graded: bool = False) -> PolynomialClass:
    """``c(alpha) = ch_q(alpha) + (1/p) ch_1(alpha)^q``.

    By default ``v_n`` is sent to 1, which is the normalisation in which the
    first Chern class of a line bundle is killed.  With ``graded=True`` the
    generator is kept and the correction term is ``(v_n/p) ch_1^q``.
    """
    p, q = _q(alpha.theory)
    ch = _chow_side(alpha, graded)
    chq = ch.series.homogeneous_part(q)
    ch1 = ch.series.homogeneous_part(1)
    corr = ch1**q / p
    if graded:
        corr = corr * ch.series.ring.gen(alpha.theory.vgen)
    return PolynomialClass(chq + corr, None, alpha.dim)


class WittImage(WittVector):
    """``(ch_1, ..., ch_{q-1}, -c)`` as a Witt vector of length ``q``."""

    def __init__(self, coords, ghost: GhostData, source=None):
        super().__init__(coords, ghost)
        self.source = source


def _ghost_for(desc: TheoryDescriptor, graded: bool) -> GhostData:
    p, q = _q(desc)
    if graded:
        return morava_ghost(p, desc.n, q, vn=None)
    return morava_ghost(p, desc.n, q, vn=1)


def witt_hom_C(alpha: PolynomialClass, graded: bool = False) -> WittImage:
    p, q = _q(alpha.theory)
    ch = _chow_side(alpha, graded)
    coords = [ch.series.homogeneous_part(i) for i in range(1, q)]
    coords.append(-operation_c(alpha, graded).series)
    ghost = _ghost_for(alpha.theory, graded)
    if graded:
        # the ghost ring is Q[v_n^{+-1}]; make coordinates live over the same ring
        coords = [c.with_ring(c.ring.union(ghost.ring)) for c in coords]
    return WittImage(coords, ghost, alpha)


def integrality_report(alpha: PolynomialClass) -> dict:
    """``p_local_check`` of ``ch_1, ..., ch_{q-1}`` and ``c`` (with ``v_n -> 1``)."""
    p, q = _q(alpha.theory)
    ch = _chow_side(alpha, False)
    out = {}
    for i in range(1, q):
        out[f"ch{i}"] = p_local_check(ch.series.homogeneous_part(i), p)
    out["c"] = p_local_check(operation_c(alpha).series, p)
    return out

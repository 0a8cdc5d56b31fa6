"""Split even-dimensional quadrics through their torus fixed points.

``V`` is a ``2l``-dimensional split quadratic space with basis
``e_1..e_l, e_{-l}..e_{-1}`` (``q(e_i, e_{-i}) = 1``); the torus acts on
``e_i`` by ``chi_i`` and on ``e_{-i}`` by ``-chi_i``.  ``Q`` is the quadric of
isotropic lines, of dimension ``2l - 2``.

Fixed-point models:

* ``Q``: the lines ``<e_i>``, keyed by ``i``.
* ``OGr``: flags ``<e_i> < <e_i, e_j>`` with ``j != +-i``, keyed by ``(i, j)``.
* ``P(tau)``: a flag together with a line of its plane, keyed by
  ``((i, j), k)`` with ``k in (i, j)``.

``f: P(tau) -> Q x Q`` sends ``((i, j), k)`` to ``(i, k)`` and ``pi`` forgets
``k``.  Correspondences are classes on ``Q x Q`` and compose through the
localization formula over the middle factor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Sequence

from ._linalg import bareiss_det, inverse, series_matrix_inverse
from .fgl import TheoryDescriptor, theory as _theory
from .gkm import (
    EquivariantClass,
    FixedPointModel,
    TorusAlgebra,
    TruncationError,
    basis_char,
    char_add,
    char_neg,
    eq_pullback,
    eq_pushforward,
    integrate,
    product_model,
)
from .series import CoefficientElement, SeriesRing, p_local_check

__all__ = [
    "QuadricSpec",
    "NotAUnitError",
    "PairingError",
    "quadric_model",
    "ogr_model",
    "ptau_model",
    "square_model",
    "subquadric_model",
    "algebra",
    "f_map",
    "pi_map",
    "f_pushforward",
    "f_pushforward_generic",
    "diagonal_pushforward",
    "p1_pullback",
    "external_product",
    "neza_assemble",
    "neza_matrix",
    "ogr_basis",
    "compose",
    "diagonal",
    "euler_characteristic",
    "euler_char_projector",
    "invariant_subvariety_class",
    "quadric_basis",
    "BasisClass",
    "gram_matrix",
    "dual_basis",
    "TateDecomposition",
    "tate_decomposition",
    "verify_decomposition",
    "nonequivariant_gram",
    "brute_force_idempotents",
    "chern_character_coordinates",
    "integrality_on_basis",
    "grr_check",
]

CHOW = TheoryDescriptor("chow")


class NotAUnitError(ValueError):
    """The Euler characteristic is not invertible in the coefficient ring."""


class PairingError(ArithmeticError):
    """The intersection pairing on the chosen basis is not unimodular."""


def default_order(l: int) -> int:
    """Room for degree-``dim Q`` answers after two rounds of clearing denominators.

    Each localization sum over ``Q`` divides by up to ``l(l-1)`` positive
    characters and every division costs one order; the dual basis and a
    composition each do this once.
    """
    d = 2 * l - 2
    return max(2 * d + 2, d + 1 + 2 * l * (l - 1))


@dataclass(frozen=True)
class QuadricSpec:
    l: int
    theory: TheoryDescriptor = CHOW
    order: int | None = None

    def __post_init__(self):
        if self.l < 2:
            raise ValueError("l must be at least 2")
        if self.order is not None and self.order < 2:
            raise ValueError("order must be at least 2")

    @property
    def dim(self) -> int:
        return 2 * self.l - 2

    @property
    def truncation(self) -> int:
        return self.order if self.order is not None else default_order(self.l)

    def with_theory(self, desc: TheoryDescriptor) -> "QuadricSpec":
        return QuadricSpec(self.l, desc, self.order)


@lru_cache(maxsize=32)
def _algebra(desc: TheoryDescriptor, l: int, order: int) -> TorusAlgebra:
    return TorusAlgebra(_theory(desc, order=order), l, order)


def algebra(spec: QuadricSpec) -> TorusAlgebra:
    return _algebra(spec.theory, spec.l, spec.truncation)


# ---------------------------------------------------------------------------
# fixed-point models
# ---------------------------------------------------------------------------


def _wt(i: int, l: int):
    return basis_char(i, l)


def _indices(l: int) -> list:
    return list(range(1, l + 1)) + list(range(-l, 0))


def _rel(a: int, b: int, l: int):
    """Weight ``wt_a - wt_b`` (tangent direction from ``<e_b>`` towards ``<e_a>``)."""
    return char_add(_wt(a, l), char_neg(_wt(b, l)))


def _q_weights(i: int, l: int, skip=()) -> list:
    return [_rel(s * k, i, l) for k in range(1, l + 1) if k != abs(i) and k not in skip for s in (1, -1)]


@lru_cache(maxsize=16)
def quadric_model(l: int) -> FixedPointModel:
    pts = _indices(l)
    weights = {i: _q_weights(i, l) for i in pts}
    return FixedPointModel(pts, weights, 2 * l - 2, l, act=lambda w, x: w.act_index(x), name=f"Q{2 * l - 2}")


@lru_cache(maxsize=16)
def ogr_model(l: int) -> FixedPointModel:
    pts = [(i, j) for i in _indices(l) for j in _indices(l) if abs(j) != abs(i)]
    weights = {(i, j): _q_weights(i, l) + _q_weights(j, l, skip=(abs(i),)) for i, j in pts}
    act = lambda w, x: (w.act_index(x[0]), w.act_index(x[1]))  # noqa: E731
    return FixedPointModel(pts, weights, 4 * l - 6, l, act=act, name="OGr")


@lru_cache(maxsize=16)
def ptau_model(l: int) -> FixedPointModel:
    O = ogr_model(l)
    pts = [((i, j), k) for i, j in O.points for k in (i, j)]
    weights = {}
    for (i, j), k in pts:
        other = j if k == i else i
        weights[((i, j), k)] = list(O.weights[(i, j)]) + [_rel(other, k, l)]
    act = lambda w, x: ((w.act_index(x[0][0]), w.act_index(x[0][1])), w.act_index(x[1]))  # noqa: E731
    return FixedPointModel(pts, weights, 4 * l - 5, l, act=act, name="P(tau)")


@lru_cache(maxsize=16)
def square_model(l: int) -> FixedPointModel:
    Q = quadric_model(l)
    return product_model(Q, Q)


def subquadric_model(l: int, a: int) -> FixedPointModel:
    """The quadric of ``<e_a, e_{-a}>^perp``: points ``j`` with ``|j| != |a|``."""
    pts = [j for j in _indices(l) if abs(j) != abs(a)]
    weights = {j: _q_weights(j, l, skip=(abs(a),)) for j in pts}
    return FixedPointModel(pts, weights, 2 * l - 4, l, name=f"Z[{a}]")


def f_map(u):
    (i, _j), k = u
    return (i, k)


def pi_map(u):
    return u[0]


# ---------------------------------------------------------------------------
# pushforwards and the three-term assembly
# ---------------------------------------------------------------------------


def f_pushforward(spec: QuadricSpec, a: EquivariantClass) -> EquivariantClass:
    """``f_*`` by the closed orbit formulas.

    * ``z = (x, y)`` with ``y != +-x``: ``a_u * x_{-wt_x - wt_y}`` where
      ``u = ((x, y), y)`` is the only preimage.
    * ``y = -x``: no preimages, the coordinate is 0.
    * ``y = x``: pushforward over the subquadric ``Z`` of ``j |-> a_{((x, j), x)}
      * x_{-wt_x - wt_j} * prod_{k != |x|, |j|} x_{chi_k - wt_x} x_{-chi_k - wt_x}``.
    """
    l = spec.l
    alg = algebra(spec)
    QQ = square_model(l)
    out = {}
    for x, y in QQ.points:
        if y == -x:
            out[(x, y)] = alg.zero()
        elif y != x:
            out[(x, y)] = a[((x, y), y)] * alg.euler(char_neg(char_add(_wt(x, l), _wt(y, l))))
        else:
            Z = subquadric_model(l, x)
            vals = {}
            for j in Z.points:
                extra = [char_neg(char_add(_wt(x, l), _wt(j, l)))] + _q_weights(x, l, skip=(abs(j),))
                vals[j] = a[((x, j), x)] * alg.euler_product(extra)
            out[(x, y)] = integrate(EquivariantClass(Z, alg, vals))
    return EquivariantClass(QQ, alg, out)


def f_pushforward_generic(spec: QuadricSpec, a: EquivariantClass) -> EquivariantClass:
    """``f_*`` by the generic localization formula."""
    return eq_pushforward(f_map, a, square_model(spec.l))


def diagonal_pushforward(spec: QuadricSpec, z: EquivariantClass) -> EquivariantClass:
    """``i_*`` for the diagonal: ``z_x * e(T_x Q)`` at ``(x, x)`` and 0 elsewhere."""
    alg = algebra(spec)
    Q = quadric_model(spec.l)
    QQ = square_model(spec.l)
    out = {}
    for x, y in QQ.points:
        out[(x, y)] = z[x] * alg.euler_product(Q.weights[x]) if x == y else alg.zero()
    return EquivariantClass(QQ, alg, out)


def p1_pullback(spec: QuadricSpec, x: EquivariantClass) -> EquivariantClass:
    return eq_pullback(lambda z: z[0], square_model(spec.l), x)


def external_product(spec: QuadricSpec, a: EquivariantClass, b: EquivariantClass) -> EquivariantClass:
    """``a x b`` on ``Q x Q``."""
    QQ = square_model(spec.l)
    return EquivariantClass(QQ, algebra(spec), {(x, y): a[x] * b[y] for x, y in QQ.points})


def neza_assemble(spec: QuadricSpec, x: EquivariantClass, y: EquivariantClass, z: EquivariantClass) -> EquivariantClass:
    """``p_1^*(x) + f_* pi^*(y) + i_*(z)``."""
    P = ptau_model(spec.l)
    middle = f_pushforward(spec, eq_pullback(pi_map, P, y))
    return p1_pullback(spec, x) + middle + diagonal_pushforward(spec, z)


# ---------------------------------------------------------------------------
# correspondences
# ---------------------------------------------------------------------------


def compose(spec: QuadricSpec, alpha: EquivariantClass, beta: EquivariantClass) -> EquivariantClass:
    """``(beta o alpha)_{(x, z)} = sum_y alpha_{(x, y)} beta_{(y, z)} / e(T_y Q)``."""
    alg = algebra(spec)
    Q = quadric_model(spec.l)
    QQ = square_model(spec.l)
    inv = {y: alg.inverse_euler_product(Q.weights[y]) for y in Q.points}
    out = {}
    for x, z in QQ.points:
        total = alg.zero()
        for y in Q.points:
            a, b = alpha[(x, y)], beta[(y, z)]
            if a.is_zero() or b.is_zero():
                continue
            total = total + a * b * inv[y]
        total = total.reduce()
        if total.den:
            raise TruncationError(f"composition not cleared at order {spec.truncation}; raise --order")
        out[(x, z)] = total
    return EquivariantClass(QQ, alg, out)


def diagonal(spec: QuadricSpec) -> EquivariantClass:
    Q = quadric_model(spec.l)
    return diagonal_pushforward(spec, EquivariantClass.constant(Q, algebra(spec)))


def euler_characteristic(spec: QuadricSpec):
    """Equivariant ``pi_*(1)`` as a reduced scalar; the constant term is the plain value."""
    return integrate(EquivariantClass.constant(quadric_model(spec.l), algebra(spec)))


def euler_char_projector(spec: QuadricSpec) -> EquivariantClass:
    """``chi^{-1} (1 x 1)``, with ``chi`` the exact equivariant Euler characteristic."""
    chi = euler_characteristic(spec).series()
    c0 = chi.constant_term()
    if c0.is_zero() or not c0.is_unit():
        raise NotAUnitError(f"Euler characteristic {c0} is not a unit in {spec.theory.label}; no projector")
    Q = quadric_model(spec.l)
    alg = algebra(spec)
    one = EquivariantClass.constant(Q, alg)
    return external_product(spec, one, one) * alg.scalar(chi**-1)


# ---------------------------------------------------------------------------
# invariant classes and bases
# ---------------------------------------------------------------------------


def invariant_subvariety_class(spec: QuadricSpec, kind: str, k: int = 0, primed: bool = False, point: int = 1) -> EquivariantClass:
    """Classes of T-stable subvarieties and powers of the hyperplane class.

    * ``hyperplane-power``: ``h^k`` with ``h|_{<e_i>} = x_{-wt_i}``.
    * ``isotropic-subspace``: ``P(<e_1..e_k>)``; with ``primed`` and ``k = l``
      the other family ``P(<e_1..e_{l-1}, e_{-l}>)``.
    * ``point``: the point ``<e_point>``.
    """
    l = spec.l
    Q = quadric_model(l)
    alg = algebra(spec)
    if kind == "hyperplane-power":
        if k < 0:
            raise ValueError("negative power")
        return EquivariantClass(Q, alg, {i: alg.euler(char_neg(_wt(i, l))) ** k for i in Q.points})
    if kind == "point":
        if point not in Q.points:
            raise ValueError(f"{point} is not a fixed point of Q")
        S = [point]
    elif kind == "isotropic-subspace":
        if not 1 <= k <= l:
            raise ValueError(f"isotropic subspaces have dimension 1..{l}")
        if primed and k != l:
            raise ValueError("the second family exists only for k = l")
        S = list(range(1, k + 1)) if not primed else list(range(1, l)) + [-l]
    else:
        raise ValueError(f"unknown subvariety kind {kind!r}")
    values = {}
    for i in Q.points:
        if i in S:
            tangent = {_rel(s, i, l) for s in S if s != i}
            normal = [w for w in Q.weights[i] if w not in tangent]
            values[i] = alg.euler_product(normal)
        else:
            values[i] = alg.zero()
    return EquivariantClass(Q, alg, values)


@dataclass
class BasisClass:
    label: str
    codim: int
    cls: EquivariantClass


def quadric_basis(spec: QuadricSpec) -> list:
    """``h^0..h^{l-2}``, the two maximal isotropic families, then ``L_{l-1}..L_1``."""
    l = spec.l
    d = spec.dim
    out = [BasisClass(f"h^{j}", j, invariant_subvariety_class(spec, "hyperplane-power", j)) for j in range(l - 1)]
    out.append(BasisClass(f"L{l}", l - 1, invariant_subvariety_class(spec, "isotropic-subspace", l)))
    out.append(BasisClass(f"L{l}'", l - 1, invariant_subvariety_class(spec, "isotropic-subspace", l, primed=True)))
    for k in range(l - 1, 0, -1):
        out.append(BasisClass(f"L{k}", d - (k - 1), invariant_subvariety_class(spec, "isotropic-subspace", k)))
    return out


def gram_matrix(spec: QuadricSpec, basis: Sequence[BasisClass]) -> list:
    """Equivariant pairing ``int b_a b_b`` as truncated series."""
    n = len(basis)
    G = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            G[a][b] = G[b][a] = integrate(basis[a].cls * basis[b].cls).series()
    return G


def _check_unimodular(spec: QuadricSpec, G0) -> CoefficientElement:
    ring = algebra(spec).ring
    det = bareiss_det(G0, ring)
    if det.is_zero() or not det.is_unit():
        raise PairingError(f"pairing determinant {det} is not a unit")
    return det


def dual_basis(spec: QuadricSpec, basis: Sequence[BasisClass]) -> list:
    """Classes ``b^a`` with ``int b_a b^b = delta_ab`` (exactly, equivariantly)."""
    G = gram_matrix(spec, basis)
    _check_unimodular(spec, [[c.constant_term() for c in row] for row in G])
    Ginv = series_matrix_inverse(G)
    alg = algebra(spec)
    out = []
    for a in range(len(basis)):
        cls = EquivariantClass.zero(basis[0].cls.model, alg)
        for c in range(len(basis)):
            if not Ginv[a][c].is_zero():
                cls = cls + basis[c].cls * alg.scalar(Ginv[a][c])
        out.append(cls)
    return out


def _euler_adapted(spec: QuadricSpec, basis: Sequence[BasisClass]) -> list:
    """Replace ``b_k`` by ``b_k - (int b_k / chi) 1`` so that ``1`` is orthogonal to the rest."""
    chi_inv = euler_characteristic(spec).series() ** -1
    alg = algebra(spec)
    one = basis[0].cls
    out = [basis[0]]
    for b in basis[1:]:
        shift = integrate(b.cls).series() * chi_inv
        out.append(BasisClass(b.label + "~", b.codim, b.cls - one * alg.scalar(shift)))
    return out


@dataclass
class TateDecomposition:
    spec: QuadricSpec
    labels: list
    twists: list
    idempotents: list
    basis: list = field(repr=False, default_factory=list)

    def summary(self) -> str:
        parts = []
        for t in sorted(set(self.twists)):
            m = self.twists.count(t)
            parts.append(f"Z({t})" + (f"^{m}" if m > 1 else ""))
        return " + ".join(parts)


def tate_decomposition(spec: QuadricSpec, basis: Sequence[BasisClass] | None = None, euler_adapted: bool = False) -> TateDecomposition:
    """Idempotents ``e_a = b^a x b_a`` from the dual basis of the pairing.

    The twist of ``e_a`` is the codimension of ``b_a``.  With
    ``euler_adapted`` the unit class is made orthogonal to the others, so the
    first idempotent is ``chi^{-1} (1 x 1)``.
    """
    basis = list(basis) if basis is not None else quadric_basis(spec)
    if euler_adapted:
        basis = _euler_adapted(spec, basis)
    duals = dual_basis(spec, basis)
    idems = [external_product(spec, duals[a], basis[a].cls) for a in range(len(basis))]
    return TateDecomposition(spec, [b.label for b in basis], [b.codim for b in basis], idems, basis)


def verify_decomposition(dec: TateDecomposition) -> dict:
    """Idempotency, orthogonality and completeness, each checked by ``compose``."""
    spec = dec.spec
    n = len(dec.idempotents)
    table = {}
    for a, b in product(range(n), repeat=2):
        c = compose(spec, dec.idempotents[a], dec.idempotents[b])
        table[(a, b)] = (c == dec.idempotents[a]) if a == b else c.is_zero()
    total = dec.idempotents[0]
    for e in dec.idempotents[1:]:
        total = total + e
    complete = total.reduce() == diagonal(spec)
    return {
        "count": n,
        "idempotent": all(table[(a, a)] for a in range(n)),
        "orthogonal": all(v for (a, b), v in table.items() if a != b),
        "complete": complete,
        "table": table,
    }


# ---------------------------------------------------------------------------
# the three-term decomposition on free bases (l = 2)
# ---------------------------------------------------------------------------


def ogr_basis(spec: QuadricSpec) -> list:
    """Basis of ``A(OGr)`` for ``l = 2``, where ``OGr`` is two copies of ``Q``.

    The component of a flag is the family of its plane (parity of the number
    of negative indices); each component maps isomorphically to ``Q``.
    """
    if spec.l != 2:
        raise NotImplementedError("a free basis of A(OGr) is only implemented for l = 2")
    O = ogr_model(2)
    alg = algebra(spec)
    out = []
    for comp in (0, 1):
        for b in quadric_basis(spec):
            vals = {x: (b.cls[x[0]] if sum(1 for i in x if i < 0) % 2 == comp else alg.zero()) for x in O.points}
            out.append(BasisClass(f"{b.label}@{comp}", b.codim, EquivariantClass(O, alg, vals)))
    return out


def neza_matrix(spec: QuadricSpec):
    """Pairing matrix of the assembled images against ``b_i x b_j``, and its determinant.

    Columns are ``p_1^*(b)``, ``f_* pi^*(y)`` and ``i_*(b)``; rows pair with
    the Kunneth basis.  A unit determinant means the assembled map is an
    isomorphism on the free modules.
    """
    Qb = quadric_basis(spec)
    alg = algebra(spec)
    Q = quadric_model(spec.l)
    O = ogr_model(spec.l)
    zQ = EquivariantClass.zero(Q, alg)
    zO = EquivariantClass.zero(O, alg)
    images = [neza_assemble(spec, b.cls, zO, zQ) for b in Qb]
    images += [neza_assemble(spec, zQ, y.cls, zQ) for y in ogr_basis(spec)]
    images += [neza_assemble(spec, zQ, zO, b.cls) for b in Qb]
    kunneth = [external_product(spec, a.cls, b.cls) for a in Qb for b in Qb]
    M = [[integrate(img * k).constant_term() for k in kunneth] for img in images]
    det = bareiss_det(M, alg.ring)
    return M, det


# ---------------------------------------------------------------------------
# brute-force idempotent search (non-equivariant, Chow)
# ---------------------------------------------------------------------------


def nonequivariant_gram(spec: QuadricSpec, basis: Sequence[BasisClass] | None = None) -> list:
    basis = list(basis) if basis is not None else quadric_basis(spec)
    return [[c.constant_term() for c in row] for row in gram_matrix(spec, basis)]


def brute_force_idempotents(spec: QuadricSpec, bound: int = 2) -> dict:
    """Enumerate degree-0 idempotent correspondences with small integer entries.

    A correspondence ``sum C_ij b_i x b_j`` is the matrix ``C``; composition
    is ``(D o C) = C G D`` with ``G`` the intersection pairing.  Returns the
    list of idempotents found and, for each Tate idempotent, the idempotents
    lying in its corner ring.
    """
    if spec.theory.kind != "chow":
        raise ValueError("the brute-force search uses the Chow grading")
    basis = quadric_basis(spec)
    n = len(basis)
    G = [[_as_int(c.constant()) for c in row] for row in nonequivariant_gram(spec, basis)]
    d = spec.dim
    slots = [(i, j) for i in range(n) for j in range(n) if basis[i].codim + basis[j].codim == d]

    def mul(A, B):
        return [[sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)]

    def comp(C, D):  # D o C
        return mul(mul(C, G), D)

    found = []
    for values in product(range(-bound, bound + 1), repeat=len(slots)):
        C = [[0] * n for _ in range(n)]
        for (i, j), v in zip(slots, values):
            C[i][j] = v
        if comp(C, C) == C:
            found.append(C)
    Ginv = inverse(G, algebra(spec).ring)
    Ginv = [[_as_int(c.constant()) for c in row] for row in Ginv]
    tate = []
    for a in range(n):
        E = [[Ginv[a][i] if j == a else 0 for j in range(n)] for i in range(n)]
        tate.append(E)
    zero = [[0] * n for _ in range(n)]
    corners = [[C for C in found if comp(comp(E, C), E) == C] for E in tate]
    return {
        "slots": len(slots),
        "idempotents": found,
        "tate": tate,
        "corners": corners,
        "minimal": all(len(cs) == 2 and zero in cs and E in cs for cs, E in zip(corners, tate)),
    }


# ---------------------------------------------------------------------------
# Chern character on the quadric
# ---------------------------------------------------------------------------


def _as_int(c: Fraction):
    return int(c) if c.denominator == 1 else c


def _chow_spec(spec: QuadricSpec) -> QuadricSpec:
    return spec.with_theory(CHOW)


def _ch_class(spec: QuadricSpec, alpha: EquivariantClass) -> EquivariantClass:
    """Pointwise ``x_i -> phi(x_i)`` into the Chow-side algebra (``v_n`` kept)."""
    cspec = _chow_spec(spec)
    calg = algebra(cspec)
    N = cspec.truncation
    phi = _theory(spec.theory, order=N).phi
    S = SeriesRing(calg.S.vars, N, phi.ring)
    images = {v: phi.substitute({"t": S.var(v)}) for v in calg.S.vars}
    vals = {x: alpha[x].series().substitute(images) for x in alpha.model.points}
    return EquivariantClass(alpha.model, calg, vals)


def _coordinates(spec: QuadricSpec, cls: EquivariantClass, basis, G0inv) -> list:
    pair = [integrate(cls * b.cls).constant_term() for b in basis]
    return [sum((G0inv[a][b] * pair[b] for b in range(len(basis))), pair[0] * 0) for a in range(len(basis))]


def chern_character_coordinates(spec: QuadricSpec, alpha: EquivariantClass) -> list:
    """Coordinates of ``ch(alpha)`` in the Chow basis (codimension = that of the basis class)."""
    cspec = _chow_spec(spec)
    cbasis = quadric_basis(cspec)
    G0 = nonequivariant_gram(cspec, cbasis)
    G0inv = inverse(G0, algebra(cspec).ring)
    return _coordinates(cspec, _ch_class(spec, alpha), cbasis, G0inv)


def integrality_on_basis(spec: QuadricSpec) -> dict:
    """``p_local_check`` of ``ch_1..ch_{q-1}`` and ``c`` on every basis class (``v_n -> 1``).

    Returns ``{label: {"ch<i>": (ok, witness), ..., "c": (ok, witness)}}``.
    """
    desc = spec.theory
    if desc.kind not in ("morava", "connective_morava"):
        raise ValueError("the integrality check is for Morava theories")
    p, q = desc.p, desc.p**desc.n
    cspec = _chow_spec(spec)
    calg = algebra(cspec)
    cbasis = quadric_basis(cspec)
    G0inv = inverse(nonequivariant_gram(cspec, cbasis), calg.ring)
    vn = {desc.vgen: 1}
    out = {}
    for b in quadric_basis(spec):
        coords = [c.specialize(vn) for c in chern_character_coordinates(spec, b.cls)]
        report = {}
        for i in range(1, q):
            report[f"ch{i}"] = _check_all([c for c, cb in zip(coords, cbasis) if cb.codim == i], p)
        ch1 = EquivariantClass.zero(cbasis[0].cls.model, calg)
        for c, cb in zip(coords, cbasis):
            if cb.codim == 1 and not c.is_zero():
                ch1 = ch1 + cb.cls * calg.scalar(calg.S.constant(c))
        power = _coordinates(cspec, ch1**q, cbasis, G0inv)
        cvals = [c + pw / p for c, pw, cb in zip(coords, power, cbasis) if cb.codim == q]
        report["c"] = _check_all(cvals, p)
        out[b.label] = report
    return out


def _check_all(values, p):
    for v in values:
        ok, witness = p_local_check(v, p)
        if not ok:
            return ok, witness
    return True, None


def grr_check(spec: QuadricSpec, alpha: EquivariantClass):
    """``(int alpha, int ch(alpha) td(T_Q))`` as plain values; they agree by Riemann-Roch."""
    cspec = _chow_spec(spec)
    calg = algebra(cspec)
    N = cspec.truncation
    phi = _theory(spec.theory, order=N + 1).phi
    t = SeriesRing(("t",), N + 1, phi.ring).var("t")
    td = (t / phi).truncate(N)
    Q = alpha.model
    tdT = {x: _product(td.substitute({"t": calg.euler(w)}) for w in Q.weights[x]) for x in Q.points}
    ch = _ch_class(spec, alpha)
    rhs = integrate(ch * EquivariantClass(Q, calg, tdT)).constant_term()
    lhs = integrate(alpha).constant_term()
    return lhs, rhs


def _product(items):
    out = None
    for s in items:
        out = s if out is None else out * s
    return out

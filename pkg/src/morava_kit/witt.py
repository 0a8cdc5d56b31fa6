"""Generalized Witt vectors attached to a logarithm ``l(x) = sum a_i x^i``.

The ghost map is ``w_n(z) = sum_{d | n} a_{n/d} z_d^{n/d}`` and Witt
addition is the unique family ``Sigma_n(x; y)`` with

    w_n(Sigma_1, ..., Sigma_n) = w_n(x) + w_n(y).

Since ``a_1 = 1`` the system is triangular and ``Sigma_n`` is found by
forward substitution.  Vectors are truncated to a finite length ``N``; every
identity is length-local, so nothing is lost below ``N``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .fgl import morava_logarithm
from .series import CoefficientElement, CoefficientRing, SeriesRing, TruncatedSeries, p_local_check

__all__ = [
    "GhostData",
    "WittVector",
    "WittReport",
    "ghost_polynomials",
    "sigma_polynomials",
    "negation_polynomials",
    "evaluate_polynomial",
    "witt_add",
    "witt_neg",
    "witt_group_check",
    "sigma_integrality",
    "morava_ghost",
    "multiplicative_ghost",
    "additive_ghost",
]


class GhostData:
    """Logarithm coefficients ``a_1, ..., a_N`` with ``a_1 = 1``."""

    def __init__(self, coefficients: Sequence, ring: CoefficientRing | None = None, label: str = ""):
        ring = ring if ring is not None else _ring_of(coefficients)
        coeffs = tuple(ring(c) for c in coefficients)
        if not coeffs or coeffs[0] != 1:
            raise ValueError("ghost data must start with a_1 = 1")
        self.a = coeffs
        self.ring = ring
        self.label = label
        self._cache = {}

    @classmethod
    def from_logarithm(cls, log: TruncatedSeries, count: int, label: str = "") -> "GhostData":
        if log.order <= count:
            raise ValueError(f"logarithm known only below degree {log.order}, need {count}")
        return cls([log[i] for i in range(1, count + 1)], log.ring, label)

    @property
    def count(self) -> int:
        return len(self.a)

    def __eq__(self, other):
        return isinstance(other, GhostData) and self.a == other.a and self.ring == other.ring

    __hash__ = None

    def __repr__(self):
        return f"GhostData({self.label or ', '.join(map(str, self.a))})"


def _ring_of(values):
    for v in values:
        if isinstance(v, CoefficientElement):
            return v.ring
    return CoefficientRing()


def morava_ghost(p: int, n: int, count: int, vn: object = 1) -> GhostData:
    """Ghost data of the Morava logarithm; by default with ``v_n -> 1``."""
    log = morava_logarithm(p, n, count + 1, vn=vn)
    tag = "v_n=1" if vn == 1 else f"v_n={vn}" if vn is not None else "graded"
    return GhostData.from_logarithm(log, count, f"K({n}), p={p}, {tag}")


def multiplicative_ghost(count: int) -> GhostData:
    return GhostData([Fraction(1, i) for i in range(1, count + 1)], label="multiplicative")


def additive_ghost(count: int) -> GhostData:
    return GhostData([1] + [0] * (count - 1), label="additive")


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


def _zring(names, count, ring):
    return SeriesRing(tuple(f"{s}{i}" for s in names for i in range(1, count + 1)), count + 1, ring)


def _ghost_of(g: GhostData, coords: Sequence, n: int):
    """``w_n`` evaluated on a list of coordinates (any ring-like values)."""
    out = None
    for d in range(1, n + 1):
        if n % d:
            continue
        a = g.a[n // d - 1]
        if not a:
            continue
        term = coords[d - 1] ** (n // d) * a
        out = term if out is None else out + term
    return out


def ghost_polynomials(g: GhostData, count: int | None = None) -> list:
    """``[w_1, ..., w_N]`` as polynomials in ``z1..zN``."""
    N = g.count if count is None else count
    if N > g.count:
        raise ValueError(f"ghost data has only {g.count} coefficients")
    Z = _zring(("z",), N, g.ring)
    z = Z.gens
    return [_ghost_of(g, z, n) for n in range(1, N + 1)]


def _solve(g: GhostData, N: int, rhs):
    """Forward substitution for ``w_n(S) = rhs(n)``."""
    sol = []
    for n in range(1, N + 1):
        s = rhs(n)
        for d in range(1, n):
            if n % d == 0 and g.a[n // d - 1]:
                s = s - sol[d - 1] ** (n // d) * g.a[n // d - 1]
        sol.append(s)  # a_1 = 1: no division needed
    return sol


def sigma_polynomials(g: GhostData, count: int | None = None) -> list:
    """``[Sigma_1, ..., Sigma_N]`` in ``x1..xN, y1..yN``."""
    N = g.count if count is None else count
    key = ("sigma", N)
    if key not in g._cache:
        XY = _zring(("x", "y"), N, g.ring)
        gens = XY.gens
        x, y = gens[:N], gens[N:]
        wx = [_ghost_of(g, x, n) for n in range(1, N + 1)]
        wy = [_ghost_of(g, y, n) for n in range(1, N + 1)]
        g._cache[key] = _solve(g, N, lambda n: wx[n - 1] + wy[n - 1])
    return list(g._cache[key])


def negation_polynomials(g: GhostData, count: int | None = None) -> list:
    """``[I_1, ..., I_N]`` in ``x1..xN`` with ``w_n(I(x)) = -w_n(x)``."""
    N = g.count if count is None else count
    key = ("neg", N)
    if key not in g._cache:
        X = _zring(("x",), N, g.ring)
        x = X.gens
        g._cache[key] = _solve(g, N, lambda n: -_ghost_of(g, x, n))
    return list(g._cache[key])


def evaluate_polynomial(poly: TruncatedSeries, values: dict):
    """Evaluate a polynomial at ring-like values (numbers, coefficients or series).

    ``values`` maps variable names to values; missing variables count as 0.
    """
    vals = [values.get(v, 0) for v in poly.vars]
    total = 0
    for xe, c in poly.coefficients().items():
        term = c
        for v, e in zip(vals, xe):
            if e:
                term = term * v**e
        total = total + term
    return poly.ring.zero() if isinstance(total, int) else total


# ---------------------------------------------------------------------------
# vectors
# ---------------------------------------------------------------------------


class WittVector:
    """Finite Witt vector ``(z_1, ..., z_N)`` for fixed ghost data."""

    def __init__(self, coords: Sequence, ghost: GhostData):
        coords = tuple(coords)
        if len(coords) != ghost.count:
            raise ValueError(f"vector of length {len(coords)} for ghost data of length {ghost.count}")
        self.coords = coords
        self.ghost = ghost

    @classmethod
    def zero(cls, ghost: GhostData) -> "WittVector":
        return cls([0] * ghost.count, ghost)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def __add__(self, other):
        return witt_add(self, other)

    def __neg__(self):
        return witt_neg(self)

    def __sub__(self, other):
        return witt_add(self, witt_neg(other))

    def __eq__(self, other):
        if not isinstance(other, WittVector):
            return NotImplemented
        return self.ghost == other.ghost and all(_equal(a, b) for a, b in zip(self.coords, other.coords))

    __hash__ = None

    def ghost_components(self) -> list:
        return [_ghost_of(self.ghost, self.coords, n) for n in range(1, len(self.coords) + 1)]

    def __repr__(self):
        return f"WittVector({', '.join(map(str, self.coords))})"


def _equal(a, b):
    d = a - b
    if isinstance(d, (TruncatedSeries, CoefficientElement)):
        return d.is_zero()
    return d == 0


def _values(prefix, coords):
    return {f"{prefix}{i}": c for i, c in enumerate(coords, 1)}


def witt_add(a: WittVector, b: WittVector) -> WittVector:
    if a.ghost != b.ghost:
        raise ValueError("Witt vectors with different ghost data")
    sig = sigma_polynomials(a.ghost)
    vals = {**_values("x", a.coords), **_values("y", b.coords)}
    return WittVector([evaluate_polynomial(s, vals) for s in sig], a.ghost)


def witt_neg(a: WittVector) -> WittVector:
    neg = negation_polynomials(a.ghost)
    vals = _values("x", a.coords)
    return WittVector([evaluate_polynomial(s, vals) for s in neg], a.ghost)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


@dataclass
class WittReport:
    label: str
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def failures(self):
        return [k for k, ok in self.checks.items() if not ok]


def witt_group_check(g: GhostData, samples: Sequence[WittVector]) -> WittReport:
    """Group axioms and ghost naturality on all pairs/triples of ``samples``."""
    report = WittReport(g.label)
    zero = WittVector.zero(g)
    samples = list(samples)
    ok = {"zero": True, "negation": True, "commutativity": True, "associativity": True, "ghost": True}
    for a in samples:
        ok["zero"] &= a + zero == a and zero + a == a
        ok["negation"] &= a + (-a) == zero
        for b in samples:
            s = a + b
            ok["commutativity"] &= s == b + a
            ok["ghost"] &= all(
                _equal(ws, wa + wb)
                for ws, wa, wb in zip(s.ghost_components(), a.ghost_components(), b.ghost_components())
            )
            for c in samples[:3]:
                ok["associativity"] &= (a + b) + c == a + (b + c)
    report.checks.update(ok)
    return report


def sigma_integrality(g: GhostData, p: int, count: int | None = None) -> list:
    """``[(n, ok, witness)]`` from :func:`p_local_check` on each ``Sigma_n``."""
    out = []
    for n, s in enumerate(sigma_polynomials(g, count), 1):
        ok, witness = p_local_check(s, p)
        out.append((n, ok, witness))
    return out

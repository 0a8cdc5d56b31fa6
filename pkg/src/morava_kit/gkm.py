"""Equivariant localization over torus fixed points.

A class on a variety with finitely many fixed points is stored as its list of
restrictions to the fixed points.  Each restriction lives in the (truncated)
formal group algebra ``A[[x_1, ..., x_l]]`` of the torus, localized at Euler
classes of characters.

Euler classes of characters are produced by the theory's formal group law:
``x_{a+b} = F(x_a, x_b)`` and ``x_{-a} = i(x_a)``.  Denominators are kept in
factored form as multisets of *positive* characters (first nonzero
coordinate positive); the Euler class of a negative character is rewritten as
``x_{-a} = x_a * u(x_a)`` with the unit ``u(t) = i(t)/t``, whose inverse goes
into the numerator.  Division is attempted whenever a numerator is exactly
divisible by one of its denominator factors.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from itertools import permutations, product
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .fgl import Theory, TheoryDescriptor, theory as _theory
from .series import InexactDivisionError, SeriesRing, TruncatedSeries, divide_exact

__all__ = [
    "Character",
    "TruncationError",
    "TorusAlgebra",
    "EquivariantScalar",
    "FixedPointModel",
    "EquivariantClass",
    "WeylElement",
    "weyl_group",
    "char",
    "basis_char",
    "normalize",
    "projective_space_model",
    "point_model",
    "product_model",
    "eq_pullback",
    "eq_pushforward",
    "integrate",
    "milnor_number",
]

Character = tuple


class TruncationError(ArithmeticError):
    """A localization sum could not be cleared at the configured order."""


def char(*coeffs: int) -> Character:
    return tuple(int(c) for c in coeffs)


def basis_char(i: int, l: int) -> Character:
    """Weight of the line ``<e_i>``: ``chi_i`` for ``i > 0`` and ``-chi_|i|`` for ``i < 0``."""
    c = [0] * l
    c[abs(i) - 1] = 1 if i > 0 else -1
    return tuple(c)


def char_add(a: Character, b: Character) -> Character:
    return tuple(x + y for x, y in zip(a, b))


def char_neg(a: Character) -> Character:
    return tuple(-x for x in a)


def is_positive(a: Character) -> bool:
    for c in a:
        if c:
            return c > 0
    raise ValueError("the zero character has no sign")


def normalize(a: Character) -> tuple:
    """``(|a|, sign)`` with ``|a|`` positive."""
    return (a, 1) if is_positive(a) else (char_neg(a), -1)


def format_char(a: Character) -> str:
    parts = []
    for i, c in enumerate(a, 1):
        if not c:
            continue
        coef = "" if abs(c) == 1 else str(abs(c))
        sign = "-" if c < 0 else "+"
        parts.append(f"{sign}{coef}chi{i}")
    s = "".join(parts)
    return s[1:] if s.startswith("+") else s


# ---------------------------------------------------------------------------
# the formal group algebra of the torus
# ---------------------------------------------------------------------------


class TorusAlgebra:
    """``A[[x_1..x_l]]`` truncated at total degree ``order``, with Euler classes.

    ``th`` is a :class:`~morava_kit.fgl.Theory` (or a descriptor).
    """

    def __init__(self, th: Theory | TheoryDescriptor, l: int, order: int):
        if isinstance(th, TheoryDescriptor):
            th = _theory(th, order=order)
        if th.order < order:
            th = _theory(th.desc, order=order)
        self.theory = th
        self.l = l
        self.order = order
        self.S = SeriesRing(tuple(f"x{i}" for i in range(1, l + 1)), order, th.ring)
        self._euler = {}
        self._unit_inv = {}
        self._multiple = {}
        self._w = None
        self._F = th.fgl.F.truncate(order)
        self._chow = th.kind == "chow"
        self._k0 = th.kind == "k0"

    def __repr__(self):
        return f"TorusAlgebra({self.theory.desc.label}, l={self.l}, order={self.order})"

    @property
    def desc(self) -> TheoryDescriptor:
        return self.theory.desc

    @property
    def ring(self):
        return self.S.ring

    def var(self, i: int) -> TruncatedSeries:
        return self.S.var(f"x{i}")

    def one(self) -> "EquivariantScalar":
        return EquivariantScalar(self, self.S.one)

    def zero(self) -> "EquivariantScalar":
        return EquivariantScalar(self, self.S.zero)

    def scalar(self, value) -> "EquivariantScalar":
        if isinstance(value, EquivariantScalar):
            return value
        if isinstance(value, TruncatedSeries):
            return EquivariantScalar(self, value)
        return EquivariantScalar(self, self.S.constant(value))

    # Euler classes -------------------------------------------------------------

    def fsum(self, a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
        """Formal sum ``F(a, b)``."""
        if self._chow:
            return a + b
        if self._k0:
            v = self.S.coeff_gen("v1")
            return a + b - v * a * b
        return self._F.substitute({"x": a, "y": b})

    def finv(self, a: TruncatedSeries) -> TruncatedSeries:
        if self._chow:
            return -a
        return self.theory.inverse.truncate(self.order).substitute({"t": a})

    def _mult(self, i: int, k: int) -> TruncatedSeries:
        """``[k] x_i`` for ``k != 0``."""
        key = (i, k)
        if key not in self._multiple:
            if k == 1:
                r = self.var(i)
            elif k == -1:
                r = self.finv(self.var(i))
            elif k > 0:
                r = self.fsum(self._mult(i, k - 1), self.var(i))
            else:
                r = self.fsum(self._mult(i, k + 1), self._mult(i, -1))
            self._multiple[key] = r
        return self._multiple[key]

    def euler(self, a: Character) -> TruncatedSeries:
        """First Chern class ``x_a`` of the character ``a``."""
        a = tuple(a)
        if len(a) != self.l:
            raise ValueError(f"character {a} has the wrong rank for l={self.l}")
        if not any(a):
            raise ValueError("the zero character has no Euler class here")
        if a not in self._euler:
            if self._chow:
                self._euler[a] = sum((self.var(i + 1) * c for i, c in enumerate(a) if c), self.S.zero)
            else:
                last = max(i for i, c in enumerate(a) if c)
                piece = self._mult(last + 1, a[last])
                rest = a[:last] + (0,) * (self.l - last)
                self._euler[a] = piece if not any(rest) else self.fsum(self.euler(rest), piece)
        return self._euler[a]

    def _unit_series(self) -> TruncatedSeries:
        """``t / i(t)`` to full order (computed from ``i`` one degree further)."""
        if self._w is None:
            inv = _theory(self.desc, order=self.order + 1).inverse
            t = SeriesRing(("t",), self.order + 1, inv.ring).var("t")
            self._w = divide_exact(t, inv)
        return self._w

    def unit_inverse(self, a: Character) -> TruncatedSeries:
        """``x_a / x_{-a}`` for positive ``a`` (a unit; ``-1`` for the additive law)."""
        if a not in self._unit_inv:
            if self._chow:
                self._unit_inv[a] = self.S.constant(-1)
            else:
                self._unit_inv[a] = self._unit_series().substitute({"t": self.euler(a)})
        return self._unit_inv[a]

    def inverse_euler_product(self, weights: Iterable[Character]) -> "EquivariantScalar":
        """``1 / prod x_w`` in factored form."""
        num = self.S.one
        den = Counter()
        for w in weights:
            pos, sign = normalize(tuple(w))
            den[pos] += 1
            if sign < 0:
                num = num * self.unit_inverse(pos)
        return EquivariantScalar(self, num, den)

    def euler_product(self, weights: Iterable[Character]) -> TruncatedSeries:
        out = self.S.one
        for w in weights:
            out = out * self.euler(tuple(w))
        return out

    def substitution(self, w: "WeylElement") -> dict:
        """Images of the generators under ``x_i -> x_{w chi_i}``."""
        return {f"x{i}": self.euler(w.act_char(basis_char(i, self.l))) for i in range(1, self.l + 1)}


# ---------------------------------------------------------------------------
# localized scalars
# ---------------------------------------------------------------------------


class EquivariantScalar:
    """``num / prod_{a in den} x_a`` with ``den`` a multiset of positive characters."""

    __slots__ = ("alg", "num", "den")

    def __init__(self, alg: TorusAlgebra, num: TruncatedSeries, den: Mapping | None = None):
        self.alg = alg
        self.num = num
        self.den = Counter({k: v for k, v in (den or {}).items() if v})

    @property
    def order(self) -> int:
        return self.num.order

    def _check_order(self):
        if self.num.order <= 0:
            raise TruncationError(
                f"localization ran out of precision (order {self.alg.order}); raise --order"
            )

    def __repr__(self):
        den = " * ".join(f"x[{format_char(a)}]^{k}" if k > 1 else f"x[{format_char(a)}]" for a, k in sorted(self.den.items()))
        return f"EquivariantScalar({self.num}{' / (' + den + ')' if den else ''})"

    def _lift(self, other):
        if isinstance(other, EquivariantScalar):
            return other
        return self.alg.scalar(other)

    def _over(self, den: Counter) -> TruncatedSeries:
        """Numerator rewritten over the larger denominator ``den``."""
        extra = den - self.den
        num = self.num
        for a, k in extra.items():
            num = num * self.alg.euler(a) ** k
        return num

    def __add__(self, other):
        other = self._lift(other)
        if not self.den and not other.den:
            return EquivariantScalar(self.alg, self.num + other.num)
        den = self.den | other.den
        return EquivariantScalar(self.alg, self._over(den) + other._over(den), den)

    __radd__ = __add__

    def __neg__(self):
        return EquivariantScalar(self.alg, -self.num, self.den)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return EquivariantScalar(self.alg, self.num * other, self.den)
        other = self._lift(other)
        return EquivariantScalar(self.alg, self.num * other.num, self.den + other.den)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = self.alg.one()
        for _ in range(k):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def reduce(self) -> "EquivariantScalar":
        """Cancel every denominator factor that divides the numerator."""
        num = self.num
        den = Counter(self.den)
        progress = True
        while den and progress and not num.is_zero():
            progress = False
            for a in sorted(den):
                try:
                    q = divide_exact(num, self.alg.euler(a))
                except InexactDivisionError:
                    continue
                num = q
                den[a] -= 1
                if not den[a]:
                    del den[a]
                progress = True
        if num.is_zero() and den:
            # a cancelled numerator still owes one order per uncleared factor
            num = num.truncate(max(num.order - sum(den.values()), 0))
            den = Counter()
        out = EquivariantScalar(self.alg, num, den)
        out._check_order()
        return out

    def is_polynomial(self) -> bool:
        return not self.reduce().den

    def series(self) -> TruncatedSeries:
        """The numerator of a denominator-free value (after reduction)."""
        r = self.reduce()
        if r.den:
            raise TruncationError(
                f"denominator {dict(r.den)} not cleared at order {self.alg.order}; raise --order"
            )
        return r.num

    def constant_term(self):
        """Non-equivariant value: the constant term of the reduced numerator."""
        return self.series().constant_term()

    def __eq__(self, other):
        other = self._lift(other)
        den = self.den | other.den
        return self._over(den) == other._over(den)

    __hash__ = None

    def apply(self, w: "WeylElement") -> "EquivariantScalar":
        """Action of a signed permutation on the torus."""
        num = self.num.substitute(self.alg.substitution(w))
        den = Counter()
        for a, k in self.den.items():
            pos, sign = normalize(w.act_char(a))
            den[pos] += k
            if sign < 0:
                num = num * self.alg.unit_inverse(pos) ** k
        return EquivariantScalar(self.alg, num, den)


# ---------------------------------------------------------------------------
# Weyl group
# ---------------------------------------------------------------------------


class WeylElement:
    """Signed permutation: ``e_k -> e_{images[k-1]}`` (and ``e_{-k} -> e_{-images[k-1]}``)."""

    __slots__ = ("images",)

    def __init__(self, images: Sequence[int]):
        images = tuple(images)
        if sorted(abs(i) for i in images) != list(range(1, len(images) + 1)):
            raise ValueError(f"{images} is not a signed permutation")
        self.images = images

    def __repr__(self):
        return f"WeylElement{self.images}"

    def __eq__(self, other):
        return isinstance(other, WeylElement) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    @property
    def sign_changes(self) -> int:
        return sum(1 for i in self.images if i < 0)

    def act_index(self, i: int) -> int:
        j = self.images[abs(i) - 1]
        return j if i > 0 else -j

    def act_char(self, a: Character) -> Character:
        out = [0] * len(a)
        for k, c in enumerate(a, 1):
            if c:
                j = self.images[k - 1]
                out[abs(j) - 1] += c if j > 0 else -c
        return tuple(out)

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return WeylElement([self.act_index(other.act_index(k)) for k in range(1, len(self.images) + 1)])


def weyl_group(l: int, kind: str = "D") -> list:
    """Signed permutations of ``1..l``; type ``D`` keeps an even number of sign changes."""
    out = []
    for perm in permutations(range(1, l + 1)):
        for signs in product((1, -1), repeat=l):
            w = WeylElement([s * k for s, k in zip(signs, perm)])
            if kind == "D" and w.sign_changes % 2:
                continue
            out.append(w)
    return out


# ---------------------------------------------------------------------------
# fixed-point models and classes
# ---------------------------------------------------------------------------


class FixedPointModel:
    """Fixed points with tangent weights; ``act`` moves points under the Weyl group."""

    def __init__(
        self,
        points: Sequence[Hashable],
        weights: Mapping,
        dim: int,
        l: int,
        act: Callable | None = None,
        name: str = "",
    ):
        self.points = list(points)
        self.weights = {x: tuple(tuple(w) for w in weights[x]) for x in self.points}
        self.dim = dim
        self.l = l
        self.act = act
        self.name = name
        self.index = {x: i for i, x in enumerate(self.points)}
        for x, ws in self.weights.items():
            if len(ws) != dim:
                raise ValueError(f"point {x} has {len(ws)} weights, expected {dim}")
            for w in ws:
                if len(w) != l or not any(w):
                    raise ValueError(f"bad tangent weight {w} at {x}")

    def __repr__(self):
        return f"FixedPointModel({self.name or '?'}: {len(self.points)} points, dim {self.dim})"

    def __len__(self):
        return len(self.points)

    def to_dict(self) -> dict:
        return {
            "points": [_point_json(x) for x in self.points],
            "weights": {_point_key(x): [list(w) for w in self.weights[x]] for x in self.points},
            "dim": self.dim,
        }

    @classmethod
    def from_dict(cls, data: Mapping, name: str = "") -> "FixedPointModel":
        pts = [_point_from_json(p) for p in data["points"]]
        weights = {p: [tuple(w) for w in data["weights"][_point_key(p)]] for p in pts}
        ws = [w for p in pts for w in weights[p]]
        l = len(ws[0]) if ws else int(data.get("l", 1))
        return cls(pts, weights, int(data["dim"]), l, name=name)


def _point_json(x):
    if isinstance(x, tuple):
        return [_point_json(y) for y in x]
    return x


def _point_from_json(x):
    if isinstance(x, list):
        return tuple(_point_from_json(y) for y in x)
    return x


def _point_key(x) -> str:
    return str(_point_json(x)).replace(" ", "")


def point_model(l: int) -> FixedPointModel:
    return FixedPointModel(["pt"], {"pt": []}, 0, l, act=lambda w, x: x, name="point")


def projective_space_model(chars: Sequence[Character], name: str = "P") -> FixedPointModel:
    """``P(V)`` for ``V`` with distinct characters: weights ``chars[j] - chars[i]`` at point ``i``."""
    n = len(chars)
    l = len(chars[0])
    weights = {
        i: [tuple(b - a for a, b in zip(chars[i], chars[j])) for j in range(n) if j != i] for i in range(n)
    }
    return FixedPointModel(list(range(n)), weights, n - 1, l, name=name)


def product_model(A: FixedPointModel, B: FixedPointModel) -> FixedPointModel:
    pts = [(a, b) for a in A.points for b in B.points]
    weights = {(a, b): A.weights[a] + B.weights[b] for a, b in pts}
    act = None
    if A.act and B.act:
        act = lambda w, x: (A.act(w, x[0]), B.act(w, x[1]))  # noqa: E731
    return FixedPointModel(pts, weights, A.dim + B.dim, A.l, act, f"{A.name}x{B.name}")


class EquivariantClass:
    """Restrictions ``{point: EquivariantScalar}`` of a class on a model."""

    def __init__(self, model: FixedPointModel, alg: TorusAlgebra, values: Mapping):
        missing = [x for x in model.points if x not in values]
        if missing:
            raise ValueError(f"class is missing values at {missing[:3]}")
        self.model = model
        self.alg = alg
        self.values = {x: alg.scalar(values[x]) for x in model.points}

    @classmethod
    def constant(cls, model, alg, c=1) -> "EquivariantClass":
        s = alg.scalar(c)
        return cls(model, alg, {x: s for x in model.points})

    @classmethod
    def zero(cls, model, alg) -> "EquivariantClass":
        return cls.constant(model, alg, 0)

    @classmethod
    def indicator(cls, model, alg, point, value=1) -> "EquivariantClass":
        z = alg.zero()
        return cls(model, alg, {x: (alg.scalar(value) if x == point else z) for x in model.points})

    @classmethod
    def top_euler(cls, model, alg) -> "EquivariantClass":
        return cls(model, alg, {x: alg.scalar(alg.euler_product(model.weights[x])) for x in model.points})

    def __getitem__(self, x):
        return self.values[x]

    def _zip(self, other, op):
        if isinstance(other, EquivariantClass):
            if other.model is not self.model and other.model.points != self.model.points:
                raise ValueError("classes on different models")
            return EquivariantClass(self.model, self.alg, {x: op(self.values[x], other.values[x]) for x in self.model.points})
        return EquivariantClass(self.model, self.alg, {x: op(self.values[x], other) for x in self.model.points})

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self):
        return EquivariantClass(self.model, self.alg, {x: -v for x, v in self.values.items()})

    def __mul__(self, other):
        return self._zip(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return EquivariantClass(self.model, self.alg, {x: v**k for x, v in self.values.items()})

    def reduce(self) -> "EquivariantClass":
        return EquivariantClass(self.model, self.alg, {x: v.reduce() for x, v in self.values.items()})

    def __eq__(self, other):
        if not isinstance(other, EquivariantClass):
            return NotImplemented
        return all(self.values[x] == other.values[x] for x in self.model.points)

    __hash__ = None

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values.values())

    def apply(self, w: WeylElement) -> "EquivariantClass":
        """``(w . a)_{w(x)} = w(a_x)``."""
        if self.model.act is None:
            raise ValueError("model has no Weyl action")
        out = {}
        for x, v in self.values.items():
            out[self.model.act(w, x)] = v.apply(w)
        return EquivariantClass(self.model, self.alg, out)

    def __repr__(self):
        return f"EquivariantClass({self.model.name or '?'}, {len(self.values)} points)"


def eq_pullback(point_map: Mapping | Callable, X: FixedPointModel, a: EquivariantClass) -> EquivariantClass:
    """``(g^* a)_x = a_{g(x)}``."""
    g = point_map if callable(point_map) else point_map.__getitem__
    return EquivariantClass(X, a.alg, {x: a.values[g(x)] for x in X.points})


def eq_pushforward(
    point_map: Mapping | Callable,
    a: EquivariantClass,
    Y: FixedPointModel,
    reduce: bool = True,
) -> EquivariantClass:
    """``(g_* a)_y = sum_{g(x) = y} a_x e(T_y) / e(T_x)``."""
    g = point_map if callable(point_map) else point_map.__getitem__
    alg = a.alg
    X = a.model
    fibers = {y: [] for y in Y.points}
    for x in X.points:
        y = g(x)
        if y not in fibers:
            raise ValueError(f"point {x} maps to {y}, which is not a fixed point of the target")
        fibers[y].append(x)
    out = {}
    for y, xs in fibers.items():
        total = alg.zero()
        for x in xs:
            total = total + a.values[x] * alg.inverse_euler_product(X.weights[x])
        if xs:
            total = (total * alg.euler_product(Y.weights[y])).reduce() if reduce else total * alg.euler_product(Y.weights[y])
        out[y] = total
    return EquivariantClass(Y, alg, out)


def integrate(a: EquivariantClass) -> EquivariantScalar:
    """Pushforward to a point: ``sum_x a_x / e(T_x)``, reduced.

    Raises :class:`TruncationError` if a denominator survives, which only
    happens when the truncation order is too small.
    """
    alg = a.alg
    total = alg.zero()
    for x in a.model.points:
        total = total + a.values[x] * alg.inverse_euler_product(a.model.weights[x])
    out = total.reduce()
    if out.den:
        raise TruncationError(f"denominator {dict(out.den)} not cleared at order {alg.order}; raise --order")
    return out


def milnor_number(M: FixedPointModel, order: int | None = None) -> int:
    """Degree of the ``d``-th Newton class of the tangent bundle, ``d = dim M``.

    For ``d = 0`` every fixed point contributes 1 (the rank-0 convention).
    """
    d = M.dim
    if d == 0:
        return len(M.points)
    alg = TorusAlgebra(TheoryDescriptor("chow"), M.l, order or 2 * d + 2)
    total = alg.zero()
    for x in M.points:
        newton = sum((alg.euler(w) ** d for w in M.weights[x]), alg.S.zero)
        total = total + alg.scalar(newton) * alg.inverse_euler_product(M.weights[x])
    c = total.reduce().constant_term()
    value = c.constant()
    if value.denominator != 1:
        raise ArithmeticError(f"non-integral Milnor number {value}")
    return int(value)

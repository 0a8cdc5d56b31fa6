"""Exact arithmetic kernel.

Three layers live here:

* :class:`CoefficientRing` -- a graded ring ``Q[v_1, ..., v_k]`` (some
  generators may be inverted) together with an optional prime ``p`` used for
  p-locality checks.
* :class:`CoefficientElement` -- a sparse Laurent polynomial over that ring
  with rational coefficients.
* :class:`TruncatedSeries` -- a multivariate power series in named variables,
  with coefficients in a :class:`CoefficientRing`, known modulo total degree
  ``order`` in the series variables.

Everything is exact (``fractions.Fraction``) and immutable after construction.

A series stores its terms in one flat dictionary keyed by the concatenation
of the variable exponent vector and the coefficient-generator exponent vector,
so that a product of two terms is a single tuple addition.
"""

from __future__ import annotations

import json
from collections import defaultdict
from fractions import Fraction
from numbers import Rational as _RationalABC
from operator import add
from typing import Iterable, Mapping, Sequence

__all__ = [
    "Rational",
    "CoefficientRing",
    "CoefficientElement",
    "TruncatedSeries",
    "SeriesRing",
    "InexactDivisionError",
    "divide_exact",
    "p_local_check",
    "is_prime",
]

Rational = Fraction


class InexactDivisionError(ArithmeticError):
    """Raised when a quotient does not exist in the truncated ring.

    ``monomial`` holds the first obstructing term (exponent vector of the
    remainder in the fixed graded-lex order) when one is known.
    """

    def __init__(self, message: str, monomial=None):
        super().__init__(message)
        self.monomial = monomial


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _grlex_key(exp):
    # total degree first, then lex with the first variable largest (x before y)
    return (sum(exp), tuple(-e for e in exp))


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, _RationalABC)):
        return Fraction(c)
    raise TypeError(f"not an exact rational: {c!r}")


# ---------------------------------------------------------------------------
# coefficient rings
# ---------------------------------------------------------------------------


class CoefficientRing:
    """Graded coefficient ring ``Z_(p)[v_1, ..., v_k]`` (rationalised on demand).

    Parameters
    ----------
    gens : names of the generators, e.g. ``("v1", "v2")``.
    degrees : grading of each generator; defaults to ``-(p**j - 1)`` for a
        generator named ``v<j>`` when ``p`` is given, else ``-1``.
    laurent : generators that may carry negative exponents.
    p : the prime of the theory, or ``None`` for integral theories.
    p_local : whether the ring is ``Z_(p)``-based.  Arithmetic never enforces
        this; it only changes what :meth:`is_unit` and integrality checks
        accept.
    """

    __slots__ = ("gens", "degrees", "laurent", "p", "p_local", "_index")

    def __init__(
        self,
        gens: Sequence[str] = (),
        degrees: Sequence[int] | None = None,
        laurent: Iterable[str] = (),
        p: int | None = None,
        p_local: bool = False,
    ):
        gens = tuple(gens)
        if len(set(gens)) != len(gens):
            raise ValueError(f"duplicate generators in {gens}")
        if p is not None and not is_prime(p):
            raise ValueError(f"p={p} is not prime")
        if p_local and p is None:
            raise ValueError("a p-local ring needs a prime")
        laurent = frozenset(laurent)
        if not laurent <= set(gens):
            raise ValueError(f"laurent set {sorted(laurent)} not among generators {gens}")
        if degrees is None:
            degrees = tuple(_default_degree(g, p) for g in gens)
        degrees = tuple(int(d) for d in degrees)
        if len(degrees) != len(gens):
            raise ValueError("one degree per generator")
        self.gens = gens
        self.degrees = degrees
        self.laurent = laurent
        self.p = p
        self.p_local = p_local
        self._index = {g: i for i, g in enumerate(gens)}

    # identity -----------------------------------------------------------

    def _key(self):
        return (self.gens, self.degrees, self.laurent, self.p, self.p_local)

    def __eq__(self, other):
        return isinstance(other, CoefficientRing) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        parts = []
        for g in self.gens:
            parts.append(f"{g}^±1" if g in self.laurent else g)
        base = f"Z_({self.p})" if self.p_local else "Z"
        return f"CoefficientRing({base}[{', '.join(parts)}])"

    # structure ------------------------------------------------------------

    @property
    def ngens(self) -> int:
        return len(self.gens)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"{name!r} is not a generator of {self!r}") from None

    def degree(self, cexp) -> int:
        return sum(e * d for e, d in zip(cexp, self.degrees))

    def zero_exp(self):
        return (0,) * len(self.gens)

    def check_exp(self, cexp):
        for g, e in zip(self.gens, cexp):
            if e < 0 and g not in self.laurent:
                raise ValueError(f"negative exponent on non-invertible generator {g}")

    def union(self, other: "CoefficientRing") -> "CoefficientRing":
        """Smallest ring containing the generators of both (by name)."""
        if other == self or not other.gens:
            return self
        if not self.gens:
            return other
        gens = list(self.gens)
        degrees = list(self.degrees)
        for g, d in zip(other.gens, other.degrees):
            if g in self._index:
                if d != self.degrees[self._index[g]]:
                    raise ValueError(f"generator {g} has conflicting degrees")
                continue
            gens.append(g)
            degrees.append(d)
        p = self.p if self.p is not None else other.p
        if other.p is not None and self.p is not None and other.p != self.p:
            raise ValueError("cannot merge rings at different primes")
        return CoefficientRing(
            gens, degrees, self.laurent | other.laurent, p, self.p_local and other.p_local
        )

    def without(self, names: Iterable[str]) -> "CoefficientRing":
        names = set(names)
        keep = [i for i, g in enumerate(self.gens) if g not in names]
        return CoefficientRing(
            [self.gens[i] for i in keep],
            [self.degrees[i] for i in keep],
            self.laurent - names,
            self.p,
            self.p_local,
        )

    def with_laurent(self, names: Iterable[str]) -> "CoefficientRing":
        return CoefficientRing(self.gens, self.degrees, self.laurent | set(names), self.p, self.p_local)

    def rationalized(self) -> "CoefficientRing":
        return CoefficientRing(self.gens, self.degrees, self.laurent, self.p, False)

    # elements ---------------------------------------------------------------

    def element(self, terms=None) -> "CoefficientElement":
        return CoefficientElement(self, terms or {})

    def one(self) -> "CoefficientElement":
        return CoefficientElement(self, {self.zero_exp(): Fraction(1)})

    def zero(self) -> "CoefficientElement":
        return CoefficientElement(self, {})

    def gen(self, name: str, power: int = 1) -> "CoefficientElement":
        e = [0] * self.ngens
        e[self.index(name)] = power
        return CoefficientElement(self, {tuple(e): Fraction(1)})

    def __call__(self, value) -> "CoefficientElement":
        if isinstance(value, CoefficientElement):
            return value.embed(self)
        return CoefficientElement(self, {self.zero_exp(): _as_fraction(value)})

    def is_unit(self, e: "CoefficientElement") -> bool:
        """Units: single terms on invertible generators with a unit scalar.

        The scalar must be ``±1`` over ``Z``, or prime to ``p`` in numerator and
        denominator for a p-local ring.
        """
        if len(e.terms) != 1:
            return False
        (exp, c), = e.terms.items()
        for g, k in zip(self.gens, exp):
            if k != 0 and g not in self.laurent:
                return False
        if self.p_local:
            return c.numerator % self.p != 0 and c.denominator % self.p != 0
        return abs(c) == 1


def _default_degree(name: str, p: int | None) -> int:
    if p is not None and name.startswith("v") and name[1:].isdigit():
        return -(p ** int(name[1:]) - 1)
    return -1


def _embed_map(src: CoefficientRing, dst: CoefficientRing):
    """Index map for re-expressing exponents of ``src`` in ``dst``."""
    if src == dst or src.gens == dst.gens:
        return None
    return [dst.index(g) for g in src.gens]


def _remap(cexp, imap, n):
    if imap is None:
        return cexp
    out = [0] * n
    for i, e in zip(imap, cexp):
        out[i] = e
    return tuple(out)


# ---------------------------------------------------------------------------
# coefficient elements
# ---------------------------------------------------------------------------


class CoefficientElement:
    """Sparse (Laurent) polynomial in the generators of a coefficient ring."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: CoefficientRing, terms: Mapping):
        clean = {}
        n = ring.ngens
        for e, c in terms.items():
            e = tuple(e)
            if len(e) != n:
                raise ValueError(f"exponent {e} has wrong length for {ring!r}")
            c = _as_fraction(c)
            if c:
                ring.check_exp(e)
                clean[e] = clean.get(e, 0) + c
        self.ring = ring
        self.terms = {e: c for e, c in clean.items() if c}

    @classmethod
    def _raw(cls, ring, terms):
        obj = cls.__new__(cls)
        obj.ring = ring
        obj.terms = terms
        return obj

    # conversions ------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, CoefficientElement):
            if other.ring == self.ring:
                return self, other
            ring = self.ring.union(other.ring)
            return self.embed(ring), other.embed(ring)
        return self, self.ring(other)

    def embed(self, ring: CoefficientRing) -> "CoefficientElement":
        if ring == self.ring:
            return self
        imap = _embed_map(self.ring, ring)
        n = ring.ngens
        return CoefficientElement._raw(ring, {_remap(e, imap, n): c for e, c in self.terms.items()})

    # predicates -------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        z = self.ring.zero_exp()
        return all(e == z for e in self.terms)

    def constant(self) -> Fraction:
        return self.terms.get(self.ring.zero_exp(), Fraction(0))

    def is_unit(self) -> bool:
        return self.ring.is_unit(self)

    def degree(self):
        """Common degree of all terms, or ``None`` if not homogeneous."""
        degs = {self.ring.degree(e) for e in self.terms}
        if len(degs) > 1:
            return None
        return degs.pop() if degs else None

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]))

    # arithmetic -------------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            return NotImplemented
        a, b = self._coerce(other)
        out = dict(a.terms)
        for e, c in b.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return CoefficientElement._raw(a.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return CoefficientElement._raw(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, TruncatedSeries):
            return NotImplemented
        return self + (-self._coerce(other)[1])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return NotImplemented
        if not isinstance(other, CoefficientElement):
            c = _as_fraction(other)
            if not c:
                return self.ring.zero()
            return CoefficientElement._raw(self.ring, {e: v * c for e, v in self.terms.items()})
        a, b = self._coerce(other)
        out = defaultdict(Fraction)
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                out[tuple(map(add, e1, e2))] += c1 * c2
        return CoefficientElement._raw(a.ring, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> "CoefficientElement":
        """Inverse of a single-term element (over the rationalised ring)."""
        if len(self.terms) != 1:
            raise InexactDivisionError(f"{self} is not invertible")
        (e, c), = self.terms.items()
        neg = tuple(-k for k in e)
        self.ring.check_exp(neg)
        return CoefficientElement._raw(self.ring, {neg: 1 / c})

    def __truediv__(self, other):
        if isinstance(other, CoefficientElement):
            return self.exact_div(other)
        c = _as_fraction(other)
        return CoefficientElement._raw(self.ring, {e: v / c for e, v in self.terms.items()})

    def exact_div(self, other: "CoefficientElement") -> "CoefficientElement":
        """Quotient in the (rationalised) ring; raises if it does not exist."""
        a, b = self._coerce(other)
        if not b.terms:
            raise ZeroDivisionError("division by zero coefficient")
        if len(b.terms) == 1:
            (eb, cb), = b.terms.items()
            out = {}
            for e, c in a.terms.items():
                q = tuple(x - y for x, y in zip(e, eb))
                for g, k in zip(a.ring.gens, q):
                    if k < 0 and g not in a.ring.laurent:
                        raise InexactDivisionError(f"{a} is not divisible by {b}", q)
                out[q] = c / cb
            return CoefficientElement._raw(a.ring, out)
        return _poly_exact_div(a, b)

    def specialize(self, values: Mapping[str, object]) -> "CoefficientElement":
        """Substitute numbers for some generators; they leave the ring."""
        ring = self.ring.without(values)
        idx = [self.ring.index(g) for g in values]
        vals = [_as_fraction(v) for v in values.values()]
        keep = [i for i, g in enumerate(self.ring.gens) if g not in values]
        out = defaultdict(Fraction)
        for e, c in self.terms.items():
            f = c
            for i, v in zip(idx, vals):
                if e[i]:
                    if v == 0 and e[i] < 0:
                        raise ZeroDivisionError(f"{self.ring.gens[i]} -> 0 with negative exponent")
                    f *= v ** e[i]
            if f:
                out[tuple(e[i] for i in keep)] += f
        return CoefficientElement._raw(ring, {e: c for e, c in out.items() if c})

    # comparison / display -----------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            return NotImplemented
        if isinstance(other, CoefficientElement):
            a, b = self._coerce(other)
            return a.terms == b.terms
        try:
            c = _as_fraction(other)
        except TypeError:
            return NotImplemented
        if not c:
            return not self.terms
        return self.terms == {self.ring.zero_exp(): c}

    __hash__ = None

    def __repr__(self):
        return f"CoefficientElement({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = _format_monomial(self.ring.gens, e)
            parts.append(_format_term(c, mono))
        return _join_terms(parts)


def _poly_exact_div(a: CoefficientElement, b: CoefficientElement) -> CoefficientElement:
    ring = a.ring
    n = ring.ngens
    if not a.terms:
        return ring.zero()
    # shift both into the polynomial part; b' is then prime to the Laurent gens
    sa = [min(e[i] for e in a.terms) for i in range(n)]
    sb = [min(e[i] for e in b.terms) for i in range(n)]
    A = {tuple(x - s for x, s in zip(e, sa)): c for e, c in a.terms.items()}
    B = {tuple(x - s for x, s in zip(e, sb)): c for e, c in b.terms.items()}
    lead_b = max(B)
    lc_b = B[lead_b]
    Q = {}
    R = dict(A)
    while R:
        lead = max(R)
        q = tuple(x - y for x, y in zip(lead, lead_b))
        if any(k < 0 for k in q):
            raise InexactDivisionError(f"{a} is not divisible by {b}", lead)
        qc = R[lead] / lc_b
        Q[q] = qc
        for e, c in B.items():
            k = tuple(map(add, q, e))
            v = R.get(k, 0) - qc * c
            if v:
                R[k] = v
            else:
                R.pop(k, None)
    shift = [x - y for x, y in zip(sa, sb)]
    out = {tuple(map(add, e, shift)): c for e, c in Q.items()}
    for e in out:
        try:
            ring.check_exp(e)
        except ValueError:
            raise InexactDivisionError(f"{a} is not divisible by {b}", e) from None
    return CoefficientElement._raw(ring, out)


def _format_monomial(names, exp):
    bits = []
    for name, k in zip(names, exp):
        if k == 1:
            bits.append(name)
        elif k:
            bits.append(f"{name}^{k}")
    return "*".join(bits)


def _format_term(c: Fraction, mono: str) -> str:
    if not mono:
        return str(c)
    if c == 1:
        return mono
    if c == -1:
        return "-" + mono
    if c.denominator == 1:
        return f"{c.numerator}*{mono}"
    return f"{c.numerator}/{c.denominator}*{mono}"


def _join_terms(parts):
    s = parts[0]
    for p in parts[1:]:
        s += " - " + p[1:] if p.startswith("-") else " + " + p
    return s


# ---------------------------------------------------------------------------
# p-locality
# ---------------------------------------------------------------------------


def p_local_check(e, p: int):
    """Return ``(ok, witness)``: ``ok`` iff every coefficient is p-integral.

    ``e`` may be a number, a :class:`CoefficientElement` or a
    :class:`TruncatedSeries`.  The witness is the first offending term in
    graded-lex order as ``(exponent, coefficient)``, or ``None``; for a series
    the exponent is the pair ``(variable exponent, generator exponent)``.
    """
    if isinstance(e, TruncatedSeries):
        items = [((xe, ce), c) for xe, ce, c in e.items()]
    elif isinstance(e, CoefficientElement):
        items = e.sorted_terms()
    else:
        c = _as_fraction(e)
        items = [((), c)] if c else []
    for exp, c in items:
        if c.denominator % p == 0:
            return False, (exp, c)
    return True, None


# ---------------------------------------------------------------------------
# truncated series
# ---------------------------------------------------------------------------


class TruncatedSeries:
    """Power series in ``vars`` over ``ring``, known modulo total degree ``order``.

    Build them through :class:`SeriesRing` or :meth:`from_terms`; terms are a
    mapping from variable exponent tuples to coefficients (numbers or
    :class:`CoefficientElement`).

    Equality compares modulo the smaller of the two orders.
    """

    __slots__ = ("vars", "ring", "order", "_terms")

    def __init__(self, vars: Sequence[str], order: int, terms: Mapping = (), ring: CoefficientRing | None = None):
        vars = tuple(vars)
        ring = ring if ring is not None else CoefficientRing()
        nv = len(vars)
        flat = {}
        for xe, c in dict(terms).items():
            xe = tuple(xe)
            if len(xe) != nv:
                raise ValueError(f"exponent {xe} does not match variables {vars}")
            if sum(xe) >= order:
                continue
            if isinstance(c, CoefficientElement):
                c = c.embed(ring) if c.ring != ring else c
                for ce, v in c.terms.items():
                    k = xe + ce
                    flat[k] = flat.get(k, 0) + v
            else:
                c = _as_fraction(c)
                if c:
                    k = xe + ring.zero_exp()
                    flat[k] = flat.get(k, 0) + c
        self.vars = vars
        self.ring = ring
        self.order = int(order)
        self._terms = {k: c for k, c in flat.items() if c}

    @classmethod
    def _raw(cls, vars, ring, order, terms):
        obj = cls.__new__(cls)
        obj.vars = vars
        obj.ring = ring
        obj.order = order
        obj._terms = terms
        return obj

    from_terms = classmethod(lambda cls, vars, order, terms, ring=None: cls(vars, order, terms, ring))

    # basic accessors -----------------------------------------------------------

    @property
    def nvars(self):
        return len(self.vars)

    def _xdeg(self, key):
        return sum(key[: len(self.vars)])

    def _sort_key(self, key):
        nv = len(self.vars)
        return _grlex_key(key[:nv]) + _grlex_key(key[nv:])

    def items(self):
        """``(variable exponent, coefficient exponent, rational)`` in grlex order."""
        nv = len(self.vars)
        for k in sorted(self._terms, key=self._sort_key):
            yield k[:nv], k[nv:], self._terms[k]

    def coefficients(self) -> dict:
        """Mapping variable exponent -> :class:`CoefficientElement`."""
        nv = len(self.vars)
        grouped = defaultdict(dict)
        for k, c in self._terms.items():
            grouped[k[:nv]][k[nv:]] = c
        return {xe: CoefficientElement._raw(self.ring, t) for xe, t in grouped.items()}

    def coefficient(self, xexp) -> CoefficientElement:
        xexp = tuple(xexp)
        nv = len(self.vars)
        if len(xexp) != nv:
            raise ValueError("wrong exponent length")
        if sum(xexp) >= self.order:
            raise ValueError(f"coefficient of degree {sum(xexp)} is beyond the truncation order {self.order}")
        return CoefficientElement._raw(
            self.ring, {k[nv:]: c for k, c in self._terms.items() if k[:nv] == xexp}
        )

    def __getitem__(self, xexp):
        if isinstance(xexp, int):
            xexp = (xexp,)
        return self.coefficient(xexp)

    def constant_term(self) -> CoefficientElement:
        return self.coefficient((0,) * len(self.vars))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def valuation(self):
        """Lowest total degree present (``order`` for the zero series)."""
        if not self._terms:
            return self.order
        return min(self._xdeg(k) for k in self._terms)

    def homogeneous_part(self, d: int) -> "TruncatedSeries":
        return TruncatedSeries._raw(
            self.vars, self.ring, self.order, {k: c for k, c in self._terms.items() if self._xdeg(k) == d}
        )

    def lowest_form(self) -> "TruncatedSeries":
        return self.homogeneous_part(self.valuation())

    def degree(self):
        """Grading of a homogeneous series (variables 1, generators per ring)."""
        nv = len(self.vars)
        degs = {sum(k[:nv]) + self.ring.degree(k[nv:]) for k in self._terms}
        if len(degs) > 1:
            return None
        return degs.pop() if degs else None

    def is_homogeneous(self) -> bool:
        return not self._terms or self.degree() is not None

    def max_degree(self) -> int:
        return max((self._xdeg(k) for k in self._terms), default=-1)

    # construction helpers ----------------------------------------------------

    def _like(self, terms, order=None):
        return TruncatedSeries._raw(self.vars, self.ring, self.order if order is None else order, terms)

    def zero(self):
        return self._like({})

    def one(self):
        return self._like({(0,) * (len(self.vars) + self.ring.ngens): Fraction(1)} if self.order > 0 else {})

    def truncate(self, order: int) -> "TruncatedSeries":
        order = min(order, self.order)
        return self._like({k: c for k, c in self._terms.items() if self._xdeg(k) < order}, order)

    def with_ring(self, ring: CoefficientRing) -> "TruncatedSeries":
        if ring == self.ring:
            return self
        imap = _embed_map(self.ring, ring)
        nv = len(self.vars)
        n = ring.ngens
        out = {}
        for k, c in self._terms.items():
            ce = _remap(k[nv:], imap, n)
            ring.check_exp(ce)
            out[k[:nv] + ce] = c
        return TruncatedSeries._raw(self.vars, ring, self.order, out)

    def rename(self, vars: Sequence[str]) -> "TruncatedSeries":
        vars = tuple(vars)
        if len(vars) != len(self.vars):
            raise ValueError("rename needs the same number of variables")
        return TruncatedSeries._raw(vars, self.ring, self.order, dict(self._terms))

    def reorder_vars(self, vars: Sequence[str]) -> "TruncatedSeries":
        """Re-express over a superset/permutation of the variables."""
        vars = tuple(vars)
        if vars == self.vars:
            return self
        pos = [vars.index(v) for v in self.vars]
        nv = len(self.vars)
        nn = len(vars)
        out = {}
        for k, c in self._terms.items():
            xe = [0] * nn
            for i, e in zip(pos, k[:nv]):
                xe[i] = e
            out[tuple(xe) + k[nv:]] = c
        return TruncatedSeries._raw(vars, self.ring, self.order, out)

    # arithmetic ---------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            if other.vars != self.vars:
                raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")
            if other.ring != self.ring:
                ring = self.ring.union(other.ring)
                return self.with_ring(ring), other.with_ring(ring)
            return self, other
        if isinstance(other, CoefficientElement):
            ring = self.ring.union(other.ring)
            s = self.with_ring(ring)
            return s, TruncatedSeries(self.vars, self.order, {(0,) * len(self.vars): other}, ring)
        c = _as_fraction(other)
        return self, TruncatedSeries(self.vars, self.order, {(0,) * len(self.vars): c}, self.ring)

    def __add__(self, other):
        a, b = self._coerce(other)
        order = min(a.order, b.order)
        out = {}
        for k, c in a._terms.items():
            if a._xdeg(k) < order:
                out[k] = c
        for k, c in b._terms.items():
            if b._xdeg(k) < order:
                v = out.get(k, 0) + c
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return TruncatedSeries._raw(a.vars, a.ring, order, out)

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        a, b = self._coerce(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, (TruncatedSeries, CoefficientElement)):
            c = _as_fraction(other)
            if not c:
                return self.zero()
            return self._like({k: v * c for k, v in self._terms.items()})
        a, b = self._coerce(other)
        order = min(a.order, b.order)
        return TruncatedSeries._raw(a.vars, a.ring, order, _mul_flat(a._terms, b._terms, len(a.vars), order))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (TruncatedSeries, CoefficientElement)):
            a, b = self._coerce(other)
            return divide_exact(a, b)
        c = _as_fraction(other)
        return self._like({k: v / c for k, v in self._terms.items()})

    def inverse(self) -> "TruncatedSeries":
        return divide_exact(self.one(), self)

    def map_coefficients(self, fn) -> "TruncatedSeries":
        """Apply ``fn`` to each :class:`CoefficientElement` (ring may change)."""
        coeffs = {xe: fn(c) for xe, c in self.coefficients().items()}
        ring = next((c.ring for c in coeffs.values() if isinstance(c, CoefficientElement)), self.ring)
        return TruncatedSeries(self.vars, self.order, coeffs, ring)

    def specialize(self, values: Mapping[str, object]) -> "TruncatedSeries":
        """Substitute numbers for coefficient generators (e.g. ``v_n -> 1``)."""
        ring = self.ring.without(values)
        coeffs = {xe: c.specialize(values) for xe, c in self.coefficients().items()}
        return TruncatedSeries(self.vars, self.order, coeffs, ring)

    # comparison -----------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            if other.vars != self.vars:
                return False
            a, b = self._coerce(other)
            order = min(a.order, b.order)
            return a.truncate(order)._terms == b.truncate(order)._terms
        if isinstance(other, (int, Fraction, CoefficientElement)):
            return self == self._coerce(other)[1]
        return NotImplemented

    __hash__ = None

    # composition -----------------------------------------------------------------

    def substitute(self, assignments: Mapping[str, "TruncatedSeries"]) -> "TruncatedSeries":
        """Replace variables by series with zero constant term.

        All replacement series must share one variable list, which becomes
        the variable list of the result; variables of ``self`` that are not
        replaced must appear in it (they map to themselves).
        """
        if not assignments:
            return self
        images = list(assignments.values())
        target_vars = images[0].vars
        ring = self.ring
        for s in images:
            if s.vars != target_vars:
                raise ValueError("replacement series must share their variables")
            ring = ring.union(s.ring)
        for name in assignments:
            if name not in self.vars:
                raise ValueError(f"{name!r} is not a variable of this series")
        subs = []
        for v in self.vars:
            if v in assignments:
                s = assignments[v].with_ring(ring)
            elif v in target_vars:
                s = _variable(target_vars, v, min(i.order for i in images), ring)
            else:
                raise ValueError(f"no image for variable {v!r}")
            if not s.constant_term().is_zero():
                raise ValueError(f"substituted series for {v!r} has a nonzero constant term")
            subs.append(s)
        order = min([self.order] + [s.order for s in subs])
        return _horner_substitute(self, subs, target_vars, ring, order)

    def __call__(self, *args):
        return self.substitute(dict(zip(self.vars, args)))

    def reversion(self) -> "TruncatedSeries":
        """Compositional inverse ``g`` of a univariate ``f = t + ...``."""
        if len(self.vars) != 1:
            raise ValueError("reversion needs a univariate series")
        if not self.constant_term().is_zero():
            raise ValueError("reversion needs a zero constant term")
        if self.order < 2:
            return self
        if self.coefficient((1,)) != 1:
            raise ValueError(f"leading coefficient must be 1, got {self.coefficient((1,))}")
        # Lagrange inversion: [t^k] g = (1/k) [t^(k-1)] (t/f)^k
        t = self.one()._like({(1,) + self.ring.zero_exp(): Fraction(1)})
        h = divide_exact(t, self)  # order N - 1
        N = self.order
        coeffs = {(1,): self.ring.one()}
        hk = h
        for k in range(2, N):
            hk = hk * h
            c = hk.coefficient((k - 1,))
            if c:
                coeffs[(k,)] = c / k
        return TruncatedSeries(self.vars, N, coeffs, self.ring)

    def derivative(self, var: str) -> "TruncatedSeries":
        i = self.vars.index(var)
        out = {}
        for k, c in self._terms.items():
            e = k[i]
            if e:
                nk = k[:i] + (e - 1,) + k[i + 1 :]
                out[nk] = c * e
        return self._like(out, self.order - 1)

    # display / serialisation ---------------------------------------------------------

    def __repr__(self):
        return f"TruncatedSeries({self})"

    def __str__(self):
        nv = len(self.vars)
        if not self._terms:
            body = "0"
        else:
            parts = []
            for xe, c in sorted(self.coefficients().items(), key=lambda t: _grlex_key(t[0])):
                mono = _format_monomial(self.vars, xe)
                if len(c.terms) == 1:
                    (ce, v), = c.terms.items()
                    full = "*".join(b for b in (_format_monomial(c.ring.gens, ce), mono) if b)
                    parts.append(_format_term(v, full))
                else:
                    parts.append(f"({c})*{mono}" if mono else f"{c}")
            body = _join_terms(parts)
        return f"{body} + O(deg {self.order})" if nv else body

    def to_dict(self) -> dict:
        terms = []
        for xe, ce, c in self.items():
            terms.append(
                {
                    "exp": list(xe),
                    "coeff": {"monomial": list(ce), "num": str(c.numerator), "den": str(c.denominator)},
                }
            )
        return {
            "vars": list(self.vars),
            "gens": list(self.ring.gens),
            "order": self.order,
            "terms": terms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, data: Mapping, ring: CoefficientRing | None = None) -> "TruncatedSeries":
        gens = tuple(data.get("gens", ()))
        if ring is None:
            ring = CoefficientRing(gens)
        elif ring.gens != gens:
            raise ValueError(f"serialised generators {gens} do not match {ring!r}")
        vars = tuple(data["vars"])
        out = {}
        for t in data["terms"]:
            key = tuple(t["exp"]) + tuple(t["coeff"]["monomial"])
            out[key] = Fraction(int(t["coeff"]["num"]), int(t["coeff"]["den"]))
        s = cls._raw(vars, ring, int(data["order"]), {})
        s._terms = {k: c for k, c in out.items() if c and s._xdeg(k) < s.order}
        return s

    @classmethod
    def from_json(cls, text: str, ring: CoefficientRing | None = None) -> "TruncatedSeries":
        return cls.from_dict(json.loads(text), ring)


def _mul_flat(a: dict, b: dict, nv: int, order: int) -> dict:
    if not a or not b:
        return {}
    if len(a) < len(b):
        a, b = b, a
    bl = sorted(((sum(k[:nv]), k, c) for k, c in b.items()), key=lambda t: t[0])
    out = {}
    get = out.get
    for ka, ca in a.items():
        lim = order - sum(ka[:nv])
        if lim <= 0:
            continue
        for db, kb, cb in bl:
            if db >= lim:
                break
            k = tuple(map(add, ka, kb))
            out[k] = get(k, 0) + ca * cb
    return {k: c for k, c in out.items() if c}


def _variable(vars, name, order, ring):
    e = [0] * (len(vars) + ring.ngens)
    e[vars.index(name)] = 1
    return TruncatedSeries._raw(tuple(vars), ring, order, {tuple(e): Fraction(1)} if order > 1 else {})


def _horner_substitute(f: TruncatedSeries, subs, target_vars, ring, order):
    nv = len(f.vars)
    imap = _embed_map(f.ring, ring)
    nc = ring.ngens
    zero_x = (0,) * len(target_vars)
    powers = [dict() for _ in subs]

    def power(i, e):
        cache = powers[i]
        if e not in cache:
            if e == 1:
                cache[e] = subs[i].truncate(order)
            else:
                h = e // 2
                cache[e] = power(i, h) * power(i, e - h)
        return cache[e]

    def rec(keys, i, lim):
        if lim <= 0:
            return TruncatedSeries._raw(target_vars, ring, order, {})
        if i == nv:
            out = {}
            for k in keys:
                ce = _remap(k[nv:], imap, nc)
                out[zero_x + ce] = out.get(zero_x + ce, 0) + f._terms[k]
            return TruncatedSeries._raw(target_vars, ring, order, {k: c for k, c in out.items() if c})
        groups = defaultdict(list)
        for k in keys:
            groups[k[i]].append(k)
        total = {}
        for e in sorted(groups):
            if e >= lim:
                continue
            inner = rec(groups[e], i + 1, lim - e)
            if e:
                inner = inner * power(i, e)
            for k, c in inner._terms.items():
                v = total.get(k, 0) + c
                if v:
                    total[k] = v
                else:
                    total.pop(k, None)
        return TruncatedSeries._raw(target_vars, ring, order, total)

    return rec(list(f._terms), 0, order)


def divide_exact(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Quotient ``q`` with ``q*b == a`` in the truncated ring.

    When ``b`` has valuation ``k > 0`` the quotient is known modulo degree
    ``min(a.order, b.order) - k``.  Raises :class:`InexactDivisionError`
    carrying the first obstructing monomial when no quotient exists.
    """
    a, b = a._coerce(b)
    if b.is_zero():
        raise ZeroDivisionError("division by the zero series")
    nv = len(a.vars)
    ring = a.ring
    k = b.valuation()
    order = min(a.order, b.order) - k
    by_deg_a = defaultdict(dict)
    for key, c in a._terms.items():
        d = sum(key[:nv])
        if d < k:
            raise InexactDivisionError(
                f"dividend has terms below the divisor's valuation {k}", key[:nv]
            )
        by_deg_a[d][key] = c
    by_deg_b = defaultdict(dict)
    for key, c in b._terms.items():
        by_deg_b[sum(key[:nv])][key] = c
    lead = _group(by_deg_b[k], nv, ring)
    acc = defaultdict(dict)  # degree -> contributions already subtracted
    q_terms = {}
    for j in range(max(order, 0)):
        rem = dict(by_deg_a.get(j + k, {}))
        for key, c in acc.pop(j + k, {}).items():
            v = rem.get(key, 0) - c
            if v:
                rem[key] = v
            else:
                rem.pop(key, None)
        if not rem:
            continue
        qj = _homog_div(rem, lead, nv, ring)
        q_terms.update(qj)
        for d, bd in by_deg_b.items():
            if d == k or j + d >= order + k:
                continue
            prod = _mul_flat(qj, bd, nv, order + k)
            tgt = acc[j + d]
            for key, c in prod.items():
                tgt[key] = tgt.get(key, 0) + c
    return TruncatedSeries._raw(a.vars, ring, max(order, 0), q_terms)


def _group(flat, nv, ring):
    g = defaultdict(dict)
    for key, c in flat.items():
        g[key[:nv]][key[nv:]] = c
    return {xe: CoefficientElement._raw(ring, t) for xe, t in g.items()}


def _homog_div(rem_flat, lead, nv, ring):
    """Exact division of a homogeneous polynomial by another (leading terms)."""
    R = _group(rem_flat, nv, ring)
    lx = max(lead)
    lc = lead[lx]
    Q = {}
    while R:
        mx = max(R)
        qx = tuple(x - y for x, y in zip(mx, lx))
        if any(e < 0 for e in qx):
            first = min(R, key=_grlex_key)
            raise InexactDivisionError(f"inexact division: obstruction at monomial {first}", first)
        try:
            qc = R[mx].exact_div(lc)
        except InexactDivisionError:
            raise InexactDivisionError(f"inexact division: obstruction at monomial {mx}", mx) from None
        Q[qx] = qc
        for ex, c in lead.items():
            tx = tuple(map(add, qx, ex))
            v = R.get(tx)
            v = -(qc * c) if v is None else v - qc * c
            if v.terms:
                R[tx] = v
            else:
                R.pop(tx, None)
    out = {}
    for qx, c in Q.items():
        for ce, v in c.terms.items():
            out[qx + ce] = v
    return out


class SeriesRing:
    """Parent object handing out variables and constants of one series ring."""

    def __init__(self, vars: Sequence[str], order: int, ring: CoefficientRing | None = None):
        self.vars = tuple(vars)
        self.order = int(order)
        self.ring = ring if ring is not None else CoefficientRing()

    def __repr__(self):
        return f"SeriesRing({self.vars}, order={self.order}, {self.ring!r})"

    def var(self, name: str) -> TruncatedSeries:
        return _variable(self.vars, name, self.order, self.ring)

    @property
    def gens(self):
        return tuple(self.var(v) for v in self.vars)

    def coeff_gen(self, name: str, power: int = 1) -> TruncatedSeries:
        return self.constant(self.ring.gen(name, power))

    def constant(self, c) -> TruncatedSeries:
        return TruncatedSeries(self.vars, self.order, {(0,) * len(self.vars): c}, self.ring)

    @property
    def one(self):
        return self.constant(1)

    @property
    def zero(self):
        return TruncatedSeries(self.vars, self.order, {}, self.ring)

    def __call__(self, terms: Mapping) -> TruncatedSeries:
        return TruncatedSeries(self.vars, self.order, terms, self.ring)

    def parse(self, text: str) -> TruncatedSeries:
        """Read a polynomial such as ``"x^2*y - 3/2*v1*x"``.

        Names may be series variables or coefficient generators; ``^`` and
        ``**`` both denote powers.
        """
        import ast

        tree = ast.parse(text.replace("^", "**"), mode="eval")

        def ev(node):
            if isinstance(node, ast.Expression):
                return ev(node.body)
            if isinstance(node, ast.Constant) and isinstance(node.value, int):
                return self.constant(node.value)
            if isinstance(node, ast.Name):
                if node.id in self.vars:
                    return self.var(node.id)
                if node.id in self.ring.gens:
                    return self.coeff_gen(node.id)
                raise ValueError(f"unknown name {node.id!r} in {text!r}")
            if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
                v = ev(node.operand)
                return -v if isinstance(node.op, ast.USub) else v
            if isinstance(node, ast.BinOp):
                if isinstance(node.op, ast.Pow):
                    k = ast.literal_eval(node.right)
                    if not isinstance(k, int):
                        raise ValueError("exponents must be integer literals")
                    if k < 0:
                        return ev(node.left).inverse() ** (-k)
                    return ev(node.left) ** k
                a, b = ev(node.left), ev(node.right)
                if isinstance(node.op, ast.Add):
                    return a + b
                if isinstance(node.op, ast.Sub):
                    return a - b
                if isinstance(node.op, ast.Mult):
                    return a * b
                if isinstance(node.op, ast.Div):
                    return a / b
            raise ValueError(f"unsupported syntax in {text!r}")

        return ev(tree)

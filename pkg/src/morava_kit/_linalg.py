"""Small exact matrix helpers over coefficient rings and truncated series."""

from __future__ import annotations

from .series import CoefficientElement, CoefficientRing, TruncatedSeries


def bareiss_det(M, ring: CoefficientRing) -> CoefficientElement:
    """Fraction-free determinant (every division is exact in ``ring``)."""
    n = len(M)
    if n == 0:
        return ring.one()
    A = [[ring(c) if not isinstance(c, CoefficientElement) else c for c in row] for row in M]
    sign = 1
    prev = ring.one()
    for k in range(n - 1):
        if A[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not A[i][k].is_zero()), None)
            if swap is None:
                return ring.zero()
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]).exact_div(prev)
        prev = A[k][k]
    d = A[n - 1][n - 1]
    return d if sign > 0 else -d


def inverse(M, ring: CoefficientRing):
    """Gauss-Jordan inverse over the rationalised ring; pivots must be invertible there."""
    n = len(M)
    A = [[ring(c) if not isinstance(c, CoefficientElement) else c for c in row] + [ring.one() if i == j else ring.zero() for j in range(n)] for i, row in enumerate(M)]
    for k in range(n):
        piv = next((i for i in range(k, n) if not A[i][k].is_zero() and len(A[i][k].terms) == 1), None)
        if piv is None:
            piv = next((i for i in range(k, n) if not A[i][k].is_zero()), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        A[k], A[piv] = A[piv], A[k]
        p = A[k][k]
        A[k] = [c.exact_div(p) for c in A[k]]
        for i in range(n):
            if i != k and not A[i][k].is_zero():
                f = A[i][k]
                A[i] = [a - f * b for a, b in zip(A[i], A[k])]
    return [row[n:] for row in A]


def series_matrix_inverse(M):
    """Inverse of a square matrix of truncated series with invertible constant part.

    Uses ``M^{-1} = sum_k (1 - M0^{-1} M)^k M0^{-1}``; the correction has
    positive valuation, so the sum terminates at the truncation order.
    """
    n = len(M)
    proto = M[0][0]
    ring = proto.ring
    for row in M:
        for c in row:
            ring = ring.union(c.ring)
    M = [[c.with_ring(ring) for c in row] for row in M]
    order = min(c.order for row in M for c in row)
    zero = TruncatedSeries(proto.vars, order, {}, ring)
    one = zero + 1
    M0 = [[c.constant_term() for c in row] for row in M]
    M0inv = inverse(M0, ring)
    M0s = [[zero + c for c in row] for row in M0inv]
    N = _mat_sub(_identity(n, one, zero), _mat_mul(M0s, M, zero))
    total = _identity(n, one, zero)
    power = total
    for _ in range(order):
        power = _mat_mul(power, N, zero)
        if all(c.is_zero() for row in power for c in row):
            break
        total = _mat_add(total, power)
    return _mat_mul(total, M0s, zero)


def _identity(n, one, zero):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def _mat_mul(A, B, zero):
    n, m, k = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(k):
            s = zero
            for t in range(m):
                if not A[i][t].is_zero() and not B[t][j].is_zero():
                    s = s + A[i][t] * B[t][j]
            row.append(s)
        out.append(row)
    return out


def _mat_add(A, B):
    return [[a + b for a, b in zip(r, s)] for r, s in zip(A, B)]


def _mat_sub(A, B):
    return [[a - b for a, b in zip(r, s)] for r, s in zip(A, B)]

"""Dense exact linear algebra over the rationals.

Matrices are lists of lists of Fraction. Sizes here are tiny (cone
dimensions), so plain Gaussian elimination is the right tool.
"""
from __future__ import annotations

from fractions import Fraction

QMat = list[list[Fraction]]


def qmat(rows) -> QMat:
    return [[Fraction(x) for x in row] for row in rows]


def qidentity(n: int) -> QMat:
    return [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]


def qmatvec(m: QMat, v) -> tuple[Fraction, ...]:
    return tuple(sum((row[j] * v[j] for j in range(len(v))), Fraction(0)) for row in m)


def qmatmul(a: QMat, b: QMat) -> QMat:
    cols = len(b[0]) if b else 0
    return [
        [sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(cols)]
        for i in range(len(a))
    ]


def qrref(m: QMat) -> tuple[QMat, list[int]]:
    """Reduced row echelon form; returns (rref, pivot column indices)."""
    a = [row[:] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = Fraction(1) / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def qrank(m: QMat) -> int:
    if not m:
        return 0
    return len(qrref(m)[1])


def qsolve(a: QMat, b) -> tuple[Fraction, ...] | None:
    """One solution of a x = b, or None if inconsistent."""
    if not a:
        return () if all(x == 0 for x in b) else None
    n = len(a[0])
    aug = [row[:] + [Fraction(b[i])] for i, row in enumerate(a)]
    red, pivots = qrref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for r, c in enumerate(pivots):
        x[c] = red[r][n]
    return tuple(x)


def qnullspace(m: QMat) -> list[tuple[Fraction, ...]]:
    """Basis of the right null space."""
    if not m:
        return []
    n = len(m[0])
    red, pivots = qrref(m)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(tuple(v))
    return basis


def qinverse(m: QMat) -> QMat | None:
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("inverse needs a square matrix")
    aug = [row[:] + qidentity(n)[i] for i, row in enumerate(m)]
    red, pivots = qrref(aug)
    if pivots != list(range(n)):
        return None
    return [row[n:] for row in red]

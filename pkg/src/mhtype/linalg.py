"""Small dense linear algebra over exact fields.

Matrices are tuples of row tuples, vectors are tuples.  Entries may be
rationals or :class:`~mhtype.scalars.QuadraticSurd`; every routine uses only
field operations and exact zero tests.
"""

from __future__ import annotations

from operator import mul
from typing import Sequence

from .scalars import Q

Matrix = tuple  # tuple[tuple[scalar, ...], ...]
Vec = tuple


class SingularMatrixError(ArithmeticError):
    pass


def zeros(n: int, k: int | None = None) -> Matrix:
    k = n if k is None else k
    return tuple(tuple(Q(0) for _ in range(k)) for _ in range(n))


def identity(n: int) -> Matrix:
    return tuple(tuple(Q(1) if i == j else Q(0) for j in range(n)) for i in range(n))


def diag(entries: Sequence) -> Matrix:
    n = len(entries)
    return tuple(
        tuple(Q(entries[i]) if i == j else Q(0) for j in range(n)) for i in range(n)
    )


def as_matrix(rows) -> Matrix:
    return tuple(tuple(r) for r in rows)


def shape(a: Matrix) -> tuple[int, int]:
    return len(a), (len(a[0]) if a else 0)


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else ()


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(_dot(row, col) for col in bt) for row in a)


_ZERO = Q(0)


def _support(v: Vec):
    """Indices of nonzero entries, or None when v is mostly dense."""
    idx = [k for k, y in enumerate(v) if y]
    return None if 2 * len(idx) > len(v) else idx


def matvec(a: Matrix, v: Vec) -> Vec:
    idx = _support(v)
    if idx is None:
        return tuple([sum(map(mul, row, v), _ZERO) for row in a])
    return tuple([sum([row[k] * v[k] for k in idx], _ZERO) for row in a])


def _dot(u, v):
    idx = _support(v)
    if idx is None:
        return sum(map(mul, u, v), _ZERO)
    return sum([u[k] * v[k] for k in idx], _ZERO)


dot = _dot


def bilinear(g: Matrix, u: Vec, v: Vec):
    """u^T g v."""
    return _dot(u, matvec(g, v))


def add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a, b))


def sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(a, b))


def scale(c, a: Matrix) -> Matrix:
    return tuple(tuple(c * x for x in r) for r in a)


def vadd(u: Vec, v: Vec) -> Vec:
    return tuple(x + y for x, y in zip(u, v))


def vsub(u: Vec, v: Vec) -> Vec:
    return tuple(x - y for x, y in zip(u, v))


def vscale(c, u: Vec) -> Vec:
    return tuple(c * x for x in u)


def is_zero_vec(u: Vec) -> bool:
    return all(x == 0 for x in u)


def is_zero(a: Matrix) -> bool:
    return all(x == 0 for r in a for x in r)


def is_symmetric(a: Matrix) -> bool:
    n = len(a)
    return all(a[i][j] == a[j][i] for i in range(n) for j in range(i + 1, n))


def trace(a: Matrix):
    total = Q(0)
    for i in range(len(a)):
        total = total + a[i][i]
    return total


def block_diag(a: Matrix, b: Matrix) -> Matrix:
    na, nb = len(a), len(b)
    rows = [tuple(a[i]) + tuple(Q(0) for _ in range(nb)) for i in range(na)]
    rows += [tuple(Q(0) for _ in range(na)) + tuple(b[i]) for i in range(nb)]
    return tuple(rows)


def scalar_multiple_of_identity(a: Matrix):
    """Return c if a == c*I, else None."""
    n = len(a)
    if n == 0:
        return Q(0)
    c = a[0][0]
    for i in range(n):
        for j in range(n):
            if (a[i][j] != c) if i == j else (a[i][j] != 0):
                return None
    return c


def proportionality(u: Vec, v: Vec):
    """Return lam with u == lam*v (v nonzero), else None."""
    lam = None
    for x, y in zip(u, v):
        if y != 0:
            lam = x / y
            break
    if lam is None:
        raise ValueError("reference vector is zero")
    if all(x == lam * y for x, y in zip(u, v)):
        return lam
    return None


def rref(a: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns."""
    rows = [list(r) for r in a]
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return tuple(tuple(x) for x in rows), tuple(pivots)


def rank(a: Matrix) -> int:
    if not a or not a[0]:
        return 0
    return len(rref(a)[1])


def row_space_basis(vectors: Sequence[Vec]) -> tuple[Vec, ...]:
    """Reduced basis of the span of the given vectors."""
    vectors = [tuple(v) for v in vectors]
    if not vectors:
        return ()
    red, piv = rref(tuple(vectors))
    return tuple(red[i] for i in range(len(piv)))


def nullspace(a: Matrix, n_cols: int | None = None) -> tuple[Vec, ...]:
    """Basis of {x : a x = 0}, one vector per free column."""
    if n_cols is None:
        n_cols = len(a[0]) if a else 0
    if not a:
        return identity(n_cols)
    red, piv = rref(a)
    free = [c for c in range(n_cols) if c not in piv]
    basis = []
    for f in free:
        x = [Q(0)] * n_cols
        x[f] = Q(1)
        for i, pc in enumerate(piv):
            x[pc] = -red[i][f]
        basis.append(tuple(x))
    return tuple(basis)


def det(a: Matrix):
    n = len(a)
    rows = [list(r) for r in a]
    result = Q(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if pivot is None:
            return Q(0)
        if pivot != c:
            rows[c], rows[pivot] = rows[pivot], rows[c]
            result = -result
        p = rows[c][c]
        result = result * p
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                f = rows[i][c] / p
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    return result


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    aug = tuple(tuple(a[i]) + identity(n)[i] for i in range(n))
    red, piv = rref(aug)
    if tuple(piv[:n]) != tuple(range(n)):
        raise SingularMatrixError("matrix is singular")
    return tuple(tuple(row[n:]) for row in red)


def solve(a: Matrix, b: Vec) -> Vec:
    """Solve a x = b for square invertible a."""
    return matvec(inverse(a), b)


def charpoly(a: Matrix) -> tuple:
    """Characteristic polynomial det(tI - a), coefficients highest degree first.

    Faddeev-LeVerrier recursion; valid in characteristic zero.
    """
    n = len(a)
    coeffs = [Q(1)]
    m = zeros(n)
    for k in range(1, n + 1):
        m = add(matmul(a, m), scale(coeffs[-1], identity(n)))
        c = -trace(matmul(a, m)) / k
        coeffs.append(c)
    return tuple(coeffs)

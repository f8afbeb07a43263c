"""Exact integer/rational matrix kernels shared by the lattice modules.

Everything here works on small dense matrices (rank <= 8 in practice) with
arbitrary-precision integers or Fractions, so there is no numpy: canonical
Hermite forms must be bit-exact.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

IntMat = tuple[tuple[int, ...], ...]


def identity(n: int) -> IntMat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(a, b):
    """Product of two matrices (rows of tuples; int or Fraction entries)."""
    n, k, m = len(a), len(b), len(b[0])
    assert len(a[0]) == k
    return tuple(
        tuple(sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m))
        for i in range(n)
    )


def mat_vec(a, v):
    return tuple(sum(a[i][j] * v[j] for j in range(len(v))) for i in range(len(a)))


def vec_mat(v, a):
    return tuple(sum(v[i] * a[i][j] for i in range(len(v))) for j in range(len(a[0])))


def transpose(a):
    return tuple(zip(*a))


def hnf_rows(rows) -> IntMat:
    """Canonical row Hermite normal form of an integer matrix.

    Zero rows are dropped.  Pivots are positive, entries above a pivot are
    reduced into [0, pivot).  The result is the unique HNF basis of the row
    lattice, so lattice equality is tuple equality.
    """
    work = [list(r) for r in rows if any(r)]
    if not work:
        return ()
    ncols = len(work[0])
    done: list[list[int]] = []
    col = 0
    while col < ncols and work:
        nonzero = [r for r in work if r[col] != 0]
        if not nonzero:
            col += 1
            continue
        # Euclidean elimination in this column.
        while True:
            nonzero.sort(key=lambda r: abs(r[col]))
            piv = nonzero[0]
            if len(nonzero) == 1:
                break
            for r in nonzero[1:]:
                t = r[col] // piv[col]
                for j in range(col, ncols):
                    r[j] -= t * piv[j]
            nonzero = [r for r in nonzero if r[col] != 0]
        if piv[col] < 0:
            for j in range(col, ncols):
                piv[j] = -piv[j]
        work = [r for r in work if r is not piv and any(r)]
        done.append(piv)
        col += 1
    # Reduce entries above each pivot.
    for i in range(len(done)):
        pcol = next(j for j in range(ncols) if done[i][j] != 0)
        for k in range(i):
            t = done[k][pcol] // done[i][pcol]
            if t:
                for j in range(ncols):
                    done[k][j] -= t * done[i][j]
    return tuple(tuple(r) for r in done)


def hnf_with_transform(rows) -> tuple[IntMat, IntMat]:
    """(H, U) with U unimodular, U * A = [H; 0] (H the HNF, zero rows kept).

    Rows of U matching zero rows of the image form a kernel basis of the row
    map x -> x*A.
    """
    m = len(rows)
    ncols = len(rows[0]) if m else 0
    aug = [list(rows[i]) + [1 if j == i else 0 for j in range(m)] for i in range(m)]

    def swap(i, j):
        aug[i], aug[j] = aug[j], aug[i]

    row = 0
    for col in range(ncols):
        piv = None
        while True:
            cand = [i for i in range(row, m) if aug[i][col] != 0]
            if not cand:
                break
            piv = min(cand, key=lambda i: abs(aug[i][col]))
            if len(cand) == 1:
                break
            for i in cand:
                if i == piv:
                    continue
                t = aug[i][col] // aug[piv][col]
                for j in range(len(aug[i])):
                    aug[i][j] -= t * aug[piv][j]
        if piv is None:
            continue
        swap(row, piv)
        if aug[row][col] < 0:
            aug[row] = [-x for x in aug[row]]
        for i in range(row):
            t = aug[i][col] // aug[row][col]
            if t:
                for j in range(len(aug[i])):
                    aug[i][j] -= t * aug[row][j]
        row += 1
    h = tuple(tuple(r[:ncols]) for r in aug)
    u = tuple(tuple(r[ncols:]) for r in aug)
    return h, u


def kernel_rows(rows) -> IntMat:
    """Basis of the left integer kernel {u : u * A = 0}."""
    h, u = hnf_with_transform(rows)
    return tuple(u[i] for i in range(len(h)) if not any(h[i]))


def det_fraction(a) -> Fraction:
    """Determinant by fraction-free-ish Gaussian elimination over Fractions."""
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    det = Fraction(1)
    for i in range(n):
        piv = next((r for r in range(i, n) if m[r][i] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != i:
            m[i], m[piv] = m[piv], m[i]
            det = -det
        det *= m[i][i]
        inv = 1 / m[i][i]
        for r in range(i + 1, n):
            if m[r][i]:
                f = m[r][i] * inv
                for c in range(i, n):
                    m[r][c] -= f * m[i][c]
    return det


def invert_fraction(a):
    """Inverse of a square matrix as a tuple-of-tuples of Fractions."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(1 if j == i else 0) for j in range(n)]
         for i, row in enumerate(a)]
    for i in range(n):
        piv = next((r for r in range(i, n) if m[r][i] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        if piv != i:
            m[i], m[piv] = m[piv], m[i]
        inv = 1 / m[i][i]
        m[i] = [x * inv for x in m[i]]
        for r in range(n):
            if r != i and m[r][i]:
                f = m[r][i]
                m[r] = [x - f * y for x, y in zip(m[r], m[i])]
    return tuple(tuple(row[n:]) for row in m)


def solve_fraction(a, v):
    """Solve x * A = v for a row vector x (A square, invertible)."""
    inv = invert_fraction(a)
    return vec_mat([Fraction(x) for x in v], inv)


def rows_gcd(rows) -> int:
    g = 0
    for r in rows:
        for x in r:
            g = gcd(g, x)
    return g


def lll_reduce(basis, gram):
    """LLL-reduce integer basis rows under the quadratic form given by `gram`.

    `gram` is a symmetric positive-definite matrix (Fractions ok) acting on
    coordinate rows: <u, v> = u * gram * v^T.  Exact arithmetic, delta = 3/4.
    Returns a new tuple of rows spanning the same lattice.
    """
    b = [list(r) for r in basis]
    n = len(b)

    def ip(u, v):
        return sum(u[i] * sum(gram[i][j] * v[j] for j in range(len(v))) for i in range(len(u)))

    def gso():
        star = []
        mu = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            vi = [Fraction(x) for x in b[i]]
            for j in range(i):
                mu[i][j] = Fraction(ip(b[i], star[j])) / ip(star[j], star[j])
                vi = [x - mu[i][j] * y for x, y in zip(vi, star[j])]
            star.append(vi)
        return star, mu

    delta = Fraction(3, 4)
    star, mu = gso()
    k = 1
    while k < n:
        for j in reversed(range(k)):
            if abs(mu[k][j]) > Fraction(1, 2):
                r = round(mu[k][j])
                b[k] = [x - r * y for x, y in zip(b[k], b[j])]
                star, mu = gso()
        if ip(star[k], star[k]) >= (delta - mu[k][k - 1] ** 2) * ip(star[k - 1], star[k - 1]):
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            star, mu = gso()
            k = max(k - 1, 1)
    return tuple(tuple(r) for r in b)

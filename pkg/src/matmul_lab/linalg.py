"""Exact linear algebra over the rationals.

Matrices here are plain lists of rows whose entries are ints or Fractions.
Rank is computed by fraction-free (Bareiss) elimination; large integer
matrices are handed to FLINT, which is also exact.
"""

from fractions import Fraction
from math import lcm

try:
    import flint
except ImportError:  # pragma: no cover - optional accelerator
    flint = None

# Below this many entries the pure Python elimination is fast enough.
FLINT_THRESHOLD = 4000


def _integer_rows(rows):
    """Scale each row by the lcm of its denominators so every entry is an int."""
    out = []
    for row in rows:
        den = 1
        for x in row:
            if isinstance(x, Fraction) and x.denominator != 1:
                den = lcm(den, x.denominator)
        if den == 1:
            out.append([int(x) for x in row])
        else:
            out.append([int(x * den) for x in row])
    return out


def bareiss_rank(rows):
    """Rank of an integer matrix by fraction-free elimination.

    Pivots are taken as the first nonzero entry scanning columns left to
    right, so the elimination order is deterministic.
    """
    m = [list(r) for r in rows]
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        piv = None
        for i in range(rank, nrows):
            if m[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][col]
        prow = m[rank]
        for i in range(rank + 1, nrows):
            row = m[i]
            f = row[col]
            if f == 0:
                row_new = [(p * row[j]) // prev for j in range(col + 1, ncols)]
            else:
                row_new = [(p * row[j] - f * prow[j]) // prev for j in range(col + 1, ncols)]
            m[i] = [0] * (col + 1) + row_new
        prev = p
        rank += 1
        if rank == nrows:
            break
    return rank


def rank(rows):
    """Exact rank of a matrix given as rows of ints or Fractions."""
    rows = [list(r) for r in rows]
    if not rows or not rows[0]:
        return 0
    ints = _integer_rows(rows)
    size = len(ints) * len(ints[0])
    if flint is not None and size > FLINT_THRESHOLD:
        return flint.fmpz_mat(ints).rank()
    return bareiss_rank(ints)


def det(rows):
    """Exact determinant of a square matrix."""
    m = [[Fraction(x) for x in r] for r in rows]
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("determinant needs a square matrix")
    result = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            result = -result
        p = m[col][col]
        result *= p
        for i in range(col + 1, n):
            f = m[i][col] / p
            if f:
                ri, rc = m[i], m[col]
                for j in range(col, n):
                    ri[j] -= f * rc[j]
    return result


def rref(rows):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return m, []
    nrows, ncols = len(m), len(m[0])
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][col]
        m[r] = [x / p for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    return m, pivots


def nullspace(rows, ncols=None):
    """Basis of the right kernel {x : Mx = 0}."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    m, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][fc]
        basis.append(v)
    return basis


def inverse(rows):
    """Exact inverse; raises ZeroDivisionError when singular."""
    n = len(rows)
    aug = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
           for i, r in enumerate(rows)]
    m, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in m]


def matmul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def transpose(a):
    return [list(r) for r in zip(*a)]


def minor(rows, drop_row, drop_col):
    return [[x for j, x in enumerate(r) if j != drop_col]
            for i, r in enumerate(rows) if i != drop_row]


def independent(vectors):
    return rank(vectors) == len(vectors)

"""Recursive matrix multiplication driven by a verified bilinear decomposition.

The recursion is evaluated level by level: every pending sub-product of a
level is stored in one stacked array, so each level costs a handful of
vectorized operations. The arithmetic performed is exactly that of the
depth-first recursion, and so are the counts.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .bilinear import matmul_tensor, verify_exact

EXACT = "exact"
MACHINE = "machine"
DEFAULT_CUTOFF = {EXACT: 1, MACHINE: 64}


class UnverifiedBase(ValueError):
    pass


class DenseMatrix:
    """A rows x cols matrix in exact (Python int / Fraction) or machine (float64) mode."""

    __slots__ = ("data", "mode")

    def __init__(self, data, mode=EXACT):
        if mode not in (EXACT, MACHINE):
            raise ValueError(f"unknown mode {mode!r}")
        if mode == EXACT:
            arr = np.empty(np.shape(data), dtype=object)
            src = np.asarray(data, dtype=object)
            for idx in np.ndindex(arr.shape):
                x = src[idx]
                if isinstance(x, (float, np.floating)):
                    raise TypeError("exact matrices cannot hold floating point values")
                arr[idx] = int(x) if isinstance(x, (int, np.integer)) else Fraction(x)
        else:
            arr = np.array(data, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("a DenseMatrix needs two dimensions")
        self.data = arr
        self.mode = mode

    @classmethod
    def _wrap(cls, arr, mode):
        m = cls.__new__(cls)
        m.data = arr
        m.mode = mode
        return m

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]

    @classmethod
    def random_integer(cls, n, rng, low=-9, high=9, cols=None):
        vals = rng.integers(low, high + 1, size=(n, cols or n))
        return cls._wrap(np.vectorize(int, otypes=[object])(vals), EXACT)

    @classmethod
    def random_unit(cls, n, rng):
        return cls._wrap(rng.uniform(-1.0, 1.0, size=(n, n)), MACHINE)

    def to_mode(self, mode):
        if mode == self.mode:
            return self
        if mode == MACHINE:
            return DenseMatrix._wrap(self.data.astype(np.float64), MACHINE)
        raise ValueError("machine numbers cannot be converted to exact mode")

    def tolist(self):
        return self.data.tolist()

    def __eq__(self, other):
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(np.all(self.data == other.data))

    def __repr__(self):
        return f"DenseMatrix({self.rows}x{self.cols}, {self.mode})"


@dataclass
class MultStats:
    mults: int = 0
    adds: int = 0
    depth: int = 0
    padded: int = 0


def classical_mul(A, B):
    if A.cols != B.rows:
        raise ValueError(f"inner dimensions differ: {A.rows}x{A.cols} times {B.rows}x{B.cols}")
    mode = MACHINE if MACHINE in (A.mode, B.mode) else EXACT
    C = DenseMatrix._wrap(A.to_mode(mode).data @ B.to_mode(mode).data, mode)
    stats = MultStats(mults=A.rows * A.cols * B.cols,
                      adds=A.rows * B.cols * (A.cols - 1), depth=0, padded=max(A.rows, A.cols, B.cols))
    return C, stats


def _base_order(base):
    a = base.shape[0]
    q = math.isqrt(a)
    if q * q != a or tuple(base.shape) != (a, a, a):
        raise UnverifiedBase(f"base decomposition shape {base.shape} is not that of square matrix multiplication")
    return q


def _coefficients(base):
    rows = []
    for t in base.terms:
        rows.append([[x.coefficient(0) for x in f] for f in t.factors])
    pre = base.prefactor.coefficient(0)
    alpha = [r[0] for r in rows]
    beta = [r[1] for r in rows]
    gamma = [[pre * x for x in r[2]] for r in rows]
    return alpha, beta, gamma


def _coef_array(coefs, mode):
    if mode == MACHINE:
        return np.array([[float(x) for x in row] for row in coefs], dtype=np.float64)
    arr = np.empty((len(coefs), len(coefs[0])), dtype=object)
    for i, row in enumerate(coefs):
        for j, x in enumerate(row):
            arr[i, j] = int(x) if x.denominator == 1 else x
    return arr


def _to_blocks(X, q):
    """(P, s, s) stack -> (P, q*q, s/q, s/q) with block index i*q + k."""
    P, s, _ = X.shape
    b = s // q
    return X.reshape(P, q, b, q, b).transpose(0, 1, 3, 2, 4).reshape(P, q * q, b, b)


def _from_blocks(Y, q):
    P, _, b, _ = Y.shape
    return Y.reshape(P, q, q, b, b).transpose(0, 1, 3, 2, 4).reshape(P, q * b, q * b)


def _combine(coef, blocks):
    """coef (r, q*q) applied to blocks (P, q*q, b, b) -> (P*r, b, b)."""
    P, qq, b, _ = blocks.shape
    out = np.tensordot(blocks, coef, axes=([1], [1]))      # (P, b, b, r)
    return out.transpose(0, 3, 1, 2).reshape(P * coef.shape[0], b, b)


def _leaf_products(S, T, threads):
    if threads <= 1 or S.shape[0] < 2 * threads:
        return np.matmul(S, T)
    chunks = np.array_split(np.arange(S.shape[0]), threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda idx: np.matmul(S[idx], T[idx]), chunks))
    return np.concatenate(parts, axis=0)


def padded_size(n, q):
    size = 1
    while size < n:
        size *= q
    return size


def recursive_mul(A, B, base, cutoff=None, threads=1, verified=False):
    """Multiply square matrices by recursing on a base decomposition of M_{q,q,q}.

    Inputs are zero-padded to the next power of q; blocks of size at most
    `cutoff` are multiplied classically.
    """
    q = _base_order(base)
    if not verified and not verify_exact(base, matmul_tensor(q, q, q)):
        raise UnverifiedBase("base decomposition does not compute square matrix multiplication")
    if A.rows != A.cols or B.rows != B.cols or A.cols != B.rows:
        raise ValueError("recursive_mul needs square matrices of equal size")
    mode = MACHINE if MACHINE in (A.mode, B.mode) else EXACT
    if cutoff is None:
        cutoff = DEFAULT_CUTOFF[mode]
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    n = A.rows
    N = padded_size(n, q)
    dtype = np.float64 if mode == MACHINE else object

    def padded(M):
        out = np.zeros((N, N), dtype=dtype)
        if dtype is object:
            out[:] = 0
        out[:n, :n] = M.to_mode(mode).data
        return out[None, :, :]

    alpha, beta, gamma = _coefficients(base)
    al, be, ga = (_coef_array(c, mode) for c in (alpha, beta, gamma))
    nnz_a = [sum(1 for x in row if x) for row in alpha]
    nnz_b = [sum(1 for x in row if x) for row in beta]
    nnz_c = [sum(1 for row in gamma if row[j]) for j in range(q * q)]
    r = len(base.terms)

    stats = MultStats(padded=N)
    S, T = padded(A), padded(B)
    size = N
    levels = []
    while size > cutoff and size > 1:
        P = S.shape[0]
        b = size // q
        stats.adds += P * b * b * (sum(max(k - 1, 0) for k in nnz_a) + sum(max(k - 1, 0) for k in nnz_b))
        S = _combine(al, _to_blocks(S, q))
        T = _combine(be, _to_blocks(T, q))
        levels.append(P)
        size = b
        stats.depth += 1
    leaves = S.shape[0]
    stats.mults = leaves * size ** 3
    stats.adds += leaves * size * size * (size - 1)
    C = _leaf_products(S, T, threads)
    while levels:
        P = levels.pop()
        b = C.shape[1]
        prods = C.reshape(P, r, b, b)
        blocks = np.tensordot(prods, ga, axes=([1], [0]))    # (P, b, b, q*q)
        C = _from_blocks(blocks.transpose(0, 3, 1, 2), q)
        stats.adds += P * b * b * sum(max(k - 1, 0) for k in nnz_c)
    return DenseMatrix._wrap(C[0, :n, :n], mode), stats


def mult_count_model(n, q, r, cutoff=1):
    """Predicted multiplication count: r**k leaf products of classical size."""
    size = padded_size(n, q)
    leaves = 1
    while size > cutoff and size > 1:
        size //= q
        leaves *= r
    return leaves * size ** 3


def exponent_estimate(sizes, counts):
    """Least-squares slope of log(count) against log(size)."""
    if len(sizes) != len(counts) or len(sizes) < 2:
        raise ValueError("exponent_estimate needs at least two size/count pairs")
    xs = [math.log(s) for s in sizes]
    ys = [math.log(c) for c in counts]
    mx = sum(xs) / len(xs)
    my = sum(ys) / len(ys)
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        raise ValueError("sizes must not all be equal")
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx

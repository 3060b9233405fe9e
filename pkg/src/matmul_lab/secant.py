"""Secant varieties: Terracini dimension counts, closed-form dimension
formulas, Waring typical ranks and limits of secant planes."""

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb, prod

from . import linalg
from .bilinear import Decomposition, RankOneTerm
from .polynomials import linear_form, monomial_count, poly_mul, poly_pow, to_vector
from .tensor_core import outer


class NotDecomposable(ArithmeticError):
    pass


@dataclass(frozen=True)
class VarietySpec:
    kind: str
    params: tuple

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(int(x) for x in self.params))
        if self.kind == "segre":
            if not self.params or any(a < 2 for a in self.params):
                raise ValueError("segre factors need dimension at least 2")
        elif self.kind == "veronese":
            d, n = self.params
            if d < 1 or n < 1:
                raise ValueError("veronese needs d >= 1 and n >= 1")
        elif self.kind == "grassmann":
            k, n = self.params
            if not 1 <= k <= n - 1:
                raise ValueError("grassmann needs 1 <= k <= n - 1")
        else:
            raise ValueError(f"unknown variety kind {self.kind!r}")

    @classmethod
    def parse(cls, text):
        kind, _, rest = text.partition(":")
        return cls(kind, tuple(int(x) for x in rest.split(",")))

    def __str__(self):
        return f"{self.kind}:{','.join(map(str, self.params))}"

    @property
    def ambient(self):
        if self.kind == "segre":
            return prod(self.params)
        if self.kind == "veronese":
            d, n = self.params
            return monomial_count(n, d)
        k, n = self.params
        return comb(n, k)

    @property
    def cone_dim(self):
        """Dimension of the affine cone over the variety."""
        if self.kind == "segre":
            return sum(a - 1 for a in self.params) + 1
        if self.kind == "veronese":
            return self.params[1]
        k, n = self.params
        return k * (n - k) + 1

    def random_parameters(self, rng, low=-9, high=9):
        def vec(n):
            while True:
                v = [rng.randint(low, high) for _ in range(n)]
                if any(v):
                    return v
        if self.kind == "segre":
            return [vec(a) for a in self.params]
        if self.kind == "veronese":
            return [vec(self.params[1])]
        k, n = self.params
        while True:
            vs = [vec(n) for _ in range(k)]
            if linalg.rank(vs) == k:
                return vs

    def point(self, params):
        """Coordinates of the point of the cone given by the parameters."""
        if self.kind == "segre":
            return list(outer(*params).entries)
        if self.kind == "veronese":
            d, n = self.params
            return to_vector(poly_pow(linear_form(params[0]), d, n), n, d)
        return plucker(params)


def segre(*dims):
    return VarietySpec("segre", dims)


def veronese(d, n):
    return VarietySpec("veronese", (d, n))


def grassmann(k, n):
    return VarietySpec("grassmann", (k, n))


def plucker(vectors):
    """Maximal minors of the k x n matrix with the given rows, increasing column subsets."""
    k = len(vectors)
    n = len(vectors[0])
    return [linalg.det([[v[j] for j in cols] for v in vectors])
            for cols in itertools.combinations(range(n), k)]


def _unit(n, j):
    return [int(i == j) for i in range(n)]


def tangent_space(v, params):
    """Spanning set of the affine tangent space at the point given by params."""
    if any(not any(p) for p in params):
        raise ValueError("parameter vectors must be nonzero")
    if v.kind == "segre":
        if len(params) != len(v.params) or any(len(p) != a for p, a in zip(params, v.params)):
            raise ValueError("parameter arity does not match the Segre factors")
        out = []
        for mode, a in enumerate(v.params):
            for j in range(a):
                factors = list(params)
                factors[mode] = _unit(a, j)
                out.append(list(outer(*factors).entries))
        return out
    if v.kind == "veronese":
        d, n = v.params
        if len(params) != 1 or len(params[0]) != n:
            raise ValueError("veronese needs a single vector of length n")
        base = poly_pow(linear_form(params[0]), d - 1, n)
        return [to_vector(poly_mul(base, linear_form(_unit(n, j))), n, d) for j in range(n)]
    k, n = v.params
    if len(params) != k or any(len(p) != n for p in params):
        raise ValueError("grassmann needs k vectors of length n")
    out = []
    for pos in range(k):
        for j in range(n):
            vs = list(params)
            vs[pos] = _unit(n, j)
            out.append(plucker(vs))
    return out


@dataclass(frozen=True)
class TerraciniReport:
    variety: VarietySpec
    r: int
    trials: int
    observed: int
    expected: int
    ambient: int

    @property
    def defect(self):
        return self.expected - self.observed

    @property
    def projective(self):
        return self.observed - 1

    def row(self):
        return {"variety": str(self.variety), "r": self.r, "trials": self.trials,
                "observed": self.observed, "expected": self.expected,
                "defect": self.defect, "ambient": self.ambient}


def terracini_rank(v, r, rng):
    rows = []
    for _ in range(r):
        rows.extend(tangent_space(v, v.random_parameters(rng)))
    return linalg.rank(rows)


def secant_dim(v, r, trials=3, seed=0):
    """Affine dimension of the cone over sigma_r(v) by Terracini's lemma."""
    if r < 1 or trials < 1:
        raise ValueError("need r >= 1 and trials >= 1")
    rng = random.Random(seed)
    observed = max(terracini_rank(v, r, rng) for _ in range(trials))
    expected = min(r * v.cone_dim, v.ambient)
    return TerraciniReport(v, r, trials, observed, expected, v.ambient)


def expected_fill(a, b, c):
    return -(-a * b * c // (a + b + c - 2))


def lickteig_dim(n, r):
    """Projective dimension of sigma_r(Seg(P^{n-1} x P^{n-1} x P^{n-1}))."""
    if n == 3 and r == 4:
        return 25
    return min(r * (3 * n - 2) - 1, n ** 3 - 1)


WARING_EXCEPTIONS = {(3, 5): 8, (4, 3): 6, (4, 4): 10, (4, 5): 15}


def waring_rank(d, n):
    """Typical Waring rank of degree-d forms in n variables."""
    if d < 1 or n < 1:
        raise ValueError("need d >= 1 and n >= 1")
    if d == 1:
        return 1
    if d == 2:
        return n
    if (d, n) in WARING_EXCEPTIONS:
        return WARING_EXCEPTIONS[(d, n)]
    return -(-comb(n + d - 1, d) // n)


def quadric_veronese_dim(r, n):
    """Projective dimension of sigma_r(v_2(P^n)) (symmetric matrices of rank <= r)."""
    if r == 1:
        return n
    if not 2 <= r <= n:
        raise ValueError(f"need 1 <= r <= n, got r={r}, n={n}")
    return r * n - (r * r - 3 * r) // 2 - 1


SCHONHAGE_BLOCK_COST = 7


def schonhage_blocks():
    """Three partial 3x3 multiplications whose supports partition that of M_{3,3,3}.

    A block keeps the monomials a^i_k b^k_j with a21 = a31 = 0 and
    b22 = b23 = b32 = b33 = 0, with the row index i and the column index j
    shifted cyclically by the same amount.
    """
    base = {(i, k, j) for i in range(3) for k in range(3) for j in range(3)
            if (i, k) not in {(1, 0), (2, 0)} and (k, j) not in {(1, 1), (1, 2), (2, 1), (2, 2)}}

    def shift(s, m):
        return {((i + m) % 3, k, (j + m) % 3) for i, k, j in s}
    return [shift(base, m) for m in range(3)]


def schonhage_bookkeeping():
    blocks = schonhage_blocks()
    union = set().union(*blocks)
    disjoint = sum(len(b) for b in blocks) == len(union)
    full = union == {(i, k, j) for i in range(3) for k in range(3) for j in range(3)}
    return disjoint and full, SCHONHAGE_BLOCK_COST * len(blocks)


# --- limits of secant planes ---------------------------------------------------

class Multivector:
    """Sparse element of Lambda^r of a coordinate space."""

    __slots__ = ("dim", "degree", "coeffs")

    def __init__(self, dim, degree, coeffs=None):
        self.dim = dim
        self.degree = degree
        self.coeffs = {k: Fraction(v) for k, v in (coeffs or {}).items() if v}

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return Multivector(self.dim, self.degree, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return Multivector(self.dim, self.degree, {k: c * v for k, v in self.coeffs.items()})

    def __eq__(self, other):
        return isinstance(other, Multivector) and self.degree == other.degree and self.coeffs == other.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def wedge_vector(self, vec):
        """self ^ vec."""
        out = {}
        nz = [(j, x) for j, x in enumerate(vec) if x]
        for key, c in self.coeffs.items():
            for j, x in nz:
                if j in key:
                    continue
                above = sum(1 for i in key if i > j)
                new = tuple(sorted(key + (j,)))
                out[new] = out.get(new, 0) + (-c * x if above % 2 else c * x)
        return Multivector(self.dim, self.degree + 1, out)

    def support(self):
        return sorted({i for k in self.coeffs for i in k})

    def __repr__(self):
        return f"Multivector(degree={self.degree}, terms={len(self.coeffs)})"


def wedge(vectors):
    dim = len(vectors[0])
    out = Multivector(dim, 0, {(): 1})
    for v in vectors:
        out = out.wedge_vector(v)
    return out


@dataclass(frozen=True)
class CurveFamily:
    """r curves t -> a_1(t) x ... x a_n(t) on a Segre cone, with polynomial factors."""

    curves: tuple

    def __post_init__(self):
        curves = tuple(c if isinstance(c, RankOneTerm) else RankOneTerm(c) for c in self.curves)
        object.__setattr__(self, "curves", curves)
        for c in curves:
            if any(x.coeffs and min(x.coeffs) < 0 for f in c.factors for x in f):
                raise ValueError("curve factors must be polynomials in t")
            if not any(self._coeff(c, 0)):
                raise ValueError("every curve must be nonzero at t = 0")

    @classmethod
    def from_decomposition(cls, D):
        """The curves of an eps-family, with eps read as t; the prefactor is dropped."""
        return cls(tuple(D.terms) if isinstance(D, Decomposition) else tuple(D.decomposition.terms))

    @staticmethod
    def _coeff(curve, k):
        return list(curve.tensor().coefficient(k).entries) if not curve.is_exact() else (
            list(curve.tensor().entries) if k == 0 else [Fraction(0)] * prod(curve.shape))

    def taylor(self, i, k):
        """Coefficient of t^k of the i-th curve as a flat coordinate vector."""
        return self._coeff(self.curves[i], k)

    def degree(self, i):
        return max((max(x.coeffs) for f in self.curves[i].factors for x in f if x.coeffs), default=0) * \
            len(self.curves[i].factors)

    def __len__(self):
        return len(self.curves)


def wedge_taylor(f, k):
    """Coefficient of t^k in x_1(t) ^ ... ^ x_r(t)."""
    if k < 0:
        raise ValueError("order must be nonnegative")
    r = len(f)
    dim = len(f.taylor(0, 0))
    total = Multivector(dim, r)
    cache = {}

    def coeff(i, j):
        if (i, j) not in cache:
            cache[(i, j)] = f.taylor(i, j)
        return cache[(i, j)]

    for split in _compositions(k, r):
        if any(j > f.degree(i) for i, j in enumerate(split)):
            continue
        vecs = [coeff(i, j) for i, j in enumerate(split)]
        if any(not any(v) for v in vecs):
            continue
        total = total + wedge(vecs)
    return total


def _compositions(k, parts):
    if parts == 1:
        yield (k,)
        return
    for first in range(k + 1):
        for rest in _compositions(k - first, parts - 1):
            yield (first,) + rest


def plane_of(omega):
    """Basis of {v : v ^ omega = 0}; raises NotDecomposable unless it has dimension r."""
    support = omega.support()
    rows = []
    for j in support:
        e = [0] * omega.dim
        e[j] = 1
        rows.append(omega.wedge_vector(e))
    keys = sorted({key for mv in rows for key in mv.coeffs})
    matrix = [[mv.coeffs.get(key, 0) for mv in rows] for key in keys]
    kernel = linalg.nullspace(matrix, len(support)) if keys else \
        [[Fraction(int(i == j)) for j in range(len(support))] for i in range(len(support))]
    if len(kernel) != omega.degree:
        raise NotDecomposable(
            f"wedge coefficient is not decomposable: its annihilator has dimension {len(kernel)}, "
            f"expected {omega.degree}")
    basis = []
    for kv in kernel:
        v = [Fraction(0)] * omega.dim
        for j, c in zip(support, kv):
            v[j] = c
        basis.append(v)
    return basis


def limit_plane(f, max_order=None):
    """Limit of the span of the curves as t -> 0: (basis, order of the first nonzero coefficient)."""
    if max_order is None:
        max_order = sum(f.degree(i) for i in range(len(f)))
    for k in range(max_order + 1):
        omega = wedge_taylor(f, k)
        if omega:
            return plane_of(omega), k
    raise ValueError("the wedge of the curves vanishes identically")


def in_span(vec, basis):
    return linalg.rank(list(basis) + [list(vec)]) == linalg.rank(basis)

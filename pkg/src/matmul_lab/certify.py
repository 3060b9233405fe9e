"""Lower-bound certificates for rank and border rank, and membership tests.

Conventions: a tensor of shape (a, b, c) is read as an element of A x B x C
and contracting mode 0 with a covector alpha gives the b x c slice T_alpha.
"""

import enum
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .tensor_core import (Tensor, contract, exact_rank, flatten,
                          flattening_bound, multilinear_ranks)


class SingularSlice(ZeroDivisionError):
    pass


class IndeterminateEvaluation(ArithmeticError):
    pass


class MalformedGroup(ValueError):
    pass


# --- Strassen's commutator ---------------------------------------------------

@dataclass(frozen=True)
class CommutatorWitness:
    alpha: tuple
    alpha1: tuple
    alpha2: tuple
    commutator: list
    rank: int
    bound: int


def slice_matrix(T, alpha):
    return contract(T, 0, [Fraction(x) for x in alpha]).rows()


def strassen_commutator(T, alpha, alpha1, alpha2):
    a, b, c = T.shape
    if a < 3:
        raise ValueError(f"the commutator test needs at least 3 slices, got a={a}")
    if b != c:
        raise ValueError(f"modes 1 and 2 must have equal dimension, got {b} and {c}")
    X = slice_matrix(T, alpha)
    try:
        Xinv = linalg.inverse(X)
    except ZeroDivisionError:
        raise SingularSlice("T_alpha is singular; retry with another covector") from None
    M1 = linalg.matmul(slice_matrix(T, alpha1), Xinv)
    M2 = linalg.matmul(slice_matrix(T, alpha2), Xinv)
    P12 = linalg.matmul(M1, M2)
    P21 = linalg.matmul(M2, M1)
    comm = [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(P12, P21)]
    rk = linalg.rank(comm)
    return CommutatorWitness(tuple(alpha), tuple(alpha1), tuple(alpha2), comm, rk, b + (rk + 1) // 2)


def random_covector(rng, n, low=-5, high=5):
    while True:
        v = [rng.randint(low, high) for _ in range(n)]
        if any(v):
            return v


def sample_commutators(T, triples=20, seed=0, max_attempts=2000):
    """Commutator witnesses for `triples` covector triples with T_alpha invertible."""
    rng = random.Random(seed)
    out = []
    attempts = 0
    while len(out) < triples and attempts < max_attempts:
        attempts += 1
        al, a1, a2 = (random_covector(rng, T.shape[0]) for _ in range(3))
        try:
            out.append(strassen_commutator(T, al, a1, a2))
        except SingularSlice:
            continue
    return out


# --- explicit P(T) and the degree nine invariant ------------------------------

def _slices3(T):
    if T.order != 3 or T.shape[0] != 3:
        raise ValueError(f"strassen_P needs shape (3, b, b), got {T.shape}")
    if T.shape[1] != T.shape[2]:
        raise ValueError("modes 1 and 2 must have equal dimension")
    return [slice_matrix(T, [int(i == j) for j in range(3)]) for i in range(3)]


def strassen_P(T):
    """P(T)^s_t = sum_{j,k} (-1)^(j+k) det(X without row j, col k) (Y^j_t Z^s_k - Y^s_k Z^j_t)."""
    X, Y, Z = _slices3(T)
    b = len(X)
    cof = [[(-1) ** (j + k) * linalg.det(linalg.minor(X, j, k)) if b > 1 else Fraction(1)
            for k in range(b)] for j in range(b)]
    P = [[Fraction(0)] * b for _ in range(b)]
    for s in range(b):
        for t in range(b):
            acc = Fraction(0)
            for j in range(b):
                for k in range(b):
                    cjk = cof[j][k]
                    if cjk:
                        acc += cjk * (Y[j][t] * Z[s][k] - Y[s][k] * Z[j][t])
            P[s][t] = acc
    return P


def change_basis(T, g, mode=0):
    """Apply the matrix g to mode `mode` of T."""
    moved = T.permute([mode] + [m for m in range(T.order) if m != mode])
    n = T.shape[mode]
    block = len(moved.entries) // n
    rows = [moved.entries[i * block:(i + 1) * block] for i in range(n)]
    new = []
    for i in range(len(g)):
        acc = [Fraction(0)] * block
        for j in range(n):
            if g[i][j]:
                acc = [x + g[i][j] * y for x, y in zip(acc, rows[j])]
        new.extend(acc)
    out = Tensor((len(g),) + moved.shape[1:], new)
    inv = [0] * T.order
    order = [mode] + [m for m in range(T.order) if m != mode]
    for k, m in enumerate(order):
        inv[m] = k
    return out.permute(inv)


def random_invertible(rng, n, low=-3, high=3):
    while True:
        g = [[rng.randint(low, high) for _ in range(n)] for _ in range(n)]
        if linalg.det(g) != 0:
            return g


def _quotient_by_interpolation(T):
    """Value at s = 0 of the degree nine polynomial along T + s (a_1 x identity)."""
    n = T.shape[1]
    shift = Tensor.from_dict(T.shape, {(0, i, i): 1 for i in range(n)})
    points = []
    s = 1
    while len(points) < 10:
        cur = T + shift.scale(s)
        dx = linalg.det(_slices3(cur)[0])
        if dx != 0:
            points.append((Fraction(s), linalg.det(strassen_P(cur)) / dx))
        s += 1
    total = Fraction(0)
    for i, (xi, yi) in enumerate(points):
        weight = Fraction(1)
        for j, (xj, _) in enumerate(points):
            if j != i:
                weight *= -xj / (xi - xj)
        total += weight * yi
    return total


def degree9_invariant(T, seed=0, retries=3, interpolate=True):
    """det P(T) / det X for 3x3x3 tensors, a degree nine polynomial in T.

    When det X vanishes, a basis change g of the first mode is applied and
    the value is corrected by det(g)^3 so that the result does not depend
    on the choice. If every retry fails (all slices singular), the value is
    recovered by interpolation along a line through T, unless
    `interpolate` is False.
    """
    if T.shape != (3, 3, 3):
        raise ValueError(f"degree9_invariant needs a 3x3x3 tensor, got {T.shape}")
    rng = random.Random(seed)
    g = None
    cur = T
    for attempt in range(retries + 1):
        X = _slices3(cur)[0]
        dx = linalg.det(X)
        if dx != 0:
            val = linalg.det(strassen_P(cur)) / dx
            if g is not None:
                val /= linalg.det(g) ** 3
            return val
        if attempt == retries:
            break
        g = random_invertible(rng, 3)
        cur = change_basis(T, g)
    if interpolate:
        return _quotient_by_interpolation(T)
    raise IndeterminateEvaluation("det X vanished after every basis change")


# --- generalized equations ------------------------------------------------

def _subsets(n, k):
    return list(itertools.combinations(range(n), k))


def _all_minors(M, k):
    out = {}
    for I in _subsets(len(M), k):
        for J in _subsets(len(M[0]), k):
            d = linalg.det([[M[i][j] for j in J] for i in I])
            out[(I, J)] = d.numerator if d.denominator == 1 else d
    return out


def wedge_sign(I, J):
    """Sign of e_I ^ e_J written as e_(I u J) in increasing order (0 if they meet)."""
    if set(I) & set(J):
        return 0
    inv = sum(1 for i in I for j in J if i > j)
    return -1 if inv % 2 else 1


def _splits(P, k):
    """(I, P minus I, sign of e_I ^ e_rest) for every k-subset I of P."""
    out = []
    for I in itertools.combinations(P, k):
        rest = tuple(x for x in P if x not in I)
        out.append((I, rest, wedge_sign(I, rest)))
    return out


def _psi(M_alpha, M_first, M_second, s, t):
    b = len(M_alpha)
    m1 = _all_minors(M_first, s)
    m = _all_minors(M_alpha, t)
    m2 = _all_minors(M_second, s)
    big = _subsets(b, s + t)
    small = _subsets(b, s)
    left = {P: _splits(P, s) for P in big}
    right = {Q: _splits(Q, t) for Q in big}
    entries = []
    for P in big:
        for Q in big:
            for R in small:
                for S in small:
                    acc = 0
                    for I, J, sij in left[P]:
                        a1 = m1[(I, S)]
                        if not a1:
                            continue
                        for JC, K, sjk in right[Q]:
                            acc += sij * sjk * a1 * m[(J, JC)] * m2[(R, K)]
                    entries.append(acc)
    return Tensor((len(big), len(big), len(small), len(small)), entries)


def generalized_strassen(T, s, t, alpha, alpha1, alpha2):
    """psi^{s,t}_{alpha,alpha1,alpha2}(T) - psi^{s,t}_{alpha,alpha2,alpha1}(T).

    Coordinates are indexed by increasing subsets: the result has shape
    (C(b,s+t), C(b,s+t), C(b,s), C(b,s)) for Lambda^{s+t}B, Lambda^{s+t}C,
    Lambda^s B, Lambda^s C.
    """
    a, b, c = T.shape
    if b != c:
        raise ValueError("modes 1 and 2 must have equal dimension")
    if s < 1 or t < 1 or s + t > b:
        raise ValueError(f"need s, t >= 1 and s + t <= {b}, got s={s}, t={t}")
    Ma, M1, M2 = (slice_matrix(T, v) for v in (alpha, alpha1, alpha2))
    return _psi(Ma, M1, M2, s, t) - _psi(Ma, M2, M1, s, t)


# --- bound report -----------------------------------------------------------

def blaser_rank_bound(m):
    return Fraction(5, 2) * m * m - 3 * m


def lickteig_border_bound(m):
    return Fraction(3, 2) * m * m + Fraction(m, 2) - 1


LITERATURE = {
    "rank M222": 7,
    "border rank M222": 7,
    "rank M333 lower": 19,
    "rank M333 upper": 23,
    "border rank M333 lower": 14,
    "border rank M333 upper": 21,
    "rank M223": 11,
    "omega upper": 2.38,
}


@dataclass
class BoundReport:
    flattening: int
    multilinear: int
    commutator: int = None
    p_matrix: int = None
    literature: dict = field(default_factory=dict)

    @property
    def maximum(self):
        return max(x for x in (self.flattening, self.multilinear, self.commutator, self.p_matrix)
                   if x is not None)

    def best_method(self):
        for name in ("commutator", "p_matrix", "flattening", "multilinear"):
            if getattr(self, name) == self.maximum:
                return name


def _commutator_arrangements(T):
    """Mode orders (k, i, j) with dim k >= 3 and dim i == dim j."""
    if T.order != 3:
        return []
    out = []
    for k in range(3):
        i, j = [m for m in range(3) if m != k]
        if T.shape[k] >= 3 and T.shape[i] == T.shape[j]:
            out.append((k, i, j))
    return out


def border_rank_bounds(T, seed=0, triples=20):
    report = BoundReport(flattening=flattening_bound(T), multilinear=max(multilinear_ranks(T)))
    best = None
    best_p = None
    for arr in _commutator_arrangements(T):
        U = T.permute(arr)
        for w in sample_commutators(U, triples=triples, seed=seed):
            best = w.bound if best is None else max(best, w.bound)
        if U.shape[0] == 3:
            rng = random.Random(seed)
            cur = U
            for _ in range(4):
                if linalg.det(_slices3(cur)[0]) != 0:
                    bp = cur.shape[1] + (linalg.rank(strassen_P(cur)) + 1) // 2
                    best_p = bp if best_p is None else max(best_p, bp)
                    break
                cur = change_basis(U, random_invertible(rng, 3))
    report.commutator = best
    report.p_matrix = best_p
    report.literature = dict(LITERATURE)
    return report


# --- 2x2x2 classification --------------------------------------------------

class PencilClass(enum.Enum):
    S = "S"
    B = "B"
    W = "W"
    GHZ = "GHZ"


def hyperdeterminant_222(T):
    """Discriminant of the binary quadratic det(x T_0 + y T_1)."""
    A = slice_matrix(T, [1, 0])
    B = slice_matrix(T, [0, 1])
    d0 = linalg.det(A)
    d1 = linalg.det(B)
    mixed = linalg.det([[x + y for x, y in zip(ra, rb)] for ra, rb in zip(A, B)]) - d0 - d1
    return mixed * mixed - 4 * d0 * d1


def classify_222(T):
    if T.shape != (2, 2, 2):
        raise ValueError(f"classify_222 needs a 2x2x2 tensor, got {T.shape}")
    if T.is_zero():
        raise ValueError("the zero tensor has no class")
    ranks = multilinear_ranks(T)
    if ranks == [1, 1, 1]:
        return PencilClass.S
    if 1 in ranks:
        return PencilClass.B
    return PencilClass.W if hyperdeterminant_222(T) == 0 else PencilClass.GHZ


# --- triple product property -----------------------------------------------

class FiniteGroup:
    """Cayley table with 0 as the identity."""

    def __init__(self, table, name=None):
        table = [list(r) for r in table]
        n = len(table)
        self.order = n
        self.table = table
        self.name = name
        self._check()
        self.inv = [next(j for j in range(n) if table[i][j] == 0) for i in range(n)]

    def _check(self):
        n, t = self.order, self.table
        if n == 0 or any(len(r) != n for r in t):
            raise MalformedGroup("Cayley table must be a nonempty square")
        if any(not (isinstance(x, int) and 0 <= x < n) for r in t for x in r):
            raise MalformedGroup("table entries must be element indices")
        if any(t[0][i] != i or t[i][0] != i for i in range(n)):
            raise MalformedGroup("element 0 must be the identity")
        for r in t:
            if len(set(r)) != n:
                raise MalformedGroup("each row must be a permutation")
        for i in range(n):
            if 0 not in t[i]:
                raise MalformedGroup("missing inverse")
        for x in range(n):
            for y in range(n):
                xy = t[x][y]
                for z in range(n):
                    if t[xy][z] != t[x][t[y][z]]:
                        raise MalformedGroup("multiplication is not associative")

    def mul(self, x, y):
        return self.table[x][y]

    def is_abelian(self):
        return all(self.table[x][y] == self.table[y][x] for x in range(self.order) for y in range(x))

    def to_json(self):
        return {"order": self.order, "table": self.table}

    @classmethod
    def from_json(cls, obj):
        if obj.get("order") != len(obj["table"]):
            raise MalformedGroup("order does not match the table size")
        return cls(obj["table"])

    @classmethod
    def from_elements(cls, elements, mul, name=None):
        """Build the table from an element list (identity first) and a product."""
        index = {e: i for i, e in enumerate(elements)}
        table = [[index[mul(x, y)] for y in elements] for x in elements]
        return cls(table, name)


@dataclass
class TPPInstance:
    group: FiniteGroup
    S1: tuple
    S2: tuple
    S3: tuple
    degrees: tuple = None

    def __post_init__(self):
        for S in (self.S1, self.S2, self.S3):
            if not S:
                raise ValueError("subsets must be nonempty")
            if any(not 0 <= x < self.group.order for x in S):
                raise ValueError("subset element outside the group")


def quotient_set(G, S):
    return {G.mul(G.inv[x], y) for x in S for y in S}


def tpp_holds(G, S1, S2, S3):
    Q1, Q2, Q3 = quotient_set(G, S1), quotient_set(G, S2), quotient_set(G, S3)
    for x in Q1:
        for y in Q2:
            xy = G.mul(x, y)
            # x y z = e  <=>  z = (x y)^-1
            z = G.inv[xy]
            if z in Q3 and not (x == 0 and y == 0 and z == 0):
                return False
    return True


def tpp_check(inst):
    return tpp_holds(inst.group, inst.S1, inst.S2, inst.S3)


def find_tpp_triple(G, sizes):
    """First (S1, S2, S3) with the given sizes satisfying the property, or None."""
    n1, n2, n3 = sizes
    elems = range(G.order)
    # translating a subset does not change its quotient set, so S_i may contain the identity
    cands = [[c for c in itertools.combinations(elems, k) if 0 in c] for k in (n1, n2, n3)]
    for S1 in cands[0]:
        for S2 in cands[1]:
            for S3 in cands[2]:
                if tpp_holds(G, S1, S2, S3):
                    return S1, S2, S3
    return None


def tpp_omega_bound(inst):
    """Largest omega admitted by (nmp)^(omega/3) <= d^(omega-2) |G|.

    Returns math.inf when every omega >= 2 satisfies the inequality.
    """
    G = inst.group
    if inst.degrees is None:
        if not G.is_abelian():
            raise ValueError("character degrees are required for a non-abelian group")
        d = 1
    else:
        d = max(inst.degrees)
    N = len(inst.S1) * len(inst.S2) * len(inst.S3)
    slope = math.log(N) / 3 - math.log(d)
    const = math.log(G.order) - 2 * math.log(d)
    if slope <= 0:
        return math.inf
    return const / slope


def cyclic_group(n):
    return FiniteGroup([[(i + j) % n for j in range(n)] for i in range(n)], f"Z{n}")


def direct_product(G, H, name=None):
    n, m = G.order, H.order
    table = [[G.table[i // m][j // m] * m + H.table[i % m][j % m] for j in range(n * m)]
             for i in range(n * m)]
    return FiniteGroup(table, name or f"{G.name}x{H.name}")


def dihedral_group(n):
    """Symmetries of the n-gon, elements a^k x^j."""
    elems = [(k, j) for j in (0, 1) for k in range(n)]

    def mul(p, q):
        (k, j), (m, l) = p, q
        return ((k + (m if j == 0 else -m)) % n, (j + l) % 2)
    return FiniteGroup.from_elements(elems, mul, f"D{n}")


def dicyclic_group(n):
    """<a, x | a^(2n) = 1, x^2 = a^n, x a x^-1 = a^-1>; n = 2 gives the quaternions."""
    m = 2 * n
    elems = [(k, j) for j in (0, 1) for k in range(m)]

    def mul(p, q):
        (k, j), (l, e) = p, q
        if j == 0:
            return ((k + l) % m, e)
        if e == 0:
            return ((k - l) % m, 1)
        return ((k - l + n) % m, 0)
    return FiniteGroup.from_elements(elems, mul, f"Dic{n}")


def alternating_group_4():
    even = [p for p in itertools.permutations(range(4))
            if sum(1 for i in range(4) for j in range(i) if p[j] > p[i]) % 2 == 0]

    def mul(p, q):
        return tuple(p[q[i]] for i in range(4))
    return FiniteGroup.from_elements(even, mul, "A4")


def small_groups(max_order=12):
    """One representative of each isomorphism class of groups of order <= max_order (at most 12)."""
    Z = cyclic_group
    groups = [Z(n) for n in range(1, max_order + 1)]
    extra = [
        direct_product(Z(2), Z(2)), dihedral_group(3),
        direct_product(Z(4), Z(2)), direct_product(direct_product(Z(2), Z(2)), Z(2)),
        dihedral_group(4), dicyclic_group(2),
        direct_product(Z(3), Z(3)), dihedral_group(5),
        direct_product(Z(6), Z(2)), alternating_group_4(), dihedral_group(6), dicyclic_group(3),
    ]
    groups += [g for g in extra if g.order <= max_order]
    return sorted(groups, key=lambda g: g.order)


# --- phylogenetic flattening test -------------------------------------

TOPOLOGIES = {"12|34": ((0, 1), (2, 3)), "13|24": ((0, 2), (1, 3)), "14|23": ((0, 3), (1, 2))}


def phylo_necessary(T, topology, rank_bound=4):
    """Necessary condition for the tree model: both grouped flattenings have rank <= 4."""
    if T.shape != (4, 4, 4, 4):
        raise ValueError(f"phylo_necessary needs shape (4, 4, 4, 4), got {T.shape}")
    if topology not in TOPOLOGIES:
        raise ValueError(f"unknown topology {topology!r}; expected one of {sorted(TOPOLOGIES)}")
    left, right = TOPOLOGIES[topology]
    return all(exact_rank(flatten(T, side)) <= rank_bound for side in (left, right))

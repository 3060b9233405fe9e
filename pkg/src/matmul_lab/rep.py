"""Symmetric group characters, invariant multiplicities, Schur modules,
isotypic decomposition of S^d(A_1 x ... x A_n), ideal dimensions and
prolongation."""

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, prod

from . import linalg
from .polynomials import (evaluate_monomials, from_vector, monomial_count,
                          monomial_index, monomials, partial_derivative,
                          to_vector)
from .secant import VarietySpec


class BudgetExceeded(ValueError):
    pass


class ConsistencyError(AssertionError):
    pass


@dataclass(frozen=True, order=True)
class Partition:
    """Weakly decreasing positive parts."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts if p)
        if any(p < 0 for p in parts) or list(parts) != sorted(parts, reverse=True):
            raise ValueError(f"not a partition: {self.parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, x):
        if isinstance(x, Partition):
            return x
        if isinstance(x, str):
            x = [int(c) for c in (x.split(",") if "," in x else x)]
        return cls(tuple(x))

    @property
    def size(self):
        return sum(self.parts)

    def __len__(self):
        return len(self.parts)

    def conjugate(self):
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for p in self.parts if p > i) for i in range(self.parts[0])))

    def boxes(self):
        return [(i, j) for i, p in enumerate(self.parts) for j in range(p)]

    def hook(self, i, j):
        conj = self.conjugate().parts
        return self.parts[i] - j + conj[j] - i - 1

    def __str__(self):
        return "".join(map(str, self.parts)) if all(p < 10 for p in self.parts) else \
            ",".join(map(str, self.parts))


def partitions(d, max_part=None):
    """Partitions of d in reverse lexicographic order, (d) first."""
    if max_part is None:
        max_part = d
    if d == 0:
        yield Partition(())
        return
    for first in range(min(d, max_part), 0, -1):
        for rest in partitions(d - first, first):
            yield Partition((first,) + rest.parts)


def z_value(mu):
    mu = Partition.of(mu)
    out = 1
    for part in set(mu.parts):
        m = mu.parts.count(part)
        out *= part ** m * factorial(m)
    return out


def class_size(mu):
    mu = Partition.of(mu)
    return factorial(mu.size) // z_value(mu)


@lru_cache(maxsize=None)
def _mn(beta, mu):
    if not mu:
        return 1
    k, rest = mu[0], mu[1:]
    bset = set(beta)
    total = 0
    for b in beta:
        if b - k >= 0 and b - k not in bset:
            sign = -1 if sum(1 for c in beta if b - k < c < b) % 2 else 1
            new = tuple(sorted((bset - {b}) | {b - k}, reverse=True))
            total += sign * _mn(new, rest)
    return total


def mn_character(pi, mu):
    """Irreducible character chi_pi at cycle type mu by the Murnaghan-Nakayama rule."""
    pi, mu = Partition.of(pi), Partition.of(mu)
    if pi.size != mu.size:
        raise ValueError(f"sizes differ: |{pi}| = {pi.size}, |{mu}| = {mu.size}")
    n = len(pi)
    beta = tuple(p + n - 1 - i for i, p in enumerate(pi.parts))
    return _mn(beta, mu.parts)


@lru_cache(maxsize=None)
def character_table(d):
    """{(pi, mu): chi_pi(mu)} for all partitions of d."""
    parts = list(partitions(d))
    return {(p, m): mn_character(p, m) for p in parts for m in parts}


MAX_INVARIANT_DEGREE = 12


def invariant_mult(labels):
    """dim of the S_d-invariants of [pi_1] x ... x [pi_n], via class sums."""
    labels = [Partition.of(p) for p in labels]
    d = labels[0].size
    if any(p.size != d for p in labels):
        raise ValueError("all partitions must have the same size")
    if d > MAX_INVARIANT_DEGREE:
        raise BudgetExceeded(f"degree {d} exceeds the enumeration budget {MAX_INVARIANT_DEGREE}")
    table = character_table(d)
    total = 0
    for mu in partitions(d):
        total += class_size(mu) * prod(table[(p, mu)] for p in labels)
    q, r = divmod(total, factorial(d))
    if r:
        raise ConsistencyError("class sum is not divisible by d!")
    return q


def schur_dim(pi, a):
    """dim S_pi C^a by the hook-content formula."""
    pi = Partition.of(pi)
    if len(pi) > a:
        return 0
    num = Fraction(1)
    for i, j in pi.boxes():
        num *= Fraction(a + j - i, pi.hook(i, j))
    return int(num)


@dataclass(frozen=True)
class ModuleLabel:
    partitions: tuple
    multiplicity: int

    def dimension(self, shape):
        return self.multiplicity * prod(schur_dim(p, a) for p, a in zip(self.partitions, shape))

    def __str__(self):
        return ";".join(str(p) for p in self.partitions) + f";{self.multiplicity}"


def decompose_symd(shape, d):
    """Isotypic components of S^d(A_1 x ... x A_n) with dim A_i = shape[i]."""
    shape = tuple(shape)
    if d > 8 or len(shape) > 4 or any(a > 4 for a in shape):
        raise BudgetExceeded("decompose_symd supports d <= 8, n <= 4 and factor dimensions <= 4")
    if d < 1:
        raise ValueError("degree must be positive")
    choices = [[p for p in partitions(d) if len(p) <= a] for a in shape]
    out = []
    for combo in itertools.product(*choices):
        m = invariant_mult(combo)
        if m:
            out.append(ModuleLabel(tuple(combo), m))
    total = sum(lab.dimension(shape) for lab in out)
    expected = comb(prod(shape) + d - 1, d)
    if total != expected:
        raise ConsistencyError(f"dimension identity failed: {total} != {expected}")
    return out


# --- Young symmetrizers ---------------------------------------------------

def canonical_tableau(pi):
    """Rows filled with 0, 1, ..., d-1 in reading order."""
    pi = Partition.of(pi)
    out, k = [], 0
    for p in pi.parts:
        out.append(list(range(k, k + p)))
        k += p
    return out


def _permutation_sign(perm):
    seen, sign = set(), 1
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _group_of(blocks, d):
    """All permutations of range(d) preserving each block setwise."""
    perms = [list(range(d))]
    for block in blocks:
        new = []
        for base in perms:
            for image in itertools.permutations(block):
                p = list(base)
                for src, dst in zip(block, image):
                    p[src] = dst
                new.append(p)
        perms = new
    return [tuple(p) for p in perms]


def _act(perm, tensor):
    """Move the factor in position i to position perm[i]."""
    out = {}
    for word, c in tensor.items():
        new = [0] * len(word)
        for i, letter in enumerate(word):
            new[perm[i]] = letter
        new = tuple(new)
        out[new] = out.get(new, 0) + c
    return {w: c for w, c in out.items() if c}


def young_symmetrize(tableau, tensor):
    """Symmetrize along rows, then antisymmetrize along columns.

    `tensor` is a dict mapping words (tuples of basis indices) to coefficients.
    """
    d = sum(len(r) for r in tableau)
    entries = sorted(x for r in tableau for x in r)
    if entries != list(range(d)):
        raise ValueError("tableau must contain 0..d-1 exactly once")
    if any(len(tableau[i]) < len(tableau[i + 1]) for i in range(len(tableau) - 1)):
        raise ValueError("tableau rows must weakly decrease in length")
    if any(len(w) != d for w in tensor):
        raise ValueError(f"tensor words must have length {d}")
    cols = [[r[j] for r in tableau if len(r) > j] for j in range(len(tableau[0]))] if tableau else []
    rowsum = {}
    for p in _group_of(tableau, d):
        for w, c in _act(p, tensor).items():
            rowsum[w] = rowsum.get(w, 0) + c
    out = {}
    for p in _group_of(cols, d):
        s = _permutation_sign(p)
        for w, c in _act(p, rowsum).items():
            out[w] = out.get(w, 0) + s * c
    return {w: c for w, c in out.items() if c}


def highest_weight_seed(pi):
    """e_1^{p_1} x e_2^{p_2} x ... as a word aligned with canonical_tableau."""
    pi = Partition.of(pi)
    word = tuple(i for i, p in enumerate(pi.parts) for _ in range(p))
    return {word: 1}


def raise_operator(tensor, i):
    """Sum over positions of substituting e_i for e_{i+1}."""
    out = {}
    for w, c in tensor.items():
        for pos, letter in enumerate(w):
            if letter == i + 1:
                nw = w[:pos] + (i,) + w[pos + 1:]
                out[nw] = out.get(nw, 0) + c
    return {w: c for w, c in out.items() if c}


# --- ideals and prolongation ------------------------------------------------

@dataclass(frozen=True)
class SecantSpec:
    variety: VarietySpec
    r: int

    @classmethod
    def parse(cls, text):
        """'secant:R:kind:params' or a plain variety string."""
        if text.startswith("secant:"):
            _, r, rest = text.split(":", 2)
            return cls(VarietySpec.parse(rest), int(r))
        return cls(VarietySpec.parse(text), 1)

    @property
    def ambient(self):
        return self.variety.ambient

    def random_point(self, rng):
        total = None
        for _ in range(self.r):
            p = self.variety.point(self.variety.random_parameters(rng))
            total = p if total is None else [x + y for x, y in zip(total, p)]
        return total


def secant_of(v, r):
    return SecantSpec(v, r)


MONOMIAL_BUDGET = 5000


def _as_secant(v):
    return v if isinstance(v, SecantSpec) else SecantSpec(v, 1)


def evaluation_matrix(v, k, samples=None, seed=0):
    s = _as_secant(v)
    N = s.ambient
    count = monomial_count(N, k)
    if count > MONOMIAL_BUDGET:
        raise BudgetExceeded(f"{count} monomials exceed the budget {MONOMIAL_BUDGET}")
    if samples is None:
        samples = 3 * count
    rng = random.Random(seed)
    return [evaluate_monomials([int(x) for x in s.random_point(rng)], k) for _ in range(samples)]


def ideal_dim_numeric(v, k, samples=None, seed=0):
    """Dimension of the degree-k polynomials vanishing at random points of the cone.

    Always an upper bound for dim I_k, and equal to it for generic samples.
    """
    rows = evaluation_matrix(v, k, samples, seed)
    return len(rows[0]) - linalg.rank(rows)


@dataclass(frozen=True)
class PolySpace:
    degree: int
    nvars: int
    basis: tuple

    def __post_init__(self):
        basis = tuple(tuple(Fraction(x) for x in b) for b in self.basis)
        n = monomial_count(self.nvars, self.degree)
        if any(len(b) != n for b in basis):
            raise ValueError("basis vectors must have one coefficient per monomial")
        if basis and linalg.rank(basis) != len(basis):
            raise ValueError("basis vectors are linearly dependent")
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self):
        return len(self.basis)

    @classmethod
    def from_polynomials(cls, polys, nvars, degree):
        vecs = [to_vector(p, nvars, degree) for p in polys]
        if vecs:
            m, piv = linalg.rref(vecs)
            vecs = m[:len(piv)]
        return cls(degree, nvars, tuple(vecs))

    def polynomials(self):
        return [from_vector(b, self.nvars, self.degree) for b in self.basis]


def ideal_space(v, k, samples=None, seed=0):
    """Kernel of the evaluation matrix as a PolySpace (exact, for small cases)."""
    rows = evaluation_matrix(v, k, samples, seed)
    basis = linalg.nullspace(rows, len(rows[0]))
    return PolySpace(k, _as_secant(v).ambient, tuple(basis))


def prolong(A, p):
    """A^(p): degree k+p polynomials all of whose p-th partial derivatives lie in A."""
    if p < 1:
        raise ValueError("p must be at least 1")
    n, k = A.nvars, A.degree
    target = k + p
    size_k = monomial_count(n, k)
    if A.dim == 0:
        return PolySpace(target, n, ())
    ann = linalg.nullspace([list(b) for b in A.basis], size_k)   # functionals vanishing on A
    idx_k = monomial_index(n, k)
    mons = monomials(n, target)
    conditions = []
    for beta in monomials(n, p):
        # matrix of the derivative d^beta : S^{k+p} -> S^k in monomial bases
        deriv = [[Fraction(0)] * len(mons) for _ in range(size_k)]
        for col, m in enumerate(mons):
            poly = {m: Fraction(1)}
            for var, times in enumerate(beta):
                for _ in range(times):
                    poly = partial_derivative(poly, var)
            for e, c in poly.items():
                deriv[idx_k[e]][col] += c
        for f in ann:
            conditions.append([sum(f[i] * deriv[i][col] for i in range(size_k) if f[i])
                               for col in range(len(mons))])
    if not conditions:
        basis = [[Fraction(int(i == j)) for j in range(len(mons))] for i in range(len(mons))]
    else:
        basis = linalg.nullspace(conditions, len(mons))
    return PolySpace(target, n, tuple(basis))


def cubics_of_secant2(shape):
    """Predicted dim I_3(sigma_2) of the Segre variety of the given shape."""
    k = len(shape)
    s3 = [schur_dim((3,), a) for a in shape]
    s21 = [schur_dim((2, 1), a) for a in shape]
    s111 = [schur_dim((1, 1, 1), a) for a in shape]
    total = Fraction(0)
    for roles in itertools.product("IJL", repeat=k):
        j = roles.count("J")
        l = roles.count("L")
        dim = prod(s3[i] if r == "I" else s21[i] if r == "J" else s111[i] for i, r in enumerate(roles))
        coeff = Fraction(2 ** (j - 1) - (-1) ** (j - 1), 3) if j >= 1 else None
        if j > 1 and l > 0:
            total += coeff * dim
        if l == 0 and j > 3:
            total += (coeff - 1) * dim
        if j == 0 and l > 0 and l % 2 == 0:
            total += dim
    return int(total)

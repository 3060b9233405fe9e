"""Bilinear computations: exact and eps-approximate decompositions, the
shipped catalog, multiplicative-complexity certificates and separations."""

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from . import linalg
from .tensor_core import (EpsScalar, EpsTensor, Tensor, as_scalar, contract,
                          eps_limit, outer)


class UnknownCatalogEntry(KeyError):
    pass


class BudgetExceeded(ValueError):
    pass


class IncompatibleSplit(ValueError):
    pass


def _eps_vector(v):
    return tuple(EpsScalar.from_json(x) if isinstance(x, (dict, str)) else EpsScalar.lift(x) for x in v)


@dataclass(frozen=True)
class RankOneTerm:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(_eps_vector(f) for f in self.factors))
        for f in self.factors:
            if not any(f):
                raise ValueError("rank-one term has a zero factor vector")

    @property
    def shape(self):
        return tuple(len(f) for f in self.factors)

    def is_exact(self):
        return all(set(x.coeffs) <= {0} for f in self.factors for x in f)

    def evaluate(self, eps0):
        return [[x.evaluate(eps0) for x in f] for f in self.factors]

    def tensor(self):
        if self.is_exact():
            return outer(*[[x.coefficient(0) for x in f] for f in self.factors])
        return outer(*self.factors)


@dataclass(frozen=True)
class Decomposition:
    shape: tuple
    terms: tuple = ()
    prefactor: EpsScalar = field(default_factory=lambda: EpsScalar.lift(1))

    def __post_init__(self):
        object.__setattr__(self, "shape", tuple(self.shape))
        terms = tuple(t if isinstance(t, RankOneTerm) else RankOneTerm(t) for t in self.terms)
        for t in terms:
            if t.shape != self.shape:
                raise ValueError(f"term of shape {t.shape} in a decomposition of shape {self.shape}")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "prefactor", EpsScalar.lift(self.prefactor))

    def __len__(self):
        return len(self.terms)

    def is_exact(self):
        return set(self.prefactor.coeffs) <= {0} and all(t.is_exact() for t in self.terms)

    def without(self, index):
        return Decomposition(self.shape, self.terms[:index] + self.terms[index + 1:], self.prefactor)

    def with_term(self, index, term):
        terms = list(self.terms)
        terms[index] = term if isinstance(term, RankOneTerm) else RankOneTerm(term)
        return Decomposition(self.shape, terms, self.prefactor)

    def to_json(self):
        return {
            "shape": list(self.shape),
            "prefactor": self.prefactor.to_json(),
            "terms": [{"factors": [[x.to_json() for x in f] for f in t.factors]} for t in self.terms],
        }

    @classmethod
    def from_json(cls, obj):
        terms = [RankOneTerm(tuple(t["factors"])) for t in obj["terms"]]
        pre = EpsScalar.from_json(obj.get("prefactor", "1"))
        return cls(tuple(obj["shape"]), terms, pre)


@dataclass(frozen=True)
class VSplitDecomposition:
    decomposition: Decomposition
    split: int

    def __post_init__(self):
        shape = self.decomposition.shape
        if len(shape) != 3 or shape[0] != shape[1]:
            raise IncompatibleSplit(f"split decompositions need shape (a+b, a+b, c), got {shape}")
        if not 0 < self.split < shape[0]:
            raise IncompatibleSplit(f"split point {self.split} must lie strictly inside 0..{shape[0]}")

    def __len__(self):
        return len(self.decomposition)

    def without(self, index):
        return VSplitDecomposition(self.decomposition.without(index), self.split)


def assemble(D):
    """Sum of the outer products of the terms, times the prefactor."""
    if isinstance(D, VSplitDecomposition):
        D = D.decomposition
    exact = D.is_exact()
    total = Tensor.zeros(D.shape) if exact else EpsTensor(D.shape)
    for t in D.terms:
        if t.shape != D.shape:
            raise ValueError(f"term shape {t.shape} does not match decomposition shape {D.shape}")
        total = total + t.tensor()
    if exact:
        c = D.prefactor.coefficient(0)
        return total if c == 1 else total.scale(c)
    if not isinstance(total, EpsTensor):
        total = EpsTensor.lift(total)
    return total.scale(D.prefactor)


def matmul_tensor(m, n, p):
    """Tensor of (m x n)(n x p) multiplication, modes (mn, np, mp)."""
    if min(m, n, p) < 1:
        raise ValueError("matrix dimensions must be positive")
    entries = {}
    for i in range(m):
        for k in range(n):
            for l in range(p):
                entries[(i * n + k, k * p + l, i * p + l)] = 1
    return Tensor.from_dict((m * n, n * p, m * p), entries)


# --- catalog --------------------------------------------------------------

def _catalog_dir():
    return resources.files("matmul_lab") / "data" / "catalog"


def catalog_names():
    return sorted(p.name[:-5] for p in _catalog_dir().iterdir() if p.name.endswith(".json"))


def catalog_record(name):
    path = _catalog_dir() / f"{name}.json"
    if not path.is_file():
        raise UnknownCatalogEntry(f"unknown catalog entry {name!r}; available: {', '.join(catalog_names())}")
    return json.loads(path.read_text())


def catalog(name):
    """Decomposition (or VSplitDecomposition) stored under `name`."""
    rec = catalog_record(name)
    dec = Decomposition.from_json(rec)
    if "split" in rec:
        return VSplitDecomposition(dec, rec["split"])
    return dec


def catalog_target(name):
    """The tensor a catalog entry is meant to compute or approximate."""
    spec = catalog_record(name)["target"]
    return named_target(spec)


def named_target(spec):
    from .tensor_core import ghz_tensor, w_tensor
    if spec.startswith("matmul:"):
        m, n, p = (int(x) for x in spec.split(":", 1)[1].split(","))
        return matmul_tensor(m, n, p)
    if spec.startswith("partial-matmul:"):
        m, n, p, drop = spec.split(":", 1)[1].split(",")
        return partial_matmul_tensor(int(m), int(n), int(p), int(drop))
    if spec == "w-state":
        return w_tensor()
    if spec == "ghz":
        return ghz_tensor()
    raise ValueError(f"unknown named tensor {spec!r}")


def partial_matmul_tensor(m, n, p, dropped):
    """Matrix multiplication tensor with one entry of the first matrix forced to zero."""
    T = matmul_tensor(m, n, p)
    return Tensor(T.shape, [0 if idx[0] == dropped else v for idx, v in T.items()])


# --- verification -------------------------------------------------------

def verify_exact(D, T):
    if isinstance(D, VSplitDecomposition):
        D = D.decomposition
    if not D.is_exact():
        raise ValueError("verify_exact needs a decomposition without eps dependence")
    if tuple(D.shape) != T.shape:
        return False
    return assemble(D) == T


def _terms_nondegenerate(D, eps0):
    if D.prefactor.evaluate(eps0) == 0:
        return False
    return all(any(x != 0 for x in f) for t in D.terms for f in t.evaluate(eps0))


def verify_border(D, T):
    """Check that D(eps) tends to T; returns (ok, order of the remainder).

    The order is math.inf when D computes T exactly. A divergent family
    raises DivergentLimit.
    """
    if tuple(D.shape) != T.shape:
        return False, None
    A = assemble(D)
    if isinstance(A, Tensor):
        A = EpsTensor.lift(A)
    limit = eps_limit(A)
    if limit != T:
        return False, None
    if not any(_terms_nondegenerate(D, e) for e in (Fraction(1, 7), Fraction(1, 11))):
        return False, None
    remainder = A - EpsTensor.lift(T)
    order = remainder.min_degree()
    return True, (math.inf if order is None else order)


def mult_complexity_verify(D, T):
    """Certificate that the quadratic map computed by D over A+B equals T.

    The symmetrized AA and BB blocks must vanish and the symmetrized mixed
    block must reproduce T(x, y).
    """
    a = D.split
    n, _, c = D.decomposition.shape
    b = n - a
    if T.shape != (a, b, c):
        raise IncompatibleSplit(f"target shape {T.shape} incompatible with split ({a}+{b}, {a}+{b}, {c})")
    S = assemble(D.decomposition)
    if isinstance(S, EpsTensor):
        S = eps_limit(S)
    for u in range(n):
        for v in range(u, n):
            same_block = (u < a) == (v < a)
            for w in range(c):
                sym = S[u, v, w] + S[v, u, w]
                if same_block:
                    if sym != 0:
                        return False
                else:
                    i, j = (u, v - a) if u < a else (v, u - a)
                    if sym != T[i, j, w]:
                        return False
    return True


def embed_block(D, a, b):
    """Embed an ordinary decomposition of an (a, b, c) tensor into (a+b, a+b, c)."""
    c = D.shape[2]
    zero = EpsScalar()
    terms = []
    for t in D.terms:
        x, y, z = t.factors
        terms.append(RankOneTerm((tuple(x) + (zero,) * b, (zero,) * a + tuple(y), z)))
    return VSplitDecomposition(Decomposition((a + b, a + b, c), terms, D.prefactor), a)


# --- separations ------------------------------------------------------------

@dataclass(frozen=True)
class SeparationQuery:
    decomposition: Decomposition
    A1: tuple = ()
    B1: tuple = ()
    C1: tuple = ()

    def __post_init__(self):
        for name in ("A1", "B1", "C1"):
            basis = tuple(tuple(as_scalar(x) for x in v) for v in getattr(self, name))
            if basis and linalg.rank(basis) != len(basis):
                raise ValueError(f"{name} basis vectors are linearly dependent")
            object.__setattr__(self, name, basis)


@dataclass(frozen=True)
class Separation:
    parts: tuple          # (phi1, phi2, phi3) as tuples of term indices
    bound: int
    phi3_in_C1: int


def _injective_on(terms, mode, basis, shape):
    """Is v -> contraction of sum(terms) with v injective on span(basis)?"""
    if not basis:
        return True
    if not terms:
        return False
    total = Tensor.zeros(shape)
    for t in terms:
        total = total + t
    rows = [contract(total, mode, v).entries for v in basis]
    return linalg.rank(rows) == len(basis)


def _in_span(vec, basis):
    if not any(vec):
        return True
    if not basis:
        return False
    return linalg.rank(list(basis) + [vec]) == len(basis)


def _exact_terms(D):
    if not D.is_exact():
        raise ValueError("separations need an exact decomposition")
    pre = D.prefactor.coefficient(0)
    return [t.tensor().scale(pre) if pre != 1 else t.tensor() for t in D.terms], \
        [[x.coefficient(0) for x in t.factors[2]] for t in D.terms]


def separation_check(q, budget=12):
    """Lexicographically least splitting of the terms into (phi1, phi2, phi3)
    that separates (A1, B1, C1), or None."""
    D = q.decomposition
    r = len(D)
    if r > budget:
        raise BudgetExceeded(f"decomposition length {r} exceeds the brute-force budget {budget}")
    tensors, cvecs = _exact_terms(D)
    in_c1 = [_in_span(c, q.C1) for c in cvecs]
    for assign in itertools.product(range(3), repeat=r):
        parts = [[u for u in range(r) if assign[u] == k] for k in range(3)]
        if any(in_c1[u] for u in parts[0] + parts[1]):
            continue
        if not _injective_on([tensors[u] for u in parts[0]], 0, q.A1, D.shape):
            continue
        if not _injective_on([tensors[u] for u in parts[1]], 1, q.B1, D.shape):
            continue
        count = sum(1 for u in parts[2] if in_c1[u])
        bound = len(q.A1) + len(q.B1) + count
        assert bound <= r, "separation bound exceeds the length of the computation"
        return Separation(tuple(tuple(p) for p in parts), bound, count)
    return None


def strong_separation_check(q, budget=9):
    """Flagged variant: all-modes Separation (capital S).

    Looks for phi = phi_1 + phi_2 + phi_3 + psi with contraction of phi_j
    injective on the j-th subspace. The implied bound is the sum of the
    subspace dimensions. Untested against worked examples.
    """
    D = q.decomposition
    r = len(D)
    if r > budget:
        raise BudgetExceeded(f"decomposition length {r} exceeds the brute-force budget {budget}")
    tensors, _ = _exact_terms(D)
    subspaces = (q.A1, q.B1, q.C1)
    for assign in itertools.product(range(4), repeat=r):
        parts = [[u for u in range(r) if assign[u] == k] for k in range(4)]
        if all(_injective_on([tensors[u] for u in parts[m]], m, subspaces[m], D.shape) for m in range(3)):
            return Separation(tuple(tuple(p) for p in parts), sum(len(s) for s in subspaces), 0)
    return None

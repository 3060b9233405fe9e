"""Dense exact tensors, Laurent polynomials in eps, flattenings and ranks.

Modes are numbered from 0. Entries are stored row-major in the given mode
order, so the last index varies fastest.
"""

import itertools
import json
from fractions import Fraction
from math import prod

from . import linalg


class InvalidModeSet(ValueError):
    pass


class DivergentLimit(ValueError):
    pass


def as_scalar(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        raise TypeError("floating point values are not exact scalars")
    return Fraction(x)


class EpsScalar:
    """A Laurent polynomial in eps with rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        clean = {}
        for k, v in (coeffs or {}).items():
            v = as_scalar(v)
            if v != 0:
                clean[int(k)] = v
        self.coeffs = clean

    @classmethod
    def lift(cls, x):
        if isinstance(x, EpsScalar):
            return x
        return cls({0: x})

    @classmethod
    def eps(cls, power=1):
        return cls({power: 1})

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def min_degree(self):
        return min(self.coeffs) if self.coeffs else None

    def coefficient(self, k):
        return self.coeffs.get(k, Fraction(0))

    def evaluate(self, eps0):
        eps0 = as_scalar(eps0)
        return sum((v * eps0 ** k for k, v in self.coeffs.items()), Fraction(0))

    def __add__(self, other):
        other = EpsScalar.lift(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return EpsScalar(out)

    __radd__ = __add__

    def __neg__(self):
        return EpsScalar({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-EpsScalar.lift(other))

    def __rsub__(self, other):
        return EpsScalar.lift(other) - self

    def __mul__(self, other):
        other = EpsScalar.lift(other)
        out = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + v1 * v2
        return EpsScalar(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, EpsScalar)):
            return self.coeffs == EpsScalar.lift(other).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def __repr__(self):
        if not self.coeffs:
            return "EpsScalar(0)"
        return "EpsScalar(" + " + ".join(f"{v}*eps^{k}" for k, v in sorted(self.coeffs.items())) + ")"

    def to_json(self):
        return {"eps": {str(k): str(v) for k, v in sorted(self.coeffs.items())}}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, dict):
            return cls(obj["eps"])
        return cls.lift(as_scalar(obj))


def _strides(shape):
    strides = [1] * len(shape)
    for i in range(len(shape) - 2, -1, -1):
        strides[i] = strides[i + 1] * shape[i + 1]
    return strides


class _Dense:
    """Common storage for Tensor and EpsTensor."""

    __slots__ = ("shape", "entries", "_strides")
    _zero = None

    def __init__(self, shape, entries=None):
        shape = tuple(int(a) for a in shape)
        if any(a < 1 for a in shape):
            raise ValueError(f"dimensions must be positive, got {shape}")
        size = prod(shape)
        if entries is None:
            entries = [self._zero] * size
        entries = tuple(self._coerce(x) for x in entries)
        if len(entries) != size:
            raise ValueError(f"expected {size} entries for shape {shape}, got {len(entries)}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "_strides", _strides(shape))

    def __setattr__(self, name, value):
        raise AttributeError("tensors are immutable")

    @property
    def order(self):
        return len(self.shape)

    def offset(self, idx):
        if len(idx) != len(self.shape):
            raise IndexError(f"index {idx} has wrong arity for shape {self.shape}")
        off = 0
        for i, a, s in zip(idx, self.shape, self._strides):
            if not 0 <= i < a:
                raise IndexError(f"index {idx} out of range for shape {self.shape}")
            off += i * s
        return off

    def __getitem__(self, idx):
        if isinstance(idx, int):
            idx = (idx,)
        return self.entries[self.offset(tuple(idx))]

    def indices(self):
        return itertools.product(*(range(a) for a in self.shape))

    def items(self):
        return zip(self.indices(), self.entries)

    def nonzero(self):
        return [(idx, v) for idx, v in self.items() if v]

    def __eq__(self, other):
        if not isinstance(other, _Dense):
            return NotImplemented
        return self.shape == other.shape and all(
            EpsScalar.lift(a) == EpsScalar.lift(b) if isinstance(a, EpsScalar) or isinstance(b, EpsScalar)
            else a == b
            for a, b in zip(self.entries, other.entries))

    def __hash__(self):
        return hash((self.shape, self.entries))

    def _check_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check_shape(other)
        cls = EpsTensor if isinstance(other, EpsTensor) else type(self)
        return cls(self.shape, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._check_shape(other)
        cls = EpsTensor if isinstance(other, EpsTensor) else type(self)
        return cls(self.shape, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self):
        return type(self)(self.shape, [-a for a in self.entries])

    def scale(self, c):
        cls = EpsTensor if isinstance(c, EpsScalar) else type(self)
        return cls(self.shape, [c * a for a in self.entries])

    def is_zero(self):
        return not any(self.entries)

    def permute(self, perm):
        """Reorder modes: new mode k is old mode perm[k]."""
        perm = list(perm)
        new_shape = [self.shape[p] for p in perm]
        out = []
        for new_idx in itertools.product(*(range(a) for a in new_shape)):
            old = [0] * len(perm)
            for k, p in enumerate(perm):
                old[p] = new_idx[k]
            out.append(self.entries[self.offset(tuple(old))])
        return type(self)(new_shape, out)

    def reshape(self, shape):
        return type(self)(shape, self.entries)


class Tensor(_Dense):
    """Dense tensor with exact rational entries."""

    __slots__ = ()
    _zero = Fraction(0)

    @staticmethod
    def _coerce(x):
        return as_scalar(x)

    @classmethod
    def zeros(cls, shape):
        return cls(shape)

    @classmethod
    def from_nested(cls, nested):
        shape = []
        probe = nested
        while isinstance(probe, (list, tuple)):
            shape.append(len(probe))
            probe = probe[0]
        flat = list(_flatten_nested(nested))
        return cls(shape, flat)

    @classmethod
    def from_dict(cls, shape, entries):
        t = [Fraction(0)] * prod(shape)
        strides = _strides(tuple(shape))
        for idx, v in entries.items():
            t[sum(i * s for i, s in zip(idx, strides))] += as_scalar(v)
        return cls(shape, t)

    def to_nested(self):
        return _nest(list(self.entries), self.shape)

    def rows(self):
        """Matrix view as a list of rows; only for order-2 tensors."""
        if self.order != 2:
            raise ValueError("rows() needs a matrix")
        a, b = self.shape
        return [list(self.entries[i * b:(i + 1) * b]) for i in range(a)]

    def __repr__(self):
        return f"Tensor(shape={self.shape}, nonzero={len(self.nonzero())})"


class EpsTensor(_Dense):
    """Dense tensor whose entries are Laurent polynomials in eps."""

    __slots__ = ()
    _zero = EpsScalar()

    @staticmethod
    def _coerce(x):
        return EpsScalar.lift(x if isinstance(x, EpsScalar) else as_scalar(x))

    @classmethod
    def lift(cls, t):
        return cls(t.shape, [EpsScalar.lift(x) for x in t.entries])

    def min_degree(self):
        degs = [e.min_degree() for e in self.entries if e]
        return min(degs) if degs else None

    def coefficient(self, k):
        return Tensor(self.shape, [e.coefficient(k) for e in self.entries])

    def evaluate(self, eps0):
        return Tensor(self.shape, [e.evaluate(eps0) for e in self.entries])

    def degrees(self):
        return sorted({k for e in self.entries for k in e.coeffs})

    def __repr__(self):
        return f"EpsTensor(shape={self.shape}, degrees={self.degrees()})"


def _flatten_nested(x):
    if isinstance(x, (list, tuple)):
        for y in x:
            yield from _flatten_nested(y)
    else:
        yield x


def _nest(flat, shape):
    if len(shape) == 1:
        return flat
    step = len(flat) // shape[0]
    return [_nest(flat[i * step:(i + 1) * step], shape[1:]) for i in range(shape[0])]


def outer(*vectors):
    """Outer product of coefficient vectors; returns a Tensor or EpsTensor."""
    eps = any(isinstance(x, EpsScalar) for v in vectors for x in v)
    shape = [len(v) for v in vectors]
    entries = []
    for combo in itertools.product(*vectors):
        p = combo[0]
        for x in combo[1:]:
            p = p * x
        entries.append(p)
    if eps:
        return EpsTensor(shape, entries)
    return Tensor(shape, [as_scalar(x) for x in entries])


def basis_vector(n, i):
    return [Fraction(int(j == i)) for j in range(n)]


def matrix(rows):
    rows = [list(r) for r in rows]
    return Tensor((len(rows), len(rows[0])), [x for r in rows for x in r])


# --- operations ---------------------------------------------------------


def flatten(T, modes):
    modes = sorted(set(modes))
    n = T.order
    if not modes or len(modes) == n or any(not 0 <= m < n for m in modes):
        raise InvalidModeSet(f"mode set {modes} must be a nonempty proper subset of 0..{n - 1}")
    rest = [m for m in range(n) if m not in modes]
    rows = prod(T.shape[m] for m in modes)
    cols = prod(T.shape[m] for m in rest)
    permuted = T.permute(modes + rest)
    return type(T)((rows, cols), permuted.entries)


def exact_rank(M):
    if isinstance(M, Tensor):
        if M.order != 2:
            raise ValueError("exact_rank needs a matrix")
        return linalg.rank(M.rows())
    return linalg.rank(M)


def contract(T, mode, covector):
    if not 0 <= mode < T.order:
        raise ValueError(f"mode {mode} out of range for order {T.order}")
    covector = list(covector)
    if len(covector) != T.shape[mode]:
        raise ValueError(f"covector length {len(covector)} does not match dimension {T.shape[mode]} of mode {mode}")
    if T.order == 1:
        raise ValueError("cannot contract away the only mode")
    moved = T.permute([mode] + [m for m in range(T.order) if m != mode])
    rest_shape = moved.shape[1:]
    block = prod(rest_shape)
    out = [Fraction(0)] * block if isinstance(T, Tensor) else [EpsScalar()] * block
    for i, c in enumerate(covector):
        if not c:
            continue
        chunk = moved.entries[i * block:(i + 1) * block]
        out = [o + c * x for o, x in zip(out, chunk)]
    return type(T)(rest_shape, out)


def multilinear_ranks(T):
    return [exact_rank(flatten(T, [i])) for i in range(T.order)]


def eps_limit(T):
    if isinstance(T, Tensor):
        return T
    for idx, e in T.items():
        d = e.min_degree()
        if d is not None and d < 0:
            raise DivergentLimit(f"entry {list(idx)} has a term of degree {d} in eps: {e}")
    return T.coefficient(0)


def flattening_bound(T):
    """Largest rank over all flattenings (each split counted once)."""
    n = T.order
    best = 0
    for size in range(1, n // 2 + 1):
        for modes in itertools.combinations(range(n), size):
            best = max(best, exact_rank(flatten(T, modes)))
    return best


# --- named tensors --------------------------------------------------------


def w_tensor():
    """a1b1c1 + a1b1c2 + a1b2c1 + a2b1c1, basis vectors numbered from 0."""
    return Tensor.from_dict((2, 2, 2), {(0, 0, 0): 1, (0, 0, 1): 1, (0, 1, 0): 1, (1, 0, 0): 1})


def ghz_tensor():
    return Tensor.from_dict((2, 2, 2), {(0, 0, 0): 1, (1, 1, 1): 1})


def diagonal_tensor(n):
    return Tensor.from_dict((n, n, n), {(i, i, i): 1 for i in range(n)})


# --- JSON -----------------------------------------------------------------


def tensor_to_json(T):
    entries = []
    for idx, v in T.items():
        if not v:
            continue
        val = v.to_json() if isinstance(v, EpsScalar) else str(v)
        entries.append({"idx": list(idx), "val": val})
    return {"shape": list(T.shape), "entries": entries}


def tensor_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    shape = obj["shape"]
    eps = any(isinstance(e["val"], dict) for e in obj["entries"])
    cls = EpsTensor if eps else Tensor
    vals = [cls._zero] * prod(shape)
    strides = _strides(tuple(shape))
    for e in obj["entries"]:
        idx = e["idx"]
        if len(idx) != len(shape) or any(not 0 <= i < a for i, a in zip(idx, shape)):
            raise ValueError(f"entry index {idx} out of range for shape {shape}")
        off = sum(i * s for i, s in zip(idx, strides))
        val = EpsScalar.from_json(e["val"]) if eps else as_scalar(e["val"])
        vals[off] = vals[off] + val
    return cls(shape, vals)


def load_tensor(path):
    with open(path) as fh:
        return tensor_from_json(json.load(fh))


def save_tensor(T, path):
    with open(path, "w") as fh:
        json.dump(tensor_to_json(T), fh, indent=1)

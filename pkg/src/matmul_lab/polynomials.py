"""Homogeneous polynomials as dicts from exponent tuples to coefficients.

Monomials of a fixed degree are listed in graded lexicographic order, the
order used everywhere in the package.
"""

from fractions import Fraction
from functools import lru_cache
from math import comb


@lru_cache(maxsize=None)
def monomials(nvars, degree):
    """Exponent tuples of the given degree, graded lex (x0^d first)."""
    out = []

    def rec(prefix, left, remaining):
        if remaining == 1:
            out.append(tuple(prefix + [left]))
            return
        for e in range(left, -1, -1):
            rec(prefix + [e], left - e, remaining - 1)
    if nvars == 0:
        return ((),) if degree == 0 else ()
    rec([], degree, nvars)
    return tuple(out)


def monomial_count(nvars, degree):
    return comb(nvars + degree - 1, degree)


@lru_cache(maxsize=None)
def monomial_index(nvars, degree):
    return {m: i for i, m in enumerate(monomials(nvars, degree))}


def linear_form(coeffs):
    n = len(coeffs)
    return {tuple(int(i == j) for j in range(n)): Fraction(c) for i, c in enumerate(coeffs) if c}


def poly_mul(p, q):
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def poly_pow(p, k, nvars):
    out = {(0,) * nvars: Fraction(1)}
    for _ in range(k):
        out = poly_mul(out, p)
    return out


def to_vector(p, nvars, degree):
    idx = monomial_index(nvars, degree)
    v = [Fraction(0)] * len(idx)
    for e, c in p.items():
        v[idx[e]] += c
    return v


def from_vector(v, nvars, degree):
    return {m: Fraction(c) for m, c in zip(monomials(nvars, degree), v) if c}


def evaluate_monomials(point, degree):
    """Values of every degree-`degree` monomial at `point`, in graded lex order."""
    n = len(point)
    powers = [[1] * (degree + 1) for _ in range(n)]
    for i, x in enumerate(point):
        for e in range(1, degree + 1):
            powers[i][e] = powers[i][e - 1] * x
    vals = []
    for m in monomials(n, degree):
        v = 1
        for i, e in enumerate(m):
            if e:
                v *= powers[i][e]
        vals.append(v)
    return vals


def evaluate(p, point):
    total = 0
    for e, c in p.items():
        term = c
        for x, k in zip(point, e):
            if k:
                term *= x ** k
        total += term
    return total


def partial_derivative(p, var):
    out = {}
    for e, c in p.items():
        if e[var]:
            f = list(e)
            f[var] -= 1
            out[tuple(f)] = out.get(tuple(f), 0) + c * e[var]
    return {e: c for e, c in out.items() if c}


def product_of_linear_forms(forms):
    n = len(forms[0])
    out = {(0,) * n: Fraction(1)}
    for f in forms:
        out = poly_mul(out, linear_form(f))
    return out


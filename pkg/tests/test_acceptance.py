"""Acceptance criteria, one test per criterion, each under its time limit.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import math
import random
import time
from math import comb, log2, prod

import numpy as np
import pytest

from matmul_lab.bilinear import (SeparationQuery, assemble, catalog, matmul_tensor,
                                 mult_complexity_verify, separation_check, verify_border,
                                 verify_exact)
from matmul_lab.certify import (LITERATURE, TPPInstance, border_rank_bounds, cyclic_group,
                                degree9_invariant, find_tpp_triple, generalized_strassen,
                                sample_commutators, small_groups, tpp_check)
from matmul_lab.engine import DenseMatrix, classical_mul, exponent_estimate, recursive_mul
from matmul_lab.rep import (Partition, SecantSpec, cubics_of_secant2, decompose_symd,
                            ideal_dim_numeric, invariant_mult, partitions)
from matmul_lab.secant import grassmann, schonhage_bookkeeping, secant_dim, segre, veronese, waring_rank
from matmul_lab.tensor_core import flattening_bound, w_tensor

from conftest import random_rank_tensor, random_tensor


class Timer:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.1f} s, limit {self.limit} s"


def test_criterion_01_strassen_identity():
    with Timer(1):
        D = catalog("strassen-2x2")
        assert len(D) == 7
        assert assemble(D) == matmul_tensor(2, 2, 2)
        assert verify_exact(D, matmul_tensor(2, 2, 2))


def test_criterion_02_recursion_counts():
    with Timer(30):
        base = catalog("strassen-2x2")
        sizes = [2, 4, 8, 16, 32]
        counts = []
        for k, n in enumerate(sizes, start=1):
            rng = np.random.default_rng(n)
            for trial in range(100):
                A, B = DenseMatrix.random_integer(n, rng), DenseMatrix.random_integer(n, rng)
                C, stats = recursive_mul(A, B, base, cutoff=1, verified=trial > 0)
                assert stats.mults == 7 ** k
                assert C == classical_mul(A, B)[0]
            counts.append(stats.mults)
        assert abs(exponent_estimate(sizes, counts) - log2(7)) < 1e-9


def test_criterion_03_border_rank_witness():
    with Timer(1):
        ok, order = verify_border(catalog("w-family"), w_tensor())
        assert ok and order == 1
        lower = flattening_bound(w_tensor())
        upper = len(catalog("w-family"))
        assert lower == 2 and upper == 2


def test_criterion_04_waksman_certificate():
    with Timer(1):
        D = catalog("waksman-2x2x3")
        assert len(D) == 10
        assert mult_complexity_verify(D, matmul_tensor(2, 2, 3))
        assert LITERATURE["rank M223"] == 11 <= 2 * len(D)


@pytest.mark.parametrize("m,rank,bound", [(2, 4, 6), (3, 9, 14)])
def test_criterion_05_commutator_bounds(m, rank, bound):
    with Timer(10):
        ws = sample_commutators(matmul_tensor(m, m, m), triples=20, seed=0)
        assert len(ws) == 20
        good = sum(1 for w in ws if w.rank == m * m and w.bound == 3 * m * m // 2 + (m * m) % 2)
        assert bound == m * m + math.ceil(rank / 2)
        assert good >= 19
        assert all(w.bound <= bound for w in ws)


def test_criterion_06_degree_nine_invariant():
    with Timer(60):
        rng = random.Random(2024)
        for _ in range(1000):
            T = random_rank_tensor(rng, (3, 3, 3), rng.randint(1, 4))
            assert degree9_invariant(T) == 0
        dense = random_tensor(rng, (3, 3, 3), -9, 9)
        value = degree9_invariant(dense)
        assert value != 0
        for _ in range(5):
            lam = rng.choice([x for x in range(-7, 8) if x])
            assert degree9_invariant(dense.scale(lam)) == lam ** 9 * value


def test_criterion_07_generalized_equations():
    with Timer(60):
        rng = random.Random(7)
        for s, t in [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (3, 1)]:
            for b in range(max(2, s + t), 5):
                for _ in range(200):
                    T = random_rank_tensor(rng, (3, b, b), s + t)
                    covs = [[rng.randint(-5, 5) for _ in range(3)] for _ in range(3)]
                    assert generalized_strassen(T, s, t, *covs).is_zero(), (s, t, b)
        generic = random_tensor(rng, (3, 3, 3), -9, 9)
        assert not generalized_strassen(generic, 1, 2, [1, 2, 3], [0, 1, -1], [2, -1, 1]).is_zero()


def test_criterion_08_terracini_suite():
    with Timer(120):
        for seed in range(5):
            for r in range(1, 7):
                assert secant_dim(segre(4, 4, 4), r, seed=seed).observed == 10 * r
            assert secant_dim(segre(4, 4, 4), 7, seed=seed).observed == 64
            rep = secant_dim(segre(3, 3, 3), 4, seed=seed)
            assert rep.observed == 26 and rep.defect == 1
            assert secant_dim(veronese(4, 3), 5, seed=seed).defect == 1
            assert secant_dim(veronese(4, 4), 9, seed=seed).defect == 1
            assert secant_dim(grassmann(3, 7), 3, seed=seed).defect == 1


def test_criterion_09_waring_table():
    with Timer(30):
        assert [waring_rank(3, 5), waring_rank(4, 3), waring_rank(4, 4), waring_rank(4, 5)] == [8, 6, 10, 15]
        assert all(waring_rank(2, n) == n for n in range(1, 10))
        for (d, n), r in {(3, 3): 4, (3, 4): 5}.items():
            assert waring_rank(d, n) == r
            v = veronese(d, n)
            assert secant_dim(v, r).observed == v.ambient
            assert secant_dim(v, r - 1).observed < v.ambient


def test_criterion_10_representation_suite():
    with Timer(60):
        for d in range(1, 6):
            for p in partitions(d):
                for q in partitions(d):
                    assert invariant_mult([p, q]) == int(p == q)
        hook = Partition.of("211")
        labels = decompose_symd((3, 3, 3), 4)
        assert [lab.multiplicity for lab in labels if lab.partitions == (hook, hook, hook)] == [1]
        shapes = [(2, 2), (2, 3), (3, 3), (2, 2, 2), (2, 2, 3), (2, 3, 3), (3, 3, 3), (2, 2, 2, 2)]
        for shape in shapes:
            for d in range(1, 5):
                total = sum(lab.dimension(shape) for lab in decompose_symd(shape, d))
                assert total == comb(prod(shape) + d - 1, d)


def test_criterion_11_cubics_of_secant():
    with Timer(120):
        for shape in [(2, 2, 3), (2, 3, 3)]:
            assert ideal_dim_numeric(SecantSpec(segre(*shape), 2), 3) == cubics_of_secant2(shape)
        assert ideal_dim_numeric(SecantSpec(segre(2, 2, 2), 2), 3) == 0


def test_criterion_12_separations():
    with Timer(30):
        unit = lambda i: tuple(int(j == i) for j in range(4))
        # matrices with vanishing first row: a maximal right ideal of dimension m^2 - m = 2
        q = SeparationQuery(catalog("strassen-2x2"), A1=[unit(2), unit(3)], B1=[unit(i) for i in range(4)])
        found = separation_check(q)
        assert found is not None
        m = 2
        assert found.bound == 2 * m * m - m == 6 <= len(catalog("strassen-2x2"))


def test_criterion_13_triple_product_property():
    with Timer(60):
        groups = small_groups(12)
        assert len(groups) == 24
        for G in groups:
            e = (0,)
            assert tpp_check(TPPInstance(G, e, e, e))
            assert tpp_check(TPPInstance(G, tuple(range(G.order)), e, e))
        Z7 = cyclic_group(7)
        found = find_tpp_triple(Z7, (1, 2, 3))
        assert found is not None and tpp_check(TPPInstance(Z7, *found))
        assert find_tpp_triple(Z7, (2, 2, 2)) is None


def test_criterion_14_literature_consistency():
    with Timer(60):
        # reported as constants only; every computed lower bound stays below the published upper bounds
        assert LITERATURE["omega upper"] == 2.38
        assert LITERATURE["rank M333 lower"] == 19
        assert LITERATURE["border rank M222"] == 7
        m333 = border_rank_bounds(matmul_tensor(3, 3, 3))
        assert m333.commutator == 14 <= LITERATURE["border rank M333 upper"] == 21
        assert m333.maximum <= LITERATURE["rank M333 upper"]
        m222 = border_rank_bounds(matmul_tensor(2, 2, 2))
        assert m222.maximum <= LITERATURE["border rank M222"]
        assert schonhage_bookkeeping() == (True, 21)
        strassen_exponent = exponent_estimate([2, 4, 8], [7, 49, 343])
        assert LITERATURE["omega upper"] <= strassen_exponent

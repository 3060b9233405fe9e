import random

import pytest
from hypothesis import given, strategies as st

from matmul_lab import linalg
from matmul_lab.bilinear import RankOneTerm, catalog, catalog_target
from matmul_lab.secant import (CurveFamily, Multivector, NotDecomposable, VarietySpec,
                               expected_fill, grassmann, in_span, lickteig_dim, limit_plane,
                               plane_of, quadric_veronese_dim, schonhage_bookkeeping, secant_dim,
                               segre, tangent_space, veronese, waring_rank, wedge, wedge_taylor)
from matmul_lab.tensor_core import EpsScalar, w_tensor


def e(n, i):
    return [int(j == i) for j in range(n)]


class TestVarietySpec:
    def test_parse_roundtrip(self):
        for text in ("segre:3,3,3", "veronese:4,3", "grassmann:3,7"):
            assert str(VarietySpec.parse(text)) == text

    def test_invalid(self):
        with pytest.raises(ValueError):
            segre(1, 3)
        with pytest.raises(ValueError):
            grassmann(4, 4)
        with pytest.raises(ValueError):
            VarietySpec.parse("torus:2")

    def test_dimensions(self):
        assert segre(2, 3, 4).ambient == 24 and segre(2, 3, 4).cone_dim == 7
        assert veronese(3, 2).ambient == 4 and veronese(3, 2).cone_dim == 2
        assert grassmann(2, 4).ambient == 6 and grassmann(2, 4).cone_dim == 5


class TestTangent:
    def test_segre_at_basis_point(self):
        vecs = tangent_space(segre(2, 2, 2), [e(2, 0)] * 3)
        assert linalg.rank(vecs) == 4

    def test_veronese(self):
        vecs = tangent_space(veronese(3, 2), [e(2, 0)])
        # x0^3 and x0^2 x1 (up to the factor from differentiation)
        assert linalg.rank(vecs) == 2
        assert all(v[2] == v[3] == 0 for v in vecs)

    def test_grassmann(self):
        assert linalg.rank(tangent_space(grassmann(2, 4), [e(4, 0), e(4, 1)])) == 5

    def test_zero_parameters(self):
        with pytest.raises(ValueError):
            tangent_space(segre(2, 2), [[0, 0], [1, 0]])

    @given(st.integers(0, 10**6))
    def test_tangent_contains_point(self, seed):
        rng = random.Random(seed)
        for v in (segre(2, 3), veronese(3, 3), grassmann(2, 5)):
            params = v.random_parameters(rng)
            assert in_span(v.point(params), tangent_space(v, params))


class TestSecantDim:
    @pytest.mark.parametrize("r", range(1, 8))
    def test_segre_444(self, r):
        rep = secant_dim(segre(4, 4, 4), r)
        assert rep.observed == min(10 * r, 64)
        assert rep.projective == lickteig_dim(4, r)

    def test_segre_333_defect(self):
        rep = secant_dim(segre(3, 3, 3), 4)
        assert (rep.observed, rep.expected, rep.defect) == (26, 27, 1)
        assert rep.projective == lickteig_dim(3, 4)

    @pytest.mark.parametrize("d,n,r", [(4, 3, 5), (4, 4, 9), (3, 5, 7), (4, 5, 14)])
    def test_alexander_hirschowitz_defects(self, d, n, r):
        assert secant_dim(veronese(d, n), r).defect == 1

    def test_grassmann_defect(self):
        assert secant_dim(grassmann(3, 7), 3).defect == 1

    @pytest.mark.parametrize("k,n,r", [(3, 6, 2), (3, 8, 2), (4, 8, 1)])
    def test_grassmann_nondefective(self, k, n, r):
        assert secant_dim(grassmann(k, n), r).defect == 0

    def test_catching_up(self):
        # rank <= 2 maps C^4 -> C^4 form a 12-dimensional affine variety
        assert secant_dim(segre(2, 2, 4), 2).observed == 12 == secant_dim(segre(4, 4), 2).observed

    def test_monotone_and_stable(self):
        dims = [secant_dim(segre(2, 2, 3), r).observed for r in range(1, 6)]
        assert dims == sorted(dims)
        assert dims[-1] == 12

    def test_invalid(self):
        with pytest.raises(ValueError):
            secant_dim(segre(2, 2), 0)

    def test_report_row(self):
        row = secant_dim(segre(3, 3, 3), 4).row()
        assert row["defect"] == 1 and row["variety"] == "segre:3,3,3"


class TestFormulas:
    def test_expected_fill(self):
        assert expected_fill(4, 4, 4) == 7
        assert expected_fill(2, 2, 2) == 2
        assert expected_fill(9, 9, 9) == 30

    def test_lickteig(self):
        assert lickteig_dim(2, 2) == 7
        assert lickteig_dim(4, 6) == 59
        assert lickteig_dim(3, 4) == 25

    def test_waring(self):
        assert [waring_rank(3, 5), waring_rank(4, 3), waring_rank(4, 4), waring_rank(4, 5)] == [8, 6, 10, 15]
        assert all(waring_rank(2, n) == n for n in range(1, 8))
        assert waring_rank(3, 3) == 4
        assert waring_rank(3, 4) == 5

    @pytest.mark.parametrize("d,n", [(3, 2), (3, 3), (3, 4), (4, 2), (5, 3), (4, 3)])
    def test_waring_against_terracini(self, d, n):
        r = waring_rank(d, n)
        v = veronese(d, n)
        assert secant_dim(v, r).observed == v.ambient
        if r > 1:
            assert secant_dim(v, r - 1).observed < v.ambient

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_quadric_veronese(self, n):
        for r in range(1, n + 1):
            assert quadric_veronese_dim(r, n) == secant_dim(veronese(2, n + 1), r).projective
        assert quadric_veronese_dim(2, n) == 2 * n

    def test_quadric_veronese_range(self):
        with pytest.raises(ValueError):
            quadric_veronese_dim(5, 3)

    def test_schonhage(self):
        assert schonhage_bookkeeping() == (True, 21)


class TestWedge:
    def test_independent_constants(self):
        vecs = [e(4, 0), [1, 1, 0, 0], [0, 2, 1, 3]]
        f = CurveFamily([RankOneTerm((v,)) for v in vecs])
        omega = wedge_taylor(f, 0)
        assert omega
        basis, order = limit_plane(f)
        assert order == 0
        assert linalg.rank(basis) == 3 and all(in_span(v, basis) for v in vecs)

    def test_wedge_of_dependent_vectors_vanishes(self):
        assert not wedge([[1, 2, 0], [2, 4, 0]])

    def test_alternating(self):
        a, b = [1, 2, 0], [0, 1, 5]
        assert wedge([a, b]) == wedge([b, a]).scale(-1)

    def test_indecomposable(self):
        # e0^e1 + e2^e3 is not decomposable
        omega = Multivector(4, 2, {(0, 1): 1, (2, 3): 1})
        with pytest.raises(NotDecomposable):
            plane_of(omega)

    def test_w_family(self):
        f = CurveFamily.from_decomposition(catalog("w-family"))
        assert not wedge_taylor(f, 0)
        assert wedge_taylor(f, 1)
        basis, order = limit_plane(f)
        assert order == 1 and len(basis) == 2
        assert in_span(w_tensor().entries, basis)

    def test_bini_family(self):
        f = CurveFamily.from_decomposition(catalog("bini-2x2"))
        basis, order = limit_plane(f)
        assert order == 1 and len(basis) == 5
        assert in_span(catalog_target("bini-2x2").entries, basis)

    @pytest.mark.parametrize("r", [2, 3, 4])
    def test_order_one_formula(self, r):
        rng = random.Random(r)
        n = 4
        a = [e(n, i) for i in range(r - 1)]
        c = [rng.randint(1, 4) for _ in range(r - 1)]
        a.append([sum(ci * v[j] for ci, v in zip(c, a)) for j in range(n)])
        b0, c0 = [1, 2], [3, -1]
        curves, derivs = [], []
        t = EpsScalar.eps()
        for i in range(r):
            ad = [rng.randint(-3, 3) for _ in range(n)]
            bd = [rng.randint(-3, 3) for _ in range(2)]
            cd = [rng.randint(-3, 3) for _ in range(2)]
            curves.append(RankOneTerm(([x + t * y for x, y in zip(a[i], ad)],
                                       [x + t * y for x, y in zip(b0, bd)],
                                       [x + t * y for x, y in zip(c0, cd)])))
            f_i = CurveFamily([curves[-1]])
            derivs.append(f_i.taylor(0, 1))
        f = CurveFamily(curves)
        base = [f.taylor(i, 0) for i in range(r)]
        combo = [sum(ci * d[j] for ci, d in zip(c, derivs[:-1])) - derivs[-1][j] for j in range(len(base[0]))]
        expected = wedge([combo] + base[:-1]).scale((-1) ** r)
        assert not wedge_taylor(f, 0)
        assert wedge_taylor(f, 1) == expected

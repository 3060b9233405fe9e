import itertools
import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from matmul_lab.bilinear import (BudgetExceeded, Decomposition, IncompatibleSplit, RankOneTerm,
                                 SeparationQuery, UnknownCatalogEntry, VSplitDecomposition,
                                 assemble, catalog, catalog_names, catalog_record, catalog_target,
                                 embed_block, matmul_tensor, mult_complexity_verify,
                                 partial_matmul_tensor, separation_check, strong_separation_check,
                                 verify_border, verify_exact)
from matmul_lab.tensor_core import (EpsScalar, EpsTensor, Tensor, eps_limit, flatten, exact_rank,
                                    multilinear_ranks, w_tensor)

EXPECTED_LENGTHS = {"standard-2x2": 8, "strassen-2x2": 7, "waksman-2x2x3": 10, "bini-2x2": 5, "w-family": 2}


def unit(n, i):
    return tuple(int(j == i) for j in range(n))


def flip_sign(D, index):
    t = D.terms[index]
    x, y, z = t.factors
    return D.with_term(index, RankOneTerm(([-c for c in x], y, z)))


class TestMatmulTensor:
    def test_scalar(self):
        T = matmul_tensor(1, 1, 1)
        assert T.shape == (1, 1, 1) and T[0, 0, 0] == 1

    def test_222_has_eight_entries(self):
        T = matmul_tensor(2, 2, 2)
        assert len(T.nonzero()) == 8
        assert set(T.entries) == {0, 1}

    def test_223_multilinear_ranks(self):
        assert multilinear_ranks(matmul_tensor(2, 2, 3)) == [4, 6, 6]

    @given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3))
    def test_entries_chain(self, m, n, p):
        T = matmul_tensor(m, n, p)
        assert T.shape == (m * n, n * p, m * p)
        assert len(T.nonzero()) == m * n * p
        for i, k, l in itertools.product(range(m), range(n), range(p)):
            assert T[i * n + k, k * p + l, i * p + l] == 1


class TestCatalog:
    def test_names(self):
        assert set(EXPECTED_LENGTHS) <= set(catalog_names())

    @pytest.mark.parametrize("name", sorted(EXPECTED_LENGTHS))
    def test_lengths(self, name):
        assert len(catalog(name)) == EXPECTED_LENGTHS[name]

    def test_unknown_lists_available(self):
        with pytest.raises(UnknownCatalogEntry, match="strassen-2x2"):
            catalog("laderman-3x3")

    @pytest.mark.parametrize("name", ["standard-2x2", "strassen-2x2"])
    def test_exact_entries_verify(self, name):
        assert verify_exact(catalog(name), catalog_target(name))

    @pytest.mark.parametrize("name", ["bini-2x2", "w-family"])
    def test_border_entries_verify(self, name):
        assert verify_border(catalog(name), catalog_target(name)) == (True, 1)

    def test_waksman_verifies(self):
        D = catalog("waksman-2x2x3")
        assert isinstance(D, VSplitDecomposition)
        assert D.decomposition.shape == (10, 10, 6)
        assert mult_complexity_verify(D, matmul_tensor(2, 2, 3))

    def test_bini_record_documents_extra_point(self):
        rec = catalog_record("bini-2x2")
        assert "note" in rec or "derivation" in rec

    @pytest.mark.parametrize("name", ["standard-2x2", "strassen-2x2", "bini-2x2", "w-family"])
    def test_flattening_bound_respects_length(self, name):
        T = catalog_target(name)
        for k in range(1, T.order):
            for modes in itertools.combinations(range(T.order), k):
                assert exact_rank(flatten(T, modes)) <= len(catalog(name))

    @pytest.mark.parametrize("name", sorted(EXPECTED_LENGTHS))
    def test_json_roundtrip(self, name):
        D = catalog(name)
        inner = D.decomposition if isinstance(D, VSplitDecomposition) else D
        again = Decomposition.from_json(json.loads(json.dumps(inner.to_json())))
        assert assemble(again) == assemble(inner)


class TestAssemble:
    def test_strassen_is_matmul(self):
        assert assemble(catalog("strassen-2x2")) == matmul_tensor(2, 2, 2)

    def test_empty(self):
        assert assemble(Decomposition((2, 2, 2), [])).is_zero()

    def test_w_family_expansion(self):
        A = assemble(catalog("w-family"))
        assert isinstance(A, EpsTensor)
        assert eps_limit(A) == w_tensor()
        # remainder eps*(a1b2c1 + ...) + eps^2 a2b2c2 terms
        assert A.coefficient(1) == Tensor.from_dict((2, 2, 2), {(1, 1, 0): 1, (1, 0, 1): 1, (0, 1, 1): 1})
        assert A.coefficient(2) == Tensor.from_dict((2, 2, 2), {(1, 1, 1): 1})

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            Decomposition((2, 2, 2), [RankOneTerm(([1, 0, 0], [1, 0], [1, 0]))])

    def test_zero_factor_rejected(self):
        with pytest.raises(ValueError):
            RankOneTerm(([0, 0], [1, 0], [1, 0]))


class TestVerify:
    def test_sign_flip_breaks_strassen(self):
        assert not verify_exact(flip_sign(catalog("strassen-2x2"), 3), matmul_tensor(2, 2, 2))

    def test_wrong_target(self):
        assert verify_border(catalog("w-family"), matmul_tensor(2, 2, 2)) == (False, None)
        assert not verify_exact(catalog("standard-2x2"), matmul_tensor(2, 2, 3))

    def test_exact_family_has_infinite_order(self):
        assert verify_border(catalog("strassen-2x2"), matmul_tensor(2, 2, 2)) == (True, math.inf)

    def test_exact_check_rejects_eps(self):
        with pytest.raises(ValueError):
            verify_exact(catalog("w-family"), w_tensor())

    @given(st.integers(-3, 3), st.integers(0, 1), st.sampled_from([1, -1, 2, Fraction(1, 3)]))
    def test_border_invariant_under_unit_rescaling(self, k, index, c):
        D = catalog("w-family")
        x, y, z = D.terms[index].factors
        up = EpsScalar({k: c})
        down = EpsScalar({-k: 1 / Fraction(c)})
        rescaled = D.with_term(index, RankOneTerm(([up * v for v in x], [down * v for v in y], z)))
        assert verify_border(rescaled, w_tensor()) == verify_border(D, w_tensor())


class TestMultiplicativeComplexity:
    def test_deleted_term_fails(self):
        D = catalog("waksman-2x2x3")
        assert not mult_complexity_verify(D.without(4), matmul_tensor(2, 2, 3))

    @pytest.mark.parametrize("name", ["standard-2x2", "strassen-2x2"])
    def test_embedded_ordinary_decomposition(self, name):
        D = embed_block(catalog(name), 4, 4)
        assert mult_complexity_verify(D, matmul_tensor(2, 2, 2))

    def test_incompatible_split(self):
        with pytest.raises(IncompatibleSplit):
            mult_complexity_verify(catalog("waksman-2x2x3"), matmul_tensor(2, 2, 2))

    def test_rank_consistency(self):
        # the 10-term certificate and R(M_223) = 11 satisfy R <= 2 * length
        assert 11 <= 2 * len(catalog("waksman-2x2x3"))

    def test_bad_split(self):
        with pytest.raises(ValueError):
            VSplitDecomposition(catalog("strassen-2x2"), 0)


class TestSeparation:
    def test_full_left_kernel(self):
        q = SeparationQuery(catalog("standard-2x2"), A1=[unit(4, i) for i in range(4)])
        found = separation_check(q)
        assert found is not None and found.bound == 4

    def test_right_ideal_and_full_b(self):
        # matrices with zero first row form a right ideal of dimension 2
        q = SeparationQuery(catalog("strassen-2x2"), A1=[unit(4, 2), unit(4, 3)],
                            B1=[unit(4, i) for i in range(4)])
        found = separation_check(q)
        assert found is not None
        assert found.bound == 6 <= 7
        assert found.parts == ((0, 1, 2), (3, 4, 5, 6), ())

    def test_impossible(self):
        full = [unit(4, i) for i in range(4)]
        q = SeparationQuery(catalog("strassen-2x2"), A1=full, B1=full, C1=full)
        assert separation_check(q) is None

    def test_bound_never_exceeds_length(self):
        full = [unit(4, i) for i in range(4)]
        for A1 in ([], full[:1], full[:2], full):
            for C1 in ([], full[:1]):
                found = separation_check(SeparationQuery(catalog("strassen-2x2"), A1=A1, B1=full[:2], C1=C1))
                if found is not None:
                    assert len(catalog("strassen-2x2")) >= found.bound

    def test_dependent_basis_rejected(self):
        with pytest.raises(ValueError):
            SeparationQuery(catalog("strassen-2x2"), A1=[unit(4, 0), unit(4, 0)])

    def test_budget(self):
        big = Decomposition((2, 2, 2), [RankOneTerm(([1, 0], [1, 0], [1, 0]))] * 13)
        with pytest.raises(BudgetExceeded):
            separation_check(SeparationQuery(big))

    def test_strong_variant_runs(self):
        # flagged variant: only structural checks are made here
        q = SeparationQuery(catalog("standard-2x2"), A1=[unit(4, 0)])
        found = strong_separation_check(q)
        assert found is None or found.bound <= 8


def test_partial_matmul_drops_one_coordinate():
    T = partial_matmul_tensor(2, 2, 2, 3)
    full = matmul_tensor(2, 2, 2)
    assert len(T.nonzero()) == 6
    assert all(T[idx] == (0 if idx[0] == 3 else full[idx]) for idx, _ in full.items())

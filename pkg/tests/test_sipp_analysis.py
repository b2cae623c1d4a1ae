from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from signorth.constructions import (OrientedCompleteGraph, hessenberg, incidence_pattern,
                                    named_fixture)
from signorth.exact_linalg import ExactMatrix
from signorth.pattern_core import (P, SignedPermEquivalence, apply_equiv, sgn_of)
from signorth.sipp_analysis import (EXACT_NULLSPACE, FLOAT_RANK, check_witness,
                                    hollow_signature_symmetric, in_sipp_kernel,
                                    requires_osipp_conditions, sipp_check_exact,
                                    sipp_check_float, sipp_system, structural_requires_osipp,
                                    unknown_index, zero_count_bound_ok)

from conftest import random_rational


def _equiv_matrix(A: ExactMatrix, e: SignedPermEquivalence) -> ExactMatrix:
    return ExactMatrix.from_rows(e.apply_rows(A.to_rows()))


def _pad(A: ExactMatrix, k: int) -> ExactMatrix:
    return A.hstack(ExactMatrix.zeros(A.rows, k))


def test_system_shape_and_order():
    A = ExactMatrix.from_rows([[1, 0, 2], [0, 3, 1]])
    M = sipp_system(A)
    assert len(M) == 4 and len(M[0]) == 3
    idx = unknown_index(2)
    assert list(idx) == [(0, 0), (0, 1), (1, 1)]
    # entry (0,0): x00 a00 + x01 a10 = x00
    assert M[0] == [1, 0, 0]
    # entry (0,2): x00*2 + x01*1
    assert M[1] == [2, 1, 0]


def test_nowhere_zero_full_rank_has_sipp():
    A = ExactMatrix.from_rows([[1, 2, 3, 4], [2, -1, 1, 1], [3, 1, -2, 5]])
    v = sipp_check_exact(A)
    assert v.has_sipp and v.witness is None


def test_nowhere_zero_rank_deficient_lacks_sipp():
    A = ExactMatrix.from_rows([[1, 2, 3], [2, 4, 6]])
    v = sipp_check_exact(A)
    assert not v.has_sipp and check_witness(A, v.witness)


@pytest.mark.parametrize("n", [3, 6])
def test_stacked_counterexample(n):
    A = named_fixture(f"stacked_counterexample_n{n}")
    X = named_fixture(f"stacked_counterexample_n{n}_witness")
    assert check_witness(A, X)
    v = sipp_check_exact(A)
    assert not v.has_sipp and v.method == EXACT_NULLSPACE and check_witness(A, v.witness)


def test_sqrt2_counterexample():
    Q = named_fixture("sqrt2_counterexample")
    v = sipp_check_exact(Q)
    assert not v.has_sipp and check_witness(Q, v.witness)
    assert v.witness == named_fixture("sqrt2_counterexample_witness")


def test_conference_matrix_witness_is_itself():
    C = named_fixture("conference6_matrix")
    v = sipp_check_exact(C)
    assert not v.has_sipp
    assert v.witness == C  # kernel is one-dimensional and normalised at x_12 = 1
    assert check_witness(C, C)


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_incidence_pattern_has_sipp(m):
    R, _ = incidence_pattern(m)
    scaled = ExactMatrix.from_rows([[x / Fraction(2) for x in row] for row in R.to_rows()])
    assert sipp_check_exact(R).has_sipp and sipp_check_exact(scaled).has_sipp


def test_witness_normalisation():
    v = sipp_check_exact(ExactMatrix.from_rows([[1, 0], [0, 0]]))
    first = next(x for x in v.witness.entries if x)
    assert first == 1


def test_wide_required():
    with pytest.raises(ValueError):
        sipp_check_exact(ExactMatrix.from_rows([[1], [2]]))
    with pytest.raises(ValueError):
        sipp_check_float(np.ones((3, 2)))


def test_float_examples():
    # [I | O]: every hollow symmetric X solves the system, so no SIPP
    I = np.hstack([np.eye(3), np.zeros((3, 1))])
    assert not sipp_check_float(I).has_sipp
    assert not sipp_check_exact(ExactMatrix.from_rows(I.astype(int).tolist())).has_sipp
    B = np.array([[1.0, 2, 3, 0], [2, -1, 1, 0], [3, 1, -2, 0]])
    assert sipp_check_float(B).has_sipp
    v = sipp_check_float(named_fixture("conference6_matrix").to_float())
    assert not v.has_sipp and v.method == FLOAT_RANK and v.witness is None


def test_float_matches_exact_on_random(rng):
    for _ in range(200):
        m = int(rng.integers(2, 5))
        A = random_rational(rng, m, 6, zero_prob=0.45)
        assert sipp_check_float(A.to_float()).has_sipp == sipp_check_exact(A).has_sipp


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_equivalence_and_padding_invariance(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 5))
    n = int(rng.integers(m, 7))
    A = random_rational(rng, m, n, zero_prob=0.5)
    base = sipp_check_exact(A).has_sipp
    e = SignedPermEquivalence.random(m, n, rng)
    assert sipp_check_exact(_equiv_matrix(A, e)).has_sipp == base
    assert sipp_check_exact(_pad(A, 2)).has_sipp == base


def test_witness_in_kernel_of_equivalent_matrix(rng):
    C = named_fixture("conference6_matrix")
    e = SignedPermEquivalence.random(6, 6, rng)
    B = _equiv_matrix(C, e)
    v = sipp_check_exact(B)
    assert not v.has_sipp and in_sipp_kernel(B, v.witness)


@pytest.mark.parametrize("name", ["conference6_matrix", "sqrt2_counterexample", "hessenberg_5"])
def test_transpose_agreement_on_orthogonal_rows(name):
    Q = named_fixture(name)
    assert (Q @ Q.T).is_diagonal()
    assert sipp_check_exact(Q).has_sipp == sipp_check_exact(Q.T).has_sipp


def test_zero_count_bound():
    assert not zero_count_bound_ok(P("+00 0+0 00+"))  # 6 zeros > 3
    assert not zero_count_bound_ok(P("+00 0+0 0++"))  # 4 zeros
    assert zero_count_bound_ok(P("+++ +-+"))
    for n in range(2, 8):
        assert zero_count_bound_ok(hessenberg(n))


def test_zero_count_bound_holds_when_sipp(rng):
    for _ in range(100):
        m = int(rng.integers(2, 5))
        A = random_rational(rng, m, int(rng.integers(m, 7)), zero_prob=0.6)
        if sipp_check_exact(A).has_sipp:
            assert zero_count_bound_ok(A)


# --- structural conditions -----------------------------------------------------

@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_hessenberg_is_staircase(n):
    assert structural_requires_osipp(sgn_of(hessenberg(n))) == "staircase"


def test_staircase_transpose_form():
    S = sgn_of(hessenberg(4)).transpose()
    assert "staircase" in requires_osipp_conditions(S)


def test_three_zero_rows_example():
    assert structural_requires_osipp(named_fixture("three_zero_rows_3x4")) == "zeros_in_three_rows"


def test_hollow_example_matches_hollow_condition():
    S = named_fixture("hollow4")
    assert "hollow_not_signature_symmetric" in requires_osipp_conditions(S)
    assert hollow_signature_symmetric(S) is None


def test_conference_pattern_no_structural_match():
    S = named_fixture("conference6")
    assert structural_requires_osipp(S) is None
    assert hollow_signature_symmetric(S) == ((1,) * 6, (1,) * 6)


def test_incidence_pattern_two_nonzero_columns(rng):
    for m in range(3, 6):
        _, S = incidence_pattern(m, OrientedCompleteGraph.random(m, rng))
        assert "two_nonzero_columns" in requires_osipp_conditions(S)


def test_signature_witness_symmetrises():
    S = P("0+- -0+ +-0")
    res = hollow_signature_symmetric(S)
    if res is not None:
        d1, d2 = res
        C = [[d1[i] * S[i, j] * d2[j] for j in range(3)] for i in range(3)]
        assert all(C[i][j] == C[j][i] for i in range(3) for j in range(3))


def test_hollow_errors():
    with pytest.raises(ValueError):
        hollow_signature_symmetric(P("++ ++"))


def _row_orthogonal_realizations():
    yield hessenberg(5)
    yield named_fixture("three_zero_rows_3x4_matrix")
    yield named_fixture("sqrt2_counterexample")
    yield named_fixture("hollow4_matrix")
    for m in range(2, 6):
        yield incidence_pattern(m)[0]


def test_structural_match_implies_sipp_on_realizations():
    for Q in _row_orthogonal_realizations():
        if not (Q @ Q.T).is_diagonal():
            continue
        if structural_requires_osipp(sgn_of(Q)) is not None:
            assert sipp_check_exact(Q).has_sipp

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from signorth.exact_linalg import QSqrt2
from signorth.pattern_core import (P, PatternParseError, SignedPermEquivalence, SignPattern,
                                   apply_equiv, canonical_form, column_ppo,
                                   combinatorially_orthogonal, format_pattern,
                                   has_combinatorially_orthogonal_rows, is_superpattern,
                                   negative_4cycle, parse_pattern, ppo_pair_ok, row_ppo,
                                   row_ppo_failure, sgn_of, znz_of)

from conftest import sign_patterns


def test_parse_and_format_roundtrip():
    S = parse_pattern("+-0\n0++\n")
    assert S.shape == (2, 3)
    assert S.to_rows() == [[1, -1, 0], [0, 1, 1]]
    assert format_pattern(S) == "+-0\n0++"


@pytest.mark.parametrize("text,line,col", [("+-\n+x", 2, 2), ("+-\n+", 2, 2), ("", 1, 1)])
def test_parse_errors_carry_position(text, line, col):
    with pytest.raises(PatternParseError) as err:
        parse_pattern(text)
    assert (err.value.line, err.value.column) == (line, col)


def test_sgn_of_mixed_entries():
    S = sgn_of([[2, -0.5, 0], [QSqrt2(1, -1), QSqrt2(-1, 1), 0]])
    assert S.to_rows() == [[1, -1, 0], [-1, 1, 0]]
    with pytest.raises(ValueError):
        sgn_of([[float("nan")]])


def test_znz_and_superpattern():
    S = P("+0 -+")
    assert str(znz_of(S.to_rows())) == "*0\n**"
    assert is_superpattern(P("++ -+"), S)
    assert not is_superpattern(P("-+ -+"), S)


def test_json_roundtrip():
    S = P("+-0 0+-")
    assert SignPattern.from_json(S.to_json()) == S


@given(sign_patterns())
def test_transpose_involution(S):
    assert S.transpose().transpose() == S


@given(sign_patterns(), st.integers(0, 2**32 - 1))
def test_equivalence_inverse(S, seed):
    e = SignedPermEquivalence.random(S.rows, S.cols, np.random.default_rng(seed))
    assert apply_equiv(apply_equiv(S, e), e.inverse()) == S


@given(sign_patterns(max_m=3, max_n=4), st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1))
def test_compose_matches_sequential(S, s1, s2):
    e1 = SignedPermEquivalence.random(S.rows, S.cols, np.random.default_rng(s1))
    e2 = SignedPermEquivalence.random(S.rows, S.cols, np.random.default_rng(s2))
    assert apply_equiv(S, e2.compose(e1)) == apply_equiv(apply_equiv(S, e1), e2)


@settings(max_examples=60)
@given(sign_patterns(max_m=4, max_n=5), st.integers(0, 2**32 - 1))
def test_canonical_form_is_class_invariant(S, seed):
    e = SignedPermEquivalence.random(S.rows, S.cols, np.random.default_rng(seed))
    assert canonical_form(apply_equiv(S, e)) == canonical_form(S)


@settings(max_examples=25, deadline=None)
@given(sign_patterns(max_m=3, max_n=3))
def test_canonical_form_is_in_class_and_least(S):
    C = canonical_form(S)
    key = lambda T: "".join("+-0"[(1, -1, 0).index(T[i, j])]
                            for j in range(T.cols) for i in range(T.rows))
    reps = set()
    for rp in itertools.permutations(range(S.rows)):
        for rs in itertools.product((1, -1), repeat=S.rows):
            for cp in itertools.permutations(range(S.cols)):
                for cs in itertools.product((1, -1), repeat=S.cols):
                    reps.add(key(apply_equiv(S, SignedPermEquivalence(rp, rs, cp, cs))))
    assert key(C) == min(reps)


def test_canonical_form_guard():
    with pytest.raises(ValueError):
        canonical_form(SignPattern.from_rows([[1] * 9] * 5))


def test_ppo_examples():
    assert not ppo_pair_ok(P("++ ++"), 0, 1)
    assert ppo_pair_ok(P("++ +-"), 0, 1)
    assert ppo_pair_ok(P("+0 0+"), 0, 1)  # combinatorially orthogonal
    assert row_ppo_failure(P("++ 00")) == ("zero_row", 1)
    assert row_ppo_failure(P("++ ++")) == ("pair", 0, 1)
    assert row_ppo(P("+- ++")) and column_ppo(P("+- ++"))
    assert not column_ppo(P("++ --"))


def test_combinatorial_orthogonality():
    S = P("+0 0+ ++")
    assert combinatorially_orthogonal(S, 0, 1)
    assert not combinatorially_orthogonal(S, 0, 2)
    assert has_combinatorially_orthogonal_rows(S)
    with pytest.raises(IndexError):
        combinatorially_orthogonal(S, 0, 5)


def test_negative_4cycle():
    S = P("+++ +-+")
    assert negative_4cycle(S, 0, 1) == (0, 1)
    assert negative_4cycle(P("++ ++"), 0, 1) is None
    with pytest.raises(ValueError):
        negative_4cycle(S, 1, 1)


@given(sign_patterns(max_m=4, max_n=6), st.integers(0, 2**32 - 1))
def test_row_ppo_is_equivalence_invariant(S, seed):
    e = SignedPermEquivalence.random(S.rows, S.cols, np.random.default_rng(seed))
    assert row_ppo(apply_equiv(S, e)) == row_ppo(S)

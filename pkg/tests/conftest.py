import numpy as np
import pytest
from hypothesis import strategies as st

from signorth.exact_linalg import ExactMatrix
from signorth.pattern_core import SignPattern


@st.composite
def sign_patterns(draw, max_m=4, max_n=6, zeros=True, wide=False):
    m = draw(st.integers(1, max_m))
    n = draw(st.integers(m if wide else 1, max(max_n, m)))
    vals = (-1, 0, 1) if zeros else (-1, 1)
    entries = draw(st.lists(st.sampled_from(vals), min_size=m * n, max_size=m * n))
    return SignPattern(m, n, tuple(entries))


@st.composite
def rational_matrices(draw, max_m=4, max_n=6, lo=-5, hi=5, wide=True):
    m = draw(st.integers(1, max_m))
    n = draw(st.integers(m if wide else 1, max(max_n, m)))
    rows = draw(st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n),
                         min_size=m, max_size=m))
    return ExactMatrix.from_rows(rows)


def random_rational(rng, m, n, lo=-6, hi=6, zero_prob=0.0):
    A = rng.integers(lo, hi + 1, size=(m, n))
    if zero_prob:
        A[rng.random((m, n)) < zero_prob] = 0
    return ExactMatrix.from_rows(A.tolist())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        ok, detail = results[k]
        terminalreporter.write_line(f"CRITERION {k}: {'PASS' if ok else 'FAIL'} | {detail}")

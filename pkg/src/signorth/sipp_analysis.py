"""Deciding the strong inner product property (SIPP) and structural tests.

A wide matrix A has the SIPP when X = O is the only symmetric X with
(XA)∘A = O.  That is a homogeneous linear system in the m(m+1)/2 entries
x_ij (i <= j) with one equation per nonzero entry of A, so A has the SIPP
exactly when the system matrix has full column rank.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact_linalg import ExactMatrix, float_rank, nullspace_exact, rank_exact
from .pattern_core import (SignPattern, combinatorially_orthogonal,
                           has_combinatorially_orthogonal_rows, sgn_of)

EXACT_NULLSPACE = "exact_nullspace"
FLOAT_RANK = "float_rank"
NOWHERE_ZERO_FULL_RANK = "structural:nowhere_zero_full_rank"


@dataclass(frozen=True)
class SippVerdict:
    has_sipp: bool
    method: str
    witness: ExactMatrix | None = None

    def to_json(self) -> dict:
        return {"has_sipp": self.has_sipp, "method": self.method,
                "witness": None if self.witness is None else self.witness.to_json()}


def unknown_index(m: int) -> dict[tuple[int, int], int]:
    """Column of x_ij (i <= j) in the system, row-major upper triangle."""
    return {ij: c for c, ij in enumerate((i, j) for i in range(m) for j in range(i, m))}


def sipp_system(A) -> list[list]:
    """Constraint rows, one per nonzero a_ij in row-major order.

    Row for (i, j) encodes sum_l x_il a_lj = 0 with x_il = x_li.
    Works on ExactMatrix entries or floats (numpy array).
    """
    rows = A.to_rows() if hasattr(A, "to_rows") else np.asarray(A).tolist()
    m, n = len(rows), len(rows[0])
    idx = unknown_index(m)
    zero = Fraction(0) if hasattr(A, "to_rows") else 0.0
    system = []
    for i in range(m):
        for j in range(n):
            if not rows[i][j]:
                continue
            eq = [zero] * len(idx)
            for ell in range(m):
                a = rows[ell][j]
                if a:
                    c = idx[(min(i, ell), max(i, ell))]
                    eq[c] = eq[c] + a
            system.append(eq)
    return system


def _x_from_vector(v, m: int) -> ExactMatrix:
    idx = unknown_index(m)
    X = [[Fraction(0)] * m for _ in range(m)]
    for (i, j), c in idx.items():
        X[i][j] = X[j][i] = v[c]
    return ExactMatrix.from_rows(X)


def _normalise(v: list) -> list:
    first = next(x for x in v if x)
    return [x / first for x in v]


def check_witness(A: ExactMatrix, X: ExactMatrix) -> bool:
    """X = X^T, X != O and (XA)∘A = O, all exactly."""
    return (X.is_symmetric() and not X.is_zero()
            and (X @ A).hadamard(A).is_zero())


def sipp_check_exact(A: ExactMatrix) -> SippVerdict:
    m, n = A.shape
    if m > n:
        raise ValueError(f"SIPP is defined for wide matrices; got {m}x{n}")
    if all(A.entries) and rank_exact(A) == m:
        return SippVerdict(True, NOWHERE_ZERO_FULL_RANK)
    k = m * (m + 1) // 2
    system = sipp_system(A)
    if not system:
        v = [Fraction(1)] + [Fraction(0)] * (k - 1)
        return SippVerdict(False, EXACT_NULLSPACE, _x_from_vector(v, m))
    M = ExactMatrix.from_rows(system)
    if rank_exact(M) == k:
        return SippVerdict(True, EXACT_NULLSPACE)
    v = [basis_vec[c, 0] for basis_vec in nullspace_exact(M)[:1] for c in range(k)]
    return SippVerdict(False, EXACT_NULLSPACE, _x_from_vector(_normalise(v), m))


def in_sipp_kernel(A: ExactMatrix, X: ExactMatrix) -> bool:
    """Whether a symmetric X solves (XA)∘A = O (zero X allowed)."""
    return X.is_symmetric() and (X @ A).hadamard(A).is_zero()


def sipp_check_float(A, tau: float | None = None) -> SippVerdict:
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    if m > n:
        raise ValueError(f"SIPP is defined for wide matrices; got {m}x{n}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    k = m * (m + 1) // 2
    system = sipp_system(A)
    if not system:
        return SippVerdict(False, FLOAT_RANK)
    M = np.array(system, dtype=float)
    return SippVerdict(float_rank(M, tau) == k, FLOAT_RANK)


def zero_count_bound_ok(A_or_S) -> bool:
    """#zeros <= nm - m(m+1)/2; failure rules out the SIPP for row orthogonal Q."""
    S = A_or_S if isinstance(A_or_S, SignPattern) else sgn_of(A_or_S)
    m, n = S.shape
    return S.zero_count() <= n * m - m * (m + 1) // 2


# --- structural sufficient conditions for "requires o-SIPP" -----------------

def _diagonal_nonzero(S: SignPattern, r: int) -> bool | None:
    """True/False if diagonal r is all nonzero / all zero, None if mixed."""
    vals = [S[i, i + r] != 0 for i in range(S.rows) if 0 <= i + r < S.cols]
    if all(vals):
        return True
    if not any(vals):
        return False
    return None


def staircase(S: SignPattern) -> bool:
    """Diagonals up to some k nonzero and beyond it zero (either orientation)."""
    m, n = S.shape
    diag = {r: _diagonal_nonzero(S, r) for r in range(1 - m, n)}
    for k in range(0, n):
        if all(diag[r] is True for r in range(1 - m, k + 1)) and \
                all(diag[r] is False for r in range(k + 1, n)):
            return True
    for k in range(1 - m, 1):
        if all(diag[r] is True for r in range(k, n)) and \
                all(diag[r] is False for r in range(1 - m, k)):
            return True
    return False


def zeros_in_three_rows(S: SignPattern) -> bool:
    zero_rows = {i for i in range(S.rows) if 0 in S.row(i)}
    return len(zero_rows) <= 3 and not has_combinatorially_orthogonal_rows(S)


def four_zeros(S: SignPattern) -> bool:
    return (S.zero_count() <= 4 and not has_combinatorially_orthogonal_rows(S)
            and not has_combinatorially_orthogonal_rows(S.transpose()))


def two_nonzero_columns_cover_pairs(S: SignPattern) -> bool:
    """Every row pair {i, k} is the exact support of some column.

    A column with exactly two nonzeros in rows i, k forces x_ik = 0 for
    row orthogonal realizations, and the diagonal of X vanishes anyway.  The
    incidence pattern [R_K | R_orient] is the basic example.
    """
    supports = {frozenset(i for i in range(S.rows) if S[i, j]) for j in range(S.cols)}
    if any(not any(S.row(i)) for i in range(S.rows)):
        return False
    return all(frozenset(p) in supports for p in itertools.combinations(range(S.rows), 2))


def is_nonzero_hollow(S: SignPattern) -> bool:
    return S.rows == S.cols and all(
        (S[i, j] == 0) == (i == j) for i in range(S.rows) for j in range(S.cols))


def hollow_signature_symmetric(S: SignPattern) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Signatures (D1, D2) with D1 C_S D2 symmetric, or None.

    With u_i = d1_i d2_i the condition is u_i u_j = c_ij c_ji for i != j, so
    fixing u_0 = 1 and propagating decides it; D1 = I and D2 = diag(u).
    """
    if not is_nonzero_hollow(S):
        raise ValueError("pattern is not a square nonzero hollow pattern")
    n = S.rows
    u: list[int | None] = [None] * n
    for start in range(n):
        if u[start] is not None:
            continue
        u[start] = 1
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(n):
                if j == i:
                    continue
                want = u[i] * S[i, j] * S[j, i]
                if u[j] is None:
                    u[j] = want
                    stack.append(j)
                elif u[j] != want:
                    return None
    return (1,) * n, tuple(u)


def hollow_not_signature_symmetric(S: SignPattern) -> bool:
    return is_nonzero_hollow(S) and hollow_signature_symmetric(S) is None


STRUCTURAL_TESTS = (
    ("staircase", staircase),
    ("zeros_in_three_rows", zeros_in_three_rows),
    ("four_zeros", four_zeros),
    ("two_nonzero_columns", two_nonzero_columns_cover_pairs),
    ("hollow_not_signature_symmetric", hollow_not_signature_symmetric),
)


def requires_osipp_conditions(S: SignPattern) -> list[str]:
    """Names of every structural condition S satisfies.

    Each one means: every row orthogonal realization of S has the SIPP.
    """
    if not S.is_wide:
        raise ValueError("pattern must be wide")
    return [name for name, test in STRUCTURAL_TESTS if test(S)]


def structural_requires_osipp(S: SignPattern) -> str | None:
    """First matching structural condition, or None (which refutes nothing)."""
    if not S.is_wide:
        raise ValueError("pattern must be wide")
    for name, test in STRUCTURAL_TESTS:
        if test(S):
            return name
    return None

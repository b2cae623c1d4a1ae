"""Named matrices and patterns, constructed exactly."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact_linalg import SQRT2, ExactMatrix, QSqrt2
from .pattern_core import P, SignPattern, sgn_of


@dataclass(frozen=True)
class OrientedCompleteGraph:
    m: int
    arcs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        edges = [frozenset(a) for a in self.arcs]
        want = {frozenset(e) for e in itertools.combinations(range(self.m), 2)}
        if len(edges) != len(want) or set(edges) != want:
            raise ValueError("arcs must orient each edge of K_m exactly once")

    @classmethod
    def default(cls, m: int) -> "OrientedCompleteGraph":
        return cls(m, tuple(itertools.combinations(range(m), 2)))

    @classmethod
    def random(cls, m: int, rng: np.random.Generator) -> "OrientedCompleteGraph":
        arcs = tuple((i, j) if rng.random() < 0.5 else (j, i)
                     for i, j in itertools.combinations(range(m), 2))
        return cls(m, arcs)


def hessenberg(n: int) -> ExactMatrix:
    """Lower Hessenberg matrix with orthogonal rows.

    Row i (1-based, i < n) is i ones, then -i, then zeros; the last row is all ones.
    """
    if n < 1:
        raise ValueError("n must be positive")
    rows = []
    for i in range(1, n + 1):
        if i == n:
            rows.append([1] * n)
        else:
            rows.append([1] * i + [-i] + [0] * (n - i - 1))
    return ExactMatrix.from_rows(rows)


def incidence_pattern(m: int, orientation: OrientedCompleteGraph | None = None
                      ) -> tuple[ExactMatrix, SignPattern]:
    """[R_K | R_orient] for the complete graph K_m and its sign pattern.

    Edges are ordered lexicographically by their sorted endpoints in both
    blocks; an arc (u, v) puts -1 in row u and +1 in row v.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    orientation = orientation or OrientedCompleteGraph.default(m)
    if orientation.m != m:
        raise ValueError("orientation is for a different vertex count")
    edges = list(itertools.combinations(range(m), 2))
    arc_of = {frozenset(a): a for a in orientation.arcs}
    rows = [[0] * (2 * len(edges)) for _ in range(m)]
    for c, (u, v) in enumerate(edges):
        rows[u][c] = rows[v][c] = 1
        tail, head = arc_of[frozenset((u, v))]
        rows[tail][len(edges) + c] = -1
        rows[head][len(edges) + c] = 1
    R = ExactMatrix.from_rows(rows)
    return R, sgn_of(R)


def _sqrt_q2(k: int):
    """sqrt(k) in Q(sqrt 2), when k is a square or twice a square."""
    r = math.isqrt(k)
    if r * r == k:
        return Fraction(r)
    if k % 2 == 0:
        r = math.isqrt(k // 2)
        if r * r == k // 2:
            return QSqrt2(0, r)
    raise ValueError(f"sqrt({k}) is not in Q(sqrt 2)")


def stacked_counterexample(n: int) -> tuple[ExactMatrix, ExactMatrix]:
    """n x (n+1) matrix A with orthogonal rows, zeros only in the first two
    columns, and a nonzero symmetric X with (XA)∘A = O.

    Available when sqrt(n-2) lies in Q(sqrt 2) (n = 3, 4, 6, 10, 11, ...).
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    s = _sqrt_q2(n - 2)
    h = QSqrt2(0, Fraction(1, 2))  # 1/sqrt 2
    d = 3 - n
    rows = []
    for i in range(n - 3):
        mid = [1] * (n - 3)
        mid[i] = d
        rows.append([0, s] + mid + [h, h])
    rows.append([0, s] + [1] * (n - 3) + [d * h, d * h])
    rows.append([s, 0] + [1] * (n - 3) + [h, h])
    rows.append([-s, 0] + [1] * (n - 3) + [h, h])
    X = [[0] * (n - 2) + [1, -1] for _ in range(n - 2)]
    X.append([1] * (n - 2) + [0, 0])
    X.append([-1] * (n - 2) + [0, 0])
    return ExactMatrix.from_rows(rows), ExactMatrix.from_rows(X)


def sqrt2_counterexample() -> tuple[ExactMatrix, ExactMatrix]:
    """7x7 Q with orthogonal rows, zeros confined to four rows, no
    combinatorially orthogonal rows or columns, and a SIPP-refuting X.

    The 4x4 block of X as usually printed is not a solution; this is the
    one-dimensional kernel of the SIPP system, supported on rows 1-4.
    """
    r = SQRT2
    Q = ExactMatrix.from_rows([
        [-9, 9, 0, 0, 3 * r, -6 * r, 6 * r],
        [9, -9, 0, 0, 3 * r, -6 * r, 6 * r],
        [0, 0, -9, 9, -6 * r, 3 * r, 6 * r],
        [0, 0, 9, -9, -6 * r, 3 * r, 6 * r],
        [3 * r, 3 * r, -6 * r, -6 * r, 8, 8, 4],
        [-6 * r, -6 * r, 3 * r, 3 * r, 8, 8, 4],
        [6 * r, 6 * r, 6 * r, 6 * r, 4, 4, 2],
    ])
    X = [[0] * 7 for _ in range(7)]
    block = [[0, 0, 1, -1], [0, 0, -1, 1], [1, -1, 0, 0], [-1, 1, 0, 0]]
    for i in range(4):
        X[i][:4] = block[i]
    return Q, ExactMatrix.from_rows(X)


CERT_5x6_A = [
    [-8, -74, -25, 41, 8, 65],
    [13, 65, -73, 4, 22, 43],
    [56, 7, 23, -28, -71, 50],
    [73, 4, 4, 75, 7, -32],
    [3, 29, 73, 7, 60, 49],
]

CERT_5x6_A_FLOAT = np.array([
    [-0.0743294, -0.668965, -0.222988, 0.371647, 0.0743294, 0.594635],
    [0.118415, 0.59468, -0.665382, 0.0360018, 0.195624, 0.387344],
    [0.511869, 0.0620542, 0.206774, -0.259068, -0.646593, 0.454076],
    [0.665978, 0.0389929, 0.0396191, 0.681063, 0.0657504, -0.291912],
    [0.02319, 0.264691, 0.660817, 0.0611589, 0.541388, 0.442585],
])

CERT_5x6_A1 = [
    [-424, -297, 42, 382, 424, 212],
    [290, 48, -578, -70, 247, 392],
    [126, 32, 2, 536, -490, 310],
    [466, 4, 39, 404, 305, -407],
    [49, 579, 384, 12, 255, 301],
]

CERT_5x6_A2 = [
    [-246, -246, 369, 123, 369, 123],
    [494, -254, 7, 127, 7, 314],
    [174, 230, -11, -421, 396, 75],
    [284, 107, 414, 56, -41, -392],
    [2, 477, 51, 367, 69, 231],
]

# An integer certificate for open_6x8, found by the randomised search.
CERT_6x8 = [
    [25, 14, 286, 13, 207, 60, 156, 191],
    [40, 531, 63, -27, -600, -16, 45, 481],
    [225, 47, 18, 393, 49, 16, -216, 31],
    [49, 28, 452, -265, -101, -14, -439, -195],
    [17, 368, 52, 69, 15, 339, 200, -399],
    [136, 13, 26, -18, -17, -150, 90, -65],
]

_PATTERNS = {
    "cert_5x6_pattern": "---+++ ++-+++ +++--+ +++++- ++++++",
    "minimal_5x6_s1": "--++++ ++--++ ++++-+ +++++- ++++++",
    "minimal_5x6_s2": "---+++ ++-+++ +++--+ +++++- ++++++",
    "minimal_5x6_s3": "--++++ +-++++ ++--++ ++++-- ++++++",
    "minimal_5x6_s4": "---+++ +--+++ +++--+ +++++- ++++++",
    "minimal_4x5_alt": "--+++ ++--+ ++++- +++++",
    "conference6": "0+++++ +0+-+- ++0+-- +-+0-+ ++--0+ +--++0",
    "hollow4": "0+++ +0-+ ++0- +-+0",
    "three_zero_rows_3x4": "+0++ 0++- 0-+-",
    "open_6x8": "++++++++ +++---++ ++++++-+ +++----- +++++++- +++---+-",
    "minimal_m1": "+",
    "minimal_m2": "+- ++",
    "minimal_m3": "+-+ ++- +++",
    "minimal_m4_1": "+-++ ++-+ +++- ++++",
    "minimal_m4_2": "+--+ ++-+ +++- ++++",
    "minimal_m4_3": "-+++ +-++ ++-+ +++-",
    "minimal_m4_4": "-++++ +-+-+ ++-+- +++++",
    "minimal_m5_1": "+--++ ++--+ +++-- ++++- +++++",
    "minimal_m5_2": "--+++ +--++ ++--+ ++++- +++++",
    "minimal_m5_3": "--+++ +--++ ++-++ +++-+ ++++-",
    "minimal_m5_4": "--+++ +--++ +++-- ++++- +++++",
    "minimal_m5_5": "--+++ +--++ +++-+ ++++- +++++",
    "minimal_m5_6": "+--++ ++-++ +++-- ++++- +++++",
    "minimal_m5_7": "--+++ +-+++ ++-++ +++-+ ++++-",
    "minimal_m5_8": "-++++ +-+++ ++-++ +++-+ ++++-",
    "minimal_m5_9": "+-+++ ++-++ +++-+ ++++- +++++",
    "minimal_m5_10": "--++++ ++--++ ++++-+ +++++- ++++++",
    "minimal_m5_11": "---+++ ++-+++ +++--+ +++++- ++++++",
    "minimal_m5_12": "--++++ +-++++ ++--++ ++++-- ++++++",
}


def minimal_table(m: int) -> list[SignPattern]:
    """One representative per class of nowhere-zero m-row patterns that
    minimally allow orthogonality (m <= 5)."""
    if m in (1, 2, 3):
        return [P(_PATTERNS[f"minimal_m{m}"])]
    if m == 4:
        return [P(_PATTERNS[f"minimal_m4_{k}"]) for k in range(1, 5)]
    if m == 5:
        return [P(_PATTERNS[f"minimal_m5_{k}"]) for k in range(1, 13)]
    raise ValueError("table only covers m <= 5")


def _exact(name: str):
    if name == "cert_5x6":
        return ExactMatrix.from_rows(CERT_5x6_A)
    if name == "cert_5x6_a1":
        return ExactMatrix.from_rows(CERT_5x6_A1)
    if name == "cert_5x6_a2":
        return ExactMatrix.from_rows(CERT_5x6_A2)
    if name == "cert_6x8":
        return ExactMatrix.from_rows(CERT_6x8)
    if name == "three_zero_rows_3x4_matrix":
        return ExactMatrix.from_rows([[1, 0, 1, 1], [0, 1, 1, -1], [0, -2, 1, -1]])
    if name == "conference6_matrix":
        return ExactMatrix.from_rows(P(_PATTERNS["conference6"]).to_rows())
    if name == "hollow4_matrix":
        return ExactMatrix.from_rows(P(_PATTERNS["hollow4"]).to_rows())
    if name.startswith("stacked_counterexample_n"):
        n = int(name.removeprefix("stacked_counterexample_n").split("_")[0])
        A, X = stacked_counterexample(n)
        return X if name.endswith("_witness") else A
    if name == "sqrt2_counterexample":
        return sqrt2_counterexample()[0]
    if name == "sqrt2_counterexample_witness":
        return sqrt2_counterexample()[1]
    if name.startswith("hessenberg_"):
        return hessenberg(int(name.split("_")[1]))
    if name.startswith("incidence_"):
        return incidence_pattern(int(name.split("_")[1]))[0]
    return None


EXACT_FIXTURES = (
    "cert_5x6", "cert_5x6_a1", "cert_5x6_a2", "cert_6x8", "three_zero_rows_3x4_matrix",
    "conference6_matrix", "hollow4_matrix",
    "stacked_counterexample_n3", "stacked_counterexample_n3_witness",
    "stacked_counterexample_n6", "stacked_counterexample_n6_witness",
    "sqrt2_counterexample", "sqrt2_counterexample_witness",
)


def fixture_names() -> list[str]:
    return sorted(_PATTERNS) + list(EXACT_FIXTURES) + ["cert_5x6_float", "hessenberg_<n>",
                                                        "incidence_<m>"]


def named_fixture(name: str):
    """Look up a named fixture: a SignPattern, ExactMatrix, or float array."""
    if name in _PATTERNS:
        return P(_PATTERNS[name])
    if name == "cert_5x6_float":
        return CERT_5x6_A_FLOAT.copy()
    try:
        M = _exact(name)
    except ValueError as exc:
        raise KeyError(f"unknown fixture {name!r}: {exc}") from None
    if M is None:
        raise KeyError(f"unknown fixture {name!r}")
    return M

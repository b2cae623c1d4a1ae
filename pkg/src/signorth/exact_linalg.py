"""Exact matrices over Q (and Q[sqrt 2]) with rank, null space and Gram products.

Rational matrices use :class:`fractions.Fraction`.  A handful of fixtures need
``sqrt(2)``; those use :class:`QSqrt2`, and every routine here that only needs
field operations works on either entry type.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np


class QSqrt2:
    """Element ``a + b*sqrt(2)`` of the field Q(sqrt 2), a and b rational."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @staticmethod
    def _lift(x) -> "QSqrt2":
        if isinstance(x, QSqrt2):
            return x
        if isinstance(x, (int, Fraction)):
            return QSqrt2(x, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QSqrt2(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt2(-self.a, -self.b)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QSqrt2(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QSqrt2(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - 2 * self.b * self.b

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        nrm = o.norm()
        if nrm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt 2)")
        conj = QSqrt2(o.a, -o.b)
        p = self * conj
        return QSqrt2(p.a / nrm, p.b / nrm)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return False
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b)) if self.b else hash(self.a)

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0 or sa == sb:
            return sa or sb
        if sa == 0:
            return sb
        # opposite signs: compare a^2 with 2 b^2
        diff = self.a * self.a - 2 * self.b * self.b
        return sa if diff > 0 else sb

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(2)

    def __repr__(self):
        return f"QSqrt2({self.a}, {self.b})"

    def __str__(self):
        if not self.b:
            return str(self.a)
        if not self.a:
            return f"{self.b}*sqrt2"
        sign = "+" if self.b > 0 else "-"
        return f"{self.a}{sign}{abs(self.b)}*sqrt2"


SQRT2 = QSqrt2(0, 1)

_QS2_RE = re.compile(
    r"^\s*(?:(?P<a>[+-]?\d+(?:/\d+)?)(?=\s*[+-]))?\s*(?P<bs>[+-])?\s*"
    r"(?:(?P<b>\d+(?:/\d+)?)\s*\*\s*)?sqrt2\s*$")


def parse_scalar(token):
    """Parse a JSON matrix entry: int, ``"num/den"`` or ``"a+b*sqrt2"``."""
    if isinstance(token, bool):
        raise ValueError("booleans are not matrix entries")
    if isinstance(token, int):
        return Fraction(token)
    if isinstance(token, float):
        raise ValueError("floats are not exact entries; pass 'num/den' strings")
    text = str(token).strip()
    if "sqrt2" not in text:
        return Fraction(text)
    m = _QS2_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse {token!r}")
    a = Fraction(m.group("a")) if m.group("a") else Fraction(0)
    b = Fraction(m.group("b")) if m.group("b") else Fraction(1)
    if m.group("bs") == "-":
        b = -b
    return QSqrt2(a, b)


def format_scalar(x) -> str | int:
    if isinstance(x, QSqrt2):
        return str(x) if x.b else format_scalar(x.a)
    x = Fraction(x)
    if x.denominator == 1:
        return int(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _coerce(x):
    if isinstance(x, QSqrt2):
        return x.a if not x.b else x
    if isinstance(x, (float, np.floating)):
        raise TypeError("ExactMatrix entries must be exact (int, Fraction, QSqrt2)")
    return Fraction(x)


@dataclass(frozen=True, eq=False)
class ExactMatrix:
    rows: int
    cols: int
    entries: tuple

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "ExactMatrix":
        rows = [list(r) for r in rows]
        if not rows:
            raise ValueError("empty matrix")
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), n, tuple(_coerce(x) for r in rows for x in r))

    @classmethod
    def zeros(cls, m: int, n: int) -> "ExactMatrix":
        return cls(m, n, (Fraction(0),) * (m * n))

    @classmethod
    def identity(cls, m: int) -> "ExactMatrix":
        return cls.from_rows([[int(i == j) for j in range(m)] for i in range(m)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple:
        return self.entries[j::self.cols]

    def to_rows(self) -> list[list]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_rational(self) -> bool:
        return not any(isinstance(x, QSqrt2) for x in self.entries)

    def __eq__(self, other):
        return (isinstance(other, ExactMatrix) and self.shape == other.shape
                and all(a == b for a, b in zip(self.entries, other.entries)))

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return f"ExactMatrix({self.to_json()['data']})"

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix.from_rows([self.col(j) for j in range(self.cols)])

    @property
    def T(self) -> "ExactMatrix":
        return self.transpose()

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        ocols = [other.col(j) for j in range(other.cols)]
        return ExactMatrix.from_rows([[_dot(self.row(i), c) for c in ocols]
                                      for i in range(self.rows)])

    def hadamard(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return ExactMatrix(self.rows, self.cols,
                           tuple(_coerce(a * b) for a, b in zip(self.entries, other.entries)))

    def scale(self, c) -> "ExactMatrix":
        return ExactMatrix(self.rows, self.cols, tuple(_coerce(c * x) for x in self.entries))

    def is_zero(self) -> bool:
        return not any(self.entries)

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self[i, j] == self[j, i] for i in range(self.rows) for j in range(i))

    def is_diagonal(self) -> bool:
        return all(not self[i, j] for i in range(self.rows) for j in range(self.cols) if i != j)

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.rows != other.rows:
            raise ValueError("row counts differ")
        return ExactMatrix.from_rows([list(self.row(i)) + list(other.row(i))
                                      for i in range(self.rows)])

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "ExactMatrix":
        cols = list(cols)
        return ExactMatrix.from_rows([[self[i, j] for j in cols] for i in rows])

    def to_float(self) -> np.ndarray:
        return np.array([[float(x) for x in self.row(i)] for i in range(self.rows)])

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols,
                "data": [[format_scalar(x) for x in self.row(i)] for i in range(self.rows)]}

    @classmethod
    def from_json(cls, obj: dict | str) -> "ExactMatrix":
        if isinstance(obj, str):
            obj = json.loads(obj)
        M = cls.from_rows([[parse_scalar(t) for t in r] for r in obj["data"]])
        if "rows" in obj and "cols" in obj and M.shape != (obj["rows"], obj["cols"]):
            raise ValueError(f"declared shape {(obj['rows'], obj['cols'])} != data {M.shape}")
        return M


def _dot(x, y):
    s = Fraction(0)
    for a, b in zip(x, y):
        if a and b:
            s = s + a * b
    return _coerce(s)


def gram(A: ExactMatrix) -> ExactMatrix:
    """A A^T, exactly."""
    rows = [A.row(i) for i in range(A.rows)]
    G = [[None] * A.rows for _ in range(A.rows)]
    for i in range(A.rows):
        for k in range(i, A.rows):
            G[i][k] = G[k][i] = _dot(rows[i], rows[k])
    return ExactMatrix.from_rows(G)


def _integer_rows(A: ExactMatrix) -> list[list[int]]:
    """Clear denominators row by row; rank and null space are unchanged."""
    out = []
    for i in range(A.rows):
        r = A.row(i)
        lcm = 1
        for x in r:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        out.append([int(x * lcm) for x in r])
    return out


def bareiss_rank(M: list[list[int]]) -> int:
    """Rank of an integer matrix by fraction-free (Bareiss) elimination."""
    M = [row[:] for row in M]
    m = len(M)
    n = len(M[0]) if m else 0
    rank = 0
    prev = 1
    for c in range(n):
        if rank == m:
            break
        piv = next((r for r in range(rank, m) if M[r][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        p = M[rank][c]
        for r in range(rank + 1, m):
            a = M[r][c]
            row_r, row_p = M[r], M[rank]
            for j in range(c + 1, n):
                # exact by Sylvester's identity
                row_r[j] = (p * row_r[j] - a * row_p[j]) // prev
            row_r[c] = 0
        prev = p
        rank += 1
    return rank


def rref(A: ExactMatrix) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over the entry field; returns (rows, pivot columns)."""
    R = [list(A.row(i)) for i in range(A.rows)]
    pivots: list[int] = []
    r = 0
    for c in range(A.cols):
        piv = next((i for i in range(r, A.rows) if R[i][c]), None)
        if piv is None:
            continue
        R[r], R[piv] = R[piv], R[r]
        inv = 1 / R[r][c] if isinstance(R[r][c], QSqrt2) else Fraction(1) / R[r][c]
        R[r] = [_coerce(x * inv) for x in R[r]]
        for i in range(A.rows):
            if i != r and R[i][c]:
                f = R[i][c]
                R[i] = [_coerce(x - f * y) for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == A.rows:
            break
    return R, pivots


def rank_exact(A: ExactMatrix) -> int:
    if A.is_rational:
        return bareiss_rank(_integer_rows(A))
    return len(rref(A)[1])


def nullspace_exact(A: ExactMatrix) -> list[ExactMatrix]:
    """Basis of {v : A v = 0} as column matrices (cols x 1)."""
    R, pivots = rref(A)
    free = [c for c in range(A.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * A.cols
        v[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = _coerce(-R[r][f])
        basis.append(ExactMatrix.from_rows([[x] for x in v]))
    return basis


def float_rank(A: np.ndarray, tau: float | None = None) -> int:
    """Numerical rank by Gaussian elimination with complete pivoting.

    Default tolerance is ``1e-9 * max|a_ij|``.  Heuristic only.
    """
    M = np.array(A, dtype=float, copy=True)
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    if M.size == 0:
        return 0
    if tau is None:
        tau = 1e-9 * max(np.abs(M).max(), np.finfo(float).tiny)
    m, n = M.shape
    rank = 0
    for _ in range(min(m, n)):
        sub = np.abs(M[rank:, rank:])
        idx = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[idx] <= tau:
            break
        i, j = idx[0] + rank, idx[1] + rank
        M[[rank, i]] = M[[i, rank]]
        M[:, [rank, j]] = M[:, [j, rank]]
        M[rank + 1:] -= np.outer(M[rank + 1:, rank] / M[rank, rank], M[rank])
        rank += 1
    return rank


def rational_sqrt_upper_bound(q, bits: int = 64) -> Fraction:
    """Rational u with u^2 >= q and u - sqrt(q) <= 2^-bits.

    Exact when q is the square of a rational.
    """
    q = Fraction(q)
    if q < 0:
        raise ValueError("square root of a negative number")
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    scale = 1 << bits
    a = math.isqrt(q.numerator * scale * scale // q.denominator)
    return Fraction(a + 1, scale)

"""Sign patterns, zero-nonzero patterns and signed-permutation equivalence.

Entries are stored as ints: ``1`` for ``+``, ``-1`` for ``-`` and ``0`` for
``0``.  Patterns are immutable and hashable, so they can be used as dict keys
when deduplicating equivalence classes.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

_CHAR_TO_SIGN = {"+": 1, "-": -1, "0": 0}
_SIGN_TO_CHAR = {1: "+", -1: "-", 0: "0"}

# ASCII order of "+-0"; canonical forms are the least entry string under it.
_LEX_KEY = {1: 0, -1: 1, 0: 2}

DEFAULT_CANON_GUARD = 42


class PatternParseError(ValueError):
    """Malformed pattern text; carries the 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def _sign(x) -> int:
    if isinstance(x, float) and math.isnan(x):
        raise ValueError("NaN has no sign")
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class SignPattern:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("a pattern needs at least one row and one column")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match shape")
        if any(e not in (1, -1, 0) for e in self.entries):
            raise ValueError("entries must be 1, -1 or 0")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "SignPattern":
        rows = [list(r) for r in rows]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged or empty rows")
        return cls(len(rows), len(rows[0]), tuple(_sign(v) for r in rows for v in r))

    @classmethod
    def from_array(cls, arr) -> "SignPattern":
        arr = np.asarray(arr)
        return cls.from_rows(arr.tolist())

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[int, ...]:
        return self.entries[j::self.cols]

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def to_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int8).reshape(self.rows, self.cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_wide(self) -> bool:
        return self.rows <= self.cols

    @property
    def is_nowhere_zero(self) -> bool:
        return 0 not in self.entries

    def zero_count(self) -> int:
        return self.entries.count(0)

    def transpose(self) -> "SignPattern":
        return SignPattern.from_rows([self.col(j) for j in range(self.cols)])

    def negate(self) -> "SignPattern":
        return SignPattern(self.rows, self.cols, tuple(-e for e in self.entries))

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "SignPattern":
        rows, cols = list(rows), list(cols)
        return SignPattern.from_rows([[self[i, j] for j in cols] for i in rows])

    def delete_column(self, j: int) -> "SignPattern":
        return self.submatrix(range(self.rows), [c for c in range(self.cols) if c != j])

    def hstack(self, other: "SignPattern") -> "SignPattern":
        if other.rows != self.rows:
            raise ValueError("row counts differ")
        return SignPattern.from_rows([list(self.row(i)) + list(other.row(i))
                                      for i in range(self.rows)])

    def pad_zero_columns(self, k: int) -> "SignPattern":
        return SignPattern.from_rows([list(self.row(i)) + [0] * k for i in range(self.rows)])

    def realization(self) -> list[list[int]]:
        """The (1,-1,0)-matrix C_S realizing this pattern."""
        return self.to_rows()

    def entry_string(self) -> str:
        return "".join(_SIGN_TO_CHAR[e] for e in self.entries)

    def __str__(self) -> str:
        return format_pattern(self)

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "entries": self.entry_string()}

    @classmethod
    def from_json(cls, obj: dict | str) -> "SignPattern":
        if isinstance(obj, str):
            obj = json.loads(obj)
        m, n, text = obj["rows"], obj["cols"], obj["entries"]
        if len(text) != m * n:
            raise ValueError(f"expected {m * n} entries, got {len(text)}")
        try:
            return cls(m, n, tuple(_CHAR_TO_SIGN[c] for c in text))
        except KeyError as exc:
            raise ValueError(f"illegal entry character {exc.args[0]!r}") from None


@dataclass(frozen=True)
class ZnzPattern:
    """Zero-nonzero pattern; entries are True for ``*`` and False for ``0``."""

    rows: int
    cols: int
    entries: tuple[bool, ...]

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1 or len(self.entries) != self.rows * self.cols:
            raise ValueError("bad znz pattern shape")

    def __str__(self) -> str:
        chars = ["*" if e else "0" for e in self.entries]
        return "\n".join("".join(chars[i * self.cols:(i + 1) * self.cols])
                         for i in range(self.rows))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]


def parse_pattern(text: str) -> SignPattern:
    """Parse newline-separated rows of ``+``, ``-`` and ``0`` characters.

    Surrounding blank lines and trailing whitespace are ignored.
    """
    lines = [ln.rstrip() for ln in text.strip("\n").split("\n")]
    while lines and not lines[-1]:
        lines.pop()
    if not lines or not lines[0]:
        raise PatternParseError("empty pattern", 1, 1)
    width = len(lines[0])
    rows = []
    for ln_no, line in enumerate(lines, start=1):
        row = []
        for col_no, ch in enumerate(line, start=1):
            if ch not in _CHAR_TO_SIGN:
                raise PatternParseError(f"illegal character {ch!r}", ln_no, col_no)
            row.append(_CHAR_TO_SIGN[ch])
        if len(row) != width:
            raise PatternParseError(
                f"ragged row: expected {width} entries, got {len(row)}", ln_no, len(row) + 1)
        rows.append(row)
    return SignPattern.from_rows(rows)


def format_pattern(S: SignPattern) -> str:
    s = S.entry_string()
    return "\n".join(s[i * S.cols:(i + 1) * S.cols] for i in range(S.rows))


def P(text: str) -> SignPattern:
    """Shorthand for building patterns from whitespace-separated rows."""
    return parse_pattern("\n".join(text.split()))


def _entry_sign(x) -> int:
    # Works for ints, Fractions, floats and objects exposing ``sign()``.
    if hasattr(x, "sign") and not isinstance(x, (int, float, Fraction, np.generic)):
        return x.sign()
    if isinstance(x, (float, np.floating)):
        if math.isnan(x):
            raise ValueError("NaN entry has no sign")
    return (x > 0) - (x < 0)


def sgn_of(A) -> SignPattern:
    """Entrywise sign pattern of a matrix (nested lists, numpy array or ExactMatrix)."""
    rows = A.to_rows() if hasattr(A, "to_rows") else [list(r) for r in A]
    return SignPattern.from_rows([[_entry_sign(x) for x in r] for r in rows])


def znz_of(A) -> ZnzPattern:
    S = sgn_of(A)
    return ZnzPattern(S.rows, S.cols, tuple(e != 0 for e in S.entries))


def is_superpattern(R: SignPattern, S: SignPattern) -> bool:
    """True iff R agrees with S on every nonzero entry of S."""
    if R.shape != S.shape:
        raise ValueError(f"shape mismatch {R.shape} vs {S.shape}")
    return all(s == 0 or r == s for r, s in zip(R.entries, S.entries))


@dataclass(frozen=True)
class SignedPermEquivalence:
    """S -> P1 S P2 for signed permutations P1 (rows) and P2 (columns).

    Row ``i`` of the result is ``row_signs[i]`` times row ``row_perm[i]`` of
    the input, and likewise for columns.
    """

    row_perm: tuple[int, ...]
    row_signs: tuple[int, ...]
    col_perm: tuple[int, ...]
    col_signs: tuple[int, ...]

    def __post_init__(self):
        for perm, signs in ((self.row_perm, self.row_signs), (self.col_perm, self.col_signs)):
            if sorted(perm) != list(range(len(perm))) or len(signs) != len(perm):
                raise ValueError("invalid signed permutation")
            if any(s not in (1, -1) for s in signs):
                raise ValueError("signs must be +1 or -1")

    @classmethod
    def identity(cls, m: int, n: int) -> "SignedPermEquivalence":
        return cls(tuple(range(m)), (1,) * m, tuple(range(n)), (1,) * n)

    @classmethod
    def random(cls, m: int, n: int, rng: np.random.Generator) -> "SignedPermEquivalence":
        return cls(tuple(int(x) for x in rng.permutation(m)),
                   tuple(int(x) for x in rng.choice([-1, 1], size=m)),
                   tuple(int(x) for x in rng.permutation(n)),
                   tuple(int(x) for x in rng.choice([-1, 1], size=n)))

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.row_perm), len(self.col_perm))

    def inverse(self) -> "SignedPermEquivalence":
        def inv(perm, signs):
            p = [0] * len(perm)
            s = [0] * len(perm)
            for new, old in enumerate(perm):
                p[old] = new
                s[old] = signs[new]
            return tuple(p), tuple(s)

        rp, rs = inv(self.row_perm, self.row_signs)
        cp, cs = inv(self.col_perm, self.col_signs)
        return SignedPermEquivalence(rp, rs, cp, cs)

    def compose(self, other: "SignedPermEquivalence") -> "SignedPermEquivalence":
        """The equivalence applying ``other`` first, then ``self``."""
        rp = tuple(other.row_perm[i] for i in self.row_perm)
        rs = tuple(self.row_signs[i] * other.row_signs[self.row_perm[i]]
                   for i in range(len(rp)))
        cp = tuple(other.col_perm[j] for j in self.col_perm)
        cs = tuple(self.col_signs[j] * other.col_signs[self.col_perm[j]]
                   for j in range(len(cp)))
        return SignedPermEquivalence(rp, rs, cp, cs)

    def apply_rows(self, A: Sequence[Sequence]) -> list[list]:
        """Apply to a generic matrix given as nested lists."""
        return [[self.row_signs[i] * self.col_signs[j] * A[self.row_perm[i]][self.col_perm[j]]
                 for j in range(len(self.col_perm))] for i in range(len(self.row_perm))]


def apply_equiv(S: SignPattern, e: SignedPermEquivalence) -> SignPattern:
    if e.shape != S.shape:
        raise ValueError(f"equivalence shape {e.shape} does not match pattern {S.shape}")
    return SignPattern.from_rows(e.apply_rows(S.to_rows()))


@lru_cache(maxsize=16)
def _row_transforms(m: int) -> tuple[np.ndarray, np.ndarray]:
    perms = np.array(list(itertools.permutations(range(m))), dtype=np.intp)
    signs = np.array(list(itertools.product((1, -1), repeat=m)), dtype=np.int8)
    return perms, signs


def _column_codes(T: np.ndarray) -> np.ndarray:
    """Base-3 code of each column (top entry most significant) under the lex key."""
    m = T.shape[-2]
    key = np.where(T == 1, 0, np.where(T == -1, 1, 2)).astype(np.int64)
    weights = 3 ** np.arange(m - 1, -1, -1, dtype=np.int64)
    return np.einsum("...ij,i->...j", key, weights)


def canonical_form(S: SignPattern, guard: int = DEFAULT_CANON_GUARD) -> SignPattern:
    """Distinguished representative of the sign-equivalence class of S.

    The representative minimises the column-major entry string (ordering
    ``+ < - < 0``).  For a fixed row order and row signs the optimum is
    forced: each column is negated if that makes it smaller, then columns are
    sorted.  So only the ``m! * 2^m`` row transforms are enumerated, in a
    single vectorised pass.
    """
    m, n = S.shape
    if m * n > guard:
        raise ValueError(f"pattern {m}x{n} exceeds canonical-form guard m*n <= {guard}")
    perms, signs = _row_transforms(m)
    A = S.to_array()
    # (P, m, n) row-permuted, then (P, 2^m, m, n) row-signed.
    permuted = A[perms]
    T = permuted[:, None, :, :] * signs[None, :, :, None]
    T = T.reshape(-1, m, n)
    codes = np.minimum(_column_codes(T), _column_codes(-T))
    codes.sort(axis=1)
    best = codes[np.lexsort(codes.T[::-1])[0]]
    cols = []
    for code in best:
        col = []
        for _ in range(m):
            code, d = divmod(int(code), 3)
            col.append((1, -1, 0)[d])
        cols.append(col[::-1])
    return SignPattern.from_rows([[cols[j][i] for j in range(n)] for i in range(m)])


def _pair_products(S: SignPattern, i: int, k: int) -> list[int]:
    return [a * b for a, b in zip(S.row(i), S.row(k))]


def ppo_pair_ok(S: SignPattern, i: int, k: int) -> bool:
    """Rows i and k admit orthogonal realizations.

    Either every sign product vanishes, or both a ``+`` and a ``-`` product
    occur; a sum of same-signed nonzero terms cannot be zero.
    """
    prods = set(_pair_products(S, i, k)) - {0}
    return not prods or prods == {1, -1}


def row_ppo_failure(S: SignPattern) -> tuple | None:
    """First witness that S is not row PPO: ``("zero_row", i)`` or ``("pair", i, k)``."""
    for i in range(S.rows):
        if not any(S.row(i)):
            return ("zero_row", i)
    for i, k in itertools.combinations(range(S.rows), 2):
        if not ppo_pair_ok(S, i, k):
            return ("pair", i, k)
    return None


def row_ppo(S: SignPattern) -> bool:
    return row_ppo_failure(S) is None


def column_ppo(S: SignPattern) -> bool:
    return row_ppo(S.transpose())


def combinatorially_orthogonal(S: SignPattern, i: int, k: int) -> bool:
    """Supports of rows i and k are disjoint."""
    if not (0 <= i < S.rows and 0 <= k < S.rows):
        raise IndexError(f"row index out of range for {S.rows} rows")
    return all(a == 0 or b == 0 for a, b in zip(S.row(i), S.row(k)))


def has_combinatorially_orthogonal_rows(S: SignPattern) -> bool:
    return any(combinatorially_orthogonal(S, i, k)
               for i, k in itertools.combinations(range(S.rows), 2))


def negative_4cycle(S: SignPattern, i: int, k: int) -> tuple[int, int] | None:
    """Columns (j, l) with s_ij*s_kj = + and s_il*s_kl = -, or None.

    The first ``+`` column and the first ``-`` column are returned.
    """
    if i == k:
        raise ValueError("a negative 4-cycle needs two distinct rows")
    if not (0 <= i < S.rows and 0 <= k < S.rows):
        raise IndexError(f"row index out of range for {S.rows} rows")
    prods = _pair_products(S, i, k)
    try:
        return prods.index(1), prods.index(-1)
    except ValueError:
        return None

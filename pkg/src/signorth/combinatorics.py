"""Negative 4-cycle covers, the rank-1 obstruction, and the decision pipeline."""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .certificate import CertificateReport, SearchConfig, find_certificate, verify_certificate
from .exact_linalg import ExactMatrix
from .pattern_core import SignPattern, row_ppo_failure, sgn_of

log = logging.getLogger(__name__)

EXACT_COVER_GUARD = (6, 24)
RANK1_GUARD = 12


class SearchTimeout(RuntimeError):
    """A deadline passed before an exhaustive search finished."""


# --- evidence types ----------------------------------------------------------

@dataclass(frozen=True)
class FourCycleCover:
    """For every row pair (i, k), i < k, columns (j, l) with s_ij s_kj = +
    and s_il s_kl = -; all columns distinct."""

    cycles: dict[tuple[int, int], tuple[int, int]]

    @property
    def used_columns(self) -> frozenset[int]:
        return frozenset(c for jl in self.cycles.values() for c in jl)

    def to_json(self) -> dict:
        return {"kind": "four_cycle_cover",
                "cycles": [{"rows": [i + 1, k + 1], "columns": [j + 1, l + 1]}
                           for (i, k), (j, l) in sorted(self.cycles.items())]}


def validate_cover(S: SignPattern, cover: FourCycleCover) -> bool:
    """Independent re-check: all row pairs present, disjoint, correct signs."""
    pairs = set(itertools.combinations(range(S.rows), 2))
    if set(cover.cycles) != pairs:
        return False
    cols = [c for jl in cover.cycles.values() for c in jl]
    if len(cols) != len(set(cols)) or any(not 0 <= c < S.cols for c in cols):
        return False
    return all(S[i, j] * S[k, j] == 1 and S[i, l] * S[k, l] == -1
               for (i, k), (j, l) in cover.cycles.items())


@dataclass(frozen=True)
class Rank1Obstruction:
    """Rows R and columns C with |R| + |C| >= n + 2 on which every column of
    S[R, C] is +-template."""

    row_set: tuple[int, ...]
    col_set: tuple[int, ...]
    template: tuple[int, ...]

    def to_json(self) -> dict:
        return {"kind": "rank1_obstruction", "rows": [i + 1 for i in self.row_set],
                "columns": [j + 1 for j in self.col_set], "template": list(self.template)}


def validate_rank1(S: SignPattern, ob: Rank1Obstruction) -> bool:
    """Re-check through all 2x2 minors of the submatrix."""
    R, C = ob.row_set, ob.col_set
    if len(set(R)) != len(R) or len(set(C)) != len(C):
        return False
    if len(R) + len(C) < S.cols + 2:
        return False
    if any(S[i, j] == 0 for i in R for j in C):
        return False
    return all(S[a, c] * S[b, d] == S[a, d] * S[b, c]
               for a, b in itertools.combinations(R, 2)
               for c, d in itertools.combinations(C, 2))


@dataclass(frozen=True)
class PpoFailure:
    """A zero row, or a row pair whose products are all of one sign (or all zero)."""

    rows: tuple[int, ...]

    def to_json(self) -> dict:
        return {"kind": "ppo_failure", "rows": [i + 1 for i in self.rows]}


def validate_ppo_failure(S: SignPattern, ev: PpoFailure) -> bool:
    if len(ev.rows) == 1:
        return not any(S.row(ev.rows[0]))
    i, k = ev.rows
    prods = {S[i, j] * S[k, j] for j in range(S.cols)} - {0}
    return len(prods) == 1


@dataclass(frozen=True)
class NotWide:
    rows: int
    cols: int

    def to_json(self) -> dict:
        return {"kind": "not_wide", "rows": self.rows, "cols": self.cols}


@dataclass(frozen=True)
class CertificateEvidence:
    matrix: ExactMatrix
    report: CertificateReport

    def to_json(self) -> dict:
        return {"kind": "certificate", "matrix": self.matrix.to_json(),
                "report": self.report.to_json()}


def validate_certificate(S: SignPattern, ev: CertificateEvidence) -> bool:
    return sgn_of(ev.matrix) == S and verify_certificate(ev.matrix).accepted


# --- covers ------------------------------------------------------------------

def find_cover_greedy(S: SignPattern, r: int = 0) -> FourCycleCover | None:
    """Greedy search for column-disjoint negative 4-cycles.

    For t = 0..m-2 take W_t as the first 2(m-1-t)+r columns of the pool that
    are nonzero in row t, drop them from the pool, and inside W_t pick for
    each later row k the first unused column with product + and the first
    with product -.  Failure does not mean no cover exists.
    """
    m, n = S.shape
    if r < 0 or r > n:
        raise ValueError(f"r must lie in [0, n]; got {r}")
    pool = list(range(n))
    cycles: dict[tuple[int, int], tuple[int, int]] = {}
    for t in range(m - 1):
        size = 2 * (m - 1 - t) + r
        W = [j for j in pool if S[t, j]][:size]
        if len(W) < size:
            return None
        taken = set(W)
        pool = [j for j in pool if j not in taken]
        free = list(W)
        for k in range(t + 1, m):
            plus = next((j for j in free if S[t, j] * S[k, j] == 1), None)
            minus = next((j for j in free if S[t, j] * S[k, j] == -1), None)
            if plus is None or minus is None:
                return None
            free.remove(plus)
            free.remove(minus)
            cycles[(t, k)] = (plus, minus)
    return FourCycleCover(cycles)


def find_cover_exact(S: SignPattern, deadline: float | None = None,
                     guard: tuple[int, int] = EXACT_COVER_GUARD) -> FourCycleCover | None:
    """Exhaustive backtracking; ``None`` means no cover exists.

    ``deadline`` is a ``time.monotonic()`` value; passing it raises
    :class:`SearchTimeout`.
    """
    m, n = S.shape
    if m > guard[0] or n > guard[1]:
        raise ValueError(f"exact cover search limited to {guard[0]}x{guard[1]}")
    pairs = list(itertools.combinations(range(m), 2))
    if 2 * len(pairs) > n:
        return None
    plus = {}
    minus = {}
    for i, k in pairs:
        prods = [S[i, j] * S[k, j] for j in range(n)]
        plus[(i, k)] = [j for j in range(n) if prods[j] == 1]
        minus[(i, k)] = [j for j in range(n) if prods[j] == -1]
    dead: set[tuple[frozenset, int]] = set()
    chosen: dict[tuple[int, int], tuple[int, int]] = {}

    def options(p, used):
        return ([j for j in plus[p] if not used >> j & 1],
                [j for j in minus[p] if not used >> j & 1])

    def solve(remaining: frozenset, used: int) -> bool:
        if not remaining:
            return True
        if deadline is not None and time.monotonic() > deadline:
            raise SearchTimeout("exact cover search")
        if (remaining, used) in dead:
            return False
        best, best_opts, best_count = None, None, None
        for p in remaining:
            ps, ms = options(p, used)
            count = len(ps) * len(ms)
            if count == 0:
                dead.add((remaining, used))
                return False
            if best is None or count < best_count:
                best, best_opts, best_count = p, (ps, ms), count
        rest = remaining - {best}
        for j in best_opts[0]:
            for ell in best_opts[1]:
                chosen[best] = (j, ell)
                if solve(rest, used | (1 << j) | (1 << ell)):
                    return True
        del chosen[best]
        dead.add((remaining, used))
        return False

    if solve(frozenset(pairs), 0):
        return FourCycleCover(dict(chosen))
    return None


# --- rank-1 obstruction ----------------------------------------------------

def rank1_obstruction(S: SignPattern, guard: int = RANK1_GUARD) -> Rank1Obstruction | None:
    """Rows R, columns C with |R| + |C| >= n + 2 and S[R, C] of rank one.

    Row subsets are scanned by size, then lexicographically; columns are
    bucketed by their restriction to R up to sign.
    """
    m, n = S.shape
    if not S.is_nowhere_zero:
        raise ValueError("rank-1 obstruction needs a nowhere-zero pattern")
    if m > guard:
        raise ValueError(f"rank-1 obstruction search limited to {guard} rows")
    A = S.to_array()
    for r in range(2, m + 1):
        need = n + 2 - r
        if need > n:
            continue
        for R in itertools.combinations(range(m), r):
            sub = A[list(R), :]
            normed = sub * sub[0]  # make the first restricted entry +
            buckets: dict[bytes, list[int]] = {}
            for j in range(n):
                buckets.setdefault(normed[:, j].tobytes(), []).append(j)
            for cols in buckets.values():
                if len(cols) >= need:
                    template = tuple(int(x) for x in normed[:, cols[0]])
                    return Rank1Obstruction(R, tuple(cols), template)
    return None


def rank1_obstruction_bruteforce(S: SignPattern) -> bool:
    """Oracle: try every row and column subset with r + s >= n + 2."""
    m, n = S.shape
    for r in range(2, m + 1):
        for s in range(max(1, n + 2 - r), n + 1):
            for R in itertools.combinations(range(m), r):
                for C in itertools.combinations(range(n), s):
                    if all(S[a, c] * S[b, d] == S[a, d] * S[b, c]
                           for a, b in itertools.combinations(R, 2)
                           for c, d in itertools.combinations(C, 2)):
                        return True
    return False


# --- decision pipeline -------------------------------------------------------

class Status(str, Enum):
    ALLOWS = "Allows"
    FORBIDDEN = "Forbidden"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Verdict:
    status: Status
    evidence: object | None = None
    provenance: str = ""

    def to_json(self) -> dict:
        return {"status": self.status.value, "provenance": self.provenance,
                "evidence": None if self.evidence is None else self.evidence.to_json()}


@dataclass
class DecideConfig:
    greedy_r: int = 0
    cover_deadline: float = 5.0  # seconds for the exact cover search
    exact_cover_guard: tuple[int, int] = EXACT_COVER_GUARD
    rank1_guard: int = RANK1_GUARD
    use_certificate: bool = True
    search: SearchConfig = field(default_factory=SearchConfig)


def _checked(S: SignPattern, verdict: Verdict) -> Verdict:
    ev = verdict.evidence
    ok = {
        PpoFailure: validate_ppo_failure,
        Rank1Obstruction: validate_rank1,
        FourCycleCover: validate_cover,
        CertificateEvidence: validate_certificate,
        NotWide: lambda S, e: S.rows > S.cols,
    }[type(ev)](S, ev)
    if not ok:
        raise AssertionError(f"{verdict.provenance} produced evidence that failed re-verification")
    return verdict


def decide_allows(S: SignPattern, cfg: DecideConfig | None = None,
                  rng: np.random.Generator | None = None) -> Verdict:
    """Does S allow row orthogonality?  Allows and Forbidden carry evidence
    that has been re-verified; Unknown makes no claim."""
    cfg = cfg or DecideConfig()
    m, n = S.shape
    if m > n:
        return _checked(S, Verdict(Status.FORBIDDEN, NotWide(m, n), "not_wide"))

    fail = row_ppo_failure(S)
    if fail is not None:
        rows = (fail[1],) if fail[0] == "zero_row" else fail[1:]
        return _checked(S, Verdict(Status.FORBIDDEN, PpoFailure(tuple(rows)), "row_ppo"))

    if S.is_nowhere_zero and m <= cfg.rank1_guard:
        ob = rank1_obstruction(S, cfg.rank1_guard)
        if ob is not None:
            return _checked(S, Verdict(Status.FORBIDDEN, ob, "rank1_obstruction"))

    if m * (m - 1) <= n:
        cover = find_cover_greedy(S, min(cfg.greedy_r, n))
        if cover is not None:
            return _checked(S, Verdict(Status.ALLOWS, cover, "cover_greedy"))
        gm, gn = cfg.exact_cover_guard
        if m <= gm and n <= gn:
            try:
                cover = find_cover_exact(S, time.monotonic() + cfg.cover_deadline,
                                         cfg.exact_cover_guard)
            except SearchTimeout:
                log.info("exact cover search timed out on %dx%d", m, n)
                cover = None
            if cover is not None:
                return _checked(S, Verdict(Status.ALLOWS, cover, "cover_exact"))

    if cfg.use_certificate and S.is_nowhere_zero:
        A = find_certificate(S, cfg.search, rng)
        if A is not None:
            ev = CertificateEvidence(A, verify_certificate(A, cfg.search.bits))
            return _checked(S, Verdict(Status.ALLOWS, ev, "certificate"))

    return Verdict(Status.UNKNOWN, None, "exhausted")

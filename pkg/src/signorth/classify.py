"""Enumerate nowhere-zero patterns up to sign equivalence and find the ones
that minimally allow row orthogonality.

For nowhere-zero patterns single-column deletions suffice: if deleting a
set J of columns left a pattern that allows, its realization is nowhere zero
and so has the SIPP, and then deleting all but one column of J also allows.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .combinatorics import DecideConfig, Status, Verdict, decide_allows
from .pattern_core import SignPattern, canonical_form, column_ppo, row_ppo

log = logging.getLogger(__name__)

ENUM_GUARD = (5, 6)


def _column_vectors(m: int) -> list[tuple[int, ...]]:
    """The 2^(m-1) +-1 vectors with a + on top, in lexicographic order (+ first)."""
    return [(1,) + tail for tail in itertools.product((1, -1), repeat=m - 1)]


def _candidates(m: int, n: int, max_distinct: int | None = None):
    """Patterns with first row and column all +; columns 2..n as a sorted multiset."""
    vecs = _column_vectors(m)
    first = vecs[0]
    for rest in itertools.combinations_with_replacement(range(len(vecs)), n - 1):
        if max_distinct is not None and len(set(rest) | {0}) > max_distinct:
            continue
        cols = [first] + [vecs[c] for c in rest]
        yield SignPattern.from_rows([[c[i] for c in cols] for i in range(m)])


def _classes(candidates) -> list[SignPattern]:
    seen: dict[str, SignPattern] = {}
    for S in candidates:
        C = canonical_form(S)
        seen.setdefault(C.entry_string(), C)
    return [seen[k] for k in sorted(seen)]


def enumerate_classes(m: int, n: int) -> list[SignPattern]:
    """Canonical representatives of all nowhere-zero m x n sign-equivalence classes."""
    if m < 1 or n < 1:
        raise ValueError("dimensions must be positive")
    if m > ENUM_GUARD[0] or n > ENUM_GUARD[1]:
        raise ValueError(f"enumeration limited to {ENUM_GUARD[0]}x{ENUM_GUARD[1]}")
    return _classes(_candidates(m, n))


@dataclass
class ClassEntry:
    pattern: SignPattern
    verdict: Verdict
    minimal: bool
    deletions: list[str] = field(default_factory=list)  # provenance per deleted column

    def to_json(self) -> dict:
        return {"pattern": self.pattern.to_json(), "rows": str(self.pattern).split("\n"),
                "verdict": self.verdict.to_json(), "minimal": self.minimal,
                "deletions": self.deletions}


@dataclass
class ClassificationRun:
    m: int
    n_range: tuple[int, int]
    classes: list[ClassEntry]
    incomplete: bool
    restricted: bool
    seconds: float = 0.0

    def minimal_classes(self, n: int | None = None) -> list[SignPattern]:
        return [c.pattern for c in self.classes
                if c.minimal and (n is None or c.pattern.cols == n)]

    def to_json(self, all_classes: bool = False) -> dict:
        shown = self.classes if all_classes else [c for c in self.classes if c.minimal]
        counts: dict[str, int] = {}
        for c in self.classes:
            key = f"{self.m}x{c.pattern.cols}:{c.verdict.status.value}"
            counts[key] = counts.get(key, 0) + 1
        return {"m": self.m, "n_range": list(self.n_range), "incomplete": self.incomplete,
                "restricted": self.restricted, "verdict_counts": counts,
                "minimal_count": len(self.minimal_classes()),
                "classes": [c.to_json() for c in shown]}

    def table(self) -> str:
        """One block per column count with each minimal representative."""
        lines = [f"m = {self.m}" + ("  (INCOMPLETE)" if self.incomplete else "")]
        for n in range(self.n_range[0], self.n_range[1] + 1):
            reps = self.minimal_classes(n)
            lines.append(f"  n = {n}: {len(reps)} class(es)")
            for S in reps:
                for row in str(S).split("\n"):
                    lines.append("    " + row)
                lines.append("")
        return "\n".join(lines).rstrip() + "\n"


class _Decider:
    """decide_allows with a cache keyed by canonical form."""

    def __init__(self, cfg: DecideConfig, seed: int):
        self.cfg = cfg
        self.seed = seed
        self.cache: dict[str, Verdict] = {}

    def __call__(self, S: SignPattern) -> Verdict:
        key = canonical_form(S).entry_string() if S.rows <= S.cols else None
        if key is not None and key in self.cache:
            return self.cache[key]
        rng = np.random.default_rng([self.seed, S.rows, S.cols, len(self.cache)])
        v = decide_allows(S, self.cfg, rng)
        if key is not None:
            self.cache[key] = v
        return v


def _classify(m: int, pattern_lists: dict[int, list[SignPattern]],
              cfg: DecideConfig, seed: int) -> tuple[list[ClassEntry], bool]:
    decide = _Decider(cfg, seed)
    entries = []
    incomplete = False
    for n in sorted(pattern_lists):
        for S in pattern_lists[n]:
            v = decide(S)
            if v.status is Status.UNKNOWN:
                log.warning("Unknown verdict for %dx%d class %s", m, n, S.entry_string())
                incomplete = True
                entries.append(ClassEntry(S, v, False))
                continue
            if v.status is Status.FORBIDDEN:
                entries.append(ClassEntry(S, v, False))
                continue
            deletions, minimal = [], True
            for j in range(n):
                dv = decide(S.delete_column(j))
                deletions.append(f"{dv.status.value}:{dv.provenance}")
                if dv.status is Status.UNKNOWN:
                    incomplete = True
                    minimal = False
                elif dv.status is Status.ALLOWS:
                    minimal = False
            entries.append(ClassEntry(S, v, minimal, deletions))
    return entries, incomplete


def minimal_allows(m: int, max_n: int, cfg: DecideConfig | None = None,
                   seed: int = 0, full: bool = False) -> ClassificationRun:
    """Classify nowhere-zero m x n patterns for n = m..max_n.

    For m = 5 the default run is restricted: all 5x5 classes, and for n = 6
    only patterns with at most five distinct columns (the others contain a
    row and column PPO 5x5 subpattern, so are never minimal).  ``full=True``
    removes the restriction.  Unknown verdicts mark the run incomplete.
    """
    if not 1 <= m <= 5:
        raise ValueError("classification covers 1 <= m <= 5")
    if max_n < m:
        raise ValueError("max_n must be at least m")
    if max_n > ENUM_GUARD[1]:
        raise ValueError(f"enumeration limited to n <= {ENUM_GUARD[1]}")
    start = time.monotonic()
    cfg = cfg or DecideConfig()
    restricted = m == 5 and not full
    lists = {}
    for n in range(m, max_n + 1):
        if restricted and n > m:
            lists[n] = _classes(_candidates(m, n, max_distinct=m))
        else:
            lists[n] = enumerate_classes(m, n)
        log.info("%dx%d: %d classes", m, n, len(lists[n]))
    entries, incomplete = _classify(m, lists, cfg, seed)
    return ClassificationRun(m, (m, max_n), entries, incomplete, restricted,
                             time.monotonic() - start)


def square_ppo_prediction(S: SignPattern) -> bool:
    """For nowhere-zero m x m with m <= 5: allows iff row and column PPO."""
    if S.rows != S.cols or S.rows > 5 or not S.is_nowhere_zero:
        raise ValueError("criterion covers nowhere-zero square patterns of order <= 5")
    return row_ppo(S) and column_ppo(S)


def orbit_count_bruteforce(m: int, n: int) -> int:
    """Number of sign-equivalence classes of +-1 m x n patterns, by union-find
    over all 2^(mn) patterns with the generating moves.  Only for tiny sizes."""
    total = 1 << (m * n)
    parent = list(range(total))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def encode(A):
        return sum(1 << k for k, v in enumerate(A.ravel()) if v < 0)

    for code in range(total):
        A = np.array([-1 if code >> k & 1 else 1 for k in range(m * n)]).reshape(m, n)
        moves = [A[::-1] if m > 1 else A, A[:, ::-1] if n > 1 else A]
        if m > 1:
            moves.append(np.roll(A, 1, axis=0))
            moves.append(A[[1, 0] + list(range(2, m))])
        if n > 1:
            moves.append(np.roll(A, 1, axis=1))
            moves.append(A[:, [1, 0] + list(range(2, n))])
        B = A.copy(); B[0] *= -1; moves.append(B)
        C = A.copy(); C[:, 0] *= -1; moves.append(C)
        for M in moves:
            a, b = find(code), find(encode(M))
            if a != b:
                parent[a] = b
    return len({find(x) for x in range(total)})


def expected_class_count(m: int, n: int) -> int:
    return orbit_count_bruteforce(m, n) if m * n <= 16 else math.nan

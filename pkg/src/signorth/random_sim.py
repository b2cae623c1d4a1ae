"""Random sign patterns: mu_p sampling, cover Monte Carlo and closed-form bounds.

Every trial draws from its own Philox stream keyed by (seed, trial index), so
reports are reproducible and trials can be split across workers and merged.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from decimal import Decimal, localcontext
from fractions import Fraction

import numpy as np

from .certificate import verify_certificate
from .combinatorics import find_cover_exact, find_cover_greedy
from .exact_linalg import ExactMatrix
from .pattern_core import SignPattern

log = logging.getLogger(__name__)

Z95 = 1.959963984540054


@dataclass(frozen=True)
class MuP:
    """P(+1) = P(-1) = p, P(0) = 1 - 2p."""

    p: Fraction

    def __post_init__(self):
        p = Fraction(self.p)
        if not 0 < p <= Fraction(1, 2):
            raise ValueError(f"p must lie in (0, 1/2]; got {p}")
        object.__setattr__(self, "p", p)

    @property
    def probabilities(self) -> tuple[Fraction, Fraction, Fraction]:
        return self.p, self.p, 1 - 2 * self.p


def trial_rng(seed: int, trial: int = 0) -> np.random.Generator:
    """Philox4x64 generator keyed by (seed, trial)."""
    if seed < 0 or trial < 0:
        raise ValueError("seed and trial index must be nonnegative")
    key = (seed % 2**64) | (trial % 2**64) << 64
    return np.random.Generator(np.random.Philox(key=key))


def sample_array(m: int, n: int, mu: MuP, rng: np.random.Generator) -> np.ndarray:
    u = rng.random((m, n))
    p = float(mu.p)
    out = np.zeros((m, n), dtype=np.int8)
    out[u < p] = 1
    out[(u >= p) & (u < 2 * p)] = -1
    if mu.p == Fraction(1, 2):
        out[out == 0] = -1  # guard against 2*p rounding below 1
    return out


def sample_pattern(m: int, n: int, mu: MuP, seed: int, trial: int = 0) -> SignPattern:
    """An m x n pattern with i.i.d. mu_p entries, determined by (seed, trial)."""
    return SignPattern.from_array(sample_array(m, n, mu, trial_rng(seed, trial)))


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    if trials <= 0:
        raise ValueError("need at least one trial")
    phat = successes / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


def _exp_upper(x: Fraction, digits: int = 40) -> Fraction:
    """Rational upper bound on e^x."""
    with localcontext() as ctx:
        ctx.prec = digits
        val = (Decimal(x.numerator) / Decimal(x.denominator)).exp()
        ulp = Decimal(1).scaleb(val.adjusted() - digits + 2)
        return Fraction(val + ulp)


def cover_lower_bound(m: int, p, r: int) -> Fraction:
    """1 - m e^{-m/8} - (m/p)(1-p)^r, clamped to [0, 1].

    e^{-m/8} is rounded up, so the result is a valid lower bound.
    """
    p = MuP(p).p
    val = 1 - m * _exp_upper(Fraction(-m, 8)) - (m / p) * (1 - p) ** r
    return min(Fraction(1), max(Fraction(0), val))


def required_columns(m: int, p, r: int) -> int:
    """Smallest n with n >= m^2 + m r + 2m/p."""
    p = MuP(p).p
    return math.ceil(m * m + m * r + 2 * m / p)


@dataclass
class SimulationReport:
    m: int
    n: int
    p: Fraction
    r: int
    trials: int
    seed: int
    successes: int
    successes_exact: int | None
    empirical: float
    wilson_lo: float
    wilson_hi: float
    lower_bound: Fraction
    bound_applicable: bool
    first_trial: int = 0

    @property
    def half_width(self) -> float:
        return (self.wilson_hi - self.wilson_lo) / 2

    def merge(self, other: "SimulationReport") -> "SimulationReport":
        """Combine reports for consecutive trial blocks of one configuration."""
        same = (self.m, self.n, self.p, self.r, self.seed) == \
            (other.m, other.n, other.p, other.r, other.seed)
        if not same:
            raise ValueError("reports come from different configurations")
        a, b = sorted((self, other), key=lambda rep: rep.first_trial)
        if a.first_trial + a.trials != b.first_trial:
            raise ValueError("trial blocks are not contiguous")
        trials = a.trials + b.trials
        succ = a.successes + b.successes
        exact = None if a.successes_exact is None or b.successes_exact is None \
            else a.successes_exact + b.successes_exact
        lo, hi = wilson_interval(succ, trials)
        return SimulationReport(a.m, a.n, a.p, a.r, trials, a.seed, succ, exact,
                                succ / trials, lo, hi, a.lower_bound, a.bound_applicable,
                                a.first_trial)

    def to_json(self) -> dict:
        d = asdict(self)
        d["p"] = str(self.p)
        d["lower_bound"] = str(self.lower_bound)
        d["lower_bound_float"] = float(self.lower_bound)
        return d

    def csv_row(self) -> list:
        return [self.m, self.n, str(self.p), self.r, self.empirical,
                self.wilson_lo, self.wilson_hi, float(self.lower_bound)]


CSV_HEADER = ["m", "n", "p", "r", "empirical", "lo", "hi", "bound"]


def cover_probability(m: int, n: int, p, r: int, trials: int, seed: int,
                      exact_oracle: bool = False, relax: bool = False,
                      first_trial: int = 0) -> SimulationReport:
    """Fraction of mu_p samples on which the greedy finds a 4-cycle cover.

    The lower bound applies when r <= m and n >= m^2 + m r + 2m/p.  Other
    sizes need ``relax=True`` for n, and report ``bound_applicable=False``.
    """
    mu = MuP(p)
    if r < 0:
        raise ValueError("r must be nonnegative")
    if trials <= 0:
        raise ValueError("trials must be positive")
    enough = n >= m * m + m * r + 2 * m / mu.p
    if not enough and not relax:
        raise ValueError(f"n = {n} is below m^2 + m r + 2m/p = {required_columns(m, mu.p, r)}")
    applicable = enough and r <= m
    if not applicable:
        log.warning("cover lower bound does not apply to m=%d n=%d r=%d", m, n, r)
    succ = 0
    succ_exact = 0 if exact_oracle else None
    for t in range(first_trial, first_trial + trials):
        S = sample_pattern(m, n, mu, seed, t)
        found = find_cover_greedy(S, r) is not None
        succ += found
        if exact_oracle:
            succ_exact += found or find_cover_exact(S) is not None
    lo, hi = wilson_interval(succ, trials)
    return SimulationReport(m, n, mu.p, r, trials, seed, succ, succ_exact, succ / trials,
                            lo, hi, cover_lower_bound(m, mu.p, r), applicable, first_trial)


@dataclass(frozen=True)
class Thresholds:
    n_thm46: int
    n_thm42: int | None


def threshold_bounds(m: int, p, omega_factor: int = 4) -> Thresholds:
    """m^2 + m log_{1/(1-p)} m + omega_factor*m, and ceil(17 m^2 ln m) for p = 1/2."""
    mu = MuP(p)
    if m < 1:
        raise ValueError("m must be positive")
    n46 = m * m + m * math.log(m) / -math.log1p(-float(mu.p)) + omega_factor * m
    n42 = math.ceil(17 * m * m * math.log(m)) if mu.p == Fraction(1, 2) else None
    return Thresholds(math.ceil(n46 - 1e-9), n42)


def rank1_bound_sum(m: int) -> tuple[Fraction, float]:
    """sum_{k=1}^{m-1} C(m,k+1) C(m,m+1-k) 2^{-k(m-k)}, exactly and as a float."""
    if m < 2:
        raise ValueError("m must be at least 2")
    total = sum(Fraction(math.comb(m, k + 1) * math.comb(m, m + 1 - k), 2 ** (k * (m - k)))
                for k in range(1, m))
    return total, float(total)


def pm1_certificate_rate(m: int, n: int, trials: int, seed: int) -> float:
    """Fraction of uniform +-1 m x n samples that are themselves certificates.

    With +-1 entries delta = 1, so acceptance only needs pert_m(eps) < 1.
    """
    mu = MuP(Fraction(1, 2))
    ok = 0
    for t in range(trials):
        A = sample_array(m, n, mu, trial_rng(seed, t))
        ok += verify_certificate(ExactMatrix.from_rows(A.astype(int).tolist())).accepted
    return ok / trials

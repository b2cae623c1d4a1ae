"""Exact verification of approximate-orthogonality certificates.

A nowhere-zero matrix A certifies that sgn(A) allows row orthogonality when
its normalised rows are nearly orthogonal (coherence ``eps``) and the
Gram-Schmidt displacement bound ``pert_m(eps)`` is smaller than the
min/max entry ratio ``delta`` of every row.  All comparisons here are exact:
``eps`` is handled through ``eps**2`` plus a certified rational upper bound
on its square root.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import least_squares

from .exact_linalg import ExactMatrix, rational_sqrt_upper_bound
from .pattern_core import SignPattern, sgn_of

log = logging.getLogger(__name__)

DEFAULT_BITS = 64


class DomainError(ValueError):
    """eps outside [0, 1/(m-1))."""


def _check_domain(m: int, eps: Fraction) -> None:
    if m < 1:
        raise ValueError("m must be positive")
    if eps < 0:
        raise DomainError("eps must be nonnegative")
    if m >= 2 and eps * (m - 1) >= 1:
        raise DomainError(f"eps = {eps} is not below 1/(m-1) = 1/{m - 1}")


def pert_upper(m: int, eps_upper, bits: int = DEFAULT_BITS) -> Fraction:
    """Rational upper bound on pert_m(eps) from the closed form.

    pert_m(eps) = sqrt((1+eps) / ((1-(m-2)eps)(1-(m-1)eps))) - 1.
    """
    eps = Fraction(eps_upper)
    _check_domain(m, eps)
    if m == 1:
        return Fraction(0)
    radicand = (1 + eps) / ((1 - (m - 2) * eps) * (1 - (m - 1) * eps))
    return rational_sqrt_upper_bound(radicand, bits) - 1


def pert_recursive(m: int, eps_upper, bits: int = DEFAULT_BITS) -> Fraction:
    """Upper bound on pert_m(eps) through the one-step-smaller recursion.

    pert_m(eps) = sqrt((1+eps)/(1-eps)) * (pert_{m-1}(eps/(1-eps)) + 1) - 1
    """
    eps = Fraction(eps_upper)
    _check_domain(m, eps)
    if m == 1:
        return Fraction(0)
    inner = pert_recursive(m - 1, eps / (1 - eps), bits)
    return rational_sqrt_upper_bound((1 + eps) / (1 - eps), bits) * (inner + 1) - 1


def delta_of(x) -> Fraction:
    """min|x_i| / max|x_j|; 0 when some entry vanishes."""
    vals = [abs(Fraction(v)) for v in x]
    top = max(vals, default=Fraction(0))
    if top == 0:
        raise ValueError("delta is undefined for the zero vector")
    return min(vals) / top


def epsilon_sq(A: ExactMatrix) -> tuple[Fraction, tuple[int, int] | None]:
    """Largest squared cosine between two rows, with an achieving pair (0-based).

    Returns ``(0, None)`` for a single row.
    """
    rows = [A.row(i) for i in range(A.rows)]
    norms = [sum(Fraction(x) * x for x in r) for r in rows]
    if any(nrm == 0 for nrm in norms):
        raise ValueError("matrix has a zero row")
    best, pair = Fraction(0), None
    for i, k in itertools.combinations(range(A.rows), 2):
        ip = sum(Fraction(a) * b for a, b in zip(rows[i], rows[k]))
        val = ip * ip / (norms[i] * norms[k])
        if pair is None or val > best:
            best, pair = val, (i, k)
    return best, pair


@dataclass(frozen=True)
class PertBound:
    m: int
    epsilon_sq: Fraction
    epsilon_upper: Fraction
    pert_upper: Fraction | None  # None when eps_upper is outside the domain


@dataclass(frozen=True)
class CertificateReport:
    accepted: bool
    delta: Fraction
    bound: PertBound
    witness_rows: tuple[int, int] | None
    delta_row: int
    reason: str = ""

    @property
    def verdict(self) -> str:
        return "Accept" if self.accepted else "Reject"

    def to_json(self) -> dict:
        f = lambda q: None if q is None else f"{q.numerator}/{q.denominator}"
        return {
            "verdict": self.verdict,
            "delta": f(self.delta),
            "delta_row": self.delta_row + 1,
            "epsilon_sq": f(self.bound.epsilon_sq),
            "epsilon_upper": f(self.bound.epsilon_upper),
            "pert_upper": f(self.bound.pert_upper),
            "epsilon_rows": None if self.witness_rows is None
            else [self.witness_rows[0] + 1, self.witness_rows[1] + 1],
            "reason": self.reason,
        }


def verify_certificate(A: ExactMatrix, bits: int = DEFAULT_BITS) -> CertificateReport:
    """Decide whether A certifies a row orthogonal matrix with pattern sgn(A).

    Accept is a proof; Reject only means this A is not good enough.
    """
    if not A.is_rational:
        raise ValueError("certificates must be rational matrices")
    m, n = A.shape
    if m > n:
        raise ValueError(f"a {m}x{n} matrix cannot have orthogonal nonzero rows")
    if any(x == 0 for x in A.entries):
        raise ValueError("certificate has a zero entry; signs of zeros are not preserved")
    deltas = [delta_of(A.row(i)) for i in range(m)]
    delta = min(deltas)
    delta_row = deltas.index(delta)
    eps2, pair = epsilon_sq(A)
    eps_up = rational_sqrt_upper_bound(eps2, bits)
    if m >= 2 and eps_up * (m - 1) >= 1:
        bound = PertBound(m, eps2, eps_up, None)
        return CertificateReport(False, delta, bound, pair, delta_row,
                                 "eps is not below 1/(m-1)")
    pu = pert_upper(m, eps_up, bits)
    bound = PertBound(m, eps2, eps_up, pu)
    if pu < delta:
        return CertificateReport(True, delta, bound, pair, delta_row, "pert_m(eps) < delta")
    return CertificateReport(False, delta, bound, pair, delta_row, "pert_m(eps) >= delta")


def orthogonalize(X: np.ndarray) -> np.ndarray:
    """Orthogonal rows near X via the reordered modified Gram-Schmidt.

    Rows are normalised, the row of smallest infinity norm is kept, the rest
    are projected off it, and the procedure recurses.  Row i of the output
    has the 2-norm of row i of the input.
    """
    X = np.array(X, dtype=float)
    norms = np.linalg.norm(X, axis=1)
    U = X / norms[:, None]
    out = np.empty_like(U)
    remaining = list(range(len(U)))
    while remaining:
        # the inductive step keeps the vector of least infinity norm
        last = min(remaining, key=lambda i: np.abs(U[i]).max())
        remaining.remove(last)
        out[last] = U[last]
        for i in remaining:
            U[i] = U[i] - (U[i] @ U[last]) * U[last]
            U[i] /= np.linalg.norm(U[i])
    return out * norms[:, None]


@dataclass
class SearchConfig:
    """Knobs for :func:`find_certificate`."""

    scale: int = 600
    max_doublings: int = 4
    max_iters: int = 24
    entry_ratios: tuple[float, ...] = (64.0, 16.0, 256.0, 1024.0, 4.0)
    tol: float = 1e-11
    bits: int = DEFAULT_BITS
    seed: int = 0
    extra: dict = field(default_factory=dict)


def _float_realization(S: SignPattern, rng: np.random.Generator, ratio: float,
                       tol: float) -> np.ndarray | None:
    """Nearly row-orthogonal realization of S with |entries| in [1, ratio].

    Entries are ``s_ij * u_ij`` with box-constrained magnitudes ``u``; the
    lower bound keeps every entry away from zero, so rows cannot collapse and
    the raw inner products can serve as residuals.
    """
    m, n = S.shape
    signs = S.to_array().astype(float)
    iu, ku = np.triu_indices(m, 1)
    npairs = len(iu)
    rows_of = np.arange(npairs)

    def residual(u):
        Q = signs * u.reshape(m, n)
        return np.einsum("pj,pj->p", Q[iu], Q[ku]) / n

    def jac(u):
        Q = signs * u.reshape(m, n)
        J = np.zeros((npairs, m, n))
        J[rows_of, iu, :] = signs[iu] * Q[ku] / n
        J[rows_of, ku, :] = signs[ku] * Q[iu] / n
        return J.reshape(npairs, m * n)

    x0 = np.exp(rng.uniform(0.0, np.log(ratio), size=m * n))
    res = least_squares(residual, x0, jac=jac, bounds=(1.0, ratio), method="trf",
                        xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=100 * m)
    Q = signs * res.x.reshape(m, n)
    N = Q / np.linalg.norm(Q, axis=1)[:, None]
    coherence = np.max(np.abs((N @ N.T)[iu, ku]), initial=0.0)
    if coherence > tol:
        return None
    polished = orthogonalize(Q)
    if np.array_equal(np.sign(polished), signs):
        return polished
    return Q


def round_to_integers(Q: np.ndarray, scale: int) -> ExactMatrix:
    """Scale so the largest |entry| is ``scale`` and round half away from zero."""
    Qs = Q * (scale / np.abs(Q).max())
    ints = np.where(Qs >= 0, np.floor(Qs + 0.5), -np.floor(-Qs + 0.5)).astype(np.int64)
    return ExactMatrix.from_rows(ints.tolist())


def find_certificate(S: SignPattern, cfg: SearchConfig | None = None,
                     rng: np.random.Generator | None = None) -> ExactMatrix | None:
    """Randomised search for an integer certificate with sign pattern S.

    Floats only steer the search; every returned matrix has passed
    :func:`verify_certificate` and has sign pattern exactly S.  ``None`` says
    nothing about realizability.
    """
    cfg = cfg or SearchConfig()
    if not S.is_wide:
        raise ValueError("pattern must be wide")
    if not S.is_nowhere_zero:
        raise ValueError("certificate search needs a nowhere-zero pattern")
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    attempts = 0
    for ratio in cfg.entry_ratios:
        for _ in range(max(1, cfg.max_iters // len(cfg.entry_ratios))):
            attempts += 1
            Q = _float_realization(S, rng, ratio, cfg.tol)
            if Q is None:
                continue
            scale = cfg.scale
            for _ in range(cfg.max_doublings + 1):
                A = round_to_integers(Q, scale)
                if sgn_of(A) == S and verify_certificate(A, cfg.bits).accepted:
                    log.debug("certificate for %dx%d after %d attempts, scale %d",
                              S.rows, S.cols, attempts, scale)
                    return A
                scale *= 2
    return None

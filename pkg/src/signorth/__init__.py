"""Sign patterns that allow row orthogonality: exact certificates, the SIPP,
combinatorial covers and obstructions, random patterns, and small-case
classification."""

from .certificate import (CertificateReport, SearchConfig, find_certificate, pert_recursive,
                          pert_upper, verify_certificate)
from .combinatorics import (DecideConfig, FourCycleCover, Rank1Obstruction, Status, Verdict,
                            decide_allows, find_cover_exact, find_cover_greedy,
                            rank1_obstruction)
from .exact_linalg import ExactMatrix, QSqrt2, nullspace_exact, rank_exact
from .pattern_core import (SignPattern, SignedPermEquivalence, ZnzPattern, canonical_form,
                           parse_pattern, sgn_of)
from .sipp_analysis import (SippVerdict, sipp_check_exact, sipp_check_float,
                            structural_requires_osipp, zero_count_bound_ok)

__version__ = "0.1.0"

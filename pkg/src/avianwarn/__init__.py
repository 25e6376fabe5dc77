"""avianwarn: evidential early-warning toolkit for poultry disease.

Fuses symptom observations into a ranked diagnosis with Dempster-Shafer
theory, attaches consultations to hierarchical administrative regions, and
aggregates them into per-region warning levels served over HTTP.
"""

from avianwarn.evidence import (
    CombinationOutcome,
    EvidenceError,
    Frame,
    FrameMismatchError,
    HypothesisSet,
    MassFunction,
    TotalConflictError,
    belief,
    combine,
    combine_all,
    make_frame,
    plausibility,
    rank,
    simple_support,
)

__version__ = "0.1.0"

__all__ = [
    "CombinationOutcome",
    "EvidenceError",
    "Frame",
    "FrameMismatchError",
    "HypothesisSet",
    "MassFunction",
    "TotalConflictError",
    "belief",
    "combine",
    "combine_all",
    "make_frame",
    "plausibility",
    "rank",
    "simple_support",
    "__version__",
]

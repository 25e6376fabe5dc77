"""Dempster-Shafer evidence algebra over finite frames of discernment.

A ``Frame`` fixes an ordered set of hypothesis labels (at most 30, so any
subset fits in a machine-word bitmask).  ``HypothesisSet`` is an immutable
subset of one frame, ``MassFunction`` a basic probability assignment over
such subsets, and ``combine`` implements Dempster's rule of combination
with explicit conflict reporting.

All values are immutable after construction and every operation is a pure
function, so they can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence, Union

#: Absolute tolerance for "masses sum to one".
SUM_TOLERANCE = 1e-9
#: Masses below this are treated as zero and pruned.
PRUNE_EPSILON = 1e-12
#: Conflict at or above 1 - this threshold counts as total conflict.
TOTAL_CONFLICT_EPSILON = 1e-12

#: Maximum frame size; keeps subsets representable as a word-sized bitmask
#: and the powerset small enough to enumerate exhaustively.
MAX_FRAME_SIZE = 30

#: Reserved label appended when a frame carries an implicit catch-all
#: hypothesis beyond the explicitly listed ones.
OTHER_LABEL = "OTHER"


class EvidenceError(ValueError):
    """Base class for all evidence-algebra errors."""


class FrameMismatchError(EvidenceError):
    """Two values from different frames were used in one operation."""


class TotalConflictError(EvidenceError):
    """Dempster combination failed because the sources fully contradict.

    ``conflict`` carries the offending K value; ``step`` is set when the
    failure occurred inside a multi-source fold (0-based index of the mass
    function whose combination failed).
    """

    def __init__(self, conflict: float, step: int | None = None):
        self.conflict = conflict
        self.step = step
        where = "" if step is None else f" at step {step}"
        super().__init__(
            f"total conflict{where}: K={conflict!r} leaves no mass to renormalize"
        )


class Frame:
    """An ordered frame of discernment.

    Labels are unique non-empty strings; their order is fixed for the
    frame's lifetime and defines the bit positions used by every
    ``HypothesisSet`` built on the frame.  Frames compare by value, so two
    frames built from the same labels are interchangeable.
    """

    __slots__ = ("_labels", "_index", "_includes_other")

    def __init__(self, labels: Iterable[str], include_other: bool = False):
        cleaned = []
        for raw in labels:
            label = raw.strip()
            if not label:
                raise EvidenceError("frame labels must be non-empty strings")
            cleaned.append(label)
        if include_other:
            cleaned.append(OTHER_LABEL)
        if not cleaned:
            raise EvidenceError("a frame needs at least one hypothesis label")
        if len(cleaned) > MAX_FRAME_SIZE:
            raise EvidenceError(
                f"frame has {len(cleaned)} labels; at most {MAX_FRAME_SIZE} are supported"
            )
        index: dict[str, int] = {}
        for i, label in enumerate(cleaned):
            if label in index:
                raise EvidenceError(f"duplicate frame label: {label!r}")
            index[label] = i
        self._labels = tuple(cleaned)
        self._index = index
        self._includes_other = include_other

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    @property
    def includes_other(self) -> bool:
        return self._includes_other

    def __len__(self) -> int:
        return len(self._labels)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return self._labels == other._labels and self._includes_other == other._includes_other

    def __hash__(self) -> int:
        return hash((self._labels, self._includes_other))

    def __repr__(self) -> str:
        return f"Frame({list(self._labels)!r})"

    def index_of(self, label: str) -> int:
        """Bit position of `label`; raises EvidenceError for unknown labels."""
        try:
            return self._index[label]
        except KeyError:
            raise EvidenceError(f"label {label!r} is not in the frame") from None

    def subset(self, labels: Iterable[str]) -> HypothesisSet:
        """The hypothesis set holding exactly `labels`."""
        mask = 0
        for label in labels:
            mask |= 1 << self.index_of(label)
        return HypothesisSet(self, mask)

    def singleton(self, label: str) -> HypothesisSet:
        return HypothesisSet(self, 1 << self.index_of(label))

    def empty_set(self) -> HypothesisSet:
        return HypothesisSet(self, 0)

    def full_set(self) -> HypothesisSet:
        """The whole frame as a set (the theta of the algebra)."""
        return HypothesisSet(self, (1 << len(self._labels)) - 1)


class HypothesisSet:
    """An immutable subset of one frame, stored as a bitmask.

    Set operations are only defined between sets of the same frame;
    anything else raises ``FrameMismatchError``.
    """

    __slots__ = ("_frame", "_mask")

    def __init__(self, frame: Frame, mask: int):
        if not 0 <= mask < (1 << len(frame)):
            raise EvidenceError(f"bitmask {mask:#x} does not fit frame of size {len(frame)}")
        self._frame = frame
        self._mask = mask

    @property
    def frame(self) -> Frame:
        return self._frame

    @property
    def mask(self) -> int:
        return self._mask

    @property
    def labels(self) -> tuple[str, ...]:
        """Member labels in frame order."""
        return tuple(
            label for i, label in enumerate(self._frame.labels) if self._mask >> i & 1
        )

    def _check(self, other: HypothesisSet) -> None:
        if not isinstance(other, HypothesisSet):
            raise TypeError(f"expected HypothesisSet, got {type(other).__name__}")
        if other._frame != self._frame:
            raise FrameMismatchError("hypothesis sets belong to different frames")

    def __and__(self, other: HypothesisSet) -> HypothesisSet:
        self._check(other)
        return HypothesisSet(self._frame, self._mask & other._mask)

    def __or__(self, other: HypothesisSet) -> HypothesisSet:
        self._check(other)
        return HypothesisSet(self._frame, self._mask | other._mask)

    def complement(self) -> HypothesisSet:
        full = (1 << len(self._frame)) - 1
        return HypothesisSet(self._frame, full & ~self._mask)

    def issubset(self, other: HypothesisSet) -> bool:
        self._check(other)
        return self._mask & ~other._mask == 0

    def intersects(self, other: HypothesisSet) -> bool:
        self._check(other)
        return self._mask & other._mask != 0

    def is_full(self) -> bool:
        return self._mask == (1 << len(self._frame)) - 1

    def __contains__(self, label: str) -> bool:
        return self._mask >> self._frame.index_of(label) & 1 == 1

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def __len__(self) -> int:
        return bin(self._mask).count("1")

    def __bool__(self) -> bool:
        return self._mask != 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HypothesisSet):
            return NotImplemented
        return self._frame == other._frame and self._mask == other._mask

    def __hash__(self) -> int:
        return hash((self._frame, self._mask))

    def __repr__(self) -> str:
        inner = "Θ" if self.is_full() else "{" + ", ".join(self.labels) + "}"
        return f"<HypothesisSet {inner}>"

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        """Deterministic ordering: smaller cardinality first, then frame order."""
        indices = tuple(i for i in range(len(self._frame)) if self._mask >> i & 1)
        return (len(indices), indices)


#: Anything accepted where a hypothesis set is expected.
SetLike = Union[HypothesisSet, Iterable[str]]


class MassFunction(Mapping):
    """A basic probability assignment: focal subsets of one frame mapped to mass.

    Invariants checked on construction: the empty set carries no mass, every
    stored mass lies in (0, 1] after pruning values below ``PRUNE_EPSILON``,
    and the masses sum to one within ``SUM_TOLERANCE``.
    """

    __slots__ = ("_frame", "_masses")

    def __init__(self, frame: Frame, masses: Mapping[SetLike, float]):
        stored: dict[int, float] = {}
        for key, value in masses.items():
            hset = _as_set(frame, key)
            if not hset:
                raise EvidenceError("the empty set cannot be a focal element")
            if value < 0.0:
                raise EvidenceError(f"negative mass {value!r} for {hset!r}")
            if value < PRUNE_EPSILON:
                continue
            if value > 1.0 + SUM_TOLERANCE:
                raise EvidenceError(f"mass {value!r} for {hset!r} exceeds 1")
            if hset.mask in stored:
                raise EvidenceError(f"duplicate focal element {hset!r}")
            stored[hset.mask] = value
        total = math.fsum(stored.values())
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise EvidenceError(f"masses sum to {total!r}, expected 1 within {SUM_TOLERANCE}")
        self._frame = frame
        self._masses = stored

    @classmethod
    def vacuous(cls, frame: Frame) -> MassFunction:
        """Total ignorance: all mass on the full frame."""
        return cls(frame, {frame.full_set(): 1.0})

    @property
    def frame(self) -> Frame:
        return self._frame

    def focal_sets(self) -> list[HypothesisSet]:
        return [HypothesisSet(self._frame, mask) for mask in self._masses]

    def mass(self, hypothesis: SetLike) -> float:
        """Mass of `hypothesis`, 0.0 when it is not focal."""
        return self._masses.get(_as_set(self._frame, hypothesis).mask, 0.0)

    def belief(self, hypothesis: SetLike) -> float:
        return belief(self, _as_set(self._frame, hypothesis))

    def plausibility(self, hypothesis: SetLike) -> float:
        return plausibility(self, _as_set(self._frame, hypothesis))

    def rank(self) -> list[tuple[HypothesisSet, float]]:
        return rank(self)

    def allclose(self, other: MassFunction, tolerance: float = SUM_TOLERANCE) -> bool:
        """True when both assignments agree within `tolerance` per focal set."""
        if other._frame != self._frame:
            raise FrameMismatchError("mass functions belong to different frames")
        masks = set(self._masses) | set(other._masses)
        return all(
            abs(self._masses.get(m, 0.0) - other._masses.get(m, 0.0)) <= tolerance
            for m in masks
        )

    # Mapping interface: keys are HypothesisSet values.
    def __getitem__(self, hypothesis: SetLike) -> float:
        hset = _as_set(self._frame, hypothesis)
        try:
            return self._masses[hset.mask]
        except KeyError:
            raise KeyError(hset) from None

    def __iter__(self) -> Iterator[HypothesisSet]:
        return iter(self.focal_sets())

    def __len__(self) -> int:
        return len(self._masses)

    def __repr__(self) -> str:
        parts = ", ".join(
            f"{hset!r}: {value:.6g}" for hset, value in sorted(
                self.items(), key=lambda kv: (-kv[1], kv[0].sort_key())
            )
        )
        return f"<MassFunction {parts}>"


@dataclass(frozen=True)
class CombinationOutcome:
    """Result of one Dempster combination plus the conflict it absorbed."""

    result: MassFunction
    conflict: float


def _as_set(frame: Frame, value: SetLike) -> HypothesisSet:
    if isinstance(value, HypothesisSet):
        if value.frame != frame:
            raise FrameMismatchError("hypothesis set belongs to a different frame")
        return value
    return frame.subset(value)


def make_frame(labels: Sequence[str], include_other: bool = False) -> Frame:
    """Build a frame from `labels`, optionally appending the catch-all hypothesis.

    With `include_other` the explicit labels may number at most
    ``MAX_FRAME_SIZE - 1`` so the appended catch-all still fits.
    """
    return Frame(labels, include_other=include_other)


def simple_support(frame: Frame, focal: SetLike, bpa: float) -> MassFunction:
    """Mass split between one focal set and the full frame.

    `bpa` goes to `focal`; the remainder 1 - `bpa` expresses ignorance and
    stays on the full frame (omitted when `bpa` is exactly 1).
    """
    if not 0.0 < bpa <= 1.0:
        raise EvidenceError(f"bpa must lie in (0, 1], got {bpa!r}")
    hset = _as_set(frame, focal)
    if not hset:
        raise EvidenceError("simple support needs a non-empty focal set")
    masses: dict[HypothesisSet, float] = {hset: bpa}
    if bpa < 1.0:
        masses[frame.full_set()] = 1.0 - bpa
    return MassFunction(frame, masses)


def combine(m1: MassFunction, m2: MassFunction) -> CombinationOutcome:
    """Dempster's rule of combination for two independent sources.

    The conflict K collects the products of focal pairs with empty
    intersection; every surviving intersection is renormalized by 1 - K.
    Raises ``TotalConflictError`` when K reaches 1 within
    ``TOTAL_CONFLICT_EPSILON`` (fully contradictory sources).
    """
    if m1.frame != m2.frame:
        raise FrameMismatchError("cannot combine mass functions over different frames")
    frame = m1.frame
    products: dict[int, list[float]] = {}
    conflict_products: list[float] = []
    for b_mask, b_value in m1._masses.items():
        for c_mask, c_value in m2._masses.items():
            a_mask = b_mask & c_mask
            p = b_value * c_value
            if a_mask:
                products.setdefault(a_mask, []).append(p)
            else:
                conflict_products.append(p)
    conflict = math.fsum(conflict_products)
    # an empty survivor set can only happen when pruning collapsed the
    # ignorance remainders, i.e. the sources are effectively categorical
    if conflict >= 1.0 - TOTAL_CONFLICT_EPSILON or not products:
        raise TotalConflictError(conflict)
    scale = 1.0 - conflict
    combined = {
        HypothesisSet(frame, mask): math.fsum(values) / scale
        for mask, values in products.items()
    }
    return CombinationOutcome(MassFunction(frame, combined), conflict)


def combine_all(masses: Sequence[MassFunction]) -> tuple[MassFunction, list[float]]:
    """Left fold of `combine` over `masses`, recording each step's conflict.

    A single input is returned unchanged with an empty trace.  On total
    conflict the raised error carries the 0-based index of the input whose
    combination failed.
    """
    if not masses:
        raise EvidenceError("combine_all needs at least one mass function")
    result = masses[0]
    trace: list[float] = []
    for step, m in enumerate(masses[1:], start=1):
        try:
            outcome = combine(result, m)
        except TotalConflictError as err:
            raise TotalConflictError(err.conflict, step=step) from None
        result = outcome.result
        trace.append(outcome.conflict)
    return result, trace


def belief(m: MassFunction, hypothesis: SetLike) -> float:
    """Bel(A): total mass of focal sets contained in A (lower bound on support)."""
    hset = _as_set(m.frame, hypothesis)
    if not hset:
        return 0.0
    return math.fsum(
        value for mask, value in m._masses.items() if mask & ~hset.mask == 0
    )


def plausibility(m: MassFunction, hypothesis: SetLike) -> float:
    """Pl(A): total mass of focal sets intersecting A (upper bound on support)."""
    hset = _as_set(m.frame, hypothesis)
    if not hset:
        return 0.0
    return math.fsum(value for mask, value in m._masses.items() if mask & hset.mask)


def rank(m: MassFunction) -> list[tuple[HypothesisSet, float]]:
    """Focal sets by descending mass; ties go to the smaller set, then frame order."""
    return sorted(m.items(), key=lambda kv: (-kv[1], kv[0].sort_key()))

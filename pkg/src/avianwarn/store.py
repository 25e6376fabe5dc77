"""Append-only consultation log and per-region warning aggregation.

Reports persist as one JSON document per line behind a schema-version
header, so the log stays diffable and dependency-free.  Appends funnel
through a single lock; queries and aggregation read immutable snapshots.

Warning policy (none < watch < warning): a report raises *warning* for its
region chain when the fused evidence commits at least ``warning_mass``
directly to the target disease as the top-ranked outcome; it raises
*watch* when the target disease is still among the most plausible
explanations without meeting that bar.  Thresholds are configuration, not
constants, so domain experts can retune them.
"""

from __future__ import annotations

import enum
import json
import re
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Callable, Iterable, Optional

from avianwarn.evidence import OTHER_LABEL
from avianwarn.geo import RegionCode, RegionRegistry

LOG_FORMAT = "avianwarn-report-log"
LOG_VERSION = 1

#: Region levels a consultation may be filed against.
REPORTABLE_LEVELS = (3, 4)  # district, village


class StoreError(Exception):
    """Base class for report-store failures."""


class WarningLevel(str, enum.Enum):
    NONE = "none"
    WATCH = "watch"
    WARNING = "warning"

    @property
    def severity(self) -> int:
        return ("none", "watch", "warning").index(self.value)


@dataclass(frozen=True)
class WarningPolicy:
    """Thresholds turning stored reports into warning levels."""

    disease_id: str = "AI"
    warning_mass: float = 0.5


@dataclass(frozen=True)
class ConsultationReport:
    """One persisted consultation outcome.

    ``ranked`` is the full focal-set summary of the diagnosis, enough to
    recompute per-disease belief and plausibility without the rule set.
    ``id`` is assigned by the store on append.
    """

    timestamp: datetime
    region: str
    symptom_ids: tuple[str, ...]
    top_focal: tuple[str, ...]
    top_mass: float
    ranked: tuple[tuple[tuple[str, ...], float], ...]
    id: Optional[int] = None

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "timestamp": self.timestamp.isoformat(),
            "region": self.region,
            "symptom_ids": list(self.symptom_ids),
            "top_focal": list(self.top_focal),
            "top_mass": self.top_mass,
            "ranked": [{"focal": list(labels), "mass": mass} for labels, mass in self.ranked],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "ConsultationReport":
        return cls(
            id=doc["id"],
            timestamp=datetime.fromisoformat(doc["timestamp"]),
            region=doc["region"],
            symptom_ids=tuple(doc["symptom_ids"]),
            top_focal=tuple(doc["top_focal"]),
            top_mass=doc["top_mass"],
            ranked=tuple((tuple(e["focal"]), e["mass"]) for e in doc["ranked"]),
        )

    def plausibility_of(self, disease_id: str) -> float:
        """Pl({disease}) recomputed from the stored ranked summary."""
        return sum(mass for labels, mass in self.ranked if disease_id in labels)

    def plausibility_leaders(self) -> tuple[str, ...]:
        """Diseases with maximal plausibility (catch-all label excluded)."""
        diseases = sorted(
            {d for labels, _ in self.ranked for d in labels if d != OTHER_LABEL}
        )
        if not diseases:
            return ()
        scored = [(d, self.plausibility_of(d)) for d in diseases]
        best = max(pl for _, pl in scored)
        return tuple(d for d, pl in scored if pl == best)

    def warning_level(self, policy: WarningPolicy) -> WarningLevel:
        if (
            self.top_focal == (policy.disease_id,)
            and self.top_mass >= policy.warning_mass
        ):
            return WarningLevel.WARNING
        if policy.disease_id in self.plausibility_leaders():
            return WarningLevel.WATCH
        return WarningLevel.NONE


@dataclass(frozen=True)
class WarningStatus:
    """Aggregated alert state of one region over a time window."""

    region: str
    level: WarningLevel
    report_count: int
    window_from: datetime
    window_to: datetime

    def to_json_dict(self) -> dict:
        return {
            "region": self.region,
            "level": self.level.value,
            "report_count": self.report_count,
            "window_from": self.window_from.isoformat(),
            "window_to": self.window_to.isoformat(),
        }


class ReportStore:
    """Durable append-only store of consultation reports.

    Single-writer, multi-reader: appends serialize through one lock and
    each append fsyncs the log; readers work off an immutable snapshot
    tuple that is swapped atomically.
    """

    def __init__(
        self,
        path: str | Path,
        region_resolver: Optional[Callable[[str], bool]] = None,
    ):
        self._path = Path(path)
        self._resolver = region_resolver
        self._lock = threading.Lock()
        self._reports: tuple[ConsultationReport, ...] = ()
        self._load()

    @classmethod
    def with_registry(cls, path: str | Path, registry: RegionRegistry) -> "ReportStore":
        return cls(path, region_resolver=registry.contains)

    @property
    def path(self) -> Path:
        return self._path

    def _load(self) -> None:
        if not self._path.exists():
            self._path.parent.mkdir(parents=True, exist_ok=True)
            with open(self._path, "w", encoding="utf-8") as fh:
                fh.write(json.dumps({"format": LOG_FORMAT, "version": LOG_VERSION}) + "\n")
            return
        with open(self._path, "r", encoding="utf-8") as fh:
            lines = [line for line in fh.read().splitlines() if line.strip()]
        if not lines:
            raise StoreError(f"{self._path}: missing log header")
        header = json.loads(lines[0])
        if header.get("format") != LOG_FORMAT or header.get("version") != LOG_VERSION:
            raise StoreError(f"{self._path}: unsupported log header {header!r}")
        self._reports = tuple(ConsultationReport.from_json_dict(json.loads(l)) for l in lines[1:])

    def __len__(self) -> int:
        return len(self._reports)

    def append(self, report: ConsultationReport) -> int:
        """Persist `report`, assigning the next id; returns the id."""
        code = RegionCode.parse(report.region)
        if code.level not in REPORTABLE_LEVELS:
            raise StoreError(
                f"consultations attach to district or village regions, got level "
                f"{code.level} code {report.region!r}"
            )
        if self._resolver is not None and not self._resolver(report.region):
            raise StoreError(f"region {report.region!r} is not in the registry")
        if not 0.0 < report.top_mass <= 1.0:
            raise StoreError(f"top mass {report.top_mass!r} outside (0, 1]")
        if report.timestamp.tzinfo is None:
            raise StoreError("report timestamps must be timezone-aware (UTC)")
        with self._lock:
            next_id = (self._reports[-1].id + 1) if self._reports else 1
            stored = replace(report, id=next_id)
            line = json.dumps(stored.to_json_dict())
            with open(self._path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
            self._reports = self._reports + (stored,)
        return next_id

    def get(self, report_id: int) -> ConsultationReport:
        for report in self._reports:
            if report.id == report_id:
                return report
        raise StoreError(f"no report with id {report_id}")

    def query(
        self,
        region_prefix: Optional[str] = None,
        since: Optional[datetime] = None,
        until: Optional[datetime] = None,
        disease: Optional[str] = None,
    ) -> list[ConsultationReport]:
        """Reports matching every given filter, newest first."""
        prefix = RegionCode.parse(region_prefix) if region_prefix is not None else None
        out = []
        for report in self._reports:
            if prefix is not None and not prefix.covers(RegionCode.parse(report.region)):
                continue
            if since is not None and report.timestamp < since:
                continue
            if until is not None and report.timestamp > until:
                continue
            if disease is not None and report.top_focal != (disease,):
                continue
            out.append(report)
        out.sort(key=lambda r: (r.timestamp, r.id), reverse=True)
        return out

    def warning_levels(
        self,
        window: timedelta,
        as_of: datetime,
        registry: RegionRegistry,
        policy: WarningPolicy = WarningPolicy(),
    ) -> list[WarningStatus]:
        """Warning status for every registered region at every level.

        A region's level is the maximum level contributed by any in-window
        report filed at or below it, so a child's warning always lifts its
        ancestors to at least watch.
        """
        if window <= timedelta(0):
            raise StoreError(f"warning window must be positive, got {window!r}")
        window_from = as_of - window
        in_window = [
            (RegionCode.parse(r.region), r.warning_level(policy))
            for r in self._reports
            if window_from <= r.timestamp <= as_of
        ]
        statuses = []
        for record in registry:
            level = WarningLevel.NONE
            count = 0
            for code, report_level in in_window:
                if not record.code.covers(code):
                    continue
                count += 1
                if report_level.severity > level.severity:
                    level = report_level
            statuses.append(
                WarningStatus(
                    region=str(record.code),
                    level=level,
                    report_count=count,
                    window_from=window_from,
                    window_to=as_of,
                )
            )
        return statuses


_DURATION_RE = re.compile(
    r"^P(?:(?P<weeks>\d+)W)?(?:(?P<days>\d+)D)?"
    r"(?:T(?:(?P<hours>\d+)H)?(?:(?P<minutes>\d+)M)?(?:(?P<seconds>\d+)S)?)?$"
)


def parse_iso_duration(text: str) -> timedelta:
    """Parse an ISO-8601 duration like ``P7D`` or ``PT12H`` into a timedelta.

    Calendar units (years, months) are rejected: warning windows need an
    exact length.
    """
    match = _DURATION_RE.match(text.strip()) if isinstance(text, str) else None
    if not match or not any(match.groupdict().values()):
        raise ValueError(f"not an ISO-8601 duration: {text!r}")
    parts = {k: int(v) for k, v in match.groupdict().items() if v}
    return timedelta(**parts)


def utc_now() -> datetime:
    return datetime.now(timezone.utc)

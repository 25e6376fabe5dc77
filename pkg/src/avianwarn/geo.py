"""Hierarchical administrative-region registry with attached geometry.

Regions are keyed by dotted numeric codes whose segment count encodes the
level: ``18`` (province), ``18.01`` (regency), ``18.01.03`` (district),
``18.01.03.2001`` (village).  Attributes arrive as ``code,name`` delimited
text, geometry as a GeoJSON FeatureCollection whose features carry a
``code`` property; the two are joined on import.

The registry is built once per import and read-only afterwards; re-import
swaps the whole content atomically, so concurrent readers see either the
old or the new state.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Optional

LEVEL_NAMES = {1: "province", 2: "regency", 3: "district", 4: "village"}
MAX_LEVEL = 4


class RegionError(Exception):
    """Base class for registry errors."""


class RegionCodeError(RegionError, ValueError):
    """A region code string is malformed."""


class UnknownRegionError(RegionError, KeyError):
    """A code does not resolve to a registered region."""

    def __init__(self, code: str):
        self.code = code
        super().__init__(code)

    def __str__(self) -> str:
        return f"unknown region code: {self.code!r}"


class GeometryMissingError(RegionError, KeyError):
    """The region exists but carries no geometry."""

    def __init__(self, code: str):
        self.code = code
        super().__init__(code)

    def __str__(self) -> str:
        return f"region {self.code!r} has no geometry"


@dataclass(frozen=True, order=True)
class RegionCode:
    """A dotted hierarchical region code, 1-4 numeric segments."""

    segments: tuple[str, ...]

    @classmethod
    def parse(cls, text: str) -> "RegionCode":
        if not isinstance(text, str) or not text.strip():
            raise RegionCodeError(f"empty region code: {text!r}")
        parts = text.strip().split(".")
        if not 1 <= len(parts) <= MAX_LEVEL:
            raise RegionCodeError(
                f"region code {text!r} must have 1 to {MAX_LEVEL} dotted segments"
            )
        for p in parts:
            if not p or not p.isdigit():
                raise RegionCodeError(f"region code {text!r} has a non-numeric segment {p!r}")
        return cls(segments=tuple(parts))

    @property
    def level(self) -> int:
        return len(self.segments)

    @property
    def level_name(self) -> str:
        return LEVEL_NAMES[self.level]

    @property
    def parent(self) -> Optional["RegionCode"]:
        if self.level == 1:
            return None
        return RegionCode(segments=self.segments[:-1])

    def is_ancestor_of(self, other: "RegionCode") -> bool:
        """True when `other` sits strictly below this code in the hierarchy."""
        return len(other.segments) > len(self.segments) and (
            other.segments[: len(self.segments)] == self.segments
        )

    def covers(self, other: "RegionCode") -> bool:
        """Ancestor-or-self prefix test, segment-aware."""
        return other == self or self.is_ancestor_of(other)

    def __str__(self) -> str:
        return ".".join(self.segments)

    def sort_key(self) -> tuple[int, ...]:
        return tuple(int(s) for s in self.segments)


@dataclass(frozen=True)
class RegionRecord:
    """One registered region; geometry is optional (attribute-only imports)."""

    code: RegionCode
    name: str
    geometry_ref: Optional[str] = None

    @property
    def level(self) -> int:
        return self.code.level

    @property
    def parent(self) -> Optional[RegionCode]:
        return self.code.parent


@dataclass(frozen=True)
class ImportResult:
    """Outcome of one registry import."""

    imported: int
    orphan_geometries: tuple[str, ...] = ()


@dataclass
class _Content:
    records: dict[str, RegionRecord] = field(default_factory=dict)
    children: dict[str, list[str]] = field(default_factory=dict)
    geometries: dict[str, dict] = field(default_factory=dict)
    extent: Optional[tuple[float, float, float, float]] = None


class RegionRegistry:
    """In-memory region registry; read-only between imports."""

    def __init__(self) -> None:
        self._content = _Content()

    # -- loading -----------------------------------------------------------

    def import_regions(
        self, attributes: IO, geometry: Optional[IO] = None
    ) -> ImportResult:
        """Populate the registry from attribute rows plus optional geometry.

        Replaces previous content atomically on success.  Geometry features
        whose code has no attribute row are skipped and reported as orphans;
        a region whose parent is missing is an error.
        """
        content = _Content()
        for code, name in _read_attribute_rows(attributes):
            key = str(code)
            if key in content.records:
                raise RegionError(f"duplicate region code in attributes: {key}")
            content.records[key] = RegionRecord(code=code, name=name)

        for key, record in content.records.items():
            parent = record.parent
            if parent is not None and str(parent) not in content.records:
                raise RegionError(f"region {key} has no parent {parent} in the registry")
            content.children.setdefault(str(parent) if parent else "", []).append(key)
        for siblings in content.children.values():
            siblings.sort(key=lambda k: content.records[k].code.sort_key())

        orphans: list[str] = []
        if geometry is not None:
            features = _read_feature_collection(geometry)
            for feature in features:
                props = feature.get("properties") or {}
                code_text = props.get("code")
                if not isinstance(code_text, str):
                    raise RegionError("geometry feature without a 'code' property")
                if code_text not in content.records:
                    orphans.append(code_text)
                    continue
                geom = feature.get("geometry")
                if not isinstance(geom, dict):
                    raise RegionError(f"geometry feature {code_text} has no geometry object")
                content.geometries[code_text] = geom
                content.records[code_text] = RegionRecord(
                    code=content.records[code_text].code,
                    name=content.records[code_text].name,
                    geometry_ref=code_text,
                )
            content.extent = _bounding_box(content.geometries.values())

        self._content = content  # atomic swap
        return ImportResult(imported=len(content.records), orphan_geometries=tuple(orphans))

    def export_attributes(self, stream: IO[str]) -> None:
        """Write the attribute table back out, rows ordered by code."""
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["code", "name"])
        for key in sorted(self._content.records, key=lambda k: self._content.records[k].code.sort_key()):
            record = self._content.records[key]
            writer.writerow([str(record.code), record.name])

    # -- queries -----------------------------------------------------------

    @property
    def extent(self) -> Optional[tuple[float, float, float, float]]:
        """(min_lon, min_lat, max_lon, max_lat) over all imported geometry."""
        return self._content.extent

    def __len__(self) -> int:
        return len(self._content.records)

    def __iter__(self) -> Iterator[RegionRecord]:
        content = self._content
        for key in sorted(content.records, key=lambda k: content.records[k].code.sort_key()):
            yield content.records[key]

    def contains(self, code: str | RegionCode) -> bool:
        return str(_as_code(code)) in self._content.records

    def lookup(self, code: str | RegionCode) -> RegionRecord:
        parsed = _as_code(code)
        try:
            return self._content.records[str(parsed)]
        except KeyError:
            raise UnknownRegionError(str(parsed)) from None

    def children(self, code: str | RegionCode) -> list[RegionRecord]:
        """Direct children in code order; empty for villages."""
        content = self._content
        record = self.lookup(code)
        keys = content.children.get(str(record.code), [])
        return [content.records[k] for k in keys]

    def ancestors(self, code: str | RegionCode) -> list[RegionRecord]:
        """Chain from direct parent up to the province."""
        record = self.lookup(code)
        chain = []
        parent = record.parent
        while parent is not None:
            record = self.lookup(parent)
            chain.append(record)
            parent = record.parent
        return chain

    def geometry_of(self, code: str | RegionCode) -> dict:
        """GeoJSON Feature for the region, with code and name properties.

        Regions without stored geometry fall back to a MultiPolygon
        assembled from their descendants' polygons; with no geometry
        anywhere below, ``GeometryMissingError`` is raised.
        """
        content = self._content
        record = self.lookup(code)
        key = str(record.code)
        geom = content.geometries.get(key)
        if geom is None:
            geom = self._assemble_descendants(record.code)
        if geom is None:
            raise GeometryMissingError(key)
        return {
            "type": "Feature",
            "properties": {
                "code": key,
                "name": record.name,
                "level": record.level,
                "level_name": record.code.level_name,
            },
            "geometry": geom,
        }

    def _assemble_descendants(self, code: RegionCode) -> Optional[dict]:
        polygons: list[list] = []
        for key, geom in self._content.geometries.items():
            other = self._content.records[key].code
            if not code.is_ancestor_of(other):
                continue
            if geom.get("type") == "Polygon":
                polygons.append(geom["coordinates"])
            elif geom.get("type") == "MultiPolygon":
                polygons.extend(geom["coordinates"])
        if not polygons:
            return None
        return {"type": "MultiPolygon", "coordinates": polygons}


def _as_code(code: str | RegionCode) -> RegionCode:
    return code if isinstance(code, RegionCode) else RegionCode.parse(code)


def _read_attribute_rows(stream: IO) -> Iterable[tuple[RegionCode, str]]:
    text = stream.read()
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise RegionError("attribute table is empty")
    if [c.strip().lower() for c in rows[0]] == ["code", "name"]:
        rows = rows[1:]
    out = []
    for lineno, row in enumerate(rows, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise RegionError(f"attribute row {lineno}: expected 'code,name', got {row!r}")
        code = RegionCode.parse(row[0])
        name = row[1].strip()
        if not name:
            raise RegionError(f"attribute row {lineno}: empty region name")
        out.append((code, name))
    if not out:
        raise RegionError("attribute table has no data rows")
    return out


def _read_feature_collection(stream: IO) -> list[dict]:
    raw = stream.read()
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as err:
        raise RegionError(f"geometry source is not valid JSON: {err}") from None
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise RegionError("geometry source must be a GeoJSON FeatureCollection")
    features = doc.get("features")
    if not isinstance(features, list):
        raise RegionError("FeatureCollection without a 'features' list")
    return features


def _bounding_box(geometries: Iterable[dict]) -> Optional[tuple[float, float, float, float]]:
    lons: list[float] = []
    lats: list[float] = []

    def walk(coords: object) -> None:
        if (
            isinstance(coords, (list, tuple))
            and len(coords) >= 2
            and all(isinstance(c, (int, float)) for c in coords[:2])
        ):
            lons.append(float(coords[0]))
            lats.append(float(coords[1]))
            return
        if isinstance(coords, (list, tuple)):
            for item in coords:
                walk(item)

    for geom in geometries:
        walk(geom.get("coordinates"))
    if not lons:
        return None
    return (min(lons), min(lats), max(lons), max(lats))

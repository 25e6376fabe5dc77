"""HTTP/JSON API over the diagnosis pipeline, region registry, and report log.

The service is stateless above the report store: identical store content
and request produce identical responses (timestamps aside).  Every error
body carries a machine-readable ``code`` and a human ``message``, and
malformed client input never surfaces as a 500.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from avianwarn.evidence import TotalConflictError
from avianwarn.geo import (
    GeometryMissingError,
    RegionCode,
    RegionCodeError,
    RegionRegistry,
    UnknownRegionError,
)
from avianwarn.rules import RuleError, RuleSet, UnknownSymptomError, diagnose, load_rules
from avianwarn.store import (
    REPORTABLE_LEVELS,
    ConsultationReport,
    ReportStore,
    WarningLevel,
    WarningPolicy,
    parse_iso_duration,
    utc_now,
)

GEOJSON_MEDIA_TYPE = "application/geo+json"


class ConfigError(ValueError):
    """The service configuration is unusable."""


@dataclass
class ApiConfig:
    """Startup configuration; file paths must exist when the service boots."""

    rules_path: Path
    region_attrs_path: Path
    region_geo_path: Path
    report_log_path: Path
    host: str = "127.0.0.1"
    port: int = 8000
    warning_window: str = "P7D"
    warning_disease: str = "AI"
    warning_mass: float = 0.5
    cors_origins: list[str] = field(default_factory=lambda: ["*"])
    ui_dir: Optional[Path] = None

    @classmethod
    def from_file(cls, path: str | Path) -> "ApiConfig":
        """Load config JSON; relative paths resolve against the file's directory."""
        path = Path(path)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config {path}: {err}") from None
        if not isinstance(doc, dict):
            raise ConfigError(f"config {path} must be a JSON object")
        base = path.parent

        def resolve(key: str, required: bool = True) -> Optional[Path]:
            value = doc.get(key)
            if value is None:
                if required:
                    raise ConfigError(f"config is missing {key!r}")
                return None
            return (base / value).resolve() if not Path(value).is_absolute() else Path(value)

        return cls(
            rules_path=resolve("rules_path"),
            region_attrs_path=resolve("region_attrs_path"),
            region_geo_path=resolve("region_geo_path"),
            report_log_path=resolve("report_log_path"),
            host=doc.get("host", "127.0.0.1"),
            port=doc.get("port", 8000),
            warning_window=doc.get("warning_window", "P7D"),
            warning_disease=doc.get("warning_disease", "AI"),
            warning_mass=doc.get("warning_mass", 0.5),
            cors_origins=list(doc.get("cors_origins", ["*"])),
            ui_dir=resolve("ui_dir", required=False),
        )

    def validate(self) -> None:
        if not isinstance(self.port, int) or not 0 < self.port < 65536:
            raise ConfigError(f"invalid port: {self.port!r}")
        for name in ("rules_path", "region_attrs_path", "region_geo_path"):
            p = getattr(self, name)
            if not Path(p).is_file():
                raise ConfigError(f"{name} does not exist: {p}")
        if self.ui_dir is not None and not Path(self.ui_dir).is_dir():
            raise ConfigError(f"ui_dir does not exist: {self.ui_dir}")
        try:
            parse_iso_duration(self.warning_window)
        except ValueError as err:
            raise ConfigError(str(err)) from None

    def policy(self) -> WarningPolicy:
        return WarningPolicy(disease_id=self.warning_disease, warning_mass=self.warning_mass)


class ConsultationRequest(BaseModel):
    region_code: str
    symptom_ids: list[str]


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"error": {"code": code, "message": message}}
    )


def build_components(config: ApiConfig) -> tuple[RuleSet, RegionRegistry, ReportStore]:
    config.validate()
    rules = load_rules(config.rules_path)
    registry = RegionRegistry()
    with open(config.region_attrs_path, "rb") as attrs, open(config.region_geo_path, "rb") as geo:
        registry.import_regions(attrs, geo)
    store = ReportStore.with_registry(config.report_log_path, registry)
    return rules, registry, store


def create_app(
    config: Optional[ApiConfig] = None,
    *,
    rules: Optional[RuleSet] = None,
    registry: Optional[RegionRegistry] = None,
    store: Optional[ReportStore] = None,
) -> FastAPI:
    """Build the API app from a config, or from pre-built components in tests."""
    if config is not None and (rules is None or registry is None or store is None):
        rules, registry, store = build_components(config)
    if rules is None or registry is None or store is None:
        raise ConfigError("create_app needs either a config or all three components")
    policy = config.policy() if config is not None else WarningPolicy()
    default_window = config.warning_window if config is not None else "P7D"

    app = FastAPI(title="avianwarn", version="0.1.0", docs_url="/api/docs", openapi_url="/api/openapi.json")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=(config.cors_origins if config is not None else ["*"]),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def malformed_body(_: Request, err: RequestValidationError) -> JSONResponse:
        return _error(400, "malformed_body", str(err.errors()[:1]))

    @app.exception_handler(Exception)
    async def unhandled(_: Request, err: Exception) -> JSONResponse:
        return _error(500, "internal_error", f"{type(err).__name__}: {err}")

    @app.post("/api/consultations", status_code=201)
    def post_consultation(body: ConsultationRequest):
        try:
            code = RegionCode.parse(body.region_code)
        except RegionCodeError as err:
            return _error(400, "malformed_region", str(err))
        if not registry.contains(code):
            return _error(404, "unknown_region", f"unknown region code: {code}")
        if code.level not in REPORTABLE_LEVELS:
            return _error(
                400,
                "region_not_reportable",
                f"consultations attach to district or village regions, got {code.level_name} {code}",
            )
        try:
            result = diagnose(rules, body.symptom_ids)
        except UnknownSymptomError as err:
            return _error(400, "unknown_symptom", str(err))
        except RuleError as err:
            return _error(400, "empty_symptoms", str(err))
        except TotalConflictError as err:
            return _error(422, "total_conflict", str(err))
        timestamp = utc_now()
        report = ConsultationReport(
            timestamp=timestamp,
            region=str(code),
            symptom_ids=result.symptom_ids,
            top_focal=result.top,
            top_mass=result.top_mass,
            ranked=result.ranked,
        )
        report_id = store.append(report)
        return JSONResponse(
            status_code=201,
            content={
                "report_id": report_id,
                "region": str(code),
                "region_name": registry.lookup(code).name,
                "timestamp": timestamp.isoformat(),
                "diagnosis": result.to_dict(),
            },
        )

    @app.get("/api/symptoms")
    def get_symptoms():
        return [{"id": r.symptom_id, "label": r.label} for r in rules.rules]

    @app.get("/api/diseases")
    def get_diseases():
        return [{"id": i, "label": label} for i, label in rules.diseases]

    def _parse_code(raw: str) -> RegionCode | JSONResponse:
        try:
            return RegionCode.parse(raw)
        except RegionCodeError as err:
            return _error(400, "malformed_region", str(err))

    def _record_dict(record) -> dict:
        return {
            "code": str(record.code),
            "name": record.name,
            "level": record.level,
            "level_name": record.code.level_name,
            "parent": str(record.parent) if record.parent else None,
            "has_geometry": record.geometry_ref is not None,
        }

    @app.get("/api/regions/{code}")
    def get_region(code: str):
        parsed = _parse_code(code)
        if isinstance(parsed, JSONResponse):
            return parsed
        try:
            return _record_dict(registry.lookup(parsed))
        except UnknownRegionError as err:
            return _error(404, "unknown_region", str(err))

    @app.get("/api/regions/{code}/children")
    def get_children(code: str):
        parsed = _parse_code(code)
        if isinstance(parsed, JSONResponse):
            return parsed
        try:
            return [_record_dict(r) for r in registry.children(parsed)]
        except UnknownRegionError as err:
            return _error(404, "unknown_region", str(err))

    @app.get("/api/regions/{code}/geometry")
    def get_geometry(code: str):
        parsed = _parse_code(code)
        if isinstance(parsed, JSONResponse):
            return parsed
        try:
            feature = registry.geometry_of(parsed)
        except UnknownRegionError as err:
            return _error(404, "unknown_region", str(err))
        except GeometryMissingError as err:
            return _error(404, "geometry_missing", str(err))
        return JSONResponse(content=feature, media_type=GEOJSON_MEDIA_TYPE)

    @app.get("/api/warnings")
    def get_warnings(window: Optional[str] = None, level: Optional[str] = None):
        try:
            duration = parse_iso_duration(window or default_window)
        except ValueError as err:
            return _error(400, "bad_duration", str(err))
        wanted: Optional[WarningLevel] = None
        if level is not None:
            try:
                wanted = WarningLevel(level)
            except ValueError:
                return _error(
                    400, "bad_level", f"level must be one of none/watch/warning, got {level!r}"
                )
        statuses = store.warning_levels(duration, utc_now(), registry, policy)
        if wanted is not None:
            statuses = [s for s in statuses if s.level == wanted]
        return [s.to_json_dict() for s in statuses]

    if config is not None and config.ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app


def run(config: ApiConfig) -> None:
    """Boot uvicorn with an app built from `config`."""
    import uvicorn

    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port)

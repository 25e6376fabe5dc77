"""Symptom rule sets and the diagnosis pipeline.

A rule file is a JSON document::

    {
      "version": "...",
      "diseases": [{"id": "...", "label": "..."}, ...],
      "symptoms": [{"id": "...", "label": "...", "focal": ["..."], "bpa": 0.x}, ...]
    }

Each symptom rule turns into a simple-support mass function over the frame
built from the disease ids plus the implicit catch-all hypothesis; a
diagnosis fuses the selected rules with Dempster's rule and ranks the
outcome.  Rule sets are immutable after loading and ``diagnose`` is pure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import IO, Iterable, Mapping, Union

from avianwarn.evidence import (
    Frame,
    HypothesisSet,
    MassFunction,
    combine_all,
    make_frame,
    simple_support,
)

RuleSource = Union[str, Path, bytes, IO[bytes], IO[str]]

#: Pairwise conflict K = bpa_i * bpa_j at or above this triggers a
#: high-conflict finding for disjoint rules.
HIGH_CONFLICT_K = 0.95


class RuleError(ValueError):
    """A rule document failed validation; the message carries the location."""


class UnknownSymptomError(KeyError):
    """A symptom id does not resolve against the rule set."""

    def __init__(self, symptom_id: str):
        self.symptom_id = symptom_id
        super().__init__(symptom_id)

    def __str__(self) -> str:
        return f"unknown symptom id: {self.symptom_id!r}"


@dataclass(frozen=True)
class SymptomRule:
    """One observable symptom and the evidence it contributes."""

    symptom_id: str
    label: str
    focal_labels: tuple[str, ...]
    bpa: float


@dataclass(frozen=True)
class RuleSet:
    """A validated knowledge base: frame, disease catalog, and symptom rules."""

    frame: Frame
    rules: tuple[SymptomRule, ...]
    version: str
    diseases: tuple[tuple[str, str], ...]  # (id, display label) pairs

    def rule(self, symptom_id: str) -> SymptomRule:
        for r in self.rules:
            if r.symptom_id == symptom_id:
                return r
        raise UnknownSymptomError(symptom_id)

    def disease_ids(self) -> tuple[str, ...]:
        return tuple(i for i, _ in self.diseases)

    def disease_label(self, disease_id: str) -> str:
        for i, label in self.diseases:
            if i == disease_id:
                return label
        raise KeyError(disease_id)

    def support_for(self, symptom_id: str) -> MassFunction:
        """The simple-support mass function contributed by one symptom."""
        r = self.rule(symptom_id)
        return simple_support(self.frame, self.frame.subset(r.focal_labels), r.bpa)


@dataclass(frozen=True)
class Diagnosis:
    """Ranked outcome of fusing the selected symptoms' evidence."""

    ranked: tuple[tuple[tuple[str, ...], float], ...]
    top: tuple[str, ...]
    per_disease: Mapping[str, tuple[float, float]]  # id -> (belief, plausibility)
    conflict_trace: tuple[float, ...]
    symptom_ids: tuple[str, ...]
    mass: MassFunction = field(compare=False)

    @property
    def top_mass(self) -> float:
        return self.ranked[0][1]

    def to_dict(self) -> dict:
        """JSON-ready form; shared verbatim by the CLI and the HTTP API."""
        return {
            "top": list(self.top),
            "top_mass": self.top_mass,
            "ranked": [
                {"focal": list(labels), "mass": mass} for labels, mass in self.ranked
            ],
            "per_disease": {
                disease: {"belief": bel, "plausibility": pl}
                for disease, (bel, pl) in self.per_disease.items()
            },
            "conflict_trace": list(self.conflict_trace),
            "symptom_ids": list(self.symptom_ids),
        }


@dataclass(frozen=True)
class Finding:
    """One advisory result from `validate_rules` (never a hard failure)."""

    severity: str  # "warning" | "info"
    code: str
    message: str


def default_rules_path() -> Path:
    """Path of the rule file bundled with the package."""
    return Path(resources.files("avianwarn").joinpath("data/rules/avian_default.json"))


def load_default_rules() -> RuleSet:
    return load_rules(default_rules_path())


def load_rules(source: RuleSource) -> RuleSet:
    """Load and validate a rule document from a path, bytes, or file object."""
    raw = _read(source)
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as err:
        raise RuleError(f"rule file is not valid JSON: {err}") from None
    if not isinstance(doc, dict):
        raise RuleError("rule file must be a JSON object")

    version = doc.get("version")
    if not isinstance(version, str) or not version:
        raise RuleError("missing or empty 'version'")

    diseases = _parse_diseases(doc.get("diseases"))
    disease_ids = [i for i, _ in diseases]
    frame = make_frame(disease_ids, include_other=True)
    rules = _parse_symptoms(doc.get("symptoms"), set(disease_ids))
    return RuleSet(frame=frame, rules=tuple(rules), version=version, diseases=tuple(diseases))


def _read(source: RuleSource) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, (str, Path)):
        return Path(source).read_bytes()
    data = source.read()
    return data.encode("utf-8") if isinstance(data, str) else data


def _parse_diseases(raw: object) -> list[tuple[str, str]]:
    if not isinstance(raw, list) or not raw:
        raise RuleError("'diseases' must be a non-empty list")
    out: list[tuple[str, str]] = []
    seen: set[str] = set()
    for pos, entry in enumerate(raw):
        where = f"diseases[{pos}]"
        if not isinstance(entry, dict):
            raise RuleError(f"{where}: expected an object")
        disease_id = entry.get("id")
        label = entry.get("label")
        if not isinstance(disease_id, str) or not disease_id.strip():
            raise RuleError(f"{where}: missing disease 'id'")
        if not isinstance(label, str) or not label.strip():
            raise RuleError(f"{where} ({disease_id}): missing 'label'")
        disease_id = disease_id.strip()
        if disease_id in seen:
            raise RuleError(f"{where}: duplicate disease id {disease_id!r}")
        seen.add(disease_id)
        out.append((disease_id, label.strip()))
    return out


def _parse_symptoms(raw: object, disease_ids: set[str]) -> list[SymptomRule]:
    if not isinstance(raw, list) or not raw:
        raise RuleError("'symptoms' must be a non-empty list")
    out: list[SymptomRule] = []
    seen: set[str] = set()
    for pos, entry in enumerate(raw):
        where = f"symptoms[{pos}]"
        if not isinstance(entry, dict):
            raise RuleError(f"{where}: expected an object")
        symptom_id = entry.get("id")
        if not isinstance(symptom_id, str) or not symptom_id.strip():
            raise RuleError(f"{where}: missing symptom 'id'")
        symptom_id = symptom_id.strip()
        where = f"{where} ({symptom_id})"
        if symptom_id in seen:
            raise RuleError(f"{where}: duplicate symptom id")
        seen.add(symptom_id)
        label = entry.get("label")
        if not isinstance(label, str) or not label.strip():
            raise RuleError(f"{where}: missing 'label'")
        focal = entry.get("focal")
        if not isinstance(focal, list) or not focal:
            raise RuleError(f"{where}: 'focal' must be a non-empty list of disease ids")
        for d in focal:
            if d not in disease_ids:
                raise RuleError(f"{where}: unknown disease label {d!r}")
        if len(set(focal)) != len(focal):
            raise RuleError(f"{where}: repeated disease in 'focal'")
        bpa = entry.get("bpa")
        # bpa = 1 would leave no residual ignorance on the frame and can
        # make a single rule force total conflict, so it is rejected here.
        if not isinstance(bpa, (int, float)) or isinstance(bpa, bool) or not 0.0 < bpa < 1.0:
            raise RuleError(f"{where}: bpa must be a number strictly between 0 and 1, got {bpa!r}")
        out.append(
            SymptomRule(
                symptom_id=symptom_id,
                label=label.strip(),
                focal_labels=tuple(focal),
                bpa=float(bpa),
            )
        )
    return out


def diagnose(rules: RuleSet, symptom_ids: Iterable[str]) -> Diagnosis:
    """Fuse the evidence of the selected symptoms into a ranked diagnosis.

    Duplicate selections collapse to one occurrence; combination follows the
    rule set's declaration order so conflict traces are reproducible (the
    final mass function is order-invariant regardless).
    """
    requested = list(symptom_ids)
    if not requested:
        raise RuleError("at least one symptom is required")
    known = {r.symptom_id for r in rules.rules}
    for sid in requested:
        if sid not in known:
            raise UnknownSymptomError(sid)
    wanted = set(requested)
    ordered = [r for r in rules.rules if r.symptom_id in wanted]

    supports = [rules.support_for(r.symptom_id) for r in ordered]
    final, trace = combine_all(supports)
    ranked = tuple((hset.labels, mass) for hset, mass in final.rank())
    per_disease = {
        disease: (final.belief([disease]), final.plausibility([disease]))
        for disease in rules.disease_ids()
    }
    return Diagnosis(
        ranked=ranked,
        top=ranked[0][0],
        per_disease=per_disease,
        conflict_trace=tuple(trace),
        symptom_ids=tuple(r.symptom_id for r in ordered),
        mass=final,
    )


def validate_rules(rules: RuleSet) -> list[Finding]:
    """Advisory checks on a loaded rule set.

    Flags pairs of disjoint rules whose combined conflict would approach
    total contradiction, and diseases no rule ever references.
    """
    findings: list[Finding] = []
    focal_sets: list[tuple[SymptomRule, HypothesisSet]] = [
        (r, rules.frame.subset(r.focal_labels)) for r in rules.rules
    ]
    for i, (rule_a, set_a) in enumerate(focal_sets):
        for rule_b, set_b in focal_sets[i + 1:]:
            if set_a.intersects(set_b):
                continue
            k = rule_a.bpa * rule_b.bpa
            if k >= HIGH_CONFLICT_K:
                findings.append(
                    Finding(
                        severity="warning",
                        code="high_conflict_pair",
                        message=(
                            f"rules {rule_a.symptom_id!r} and {rule_b.symptom_id!r} have "
                            f"disjoint focal sets with conflict K={k:.4f}; selecting both "
                            "nearly contradicts"
                        ),
                    )
                )
    referenced = {d for r in rules.rules for d in r.focal_labels}
    for disease in rules.disease_ids():
        if disease not in referenced:
            findings.append(
                Finding(
                    severity="info",
                    code="unreferenced_disease",
                    message=f"no rule references disease {disease!r}",
                )
            )
    return findings

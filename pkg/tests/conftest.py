from __future__ import annotations

from pathlib import Path

import pytest

from avianwarn.evidence import Frame, MassFunction, make_frame, simple_support
from avianwarn.rules import RuleSet, load_default_rules

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURE_ATTRS = REPO_ROOT / "fixtures" / "regions" / "lampung_sample_attrs.csv"
FIXTURE_GEO = REPO_ROOT / "fixtures" / "regions" / "lampung_sample.geojson"
REPO_RULES = REPO_ROOT / "rules" / "avian_default.json"

DISEASES = ("AI", "ND", "FC", "IBRespi", "IBRepro", "SHS")
ALL_FIVE_SYMPTOMS = (
    "depression",
    "comb_wattle_bluish_face",
    "swollen_face",
    "narrow_eyes",
    "balance_disorder",
)


@pytest.fixture(scope="session")
def disease_frame() -> Frame:
    return make_frame(list(DISEASES), include_other=True)


@pytest.fixture(scope="session")
def five_supports(disease_frame: Frame) -> list[MassFunction]:
    """The five symptom mass functions of the worked example, in order."""
    return [
        simple_support(disease_frame, DISEASES, 0.7),
        simple_support(disease_frame, ["AI"], 0.9),
        simple_support(disease_frame, ["AI", "ND", "FC"], 0.83),
        simple_support(disease_frame, ["SHS"], 0.9),
        simple_support(disease_frame, ["ND", "SHS"], 0.6),
    ]


@pytest.fixture(scope="session")
def default_ruleset() -> RuleSet:
    return load_default_rules()


@pytest.fixture()
def loaded_registry():
    from avianwarn.geo import RegionRegistry

    registry = RegionRegistry()
    with open(FIXTURE_ATTRS, "rb") as attrs, open(FIXTURE_GEO, "rb") as geo:
        registry.import_regions(attrs, geo)
    return registry

"""Operator command line: offline diagnosis, rule tooling, fixture import, service.

Exit codes: 0 success, 1 failed reference check, 2 bad input or usage,
3 domain error (contradictory evidence).
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from avianwarn import rules as kb
from avianwarn import service as svc
from avianwarn.evidence import TotalConflictError
from avianwarn.geo import RegionCodeError, RegionError, RegionRegistry
from avianwarn.rules import Diagnosis, RuleError, UnknownSymptomError

EXIT_BAD_INPUT = 2
EXIT_DOMAIN_ERROR = 3

#: Expected 5-dp roundings for each combination step of the bundled rule
#: set, used by `paper-example` as a living regression check.  The step-5
#: theta entry is recomputed from the row products: the legacy worked
#: example prints 0.00025 there, contradicting its own table.
REFERENCE_STEPS: list[tuple[str, dict[frozenset, float], float]] = [
    (
        "comb_wattle_bluish_face",
        {
            frozenset(["AI"]): 0.9,
            frozenset(["AI", "ND", "FC", "IBRespi", "IBRepro", "SHS"]): 0.07,
            frozenset(["AI", "ND", "FC", "IBRespi", "IBRepro", "SHS", "OTHER"]): 0.03,
        },
        0.0,
    ),
    (
        "swollen_face",
        {
            frozenset(["AI"]): 0.9,
            frozenset(["AI", "ND", "FC"]): 0.083,
            frozenset(["AI", "ND", "FC", "IBRespi", "IBRepro", "SHS"]): 0.0119,
            frozenset(["AI", "ND", "FC", "IBRespi", "IBRepro", "SHS", "OTHER"]): 0.0051,
        },
        0.0,
    ),
    (
        "narrow_eyes",
        {
            frozenset(["SHS"]): 0.13270,
            frozenset(["AI"]): 0.78057,
            frozenset(["AI", "ND", "FC"]): 0.07199,
            frozenset(["AI", "ND", "FC", "IBRespi", "IBRepro", "SHS"]): 0.01032,
            frozenset(["AI", "ND", "FC", "IBRespi", "IBRepro", "SHS", "OTHER"]): 0.00442,
        },
        0.8847,
    ),
    (
        "balance_disorder",
        {
            frozenset(["SHS"]): 0.24960,
            frozenset(["AI"]): 0.58725,
            frozenset(["ND"]): 0.08124,
            frozenset(["ND", "SHS"]): 0.01663,
            frozenset(["AI", "ND", "FC"]): 0.05417,
            frozenset(["AI", "ND", "FC", "IBRespi", "IBRepro", "SHS"]): 0.00777,
            frozenset(["AI", "ND", "FC", "IBRespi", "IBRepro", "SHS", "OTHER"]): 0.00333,
        },
        0.46834,
    ),
]
REFERENCE_TOLERANCE = 5e-5
REFERENCE_FINAL_TOP = 0.587275693312


def _use_color() -> bool:
    return not os.environ.get("NO_COLOR") and sys.stdout.isatty()


def _style(text: str, **kwargs) -> str:
    return click.style(text, **kwargs) if _use_color() else text


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _focal_display(labels: tuple[str, ...], ruleset: kb.RuleSet) -> str:
    if frozenset(labels) == frozenset(ruleset.frame.labels):
        return "Θ (any hypothesis)"
    return "{" + ", ".join(labels) + "}"


@click.group()
@click.version_option(package_name="avianwarn")
def main() -> None:
    """Evidential early-warning tools for poultry disease."""


@main.command()
@click.option("--rules", "rules_path", type=click.Path(path_type=Path), default=None,
              help="Rule file (defaults to the bundled rule set).")
@click.option("--symptoms", "symptoms_csv", required=True,
              help="Comma-separated symptom ids.")
@click.option("--region", default=None, help="Region code to tag the output with.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
def diagnose(rules_path: Path | None, symptoms_csv: str, region: str | None, as_json: bool) -> None:
    """Run a diagnosis offline and print the ranked result."""
    ruleset = _load_ruleset(rules_path)
    symptom_ids = [s.strip() for s in symptoms_csv.split(",") if s.strip()]
    try:
        result = kb.diagnose(ruleset, symptom_ids)
    except UnknownSymptomError as err:
        _fail(str(err), EXIT_BAD_INPUT)
    except RuleError as err:
        _fail(str(err), EXIT_BAD_INPUT)
    except TotalConflictError as err:
        _fail(str(err), EXIT_DOMAIN_ERROR)

    if as_json:
        click.echo(json.dumps({"region": region, "diagnosis": result.to_dict()}, indent=2))
        return
    _print_diagnosis(result, ruleset, region)


def _load_ruleset(rules_path: Path | None) -> kb.RuleSet:
    try:
        if rules_path is None:
            return kb.load_default_rules()
        return kb.load_rules(rules_path)
    except (OSError, RuleError) as err:
        _fail(f"cannot load rules: {err}", EXIT_BAD_INPUT)
        raise AssertionError("unreachable")


def _print_diagnosis(result: Diagnosis, ruleset: kb.RuleSet, region: str | None) -> None:
    if region:
        click.echo(f"region: {region}")
    click.echo(f"symptoms: {', '.join(result.symptom_ids)}")
    top = result.top
    if len(top) == 1:
        headline = ruleset.disease_label(top[0]) if top[0] in ruleset.disease_ids() else top[0]
    else:
        headline = _focal_display(top, ruleset)
    click.echo(_style(f"top: {headline}  mass {result.top_mass:.5f}", bold=True))
    click.echo("")
    click.echo(f"{'focal set':<45} {'mass':>9}")
    for labels, mass in result.ranked:
        click.echo(f"{_focal_display(labels, ruleset):<45} {mass:>9.5f}")
    click.echo("")
    click.echo(f"{'disease':<45} {'belief':>9} {'plausibility':>13}")
    for disease in ruleset.disease_ids():
        bel, pl = result.per_disease[disease]
        click.echo(f"{ruleset.disease_label(disease):<45} {bel:>9.5f} {pl:>13.5f}")
    if result.conflict_trace:
        trace = ", ".join(f"{k:.5f}" for k in result.conflict_trace)
        click.echo(f"\nconflict per combination step: {trace}")


@main.command("paper-example")
def paper_example() -> None:
    """Replay the bundled five-symptom walkthrough against its reference values.

    Combines the default rules one symptom at a time and checks every
    intermediate mass (5-dp reference) plus the final unrounded top value.
    Exits nonzero when any delta exceeds the reference tolerance.
    """
    ruleset = kb.load_default_rules()
    ordered = [r.symptom_id for r in ruleset.rules]
    failures = 0
    click.echo(f"rule set version {ruleset.version}; symptoms in order: {', '.join(ordered)}")

    for step_index, (symptom_id, reference, reference_k) in enumerate(REFERENCE_STEPS, start=2):
        selection = ordered[:step_index]
        if selection[-1] != symptom_id:
            _fail(f"bundled rules out of order: expected {symptom_id!r}", EXIT_BAD_INPUT)
        result = kb.diagnose(ruleset, selection)
        step_k = result.conflict_trace[-1]
        click.echo(f"\nafter {symptom_id} ({step_index} symptoms combined):")
        click.echo(f"  {'focal set':<42} {'computed':>12} {'reference':>10} {'delta':>10}")
        computed = {frozenset(labels): mass for labels, mass in result.ranked}
        for focal, expected in reference.items():
            got = computed.pop(frozenset(focal), 0.0)
            delta = got - expected
            ok = abs(delta) <= REFERENCE_TOLERANCE
            failures += 0 if ok else 1
            mark = _style("ok", fg="green") if ok else _style("FAIL", fg="red", bold=True)
            labels = tuple(sorted(focal, key=ruleset.frame.index_of))
            click.echo(
                f"  {_focal_display(labels, ruleset):<42} {got:>12.7f} {expected:>10.5f} "
                f"{delta:>+10.2e}  {mark}"
            )
        for stray in computed:
            failures += 1
            click.echo(f"  unexpected focal set in result: {sorted(stray)}  " + _style("FAIL", fg="red"))
        k_delta = step_k - reference_k
        k_ok = abs(k_delta) <= REFERENCE_TOLERANCE
        failures += 0 if k_ok else 1
        click.echo(
            f"  {'conflict K':<42} {step_k:>12.7f} {reference_k:>10.5f} {k_delta:>+10.2e}  "
            + (_style("ok", fg="green") if k_ok else _style("FAIL", fg="red", bold=True))
        )

    final = kb.diagnose(ruleset, ordered)
    final_delta = final.top_mass - REFERENCE_FINAL_TOP
    final_ok = abs(final_delta) <= 1e-9
    failures += 0 if final_ok else 1
    click.echo(
        f"\nfinal unrounded top mass m({'{'}{','.join(final.top)}{'}'}) = {final.top_mass:.12f} "
        f"(reference {REFERENCE_FINAL_TOP}, delta {final_delta:+.2e})  "
        + (_style("ok", fg="green") if final_ok else _style("FAIL", fg="red", bold=True))
    )
    if failures:
        click.echo(_style(f"{failures} value(s) outside tolerance", fg="red", bold=True))
        sys.exit(1)
    click.echo(_style("all reference values reproduced", fg="green"))


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(path_type=Path))
def serve(config_path: Path) -> None:
    """Start the HTTP API from a JSON config file."""
    try:
        config = svc.ApiConfig.from_file(config_path)
        config.validate()
    except svc.ConfigError as err:
        _fail(str(err), EXIT_BAD_INPUT)
    click.echo(f"serving on http://{config.host}:{config.port}")
    svc.run(config)


@main.command("import-geo")
@click.option("--attrs", "attrs_path", required=True, type=click.Path(path_type=Path))
@click.option("--geo", "geo_path", required=True, type=click.Path(path_type=Path))
def import_geo(attrs_path: Path, geo_path: Path) -> None:
    """Validate region fixtures by importing them into a fresh registry."""
    registry = RegionRegistry()
    try:
        with open(attrs_path, "rb") as attrs, open(geo_path, "rb") as geo:
            result = registry.import_regions(attrs, geo)
    except OSError as err:
        _fail(str(err), EXIT_BAD_INPUT)
    except (RegionError, RegionCodeError) as err:
        _fail(str(err), EXIT_BAD_INPUT)
    click.echo(f"{result.imported} regions imported")
    for orphan in result.orphan_geometries:
        click.echo(f"warning: geometry feature {orphan!r} has no attribute row; skipped", err=True)
    if registry.extent:
        west, south, east, north = registry.extent
        click.echo(f"extent: {west}..{east} E, {south}..{north} N")


@main.group("rules")
def rules_group() -> None:
    """Rule-file tooling."""


@rules_group.command("validate")
@click.argument("path", type=click.Path(path_type=Path))
def rules_validate(path: Path) -> None:
    """Load a rule file and print advisory findings."""
    try:
        ruleset = kb.load_rules(path)
    except (OSError, RuleError) as err:
        _fail(str(err), EXIT_BAD_INPUT)
    findings = kb.validate_rules(ruleset)
    if not findings:
        click.echo("ok")
        return
    for finding in findings:
        click.echo(f"{finding.severity}: [{finding.code}] {finding.message}")


if __name__ == "__main__":
    main()

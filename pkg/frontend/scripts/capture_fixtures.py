#!/usr/bin/env python3
"""Regenerate the frontend test fixtures from the real backend.

Boots the API in-process against the repository's sample regions and
default rules, then writes every response the UI tests replay into
frontend/tests/fixtures/.  Run from anywhere:

    python3 frontend/scripts/capture_fixtures.py
"""

import json
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

REPO = Path(__file__).resolve().parent.parent.parent
sys.path.insert(0, str(REPO / "src"))

from avianwarn.service import ApiConfig, create_app  # noqa: E402

FIXTURES = REPO / "frontend" / "tests" / "fixtures"
ALL_FIVE = [
    "depression",
    "comb_wattle_bluish_face",
    "swollen_face",
    "narrow_eyes",
    "balance_disorder",
]
REGION_CODES = ["18", "18.01", "18.02", "18.01.03", "18.02.01", "18.01.03.2001", "18.02.01.2002"]
VILLAGE = "18.01.03.2001"


def write(name: str, payload) -> None:
    path = FIXTURES / name
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {path.relative_to(REPO)}")


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        config = ApiConfig(
            rules_path=REPO / "rules" / "avian_default.json",
            region_attrs_path=REPO / "fixtures" / "regions" / "lampung_sample_attrs.csv",
            region_geo_path=REPO / "fixtures" / "regions" / "lampung_sample.geojson",
            report_log_path=Path(tmp) / "reports.jsonl",
        )
        client = TestClient(create_app(config))

        write("symptoms.json", client.get("/api/symptoms").json())
        write("diseases.json", client.get("/api/diseases").json())
        for code in REGION_CODES:
            slug = code.replace(".", "_")
            write(f"region_{slug}.json", client.get(f"/api/regions/{code}").json())
            write(f"children_{slug}.json", client.get(f"/api/regions/{code}/children").json())
            write(f"geometry_{slug}.json", client.get(f"/api/regions/{code}/geometry").json())

        write("warnings_empty.json", client.get("/api/warnings?window=P7D").json())

        consultation = client.post(
            "/api/consultations",
            json={"region_code": VILLAGE, "symptom_ids": ALL_FIVE},
        )
        assert consultation.status_code == 201, consultation.text
        write("consultation.json", consultation.json())

        write("warnings_after.json", client.get("/api/warnings?window=P7D").json())


if __name__ == "__main__":
    main()

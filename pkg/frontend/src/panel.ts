import { displayedSum, focalDisplay, formatMass, formatPercent } from "./format.js";
import type { ConsultationResponse, DiseaseInfo } from "./types.js";

/** Renders the ranked diagnosis returned by the API into the result panel. */
export function renderDiagnosis(
  panel: HTMLElement,
  response: ConsultationResponse,
  diseases: DiseaseInfo[],
): void {
  const labels = new Map(diseases.map((d) => [d.id, d.label]));
  const frameSize = diseases.length + 1; // diseases plus the catch-all hypothesis
  const diagnosis = response.diagnosis;
  panel.replaceChildren();

  const headline = document.createElement("h3");
  headline.id = "diagnosis-headline";
  const top = diagnosis.top;
  headline.textContent =
    top.length === 1 ? (labels.get(top[0]!) ?? top[0]!) : focalDisplay(top, frameSize);
  panel.appendChild(headline);

  const massLine = document.createElement("p");
  massLine.id = "diagnosis-mass";
  massLine.textContent = `mass ${formatMass(diagnosis.top_mass)} — report #${response.report_id} at ${response.region_name} (${response.region})`;
  panel.appendChild(massLine);

  const ranked = document.createElement("ol");
  ranked.id = "ranked-list";
  for (const entry of diagnosis.ranked) {
    const row = document.createElement("li");
    row.className = "ranked-row";
    const bar = document.createElement("span");
    bar.className = "bar";
    bar.style.width = formatPercent(entry.mass);
    row.appendChild(bar);
    const text = document.createElement("span");
    text.className = "focal";
    text.textContent = focalDisplay(entry.focal, frameSize);
    row.appendChild(text);
    const mass = document.createElement("span");
    mass.className = "mass-value";
    mass.textContent = formatMass(entry.mass);
    row.appendChild(mass);
    ranked.appendChild(row);
  }
  panel.appendChild(ranked);

  const sumLine = document.createElement("p");
  sumLine.id = "ranked-sum";
  sumLine.textContent = `Σ masses = ${displayedSum(diagnosis.ranked.map((e) => e.mass))}`;
  panel.appendChild(sumLine);

  const table = document.createElement("table");
  table.id = "belpl-table";
  const head = table.insertRow();
  for (const caption of ["disease", "belief", "plausibility"]) {
    const cell = document.createElement("th");
    cell.textContent = caption;
    head.appendChild(cell);
  }
  for (const [diseaseId, bounds] of Object.entries(diagnosis.per_disease)) {
    const row = table.insertRow();
    row.insertCell().textContent = labels.get(diseaseId) ?? diseaseId;
    row.insertCell().textContent = formatMass(bounds.belief);
    row.insertCell().textContent = formatMass(bounds.plausibility);
  }
  panel.appendChild(table);

  if (diagnosis.conflict_trace.length > 0) {
    const trace = document.createElement("p");
    trace.id = "conflict-trace";
    trace.textContent = `conflict per step: ${diagnosis.conflict_trace
      .map((k) => formatMass(k))
      .join(", ")}`;
    panel.appendChild(trace);
  }
}

export function renderConflictNotice(panel: HTMLElement, message: string): void {
  panel.replaceChildren();
  const notice = document.createElement("p");
  notice.id = "conflict-notice";
  notice.className = "conflict";
  notice.textContent = `contradictory evidence: ${message}`;
  panel.appendChild(notice);
}

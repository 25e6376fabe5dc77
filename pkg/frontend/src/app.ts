import { ApiClient, ApiError } from "./api.js";
import { RegionMap } from "./map.js";
import { renderConflictNotice, renderDiagnosis } from "./panel.js";
import {
  FormState,
  beginSubmit,
  canSubmit,
  initialState,
  selectRegion,
  submitFailed,
  submitSucceeded,
  toggleSymptom,
} from "./state.js";
import type { DiseaseInfo, RegionInfo, SymptomInfo } from "./types.js";

const LEVEL_TITLES = ["province", "regency", "district", "village"];
const WINDOW_CHOICES = ["P1D", "P7D", "P30D"];

export interface AppHandle {
  state(): FormState;
  map: RegionMap;
  /** Resolves once every in-flight async handler has settled (test hook). */
  idle(): Promise<void>;
  refreshWarnings(): Promise<void>;
}

/** Build the full UI inside `root` and return a handle for tests. */
export async function bootApp(root: HTMLElement, api: ApiClient): Promise<AppHandle> {
  root.replaceChildren();
  let state = initialState();
  let symptoms: SymptomInfo[] = [];
  let diseases: DiseaseInfo[] = [];
  const childrenCache = new Map<string, RegionInfo[]>();
  const chain: (RegionInfo | null)[] = [null, null, null, null];

  const pending = new Set<Promise<unknown>>();
  const track = <T>(promise: Promise<T>): Promise<T> => {
    const wrapped = promise.finally(() => pending.delete(wrapped));
    pending.add(wrapped);
    return wrapped;
  };
  // drains both the app's and the map's handlers; settled promises may
  // queue new work, so loop until both sets stay empty
  const idle = async () => {
    while (pending.size > 0 || map.pendingCount() > 0) {
      await Promise.allSettled([...pending]);
      await map.idle();
    }
  };

  // --- static scaffolding ---------------------------------------------
  const banner = document.createElement("div");
  banner.id = "error-banner";
  banner.hidden = true;
  const bannerMessage = document.createElement("span");
  bannerMessage.id = "error-message";
  banner.appendChild(bannerMessage);
  const retry = document.createElement("button");
  retry.id = "error-retry";
  retry.type = "button";
  retry.textContent = "retry";
  banner.appendChild(retry);
  root.appendChild(banner);

  const mapSection = document.createElement("section");
  mapSection.id = "map-section";
  const mapContainer = document.createElement("div");
  mapContainer.id = "map-container";
  mapSection.appendChild(mapContainer);

  const legend = document.createElement("ul");
  legend.id = "warning-legend";
  for (const level of ["none", "watch", "warning"]) {
    const item = document.createElement("li");
    const swatch = document.createElement("span");
    swatch.className = `swatch warn-${level}`;
    item.appendChild(swatch);
    item.appendChild(document.createTextNode(level));
    legend.appendChild(item);
  }
  mapSection.appendChild(legend);

  const windowLabel = document.createElement("label");
  windowLabel.textContent = "warning window ";
  const windowSelect = document.createElement("select");
  windowSelect.id = "warning-window";
  for (const choice of WINDOW_CHOICES) {
    const option = document.createElement("option");
    option.value = choice;
    option.textContent = choice;
    if (choice === "P7D") option.selected = true;
    windowSelect.appendChild(option);
  }
  windowLabel.appendChild(windowSelect);
  mapSection.appendChild(windowLabel);
  root.appendChild(mapSection);

  const formSection = document.createElement("section");
  formSection.id = "form-section";
  const selectorsBox = document.createElement("div");
  selectorsBox.id = "region-selectors";
  const selectors: HTMLSelectElement[] = LEVEL_TITLES.map((title, i) => {
    const label = document.createElement("label");
    label.textContent = `${title} `;
    const select = document.createElement("select");
    select.id = `select-level-${i + 1}`;
    select.disabled = true;
    label.appendChild(select);
    selectorsBox.appendChild(label);
    return select;
  });
  formSection.appendChild(selectorsBox);

  const selectedLine = document.createElement("p");
  selectedLine.id = "selected-region";
  selectedLine.textContent = "no region selected";
  formSection.appendChild(selectedLine);

  const symptomBox = document.createElement("fieldset");
  symptomBox.id = "symptom-list";
  formSection.appendChild(symptomBox);

  const formError = document.createElement("p");
  formError.id = "form-error";
  formError.hidden = true;
  formSection.appendChild(formError);

  const submit = document.createElement("button");
  submit.id = "submit-consultation";
  submit.type = "button";
  submit.textContent = "run consultation";
  submit.disabled = true;
  formSection.appendChild(submit);

  const panel = document.createElement("div");
  panel.id = "result-panel";
  formSection.appendChild(panel);
  root.appendChild(formSection);

  // --- behavior ---------------------------------------------------------
  const showBanner = (message: string) => {
    bannerMessage.textContent = message;
    banner.hidden = false;
  };

  const map = new RegionMap(mapContainer, api, {
    onSelect: (region) => void track(handleMapSelect(region)),
    onError: showBanner,
  });

  const childrenOf = async (code: string): Promise<RegionInfo[]> => {
    const cached = childrenCache.get(code);
    if (cached) return cached;
    const children = await api.getChildren(code);
    childrenCache.set(code, children);
    return children;
  };

  const setState = (next: FormState) => {
    state = next;
    submit.disabled = !canSubmit(state);
    selectedLine.textContent = state.region
      ? `${state.region.name} (${state.region.code}, ${LEVEL_TITLES[state.region.level - 1]})`
      : "no region selected";
    if (state.status !== "error") {
      formError.hidden = true;
      formError.textContent = "";
    }
    map.setSelected(state.region?.code ?? null);
  };

  const applyChain = (regions: RegionInfo[]) => {
    for (let i = 0; i < 4; i += 1) chain[i] = regions[i] ?? null;
    const deepest = regions[regions.length - 1] ?? null;
    setState(
      selectRegion(
        state,
        deepest ? { code: deepest.code, name: deepest.name, level: deepest.level } : null,
      ),
    );
  };

  const populateSelector = (level: number, options: RegionInfo[], selected?: string) => {
    const select = selectors[level - 1];
    if (!select) return;
    select.replaceChildren();
    const placeholder = document.createElement("option");
    placeholder.value = "";
    placeholder.textContent = "—";
    select.appendChild(placeholder);
    for (const region of options) {
      const option = document.createElement("option");
      option.value = region.code;
      option.textContent = region.name;
      option.selected = region.code === selected;
      select.appendChild(option);
    }
    select.disabled = options.length === 0;
  };

  const clearSelectorsBelow = (level: number) => {
    for (let l = level + 1; l <= 4; l += 1) {
      const select = selectors[l - 1];
      if (!select) continue;
      select.replaceChildren();
      select.disabled = true;
    }
  };

  const optionsByLevel = new Map<number, RegionInfo[]>();

  const handleMapSelect = async (region: RegionInfo) => {
    // the map's current drill stack is exactly the ancestor chain
    const path: RegionInfo[] = [];
    let parentCode = region.parent;
    const ancestors: RegionInfo[] = [];
    while (parentCode) {
      const record = await api.getRegion(parentCode);
      ancestors.unshift(record);
      parentCode = record.parent;
    }
    path.push(...ancestors, region);
    // sync each cascade selector with the chain
    let options = optionsByLevel.get(1) ?? [];
    populateSelector(1, options, path[0]?.code);
    for (let level = 2; level <= 4; level += 1) {
      const parent = path[level - 2];
      if (!parent) {
        clearSelectorsBelow(level - 1);
        break;
      }
      const children = await childrenOf(parent.code);
      optionsByLevel.set(level, children);
      populateSelector(level, children, path[level - 1]?.code);
    }
    applyChain(path);
  };

  const handleSelectorChange = async (level: number) => {
    const select = selectors[level - 1];
    if (!select) return;
    const code = select.value;
    clearSelectorsBelow(level);
    if (!code) {
      applyChain(chain.slice(0, level - 1).filter((r): r is RegionInfo => r !== null));
      await map.drillPath(chain.slice(0, level - 1).filter((r): r is RegionInfo => r !== null));
      return;
    }
    const options = optionsByLevel.get(level) ?? [];
    const region = options.find((r) => r.code === code) ?? (await api.getRegion(code));
    const path = chain.slice(0, level - 1).filter((r): r is RegionInfo => r !== null);
    path.push(region);
    applyChain(path);
    if (region.level < 4) {
      const children = await childrenOf(region.code);
      optionsByLevel.set(level + 1, children);
      populateSelector(level + 1, children);
      await map.drillPath(path);
    } else {
      await map.drillPath(path.slice(0, -1));
    }
  };

  selectors.forEach((select, i) => {
    select.addEventListener("change", () => void track(handleSelectorChange(i + 1)));
  });

  // --- warning layer ------------------------------------------------------
  let warningsAbort: AbortController | null = null;
  const refreshWarnings = async () => {
    warningsAbort?.abort();
    const controller = new AbortController();
    warningsAbort = controller;
    try {
      const statuses = await api.getWarnings(windowSelect.value, controller.signal);
      if (controller !== warningsAbort) return; // superseded
      map.setWarningLevels(statuses);
      legend.hidden = false;
    } catch (err) {
      if (controller !== warningsAbort) return;
      map.clearWarningLevels();
      legend.hidden = true;
    }
  };
  windowSelect.addEventListener("change", () => void track(refreshWarnings()));

  // --- consultation submit -------------------------------------------------
  const handleSubmit = async () => {
    if (!canSubmit(state) || !state.region) return;
    setState(beginSubmit(state));
    try {
      const response = await api.postConsultation(state.region.code, [...state.symptoms]);
      setState(submitSucceeded(state, response));
      renderDiagnosis(panel, response, diseases);
      await refreshWarnings();
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        setState(submitFailed(state, err.message));
        renderConflictNotice(panel, err.message);
      } else if (err instanceof ApiError) {
        setState(submitFailed(state, err.message));
        formError.textContent = `${err.code}: ${err.message}`;
        formError.hidden = false;
      } else {
        setState(submitFailed(state, err instanceof Error ? err.message : String(err)));
        showBanner(state.error ?? "request failed");
      }
    }
  };
  submit.addEventListener("click", () => void track(handleSubmit()));

  // --- bootstrap -----------------------------------------------------------
  const bootstrap = async () => {
    banner.hidden = true;
    try {
      const [symptomList, diseaseList, statuses] = await Promise.all([
        api.getSymptoms(),
        api.getDiseases(),
        api.getWarnings(windowSelect.value),
      ]);
      symptoms = symptomList;
      diseases = diseaseList;

      symptomBox.replaceChildren();
      for (const symptom of symptoms) {
        const label = document.createElement("label");
        const checkbox = document.createElement("input");
        checkbox.type = "checkbox";
        checkbox.dataset.symptomId = symptom.id;
        checkbox.addEventListener("change", () => setState(toggleSymptom(state, symptom.id)));
        label.appendChild(checkbox);
        label.appendChild(document.createTextNode(` ${symptom.label}`));
        symptomBox.appendChild(label);
      }

      const provinceCodes = statuses
        .map((s) => s.region)
        .filter((code) => !code.includes("."))
        .sort();
      const provinces = await Promise.all(provinceCodes.map((code) => api.getRegion(code)));
      optionsByLevel.set(1, provinces);
      populateSelector(1, provinces);
      await map.showRoot(provinces);
      map.setWarningLevels(statuses);
      legend.hidden = false;
    } catch (err) {
      showBanner(err instanceof Error ? err.message : String(err));
    }
  };
  retry.addEventListener("click", () => void track(bootstrap()));

  await bootstrap();

  return {
    state: () => state,
    map,
    idle,
    refreshWarnings: () => track(refreshWarnings()),
  };
}

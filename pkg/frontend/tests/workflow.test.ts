/**
 * Scripted end-to-end session against the captured backend contract:
 * drill into the fixture village, check all five symptoms, submit, and
 * verify the headline diagnosis plus the warning choropleth.
 */

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { bootApp, type AppHandle } from "../src/app.js";
import { makeBackend, type BackendStub } from "./helpers.js";

const ALL_FIVE = [
  "depression",
  "comb_wattle_bluish_face",
  "swollen_face",
  "narrow_eyes",
  "balance_disorder",
];
const VILLAGE = "18.01.03.2001";
const CHAIN = ["18", "18.01", "18.01.03", VILLAGE];

let root: HTMLElement;
let backend: BackendStub;
let app: AppHandle;

async function boot(): Promise<void> {
  document.body.innerHTML = "";
  root = document.createElement("div");
  document.body.appendChild(root);
  backend = makeBackend();
  app = await bootApp(root, new ApiClient("/api", backend.fetch));
  await app.idle();
}

function shape(code: string): SVGPathElement {
  const el = root.querySelector<SVGPathElement>(`path[data-region-code="${code}"]`);
  expect(el, `map shape for ${code}`).not.toBeNull();
  return el!;
}

async function clickRegion(code: string): Promise<void> {
  shape(code).dispatchEvent(new Event("click"));
  await app.idle();
}

async function drillToVillages(): Promise<void> {
  await clickRegion("18");
  await clickRegion("18.01");
  await clickRegion("18.01.03");
  await clickRegion(VILLAGE);
}

function checkAllSymptoms(): void {
  for (const id of ALL_FIVE) {
    const box = root.querySelector<HTMLInputElement>(`input[data-symptom-id="${id}"]`);
    expect(box, `checkbox ${id}`).not.toBeNull();
    box!.click();
  }
}

beforeEach(boot);

describe("consultation workflow", () => {
  it("drills from province to village and fills the form region", async () => {
    expect(shape("18")).toBeTruthy();
    await clickRegion("18");
    expect(shape("18.01")).toBeTruthy();
    await clickRegion("18.01");
    expect(shape("18.01.03")).toBeTruthy();
    await clickRegion("18.01.03");
    await clickRegion(VILLAGE);
    expect(app.state().region?.code).toBe(VILLAGE);
    expect(root.querySelector("#selected-region")!.textContent).toContain("Kubu Perahu");
    // cascade selectors follow the map selection
    expect(root.querySelector<HTMLSelectElement>("#select-level-4")!.value).toBe(VILLAGE);
  });

  it("keeps submit disabled until region and symptoms are set", async () => {
    const submit = root.querySelector<HTMLButtonElement>("#submit-consultation")!;
    expect(submit.disabled).toBe(true);
    checkAllSymptoms();
    expect(submit.disabled).toBe(true); // no region yet
    await drillToVillages();
    expect(submit.disabled).toBe(false);
  });

  it("runs the five-symptom consultation and shades the village chain", async () => {
    await drillToVillages();
    checkAllSymptoms();
    const submit = root.querySelector<HTMLButtonElement>("#submit-consultation")!;
    expect(submit.disabled).toBe(false);
    submit.click();
    await app.idle();

    // headline diagnosis straight from the API response
    expect(app.state().status).toBe("result");
    const headline = root.querySelector("#diagnosis-headline")!;
    expect(headline.textContent).toContain("Avian Influenza");
    expect(root.querySelector("#diagnosis-mass")!.textContent).toContain("0.58728");
    expect(root.querySelector("#ranked-sum")!.textContent).toContain("1.00000");

    // choropleth: the current map level shows villages; walk the breadcrumb
    // up and verify every ancestor of the consulted village shades warning
    expect(shape(VILLAGE).getAttribute("class")).toContain("warn-warning");
    for (const [depth, code] of [...CHAIN.slice(0, 3).entries()].reverse()) {
      const crumbs = root.querySelectorAll<HTMLButtonElement>("#map-breadcrumb .crumb");
      crumbs[depth]!.click();
      await app.idle();
      expect(shape(code).getAttribute("class")).toContain("warn-warning");
      if (code === "18.01") {
        // sibling regency branch stays unshaded
        expect(shape("18.02").getAttribute("class")).toContain("warn-none");
      }
    }
  });

  it("sends exactly the checked symptoms to the API", async () => {
    await drillToVillages();
    checkAllSymptoms();
    root.querySelector<HTMLButtonElement>("#submit-consultation")!.click();
    await app.idle();
    const post = backend.requests.find((r) => r.method === "POST");
    expect(post).toBeDefined();
    expect(backend.consulted).toBe(true);
  });

  it("hides the warning layer when the warnings fetch fails", async () => {
    backend.failWarnings = true;
    await app.refreshWarnings();
    await app.idle();
    expect(root.querySelector<HTMLElement>("#warning-legend")!.hidden).toBe(true);
    expect(shape("18").getAttribute("class")).not.toContain("warn-");
    // recovery on the next refresh
    backend.failWarnings = false;
    await app.refreshWarnings();
    await app.idle();
    expect(root.querySelector<HTMLElement>("#warning-legend")!.hidden).toBe(false);
  });

  it("changing the warning window refetches the layer", async () => {
    const before = backend.requests.filter((r) => r.url.includes("/warnings")).length;
    const select = root.querySelector<HTMLSelectElement>("#warning-window")!;
    select.value = "P30D";
    select.dispatchEvent(new Event("change"));
    await app.idle();
    const after = backend.requests.filter((r) => r.url.includes("/warnings")).length;
    expect(after).toBe(before + 1);
    expect(backend.requests.at(-1)!.url).toContain("window=P30D");
  });

  it("shows the error banner with retry when the API is unreachable", async () => {
    document.body.innerHTML = "";
    root = document.createElement("div");
    document.body.appendChild(root);
    let online = false;
    const offline = makeBackend();
    const flaky: typeof offline.fetch = (input, init) => {
      if (!online) return Promise.reject(new Error("connection refused"));
      return offline.fetch(input, init);
    };
    app = await bootApp(root, new ApiClient("/api", flaky));
    await app.idle();
    const banner = root.querySelector<HTMLElement>("#error-banner")!;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("connection refused");

    online = true;
    root.querySelector<HTMLButtonElement>("#error-retry")!.click();
    await app.idle();
    expect(banner.hidden).toBe(true);
    expect(shape("18")).toBeTruthy();
  });

  it("selecting via cascade selectors drives the map", async () => {
    const province = root.querySelector<HTMLSelectElement>("#select-level-1")!;
    province.value = "18";
    province.dispatchEvent(new Event("change"));
    await app.idle();
    const regency = root.querySelector<HTMLSelectElement>("#select-level-2")!;
    expect(regency.disabled).toBe(false);
    regency.value = "18.01";
    regency.dispatchEvent(new Event("change"));
    await app.idle();
    const district = root.querySelector<HTMLSelectElement>("#select-level-3")!;
    district.value = "18.01.03";
    district.dispatchEvent(new Event("change"));
    await app.idle();
    expect(app.state().region?.code).toBe("18.01.03");
    // the map now shows the district's villages
    expect(shape(VILLAGE)).toBeTruthy();
    const village = root.querySelector<HTMLSelectElement>("#select-level-4")!;
    village.value = VILLAGE;
    village.dispatchEvent(new Event("change"));
    await app.idle();
    expect(app.state().region?.code).toBe(VILLAGE);
    expect(app.state().region?.level).toBe(4);
  });
});

import type { ApiClient } from "./api.js";
import type { GeoFeature, RegionInfo, WarningLevelName, WarningStatus } from "./types.js";

const VIEW_WIDTH = 800;
const VIEW_HEIGHT = 520;
const PADDING = 16;
const SVG_NS = "http://www.w3.org/2000/svg";

export interface MapCallbacks {
  onSelect(region: RegionInfo): void;
  onError(message: string): void;
}

interface Projector {
  (lon: number, lat: number): [number, number];
}

function ringsOf(feature: GeoFeature): number[][][] {
  const geometry = feature.geometry;
  if (geometry.type === "Polygon") {
    return geometry.coordinates as number[][][];
  }
  return (geometry.coordinates as number[][][][]).flat();
}

function fitProjection(features: GeoFeature[]): Projector {
  let minLon = Infinity;
  let maxLon = -Infinity;
  let minLat = Infinity;
  let maxLat = -Infinity;
  for (const feature of features) {
    for (const ring of ringsOf(feature)) {
      for (const position of ring) {
        const [lon, lat] = position;
        if (lon === undefined || lat === undefined) continue;
        minLon = Math.min(minLon, lon);
        maxLon = Math.max(maxLon, lon);
        minLat = Math.min(minLat, lat);
        maxLat = Math.max(maxLat, lat);
      }
    }
  }
  const lonSpan = Math.max(maxLon - minLon, 1e-9);
  const latSpan = Math.max(maxLat - minLat, 1e-9);
  const scale = Math.min(
    (VIEW_WIDTH - 2 * PADDING) / lonSpan,
    (VIEW_HEIGHT - 2 * PADDING) / latSpan,
  );
  return (lon, lat) => [
    PADDING + (lon - minLon) * scale,
    PADDING + (maxLat - lat) * scale,
  ];
}

function pathData(feature: GeoFeature, project: Projector): string {
  const parts: string[] = [];
  for (const ring of ringsOf(feature)) {
    ring.forEach((position, i) => {
      const [lon, lat] = position;
      if (lon === undefined || lat === undefined) return;
      const [x, y] = project(lon, lat);
      parts.push(`${i === 0 ? "M" : "L"}${x.toFixed(1)},${y.toFixed(1)}`);
    });
    parts.push("Z");
  }
  return parts.join(" ");
}

/**
 * SVG region map with drill-down and a warning-level choropleth.
 *
 * The map renders one hierarchy level at a time: clicking a region selects
 * it for the consultation form and, below village level, drills into its
 * children.  Warning levels arrive from the API and are painted as CSS
 * classes (`warn-none` / `warn-watch` / `warn-warning`).
 */
export class RegionMap {
  private readonly svg: SVGSVGElement;
  private readonly breadcrumb: HTMLElement;
  private stack: RegionInfo[] = [];
  private currentRegions: RegionInfo[] = [];
  private rootRegions: RegionInfo[] = [];
  private levels = new Map<string, WarningLevelName>();
  private shaded = true;
  private selectedCode: string | null = null;
  private readonly pending = new Set<Promise<unknown>>();

  constructor(
    container: HTMLElement,
    private readonly api: ApiClient,
    private readonly callbacks: MapCallbacks,
  ) {
    this.breadcrumb = document.createElement("nav");
    this.breadcrumb.id = "map-breadcrumb";
    container.appendChild(this.breadcrumb);
    this.svg = document.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    this.svg.setAttribute("id", "region-map");
    this.svg.setAttribute("viewBox", `0 0 ${VIEW_WIDTH} ${VIEW_HEIGHT}`);
    container.appendChild(this.svg);
  }

  private track<T>(promise: Promise<T>): Promise<T> {
    const wrapped = promise.finally(() => this.pending.delete(wrapped));
    this.pending.add(wrapped);
    return wrapped;
  }

  /** Number of in-flight click-triggered fetches (test synchronization hook). */
  pendingCount(): number {
    return this.pending.size;
  }

  /** Resolves once all click-triggered async work has settled. */
  async idle(): Promise<void> {
    while (this.pending.size > 0) {
      await Promise.allSettled([...this.pending]);
    }
  }

  /** Entry point: render the top-level regions (provinces). */
  async showRoot(provinces: RegionInfo[]): Promise<void> {
    this.rootRegions = provinces;
    this.stack = [];
    await this.render(provinces);
  }

  async drillInto(region: RegionInfo): Promise<void> {
    try {
      const children = await this.api.getChildren(region.code);
      if (children.length === 0) return;
      this.stack.push(region);
      await this.render(children);
    } catch (err) {
      this.callbacks.onError(err instanceof Error ? err.message : String(err));
    }
  }

  /** Breadcrumb navigation: depth 0 is the province overview. */
  async drillTo(depth: number): Promise<void> {
    this.stack = this.stack.slice(0, depth);
    const parent = this.stack[this.stack.length - 1];
    try {
      const regions = parent ? await this.api.getChildren(parent.code) : this.rootRegions;
      await this.render(regions);
    } catch (err) {
      this.callbacks.onError(err instanceof Error ? err.message : String(err));
    }
  }

  /** Jump straight to a drill path (used to sync with the cascade selectors). */
  async drillPath(path: RegionInfo[]): Promise<void> {
    this.stack = [...path];
    const parent = this.stack[this.stack.length - 1];
    try {
      const regions = parent ? await this.api.getChildren(parent.code) : this.rootRegions;
      await this.render(regions);
    } catch (err) {
      this.callbacks.onError(err instanceof Error ? err.message : String(err));
    }
  }

  setWarningLevels(statuses: WarningStatus[]): void {
    this.levels = new Map(statuses.map((s) => [s.region, s.level]));
    this.shaded = true;
    this.repaint();
  }

  /** Used when the warning layer fails to load: drop all shading. */
  clearWarningLevels(): void {
    this.levels = new Map();
    this.shaded = false;
    this.repaint();
  }

  setSelected(code: string | null): void {
    this.selectedCode = code;
    this.repaint();
  }

  levelOf(code: string): WarningLevelName {
    return this.levels.get(code) ?? "none";
  }

  private async render(regions: RegionInfo[]): Promise<void> {
    this.currentRegions = regions;
    let features: GeoFeature[];
    try {
      features = await Promise.all(regions.map((r) => this.api.getGeometry(r.code)));
    } catch (err) {
      this.callbacks.onError(err instanceof Error ? err.message : String(err));
      return;
    }
    const project = fitProjection(features);
    this.svg.replaceChildren();
    features.forEach((feature, i) => {
      const region = regions[i];
      if (!region) return;
      const path = document.createElementNS(SVG_NS, "path");
      path.setAttribute("d", pathData(feature, project));
      path.setAttribute("data-region-code", region.code);
      path.addEventListener("click", () => this.onShapeClick(region));
      const title = document.createElementNS(SVG_NS, "title");
      title.textContent = `${region.name} (${region.code})`;
      path.appendChild(title);
      this.svg.appendChild(path);
      const label = document.createElementNS(SVG_NS, "text");
      const [cx, cy] = this.centroid(feature, project);
      label.setAttribute("x", cx.toFixed(1));
      label.setAttribute("y", cy.toFixed(1));
      label.setAttribute("class", "region-label");
      label.textContent = region.name;
      this.svg.appendChild(label);
    });
    this.renderBreadcrumb();
    this.repaint();
  }

  private centroid(feature: GeoFeature, project: Projector): [number, number] {
    let x = 0;
    let y = 0;
    let n = 0;
    for (const ring of ringsOf(feature)) {
      for (const position of ring) {
        const [lon, lat] = position;
        if (lon === undefined || lat === undefined) continue;
        const [px, py] = project(lon, lat);
        x += px;
        y += py;
        n += 1;
      }
    }
    return n ? [x / n, y / n] : [VIEW_WIDTH / 2, VIEW_HEIGHT / 2];
  }

  private onShapeClick(region: RegionInfo): void {
    this.callbacks.onSelect(region);
    if (region.level < 4) {
      void this.track(this.drillInto(region));
    }
  }

  private renderBreadcrumb(): void {
    this.breadcrumb.replaceChildren();
    const entries = [{ label: "provinces", depth: 0 }].concat(
      this.stack.map((region, i) => ({ label: region.name, depth: i + 1 })),
    );
    entries.forEach((entry, i) => {
      const button = document.createElement("button");
      button.type = "button";
      button.textContent = entry.label;
      button.className = "crumb";
      button.addEventListener("click", () => void this.track(this.drillTo(entry.depth)));
      this.breadcrumb.appendChild(button);
      if (i < entries.length - 1) {
        this.breadcrumb.appendChild(document.createTextNode(" › "));
      }
    });
  }

  private repaint(): void {
    for (const path of Array.from(this.svg.querySelectorAll("path[data-region-code]"))) {
      const code = path.getAttribute("data-region-code") ?? "";
      const classes = ["region-shape"];
      if (this.shaded) classes.push(`warn-${this.levelOf(code)}`);
      if (code === this.selectedCode) classes.push("selected");
      path.setAttribute("class", classes.join(" "));
    }
  }
}

/** Wire types for the avianwarn JSON API (see docs/api.md in the repo root). */

export interface SymptomInfo {
  id: string;
  label: string;
}

export interface DiseaseInfo {
  id: string;
  label: string;
}

export interface RegionInfo {
  code: string;
  name: string;
  level: number;
  level_name: string;
  parent: string | null;
  has_geometry: boolean;
}

export interface RankedEntry {
  focal: string[];
  mass: number;
}

export interface DiagnosisDoc {
  top: string[];
  top_mass: number;
  ranked: RankedEntry[];
  per_disease: Record<string, { belief: number; plausibility: number }>;
  conflict_trace: number[];
  symptom_ids: string[];
}

export interface ConsultationResponse {
  report_id: number;
  region: string;
  region_name: string;
  timestamp: string;
  diagnosis: DiagnosisDoc;
}

export type WarningLevelName = "none" | "watch" | "warning";

export interface WarningStatus {
  region: string;
  level: WarningLevelName;
  report_count: number;
  window_from: string;
  window_to: string;
}

export interface GeoFeature {
  type: "Feature";
  properties: { code: string; name: string; level: number; level_name: string };
  geometry: {
    type: "Polygon" | "MultiPolygon";
    coordinates: number[][][] | number[][][][];
  };
}

export interface ApiErrorBody {
  error: { code: string; message: string };
}

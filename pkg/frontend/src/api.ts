import type {
  ConsultationResponse,
  DiseaseInfo,
  GeoFeature,
  RegionInfo,
  SymptomInfo,
  WarningStatus,
} from "./types.js";

/** Error raised for any non-2xx API response, carrying the server's error code. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseError(response: Response): Promise<ApiError> {
  try {
    const body = (await response.json()) as { error?: { code?: string; message?: string } };
    return new ApiError(
      response.status,
      body.error?.code ?? "unknown_error",
      body.error?.message ?? `request failed with status ${response.status}`,
    );
  } catch {
    return new ApiError(response.status, "unknown_error", `request failed with status ${response.status}`);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/**
 * Thin typed client over the warning-service endpoints.  The UI reads every
 * number it displays from these responses; nothing is recomputed locally.
 */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = "/api",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async get<T>(path: string, signal?: AbortSignal): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, { signal });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  getSymptoms(): Promise<SymptomInfo[]> {
    return this.get("/symptoms");
  }

  getDiseases(): Promise<DiseaseInfo[]> {
    return this.get("/diseases");
  }

  getRegion(code: string): Promise<RegionInfo> {
    return this.get(`/regions/${code}`);
  }

  getChildren(code: string): Promise<RegionInfo[]> {
    return this.get(`/regions/${code}/children`);
  }

  getGeometry(code: string): Promise<GeoFeature> {
    return this.get(`/regions/${code}/geometry`);
  }

  getWarnings(window: string, signal?: AbortSignal): Promise<WarningStatus[]> {
    return this.get(`/warnings?window=${encodeURIComponent(window)}`, signal);
  }

  async postConsultation(regionCode: string, symptomIds: string[]): Promise<ConsultationResponse> {
    const response = await this.fetchImpl(`${this.baseUrl}/consultations`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ region_code: regionCode, symptom_ids: symptomIds }),
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as ConsultationResponse;
  }
}

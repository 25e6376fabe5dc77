/** Shared test plumbing: a fetch stub that replays captured backend responses. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FetchLike } from "../src/api.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function fixture<T = unknown>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, `${name}.json`), "utf-8")) as T;
}

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export interface BackendStub {
  fetch: FetchLike;
  requests: { method: string; url: string }[];
  /** true once a consultation has been posted; warnings switch fixtures. */
  consulted: boolean;
  failWarnings: boolean;
}

/**
 * Simulates the backend with the captured fixtures.  GET /warnings serves
 * the empty-store capture until a consultation is posted, then the
 * post-consultation capture — mirroring the real store's behavior.
 */
export function makeBackend(): BackendStub {
  const stub: BackendStub = {
    requests: [],
    consulted: false,
    failWarnings: false,
    fetch: async (input, init) => {
      const method = init?.method ?? "GET";
      const url = typeof input === "string" ? input : String(input);
      stub.requests.push({ method, url });
      const path = url.replace(/^.*\/api/, "");

      if (method === "POST" && path === "/consultations") {
        const body = JSON.parse(String(init?.body ?? "{}")) as {
          region_code?: string;
          symptom_ids?: string[];
        };
        if (!body.symptom_ids || body.symptom_ids.length === 0) {
          return jsonResponse(
            { error: { code: "empty_symptoms", message: "at least one symptom is required" } },
            400,
          );
        }
        stub.consulted = true;
        return jsonResponse(fixture("consultation"), 201);
      }
      if (path.startsWith("/warnings")) {
        if (stub.failWarnings) {
          return jsonResponse({ error: { code: "boom", message: "warnings unavailable" } }, 500);
        }
        return jsonResponse(fixture(stub.consulted ? "warnings_after" : "warnings_empty"));
      }
      if (path === "/symptoms") return jsonResponse(fixture("symptoms"));
      if (path === "/diseases") return jsonResponse(fixture("diseases"));

      const regionMatch = /^\/regions\/([0-9.]+)(\/children|\/geometry)?$/.exec(path);
      if (regionMatch) {
        const slug = regionMatch[1]!.replace(/\./g, "_");
        const kind =
          regionMatch[2] === "/children"
            ? "children"
            : regionMatch[2] === "/geometry"
              ? "geometry"
              : "region";
        try {
          return jsonResponse(fixture(`${kind}_${slug}`));
        } catch {
          return jsonResponse(
            { error: { code: "unknown_region", message: `unknown region: ${regionMatch[1]}` } },
            404,
          );
        }
      }
      return jsonResponse({ error: { code: "unknown_route", message: path } }, 404);
    },
  };
  return stub;
}

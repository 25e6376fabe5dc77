import type { ConsultationResponse } from "./types.js";

/**
 * Consultation form state machine.
 *
 * Transitions: editing -> submitting -> result | error; any form
 * interaction from result/error returns to editing, so there are no dead
 * ends.  Submission is only possible from editing with a resolved region
 * (district or village level) and at least one symptom checked.
 */

export type SubmissionStatus = "editing" | "submitting" | "result" | "error";

export interface SelectedRegion {
  code: string;
  name: string;
  level: number;
}

export interface FormState {
  region: SelectedRegion | null;
  symptoms: ReadonlySet<string>;
  status: SubmissionStatus;
  result: ConsultationResponse | null;
  error: string | null;
}

/** Region levels a consultation can be filed against. */
const REPORTABLE_LEVELS = new Set([3, 4]);

export function initialState(): FormState {
  return { region: null, symptoms: new Set(), status: "editing", result: null, error: null };
}

export function canSubmit(state: FormState): boolean {
  return (
    state.status !== "submitting" &&
    state.region !== null &&
    REPORTABLE_LEVELS.has(state.region.level) &&
    state.symptoms.size > 0
  );
}

function backToEditing(state: FormState): FormState {
  if (state.status === "submitting") return state;
  return { ...state, status: "editing", error: null };
}

export function selectRegion(state: FormState, region: SelectedRegion | null): FormState {
  return { ...backToEditing(state), region };
}

export function toggleSymptom(state: FormState, symptomId: string): FormState {
  const symptoms = new Set(state.symptoms);
  if (symptoms.has(symptomId)) {
    symptoms.delete(symptomId);
  } else {
    symptoms.add(symptomId);
  }
  return { ...backToEditing(state), symptoms };
}

export function beginSubmit(state: FormState): FormState {
  if (!canSubmit(state)) return state;
  return { ...state, status: "submitting", error: null };
}

export function submitSucceeded(state: FormState, result: ConsultationResponse): FormState {
  return { ...state, status: "result", result, error: null };
}

export function submitFailed(state: FormState, message: string): FormState {
  return { ...state, status: "error", error: message };
}

/** Config form: client-side validation and PUT /config submission.
 *
 * Invalid forms are blocked before any request is sent; on a server 422 the
 * per-field errors are surfaced for inline rendering. State is only updated
 * from the server's acknowledged document — never optimistically.
 */

import { ServiceConfigForm, STIMULUS_KINDS, StimulusKindName } from "./types.js";

export type FieldErrors = Partial<Record<string, string>>;

export interface FetchLike {
  (url: string, init?: { method?: string; headers?: Record<string, string>; body?: string }): Promise<{
    ok: boolean;
    status: number;
    json(): Promise<unknown>;
  }>;
}

function isKind(v: unknown): v is StimulusKindName {
  return typeof v === "string" && (STIMULUS_KINDS as readonly string[]).includes(v);
}

/** Client-side range checks mirroring the service's own validation. */
export function validateConfigForm(form: ServiceConfigForm): FieldErrors {
  const errors: FieldErrors = {};
  const s = form.stimulus;
  if (!Number.isInteger(s.intensity) || s.intensity < 0 || s.intensity > 100) {
    errors["stimulus.intensity"] = "intensity must be an integer in [0, 100]";
  }
  if (!isKind(s.default_kind)) errors["stimulus.default_kind"] = "unknown stimulus kind";
  if (!isKind(s.quiet_kind)) errors["stimulus.quiet_kind"] = "unknown stimulus kind";
  if (!isKind(s.loud_kind)) errors["stimulus.loud_kind"] = "unknown stimulus kind";
  if (s.quiet_threshold_dbfs < -120 || s.quiet_threshold_dbfs > 0) {
    errors["stimulus.quiet_threshold_dbfs"] = "threshold must be in [-120, 0] dBFS";
  }
  if (!Number.isInteger(form.vote_k) || form.vote_k < 1 || form.vote_k > 10) {
    errors["vote_k"] = "vote_k must be in 1..10";
  }
  if (!(form.chunk_threshold > 0 && form.chunk_threshold < 1)) {
    errors["chunk_threshold"] = "chunk_threshold must be in (0, 1)";
  }
  if (!Number.isInteger(form.refractory_ms) || form.refractory_ms < 0) {
    errors["refractory_ms"] = "refractory_ms must be a non-negative integer";
  }
  return errors;
}

export interface SubmitResult {
  ok: boolean;
  /** Validation errors, client- or server-side, keyed by field name. */
  errors: FieldErrors;
  /** The server's acknowledged config document when ok. */
  config?: ServiceConfigForm;
}

export async function fetchConfig(
  serviceAddr: string,
  fetchFn: FetchLike,
): Promise<ServiceConfigForm> {
  const resp = await fetchFn(`${serviceAddr}/config`);
  if (!resp.ok) throw new Error(`GET /config failed with ${resp.status}`);
  return (await resp.json()) as ServiceConfigForm;
}

export async function submitConfig(
  serviceAddr: string,
  form: ServiceConfigForm,
  fetchFn: FetchLike,
): Promise<SubmitResult> {
  const errors = validateConfigForm(form);
  if (Object.keys(errors).length > 0) {
    return { ok: false, errors };
  }
  const resp = await fetchFn(`${serviceAddr}/config`, {
    method: "PUT",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(form),
  });
  if (resp.ok) {
    return { ok: true, errors: {}, config: (await resp.json()) as ServiceConfigForm };
  }
  if (resp.status === 422) {
    const body = (await resp.json()) as { detail?: unknown };
    return { ok: false, errors: serverErrors(body.detail) };
  }
  return { ok: false, errors: { _form: `server rejected the update (${resp.status})` } };
}

/** Map the service's 422 detail (string or field map) to inline field errors. */
function serverErrors(detail: unknown): FieldErrors {
  if (typeof detail === "string") {
    // the service phrases range errors as "<field> must ..."; attach to the field
    const field = detail.split(" ")[0] ?? "_form";
    return { [field]: detail };
  }
  if (detail && typeof detail === "object") {
    const out: FieldErrors = {};
    for (const [k, v] of Object.entries(detail as Record<string, unknown>)) {
      out[k] = String(v);
    }
    return out;
  }
  return { _form: "invalid configuration" };
}

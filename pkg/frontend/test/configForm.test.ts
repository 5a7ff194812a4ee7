import { describe, expect, it } from "vitest";

import { FetchLike, submitConfig, validateConfigForm } from "../src/configForm.js";
import { ServiceConfigForm } from "../src/types.js";

export function sampleConfig(): ServiceConfigForm {
  return {
    model_path: "model.json",
    device: null,
    stimulus: {
      default_kind: "vibrate",
      intensity: 40,
      escalation_enabled: false,
      quiet_threshold_dbfs: -30,
      quiet_kind: "vibrate",
      loud_kind: "zap",
    },
    vote_k: 7,
    chunk_threshold: 0.5,
    refractory_ms: 30000,
    log_dir: "logs",
    listen_addr: "127.0.0.1:8800",
    seed: 0,
  };
}

interface Call {
  url: string;
  init?: { method?: string; body?: string };
}

function mockFetch(status: number, body: unknown): { fetch: FetchLike; calls: Call[] } {
  const calls: Call[] = [];
  const fetch: FetchLike = async (url, init) => {
    calls.push({ url, init });
    return { ok: status < 400, status, json: async () => body };
  };
  return { fetch, calls };
}

describe("client-side validation", () => {
  it("accepts an in-range form with no errors", () => {
    expect(validateConfigForm(sampleConfig())).toEqual({});
  });

  it("blocks intensity 150 before any request is sent", async () => {
    const form = sampleConfig();
    form.stimulus.intensity = 150;
    const { fetch, calls } = mockFetch(200, {});
    const result = await submitConfig("http://svc", form, fetch);
    expect(result.ok).toBe(false);
    expect(result.errors["stimulus.intensity"]).toMatch(/\[0, 100\]/);
    expect(calls.length).toBe(0);
  });

  it("blocks vote_k outside 1..10", () => {
    for (const bad of [0, 11, 3.5]) {
      const form = sampleConfig();
      form.vote_k = bad;
      expect(validateConfigForm(form)["vote_k"]).toBeDefined();
    }
    for (const good of [1, 7, 10]) {
      const form = sampleConfig();
      form.vote_k = good;
      expect(validateConfigForm(form)["vote_k"]).toBeUndefined();
    }
  });
});

describe("submit", () => {
  it("PUTs the exact field mapping for a valid form", async () => {
    const form = sampleConfig();
    form.stimulus.default_kind = "vibrate";
    form.stimulus.intensity = 40;
    const { fetch, calls } = mockFetch(200, form);
    const result = await submitConfig("http://svc", form, fetch);
    expect(result.ok).toBe(true);
    expect(calls[0]?.url).toBe("http://svc/config");
    expect(calls[0]?.init?.method).toBe("PUT");
    const sent = JSON.parse(calls[0]!.init!.body!);
    expect(sent.stimulus.default_kind).toBe("vibrate");
    expect(sent.stimulus.intensity).toBe(40);
  });

  it("renders a server 422 as an inline field error, no state change", async () => {
    const { fetch } = mockFetch(422, { detail: "vote_k must be in 1..10" });
    const result = await submitConfig("http://svc", sampleConfig(), fetch);
    expect(result.ok).toBe(false);
    expect(result.config).toBeUndefined(); // nothing to apply optimistically
    expect(result.errors["vote_k"]).toContain("vote_k");
  });

  it("only the acknowledged server document is returned on success", async () => {
    const acked = sampleConfig();
    acked.vote_k = 8;
    const { fetch } = mockFetch(200, acked);
    const form = sampleConfig();
    form.vote_k = 8;
    const result = await submitConfig("http://svc", form, fetch);
    expect(result.config?.vote_k).toBe(8);
  });
});

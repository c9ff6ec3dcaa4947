// End-to-end flow against a live backend. Start one with
//   genrelab serve --model model.bundle.json --data-dir /tmp/ui-data --port 8099
// and run GENRELAB_API=http://127.0.0.1:8099 npm test
import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { UiSession } from "../src/session.js";
import { encodeWavPcm16 } from "../src/wav.js";

const base = process.env.GENRELAB_API ?? "";

function sineWav(seconds = 5, freq = 220, rate = 22050): ArrayBuffer {
  const samples = new Float32Array(seconds * rate);
  for (let i = 0; i < samples.length; i++) {
    const pulse = Math.exp(-((i / rate) % 0.5) / 0.05);
    samples[i] = 0.8 * Math.sin((2 * Math.PI * freq * i) / rate) * pulse;
  }
  return encodeWavPcm16(samples, rate);
}

const fetchTransport = async (
  url: string,
  body: Blob | ArrayBuffer,
  sourceName: string,
  onUploadDone: () => void,
) => {
  const response = await fetch(url, {
    method: "POST",
    headers: { "Content-Type": "audio/wav", "X-Source-Name": sourceName },
    body,
  });
  onUploadDone();
  const text = await response.text();
  return { status: response.status, body: text ? JSON.parse(text) : null };
};

describe.skipIf(!base)("live backend", () => {
  it("uploads, renders-shape-checks, labels, and sees the feedback", async () => {
    const client = new ApiClient(base, fetchTransport);
    const session = new UiSession();

    const report = await client.analyze(sineWav(), "integration.wav", session);
    expect(session.current.kind).toBe("done");
    expect(report).not.toBeNull();
    for (const map of Object.values(report!.per_algorithm)) {
      const sum = Object.values(map).reduce((a, b) => a + b, 0);
      expect(Math.abs(sum - 100)).toBeLessThanOrEqual(0.1);
    }

    const submitted = await client.submitLabels(report!.report_id, ["Rock"]);
    expect(submitted).toBe(true);

    const entries = await client.reports(20, 0);
    const mine = entries.find((e) => e.report_id === report!.report_id);
    expect(mine).toBeDefined();
    expect(mine!.user_labels.some((l) => l.genres.includes("Rock"))).toBe(true);
  });

  it("surfaces TOO_SHORT for a one-second clip", async () => {
    const client = new ApiClient(base, fetchTransport);
    const session = new UiSession();
    const result = await client.analyze(sineWav(1), "short.wav", session);
    expect(result).toBeNull();
    expect(session.current).toMatchObject({ kind: "failed", code: "TOO_SHORT" });
  });

  it("accepts five seconds of silence and lets the server judge it", async () => {
    const client = new ApiClient(base, fetchTransport);
    const session = new UiSession();
    const silence = encodeWavPcm16(new Float32Array(5 * 22050), 22050);
    const report = await client.analyze(silence, "silence.wav", session);
    expect(session.current.kind).toBe("done");
    expect(report!.tempo_bpm).toBe(0); // no tempo in silence
  });
});

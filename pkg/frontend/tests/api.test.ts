import { describe, expect, it, vi } from "vitest";

import { AnalyzeTransport, ApiClient } from "../src/api.js";
import { UiSession } from "../src/session.js";
import { fakeReport } from "./session.test.js";

function scriptedTransport(
  result: { status: number; body: unknown },
  options: { settleBeforeUploadDone?: boolean; delayMs?: number } = {},
): AnalyzeTransport {
  return async (_url, _body, _source, onUploadDone) => {
    if (options.delayMs) await new Promise((r) => setTimeout(r, options.delayMs));
    if (!options.settleBeforeUploadDone) onUploadDone();
    return result;
  };
}

const okFetch = (body: unknown, status = 200) =>
  vi.fn(async () =>
    new Response(JSON.stringify(body), { status }),
  ) as unknown as typeof fetch;

describe("ApiClient.analyze", () => {
  it("drives the session through uploading and processing to done", async () => {
    const report = fakeReport();
    const client = new ApiClient("", scriptedTransport({ status: 200, body: report }));
    const session = new UiSession();
    const states: string[] = [];
    session.onChange((s) => states.push(s.kind));

    const result = await client.analyze(new ArrayBuffer(8), "a.wav", session);
    expect(states).toEqual(["uploading", "processing", "done"]);
    expect(result).toEqual(report);
  });

  it("still reaches processing when the transport settles early", async () => {
    const report = fakeReport();
    const client = new ApiClient(
      "", scriptedTransport({ status: 200, body: report },
                            { settleBeforeUploadDone: true }));
    const session = new UiSession();
    const states: string[] = [];
    session.onChange((s) => states.push(s.kind));
    await client.analyze(new ArrayBuffer(8), "a.wav", session);
    expect(states).toEqual(["uploading", "processing", "done"]);
  });

  it("maps server error codes into the failed state", async () => {
    const client = new ApiClient("", scriptedTransport({
      status: 400,
      body: { error: { code: "TOO_SHORT", message: "recording too short" } },
    }));
    const session = new UiSession();
    const result = await client.analyze(new ArrayBuffer(8), "a.wav", session);
    expect(result).toBeNull();
    expect(session.current).toEqual({
      kind: "failed", code: "TOO_SHORT", message: "recording too short",
    });
  });

  it("fails with NETWORK when the transport rejects", async () => {
    const client = new ApiClient("", async () => {
      throw new Error("connection refused");
    });
    const session = new UiSession();
    const result = await client.analyze(new ArrayBuffer(8), "a.wav", session);
    expect(result).toBeNull();
    expect(session.current.kind).toBe("failed");
  });

  it("keeps a slow request in a pending state the whole time", async () => {
    const report = fakeReport();
    const client = new ApiClient(
      "", scriptedTransport({ status: 200, body: report }, { delayMs: 60 }));
    const session = new UiSession();
    const pending = client.analyze(new ArrayBuffer(8), "a.wav", session);
    await new Promise((r) => setTimeout(r, 20));
    expect(session.busy).toBe(true);
    await pending;
    expect(session.current.kind).toBe("done");
  });
});

describe("ApiClient.submitLabels", () => {
  it("posts genres and resolves on 204", async () => {
    const fetchImpl = vi.fn(async () => new Response(null, { status: 204 }));
    const client = new ApiClient("", scriptedTransport({ status: 200, body: {} }),
                                 fetchImpl as unknown as typeof fetch);
    const submitted = await client.submitLabels("abc", ["Rock"]);
    expect(submitted).toBe(true);
    const [url, init] = fetchImpl.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe("/api/v1/reports/abc/labels");
    expect(JSON.parse(init.body as string)).toEqual({ genres: ["Rock"] });
  });

  it("drops a second submit while one is in flight", async () => {
    let resolveFirst: (r: Response) => void = () => {};
    const fetchImpl = vi.fn(
      () => new Promise<Response>((resolve) => { resolveFirst = resolve; }),
    );
    const client = new ApiClient("", scriptedTransport({ status: 200, body: {} }),
                                 fetchImpl as unknown as typeof fetch);
    const first = client.submitLabels("abc", ["Rock"]);
    const second = await client.submitLabels("abc", ["Rock"]);
    expect(second).toBe(false); // double-click guard
    resolveFirst(new Response(null, { status: 204 }));
    expect(await first).toBe(true);
    expect(fetchImpl).toHaveBeenCalledTimes(1);
  });

  it("raises ApiError for 404 and 422", async () => {
    const client = new ApiClient(
      "", scriptedTransport({ status: 200, body: {} }),
      okFetch({ error: { code: "UNKNOWN_REPORT", message: "gone" } }, 404));
    await expect(client.submitLabels("missing", ["Rock"])).rejects.toMatchObject({
      status: 404, code: "UNKNOWN_REPORT",
    });
  });

  it("refuses an empty selection locally", async () => {
    const client = new ApiClient("", scriptedTransport({ status: 200, body: {} }));
    await expect(client.submitLabels("abc", [])).rejects.toMatchObject({
      code: "NO_GENRES",
    });
  });
});

describe("read endpoints", () => {
  it("fetches the genre list", async () => {
    const client = new ApiClient("", scriptedTransport({ status: 200, body: {} }),
                                 okFetch({ genres: ["Blues", "Rock"] }));
    expect(await client.genres()).toEqual(["Blues", "Rock"]);
  });

  it("fetches history pages", async () => {
    const entry = { ...fakeReport(), created_at: "t", source_name: "s", user_labels: [] };
    const client = new ApiClient("", scriptedTransport({ status: 200, body: {} }),
                                 okFetch([entry]));
    const entries = await client.reports(10, 0);
    expect(entries).toHaveLength(1);
    expect(entries[0].source_name).toBe("s");
  });
});

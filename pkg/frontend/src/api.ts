import { AnalyzeResponse, ApiError, HistoryEntry } from "./types.js";
import { UiSession, assertCompleteReport } from "./session.js";

export interface TransportResult {
  status: number;
  body: unknown;
}

/**
 * The analyze upload transport. `onUploadDone` fires once the request body
 * has left the client, which is what moves the session from Uploading to
 * Processing; tests substitute a scripted transport.
 */
export type AnalyzeTransport = (
  url: string,
  body: Blob | ArrayBuffer,
  sourceName: string,
  onUploadDone: () => void,
) => Promise<TransportResult>;

const xhrTransport: AnalyzeTransport = (url, body, sourceName, onUploadDone) =>
  new Promise((resolve, reject) => {
    const xhr = new XMLHttpRequest();
    xhr.open("POST", url);
    xhr.setRequestHeader("Content-Type", "audio/wav");
    xhr.setRequestHeader("X-Source-Name", sourceName);
    xhr.responseType = "text";
    xhr.upload.onloadend = () => onUploadDone();
    xhr.onload = () => {
      let parsed: unknown = null;
      try {
        parsed = xhr.responseText ? JSON.parse(xhr.responseText) : null;
      } catch {
        parsed = null;
      }
      resolve({ status: xhr.status, body: parsed });
    };
    xhr.onerror = () => reject(new Error("network failure"));
    xhr.send(body);
  });

function errorFrom(result: TransportResult): ApiError {
  const body = result.body as { error?: { code?: string; message?: string } } | null;
  return new ApiError(
    result.status,
    body?.error?.code ?? "UNKNOWN",
    body?.error?.message ?? `request failed with status ${result.status}`,
  );
}

export class ApiClient {
  private labelSubmitInFlight = false;

  constructor(
    private readonly baseUrl: string = "",
    private readonly transport: AnalyzeTransport = xhrTransport,
    private readonly fetchImpl: typeof fetch = (...args) => fetch(...args),
  ) {}

  /**
   * POST the WAV body and drive the session through
   * Uploading -> Processing -> Done | Failed. All displayed numbers come
   * verbatim from the response; the client computes nothing.
   */
  async analyze(
    body: Blob | ArrayBuffer,
    sourceName: string,
    session: UiSession,
  ): Promise<AnalyzeResponse | null> {
    session.startUpload();
    let result: TransportResult;
    try {
      result = await this.transport(
        `${this.baseUrl}/api/v1/analyze`,
        body,
        sourceName,
        () => {
          if (session.current.kind === "uploading") session.uploadComplete();
        },
      );
    } catch (err) {
      session.fail("NETWORK", err instanceof Error ? err.message : String(err));
      return null;
    }
    // a transport may settle before its upload callback ran (tiny bodies)
    if (session.current.kind === "uploading") session.uploadComplete();

    if (result.status !== 200) {
      const apiError = errorFrom(result);
      session.fail(apiError.code, apiError.message);
      return null;
    }
    const report = result.body as AnalyzeResponse;
    assertCompleteReport(report);
    session.succeed(report);
    return report;
  }

  async genres(): Promise<string[]> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/v1/genres`);
    const body = (await response.json()) as { genres: string[] };
    return body.genres;
  }

  async health(): Promise<{ status: string; bundle_loaded: boolean }> {
    const response = await this.fetchImpl(`${this.baseUrl}/api/v1/health`);
    return (await response.json()) as { status: string; bundle_loaded: boolean };
  }

  async reports(limit = 50, offset = 0): Promise<HistoryEntry[]> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/api/v1/reports?limit=${limit}&offset=${offset}`,
    );
    return (await response.json()) as HistoryEntry[];
  }

  get labelSubmitBusy(): boolean {
    return this.labelSubmitInFlight;
  }

  /**
   * Submit user genre labels. Re-entrant calls while one is in flight are
   * dropped (returns false), so a double-click cannot produce two records.
   */
  async submitLabels(reportId: string, genres: string[], note = ""): Promise<boolean> {
    if (this.labelSubmitInFlight) return false;
    if (genres.length === 0) throw new ApiError(0, "NO_GENRES", "select at least one genre");
    this.labelSubmitInFlight = true;
    try {
      const response = await this.fetchImpl(
        `${this.baseUrl}/api/v1/reports/${encodeURIComponent(reportId)}/labels`,
        {
          method: "POST",
          headers: { "Content-Type": "application/json" },
          body: JSON.stringify(note ? { genres, note } : { genres }),
        },
      );
      if (response.status !== 204) {
        type ErrorBody = { error?: { code?: string; message?: string } } | null;
        let body: ErrorBody = null;
        try {
          body = (await response.json()) as ErrorBody;
        } catch {
          body = null;
        }
        throw new ApiError(
          response.status,
          body?.error?.code ?? "UNKNOWN",
          body?.error?.message ?? `labels rejected with status ${response.status}`,
        );
      }
      return true;
    } finally {
      this.labelSubmitInFlight = false;
    }
  }
}

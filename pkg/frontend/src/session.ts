import { AnalyzeResponse, ALGORITHM_ORDER } from "./types.js";

export type SessionState =
  | { kind: "idle" }
  | { kind: "uploading" }
  | { kind: "processing" }
  | { kind: "done"; report: AnalyzeResponse }
  | { kind: "failed"; code: string; message: string };

type Listener = (state: SessionState) => void;

/**
 * The analyze request state machine. Exactly one state at a time; every
 * user-initiated analyze walks Idle -> Uploading -> Processing and ends in
 * Done or Failed. Done always carries a complete report.
 */
export class UiSession {
  private state: SessionState = { kind: "idle" };
  private listeners: Listener[] = [];

  get current(): SessionState {
    return this.state;
  }

  get busy(): boolean {
    return this.state.kind === "uploading" || this.state.kind === "processing";
  }

  onChange(listener: Listener): void {
    this.listeners.push(listener);
  }

  private transition(next: SessionState): void {
    this.state = next;
    for (const listener of this.listeners) listener(next);
  }

  startUpload(): void {
    if (this.busy) {
      throw new Error(`cannot start an upload while ${this.state.kind}`);
    }
    this.transition({ kind: "uploading" });
  }

  uploadComplete(): void {
    if (this.state.kind !== "uploading") {
      throw new Error(`uploadComplete is only legal while uploading (was ${this.state.kind})`);
    }
    this.transition({ kind: "processing" });
  }

  succeed(report: AnalyzeResponse): void {
    if (this.state.kind !== "processing") {
      throw new Error(`done must follow processing (was ${this.state.kind})`);
    }
    assertCompleteReport(report);
    this.transition({ kind: "done", report });
  }

  fail(code: string, message: string): void {
    if (!this.busy) {
      throw new Error(`failure is only legal mid-request (was ${this.state.kind})`);
    }
    this.transition({ kind: "failed", code, message });
  }

  reset(): void {
    if (this.busy) {
      throw new Error("cannot reset a request in flight");
    }
    this.transition({ kind: "idle" });
  }
}

export function assertCompleteReport(report: AnalyzeResponse): void {
  if (!report.report_id) throw new Error("report without an id");
  if (!report.consensus) throw new Error("report without a consensus map");
  for (const name of ALGORITHM_ORDER) {
    if (!report.per_algorithm?.[name]) {
      throw new Error(`report missing the ${name} distribution`);
    }
  }
}

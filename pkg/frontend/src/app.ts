import { ApiClient } from "./api.js";
import { renderPie } from "./pie.js";
import { MAX_RECORD_SECONDS, RecorderHandle, startRecording } from "./recorder.js";
import { SessionState, UiSession } from "./session.js";
import { ALGORITHM_ORDER, ALGORITHM_TITLES, AnalyzeResponse, HistoryEntry } from "./types.js";

const STATUS_TEXT: Record<string, string> = {
  idle: "",
  uploading: "Uploading clip…",
  processing: "Analyzing — the five models are listening…",
};

export interface App {
  session: UiSession;
  refreshHistory(): Promise<void>;
  analyzeBlob(body: Blob | ArrayBuffer, sourceName: string): Promise<void>;
}

export function mountApp(root: HTMLElement, client: ApiClient): App {
  root.innerHTML = `
    <header>
      <h1>genrelab</h1>
      <p class="tagline">Five algorithms, one verdict — record a clip and see how they hear it.</p>
    </header>
    <section id="capture">
      <button id="record-btn" class="primary">● Record</button>
      <span id="countdown" hidden></span>
      <label class="file-pick">or pick a file
        <input type="file" id="file-input" accept="audio/wav,.wav">
      </label>
      <div id="status" role="status">
        <span id="spinner" class="spinner" hidden></span>
        <span id="status-text"></span>
      </div>
    </section>
    <section id="results" hidden>
      <div id="topline"></div>
      <div id="charts"></div>
      <div id="labeling">
        <h2>Correct the verdict</h2>
        <p>Tick every genre that fits and help the models learn.</p>
        <div id="genre-boxes"></div>
        <input id="label-note" type="text" placeholder="optional note" maxlength="500">
        <button id="submit-labels" disabled>Submit labels</button>
        <span id="label-status"></span>
      </div>
    </section>
    <section id="history-panel">
      <h2>History</h2>
      <ul id="history"></ul>
    </section>
  `;

  const session = new UiSession();
  const recordBtn = root.querySelector<HTMLButtonElement>("#record-btn")!;
  const countdown = root.querySelector<HTMLSpanElement>("#countdown")!;
  const fileInput = root.querySelector<HTMLInputElement>("#file-input")!;
  const spinner = root.querySelector<HTMLSpanElement>("#spinner")!;
  const statusText = root.querySelector<HTMLSpanElement>("#status-text")!;
  const results = root.querySelector<HTMLElement>("#results")!;
  const topline = root.querySelector<HTMLDivElement>("#topline")!;
  const charts = root.querySelector<HTMLDivElement>("#charts")!;
  const genreBoxes = root.querySelector<HTMLDivElement>("#genre-boxes")!;
  const noteInput = root.querySelector<HTMLInputElement>("#label-note")!;
  const submitLabels = root.querySelector<HTMLButtonElement>("#submit-labels")!;
  const labelStatus = root.querySelector<HTMLSpanElement>("#label-status")!;
  const historyList = root.querySelector<HTMLUListElement>("#history")!;

  let recorder: RecorderHandle | null = null;
  let currentReport: AnalyzeResponse | null = null;

  session.onChange((state) => renderStatus(state));

  function renderStatus(state: SessionState): void {
    spinner.hidden = !(state.kind === "uploading" || state.kind === "processing");
    recordBtn.disabled = session.busy;
    fileInput.disabled = session.busy;
    if (state.kind === "failed") {
      statusText.textContent = `${state.message} — try again?`;
      statusText.className = "error";
    } else {
      statusText.textContent = STATUS_TEXT[state.kind] ?? "";
      statusText.className = "";
    }
  }

  function renderReport(report: AnalyzeResponse): void {
    currentReport = report;
    results.hidden = false;
    topline.textContent =
      `Top genre: ${report.top_genre} · confidence ${report.confidence_percent.toFixed(1)}%` +
      (report.tempo_bpm > 0 ? ` · tempo ${report.tempo_bpm.toFixed(0)} BPM` : "");
    charts.innerHTML = "";
    const maps: [string, Record<string, number>][] = [
      ...ALGORITHM_ORDER.map(
        (name): [string, Record<string, number>] => [name, report.per_algorithm[name]],
      ),
      ["consensus", report.consensus],
    ];
    for (const [name, percentages] of maps) {
      const canvas = document.createElement("canvas");
      canvas.width = 280;
      canvas.height = 250;
      canvas.className = "pie";
      canvas.id = `pie-${name}`;
      charts.appendChild(canvas);
      renderPie(canvas, ALGORITHM_TITLES[name] ?? name, percentages);
    }
    labelStatus.textContent = "";
    updateSubmitEnabled();
  }

  async function analyzeBlob(body: Blob | ArrayBuffer, sourceName: string): Promise<void> {
    const report = await client.analyze(body, sourceName, session);
    if (report) {
      renderReport(report);
      await refreshHistory();
    }
  }

  recordBtn.addEventListener("click", async () => {
    if (recorder?.recording) {
      finishRecording(recorder.stop());
      return;
    }
    try {
      recorder = await startRecording({
        onTick: (left) => {
          countdown.hidden = false;
          countdown.textContent = `${left}s left`;
        },
        onAutoStop: (wav) => finishRecording(wav),
      });
      recordBtn.textContent = "■ Stop";
      countdown.hidden = false;
      countdown.textContent = `${MAX_RECORD_SECONDS}s left`;
    } catch {
      statusText.textContent =
        "Microphone unavailable — pick an audio file instead.";
      statusText.className = "error";
    }
  });

  function finishRecording(wav: Blob): void {
    recorder = null;
    recordBtn.textContent = "● Record";
    countdown.hidden = true;
    void analyzeBlob(wav, "recording.wav");
  }

  fileInput.addEventListener("change", () => {
    const file = fileInput.files?.[0];
    if (file) void analyzeBlob(file, file.name);
    fileInput.value = "";
  });

  function selectedGenres(): string[] {
    return Array.from(
      genreBoxes.querySelectorAll<HTMLInputElement>("input:checked"),
    ).map((box) => box.value);
  }

  function updateSubmitEnabled(): void {
    submitLabels.disabled =
      selectedGenres().length === 0 || client.labelSubmitBusy || !currentReport;
  }

  void client.genres().then((names) => {
    genreBoxes.innerHTML = "";
    for (const name of names) {
      const label = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.value = name;
      box.addEventListener("change", updateSubmitEnabled);
      label.appendChild(box);
      label.appendChild(document.createTextNode(name));
      genreBoxes.appendChild(label);
    }
  });

  submitLabels.addEventListener("click", async () => {
    if (!currentReport) return;
    const genres = selectedGenres();
    if (genres.length === 0) return;
    submitLabels.disabled = true;
    try {
      const submitted = await client.submitLabels(
        currentReport.report_id, genres, noteInput.value,
      );
      if (submitted) {
        labelStatus.textContent = `Thanks — saved ${genres.join(", ")}.`;
        labelStatus.className = "ok";
        await refreshHistory();
      }
    } catch (err) {
      labelStatus.textContent = err instanceof Error ? err.message : String(err);
      labelStatus.className = "error";
    } finally {
      updateSubmitEnabled();
    }
  });

  async function refreshHistory(): Promise<void> {
    let entries: HistoryEntry[];
    try {
      entries = await client.reports();
    } catch {
      historyList.innerHTML = `<li class="offline">service unreachable</li>`;
      return;
    }
    historyList.innerHTML = "";
    if (entries.length === 0) {
      historyList.innerHTML = `<li class="placeholder">no analyses yet</li>`;
      return;
    }
    for (const entry of entries) {
      const item = document.createElement("li");
      const labels = entry.user_labels.flatMap((l) => l.genres);
      item.innerHTML =
        `<button class="entry" data-report="${entry.report_id}">` +
        `<strong>${entry.source_name || "clip"}</strong> · ${entry.created_at} · ` +
        `${entry.top_genre} ${entry.confidence_percent.toFixed(1)}%` +
        (labels.length ? ` · <em>labeled: ${labels.join(", ")}</em>` : "") +
        `</button>`;
      item.querySelector("button")!.addEventListener("click", () => renderReport(entry));
      historyList.appendChild(item);
    }
  }

  void refreshHistory();

  return { session, refreshHistory, analyzeBlob };
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mountApp(document.getElementById("app")!, new ApiClient(""));
}

"""genrelab command line: train, synth, analyze, evaluate, replay-grid, serve.

Exit codes: 0 success, 1 usage error, 2 data error. Errors go to stderr
with a stable ``ERROR <CODE>:`` prefix.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .audio import decode_wav, normalize_clip
from .charts import render_grid_figure, render_report_charts
from .corpus import write_corpus
from .errors import GenrelabError, InsufficientData, IoFailure
from .evaluation import (
    GRID_COUNT_DISCREPANCY_NOTE,
    classify_report,
    grid_to_csv,
    load_grid_csv,
    run_protocol,
)
from .features import extract_features, features_csv_header, features_to_csv_row
from .genres import GENRES, genre_code
from .models import MODEL_NAMES, train_all
from .service import analyze_response_body, create_server
from .store import DEFAULT_DATA_DIR, Store, load_bundle, save_bundle

PUBLISHED_GRID = Path(__file__).parent / "data" / "published_grid.csv"

BAR_WIDTH = 40


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"ERROR USAGE: {message}\n")
        sys.exit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="genrelab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"genrelab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train the five models on a genre-directory corpus")
    train.add_argument("--dataset", required=True, help="directory with one subdirectory per genre")
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--out", required=True, help="bundle output path")
    train.add_argument("--include-feedback", action="store_true",
                       help="also train on stored user feedback rows")
    train.add_argument("--data-dir", default=None, help="store directory for feedback rows")

    synth = sub.add_parser("synth", help="write a synthetic labeled corpus")
    synth.add_argument("--out", required=True)
    synth.add_argument("--per-genre", type=int, required=True)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--duration", type=float, default=30.0)

    analyze = sub.add_parser("analyze", help="classify one audio file")
    analyze.add_argument("file")
    analyze.add_argument("--model", required=True)
    analyze.add_argument("--format", choices=("json", "text"), default="text")
    analyze.add_argument("--charts", default=None,
                         help="directory for rendered pie-chart PNGs")

    evaluate = sub.add_parser("evaluate", help="run the 5-run Green/Red protocol")
    evaluate.add_argument("--manifest", required=True,
                          help="CSV of song path, truth genres (semicolon-separated)")
    evaluate.add_argument("--model", required=True)
    evaluate.add_argument("--runs", type=int, default=5)
    evaluate.add_argument("--seed", type=int, default=0)
    evaluate.add_argument("--out", required=True, help="grid CSV output path")
    evaluate.add_argument("--figure", default=None, help="optional grid figure PNG path")

    replay = sub.add_parser("replay-grid", help="aggregate a published-format outcome grid")
    replay.add_argument("fixture", nargs="?", default=str(PUBLISHED_GRID))

    features = sub.add_parser("features", help="emit feature-vector CSV rows for audio files")
    features.add_argument("files", nargs="+")
    features.add_argument("--out", default=None)

    serve = sub.add_parser("serve", help="serve the HTTP API and the web UI")
    serve.add_argument("--model", default=None)
    serve.add_argument("--data-dir", default=None)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8080)
    serve.add_argument("--static", default=None, help="directory of built web UI assets")
    serve.add_argument("--cors-allow-all", action="store_true")
    serve.add_argument("--verbose", action="store_true")

    return parser


def _resolve_data_dir(flag_value: str | None) -> str:
    return flag_value or os.environ.get("GENRELAB_DATA_DIR") or DEFAULT_DATA_DIR


def _load_dataset(dataset_dir: Path) -> tuple[np.ndarray, np.ndarray]:
    if not dataset_dir.is_dir():
        raise InsufficientData(f"dataset directory {dataset_dir} does not exist")
    rows, labels = [], []
    genre_dirs = sorted(p for p in dataset_dir.iterdir() if p.is_dir())
    if not genre_dirs:
        raise InsufficientData(f"{dataset_dir} holds no genre subdirectories")
    for genre_dir in genre_dirs:
        try:
            code = genre_code(genre_dir.name)
        except ValueError as exc:
            raise InsufficientData(str(exc)) from exc
        for wav in sorted(genre_dir.glob("*.wav")):
            clip = normalize_clip(decode_wav(wav.read_bytes()))
            rows.append(extract_features(clip))
            labels.append(code)
    if not rows:
        raise InsufficientData(f"no .wav files found under {dataset_dir}")
    return np.array(rows), np.array(labels)


def cmd_train(args) -> int:
    rows, labels = _load_dataset(Path(args.dataset))
    if args.include_feedback:
        store = Store(_resolve_data_dir(args.data_dir))
        feedback_rows = store.export_training_feedback()
        if feedback_rows:
            rows = np.vstack([rows] + [row[None, :] for row, _ in feedback_rows])
            labels = np.concatenate([labels, [code for _, code in feedback_rows]])
        print(f"included {len(feedback_rows)} feedback rows")
    bundle = train_all(rows, labels, seed=args.seed)
    save_bundle(bundle, args.out)
    print(f"trained 5 models on {rows.shape[0]} clips; bundle written to {args.out}")
    return 0


def cmd_synth(args) -> int:
    if args.per_genre < 1:
        raise InsufficientData("--per-genre must be >= 1")
    written = write_corpus(args.out, per_genre=args.per_genre, seed=args.seed,
                           duration_s=args.duration)
    print(f"wrote {len(written)} clips across {len(GENRES)} genres under {args.out}")
    return 0


def _ascii_bar(fraction: float) -> str:
    filled = int(round(fraction * BAR_WIDTH))
    return "#" * filled + "." * (BAR_WIDTH - filled)


def cmd_analyze(args) -> int:
    bundle = load_bundle(args.model)
    clip = decode_wav(Path(args.file).read_bytes())
    report = classify_report(bundle, clip)
    body = analyze_response_body(report)

    if args.format == "json":
        print(json.dumps(body, indent=2))
    else:
        print(f"file: {args.file}")
        print(f"top genre: {body['top_genre']}  "
              f"confidence: {body['confidence_percent']:.2f}%  "
              f"tempo: {body['tempo_bpm']:.1f} BPM")
        print()
        for name in MODEL_NAMES:
            probs = report.per_algorithm[name]
            top = int(np.argmax(probs))
            print(f"{name:>7}  {GENRES[top]:<11} [{_ascii_bar(float(probs[top]))}] "
                  f"{100.0 * float(probs[top]):5.1f}%")
        print()
        print("consensus:")
        order = np.argsort(-report.consensus, kind="stable")
        for code in order:
            pct = float(report.consensus[code]) * 100.0
            if pct < 0.05:
                continue
            print(f"  {GENRES[code]:<11} [{_ascii_bar(float(report.consensus[code]))}] {pct:5.1f}%")

    if args.charts:
        written = render_report_charts(report.per_algorithm, report.consensus,
                                       args.charts, stem=report.report_id[:8])
        for path in written:
            print(f"chart: {path}")
    return 0


def _load_manifest(path: Path) -> list[tuple[str, Path, set[int]]]:
    if not path.is_file():
        raise IoFailure(f"manifest {path} does not exist")
    songs = []
    with open(path, newline="", encoding="utf-8") as handle:
        for line in csv.reader(handle):
            if not line or line[0].strip().lower() in ("path", "song path"):
                continue
            if len(line) < 2:
                raise ValueError(f"manifest row needs path and truth: {line!r}")
            song_path = Path(line[0].strip())
            truth = {genre_code(name) for name in line[1].split(";") if name.strip()}
            songs.append((song_path.stem, song_path, truth))
    if not songs:
        raise ValueError(f"manifest {path} holds no songs")
    return songs


def cmd_evaluate(args) -> int:
    bundle = load_bundle(args.model)
    manifest = _load_manifest(Path(args.manifest))
    songs = []
    for song_id, song_path, truth in manifest:
        clip = decode_wav(song_path.read_bytes())
        songs.append((song_id, clip, truth))
    grid = run_protocol(bundle, songs, runs=args.runs, seed=args.seed)
    Path(args.out).write_text(grid_to_csv(grid), encoding="utf-8")
    print(f"{grid.success_count}/{grid.total} Green, "
          f"success_rate={100.0 * grid.success_rate:.1f}%")
    print(f"grid written to {args.out}")
    if args.figure:
        render_grid_figure(grid, args.figure)
        print(f"figure written to {args.figure}")
    return 0


def cmd_replay_grid(args) -> int:
    fixture = Path(args.fixture)
    if not fixture.is_file():
        raise IoFailure(f"grid fixture {fixture} does not exist")
    grid = load_grid_csv(fixture.read_text(encoding="utf-8"))
    print(f"{grid.success_count}/{grid.total} Green, "
          f"success_rate={100.0 * grid.success_rate:.1f}%")
    if fixture.read_text(encoding="utf-8") == PUBLISHED_GRID.read_text(encoding="utf-8"):
        print(GRID_COUNT_DISCREPANCY_NOTE)
    return 0


def cmd_features(args) -> int:
    lines = [features_csv_header()]
    for file in args.files:
        clip = normalize_clip(decode_wav(Path(file).read_bytes()))
        lines.append(features_to_csv_row(extract_features(clip)))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {len(args.files)} feature rows to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_serve(args) -> int:
    data_dir = Path(_resolve_data_dir(args.data_dir))
    model_path = Path(args.model) if args.model else data_dir / "model.bundle.json"
    if args.model or model_path.is_file():
        bundle = load_bundle(model_path)
    else:
        bundle = None
    store = Store(data_dir)
    server = create_server(bundle, store, host=args.host, port=args.port,
                           static_dir=args.static, cors_allow_all=args.cors_allow_all,
                           verbose=args.verbose)
    print(f"serving on http://{args.host}:{server.server_address[1]} "
          f"(bundle {'loaded' if bundle else 'not loaded'}, "
          f"data dir {store.data_dir})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


_HANDLERS = {
    "train": cmd_train,
    "synth": cmd_synth,
    "analyze": cmd_analyze,
    "evaluate": cmd_evaluate,
    "replay-grid": cmd_replay_grid,
    "features": cmd_features,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors exit 1, --help/--version exit 0
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except GenrelabError as exc:
        sys.stderr.write(f"ERROR {exc.code}: {exc}\n")
        return 2
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"ERROR INVALID_DATA: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())

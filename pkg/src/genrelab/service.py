"""HTTP service: analyze clips, page history, accept user genre labels.

Endpoints (JSON bodies, UTF-8):

    POST /api/v1/analyze               WAV bytes -> AnalyzeResponse
    POST /api/v1/reports/{id}/labels   {"genres": [...], "note": ...} -> 204
    GET  /api/v1/reports?limit&offset  newest-first history page
    GET  /api/v1/genres                the 11 canonical names in code order
    GET  /api/v1/health                {"status": ..., "bundle_loaded": ...}

Analyze is synchronous (desk-scale clips classify in well under a second);
the UI owns the loading indicator. Errors carry stable machine-readable
codes: {"error": {"code": ..., "message": ...}}.
"""
from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, unquote, urlparse

import numpy as np

from .errors import GenrelabError, UnknownReportId
from .evaluation import ClassificationReport, classify_report
from .genres import GENRES, genre_name
from .models import MODEL_NAMES, ModelBundle
from .store import Store, new_feedback

MAX_UPLOAD_BYTES = 50 * 1024 * 1024

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "application/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".png": "image/png",
    ".svg": "image/svg+xml",
    ".ico": "image/x-icon",
    ".map": "application/json",
}


def _percent_map(probs: np.ndarray) -> dict[str, float]:
    return {genre_name(code): round(float(p) * 100.0, 2) for code, p in enumerate(probs)}


def analyze_response_body(report: ClassificationReport) -> dict:
    return {
        "report_id": report.report_id,
        "per_algorithm": {
            name: _percent_map(report.per_algorithm[name]) for name in MODEL_NAMES
        },
        "consensus": _percent_map(report.consensus),
        "top_genre": report.top_genre_name,
        "confidence_percent": round(report.confidence * 100.0, 2),
        "tempo_bpm": round(report.tempo_bpm, 1),
    }


def history_entry_body(entry) -> dict:
    report = entry.report
    body = analyze_response_body(report)
    body["created_at"] = report.created_at
    body["source_name"] = entry.source_name
    body["user_labels"] = [
        {
            "genres": [genre_name(code) for code in sorted(record.user_genres)],
            "submitted_at": record.submitted_at,
            "note": record.note,
        }
        for record in entry.feedback
    ]
    return body


class ApiHandler(BaseHTTPRequestHandler):
    server_version = "genrelab"
    protocol_version = "HTTP/1.1"

    # injected via the server instance
    @property
    def bundle(self) -> ModelBundle | None:
        return self.server.bundle

    @property
    def store(self) -> Store:
        return self.server.store

    def log_message(self, fmt, *args):
        if getattr(self.server, "verbose", False):
            super().log_message(fmt, *args)

    def _cors_headers(self):
        if getattr(self.server, "cors_allow_all", False):
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type, X-Source-Name")

    def _send_json(self, status: int, body: dict | list, close: bool = False):
        payload = json.dumps(body).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(payload)))
        self._cors_headers()
        if close:
            self.send_header("Connection", "close")
            self.close_connection = True
        self.end_headers()
        self.wfile.write(payload)

    def _send_error_json(self, status: int, code: str, message: str, close: bool = False):
        self._send_json(status, {"error": {"code": code, "message": message}}, close=close)

    def _send_empty(self, status: int):
        self.send_response(status)
        self.send_header("Content-Length", "0")
        self._cors_headers()
        self.end_headers()

    def _read_body(self) -> bytes | None:
        length = int(self.headers.get("Content-Length") or 0)
        if length > MAX_UPLOAD_BYTES:
            self._send_error_json(
                413, "PAYLOAD_TOO_LARGE",
                f"body exceeds the {MAX_UPLOAD_BYTES // (1024 * 1024)} MB upload cap",
                close=True,
            )
            return None
        return self.rfile.read(length)

    def do_OPTIONS(self):
        self._send_empty(204)

    def do_POST(self):
        path = urlparse(self.path).path
        if path == "/api/v1/analyze":
            self._handle_analyze()
            return
        parts = [p for p in path.split("/") if p]
        if (len(parts) == 5 and parts[:3] == ["api", "v1", "reports"]
                and parts[4] == "labels"):
            self._handle_labels(unquote(parts[3]))
            return
        self._send_error_json(404, "NOT_FOUND", f"no route for POST {path}")

    def _handle_analyze(self):
        body = self._read_body()
        if body is None:
            return
        if self.bundle is None:
            self._send_error_json(503, "NO_BUNDLE", "no model bundle loaded")
            return
        from .audio import decode_wav  # local import keeps handler import-light

        try:
            clip = decode_wav(body)
            report = classify_report(self.bundle, clip)
        except GenrelabError as exc:
            code = "MALFORMED_AUDIO" if exc.code in (
                "MALFORMED_AUDIO", "UNSUPPORTED_ENCODING", "EMPTY_AUDIO"
            ) else exc.code
            self._send_error_json(400, code, str(exc))
            return
        source_name = self.headers.get("X-Source-Name", "upload.wav")
        self.store.append_report(report, source_name=source_name)
        self._send_json(200, analyze_response_body(report))

    def _handle_labels(self, report_id: str):
        body = self._read_body()
        if body is None:
            return
        try:
            doc = json.loads(body.decode("utf-8"))
            genres = doc.get("genres")
            note = doc.get("note", "") or ""
        except (json.JSONDecodeError, UnicodeDecodeError, AttributeError):
            self._send_error_json(422, "INVALID_BODY", "body must be a JSON object")
            return
        if not isinstance(genres, list) or not genres:
            self._send_error_json(
                422, "INVALID_GENRES",
                f"genres must be a non-empty list drawn from: {', '.join(GENRES)}",
            )
            return
        try:
            record = new_feedback(report_id, genres, note=note)
        except ValueError as exc:
            self._send_error_json(422, "INVALID_GENRES", str(exc))
            return
        try:
            self.store.append_feedback(record)
        except UnknownReportId as exc:
            self._send_error_json(404, "UNKNOWN_REPORT", str(exc))
            return
        self._send_empty(204)

    def do_GET(self):
        parsed = urlparse(self.path)
        path = parsed.path
        if path == "/api/v1/health":
            self._send_json(200, {"status": "ok", "bundle_loaded": self.bundle is not None})
        elif path == "/api/v1/genres":
            self._send_json(200, {"genres": list(GENRES)})
        elif path == "/api/v1/reports":
            self._handle_reports(parsed.query)
        elif path.startswith("/api/"):
            self._send_error_json(404, "NOT_FOUND", f"no route for GET {path}")
        else:
            self._serve_static(path)

    def _handle_reports(self, query: str):
        params = parse_qs(query)
        try:
            limit = int(params.get("limit", ["50"])[0])
            offset = int(params.get("offset", ["0"])[0])
        except ValueError:
            self._send_error_json(422, "INVALID_PAGING", "limit and offset must be integers")
            return
        if limit < 0 or offset < 0:
            self._send_error_json(422, "INVALID_PAGING", "limit and offset must be >= 0")
            return
        entries = self.store.list_history(limit=limit, offset=offset)
        self._send_json(200, [history_entry_body(entry) for entry in entries])

    def _serve_static(self, path: str):
        static_dir = getattr(self.server, "static_dir", None)
        if static_dir is None:
            self._send_error_json(404, "NOT_FOUND", "static serving is disabled")
            return
        relative = unquote(path).lstrip("/") or "index.html"
        root = Path(static_dir).resolve()
        target = (root / relative).resolve()
        if not target.is_file() or root not in target.parents and target != root:
            self._send_error_json(404, "NOT_FOUND", f"no static file {path}")
            return
        payload = target.read_bytes()
        self.send_response(200)
        content_type = _CONTENT_TYPES.get(target.suffix.lower(), "application/octet-stream")
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(payload)))
        self._cors_headers()
        self.end_headers()
        self.wfile.write(payload)


class ApiServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, bundle: ModelBundle | None, store: Store,
                 static_dir: str | None = None, cors_allow_all: bool = False,
                 verbose: bool = False):
        super().__init__(address, ApiHandler)
        self.bundle = bundle
        self.store = store
        self.static_dir = static_dir
        self.cors_allow_all = cors_allow_all
        self.verbose = verbose


def create_server(bundle: ModelBundle | None, store: Store, host: str = "127.0.0.1",
                  port: int = 8080, static_dir: str | None = None,
                  cors_allow_all: bool = False, verbose: bool = False) -> ApiServer:
    return ApiServer((host, port), bundle, store, static_dir=static_dir,
                     cors_allow_all=cors_allow_all, verbose=verbose)


def serve_in_thread(server: ApiServer) -> threading.Thread:
    """Run a server on a daemon thread (tests and embedded use)."""
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return thread

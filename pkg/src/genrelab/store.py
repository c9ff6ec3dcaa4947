"""Persistence: versioned model bundles, history and feedback journals.

The bundle is one JSON document (schema_version 1). History and feedback
are append-only JSON Lines files, one object per line, flushed per append,
so readers running concurrently with the single writer only ever see whole
records. Reports persist their feature vector, so retraining never needs
the original audio.
"""
from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CorruptBundle, IoFailure, SchemaVersionMismatch, UnknownReportId
from .evaluation import ClassificationReport, utc_now_rfc3339
from .genres import genre_code, genre_name
from .models import (
    GaussianNaiveBayes,
    KnnClassifier,
    MlpClassifier,
    ModelBundle,
    RandomForest,
    Scaler,
)
from .models.bundle import MODEL_NAMES, SCHEMA_VERSION
from .models.tree import DecisionTree

HISTORY_FILE = "history.jsonl"
FEEDBACK_FILE = "feedback.jsonl"
DEFAULT_DATA_DIR = "./genrelab-data"
MAX_NOTE_LENGTH = 500

_MODEL_CLASSES = {
    "knn": KnnClassifier,
    "gnb": GaussianNaiveBayes,
    "tree": DecisionTree,
    "forest": RandomForest,
    "mlp": MlpClassifier,
}


def bundle_to_dict(bundle: ModelBundle) -> dict:
    return {
        "schema_version": bundle.schema_version,
        "train_seed": bundle.train_seed,
        "feature_layout": bundle.feature_layout,
        "genres": list(bundle.genres),
        "scaler": bundle.scaler.to_dict(),
        "models": {name: model.to_dict() for name, model in bundle.models().items()},
    }


def bundle_from_dict(doc: dict) -> ModelBundle:
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatch(
            f"bundle schema_version {version!r} unsupported (expected {SCHEMA_VERSION})"
        )
    try:
        models = doc["models"]
        if set(models) != set(MODEL_NAMES):
            raise KeyError(f"bundle must hold exactly the models {MODEL_NAMES}")
        return ModelBundle(
            scaler=Scaler.from_dict(doc["scaler"]),
            knn=KnnClassifier.from_dict(models["knn"]),
            gnb=GaussianNaiveBayes.from_dict(models["gnb"]),
            tree=DecisionTree.from_dict(models["tree"]),
            forest=RandomForest.from_dict(models["forest"]),
            mlp=MlpClassifier.from_dict(models["mlp"]),
            train_seed=int(doc["train_seed"]),
            genres=tuple(doc["genres"]),
            feature_layout=str(doc["feature_layout"]),
        )
    except SchemaVersionMismatch:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptBundle(f"bundle document invalid: {exc}") from exc


def save_bundle(bundle: ModelBundle, path: str | Path) -> None:
    try:
        Path(path).write_text(json.dumps(bundle_to_dict(bundle)), encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write bundle to {path}: {exc}") from exc


def load_bundle(path: str | Path) -> ModelBundle:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read bundle from {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptBundle(f"bundle is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise CorruptBundle("bundle document must be a JSON object")
    return bundle_from_dict(doc)


@dataclass
class FeedbackRecord:
    report_id: str
    user_genres: frozenset[int]
    submitted_at: str
    note: str = ""

    def __post_init__(self):
        if not self.user_genres:
            raise ValueError("user_genres must be non-empty")
        for code in self.user_genres:
            genre_name(code)  # validates range
        if len(self.note) > MAX_NOTE_LENGTH:
            raise ValueError(f"note exceeds {MAX_NOTE_LENGTH} characters")


@dataclass
class HistoryEntry:
    report: ClassificationReport
    source_name: str
    feedback: list[FeedbackRecord] = field(default_factory=list)


def _report_to_doc(report: ClassificationReport, source_name: str) -> dict:
    return {
        "report_id": report.report_id,
        "created_at": report.created_at,
        "source_name": source_name,
        "per_algorithm": {k: v.tolist() for k, v in report.per_algorithm.items()},
        "consensus": report.consensus.tolist(),
        "top_genre": genre_name(report.top_genre),
        "confidence": report.confidence,
        "tempo_bpm": report.tempo_bpm,
        "features": report.features.tolist(),
    }


def _report_from_doc(doc: dict) -> tuple[ClassificationReport, str]:
    report = ClassificationReport(
        report_id=doc["report_id"],
        created_at=doc["created_at"],
        per_algorithm={k: np.array(v) for k, v in doc["per_algorithm"].items()},
        consensus=np.array(doc["consensus"]),
        top_genre=genre_code(doc["top_genre"]),
        confidence=float(doc["confidence"]),
        tempo_bpm=float(doc["tempo_bpm"]),
        features=np.array(doc["features"]),
    )
    return report, doc.get("source_name", "")


class Store:
    """History and feedback journals under one data directory.

    Mutations are serialized through a single lock; appends are one
    flushed line each, so concurrent readers never see torn records.
    """

    def __init__(self, data_dir: str | Path = DEFAULT_DATA_DIR):
        self.data_dir = Path(data_dir)
        self.history_path = self.data_dir / HISTORY_FILE
        self.feedback_path = self.data_dir / FEEDBACK_FILE
        self._write_lock = threading.Lock()
        try:
            self.data_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise IoFailure(f"cannot create data dir {data_dir}: {exc}") from exc

    def _append_line(self, path: Path, doc: dict) -> None:
        line = json.dumps(doc) + "\n"
        try:
            with self._write_lock, open(path, "a", encoding="utf-8") as handle:
                handle.write(line)
                handle.flush()
                os.fsync(handle.fileno())
        except OSError as exc:
            raise IoFailure(f"cannot append to {path}: {exc}") from exc

    def _read_lines(self, path: Path) -> list[dict]:
        if not path.exists():
            return []
        docs = []
        try:
            with open(path, encoding="utf-8") as handle:
                for line in handle:
                    line = line.strip()
                    if line:
                        docs.append(json.loads(line))
        except OSError as exc:
            raise IoFailure(f"cannot read {path}: {exc}") from exc
        return docs

    def append_report(self, report: ClassificationReport, source_name: str = "") -> str:
        self._append_line(self.history_path, _report_to_doc(report, source_name))
        return report.report_id

    def has_report(self, report_id: str) -> bool:
        return any(doc["report_id"] == report_id
                   for doc in self._read_lines(self.history_path))

    def append_feedback(self, record: FeedbackRecord) -> None:
        if not self.has_report(record.report_id):
            raise UnknownReportId(f"no stored report with id {record.report_id!r}")
        self._append_line(self.feedback_path, {
            "report_id": record.report_id,
            "user_genres": [genre_name(code) for code in sorted(record.user_genres)],
            "submitted_at": record.submitted_at,
            "note": record.note,
        })

    def _feedback_by_report(self) -> dict[str, list[FeedbackRecord]]:
        grouped: dict[str, list[FeedbackRecord]] = {}
        for doc in self._read_lines(self.feedback_path):
            record = FeedbackRecord(
                report_id=doc["report_id"],
                user_genres=frozenset(genre_code(g) for g in doc["user_genres"]),
                submitted_at=doc["submitted_at"],
                note=doc.get("note", ""),
            )
            grouped.setdefault(record.report_id, []).append(record)
        for records in grouped.values():
            records.sort(key=lambda r: r.submitted_at)
        return grouped

    def list_history(self, limit: int = 50, offset: int = 0) -> list[HistoryEntry]:
        """Newest-first page of stored reports with their feedback."""
        docs = self._read_lines(self.history_path)
        feedback = self._feedback_by_report()
        entries = []
        for doc in reversed(docs):
            report, source_name = _report_from_doc(doc)
            entries.append(HistoryEntry(
                report=report,
                source_name=source_name,
                feedback=feedback.get(report.report_id, []),
            ))
        return entries[offset : offset + limit]

    def export_training_feedback(self) -> list[tuple[np.ndarray, int]]:
        """(feature vector, genre) rows from user labels, in append order.

        Multi-genre feedback fans out to one row per genre (the models are
        single-label); genres within one record emit in code order.
        """
        features_by_id = {
            doc["report_id"]: np.array(doc["features"])
            for doc in self._read_lines(self.history_path)
        }
        rows = []
        for doc in self._read_lines(self.feedback_path):
            features = features_by_id.get(doc["report_id"])
            if features is None:
                continue
            for name in doc["user_genres"]:  # stored sorted by code
                rows.append((features, genre_code(name)))
        return rows


def new_feedback(report_id: str, genre_names: list[str], note: str = "") -> FeedbackRecord:
    """Build a validated feedback record with a fresh UTC timestamp."""
    codes = frozenset(genre_code(name) for name in genre_names)
    return FeedbackRecord(
        report_id=report_id,
        user_genres=codes,
        submitted_at=utc_now_rfc3339(),
        note=note,
    )

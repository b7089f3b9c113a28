"""HTTP service: submission intake, quality gate, recognition, results.

Submissions move through received → checking → (rejected | predicting)
→ (done | failed), driven by a worker pool. Status polls read the same
persisted record the pipeline writes, so observed states are always a
subsequence of that machine. Progress is modeled from the latency fit
rather than model internals, capped at 0.99 until results exist.

Raw uploads are written to the media area only for the duration of
pose extraction and deleted right after unless retention is enabled;
only landmark files and result documents persist.
"""

from __future__ import annotations

import importlib.resources
import json
import logging
import os
import sqlite3
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from contextlib import asynccontextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from fastapi import FastAPI, File, Form, HTTPException, UploadFile
from fastapi.responses import HTMLResponse, JSONResponse, Response

from . import __version__, gate as gate_mod
from .catalog import VocabularyCatalog, load_catalog
from .estimate import FilePoseEstimator, PoseEstimator, SyntheticPoseEstimator, SYNTH_PREFIX
from .evalmetrics import LatencyModel, latency_fit
from .pose import PoseSequence, trim, write_pose_file
from .ranking import compose_view, filter_results, rank
from .recognizer import Distribution, TrainedModel, load_model, predict

log = logging.getLogger("signdict.service")

STATE_RECEIVED = "received"
STATE_CHECKING = "checking"
STATE_REJECTED = "rejected"
STATE_PREDICTING = "predicting"
STATE_DONE = "done"
STATE_FAILED = "failed"

LEGAL_TRANSITIONS = {
    STATE_RECEIVED: {STATE_CHECKING},
    STATE_CHECKING: {STATE_REJECTED, STATE_PREDICTING},
    STATE_PREDICTING: {STATE_DONE, STATE_FAILED},
    STATE_REJECTED: set(),
    STATE_DONE: set(),
    STATE_FAILED: set(),
}

DEFAULT_MAX_UPLOAD = 100 * 1024 * 1024


def packaged_latency_observations() -> list[tuple[float, float]]:
    blob = importlib.resources.files("signdict").joinpath(
        "data/latency_observations.json"
    ).read_text(encoding="utf-8")
    doc = json.loads(blob)
    return [(float(x), float(y)) for x, y in doc["observations"]]


@dataclass
class ServiceConfig:
    storage_dir: Path
    model_path: Path
    catalog_path: Path
    retain_media: bool = False
    latency_calibration_path: Path | None = None  # None -> packaged observations
    latency_live_update: bool = False
    max_upload_bytes: int = DEFAULT_MAX_UPLOAD
    workers: int = 2

    @classmethod
    def from_env(cls, env=os.environ) -> "ServiceConfig":
        def need(name: str) -> str:
            value = env.get(name)
            if not value:
                raise ValueError(f"environment variable {name} is required")
            return value

        calibration = env.get("LATENCY_CALIBRATION_PATH")
        return cls(
            storage_dir=Path(env.get("STORAGE_DIR", "./submissions")),
            model_path=Path(need("MODEL_PATH")),
            catalog_path=Path(need("CATALOG_PATH")),
            retain_media=env.get("RETAIN_MEDIA", "false").lower() in ("1", "true", "yes"),
            latency_calibration_path=Path(calibration) if calibration else None,
        )


class AutoPoseEstimator(PoseEstimator):
    """Routes media to the synthetic or file-backed estimator by content."""

    def __init__(self):
        self._file = FilePoseEstimator()
        self._synth = SyntheticPoseEstimator()

    def _pick(self, media: bytes) -> PoseEstimator:
        return self._synth if media.lstrip().startswith(SYNTH_PREFIX.encode()) else self._file

    def capabilities(self):
        return self._file.capabilities()

    def probe(self, media: bytes):
        return self._pick(media).probe(media)

    def tracks(self, media: bytes):
        return self._pick(media).tracks(media)


class SubmissionStore:
    """Embedded key-value store: one JSON record per submission id."""

    def __init__(self, path: Path):
        self._path = path
        with self._connect() as con:
            con.execute(
                "CREATE TABLE IF NOT EXISTS submissions (id TEXT PRIMARY KEY, record TEXT NOT NULL)"
            )

    def _connect(self) -> sqlite3.Connection:
        return sqlite3.connect(self._path, timeout=30)

    def put(self, record: dict) -> None:
        blob = json.dumps(record)
        with self._connect() as con:
            con.execute(
                "INSERT INTO submissions (id, record) VALUES (?, ?) "
                "ON CONFLICT(id) DO UPDATE SET record = excluded.record",
                (record["id"], blob),
            )

    def get(self, submission_id: str) -> dict | None:
        with self._connect() as con:
            row = con.execute(
                "SELECT record FROM submissions WHERE id = ?", (submission_id,)
            ).fetchone()
        return json.loads(row[0]) if row else None


class ServiceEngine:
    """Owns the model, catalog, storage, and the processing pool."""

    def __init__(self, config: ServiceConfig, estimator: PoseEstimator | None = None):
        self.config = config
        if not Path(config.model_path).exists():
            raise FileNotFoundError(f"model not found: {config.model_path}")
        if not Path(config.catalog_path).exists():
            raise FileNotFoundError(f"catalog not found: {config.catalog_path}")
        self.catalog: VocabularyCatalog = load_catalog(config.catalog_path)
        self.model: TrainedModel = load_model(config.model_path)
        if not self.model.matches_catalog(self.catalog):
            raise ValueError("model fingerprint does not match the catalog")
        self.estimator = estimator or AutoPoseEstimator()

        storage = Path(config.storage_dir)
        self.media_dir = storage / "media"
        self.pose_dir = storage / "poses"
        self.media_dir.mkdir(parents=True, exist_ok=True)
        self.pose_dir.mkdir(parents=True, exist_ok=True)
        self.store = SubmissionStore(storage / "store.sqlite")

        self._latency_lock = threading.Lock()
        if config.latency_calibration_path is not None:
            doc = json.loads(Path(config.latency_calibration_path).read_text())
            self._observations = [(float(x), float(y)) for x, y in doc["observations"]]
        else:
            self._observations = packaged_latency_observations()
        self.latency: LatencyModel = latency_fit(self._observations)

        self._pool = ThreadPoolExecutor(max_workers=config.workers)

    def close(self):
        self._pool.shutdown(wait=True)

    # -- intake ------------------------------------------------------------

    def create_submission(
        self, media: bytes, trim_start_s: float | None, trim_end_s: float | None
    ) -> str:
        if not media:
            raise ValueError("empty upload")
        if len(media) > self.config.max_upload_bytes:
            raise OverflowError("upload exceeds the size cap")
        if (trim_start_s is None) != (trim_end_s is None):
            raise ValueError("trim bounds must be given together")
        if trim_start_s is not None:
            if trim_start_s < 0 or trim_end_s <= trim_start_s:
                raise ValueError("trim bounds must satisfy 0 <= start < end")
        submission_id = uuid.uuid4().hex
        (self.media_dir / f"{submission_id}.bin").write_bytes(media)
        now = time.time()
        record = {
            "id": submission_id,
            "state": STATE_RECEIVED,
            "created_at": now,
            "updated_at": now,
            "input_duration_s": None,
            "predicted_total_s": None,
            "predict_started_at": None,
            "finished_at": None,
            "report": None,
            "probs": None,
            "error": None,
            "media_retained": self.config.retain_media,
            "media_purged_at": None,
            "trim": [trim_start_s, trim_end_s] if trim_start_s is not None else None,
        }
        self.store.put(record)
        self._pool.submit(self._process, submission_id)
        return submission_id

    # -- pipeline ----------------------------------------------------------

    def _transition(self, record: dict, state: str, **updates) -> dict:
        if state not in LEGAL_TRANSITIONS[record["state"]]:
            raise RuntimeError(f"illegal transition {record['state']} -> {state}")
        record = {**record, "state": state, "updated_at": time.time(), **updates}
        self.store.put(record)
        return record

    def _media_path(self, submission_id: str) -> Path:
        return self.media_dir / f"{submission_id}.bin"

    def _purge_media(self, submission_id: str) -> float | None:
        path = self._media_path(submission_id)
        if path.exists():
            path.unlink()
            return time.time()
        return None

    def _process(self, submission_id: str) -> None:
        record = self.store.get(submission_id)
        if record is None:
            return
        try:
            record = self._transition(record, STATE_CHECKING)
            media = self._media_path(submission_id).read_bytes()

            probe = self.estimator.probe(media)
            technical = gate_mod.check_technical(probe.byte_status, probe.resolution)
            people: list[PoseSequence] = []
            visibility: list[gate_mod.Issue] = []
            if not any(i.severity == gate_mod.SEVERITY_ERROR for i in technical):
                people = self.estimator.tracks(media)
                visibility = gate_mod.check_visibility(people)
            report = gate_mod.gate(technical, visibility)

            if report.verdict == gate_mod.VERDICT_REJECT:
                record = self._transition(
                    record, STATE_REJECTED, report=report.to_dict(),
                    finished_at=time.time(),
                )
                return

            pose = people[0]
            if record["trim"] is not None:
                start_s, end_s = record["trim"]
                pose = trim(pose, start_s, end_s)
            (self.pose_dir / f"{submission_id}.pose").write_text(write_pose_file(pose))
            if not self.config.retain_media:
                purged = self._purge_media(submission_id)
                record["media_purged_at"] = purged
                self.store.put(record)

            duration = pose.duration_s
            predicted = max(self.latency.predict(duration), 1e-6)
            record = self._transition(
                record,
                STATE_PREDICTING,
                report=report.to_dict(),
                input_duration_s=duration,
                predicted_total_s=predicted,
                predict_started_at=time.time(),
            )

            dist: Distribution = predict(self.model, pose)
            finished = time.time()
            record = self._transition(
                record,
                STATE_DONE,
                probs=dist.probs.tolist(),
                finished_at=finished,
            )
            if self.config.latency_live_update:
                self._record_latency(duration, finished - record["predict_started_at"])
        except Exception as exc:  # operational failure, not a crash
            log.exception("submission %s failed", submission_id)
            record = self.store.get(submission_id) or record
            if record["state"] in (STATE_RECEIVED, STATE_CHECKING, STATE_PREDICTING):
                if record["state"] != STATE_PREDICTING:
                    # jump through predicting so the machine stays legal
                    record = self._transition(
                        record, STATE_PREDICTING,
                        predict_started_at=record.get("predict_started_at") or time.time(),
                    )
                self._transition(record, STATE_FAILED, error=str(exc), finished_at=time.time())
        finally:
            if not self.config.retain_media:
                purged = self._purge_media(submission_id)
                if purged is not None:
                    record = self.store.get(submission_id)
                    if record is not None and record["media_purged_at"] is None:
                        record["media_purged_at"] = purged
                        self.store.put(record)

    def _record_latency(self, duration: float, seconds: float) -> None:
        with self._latency_lock:
            self._observations.append((duration, seconds))
            self.latency = latency_fit(self._observations)

    # -- reads -------------------------------------------------------------

    def status(self, submission_id: str) -> dict:
        record = self.store.get(submission_id)
        if record is None:
            raise KeyError(submission_id)
        state = record["state"]
        predicted = record["predicted_total_s"]
        elapsed = 0.0
        progress = 0.0
        eta = predicted
        if state == STATE_PREDICTING:
            elapsed = time.time() - record["predict_started_at"]
            progress = min(elapsed / predicted, 0.99)
            eta = max(predicted - elapsed, 0.0)
        elif state in (STATE_DONE, STATE_FAILED):
            if record["predict_started_at"] is not None:
                elapsed = record["finished_at"] - record["predict_started_at"]
            progress = 1.0 if state == STATE_DONE else 0.0
            eta = 0.0
        doc = {
            "id": record["id"],
            "state": state,
            "progress": progress,
            "eta_s": eta,
            "elapsed_s": elapsed,
            "predicted_total_s": predicted,
        }
        if record["report"] is not None:
            doc["report"] = record["report"]
        if record["error"] is not None:
            doc["error"] = record["error"]
        return doc

    def results(
        self,
        submission_id: str,
        view: str = "compact",
        movement: str | None = None,
        hands: str | None = None,
        location: str | None = None,
        handshape: str | None = None,
    ) -> dict:
        record = self.store.get(submission_id)
        if record is None:
            raise KeyError(submission_id)
        if record["state"] != STATE_DONE:
            raise RuntimeError(record["state"])
        ranked = rank(Distribution(np.array(record["probs"])), self.catalog, self.model)
        if view == "detailed":
            ranked = filter_results(
                ranked, movement=movement, hands=hands, location=location, handshape=handshape
            )
            if not ranked:
                return {"view": "detailed", "entries": []}
        return compose_view(ranked, view)

    def purge_media(self, submission_id: str) -> dict:
        record = self.store.get(submission_id)
        if record is None:
            raise KeyError(submission_id)
        already = not self._media_path(submission_id).exists()
        purged_at = self._purge_media(submission_id)
        if purged_at is not None and record["media_purged_at"] is None:
            record["media_purged_at"] = purged_at
            self.store.put(record)
        return {
            "id": submission_id,
            "already_purged": already,
            "media_purged_at": record["media_purged_at"],
        }


_PRIVACY_FALLBACK = """<!doctype html>
<html><head><meta charset="utf-8"><title>Sign Dictionary</title></head>
<body>
<h1>Sign Dictionary</h1>
<p id="privacy-statement">Privacy: uploaded recordings are used only to extract
pose landmarks and are discarded immediately after that extraction. Only the
landmark sequence and the recognition results are kept.</p>
</body></html>
"""


def create_app(
    config: ServiceConfig, estimator: PoseEstimator | None = None
) -> FastAPI:
    engine = ServiceEngine(config, estimator)

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        yield
        engine.close()

    app = FastAPI(title="signdict", version=__version__, lifespan=lifespan)
    app.state.engine = engine

    @app.post("/api/v1/submissions", status_code=202)
    async def create_submission(
        file: UploadFile = File(...),
        trim_start_s: float | None = Form(None),
        trim_end_s: float | None = Form(None),
    ):
        media = await file.read()
        try:
            submission_id = engine.create_submission(media, trim_start_s, trim_end_s)
        except OverflowError as exc:
            raise HTTPException(status_code=413, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"id": submission_id, "state": STATE_RECEIVED}

    @app.get("/api/v1/submissions/{submission_id}/status")
    def get_status(submission_id: str):
        try:
            return engine.status(submission_id)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown submission")

    @app.get("/api/v1/submissions/{submission_id}/results")
    def get_results(
        submission_id: str,
        view: str = "compact",
        movement: str | None = None,
        hands: str | None = None,
        location: str | None = None,
        handshape: str | None = None,
    ):
        if view not in ("compact", "detailed"):
            raise HTTPException(status_code=400, detail="view must be compact or detailed")
        try:
            return engine.results(
                submission_id, view,
                movement=movement, hands=hands, location=location, handshape=handshape,
            )
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown submission")
        except RuntimeError as exc:
            return JSONResponse(
                status_code=409,
                content={"detail": "results not ready", "state": str(exc)},
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.delete("/api/v1/submissions/{submission_id}/media")
    def delete_media(submission_id: str):
        try:
            return engine.purge_media(submission_id)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown submission")

    @app.get("/api/v1/vocabulary")
    def vocabulary():
        entries = []
        for i, e in enumerate(engine.catalog.entries):
            m = e.metadata
            entries.append(
                {
                    "class_index": i,
                    "rendition_id": e.rendition_id,
                    "gloss": e.gloss,
                    "movement": m.movement,
                    "hands": m.hands,
                    "location": m.location,
                    "handshape": m.handshape,
                    "example_media": e.example_media,
                }
            )
        return {
            "count": len(entries),
            "unique_glosses": len(engine.catalog.unique_glosses()),
            "fingerprint": engine.catalog.fingerprint(),
            "entries": entries,
        }

    @app.get("/api/v1/health")
    def health():
        return {
            "ok": True,
            "version": __version__,
            "model_fingerprint": engine.model.catalog_fingerprint,
            "classes": engine.model.num_classes,
        }

    def _static_text(name: str) -> str | None:
        ref = importlib.resources.files("signdict").joinpath(f"static/{name}")
        try:
            return ref.read_text(encoding="utf-8")
        except FileNotFoundError:
            return None

    @app.get("/", response_class=HTMLResponse)
    def index():
        return _static_text("index.html") or _PRIVACY_FALLBACK

    @app.get("/app.js")
    def app_js():
        text = _static_text("app.js")
        if text is None:
            raise HTTPException(status_code=404, detail="no UI bundle")
        return Response(text, media_type="text/javascript")

    @app.get("/styles.css")
    def styles():
        text = _static_text("styles.css")
        if text is None:
            raise HTTPException(status_code=404, detail="no UI bundle")
        return Response(text, media_type="text/css")

    return app

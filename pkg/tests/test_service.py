import json
import time

import pytest

from tests.conftest import wait_for_state

LEGAL_ORDER = ["received", "checking", "predicting", "done"]


def post_pose(client, path, **form):
    with open(path, "rb") as fh:
        return client.post(
            "/api/v1/submissions",
            files={"file": ("clip.pose", fh, "application/octet-stream")},
            data=form,
        )


class TestSubmissionLifecycle:
    def test_accepted_clip_reaches_done(self, make_service, fixtures_dir):
        client, _ = make_service()
        resp = post_pose(client, fixtures_dir / "clean_640x480.pose")
        assert resp.status_code == 202
        sid = resp.json()["id"]
        assert resp.json()["state"] == "received"

        seen = []
        deadline = time.time() + 30
        while time.time() < deadline:
            doc = client.get(f"/api/v1/submissions/{sid}/status").json()
            if not seen or seen[-1] != doc["state"]:
                seen.append(doc["state"])
            if doc["state"] in ("done", "rejected", "failed"):
                break
            time.sleep(0.01)
        assert seen[-1] == "done"
        # observed states are a subsequence of the legal order
        it = iter(LEGAL_ORDER)
        assert all(s in it for s in seen)

    def test_progress_monotone_and_complete(self, make_service, fixtures_dir):
        client, _ = make_service()
        sid = post_pose(client, fixtures_dir / "clean_640x480.pose").json()["id"]
        values = []
        deadline = time.time() + 30
        while time.time() < deadline:
            doc = client.get(f"/api/v1/submissions/{sid}/status").json()
            values.append(doc["progress"])
            if doc["state"] in ("done", "rejected", "failed"):
                break
            time.sleep(0.005)
        assert values == sorted(values)
        assert values[-1] == 1.0
        final = client.get(f"/api/v1/submissions/{sid}/status").json()
        assert final["eta_s"] == 0.0
        assert final["predicted_total_s"] > 0

    def test_rejected_clip(self, make_service, fixtures_dir):
        client, _ = make_service()
        sid = post_pose(client, fixtures_dir / "truncated.pose").json()["id"]
        doc = wait_for_state(client, sid)
        assert doc["state"] == "rejected"
        assert doc["report"]["verdict"] == "reject"
        codes = [i["code"] for i in doc["report"]["issues"]]
        assert codes == ["incomplete_upload"]
        assert doc["report"]["suggestions"]

    def test_warned_clip_still_completes(self, make_service, fixtures_dir):
        client, _ = make_service()
        sid = post_pose(client, fixtures_dir / "two_people.pose").json()["id"]
        doc = wait_for_state(client, sid)
        assert doc["state"] == "done"
        assert doc["report"]["verdict"] == "proceed_with_warnings"
        assert [i["code"] for i in doc["report"]["issues"]] == ["multiple_people"]

    def test_trim_shortens_input(self, make_service, fixtures_dir):
        client, _ = make_service()
        # 24 frames at 30 fps = 0.8 s; keep [0.2, 0.6)
        sid = post_pose(
            client, fixtures_dir / "clean_640x480.pose",
            trim_start_s="0.2", trim_end_s="0.6",
        ).json()["id"]
        doc = wait_for_state(client, sid)
        assert doc["state"] == "done"
        assert doc["predicted_total_s"] > 0

        full_sid = post_pose(client, fixtures_dir / "clean_640x480.pose").json()["id"]
        full_doc = wait_for_state(client, full_sid)
        assert doc["predicted_total_s"] < full_doc["predicted_total_s"]

    def test_unknown_submission_404(self, make_service):
        client, _ = make_service()
        assert client.get("/api/v1/submissions/nothere/status").status_code == 404
        assert client.get("/api/v1/submissions/nothere/results").status_code == 404


class TestIntakeValidation:
    def test_empty_upload_rejected(self, make_service):
        client, _ = make_service()
        resp = client.post(
            "/api/v1/submissions",
            files={"file": ("empty.pose", b"", "application/octet-stream")},
        )
        assert resp.status_code == 400

    def test_oversize_upload_413(self, make_service):
        client, _ = make_service(max_upload_bytes=64)
        resp = client.post(
            "/api/v1/submissions",
            files={"file": ("big.pose", b"x" * 100, "application/octet-stream")},
        )
        assert resp.status_code == 413

    def test_half_open_trim_rejected(self, make_service, fixtures_dir):
        client, _ = make_service()
        resp = post_pose(client, fixtures_dir / "clean_640x480.pose", trim_start_s="0.1")
        assert resp.status_code == 400

    def test_inverted_trim_rejected(self, make_service, fixtures_dir):
        client, _ = make_service()
        resp = post_pose(
            client, fixtures_dir / "clean_640x480.pose",
            trim_start_s="0.6", trim_end_s="0.2",
        )
        assert resp.status_code == 400


class TestResults:
    def test_results_before_done_conflict(self, make_service, fixtures_dir):
        client, _ = make_service()
        sid = post_pose(client, fixtures_dir / "truncated.pose").json()["id"]
        wait_for_state(client, sid)
        resp = client.get(f"/api/v1/submissions/{sid}/results")
        assert resp.status_code == 409
        assert resp.json()["state"] == "rejected"

    def test_compact_view_shape(self, make_service, fixtures_dir):
        client, _ = make_service()
        sid = post_pose(client, fixtures_dir / "clean_640x480.pose").json()["id"]
        wait_for_state(client, sid)
        doc = client.get(f"/api/v1/submissions/{sid}/results").json()
        assert doc["view"] == "compact"
        assert doc["primary"]["rank"] == 1
        assert len(doc["grid"]) == 6
        assert doc["primary"]["confidence"] in ("probably", "possibly", "unlikely")
        assert "probability" in doc["primary"]

    def test_detailed_view_and_filters(self, make_service, fixtures_dir):
        client, _ = make_service()
        sid = post_pose(client, fixtures_dir / "clean_640x480.pose").json()["id"]
        wait_for_state(client, sid)
        doc = client.get(f"/api/v1/submissions/{sid}/results?view=detailed").json()
        assert doc["view"] == "detailed"
        assert len(doc["entries"]) == 10  # whole synthetic catalog fits
        one = client.get(
            f"/api/v1/submissions/{sid}/results?view=detailed&hands=one"
        ).json()
        assert one["entries"]
        assert all(e["hands"] == "one" for e in one["entries"])
        ranks = [e["rank"] for e in one["entries"]]
        assert ranks == list(range(1, len(ranks) + 1))

    def test_filter_to_empty_is_valid_response(self, make_service, fixtures_dir):
        client, _ = make_service()
        sid = post_pose(client, fixtures_dir / "clean_640x480.pose").json()["id"]
        wait_for_state(client, sid)
        doc = client.get(
            "/api/v1/submissions/%s/results?view=detailed&handshape=NOSUCH" % sid
        ).json()
        assert doc == {"view": "detailed", "entries": []}

    def test_compact_ignores_filters(self, make_service, fixtures_dir):
        client, _ = make_service()
        sid = post_pose(client, fixtures_dir / "clean_640x480.pose").json()["id"]
        wait_for_state(client, sid)
        plain = client.get(f"/api/v1/submissions/{sid}/results").json()
        filtered = client.get(f"/api/v1/submissions/{sid}/results?hands=one").json()
        assert filtered == plain

    def test_bad_view_and_bad_filter_rejected(self, make_service, fixtures_dir):
        client, _ = make_service()
        sid = post_pose(client, fixtures_dir / "clean_640x480.pose").json()["id"]
        wait_for_state(client, sid)
        assert client.get(f"/api/v1/submissions/{sid}/results?view=giant").status_code == 400
        assert (
            client.get(
                f"/api/v1/submissions/{sid}/results?view=detailed&movement=wiggle"
            ).status_code
            == 400
        )


class TestMediaRetention:
    def test_media_purged_by_default(self, make_service, fixtures_dir):
        client, storage = make_service()
        for name in ("clean_640x480.pose", "truncated.pose"):
            sid = post_pose(client, fixtures_dir / name).json()["id"]
            wait_for_state(client, sid)
        media_files = list((storage / "media").iterdir())
        assert media_files == []

    def test_retention_keeps_media_until_deleted(self, make_service, fixtures_dir):
        client, storage = make_service(retain_media=True)
        sid = post_pose(client, fixtures_dir / "clean_640x480.pose").json()["id"]
        wait_for_state(client, sid)
        assert (storage / "media" / f"{sid}.bin").exists()
        doc = client.delete(f"/api/v1/submissions/{sid}/media").json()
        assert doc["already_purged"] is False
        assert not (storage / "media" / f"{sid}.bin").exists()
        again = client.delete(f"/api/v1/submissions/{sid}/media").json()
        assert again["already_purged"] is True

    def test_pose_landmarks_are_kept(self, make_service, fixtures_dir):
        client, storage = make_service()
        sid = post_pose(client, fixtures_dir / "clean_640x480.pose").json()["id"]
        wait_for_state(client, sid)
        assert (storage / "poses" / f"{sid}.pose").exists()


class TestMetadataEndpoints:
    def test_vocabulary(self, make_service):
        client, _ = make_service()
        doc = client.get("/api/v1/vocabulary").json()
        assert doc["count"] == 10
        assert doc["unique_glosses"] == 10
        assert len(doc["entries"]) == 10
        assert doc["entries"][0]["class_index"] == 0
        assert {"rendition_id", "gloss", "movement", "hands", "location",
                "handshape", "example_media"} <= set(doc["entries"][0])

    def test_health(self, make_service):
        client, _ = make_service()
        doc = client.get("/api/v1/health").json()
        assert doc["ok"] is True
        assert doc["classes"] == 10

    def test_index_page_has_privacy_statement(self, make_service):
        client, _ = make_service()
        resp = client.get("/")
        assert resp.status_code == 200
        assert "privacy-statement" in resp.text


class TestEngineGuards:
    def test_fingerprint_mismatch_refused(self, tiny_model_files, tmp_path, full_catalog):
        from signdict.catalog import save_catalog
        from signdict.service import ServiceConfig, ServiceEngine

        model_path, _ = tiny_model_files
        wrong = tmp_path / "wrong.tsv"
        save_catalog(full_catalog, wrong)
        cfg = ServiceConfig(
            storage_dir=str(tmp_path / "s"),
            model_path=str(model_path),
            catalog_path=str(wrong),
        )
        with pytest.raises(ValueError, match="fingerprint"):
            ServiceEngine(cfg)

    def test_missing_files_refused(self, tmp_path):
        from signdict.service import ServiceConfig, ServiceEngine

        cfg = ServiceConfig(
            storage_dir=str(tmp_path / "s"),
            model_path=str(tmp_path / "missing.bin"),
            catalog_path=str(tmp_path / "missing.tsv"),
        )
        with pytest.raises(FileNotFoundError):
            ServiceEngine(cfg)

    def test_config_from_env(self, tmp_path, monkeypatch):
        from signdict.service import ServiceConfig

        monkeypatch.setenv("MODEL_PATH", "/m.bin")
        monkeypatch.setenv("CATALOG_PATH", "/c.tsv")
        monkeypatch.setenv("STORAGE_DIR", str(tmp_path))
        monkeypatch.setenv("RETAIN_MEDIA", "true")
        cfg = ServiceConfig.from_env()
        assert str(cfg.model_path) == "/m.bin"
        assert cfg.retain_media is True

    def test_config_from_env_requires_model(self, monkeypatch):
        from signdict.service import ServiceConfig

        monkeypatch.delenv("MODEL_PATH", raising=False)
        monkeypatch.setenv("CATALOG_PATH", "/c.tsv")
        with pytest.raises(ValueError):
            ServiceConfig.from_env()

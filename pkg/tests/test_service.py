import json
import urllib.error
import urllib.request

import pytest

from genrelab.audio import encode_wav
from genrelab.corpus import make_spec
from genrelab.audio import synthesize
from genrelab.service import MAX_UPLOAD_BYTES, create_server, serve_in_thread
from genrelab.store import Store

from conftest import make_tone


@pytest.fixture()
def server(blob_bundle, tmp_path):
    bundle, _, _ = blob_bundle
    store = Store(tmp_path / "data")
    srv = create_server(bundle, store, host="127.0.0.1", port=0)
    serve_in_thread(srv)
    base = f"http://127.0.0.1:{srv.server_address[1]}"
    yield base, store
    srv.shutdown()
    srv.server_close()


def request(base, path, method="GET", body=None, headers=None):
    req = urllib.request.Request(base + path, data=body, method=method,
                                 headers=headers or {})
    try:
        with urllib.request.urlopen(req, timeout=30) as resp:
            payload = resp.read()
            return resp.status, json.loads(payload) if payload else None
    except urllib.error.HTTPError as err:
        payload = err.read()
        return err.code, json.loads(payload) if payload else None


def fixture_wav(duration_s=4.0) -> bytes:
    clip = synthesize(make_spec("Rock", seed=1, index=0, duration_s=duration_s), seed=9)
    return encode_wav(clip)


class TestAnalyze:
    def test_valid_wav_returns_percentage_maps(self, server):
        base, store = server
        status, body = request(base, "/api/v1/analyze", method="POST",
                               body=fixture_wav(),
                               headers={"Content-Type": "audio/wav"})
        assert status == 200
        assert set(body["per_algorithm"]) == {"knn", "gnb", "tree", "forest", "mlp"}
        for percentages in body["per_algorithm"].values():
            assert len(percentages) == 11
            assert sum(percentages.values()) == pytest.approx(100.0, abs=0.1)
        assert sum(body["consensus"].values()) == pytest.approx(100.0, abs=0.1)
        assert body["top_genre"] in body["consensus"]
        assert len(body["report_id"]) == 32

    def test_appends_exactly_one_history_entry(self, server):
        base, store = server
        before = len(store.list_history(limit=1000))
        request(base, "/api/v1/analyze", method="POST", body=fixture_wav(),
                headers={"X-Source-Name": "mysong.wav"})
        entries = store.list_history(limit=1000)
        assert len(entries) == before + 1
        assert entries[0].source_name == "mysong.wav"

    def test_too_short_clip_is_400_with_code(self, server):
        base, _ = server
        short = encode_wav(make_tone(440.0, duration_s=1.0))
        status, body = request(base, "/api/v1/analyze", method="POST", body=short)
        assert status == 400
        assert body["error"]["code"] == "TOO_SHORT"
        assert body["error"]["message"]

    def test_text_body_is_400_malformed(self, server):
        base, _ = server
        status, body = request(base, "/api/v1/analyze", method="POST",
                               body=b"this is not audio at all")
        assert status == 400
        assert body["error"]["code"] == "MALFORMED_AUDIO"

    def test_oversized_body_is_413(self, server):
        base, _ = server
        req = urllib.request.Request(
            base + "/api/v1/analyze", data=b"x", method="POST",
            headers={"Content-Length": str(MAX_UPLOAD_BYTES + 1)})
        # urllib would try to send the declared length; hand-roll instead
        import http.client

        host, port = base.replace("http://", "").split(":")
        conn = http.client.HTTPConnection(host, int(port), timeout=10)
        conn.putrequest("POST", "/api/v1/analyze")
        conn.putheader("Content-Length", str(MAX_UPLOAD_BYTES + 1))
        conn.endheaders()
        response = conn.getresponse()
        assert response.status == 413
        body = json.loads(response.read())
        assert body["error"]["code"] == "PAYLOAD_TOO_LARGE"
        conn.close()

    def test_no_bundle_is_503(self, tmp_path):
        store = Store(tmp_path / "data")
        srv = create_server(None, store, host="127.0.0.1", port=0)
        serve_in_thread(srv)
        base = f"http://127.0.0.1:{srv.server_address[1]}"
        try:
            status, body = request(base, "/api/v1/analyze", method="POST",
                                   body=fixture_wav())
            assert status == 503
            assert body["error"]["code"] == "NO_BUNDLE"
            status, body = request(base, "/api/v1/health")
            assert status == 200
            assert body["bundle_loaded"] is False
        finally:
            srv.shutdown()
            srv.server_close()


class TestLabels:
    def analyze(self, base):
        _, body = request(base, "/api/v1/analyze", method="POST", body=fixture_wav())
        return body["report_id"]

    def test_label_flow(self, server):
        base, store = server
        report_id = self.analyze(base)
        status, _ = request(
            base, f"/api/v1/reports/{report_id}/labels", method="POST",
            body=json.dumps({"genres": ["Rock", "Pop"], "note": "solid"}).encode(),
            headers={"Content-Type": "application/json"})
        assert status == 204
        entry = store.list_history()[0]
        assert entry.feedback[0].user_genres == frozenset({8, 10})
        assert entry.feedback[0].note == "solid"

    def test_empty_genres_is_422(self, server):
        base, _ = server
        report_id = self.analyze(base)
        status, body = request(
            base, f"/api/v1/reports/{report_id}/labels", method="POST",
            body=json.dumps({"genres": []}).encode())
        assert status == 422
        assert "Blues" in body["error"]["message"]  # lists valid names

    def test_invalid_genre_is_422(self, server):
        base, _ = server
        report_id = self.analyze(base)
        status, body = request(
            base, f"/api/v1/reports/{report_id}/labels", method="POST",
            body=json.dumps({"genres": ["Dubstep"]}).encode())
        assert status == 422

    def test_unknown_report_is_404(self, server):
        base, _ = server
        status, body = request(
            base, "/api/v1/reports/deadbeef/labels", method="POST",
            body=json.dumps({"genres": ["Rock"]}).encode())
        assert status == 404
        assert body["error"]["code"] == "UNKNOWN_REPORT"


class TestReadEndpoints:
    def test_genres_lists_canonical_names(self, server):
        base, _ = server
        status, body = request(base, "/api/v1/genres")
        assert status == 200
        assert len(body["genres"]) == 11
        assert body["genres"][0] == "Blues"
        assert body["genres"][-1] == "Rock"

    def test_fresh_store_reports_empty(self, blob_bundle, tmp_path):
        bundle, _, _ = blob_bundle
        store = Store(tmp_path / "fresh")
        srv = create_server(bundle, store, host="127.0.0.1", port=0)
        serve_in_thread(srv)
        base = f"http://127.0.0.1:{srv.server_address[1]}"
        try:
            status, body = request(base, "/api/v1/reports")
            assert status == 200
            assert body == []
        finally:
            srv.shutdown()
            srv.server_close()

    def test_reports_newest_first_with_labels(self, server):
        base, _ = server
        first = request(base, "/api/v1/analyze", method="POST", body=fixture_wav())[1]
        second = request(base, "/api/v1/analyze", method="POST", body=fixture_wav())[1]
        request(base, f"/api/v1/reports/{first['report_id']}/labels", method="POST",
                body=json.dumps({"genres": ["Jazz"]}).encode())
        status, body = request(base, "/api/v1/reports?limit=10&offset=0")
        assert status == 200
        ids = [entry["report_id"] for entry in body]
        assert ids.index(second["report_id"]) < ids.index(first["report_id"])
        labeled = next(e for e in body if e["report_id"] == first["report_id"])
        assert labeled["user_labels"][0]["genres"] == ["Jazz"]

    def test_non_numeric_paging_is_422(self, server):
        base, _ = server
        status, body = request(base, "/api/v1/reports?limit=abc")
        assert status == 422
        assert body["error"]["code"] == "INVALID_PAGING"

    def test_health(self, server):
        base, _ = server
        status, body = request(base, "/api/v1/health")
        assert status == 200
        assert body == {"status": "ok", "bundle_loaded": True}

    def test_unknown_api_route_is_404(self, server):
        base, _ = server
        status, body = request(base, "/api/v1/nothing")
        assert status == 404


class TestConcurrentRequests:
    def test_parallel_analyzes_all_succeed(self, server):
        import threading

        base, store = server
        wav = fixture_wav()
        results = []

        def analyze():
            results.append(request(base, "/api/v1/analyze", method="POST", body=wav))

        threads = [threading.Thread(target=analyze) for _ in range(4)]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join()

        assert [status for status, _ in results] == [200] * 4
        ids = {body["report_id"] for _, body in results}
        assert len(ids) == 4
        assert len(store.list_history(limit=100)) >= 4

    def test_health_stays_responsive_during_analyze(self, server):
        import threading

        base, _ = server
        done = threading.Event()

        def analyze():
            request(base, "/api/v1/analyze", method="POST", body=fixture_wav(8.0))
            done.set()

        worker = threading.Thread(target=analyze)
        worker.start()
        status, body = request(base, "/api/v1/health")
        assert status == 200 and body["status"] == "ok"
        worker.join()
        assert done.is_set()


class TestStaticAndCors:
    def test_static_serving_with_index_fallback(self, blob_bundle, tmp_path):
        bundle, _, _ = blob_bundle
        static = tmp_path / "static"
        static.mkdir()
        (static / "index.html").write_text("<html>ui</html>")
        (static / "app.js").write_text("console.log(1)")
        store = Store(tmp_path / "data")
        srv = create_server(bundle, store, host="127.0.0.1", port=0,
                            static_dir=str(static), cors_allow_all=True)
        serve_in_thread(srv)
        base = f"http://127.0.0.1:{srv.server_address[1]}"
        try:
            with urllib.request.urlopen(base + "/", timeout=10) as resp:
                assert resp.status == 200
                assert b"ui" in resp.read()
                assert resp.headers["Access-Control-Allow-Origin"] == "*"
            with urllib.request.urlopen(base + "/app.js", timeout=10) as resp:
                assert "javascript" in resp.headers["Content-Type"]
            status, _ = request(base, "/../etc/passwd")
            assert status == 404
        finally:
            srv.shutdown()
            srv.server_close()

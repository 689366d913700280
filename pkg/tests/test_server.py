"""HTTP API: the annotation workflow as seen by a UI client."""

import pytest
from fastapi.testclient import TestClient

from mention_lens.annotation import CampaignStore, MentionStatus
from mention_lens.model import MentionRecord
from mention_lens.server import create_app

MENTIONS = [
    MentionRecord(
        mention_id=f"srv-{i}", software_raw=name, pub_id=f"10.5/{i}",
        pub_year=2018 + i, context=f"... we used {name} for the analysis ...",
    )
    for i, name in enumerate(["SPSS", "R", "ImageJ", "QIIME 2"])
]

VALID = {
    "retrieval_quality": "Y",
    "mention_type": "NAM",
    "mention_quality": "SN",
    "confidence": 4,
}


@pytest.fixture
def store(tmp_path):
    return CampaignStore.create(tmp_path / "camp", "api-test", MENTIONS, ["a1", "a2"])


@pytest.fixture
def client(store):
    return TestClient(create_app(store))


class TestCampaignAndTagsets:
    def test_campaign(self, client):
        body = client.get("/api/campaign").json()
        assert body["campaign_id"] == "api-test"
        assert body["annotators"] == ["a1", "a2"]
        assert body["sample_size"] == 4
        layer_names = [layer["name"] for layer in body["layers"]]
        assert "mention_type" in layer_names
        assert "confidence" not in layer_names  # not a layer, a fixed column

    def test_tagsets_carry_codes_and_scale(self, client):
        body = client.get("/api/tagsets").json()
        assert body["confidence_min"] == 1
        assert body["confidence_max"] == 5
        by_name = {t["name"]: t for t in body["tagsets"]}
        assert set(by_name) == {
            "RetrievalQuality", "MentionType", "MentionQuality",
            "LinkQuality", "LicenseCategory",
        }
        mention_type = by_name["MentionType"]
        assert [c["code"] for c in mention_type["codes"]] == [
            "PUB", "PRO", "URL", "MAN", "INS", "NAM", "NOT",
        ]
        orders = {c["code"]: c["order"] for c in mention_type["codes"]}
        assert orders == {"PRO": 1, "PUB": 2, "MAN": 3, "URL": 4,
                          "INS": 5, "NAM": 6, "NOT": 7}
        assert all(c["label"] for c in mention_type["codes"])


class TestListMentions:
    def test_plain_list(self, client):
        body = client.get("/api/mentions").json()
        assert body["total"] == 4
        assert body["mentions"][0]["mention_id"] == "srv-0"
        assert body["mentions"][0]["status"] is None

    def test_with_annotator_statuses(self, client):
        body = client.get("/api/mentions", params={"annotator": "a1"}).json()
        assert all(m["status"] == "PENDING" for m in body["mentions"])
        assert all(m["version"] == 0 for m in body["mentions"])

    def test_status_filter_case_insensitive(self, client):
        client.put("/api/annotations/srv-1/a1", json=VALID)
        body = client.get(
            "/api/mentions", params={"annotator": "a1", "status": "done"}
        ).json()
        assert [m["mention_id"] for m in body["mentions"]] == ["srv-1"]
        pending = client.get(
            "/api/mentions", params={"annotator": "a1", "status": "PENDING"}
        ).json()
        assert pending["total"] == 3

    def test_unknown_annotator_404(self, client):
        assert client.get("/api/mentions", params={"annotator": "zz"}).status_code == 404

    def test_unknown_status_422(self, client):
        response = client.get(
            "/api/mentions", params={"annotator": "a1", "status": "resting"}
        )
        assert response.status_code == 422


class TestMentionDetail:
    def test_detail_fields(self, client):
        body = client.get("/api/mentions/srv-0").json()
        assert body["software_raw"] == "SPSS"
        assert body["pub_year"] == 2018
        assert "we used SPSS" in body["context"]
        assert body["statuses"] == {"a1": "PENDING", "a2": "PENDING"}
        assert body["annotation"] is None

    def test_detail_includes_saved_annotation(self, client):
        client.put("/api/annotations/srv-0/a1", json=VALID)
        body = client.get("/api/mentions/srv-0", params={"annotator": "a1"}).json()
        assert body["annotation"]["mention_type"] == "NAM"
        assert body["statuses"]["a1"] == "DONE"
        assert body["versions"]["a1"] == 1
        # the other annotator sees no saved record
        other = client.get("/api/mentions/srv-0", params={"annotator": "a2"}).json()
        assert other["annotation"] is None

    def test_unknown_mention_404(self, client):
        assert client.get("/api/mentions/none-such").status_code == 404


class TestSubmit:
    def test_valid_submit(self, client):
        response = client.put("/api/annotations/srv-0/a1", json=VALID)
        assert response.status_code == 200
        body = response.json()
        assert body == {"version": 1, "status": "DONE", "warnings": []}

    def test_resubmit_bumps_version(self, client):
        client.put("/api/annotations/srv-0/a1", json=VALID)
        body = client.put(
            "/api/annotations/srv-0/a1", json={**VALID, "mention_type": "PUB"}
        ).json()
        assert body["version"] == 2

    def test_warnings_ride_along(self, client):
        body = client.put(
            "/api/annotations/srv-0/a1", json={**VALID, "confidence": 1}
        ).json()
        assert any("adjudication" in w for w in body["warnings"])

    def test_violation_becomes_structured_422(self, client):
        response = client.put(
            "/api/annotations/srv-0/a1",
            json={**VALID, "mention_quality": "NA"},
        )
        assert response.status_code == 422
        violations = response.json()["detail"]["violations"]
        assert any(v["rule"] == "not-software-exclusive" for v in violations)
        assert all({"field", "rule", "message"} <= set(v) for v in violations)
        # a rejected submit must not change state
        detail = client.get("/api/mentions/srv-0").json()
        assert detail["statuses"]["a1"] == "PENDING"

    def test_unknown_code_rule(self, client):
        response = client.put(
            "/api/annotations/srv-0/a1", json={**VALID, "mention_type": "WAT"}
        )
        assert response.status_code == 422
        violations = response.json()["detail"]["violations"]
        assert any(v["rule"] == "unknown-code" and v["field"] == "mention_type"
                   for v in violations)

    def test_unknown_mention_404(self, client):
        assert client.put("/api/annotations/zz/a1", json=VALID).status_code == 404

    def test_extra_fields_forbidden(self, client):
        response = client.put(
            "/api/annotations/srv-0/a1", json={**VALID, "colour": "red"}
        )
        assert response.status_code == 422

    def test_missing_confidence_rejected(self, client):
        payload = {k: v for k, v in VALID.items() if k != "confidence"}
        assert client.put("/api/annotations/srv-0/a1", json=payload).status_code == 422

    def test_persisted_before_ack(self, client, store):
        client.put("/api/annotations/srv-2/a2", json=VALID)
        fresh = CampaignStore(store.directory)
        assert fresh.status_of("srv-2", "a2") == (MentionStatus.DONE, 1)
        assert fresh.annotation_of("srv-2", "a2").mention_type == "NAM"


class TestSkipReopen:
    def test_skip_with_note(self, client, store):
        response = client.post(
            "/api/annotations/srv-0/a1/skip", json={"note": "garbled"}
        )
        assert response.json() == {"version": 1, "status": "SKIPPED"}
        assert store.status_of("srv-0", "a1")[0] is MentionStatus.SKIPPED

    def test_skip_without_body(self, client):
        response = client.post("/api/annotations/srv-0/a1/skip")
        assert response.status_code == 200

    def test_reopen(self, client):
        client.put("/api/annotations/srv-0/a1", json=VALID)
        body = client.post("/api/annotations/srv-0/a1/reopen").json()
        assert body == {"version": 2, "status": "PENDING"}

    def test_unknown_ids_404(self, client):
        assert client.post("/api/annotations/zz/a1/skip").status_code == 404
        assert client.post("/api/annotations/srv-0/zz/reopen").status_code == 404


class TestProgressExportReview:
    def test_progress_conserves_slots(self, client):
        client.put("/api/annotations/srv-0/a1", json=VALID)
        client.post("/api/annotations/srv-1/a1/skip")
        body = client.get("/api/progress").json()
        assert body["sample_size"] == 4
        assert body["total_slots"] == 8
        assert body["per_annotator"]["a1"] == {"PENDING": 2, "DONE": 1, "SKIPPED": 1}
        assert sum(body["per_annotator"]["a2"].values()) == 4

    def test_export_sheet(self, client):
        response = client.get("/api/export", params={"annotator": "a1"})
        assert response.status_code == 200
        assert response.headers["content-type"].startswith("text/csv")
        assert response.text.startswith("# campaign api-test")

    def test_export_state_table(self, client):
        client.put("/api/annotations/srv-0/a1", json=VALID)
        response = client.get("/api/export")
        first_line = response.text.splitlines()[0]
        assert first_line.startswith("mention_id,annotator_id,status,version")

    def test_export_unknown_annotator(self, client):
        assert client.get("/api/export", params={"annotator": "zz"}).status_code == 404

    def test_review_queue_lists_flagged_records(self, client):
        client.put("/api/annotations/srv-0/a1", json=VALID)  # clean
        client.put(
            "/api/annotations/srv-1/a1",
            json={**VALID, "mention_type": "URL", "confidence": 2},
        )
        items = client.get("/api/review-queue").json()["items"]
        assert [i["mention_id"] for i in items] == ["srv-1"]
        assert items[0]["confidence"] == 2
        assert len(items[0]["warnings"]) == 2


class TestStaticMount:
    def test_serves_ui_when_built(self, store, tmp_path):
        ui_dir = tmp_path / "dist"
        ui_dir.mkdir()
        (ui_dir / "index.html").write_text("<!doctype html><title>lens</title>")
        client = TestClient(create_app(store, static_dir=ui_dir))
        response = client.get("/")
        assert response.status_code == 200
        assert "lens" in response.text
        # API still reachable under the mount
        assert client.get("/api/campaign").status_code == 200

    def test_no_mount_without_dir(self, client):
        assert client.get("/").status_code == 404

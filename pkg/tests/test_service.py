"""HTTP facade tests: dual-path byte equality and error mapping."""

import json

import pytest
from fastapi.testclient import TestClient

from nutrivision import canonical
from nutrivision.profiles import FeedbackEvent
from nutrivision.service import create_app


@pytest.fixture
def client(engine):
    return TestClient(create_app(engine), raise_server_exceptions=False)


class TestAnalyzeEndpoint:
    def test_dual_path_byte_equality(self, client, engine, scene_files):
        image_path, det_path = scene_files
        response = client.post(
            "/v1/analyze",
            files={
                "image": ("scene.png", image_path.read_bytes(), "image/png"),
                "detections": ("boxes.json", det_path.read_bytes(), "application/json"),
            },
        )
        assert response.status_code == 200
        library_report = engine.analyze(image_path.read_bytes(), det_path.read_bytes())
        assert response.content == canonical.dump_bytes(library_report.to_dict())

    def test_report_contents(self, client, scene_files):
        image_path, det_path = scene_files
        response = client.post(
            "/v1/analyze",
            files={
                "image": ("scene.png", image_path.read_bytes(), "image/png"),
                "detections": ("boxes.json", det_path.read_bytes(), "application/json"),
            },
        )
        body = response.json()
        assert [i["label"] for i in body["items"]] == ["banana", "apple"]
        assert body["skipped"] == [{"label": "sushi", "reason": "UNKNOWN_FOOD_CLASS"}]
        assert body["distribution_defined"] is True
        assert sum(body["distribution_pct"].values()) == pytest.approx(100.0, abs=1e-6)

    def test_image_without_coin_is_422(self, client, coinless_scene):
        image_path, det_path = coinless_scene
        response = client.post(
            "/v1/analyze",
            files={
                "image": ("scene.png", image_path.read_bytes(), "image/png"),
                "detections": ("boxes.json", det_path.read_bytes(), "application/json"),
            },
        )
        assert response.status_code == 422
        assert response.json()["code"] == "NO_REFERENCE_FOUND"

    def test_malformed_detections_is_400(self, client, scene_files):
        image_path, _ = scene_files
        response = client.post(
            "/v1/analyze",
            files={
                "image": ("scene.png", image_path.read_bytes(), "image/png"),
                "detections": ("boxes.json", b"{broken", "application/json"),
            },
        )
        assert response.status_code == 400
        assert response.json()["code"] == "SCHEMA_ERROR"


class TestUserEndpoints:
    def test_upsert_then_bmi(self, client):
        response = client.post(
            "/v1/users",
            json={
                "user_id": "nina",
                "height_m": 1.75,
                "weight_kg": 70.0,
                "gender": "female",
                "diet_pref": "vegetarian",
            },
        )
        assert response.status_code == 200
        bmi = client.get("/v1/users/nina/bmi")
        assert bmi.status_code == 200
        body = bmi.json()
        assert body["category"] == "normal"
        assert body["value"] == pytest.approx(22.857143)

    def test_bmi_unknown_user_404(self, client):
        response = client.get("/v1/users/ghost/bmi")
        assert response.status_code == 404
        assert response.json()["code"] == "UNKNOWN_USER"

    def test_invalid_profile_400(self, client):
        response = client.post(
            "/v1/users",
            json={
                "user_id": "bad",
                "height_m": -1,
                "weight_kg": 70.0,
                "gender": "female",
                "diet_pref": "vegan",
            },
        )
        assert response.status_code == 400

    def test_recipe_lookup(self, client, engine):
        rid = engine.recipes[0].id
        response = client.get(f"/v1/recipes/{rid}")
        assert response.status_code == 200
        assert response.content == canonical.dump_bytes(engine.recipes[0].to_dict())
        assert client.get("/v1/recipes/nope").status_code == 404


class TestRecommendationEndpoints:
    def test_dual_path_byte_equality(self, client, engine):
        response = client.get("/v1/users/maya/recommendations")
        assert response.status_code == 200
        assert response.content == canonical.dump_bytes(
            engine.recommendations_payload("maya", count=5)
        )

    def test_default_count_is_five(self, client):
        body = client.get("/v1/users/arjun/recommendations").json()
        assert len(body) == 5

    def test_count_parameter(self, client):
        body = client.get("/v1/users/arjun/recommendations?count=2").json()
        assert len(body) == 2

    def test_unknown_user_404(self, client):
        assert client.get("/v1/users/ghost/recommendations").status_code == 404

    def test_vegan_user_sees_only_vegan(self, client, engine):
        body = client.get("/v1/users/maya/recommendations").json()
        assert body
        for row in body:
            assert row["recipe"]["diet_tag"] == "vegan"

    def test_scores_sorted_descending(self, client):
        body = client.get("/v1/users/maya/recommendations").json()
        scores = [row["score"] for row in body]
        assert scores == sorted(scores, reverse=True)

    def test_sugar_warning_present_for_over_limit_recipe(self, client):
        body = client.get("/v1/users/maya/recommendations?count=10").json()
        warned = {
            row["recipe_id"]: row["warnings"]
            for row in body
            if row["warnings"]
        }
        # the vegan dessert exceeds maya's 25 g sugar limit
        assert "r-fruit-parfait" in warned
        assert warned["r-fruit-parfait"][0]["nutrient"] == "sugar"
        assert warned["r-fruit-parfait"][0]["amount_g"] == 40.0
        assert warned["r-fruit-parfait"][0]["limit_g"] == 25.0


class TestFeedbackEndpoints:
    def test_rating_appended_with_sequence(self, client):
        response = client.post(
            "/v1/users/maya/feedback",
            json={"recipe_id": "r-oats-berry", "tried": True, "rating": 5},
        )
        assert response.status_code == 200
        assert response.json()["sequence"] >= 1

    def test_rating_out_of_range_400(self, client):
        response = client.post(
            "/v1/users/maya/feedback",
            json={"recipe_id": "r-oats-berry", "tried": True, "rating": 9},
        )
        assert response.status_code == 400

    def test_unknown_user_404(self, client):
        response = client.post(
            "/v1/users/ghost/feedback",
            json={"recipe_id": "r-oats-berry", "tried": True, "rating": 4},
        )
        assert response.status_code == 404

    def test_unknown_recipe_404(self, client):
        response = client.post(
            "/v1/users/maya/feedback",
            json={"recipe_id": "r-nope", "tried": True, "rating": 4},
        )
        assert response.status_code == 404

    def test_skip_reduces_that_recipes_score_by_delta(self, client, engine):
        before = {
            row["recipe_id"]: row["score"]
            for row in client.get("/v1/users/maya/recommendations?count=10").json()
        }
        target = next(iter(before))
        response = client.post(
            "/v1/users/maya/feedback", json={"recipe_id": target, "tried": False}
        )
        assert response.status_code == 200
        after = {
            row["recipe_id"]: row["score"]
            for row in client.get("/v1/users/maya/recommendations?count=10").json()
        }
        delta = engine.config.recommender.delta
        assert after[target] == pytest.approx(before[target] - delta, abs=1e-9)
        untouched = [rid for rid in before if rid != target]
        for rid in untouched:
            assert after[rid] == pytest.approx(before[rid], abs=1e-9)

    def test_rating_changes_subsequent_recommendations(self, client, engine):
        # three ratings lift the user over the cold-start floor
        for rid, rating in [("r-oats-berry", 5), ("r-lentil-curry", 5), ("r-fruit-parfait", 1)]:
            assert (
                client.post(
                    "/v1/users/maya/feedback",
                    json={"recipe_id": rid, "tried": True, "rating": rating},
                ).status_code
                == 200
            )
        body = client.get("/v1/users/maya/recommendations").json()
        assert body == json.loads(
            canonical.dumps(engine.recommendations_payload("maya", count=5))
        )

    def test_repeat_rating_upserts_not_duplicates(self, client, engine):
        client.post(
            "/v1/users/maya/feedback",
            json={"recipe_id": "r-oats-berry", "tried": True, "rating": 2},
        )
        client.post(
            "/v1/users/maya/feedback",
            json={"recipe_id": "r-oats-berry", "tried": True, "rating": 5},
        )
        assert engine.state.ratings[("maya", "r-oats-berry")] == 5.0
        assert (
            sum(1 for k in engine.state.ratings if k == ("maya", "r-oats-berry")) == 1
        )


class TestMealEndpoints:
    def test_meal_logging_shifts_deficiency_boosts(self, client, engine, scene_files):
        image_path, det_path = scene_files
        report = client.post(
            "/v1/analyze",
            files={
                "image": ("scene.png", image_path.read_bytes(), "image/png"),
                "detections": ("boxes.json", det_path.read_bytes(), "application/json"),
            },
        ).json()

        before = client.get("/v1/users/arjun/recommendations?count=10").json()
        response = client.post("/v1/users/arjun/meals", json={"report": report})
        assert response.status_code == 200
        after = client.get("/v1/users/arjun/recommendations?count=10").json()

        # logged carbs shrink the carb deficit, so scores move
        assert {r["recipe_id"] for r in before} == {r["recipe_id"] for r in after}
        changed = [
            r["recipe_id"]
            for r in after
            if abs(r["score"] - next(b["score"] for b in before if b["recipe_id"] == r["recipe_id"])) > 1e-12
        ]
        assert changed

    def test_meal_for_unknown_user_404(self, client):
        assert (
            client.post("/v1/users/ghost/meals", json={"report": {"items": []}}).status_code
            == 404
        )

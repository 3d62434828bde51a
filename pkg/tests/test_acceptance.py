"""Acceptance suite: one test per release criterion, stated tolerances.

Each test prints its own PASS/FAIL line on the real stdout so a plain
pytest run shows the checklist. Tolerances are pinned here and must not
be loosened; the synthetic generators double as the oracles.
"""

import json
import math
import random
import sys
import time
from datetime import datetime, timezone

import numpy as np
import pytest

from nutrivision import canonical
from nutrivision.calibration import ReferenceMeasurement, ReferenceSpec, detect_reference
from nutrivision.catalog import (
    FoodClassSpec,
    NutrientProfile,
    Recipe,
    allowed_diet_tags,
    load_catalog,
)
from nutrivision.detections import Detection, GroundTruthBox, evaluate
from nutrivision.errors import NoEligibleRecipes, NutriVisionError
from nutrivision.factorization import fit_factors
from nutrivision.profiles import UserProfile, compute_bmi
from nutrivision.quantify import QuantifierConfig, analyze_plate, quantify_item
from nutrivision.recommender import RecommenderConfig, build_snapshot, recommend, warnings_for
from nutrivision.synthetic import detection_document, disc_bbox, render_scene
from nutrivision.tfidf import fit_tfidf, tokenize

NOW = datetime(2024, 6, 1, tzinfo=timezone.utc)

# one line per criterion, printed by the terminal-summary hook in conftest
RESULTS: list[str] = []


def report(name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    line = f"[{status}] {name}{suffix}"
    RESULTS.append(line)
    print(line)
    assert ok, f"{name}{suffix}"


class TestCalibrationOracle:
    def test_randomized_synthetic_scenes(self):
        """100 noisy scenes: diameter within +-2 px and ratio within 5%
        in at least 98; total runtime under 30 s."""
        rng = np.random.default_rng(2024)
        width, height = 640, 480
        started = time.monotonic()
        successes = 0
        for _ in range(100):
            radius = float(rng.uniform(20, 60))
            cx = float(rng.uniform(radius + 2, width - radius - 2))
            cy = float(rng.uniform(radius + 2, height - radius - 2))
            noise = float(rng.uniform(0.0, 0.05))
            img = render_scene(
                width,
                height,
                coin_center=(cx, cy),
                coin_radius=radius,
                noise_fraction=noise,
                rng=rng,
            )
            _, _, clean_w, clean_h = disc_bbox(width, height, cx, cy, radius)
            true_ratio = 21.93 / (2 * radius)
            try:
                ref = detect_reference(img, ReferenceSpec())
            except NutriVisionError:
                continue
            diameter_ok = (
                abs(ref.bbox_w - clean_w) <= 2 and abs(ref.bbox_h - clean_h) <= 2
            )
            ratio_ok = (
                abs(ref.ratio_x_mm_per_px - true_ratio) / true_ratio <= 0.05
                and abs(ref.ratio_y_mm_per_px - true_ratio) / true_ratio <= 0.05
            )
            if diameter_ok and ratio_ok:
                successes += 1
        elapsed = time.monotonic() - started
        report(
            "calibration oracle: >=98/100 noisy scenes within +-2 px and 5%",
            successes >= 98 and elapsed < 30.0,
            f"{successes}/100 in {elapsed:.1f}s",
        )


class TestQuantificationGolden:
    def test_worked_example_to_1e9(self):
        """Coin 219.3 px, food 500x400 px, height 5 cm, fill 0.8,
        density 0.5, carbs 10 g/100 g: mass 40 g and carbs 4.0 g."""
        ref = ReferenceMeasurement(
            bbox_x=0,
            bbox_y=0,
            bbox_w=219.3,
            bbox_h=219.3,
            area_px=math.pi / 4 * 219.3**2,
            ratio_x_mm_per_px=21.93 / 219.3,
            ratio_y_mm_per_px=21.93 / 219.3,
        )
        spec = FoodClassSpec(
            label="golden",
            default_height_cm=5.0,
            density_g_per_cc=0.5,
            per_100g=NutrientProfile(carbohydrates_g=10.0),
        )
        det = Detection(
            label="golden", bbox_x=0, bbox_y=0, bbox_w=500, bbox_h=400, confidence=1.0
        )
        food = quantify_item(det, ref, spec, QuantifierConfig(box_fill_factor=0.8))
        mass_ok = abs(food.mass_g - 40.0) / 40.0 <= 1e-9
        carbs_ok = abs(food.nutrients.carbohydrates_g - 4.0) / 4.0 <= 1e-9
        report(
            "quantification golden: mass 40 g and carbs 4.0 g at 1e-9 relative",
            mass_ok and carbs_ok,
            f"mass={food.mass_g!r} carbs={food.nutrients.carbohydrates_g!r}",
        )


CATALOG = load_catalog(
    "label,default_height_cm,density_g_per_cc,calories,carbohydrates_g,protein_g,fat_g,sugar_g\n"
    "banana,3.5,0.94,89,22.8,1.1,0.3,12.2\n"
    "apple,7.0,0.60,52,13.8,0.3,0.2,10.4\n"
    "pizza,2.0,0.55,266,33.3,11.0,9.8,3.6"
)


class TestScaleInvariance:
    def test_same_scene_at_1x_and_2x(self):
        """Every mass and nutrient field of the two reports agrees to 2%."""

        def make(scale):
            img = render_scene(
                1200 * scale,
                900 * scale,
                coin_center=(1000 * scale, 700 * scale),
                coin_radius=70 * scale,
            )
            dets = [
                Detection(
                    label=label,
                    bbox_x=x * scale,
                    bbox_y=y * scale,
                    bbox_w=w * scale,
                    bbox_h=h * scale,
                    confidence=0.9,
                )
                for label, x, y, w, h in [
                    ("banana", 150, 200, 300, 200),
                    ("apple", 620, 350, 210, 210),
                    ("pizza", 200, 500, 380, 300),
                ]
            ]
            return analyze_plate(img, dets, CATALOG, QuantifierConfig())

        r1, r2 = make(1), make(2)
        ok = len(r1.items) == len(r2.items) == 3
        worst = 0.0
        fields = ("calories", "carbohydrates_g", "protein_g", "fat_g", "sugar_g")
        for a, b in zip(r1.items, r2.items):
            pairs = [(a.mass_g, b.mass_g), (a.volume_cc, b.volume_cc)]
            pairs += [(getattr(a.nutrients, f), getattr(b.nutrients, f)) for f in fields]
            for x, y in pairs:
                rel = abs(x - y) / abs(x)
                worst = max(worst, rel)
                ok = ok and rel <= 0.02
        for f in fields:
            x, y = getattr(r1.totals, f), getattr(r2.totals, f)
            rel = abs(x - y) / abs(x)
            worst = max(worst, rel)
            ok = ok and rel <= 0.02
        report(
            "scale invariance: 1x vs 2x reports equal within 2%",
            ok,
            f"worst relative difference {worst:.4%}",
        )


class TestTfIdfOracle:
    def test_ten_random_corpora_match_brute_force_exactly(self):
        """idf and document vectors equal a brute-force counter to 1e-12."""
        words = ["diabetes", "sugar", "protein", "gym", "heart", "fiber", "vegan", "iron"]
        rnd = random.Random(101)
        ok = True
        for _ in range(10):
            docs = [
                " ".join(rnd.choices(words, k=rnd.randint(0, 6)))
                for _ in range(rnd.randint(1, 6))
            ]
            model = fit_tfidf(docs)
            token_lists = [tokenize(d) for d in docs]
            vocab = sorted({t for ts in token_lists for t in ts})
            n = len(docs)
            for term in vocab:
                df = sum(1 for ts in token_lists if term in ts)
                idf = math.log((1 + n) / (1 + df)) + 1.0
                ok = ok and abs(model.idf[model.vocabulary[term]] - idf) <= 1e-12
            for d, tokens in enumerate(token_lists):
                weights = [tokens.count(t) * (math.log((1 + n) / (1 + sum(1 for ts in token_lists if t in ts))) + 1.0) for t in vocab]
                norm = math.sqrt(sum(w * w for w in weights))
                for j, term in enumerate(vocab):
                    want = weights[j] / norm if norm else 0.0
                    got = model.doc_vectors[d, model.vocabulary[term]]
                    ok = ok and abs(got - want) <= 1e-12
        report("tf-idf oracle: 10 random corpora match brute force to 1e-12", ok)


class TestFactorizationCriteria:
    def test_rank1_rank2_and_monotonicity(self):
        started = time.monotonic()

        rng = np.random.default_rng(42)
        a = rng.normal(scale=0.6, size=6)
        a -= a.mean()
        b = rng.normal(scale=0.6, size=5)
        m1 = fit_factors(3.0 + np.outer(a, b), rank=1, reg_lambda=0.0, iterations=50, seed=1)
        rank1_ok = m1.rmse_history[-1] <= 1e-6

        rng = np.random.default_rng(7)
        full = (
            3.0
            + np.outer(rng.normal(scale=0.5, size=30), rng.normal(scale=0.5, size=24))
            + np.outer(rng.normal(scale=0.5, size=30), rng.normal(scale=0.5, size=24))
        )
        full = np.clip(full, 1.0, 5.0)
        mask = rng.random(full.shape) < 0.30
        train = full.copy()
        train[mask] = np.nan
        m2 = fit_factors(train, rank=2, reg_lambda=0.01, iterations=100, seed=3)
        pred = np.array(
            [[m2.predict(str(u), str(i)) for i in range(24)] for u in range(30)]
        )
        holdout = float(np.sqrt(((pred - full)[mask] ** 2).mean()))
        rank2_ok = holdout <= 0.05

        mono_ok = True
        for model in (m1, m2):
            h = np.array(model.objective_history)
            mono_ok = mono_ok and bool((np.diff(h) <= 1e-9 * (abs(h[0]) + 1.0)).all())

        elapsed = time.monotonic() - started
        report(
            "factorization: rank-1 RMSE<=1e-6, rank-2 holdout<=0.05, objective monotone",
            rank1_ok and rank2_ok and mono_ok and elapsed < 60.0,
            f"rank1={m1.rmse_history[-1]:.2e} holdout={holdout:.4f} in {elapsed:.1f}s",
        )


def _random_recipe(rng, rid, tag, words):
    carbs = float(rng.uniform(5, 60))
    return Recipe(
        id=rid,
        name=rid,
        description=" ".join(rng.choice(words, size=3)),
        diet_tag=tag,
        per_serving=NutrientProfile(
            calories=float(rng.uniform(100, 700)),
            carbohydrates_g=carbs,
            protein_g=float(rng.uniform(2, 40)),
            fat_g=float(rng.uniform(2, 30)),
            sugar_g=float(rng.uniform(0, carbs)),
        ),
    )


class TestRecommendationInvariants:
    def test_thousand_randomized_triples(self):
        """No diet-tag violation, deterministic output, sorted with the
        documented tie-break, across 1000 random (profile, catalog,
        ratings) triples."""
        rng = np.random.default_rng(555)
        tags = ("vegan", "vegetarian", "non-vegetarian")
        words = np.array(
            ["protein", "sugar", "fiber", "iron", "salad", "cake", "soup", "grill"]
        )
        cfg = RecommenderConfig(seed=9, iterations=4)
        violations = 0
        nondeterminism = 0
        order_breaks = 0
        checked = 0
        for trial in range(1000):
            n = int(rng.integers(2, 7))
            recipes = tuple(
                _random_recipe(rng, f"r{trial}-{i}", tags[int(rng.integers(0, 3))], words)
                for i in range(n)
            )
            ratings = {}
            for _ in range(int(rng.integers(0, 8))):
                u = f"u{int(rng.integers(0, 3))}"
                ratings[(u, recipes[int(rng.integers(0, n))].id)] = float(rng.integers(1, 6))
            pref = tags[int(rng.integers(0, 3))]
            user = UserProfile(
                user_id="u0",
                height_m=float(rng.uniform(1.4, 2.0)),
                weight_kg=float(rng.uniform(45, 110)),
                gender="other",
                diet_pref=pref,
                health_history=" ".join(rng.choice(words, size=2)),
            )
            snap = build_snapshot(recipes, ratings, (), cfg)
            try:
                recs = recommend(user, snap, cfg, count=5, now=NOW)
            except NoEligibleRecipes:
                if any(r.diet_tag in allowed_diet_tags(pref) for r in recipes):
                    violations += 1
                continue
            checked += 1
            by_id = {r.id: r for r in recipes}
            if any(by_id[r.recipe_id].diet_tag not in allowed_diet_tags(pref) for r in recs):
                violations += 1
            for x, y in zip(recs, recs[1:]):
                if not (x.score > y.score or (x.score == y.score and x.recipe_id < y.recipe_id)):
                    order_breaks += 1
            again = recommend(user, snap, cfg, count=5, now=NOW)
            if [(r.recipe_id, r.score) for r in recs] != [
                (r.recipe_id, r.score) for r in again
            ]:
                nondeterminism += 1
            if trial % 100 == 0:  # end-to-end determinism including refit
                snap2 = build_snapshot(recipes, ratings, (), cfg)
                refit = recommend(user, snap2, cfg, count=5, now=NOW)
                if [(r.recipe_id, r.score) for r in recs] != [
                    (r.recipe_id, r.score) for r in refit
                ]:
                    nondeterminism += 1
        report(
            "recommendation invariants: 1000 triples, zero violations, deterministic",
            violations == 0 and nondeterminism == 0 and order_breaks == 0 and checked > 800,
            f"checked={checked} violations={violations}",
        )


class TestBmiBoundaries:
    def test_boundary_table_exact(self):
        table = {
            18.49: "underweight",
            18.5: "normal",
            24.99: "normal",
            25.0: "overweight",
            29.99: "overweight",
            30.0: "obese",
        }
        results = {v: compute_bmi(1.0, v).category for v in table}
        report(
            "bmi boundaries: 18.49/18.5/24.99/25/29.99/30 categorized exactly",
            results == table,
            str(results),
        )


class TestWarningRule:
    def test_randomized_exhaustive_iff(self):
        """Warning present exactly when amount exceeds the limit; no
        tolerance, 2000 random draws plus the equality edge."""
        rnd = random.Random(77)
        ok = True
        for i in range(2000):
            sugar = rnd.uniform(0, 60)
            carbs = rnd.uniform(sugar, 120)
            sugar_limit = rnd.uniform(0.1, 60)
            carb_limit = rnd.uniform(0.1, 120)
            if i % 50 == 0:
                sugar_limit = sugar  # equality must NOT warn
            recipe = Recipe(
                id="r",
                name="r",
                description="",
                diet_tag="vegan",
                per_serving=NutrientProfile(carbohydrates_g=carbs, sugar_g=sugar),
            )
            profile = UserProfile(
                user_id="u",
                height_m=1.7,
                weight_kg=60,
                gender="other",
                diet_pref="vegan",
                sugar_limit_g=sugar_limit,
                carb_limit_g=carb_limit,
            )
            names = {w.nutrient for w in warnings_for(recipe, profile)}
            ok = ok and (("sugar" in names) == (sugar > sugar_limit))
            ok = ok and (("carbohydrates" in names) == (carbs > carb_limit))
        report("warning rule: present iff amount > limit (2000 random draws)", ok)


class TestMetricsHarness:
    def test_identity_and_hand_computed_case(self):
        rnd = random.Random(31)
        ok = True
        for _ in range(50):
            dets = [
                Detection(
                    label=rnd.choice(["apple", "banana"]),
                    bbox_x=rnd.randrange(0, 300),
                    bbox_y=rnd.randrange(0, 300),
                    bbox_w=rnd.randrange(5, 80),
                    bbox_h=rnd.randrange(5, 80),
                    confidence=round(rnd.uniform(0.5, 1.0), 3),
                )
                for _ in range(rnd.randint(1, 8))
            ]
            truth = [
                GroundTruthBox(d.label, d.bbox_x, d.bbox_y, d.bbox_w, d.bbox_h)
                for d in dets
            ]
            m = evaluate(dets, truth)
            ok = ok and (m.accuracy, m.precision, m.recall, m.mean_iou) == (1, 1, 1, 1)

        truth = [
            GroundTruthBox("apple", 0, 0, 10, 10),
            GroundTruthBox("apple", 50, 50, 10, 10),
        ]
        m = evaluate(
            [Detection("apple", 0, 0, 10, 10, confidence=0.9)], truth
        )
        ok = ok and m.precision == 1.0 and m.recall == 0.5
        report(
            "metrics harness: evaluate(x,x)=ones and 2-truth/1-det gives P=1.0 R=0.5",
            ok,
            f"precision={m.precision} recall={m.recall}",
        )


class TestDualPathService:
    def test_endpoint_bodies_equal_library_serialization(self, engine, scene_files):
        from fastapi.testclient import TestClient

        from nutrivision.service import create_app

        client = TestClient(create_app(engine))
        image_path, det_path = scene_files

        analyze_response = client.post(
            "/v1/analyze",
            files={
                "image": ("scene.png", image_path.read_bytes(), "image/png"),
                "detections": ("boxes.json", det_path.read_bytes(), "application/json"),
            },
        )
        library_report = engine.analyze(image_path.read_bytes(), det_path.read_bytes())
        analyze_ok = (
            analyze_response.status_code == 200
            and analyze_response.content == canonical.dump_bytes(library_report.to_dict())
        )

        rec_response = client.get("/v1/users/maya/recommendations?count=5")
        rec_ok = (
            rec_response.status_code == 200
            and rec_response.content
            == canonical.dump_bytes(engine.recommendations_payload("maya", count=5))
        )
        report(
            "dual path: /v1/analyze and recommendations byte-equal library output",
            analyze_ok and rec_ok,
        )

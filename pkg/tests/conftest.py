"""Shared fixtures: a seeded engine, HTTP client, and a synthetic scene."""

import io
import sys

import pytest
from PIL import Image


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance checklist (one line per criterion) after the run."""
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)

from nutrivision.config import AppConfig
from nutrivision.engine import Engine
from nutrivision.profiles import UserProfile
from nutrivision.synthetic import detection_document, render_scene


def png_bytes(img) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(img.pixels).save(buf, format="PNG")
    return buf.getvalue()


@pytest.fixture
def app_config(tmp_path):
    import dataclasses

    return dataclasses.replace(AppConfig(), store_path=tmp_path / "events.log")


@pytest.fixture
def engine(app_config):
    eng = Engine(app_config)
    eng.upsert_profile(
        UserProfile(
            user_id="maya",
            height_m=1.68,
            weight_kg=54.0,
            gender="female",
            diet_pref="vegan",
            health_history="diabetic low sugar fiber vegan",
            sugar_limit_g=25.0,
            carb_limit_g=120.0,
        )
    )
    eng.upsert_profile(
        UserProfile(
            user_id="arjun",
            height_m=1.75,
            weight_kg=70.0,
            gender="male",
            diet_pref="non-vegetarian",
            health_history="gym protein muscle recovery",
            sugar_limit_g=40.0,
            carb_limit_g=200.0,
        )
    )
    return eng


@pytest.fixture
def scene_files(tmp_path):
    """A PNG plate photo with a coin plus a matching detection document."""
    img = render_scene(
        1200,
        900,
        coin_center=(1050, 760),
        coin_radius=100,
        food_boxes=[
            (200, 200, 300, 200, (220, 190, 40)),  # banana-ish blob
            (600, 300, 220, 220, (200, 40, 40)),  # apple-ish blob
        ],
    )
    dets = detection_document(
        1200,
        900,
        [
            ("Bananas", (200, 200, 300, 200), 0.93),
            ("apple", (600, 300, 220, 220), 0.88),
            ("apple", (605, 305, 220, 220), 0.60),  # near-duplicate, lower conf
            ("sushi", (50, 700, 90, 60), 0.91),  # unknown class
            ("carrot", (900, 100, 80, 40), 0.30),  # below threshold
        ],
    )
    image_path = tmp_path / "scene.png"
    image_path.write_bytes(png_bytes(img))
    det_path = tmp_path / "detections.json"
    det_path.write_bytes(dets)
    return image_path, det_path


@pytest.fixture
def coinless_scene(tmp_path):
    import numpy as np

    from nutrivision.calibration import RgbImage
    from nutrivision.synthetic import TABLE_GREEN

    img = RgbImage.from_array(np.full((300, 400, 3), TABLE_GREEN, dtype=np.uint8))
    image_path = tmp_path / "nocoin.png"
    image_path.write_bytes(png_bytes(img))
    det_path = tmp_path / "nocoin-detections.json"
    det_path.write_bytes(detection_document(400, 300, [("apple", (10, 10, 50, 50), 0.9)]))
    return image_path, det_path

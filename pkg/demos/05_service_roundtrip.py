"""End-to-end HTTP roundtrip against an in-process service.

Creates a profile, analyzes a synthetic plate, logs it as a meal, pulls
recommendations, posts feedback, and pulls the refreshed list: the whole
loop a client app would drive, without opening a port.
"""

import io
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient
from PIL import Image

from nutrivision.config import AppConfig
from nutrivision.engine import Engine
from nutrivision.service import create_app
from nutrivision.synthetic import detection_document, render_scene

store = Path(tempfile.mkdtemp()) / "events.log"
import dataclasses

engine = Engine(dataclasses.replace(AppConfig(), store_path=store))
client = TestClient(create_app(engine))

# 1. create a profile
resp = client.post(
    "/v1/users",
    json={
        "user_id": "demo",
        "height_m": 1.75,
        "weight_kg": 70.0,
        "gender": "other",
        "diet_pref": "vegetarian",
        "health_history": "low sugar, high fiber preference",
        "sugar_limit_g": 30,
        "carb_limit_g": 120,
    },
)
print("profile upsert:", resp.status_code, resp.json())
print("bmi:", client.get("/v1/users/demo/bmi").json())

# 2. analyze a plate photo
img = render_scene(
    1200, 900, coin_center=(1050, 760), coin_radius=100,
    food_boxes=[(200, 200, 300, 200, (220, 190, 40))],
)
buf = io.BytesIO()
Image.fromarray(img.pixels).save(buf, format="PNG")
doc = detection_document(1200, 900, [("banana", (200, 200, 300, 200), 0.93)])
resp = client.post(
    "/v1/analyze",
    files={"image": ("plate.png", buf.getvalue(), "image/png"),
           "detections": ("boxes.json", doc, "application/json")},
)
report = resp.json()
print("analyze:", resp.status_code, "->", [i["label"] for i in report["items"]],
      f"{report['totals']['calories']:.0f} kcal")

# 3. log it as a meal, then get recommendations
print("meal log:", client.post("/v1/users/demo/meals", json={"report": report}).json())
recs = client.get("/v1/users/demo/recommendations").json()
print("recommendations:")
for row in recs:
    warn = " !" + row["warnings"][0]["nutrient"] if row["warnings"] else ""
    print(f"  {row['score']:.3f}  {row['recipe']['name']}{warn}")

# 4. feedback changes the next round
top = recs[0]["recipe_id"]
print("feedback:", client.post(
    "/v1/users/demo/feedback", json={"recipe_id": top, "tried": False}
).json())
refreshed = client.get("/v1/users/demo/recommendations").json()
old_score = recs[0]["score"]
new_score = next(r["score"] for r in refreshed if r["recipe_id"] == top)
print(f"after skipping {top}: score {old_score:.3f} -> {new_score:.3f} "
      f"(delta penalty), current top is {refreshed[0]['recipe_id']}")

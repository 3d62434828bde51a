"""Plate quantification walkthrough.

A synthetic plate photo plus a detector document go in; real dimensions,
volumes, masses, scaled nutrients and the macro distribution come out.
"""

from nutrivision import Engine, load_detections
from nutrivision.calibration import RgbImage  # noqa: F401 (shown for the file path route)
from nutrivision.config import AppConfig
from nutrivision.synthetic import detection_document, render_scene

engine = Engine(AppConfig())

img = render_scene(
    1200,
    900,
    coin_center=(1050, 760),
    coin_radius=100,
    food_boxes=[
        (200, 200, 300, 200, (220, 190, 40)),
        (600, 300, 220, 220, (200, 40, 40)),
    ],
)
doc = detection_document(
    1200,
    900,
    [
        ("Bananas", (200, 200, 300, 200), 0.93),  # plural: normalized to "banana"
        ("apple", (600, 300, 220, 220), 0.88),
        ("sushi", (50, 700, 90, 60), 0.91),  # not in the catalog: skipped
        ("carrot", (900, 100, 80, 40), 0.30),  # under the 0.5 confidence floor
    ],
)

dets = load_detections(doc, 1200, 900, known_labels=engine.catalog.labels)
print(f"{len(dets)} detections survive filtering and normalization")

from nutrivision import analyze_plate

report = analyze_plate(img, dets, engine.catalog, engine.config.quantifier)

print()
print(f"{'item':<10}{'W cm':>7}{'L cm':>7}{'H cm':>7}{'vol cc':>9}{'mass g':>9}{'kcal':>8}")
for item in report.items:
    print(
        f"{item.label:<10}{item.width_cm:>7.2f}{item.length_cm:>7.2f}"
        f"{item.height_cm:>7.2f}{item.volume_cc:>9.1f}{item.mass_g:>9.1f}"
        f"{item.nutrients.calories:>8.1f}"
    )
for skipped in report.skipped:
    print(f"{skipped.label:<10} skipped: {skipped.reason}")

print()
print("plate totals:")
t = report.totals
print(f"  calories {t.calories:.1f} kcal, carbs {t.carbohydrates_g:.1f} g, "
      f"protein {t.protein_g:.1f} g, fat {t.fat_g:.1f} g, sugar {t.sugar_g:.1f} g")
print("macro distribution (%):")
for macro, pct in report.distribution_pct.items():
    print(f"  {macro:<14} {pct:5.1f}  {'#' * int(pct / 2)}")

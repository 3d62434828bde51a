"""From detected boxes to real dimensions, volume, mass and nutrients.

Each detection's pixel box is converted to centimeters with the per-axis
mm-per-pixel ratios from the coin calibration, given the class's preset
height, multiplied out to a raw volume, then scaled by a global fill
factor (default 0.8) that discounts the empty corners a rectangular box
adds around mostly round food. Density converts the volume to grams and
the per-100 g nutrient row scales linearly with that mass. A plate
report aggregates items into totals and a percentage distribution over
the four tracked macros.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .calibration import ReferenceMeasurement, ReferenceSpec, RgbImage, detect_reference
from .catalog import MACROS, Catalog, FoodClassSpec, NutrientProfile
from .detections import Detection, dedupe
from .errors import UnknownFoodClass

DEFAULT_BOX_FILL_FACTOR = 0.8


@dataclass(frozen=True)
class QuantifierConfig:
    box_fill_factor: float = DEFAULT_BOX_FILL_FACTOR
    reference: ReferenceSpec = field(default_factory=ReferenceSpec)

    def __post_init__(self):
        if not 0.0 < self.box_fill_factor <= 1.0:
            raise ValueError("box_fill_factor must lie in (0, 1]")


@dataclass(frozen=True)
class QuantifiedFood:
    label: str
    length_cm: float
    width_cm: float
    height_cm: float
    volume_cc: float
    mass_g: float
    nutrients: NutrientProfile

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "length_cm": self.length_cm,
            "width_cm": self.width_cm,
            "height_cm": self.height_cm,
            "volume_cc": self.volume_cc,
            "mass_g": self.mass_g,
            "nutrients": self.nutrients.to_dict(),
        }


@dataclass(frozen=True)
class SkippedItem:
    label: str
    reason: str

    def to_dict(self) -> dict:
        return {"label": self.label, "reason": self.reason}


@dataclass(frozen=True)
class PlateReport:
    items: tuple[QuantifiedFood, ...]
    totals: NutrientProfile
    distribution_pct: dict[str, float]
    distribution_defined: bool
    skipped: tuple[SkippedItem, ...] = ()

    def to_dict(self) -> dict:
        return {
            "items": [item.to_dict() for item in self.items],
            "totals": self.totals.to_dict(),
            "distribution_pct": {m: self.distribution_pct[m] for m in MACROS},
            "distribution_defined": self.distribution_defined,
            "skipped": [s.to_dict() for s in self.skipped],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PlateReport":
        items = tuple(
            QuantifiedFood(
                label=str(i["label"]),
                length_cm=float(i["length_cm"]),
                width_cm=float(i["width_cm"]),
                height_cm=float(i["height_cm"]),
                volume_cc=float(i["volume_cc"]),
                mass_g=float(i["mass_g"]),
                nutrients=NutrientProfile.from_dict(i["nutrients"]),
            )
            for i in data.get("items", [])
        )
        return cls(
            items=items,
            totals=NutrientProfile.from_dict(data.get("totals", {})),
            distribution_pct={
                m: float(data.get("distribution_pct", {}).get(m, 0.0)) for m in MACROS
            },
            distribution_defined=bool(data.get("distribution_defined", False)),
            skipped=tuple(
                SkippedItem(label=str(s["label"]), reason=str(s["reason"]))
                for s in data.get("skipped", [])
            ),
        )


def quantify_item(
    det: Detection,
    ref: ReferenceMeasurement,
    spec: FoodClassSpec,
    cfg: QuantifierConfig,
) -> QuantifiedFood:
    """Convert one detection to real dimensions, volume, mass and nutrients.

    Width follows the x axis (box width times ratio_x), length the y axis;
    both land in centimeters (ratios are mm/px, hence the /10). Height is
    the class preset.
    """
    width_cm = det.bbox_w * ref.ratio_x_mm_per_px / 10.0
    length_cm = det.bbox_h * ref.ratio_y_mm_per_px / 10.0
    height_cm = spec.default_height_cm
    volume_cc = length_cm * width_cm * height_cm * cfg.box_fill_factor
    mass_g = volume_cc * spec.density_g_per_cc
    return QuantifiedFood(
        label=spec.label,
        length_cm=length_cm,
        width_cm=width_cm,
        height_cm=height_cm,
        volume_cc=volume_cc,
        mass_g=mass_g,
        nutrients=spec.per_100g.scaled(mass_g / 100.0),
    )


def build_report(
    items: Sequence[QuantifiedFood],
    skipped: Sequence[SkippedItem] = (),
) -> PlateReport:
    """Sum items into totals and a macro percentage distribution.

    The distribution is each macro's share of the summed macro grams; an
    empty plate (or all-zero macros) has no meaningful distribution and
    is flagged undefined with all-zero percentages.
    """
    totals = NutrientProfile()
    for item in items:
        totals = totals + item.nutrients

    macro_sum = sum(totals.macro_grams(m) for m in MACROS)
    if macro_sum > 0:
        distribution = {m: 100.0 * totals.macro_grams(m) / macro_sum for m in MACROS}
        defined = True
    else:
        distribution = {m: 0.0 for m in MACROS}
        defined = False

    return PlateReport(
        items=tuple(items),
        totals=totals,
        distribution_pct=distribution,
        distribution_defined=defined,
        skipped=tuple(skipped),
    )


def analyze_plate(
    img: RgbImage,
    dets: Sequence[Detection],
    catalog: Catalog,
    cfg: QuantifierConfig,
) -> PlateReport:
    """Full pipeline: calibrate, dedupe, quantify each item, aggregate.

    Calibration is mandatory (NoReferenceFound propagates), but unknown
    food labels only produce skipped entries; one exotic item should not
    void the whole plate.
    """
    ref = detect_reference(img, cfg.reference)
    items: list[QuantifiedFood] = []
    skipped: list[SkippedItem] = []
    for det in dedupe(dets):
        try:
            spec = catalog.lookup(det.label)
        except UnknownFoodClass:
            skipped.append(SkippedItem(label=det.label, reason="UNKNOWN_FOOD_CLASS"))
            continue
        items.append(quantify_item(det, ref, spec, cfg))
    return build_report(items, skipped)

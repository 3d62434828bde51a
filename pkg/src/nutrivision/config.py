"""One JSON config file drives every run.

Sections (all optional, with defaults): ``reference`` (coin spec and HSV
band), ``quantifier``, ``detections``, ``recommender``, ``catalog``
(file paths; omitted means the shipped defaults), ``store`` (event-log
path) and ``service`` (host/port). The config path comes from an
explicit argument, else the NUTRIVISION_CONFIG environment variable,
else everything defaults. Unknown keys inside known sections are
rejected; they are almost always typos that would otherwise silently
revert a knob to its default.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .calibration import HsvRange, ReferenceSpec
from .errors import SchemaError
from .quantify import QuantifierConfig
from .recommender import RecommenderConfig

ENV_CONFIG_PATH = "NUTRIVISION_CONFIG"

DEFAULT_STORE_PATH = "nutrivision-events.log"


@dataclass(frozen=True)
class DetectionConfig:
    confidence_threshold: float = 0.5
    dedupe_iou: float = 0.6


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000


@dataclass(frozen=True)
class AppConfig:
    reference: ReferenceSpec = field(default_factory=ReferenceSpec)
    quantifier: QuantifierConfig = field(default_factory=QuantifierConfig)
    detections: DetectionConfig = field(default_factory=DetectionConfig)
    recommender: RecommenderConfig = field(default_factory=RecommenderConfig)
    store_path: Path = Path(DEFAULT_STORE_PATH)
    catalog_path: Path | None = None  # None = shipped default table
    recipes_path: Path | None = None
    service: ServiceConfig = field(default_factory=ServiceConfig)


def _take(section: dict, allowed: dict, where: str) -> dict:
    """Pop known keys with type coercion; reject anything left over."""
    out = {}
    for key, coerce in allowed.items():
        if key in section:
            try:
                out[key] = coerce(section.pop(key))
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"config {where}.{key}: {exc}") from exc
    if section:
        raise SchemaError(f"config {where}: unknown keys {sorted(section)}")
    return out


def _parse_reference(section: dict) -> ReferenceSpec:
    color_raw = section.pop("color", None)
    fields = _take(
        section,
        {
            "real_diameter_mm": float,
            "min_area_px": float,
            "max_area_px": float,
            "min_fill_ratio": float,
        },
        "reference",
    )
    if color_raw is not None:
        color_fields = _take(
            dict(color_raw),
            {k: float for k in ("h_min", "h_max", "s_min", "s_max", "v_min", "v_max")},
            "reference.color",
        )
        fields["color"] = HsvRange(**color_fields)
    try:
        return ReferenceSpec(**fields)
    except ValueError as exc:
        raise SchemaError(f"config reference: {exc}") from exc


def _parse_recommender(section: dict) -> RecommenderConfig:
    targets = section.pop("daily_targets", None)
    stop_words = section.pop("stop_words", None)
    fields = _take(
        section,
        {
            "alpha": float,
            "gamma": float,
            "beta": float,
            "delta": float,
            "rank_k": int,
            "lambda": float,
            "iterations": int,
            "seed": int,
            "cold_start_min_ratings": int,
            "window_days": int,
        },
        "recommender",
    )
    if "lambda" in fields:
        fields["reg_lambda"] = fields.pop("lambda")
    if targets is not None:
        if not isinstance(targets, dict):
            raise SchemaError("config recommender.daily_targets must be an object")
        fields["daily_targets"] = targets
    if stop_words is not None:
        if not isinstance(stop_words, list):
            raise SchemaError("config recommender.stop_words must be an array")
        fields["stop_words"] = tuple(str(w) for w in stop_words)
    return RecommenderConfig(**fields)


def load_config(path: str | Path | None = None) -> AppConfig:
    """Read the config file (explicit path, else $NUTRIVISION_CONFIG, else defaults)."""
    if path is None:
        path = os.environ.get(ENV_CONFIG_PATH) or None
    if path is None:
        return AppConfig()

    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise SchemaError(f"config file not found: {path}") from None
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SchemaError(f"config file is malformed: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaError("config root must be a JSON object")

    base_dir = path.parent

    def _resolve(p) -> Path:
        p = Path(str(p))
        return p if p.is_absolute() else base_dir / p

    kwargs = {}
    if "reference" in raw:
        kwargs["reference"] = _parse_reference(dict(raw.pop("reference")))
    if "quantifier" in raw:
        q = _take(dict(raw.pop("quantifier")), {"box_fill_factor": float}, "quantifier")
        try:
            kwargs["quantifier"] = QuantifierConfig(
                reference=kwargs.get("reference", ReferenceSpec()), **q
            )
        except ValueError as exc:
            raise SchemaError(f"config quantifier: {exc}") from exc
    if "detections" in raw:
        d = _take(
            dict(raw.pop("detections")),
            {"confidence_threshold": float, "dedupe_iou": float},
            "detections",
        )
        kwargs["detections"] = DetectionConfig(**d)
    if "recommender" in raw:
        kwargs["recommender"] = _parse_recommender(dict(raw.pop("recommender")))
    if "store" in raw:
        s = _take(dict(raw.pop("store")), {"path": str}, "store")
        if "path" in s:
            kwargs["store_path"] = _resolve(s["path"])
    if "catalog" in raw:
        c = _take(
            dict(raw.pop("catalog")),
            {"catalog_path": str, "recipes_path": str},
            "catalog",
        )
        if "catalog_path" in c:
            kwargs["catalog_path"] = _resolve(c["catalog_path"])
        if "recipes_path" in c:
            kwargs["recipes_path"] = _resolve(c["recipes_path"])
    if "service" in raw:
        s = _take(dict(raw.pop("service")), {"host": str, "port": int}, "service")
        kwargs["service"] = ServiceConfig(**s)
    if raw:
        raise SchemaError(f"config: unknown sections {sorted(raw)}")

    # keep the quantifier's embedded reference spec in sync
    if "reference" in kwargs and "quantifier" not in kwargs:
        kwargs["quantifier"] = QuantifierConfig(reference=kwargs["reference"])

    return AppConfig(**kwargs)

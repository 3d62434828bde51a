"""Detector-output ingestion and detection-quality metrics.

The object detector itself is pluggable and lives outside this package;
its output arrives as a JSON document (see ``load_detections``). This
module validates and normalizes that document, merges duplicate boxes,
and provides the evaluation harness (precision, recall, accuracy,
mean IoU) for comparing detections against hand-labeled ground truth.

Accuracy is computed per-box as TP / (TP + FP + FN), since classification
accuracy over an open detection set is otherwise ill-posed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .catalog import normalize_label
from .errors import SchemaError

Box = tuple[float, float, float, float]  # (x, y, w, h) in pixels

DEFAULT_CONFIDENCE_THRESHOLD = 0.5
DEDUPE_IOU_THRESHOLD = 0.6
MATCH_IOU_FLOOR = 0.5


@dataclass(frozen=True)
class Detection:
    label: str
    bbox_x: float
    bbox_y: float
    bbox_w: float
    bbox_h: float
    confidence: float

    def __post_init__(self):
        if self.bbox_w <= 0 or self.bbox_h <= 0:
            raise ValueError("detection box sides must be positive")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must lie in [0, 1]")

    @property
    def box(self) -> Box:
        return (self.bbox_x, self.bbox_y, self.bbox_w, self.bbox_h)


@dataclass(frozen=True)
class GroundTruthBox:
    label: str
    bbox_x: float
    bbox_y: float
    bbox_w: float
    bbox_h: float

    def __post_init__(self):
        if self.bbox_w <= 0 or self.bbox_h <= 0:
            raise ValueError("ground-truth box sides must be positive")

    @property
    def box(self) -> Box:
        return (self.bbox_x, self.bbox_y, self.bbox_w, self.bbox_h)


@dataclass(frozen=True)
class Metrics:
    """Per-box detection metrics; ``undefined`` names metrics whose
    denominator was zero (reported as 0.0)."""

    accuracy: float
    precision: float
    recall: float
    mean_iou: float
    tp: int
    fp: int
    fn: int
    undefined: tuple[str, ...] = ()


def _clamp_box(x, y, w, h, image_w, image_h) -> Box | None:
    """Clip a box to the image; None when nothing of it remains inside."""
    x2 = min(x + w, float(image_w))
    y2 = min(y + h, float(image_h))
    x = max(x, 0.0)
    y = max(y, 0.0)
    if x2 - x <= 0 or y2 - y <= 0:
        return None
    return (x, y, x2 - x, y2 - y)


def load_detections(
    document: bytes | str,
    image_w: int | None = None,
    image_h: int | None = None,
    *,
    confidence_threshold: float = DEFAULT_CONFIDENCE_THRESHOLD,
    known_labels: Iterable[str] | None = None,
) -> list[Detection]:
    """Parse a detection document into clamped, filtered, normalized boxes.

    The document is a JSON object with ``image_width``, ``image_height``
    and a ``detections`` array of ``{label, bbox: [x, y, w, h],
    confidence}`` entries. When ``image_w``/``image_h`` are given they
    must agree with the document; a mismatch means the detector ran on a
    different resolution and every coordinate would be in the wrong
    frame. Boxes are clipped to the image, entries under the confidence
    threshold are dropped (an empty result is valid, not an error), and
    labels are lowercased with plural stripping against ``known_labels``.
    """
    if isinstance(document, bytes):
        try:
            document = document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SchemaError(f"detection document is not UTF-8: {exc}") from exc
    try:
        data = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"detection document is malformed JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SchemaError("detection document must be a JSON object")

    try:
        doc_w = int(data["image_width"])
        doc_h = int(data["image_height"])
        entries = data["detections"]
    except KeyError as exc:
        raise SchemaError(f"detection document missing key {exc}") from exc
    if not isinstance(entries, list):
        raise SchemaError("'detections' must be an array")
    if doc_w <= 0 or doc_h <= 0:
        raise SchemaError("image dimensions must be positive")

    if (image_w is not None and image_w != doc_w) or (
        image_h is not None and image_h != doc_h
    ):
        raise SchemaError(
            f"detection frame {doc_w}x{doc_h} does not match image "
            f"{image_w}x{image_h}"
        )
    image_w = doc_w if image_w is None else image_w
    image_h = doc_h if image_h is None else image_h

    detections = []
    for i, entry in enumerate(entries):
        where = f"detection {i}"
        if not isinstance(entry, dict):
            raise SchemaError(f"{where}: must be an object")
        try:
            label = str(entry["label"])
            bbox = entry["bbox"]
            confidence = float(entry["confidence"])
        except KeyError as exc:
            raise SchemaError(f"{where}: missing key {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"{where}: {exc}") from exc
        if not (isinstance(bbox, list) and len(bbox) == 4):
            raise SchemaError(f"{where}: bbox must be [x, y, w, h]")
        try:
            x, y, w, h = (float(v) for v in bbox)
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"{where}: bbox values must be numbers") from exc
        if w <= 0 or h <= 0:
            raise SchemaError(f"{where}: bbox sides must be positive")
        if not 0.0 <= confidence <= 1.0:
            raise SchemaError(f"{where}: confidence must lie in [0, 1]")

        if confidence < confidence_threshold:
            continue
        clamped = _clamp_box(x, y, w, h, image_w, image_h)
        if clamped is None:
            continue  # box lies entirely outside the image
        detections.append(
            Detection(
                label=normalize_label(label, known_labels),
                bbox_x=clamped[0],
                bbox_y=clamped[1],
                bbox_w=clamped[2],
                bbox_h=clamped[3],
                confidence=confidence,
            )
        )
    return detections


def iou(a: Box | Detection | GroundTruthBox, b: Box | Detection | GroundTruthBox) -> float:
    """Intersection-over-union of two (x, y, w, h) boxes; 0 when disjoint."""
    ax, ay, aw, ah = a.box if hasattr(a, "box") else a
    bx, by, bw, bh = b.box if hasattr(b, "box") else b
    ix = max(ax, bx)
    iy = max(ay, by)
    ix2 = min(ax + aw, bx + bw)
    iy2 = min(ay + ah, by + bh)
    inter = max(0.0, ix2 - ix) * max(0.0, iy2 - iy)
    if inter == 0.0:
        return 0.0
    union = aw * ah + bw * bh - inter
    return inter / union


def dedupe(dets: Sequence[Detection], iou_threshold: float = DEDUPE_IOU_THRESHOLD) -> list[Detection]:
    """Merge same-label near-duplicates, keeping the higher confidence box.

    Among same-label pairs with IoU above the threshold only the most
    confident survives; different labels never merge. Output is ordered
    by confidence descending.
    """
    ranked = sorted(dets, key=lambda d: (-d.confidence, d.label, d.bbox_x, d.bbox_y))
    kept: list[Detection] = []
    for det in ranked:
        duplicate = any(
            k.label == det.label and iou(k, det) > iou_threshold for k in kept
        )
        if not duplicate:
            kept.append(det)
    return kept


def evaluate(
    dets: Sequence[Detection],
    truth: Sequence[GroundTruthBox],
    match_floor: float = MATCH_IOU_FLOOR,
) -> Metrics:
    """Score detections against ground truth (same coordinate frame).

    Candidate (detection, truth) pairs with matching labels and IoU at or
    above ``match_floor`` are matched greedily by descending IoU, one to
    one. Matched pairs are true positives; leftovers are false positives
    and false negatives respectively.
    """
    pairs = []
    for di, det in enumerate(dets):
        for ti, gt in enumerate(truth):
            if det.label != gt.label:
                continue
            overlap = iou(det, gt)
            if overlap >= match_floor:
                pairs.append((overlap, di, ti))
    pairs.sort(key=lambda p: (-p[0], p[1], p[2]))

    matched_d: set[int] = set()
    matched_t: set[int] = set()
    ious = []
    for overlap, di, ti in pairs:
        if di in matched_d or ti in matched_t:
            continue
        matched_d.add(di)
        matched_t.add(ti)
        ious.append(overlap)

    tp = len(ious)
    fp = len(dets) - tp
    fn = len(truth) - tp

    undefined = []

    def ratio(num: int, den: int, name: str) -> float:
        if den == 0:
            undefined.append(name)
            return 0.0
        return num / den

    precision = ratio(tp, tp + fp, "precision")
    recall = ratio(tp, tp + fn, "recall")
    accuracy = ratio(tp, tp + fp + fn, "accuracy")
    mean_iou = sum(ious) / tp if tp else ratio(0, 0, "mean_iou")

    return Metrics(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        mean_iou=mean_iou,
        tp=tp,
        fp=fp,
        fn=fn,
        undefined=tuple(undefined),
    )

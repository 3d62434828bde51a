"""Synthetic scene rendering for demos, fixtures and calibration checks.

No camera is needed to exercise the pipeline: these helpers rasterize an
overhead "plate photo" containing a coin-colored disc (the reference),
optional food blobs, and optional salt noise, plus a matching detection
document. The disc membership test used for rendering doubles as the
ground-truth oracle when verifying the detector.
"""

from __future__ import annotations

import json

import numpy as np

from .calibration import RgbImage

COIN_GRAY = (150, 150, 150)
TABLE_GREEN = (44, 120, 48)

__all__ = [
    "COIN_GRAY",
    "TABLE_GREEN",
    "disc_mask",
    "disc_bbox",
    "render_scene",
    "detection_document",
]


def disc_mask(width: int, height: int, cx: float, cy: float, radius: float) -> np.ndarray:
    """Boolean mask of pixels whose centers fall inside the disc."""
    ys, xs = np.mgrid[0:height, 0:width]
    return (xs - cx) ** 2 + (ys - cy) ** 2 <= radius**2


def disc_bbox(width: int, height: int, cx: float, cy: float, radius: float):
    """Tight (x, y, w, h) box of the rasterized disc: the clean-render oracle."""
    mask = disc_mask(width, height, cx, cy, radius)
    ys, xs = np.nonzero(mask)
    if xs.size == 0:
        raise ValueError("disc does not intersect the image")
    return (
        int(xs.min()),
        int(ys.min()),
        int(xs.max() - xs.min() + 1),
        int(ys.max() - ys.min() + 1),
    )


def render_scene(
    width: int,
    height: int,
    *,
    coin_center: tuple[float, float],
    coin_radius: float,
    coin_rgb: tuple[int, int, int] = COIN_GRAY,
    background_rgb: tuple[int, int, int] = TABLE_GREEN,
    food_boxes: list[tuple[int, int, int, int, tuple[int, int, int]]] | None = None,
    noise_fraction: float = 0.0,
    rng: np.random.Generator | None = None,
) -> RgbImage:
    """Render a flat-colored scene with one coin disc.

    ``food_boxes`` are (x, y, w, h, rgb) rectangles painted before the
    coin, purely cosmetic. ``noise_fraction`` flips that share of the
    background (non-coin) pixels to the coin color, emulating glare
    speckle.
    """
    img = np.empty((height, width, 3), dtype=np.uint8)
    img[:] = background_rgb
    for x, y, w, h, rgb in food_boxes or []:
        img[y : y + h, x : x + w] = rgb

    coin = disc_mask(width, height, coin_center[0], coin_center[1], coin_radius)
    img[coin] = coin_rgb

    if noise_fraction > 0.0:
        if rng is None:
            rng = np.random.default_rng()
        background = ~coin
        bg_ys, bg_xs = np.nonzero(background)
        n_flip = int(noise_fraction * bg_ys.size)
        if n_flip:
            pick = rng.choice(bg_ys.size, size=n_flip, replace=False)
            img[bg_ys[pick], bg_xs[pick]] = coin_rgb

    return RgbImage.from_array(img)


def detection_document(
    image_width: int,
    image_height: int,
    entries: list[tuple[str, tuple[float, float, float, float], float]],
) -> bytes:
    """Build detection-file bytes: (label, (x, y, w, h), confidence) per entry."""
    doc = {
        "image_width": image_width,
        "image_height": image_height,
        "detections": [
            {"label": label, "bbox": list(bbox), "confidence": confidence}
            for label, bbox, confidence in entries
        ],
    }
    return json.dumps(doc, indent=2).encode("utf-8")

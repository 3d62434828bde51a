"""Reference-coin detection and pixel-to-millimeter calibration.

An overhead plate photo is taken with a coin of known diameter (the
default is a one-rupee coin, 21.93 mm) lying next to the plate. Locating
that coin and measuring its bounding box yields the mm-per-pixel ratios
that every later size, volume and mass estimate hangs off.

The pipeline is: convert the image to HSV, mask the coin's color band,
extract 8-connected components, screen them by area and fill ratio
(a rasterized disc fills about pi/4 of its bounding box), and measure
the surviving candidate. Two similar-sized survivors are treated as an
error rather than a guess, because a wrong calibration silently corrupts
every downstream gram.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import AmbiguousReference, NoReferenceFound

__all__ = [
    "RgbImage",
    "HsvRange",
    "ReferenceSpec",
    "ReferenceMeasurement",
    "ConnectedComponent",
    "rgb_to_hsv",
    "hsv_channels",
    "mask_by_color",
    "find_components",
    "detect_reference",
]


@dataclass(frozen=True)
class RgbImage:
    """An 8-bit RGB image; ``pixels`` is a (height, width, 3) uint8 array."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("image dimensions must be positive")
        px = np.asarray(self.pixels, dtype=np.uint8)
        if px.shape != (self.height, self.width, 3):
            raise ValueError(
                f"pixel buffer shape {px.shape} does not match "
                f"{self.height}x{self.width}x3"
            )
        object.__setattr__(self, "pixels", px)

    @classmethod
    def from_array(cls, array) -> "RgbImage":
        arr = np.asarray(array, dtype=np.uint8)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError("expected an (h, w, 3) array")
        return cls(width=arr.shape[1], height=arr.shape[0], pixels=arr)

    @classmethod
    def from_bytes(cls, data: bytes) -> "RgbImage":
        """Decode PNG or JPEG bytes."""
        import io

        from PIL import Image, UnidentifiedImageError

        from .errors import SchemaError

        try:
            with Image.open(io.BytesIO(data)) as im:
                rgb = im.convert("RGB")
                return cls.from_array(np.asarray(rgb))
        except UnidentifiedImageError as exc:
            raise SchemaError(f"cannot decode image: {exc}") from exc

    @classmethod
    def open(cls, path) -> "RgbImage":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())


@dataclass(frozen=True)
class HsvRange:
    """Inclusive HSV band; hue in degrees, saturation/value as fractions.

    ``h_min > h_max`` selects a band wrapping through 0 degrees. Setting
    ``h_min=0, h_max=360`` accepts every hue (metallic coins are picked
    out by low saturation, not hue).
    """

    h_min: float = 0.0
    h_max: float = 360.0
    s_min: float = 0.0
    s_max: float = 1.0
    v_min: float = 0.0
    v_max: float = 1.0

    def __post_init__(self):
        for h in (self.h_min, self.h_max):
            if not 0.0 <= h <= 360.0:
                raise ValueError("hue bounds must lie in [0, 360]")
        for lo, hi, name in (
            (self.s_min, self.s_max, "saturation"),
            (self.v_min, self.v_max, "value"),
        ):
            if not 0.0 <= lo <= hi <= 1.0:
                raise ValueError(f"{name} bounds must satisfy 0 <= min <= max <= 1")

    def contains(self, h: np.ndarray, s: np.ndarray, v: np.ndarray) -> np.ndarray:
        if self.h_min <= self.h_max:
            hue_ok = (h >= self.h_min) & (h <= self.h_max)
        else:  # wrap through 0
            hue_ok = (h >= self.h_min) | (h <= self.h_max)
        return (
            hue_ok
            & (s >= self.s_min)
            & (s <= self.s_max)
            & (v >= self.v_min)
            & (v <= self.v_max)
        )


def _default_coin_band() -> HsvRange:
    # Low-saturation metallic band, hue wildcard. Editable via config.
    return HsvRange(h_min=0.0, h_max=360.0, s_min=0.0, s_max=0.25, v_min=0.35, v_max=0.95)


@dataclass(frozen=True)
class ReferenceSpec:
    """What to look for and how picky to be.

    Area gates default to the pixel areas of discs with radius 10 and
    150; the fill-ratio floor of 0.70 sits safely under the ideal disc
    fill of pi/4 ~ 0.785 while rejecting thin glare streaks and cutlery.
    """

    real_diameter_mm: float = 21.93
    color: HsvRange = field(default_factory=_default_coin_band)
    min_area_px: float = np.pi * 10.0**2
    max_area_px: float = np.pi * 150.0**2
    min_fill_ratio: float = 0.70

    def __post_init__(self):
        if self.real_diameter_mm <= 0:
            raise ValueError("real_diameter_mm must be positive")
        if not 0.0 < self.min_fill_ratio <= 1.0:
            raise ValueError("min_fill_ratio must lie in (0, 1]")
        if self.min_area_px < 0 or self.max_area_px < self.min_area_px:
            raise ValueError("area gates must satisfy 0 <= min <= max")


@dataclass(frozen=True)
class ReferenceMeasurement:
    """The detected coin's box and the derived per-axis mm/px ratios."""

    bbox_x: int
    bbox_y: int
    bbox_w: float
    bbox_h: float
    area_px: float
    ratio_x_mm_per_px: float
    ratio_y_mm_per_px: float

    def __post_init__(self):
        if self.bbox_w <= 0 or self.bbox_h <= 0:
            raise ValueError("bounding box sides must be positive")
        if self.area_px > self.bbox_w * self.bbox_h + 1e-9:
            raise ValueError("component area cannot exceed its bounding box")


def rgb_to_hsv(pixel) -> tuple[float, float, float]:
    """Convert one RGB triple (0..255 per channel) to (h deg, s, v).

    Standard hexcone conversion; h in [0, 360) with h=0 for grays.
    """
    r, g, b = (float(c) / 255.0 for c in pixel)
    if not all(0.0 <= c <= 1.0 for c in (r, g, b)):
        raise ValueError("channel values must lie in [0, 255]")
    cmax = max(r, g, b)
    cmin = min(r, g, b)
    delta = cmax - cmin
    if delta == 0.0:
        h = 0.0
    elif cmax == r:
        h = (60.0 * (g - b) / delta) % 360.0
    elif cmax == g:
        h = 60.0 * (b - r) / delta + 120.0
    else:
        h = 60.0 * (r - g) / delta + 240.0
    s = 0.0 if cmax == 0.0 else delta / cmax
    return h, s, cmax


def hsv_channels(img: RgbImage) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized hexcone conversion of a whole image to (h, s, v) planes."""
    arr = img.pixels.astype(np.float64) / 255.0
    r, g, b = arr[..., 0], arr[..., 1], arr[..., 2]
    cmax = arr.max(axis=-1)
    cmin = arr.min(axis=-1)
    delta = cmax - cmin

    h = np.zeros_like(cmax)
    nz = delta > 0
    safe = np.where(nz, delta, 1.0)
    r_is_max = nz & (cmax == r)
    g_is_max = nz & (cmax == g) & ~r_is_max
    b_is_max = nz & ~r_is_max & ~g_is_max
    h = np.where(r_is_max, (60.0 * (g - b) / safe) % 360.0, h)
    h = np.where(g_is_max, 60.0 * (b - r) / safe + 120.0, h)
    h = np.where(b_is_max, 60.0 * (r - g) / safe + 240.0, h)

    s = np.where(cmax > 0, delta / np.where(cmax > 0, cmax, 1.0), 0.0)
    return h, s, cmax


def mask_by_color(img: RgbImage, color: HsvRange) -> np.ndarray:
    """Boolean (height, width) mask of pixels whose HSV falls in ``color``."""
    h, s, v = hsv_channels(img)
    return color.contains(h, s, v)


@dataclass(frozen=True)
class ConnectedComponent:
    """One 8-connected region of a mask: exact area, tight box, pixel coords."""

    area: int
    bbox_x: int
    bbox_y: int
    bbox_w: int
    bbox_h: int
    pixels: np.ndarray  # (area, 2) array of (x, y) coordinates

    @property
    def fill_ratio(self) -> float:
        return self.area / float(self.bbox_w * self.bbox_h)


_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


def find_components(mask: np.ndarray) -> list[ConnectedComponent]:
    """Extract all 8-connected components, largest area first.

    Noisy masks can hold tens of thousands of speckle components, so the
    per-component work stays vectorized: one labeling pass, one nonzero
    pass, then a stable argsort to group coordinates by label.
    """
    mask = np.asarray(mask, dtype=bool)
    labels, count = ndimage.label(mask, structure=_EIGHT_CONNECTED)
    if count == 0:
        return []

    ys, xs = np.nonzero(labels)
    lab = labels[ys, xs]
    order = np.argsort(lab, kind="stable")
    ys, xs, lab = ys[order], xs[order], lab[order]
    areas = np.bincount(lab, minlength=count + 1)[1:]
    stops = np.cumsum(areas)
    starts = stops - areas

    components = []
    for i in range(count):
        cy = ys[starts[i] : stops[i]]
        cx = xs[starts[i] : stops[i]]
        x0 = int(cx.min())
        y0 = int(cy.min())
        components.append(
            ConnectedComponent(
                area=int(areas[i]),
                bbox_x=x0,
                bbox_y=y0,
                bbox_w=int(cx.max()) - x0 + 1,
                bbox_h=int(cy.max()) - y0 + 1,
                pixels=np.column_stack([cx, cy]),
            )
        )
    components.sort(key=lambda c: c.area, reverse=True)
    return components


# Two passers within this relative area difference are "similar" and
# therefore ambiguous.
_AMBIGUITY_REL_AREA = 0.10


def detect_reference(img: RgbImage, spec: ReferenceSpec) -> ReferenceMeasurement:
    """Locate the reference coin and derive per-axis mm-per-pixel ratios.

    A component passes when its area lies within the spec's gates and it
    fills at least ``min_fill_ratio`` of its bounding box. The largest
    passer wins; raises :class:`NoReferenceFound` when nothing passes and
    :class:`AmbiguousReference` when the two largest passers' areas
    differ by less than 10 percent (the user should re-shoot rather than
    let a coin-sized glare blob calibrate the plate).
    """
    mask = mask_by_color(img, spec.color)
    passers = [
        c
        for c in find_components(mask)
        if spec.min_area_px <= c.area <= spec.max_area_px
        and c.area >= spec.min_fill_ratio * c.bbox_w * c.bbox_h
    ]
    if not passers:
        raise NoReferenceFound("no component passed the reference-coin screens")
    if len(passers) >= 2:
        largest, runner_up = passers[0].area, passers[1].area
        if (largest - runner_up) / largest < _AMBIGUITY_REL_AREA:
            raise AmbiguousReference(
                f"two candidates with similar areas ({largest} px^2 vs "
                f"{runner_up} px^2); re-shoot with a single coin in frame"
            )
    best = passers[0]
    return ReferenceMeasurement(
        bbox_x=best.bbox_x,
        bbox_y=best.bbox_y,
        bbox_w=float(best.bbox_w),
        bbox_h=float(best.bbox_h),
        area_px=float(best.area),
        ratio_x_mm_per_px=spec.real_diameter_mm / best.bbox_w,
        ratio_y_mm_per_px=spec.real_diameter_mm / best.bbox_h,
    )

"""Core image and label types plus the raster operations built on them.

Conventions fixed here and relied on everywhere else:

* The single internal raster format is 8-bit RGB, row-major, shape
  ``(height, width, 3)``. Decoders normalize into it at the boundary.
* All types are immutable after construction (arrays are made
  read-only), so every operation in this module is a pure function and
  safe to call from concurrent workers.
* The colormap is a fixed 256-entry RGB lookup table shipped with the
  package (``data/colormap.csv``, matplotlib's "magma" frozen at 256
  samples: dark-to-bright with monotone CIE lightness). Depth values
  are min-max normalized to an index in 0..255; a constant input maps
  everything to index 0.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import kernels


class SkillLabel(enum.Enum):
    """The ten pose classes; NONE is the designated background class."""

    BL = "BL"
    FL = "FL"
    FLAG = "FLAG"
    IC = "IC"
    MAL = "MAL"
    OAFL = "OAFL"
    OAHS = "OAHS"
    PL = "PL"
    VSIT = "VSIT"
    NONE = "NONE"

    @classmethod
    def from_token(cls, token: str) -> "SkillLabel":
        try:
            return cls[token]
        except KeyError:
            raise ValueError(f"unknown skill label {token!r}") from None


LABEL_ORDER: tuple[SkillLabel, ...] = tuple(SkillLabel)
LABEL_INDEX: dict[SkillLabel, int] = {lab: i for i, lab in enumerate(LABEL_ORDER)}
NUM_CLASSES = len(LABEL_ORDER)


class Frame:
    """An immutable 8-bit RGB raster."""

    __slots__ = ("pixels",)

    def __init__(self, pixels: np.ndarray):
        arr = np.asarray(pixels)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"frame pixels must have shape (h, w, 3), got {arr.shape}")
        if arr.dtype != np.uint8:
            raise ValueError(f"frame pixels must be uint8, got {arr.dtype}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"frame dimensions must be >= 1, got {arr.shape[1]}x{arr.shape[0]}")
        arr = np.ascontiguousarray(arr).copy()
        arr.flags.writeable = False
        self.pixels = arr

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @classmethod
    def constant(cls, width: int, height: int, rgb: tuple[int, int, int]) -> "Frame":
        """A solid-color frame, mainly useful with mock backends."""
        arr = np.empty((height, width, 3), dtype=np.uint8)
        arr[:, :] = rgb
        return cls(arr)

    def __repr__(self) -> str:
        return f"Frame({self.width}x{self.height})"


@dataclass(frozen=True)
class PatchRegion:
    """Axis-aligned pixel rectangle: top-left inclusive, bottom-right exclusive."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if self.x1 <= self.x0 or self.y1 <= self.y0:
            raise ValueError(
                f"empty region: ({self.x0},{self.y0},{self.x1},{self.y1}) has no area"
            )

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    @property
    def area(self) -> int:
        return self.width * self.height

    def check_bounds(self, frame_w: int, frame_h: int) -> None:
        """Raise if the region does not lie fully inside a frame_w x frame_h frame."""
        if self.x0 < 0 or self.y0 < 0:
            raise ValueError(f"region origin ({self.x0},{self.y0}) outside frame")
        if self.x1 > frame_w:
            raise ValueError(f"region x1={self.x1} exceeds frame width {frame_w}")
        if self.y1 > frame_h:
            raise ValueError(f"region y1={self.y1} exceeds frame height {frame_h}")


class ClassScores:
    """Per-class probabilities over the ten labels; sums to 1 within 1e-5."""

    __slots__ = ("values",)

    def __init__(self, values: np.ndarray):
        arr = np.ascontiguousarray(values, dtype=np.float64).copy()
        if arr.shape != (NUM_CLASSES,):
            raise ValueError(f"expected {NUM_CLASSES} class scores, got shape {arr.shape}")
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise ValueError("class scores must lie in [0, 1]")
        total = float(arr.sum())
        if abs(total - 1.0) > 1e-5:
            raise ValueError(f"class scores must sum to 1 (got {total:.8f})")
        arr.flags.writeable = False
        self.values = arr

    @property
    def argmax_label(self) -> SkillLabel:
        # np.argmax returns the first maximum: ties resolve to the
        # earliest label in SkillLabel order.
        return LABEL_ORDER[int(np.argmax(self.values))]

    @property
    def max_score(self) -> float:
        return float(self.values.max())

    def __getitem__(self, label: SkillLabel) -> float:
        return float(self.values[LABEL_INDEX[label]])

    def __repr__(self) -> str:
        top = self.argmax_label
        return f"ClassScores(top={top.value}:{self[top]:.3f})"


_LUT: np.ndarray | None = None


def colormap_lut() -> np.ndarray:
    """The packaged 256x3 uint8 lookup table, loaded once per process."""
    global _LUT
    if _LUT is None:
        text = resources.files("skillpipe").joinpath("data/colormap.csv").read_text()
        rows = [line.split(",") for line in text.strip().splitlines()]
        lut = np.array(rows, dtype=np.uint8)
        if lut.shape != (256, 3):
            raise ValueError(f"colormap asset must be 256x3, got {lut.shape}")
        lut.flags.writeable = False
        _LUT = lut
    return _LUT


def crop(frame: Frame, region: PatchRegion) -> Frame:
    """Extract the region as a new frame; pixel (i, j) = source (x0+i, y0+j)."""
    region.check_bounds(frame.width, frame.height)
    return Frame(frame.pixels[region.y0 : region.y1, region.x0 : region.x1])


def resize_bilinear(frame: Frame, target_w: int, target_h: int) -> Frame:
    """Bilinear resample to target_w x target_h (half-pixel centers, half-up rounding)."""
    if target_w < 1 or target_h < 1:
        raise ValueError(f"target dimensions must be >= 1, got {target_w}x{target_h}")
    if target_w == frame.width and target_h == frame.height:
        return frame
    return Frame(kernels.resize_bilinear_u8(frame.pixels, target_h, target_w))


def apply_colormap(values: np.ndarray) -> Frame:
    """Map a 2-D array of relative depth values through the packaged LUT.

    Values are min-max normalized to 0..255 (half-up rounding); a
    constant input normalizes to index 0. Output orientation follows the
    LUT: larger input values map to higher (brighter) entries.
    """
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"depth values must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"depth dimensions must be >= 1x1, got {arr.shape}")
    return Frame(kernels.colormap_rgb(arr, colormap_lut()))

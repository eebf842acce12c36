"""Pick the most prominent person detection and turn it into a crop region.

Rules, in order:

1. Detections below the confidence threshold (or with no overlap with
   the frame) are dropped. Box areas are always measured after
   intersecting the box with the frame.
2. Each survivor is scored by a weighted average of its confidence
   (weight 0.6) and its frame-normalized area (weight 0.4); the highest
   score wins. Ties break by higher confidence, then larger area, then
   lowest list index, so runs are reproducible.
3. If nothing survives, or the winner's raw area covers less than 1% of
   the frame, a centered crop 20% smaller per side than the frame is
   used instead; this avoids locking onto bystanders in the background.
4. A winning box is enlarged about its center before cropping: small
   boxes grow by up to 15%, large ones by at least 5%, linearly in the
   box/frame area ratio. Coordinates are then clipped to the frame.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .vision_core import PatchRegion

Box = tuple[float, float, float, float]


@dataclass(frozen=True)
class Detection:
    """One detector output: pixel-coordinate box plus confidence."""

    box: Box
    confidence: float

    def __post_init__(self):
        x0, y0, x1, y1 = self.box
        if x1 < x0 or y1 < y0:
            raise ValueError(f"inverted detection box {self.box}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")


@dataclass(frozen=True)
class SelectionConfig:
    """Constants of the selection rules; defaults match the published setup."""

    conf_weight: float = 0.6
    area_weight: float = 0.4
    min_area_fraction: float = 0.01
    fallback_scale: float = 0.8
    enlarge_max: float = 0.15
    enlarge_min: float = 0.05
    detector_conf_threshold: float = 0.2

    def __post_init__(self):
        if abs(self.conf_weight + self.area_weight - 1.0) > 1e-9:
            raise ValueError("conf_weight and area_weight must sum to 1")
        if not 0.0 < self.enlarge_min <= self.enlarge_max < 1.0:
            raise ValueError("need 0 < enlarge_min <= enlarge_max < 1")
        if not 0.0 < self.fallback_scale < 1.0:
            raise ValueError("fallback_scale must lie in (0, 1)")
        if not 0.0 < self.min_area_fraction < 1.0:
            raise ValueError("min_area_fraction must lie in (0, 1)")
        if not 0.0 <= self.detector_conf_threshold <= 1.0:
            raise ValueError("detector_conf_threshold must lie in [0, 1]")


class SelectionSource(enum.Enum):
    DETECTED = "detected"
    FALLBACK_CENTER_CROP = "fallback_center_crop"


@dataclass(frozen=True)
class SelectionOutcome:
    """The chosen crop region and which rule produced it."""

    region: PatchRegion
    source: SelectionSource
    score: float | None = None


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _snap(v: float, eps: float = 1e-9) -> float:
    """Snap to the nearest integer when within eps, so that outward
    floor/ceil rounding does not flip direction on 1-ulp float noise."""
    nearest = round(v)
    return float(nearest) if abs(v - nearest) <= eps else v


def _clipped_area(box: Box, frame_w: int, frame_h: int) -> float:
    """Area of box ∩ frame; 0 when they do not overlap."""
    x0, y0, x1, y1 = box
    w = min(x1, float(frame_w)) - max(x0, 0.0)
    h = min(y1, float(frame_h)) - max(y0, 0.0)
    if w <= 0.0 or h <= 0.0:
        return 0.0
    return w * h


def score_detection(d: Detection, frame_w: int, frame_h: int, cfg: SelectionConfig) -> float:
    """Weighted average of confidence and frame-normalized (clipped) box area."""
    frac = _clipped_area(d.box, frame_w, frame_h) / (frame_w * frame_h)
    return cfg.conf_weight * d.confidence + cfg.area_weight * frac


def select_index(
    detections: list[Detection], frame_w: int, frame_h: int, cfg: SelectionConfig
) -> int | None:
    """Index of the winning detection, or None if no candidate survives."""
    best: tuple[float, float, float, float] | None = None
    best_i = None
    for i, d in enumerate(detections):
        if d.confidence < cfg.detector_conf_threshold:
            continue
        area = _clipped_area(d.box, frame_w, frame_h)
        if area <= 0.0:
            continue
        s = cfg.conf_weight * d.confidence + cfg.area_weight * (area / (frame_w * frame_h))
        key = (s, d.confidence, area, float(-i))
        if best is None or key > best:
            best = key
            best_i = i
    return best_i


def fallback_center_crop(frame_w: int, frame_h: int, cfg: SelectionConfig) -> PatchRegion:
    """Centered region scaled by fallback_scale per side (aspect preserved)."""
    if frame_w < 1 or frame_h < 1:
        raise ValueError(f"frame dimensions must be positive, got {frame_w}x{frame_h}")
    w = max(1, _round_half_up(cfg.fallback_scale * frame_w))
    h = max(1, _round_half_up(cfg.fallback_scale * frame_h))
    x0 = (frame_w - w) // 2
    y0 = (frame_h - h) // 2
    return PatchRegion(x0, y0, x0 + w, y0 + h)


def enlargement_fraction(area_ratio: float, cfg: SelectionConfig) -> float:
    """Linear ramp from enlarge_max at ratio 0 down to enlarge_min at ratio 1."""
    return float(np.interp(area_ratio, (0.0, 1.0), (cfg.enlarge_max, cfg.enlarge_min)))


def enlarge_box(box: PatchRegion, frame_w: int, frame_h: int, cfg: SelectionConfig) -> PatchRegion:
    """Grow the box about its center by the ratio-dependent fraction, then clip.

    Edges round outward (floor/ceil), so the result always contains the
    input box's intersection with the frame.
    """
    inter_w = max(0, min(box.x1, frame_w) - max(box.x0, 0))
    inter_h = max(0, min(box.y1, frame_h) - max(box.y0, 0))
    r = (inter_w * inter_h) / (frame_w * frame_h)
    e = enlargement_fraction(r, cfg)
    cx = (box.x0 + box.x1) / 2.0
    cy = (box.y0 + box.y1) / 2.0
    half_w = box.width * (1.0 + e) / 2.0
    half_h = box.height * (1.0 + e) / 2.0
    x0 = max(0, int(math.floor(_snap(cx - half_w))))
    y0 = max(0, int(math.floor(_snap(cy - half_h))))
    x1 = min(frame_w, int(math.ceil(_snap(cx + half_w))))
    y1 = min(frame_h, int(math.ceil(_snap(cy + half_h))))
    if x1 <= x0:  # box entirely outside the frame; keep a 1px sliver in bounds
        x0 = min(max(x0, 0), frame_w - 1)
        x1 = x0 + 1
    if y1 <= y0:
        y0 = min(max(y0, 0), frame_h - 1)
        y1 = y0 + 1
    return PatchRegion(x0, y0, x1, y1)


def _box_to_region(box: Box, frame_w: int, frame_h: int) -> PatchRegion:
    """Intersect a float box with the frame and round outward to pixels."""
    x0 = int(math.floor(_snap(max(box[0], 0.0))))
    y0 = int(math.floor(_snap(max(box[1], 0.0))))
    x1 = int(math.ceil(_snap(min(box[2], float(frame_w)))))
    y1 = int(math.ceil(_snap(min(box[3], float(frame_h)))))
    x0 = min(x0, frame_w - 1)
    y0 = min(y0, frame_h - 1)
    x1 = max(x1, x0 + 1)
    y1 = max(y1, y0 + 1)
    return PatchRegion(x0, y0, x1, y1)


def select_primary(
    detections: list[Detection], frame_w: int, frame_h: int, cfg: SelectionConfig
) -> SelectionOutcome:
    """Total selection: winning enlarged box, or the center-crop fallback."""
    if frame_w < 1 or frame_h < 1:
        raise ValueError(f"frame dimensions must be positive, got {frame_w}x{frame_h}")
    idx = select_index(detections, frame_w, frame_h, cfg)
    if idx is None:
        return SelectionOutcome(
            region=fallback_center_crop(frame_w, frame_h, cfg),
            source=SelectionSource.FALLBACK_CENTER_CROP,
        )
    winner = detections[idx]
    # The 1% prominence test uses the raw (un-enlarged) detection area.
    raw_fraction = _clipped_area(winner.box, frame_w, frame_h) / (frame_w * frame_h)
    if raw_fraction < cfg.min_area_fraction:
        return SelectionOutcome(
            region=fallback_center_crop(frame_w, frame_h, cfg),
            source=SelectionSource.FALLBACK_CENTER_CROP,
        )
    region = _box_to_region(winner.box, frame_w, frame_h)
    enlarged = enlarge_box(region, frame_w, frame_h, cfg)
    return SelectionOutcome(
        region=enlarged,
        source=SelectionSource.DETECTED,
        score=score_detection(winner, frame_w, frame_h, cfg),
    )

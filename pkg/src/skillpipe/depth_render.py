"""Turn a model-produced relative depth map into a colormapped frame."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .vision_core import Frame, apply_colormap


@dataclass(frozen=True)
class DepthMap:
    """Row-major relative depth values; larger means closer to the camera."""

    values: np.ndarray  # 2-D float array, shape (height, width)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


def render_depth(depth: DepthMap) -> Frame:
    """Colormap the depth map; output frame has the map's dimensions.

    Rendering is invariant under positive affine transforms of the
    values (min-max normalization), and closer pixels get brighter LUT
    entries. Non-finite values are rejected with the offending pixel
    named.
    """
    values = np.asarray(depth.values, dtype=np.float64)
    if values.ndim != 2:
        raise ValueError(f"depth values must be 2-D, got shape {values.shape}")
    finite = np.isfinite(values)
    if not finite.all():
        i, j = np.argwhere(~finite)[0]
        raise ValueError(
            f"non-finite depth value {values[i, j]!r} at pixel (row={i}, col={j})"
        )
    return apply_colormap(values)

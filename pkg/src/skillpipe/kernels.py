"""Hot raster kernels: bilinear resize and colormap application.

Two interchangeable implementations exist for each kernel: a numba
``@njit`` loop and a vectorized pure-numpy fallback. Both evaluate the
same arithmetic expression per element in float64, so their outputs are
bit-identical; tests assert this. Selection happens once at import:

* ``SKILLPIPE_NO_NUMBA=1`` in the environment forces the numpy path.
* Otherwise numba is used when importable, numpy if not.

Sampling convention for the resize: pixel centers at ``(i + 0.5) / n``
(corner-aligned off), clamp-to-edge at borders, channels independent,
result rounded half-up to 8 bits.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = "SKILLPIPE_NO_NUMBA"


def _resize_bilinear_numpy(src: np.ndarray, dst_h: int, dst_w: int) -> np.ndarray:
    src_h, src_w = src.shape[0], src.shape[1]
    y_scale = src_h / dst_h
    x_scale = src_w / dst_w
    sx = (np.arange(dst_w, dtype=np.float64) + 0.5) * x_scale - 0.5
    sy = (np.arange(dst_h, dtype=np.float64) + 0.5) * y_scale - 0.5
    x0f = np.floor(sx)
    y0f = np.floor(sy)
    fx = (sx - x0f)[None, :, None]
    fy = (sy - y0f)[:, None, None]
    x0 = np.clip(x0f.astype(np.int64), 0, src_w - 1)
    x1 = np.clip(x0f.astype(np.int64) + 1, 0, src_w - 1)
    y0 = np.clip(y0f.astype(np.int64), 0, src_h - 1)
    y1 = np.clip(y0f.astype(np.int64) + 1, 0, src_h - 1)
    a = src[y0[:, None], x0[None, :], :].astype(np.float64)
    b = src[y0[:, None], x1[None, :], :].astype(np.float64)
    c = src[y1[:, None], x0[None, :], :].astype(np.float64)
    d = src[y1[:, None], x1[None, :], :].astype(np.float64)
    top = a * (1.0 - fx) + b * fx
    bot = c * (1.0 - fx) + d * fx
    val = top * (1.0 - fy) + bot * fy
    return np.floor(val + 0.5).astype(np.uint8)


def _resize_bilinear_loop(src: np.ndarray, dst_h: int, dst_w: int) -> np.ndarray:
    # Same arithmetic as the numpy path, one pixel at a time (njit target).
    src_h, src_w = src.shape[0], src.shape[1]
    y_scale = src_h / dst_h
    x_scale = src_w / dst_w
    out = np.empty((dst_h, dst_w, 3), dtype=np.uint8)
    for oy in range(dst_h):
        sy = (oy + 0.5) * y_scale - 0.5
        y0f = np.floor(sy)
        fy = sy - y0f
        y0 = min(max(int(y0f), 0), src_h - 1)
        y1 = min(max(int(y0f) + 1, 0), src_h - 1)
        for ox in range(dst_w):
            sx = (ox + 0.5) * x_scale - 0.5
            x0f = np.floor(sx)
            fx = sx - x0f
            x0 = min(max(int(x0f), 0), src_w - 1)
            x1 = min(max(int(x0f) + 1, 0), src_w - 1)
            for ch in range(3):
                a = np.float64(src[y0, x0, ch])
                b = np.float64(src[y0, x1, ch])
                c = np.float64(src[y1, x0, ch])
                d = np.float64(src[y1, x1, ch])
                top = a * (1.0 - fx) + b * fx
                bot = c * (1.0 - fx) + d * fx
                val = top * (1.0 - fy) + bot * fy
                out[oy, ox, ch] = np.uint8(np.floor(val + 0.5))
    return out


def _colormap_rgb_numpy(values: np.ndarray, lut: np.ndarray) -> np.ndarray:
    vmin = values.min()
    vmax = values.max()
    if vmax == vmin:
        idx = np.zeros(values.shape, dtype=np.int64)
    else:
        t = (values - vmin) / (vmax - vmin)
        idx = np.floor(t * 255.0 + 0.5).astype(np.int64)
    return lut[idx]


def _colormap_rgb_loop(values: np.ndarray, lut: np.ndarray) -> np.ndarray:
    h, w = values.shape
    out = np.empty((h, w, 3), dtype=np.uint8)
    vmin = values[0, 0]
    vmax = values[0, 0]
    for i in range(h):
        for j in range(w):
            v = values[i, j]
            if v < vmin:
                vmin = v
            if v > vmax:
                vmax = v
    rng = vmax - vmin
    for i in range(h):
        for j in range(w):
            if rng == 0.0:
                idx = 0
            else:
                t = (values[i, j] - vmin) / rng
                idx = int(np.floor(t * 255.0 + 0.5))
            out[i, j, 0] = lut[idx, 0]
            out[i, j, 1] = lut[idx, 1]
            out[i, j, 2] = lut[idx, 2]
    return out


def _numba_disabled() -> bool:
    flag = os.environ.get(_ENV_FLAG, "").strip()
    return flag not in ("", "0")


_resize_numba = None
_colormap_numba = None

if not _numba_disabled():
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        pass
    else:
        _resize_numba = njit(cache=True)(_resize_bilinear_loop)
        _colormap_numba = njit(cache=True)(_colormap_rgb_loop)

if _resize_numba is not None:
    KERNEL_BACKEND = "numba"
    resize_bilinear_u8 = _resize_numba
    colormap_rgb = _colormap_numba
else:
    KERNEL_BACKEND = "numpy"
    resize_bilinear_u8 = _resize_bilinear_numpy
    colormap_rgb = _colormap_rgb_numpy


def available_backends() -> dict:
    """Map backend name to its (resize, colormap) implementation pair."""
    impls = {"numpy": (_resize_bilinear_numpy, _colormap_rgb_numpy)}
    if _resize_numba is not None:
        impls["numba"] = (_resize_numba, _colormap_numba)
    return impls

import os
import subprocess
import sys

import numpy as np
import pytest

from skillpipe import kernels


requires_numba = pytest.mark.skipif(
    "numba" not in kernels.available_backends(), reason="numba backend disabled"
)


@requires_numba
@pytest.mark.parametrize(
    "src_w,src_h,dst_w,dst_h",
    [
        (96, 54, 224, 224),
        (224, 224, 17, 31),
        (1, 1, 7, 5),
        (13, 1, 1, 13),
        (5, 5, 5, 5),
    ],
)
def test_resize_backends_bit_identical(src_w, src_h, dst_w, dst_h):
    rng = np.random.default_rng(src_w * 1000 + dst_w)
    src = rng.integers(0, 256, size=(src_h, src_w, 3), dtype=np.uint8)
    impls = kernels.available_backends()
    out_numpy = impls["numpy"][0](src, dst_h, dst_w)
    out_numba = impls["numba"][0](src, dst_h, dst_w)
    assert np.array_equal(out_numpy, out_numba)


@requires_numba
@pytest.mark.parametrize("shape", [(1, 1), (3, 4), (54, 96), (1, 17)])
def test_colormap_backends_bit_identical(shape):
    rng = np.random.default_rng(shape[0] * 31 + shape[1])
    values = rng.normal(size=shape)
    lut = rng.integers(0, 256, size=(256, 3), dtype=np.uint8)
    impls = kernels.available_backends()
    assert np.array_equal(impls["numpy"][1](values, lut), impls["numba"][1](values, lut))


@requires_numba
def test_constant_colormap_backends_agree():
    values = np.full((6, 6), 3.25)
    lut = np.arange(256 * 3, dtype=np.uint8).reshape(256, 3)
    impls = kernels.available_backends()
    assert np.array_equal(impls["numpy"][1](values, lut), impls["numba"][1](values, lut))


def test_rounding_is_half_up_not_banker():
    # midpoint between 0 and 253 is 126.5: half-up gives 127, half-even 126
    src = np.zeros((1, 2, 3), np.uint8)
    src[0, 1] = 253
    out = kernels.resize_bilinear_u8(src, 1, 3)
    assert out[0, 1, 0] == 127  # center sample lands at fx = 0.5 -> 126.5


def test_env_flag_forces_numpy_backend():
    env = dict(os.environ, SKILLPIPE_NO_NUMBA="1")
    code = "from skillpipe import kernels; print(kernels.KERNEL_BACKEND)"
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "numpy"


def test_default_backend_is_numba_when_available():
    assert kernels.KERNEL_BACKEND in ("numba", "numpy")
    if "numba" in kernels.available_backends():
        assert kernels.KERNEL_BACKEND == "numba"

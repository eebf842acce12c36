import numpy as np
import pytest

from skillpipe.vision_core import LABEL_ORDER, Frame, apply_colormap, resize_bilinear


def random_frame(rng: np.random.Generator, width: int, height: int) -> Frame:
    return Frame(rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8))


def label_frame(label_index: int, width: int = 64, height: int = 48) -> Frame:
    """Solid-color frame whose mean red channel encodes its class index."""
    return Frame.constant(width, height, (25 * label_index, 80, 160))


def label_for_index(i: int):
    return LABEL_ORDER[i]


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # Trigger numba JIT compilation up front so timing-sensitive tests
    # measure sleeps, not compilation.
    frame = Frame.constant(8, 8, (1, 2, 3))
    resize_bilinear(frame, 4, 4)
    apply_colormap(np.arange(12, dtype=np.float64).reshape(3, 4))

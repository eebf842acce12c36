import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skillpipe.vision_core import (
    LABEL_ORDER,
    ClassScores,
    Frame,
    PatchRegion,
    SkillLabel,
    apply_colormap,
    colormap_lut,
    crop,
    resize_bilinear,
)

from conftest import random_frame


def bilinear_oracle(src: np.ndarray, th: int, tw: int) -> np.ndarray:
    """Brute-force per-pixel reference: half-pixel centers, clamp edges, round half-up."""
    sh, sw = src.shape[:2]
    y_scale = sh / th
    x_scale = sw / tw
    out = np.empty((th, tw, 3), np.uint8)
    for oy in range(th):
        for ox in range(tw):
            sy = (oy + 0.5) * y_scale - 0.5
            sx = (ox + 0.5) * x_scale - 0.5
            y0, x0 = math.floor(sy), math.floor(sx)
            fy, fx = sy - y0, sx - x0
            for c in range(3):
                def px(yy, xx):
                    return float(src[min(max(yy, 0), sh - 1), min(max(xx, 0), sw - 1), c])
                v = ((px(y0, x0) * (1 - fx) + px(y0, x0 + 1) * fx) * (1 - fy)
                     + (px(y0 + 1, x0) * (1 - fx) + px(y0 + 1, x0 + 1) * fx) * fy)
                out[oy, ox, c] = int(math.floor(v + 0.5))
    return out


class TestFrame:
    def test_valid_construction(self):
        f = Frame(np.zeros((4, 6, 3), np.uint8))
        assert (f.width, f.height) == (6, 4)

    def test_pixels_read_only(self):
        f = Frame.constant(2, 2, (1, 2, 3))
        with pytest.raises(ValueError):
            f.pixels[0, 0, 0] = 9

    @pytest.mark.parametrize(
        "arr",
        [
            np.zeros((4, 6), np.uint8),
            np.zeros((4, 6, 4), np.uint8),
            np.zeros((4, 6, 3), np.float32),
            np.zeros((0, 6, 3), np.uint8),
        ],
    )
    def test_rejects_bad_buffers(self, arr):
        with pytest.raises(ValueError):
            Frame(arr)


class TestSkillLabel:
    def test_closed_set_with_none_last(self):
        assert len(LABEL_ORDER) == 10
        assert LABEL_ORDER[-1] is SkillLabel.NONE
        assert [l.value for l in LABEL_ORDER[:3]] == ["BL", "FL", "FLAG"]

    def test_from_token(self):
        assert SkillLabel.from_token("PL") is SkillLabel.PL
        with pytest.raises(ValueError, match="XYZ"):
            SkillLabel.from_token("XYZ")


class TestClassScores:
    def test_validates_sum(self):
        with pytest.raises(ValueError, match="sum to 1"):
            ClassScores(np.full(10, 0.2))

    def test_validates_range(self):
        values = np.zeros(10)
        values[0] = 1.5
        values[1] = -0.5
        with pytest.raises(ValueError):
            ClassScores(values)

    def test_argmax_tie_breaks_to_first_label(self):
        values = np.full(10, 0.1)
        assert ClassScores(values).argmax_label is SkillLabel.BL


class TestCrop:
    def test_identity(self):
        f = random_frame(np.random.default_rng(1), 4, 4)
        out = crop(f, PatchRegion(0, 0, 4, 4))
        assert np.array_equal(out.pixels, f.pixels)

    def test_center_crop_arithmetic_and_pixels(self):
        f = random_frame(np.random.default_rng(2), 960, 540)
        out = crop(f, PatchRegion(96, 54, 864, 486))
        assert (out.width, out.height) == (768, 432)
        assert np.array_equal(out.pixels, f.pixels[54:486, 96:864])

    def test_empty_region_rejected(self):
        with pytest.raises(ValueError, match="no area"):
            PatchRegion(1, 1, 1, 2)

    def test_out_of_bounds_names_coordinate(self):
        f = Frame.constant(4, 4, (0, 0, 0))
        with pytest.raises(ValueError, match="x1=5"):
            crop(f, PatchRegion(0, 0, 5, 4))
        with pytest.raises(ValueError, match=r"\(-1,0\)"):
            crop(f, PatchRegion(-1, 0, 2, 2))

    @given(st.data())
    @settings(max_examples=50, deadline=None)
    def test_crop_composes(self, data):
        rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
        f = random_frame(rng, 24, 18)
        ax0 = data.draw(st.integers(0, 20))
        ay0 = data.draw(st.integers(0, 14))
        ax1 = data.draw(st.integers(ax0 + 2, 24))
        ay1 = data.draw(st.integers(ay0 + 2, 18))
        a = PatchRegion(ax0, ay0, ax1, ay1)
        bw, bh = a.width, a.height
        bx0 = data.draw(st.integers(0, bw - 1))
        by0 = data.draw(st.integers(0, bh - 1))
        b = PatchRegion(bx0, by0, data.draw(st.integers(bx0 + 1, bw)), data.draw(st.integers(by0 + 1, bh)))
        via_two = crop(crop(f, a), b)
        direct = crop(f, PatchRegion(a.x0 + b.x0, a.y0 + b.y0, a.x0 + b.x1, a.y0 + b.y1))
        assert np.array_equal(via_two.pixels, direct.pixels)


class TestResizeBilinear:
    def test_constant_preserved(self):
        f = Frame.constant(10, 10, (13, 200, 77))
        out = resize_bilinear(f, 224, 224)
        assert (out.width, out.height) == (224, 224)
        assert np.all(out.pixels.reshape(-1, 3) == (13, 200, 77))

    def test_black_white_ramp_monotone(self):
        row = np.zeros((1, 2, 3), np.uint8)
        row[0, 1] = 255
        out = resize_bilinear(Frame(row), 4, 1)
        ramp = out.pixels[0, :, 0].astype(int)
        assert list(ramp) == [0, 64, 191, 255]
        assert np.all(np.diff(ramp) >= 0)

    def test_checkerboard_matches_frozen_oracle(self):
        cb = np.zeros((3, 3, 3), np.uint8)
        for i in range(3):
            for j in range(3):
                cb[i, j] = 255 * ((i + j) % 2)
        out = resize_bilinear(Frame(cb), 6, 6)
        # Frozen output of bilinear_oracle(cb, 6, 6); spec tolerance +-1.
        expected = np.array(
            [
                [0, 64, 191, 191, 64, 0],
                [64, 96, 159, 159, 96, 64],
                [191, 159, 96, 96, 159, 191],
                [191, 159, 96, 96, 159, 191],
                [64, 96, 159, 159, 96, 64],
                [0, 64, 191, 191, 64, 0],
            ],
            dtype=np.int64,
        )
        for c in range(3):
            assert np.max(np.abs(out.pixels[:, :, c].astype(np.int64) - expected)) <= 1
        assert np.array_equal(out.pixels, bilinear_oracle(cb, 6, 6))

    @given(st.integers(1, 12), st.integers(1, 12), st.integers(1, 15), st.integers(1, 15), st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_random_sizes_match_oracle(self, sw, sh, tw, th, seed):
        f = random_frame(np.random.default_rng(seed), sw, sh)
        out = resize_bilinear(f, tw, th)
        assert np.array_equal(out.pixels, bilinear_oracle(f.pixels, th, tw))

    def test_zero_target_rejected(self):
        f = Frame.constant(2, 2, (0, 0, 0))
        with pytest.raises(ValueError, match=">= 1"):
            resize_bilinear(f, 0, 4)


class TestApplyColormap:
    def test_constant_maps_to_lut0(self):
        out = apply_colormap(np.full((3, 5), 7.25))
        assert np.all(out.pixels.reshape(-1, 3) == colormap_lut()[0])

    def test_extremes_hit_lut_ends(self):
        out = apply_colormap(np.array([[0.0, 1.0]]))
        lut = colormap_lut()
        assert tuple(out.pixels[0, 0]) == tuple(lut[0])
        assert tuple(out.pixels[0, 1]) == tuple(lut[255])

    def test_midpoint_rounds_half_up(self):
        out = apply_colormap(np.array([[0.0, 0.5, 1.0]]))
        assert tuple(out.pixels[0, 1]) == tuple(colormap_lut()[128])

    def test_min_max_pixels_hit_lut_ends(self):
        rng = np.random.default_rng(3)
        values = rng.normal(size=(8, 9))
        out = apply_colormap(values)
        lut = colormap_lut()
        i, j = np.unravel_index(np.argmin(values), values.shape)
        assert tuple(out.pixels[i, j]) == tuple(lut[0])
        i, j = np.unravel_index(np.argmax(values), values.shape)
        assert tuple(out.pixels[i, j]) == tuple(lut[255])

    @given(
        st.integers(0, 2**32 - 1),
        st.floats(0.1, 50.0),
        st.floats(-100.0, 100.0),
    )
    @settings(max_examples=40, deadline=None)
    def test_increasing_affine_transform_is_invisible(self, seed, a, b):
        values = np.random.default_rng(seed).uniform(-5.0, 5.0, size=(6, 7))
        base = apply_colormap(values)
        transformed = apply_colormap(a * values + b)
        assert np.array_equal(base.pixels, transformed.pixels)

    def test_rejects_non_2d(self):
        with pytest.raises(ValueError, match="2-D"):
            apply_colormap(np.zeros(4))


def test_colormap_lut_shape_and_endpoints():
    lut = colormap_lut()
    assert lut.shape == (256, 3)
    assert lut.dtype == np.uint8
    # dark-to-bright: last entry strictly brighter than first
    assert lut[255].astype(int).sum() > lut[0].astype(int).sum()

import numpy as np
import pytest

from skillpipe.errors import StageFailure
from skillpipe.foreground_selection import SelectionConfig, SelectionSource
from skillpipe.model_runtime import (
    Backends,
    MockClassifier,
    MockDepth,
    MockDetector,
)
from skillpipe.pipeline import (
    ApproachId,
    FrameError,
    FrameResult,
    run_batch,
    run_frame,
)
from skillpipe.vision_core import Frame, SkillLabel, crop

from conftest import random_frame

CFG = SelectionConfig()


def mock_backends(boxes=None, classifier_mode="red_channel"):
    return Backends(
        detector=MockDetector(boxes=boxes if boxes is not None else [[0.2, 0.1, 0.8, 0.9, 0.9]], relative=True),
        depth=MockDepth(mode="luminance"),
        classifier=MockClassifier(mode=classifier_mode),
    )


class TestRunFrame:
    def test_full_rgb_constant_mock(self):
        backends = Backends(classifier=MockClassifier(mode="constant", label="NONE"))
        for frame in (Frame.constant(96, 54, (250, 0, 0)), random_frame(np.random.default_rng(0), 64, 64)):
            result = run_frame(frame, ApproachId.FULL_RGB, backends, CFG)
            assert result.predicted is SkillLabel.NONE
            assert result.selection is None

    def test_missing_backend_rejected(self):
        with pytest.raises(ValueError, match="requires a 'depth' backend"):
            run_frame(
                Frame.constant(8, 8, (0, 0, 0)),
                ApproachId.FULL_DEPTH,
                Backends(classifier=MockClassifier()),
                CFG,
            )

    def test_rgb_patch_without_detections_still_classifies(self):
        backends = mock_backends(boxes=[])
        result = run_frame(random_frame(np.random.default_rng(1), 960, 540), ApproachId.RGB_PATCH, backends, CFG)
        assert result.selection.source is SelectionSource.FALLBACK_CENTER_CROP
        assert result.predicted in SkillLabel

    def test_selection_present_only_for_patch_approaches(self):
        frame = random_frame(np.random.default_rng(2), 120, 90)
        backends = mock_backends()
        for approach in ApproachId:
            result = run_frame(frame, approach, backends, CFG)
            assert (result.selection is not None) == (
                approach in (ApproachId.RGB_PATCH, ApproachId.DEPTH_PATCH)
            )

    def test_stage_timings_follow_approach(self):
        frame = random_frame(np.random.default_rng(3), 64, 48)
        backends = mock_backends()
        expected = {
            ApproachId.FULL_RGB: ["resize", "classify"],
            ApproachId.FULL_DEPTH: ["depth", "render", "resize", "classify"],
            ApproachId.RGB_PATCH: ["detect", "select", "crop", "resize", "classify"],
            ApproachId.DEPTH_PATCH: ["detect", "select", "crop", "depth", "render", "resize", "classify"],
        }
        for approach, stages in expected.items():
            result = run_frame(frame, approach, backends, CFG)
            assert list(result.stage_timings) == stages
            assert all(t >= 0 for t in result.stage_timings.values())

    def test_predicted_is_argmax_of_scores(self):
        frame = random_frame(np.random.default_rng(4), 100, 80)
        result = run_frame(frame, ApproachId.FULL_RGB, mock_backends(), CFG)
        assert result.predicted is result.scores.argmax_label

    def test_depth_patch_equals_manual_composition(self):
        backends = mock_backends()
        rng = np.random.default_rng(5)
        for _ in range(20):
            frame = random_frame(rng, 160, 120)
            direct = run_frame(frame, ApproachId.DEPTH_PATCH, backends, CFG)
            detections = backends.detector.detect(frame)
            from skillpipe.foreground_selection import select_primary

            selection = select_primary(detections, frame.width, frame.height, CFG)
            patch = crop(frame, selection.region)
            manual = run_frame(patch, ApproachId.FULL_DEPTH, backends, CFG)
            assert direct.predicted is manual.predicted
            assert np.array_equal(direct.scores.values, manual.scores.values)
            assert direct.selection == selection

    def test_backend_failure_carries_stage_name(self):
        class ExplodingDepth:
            def estimate_depth(self, frame):
                raise RuntimeError("boom")

        backends = Backends(depth=ExplodingDepth(), classifier=MockClassifier())
        with pytest.raises(StageFailure, match="stage 'depth'") as exc_info:
            run_frame(Frame.constant(16, 16, (0, 0, 0)), ApproachId.FULL_DEPTH, backends, CFG)
        assert exc_info.value.stage == "depth"


class TestRunBatch:
    def _items(self, rng, n, w=96, h=72):
        return [(f"f{i:03d}", random_frame(rng, w, h)) for i in range(n)]

    def test_empty_stream(self):
        assert run_batch([], ApproachId.FULL_RGB, mock_backends(), CFG) == []

    def test_order_preserved(self):
        items = self._items(np.random.default_rng(6), 5)
        results = run_batch(items, ApproachId.FULL_RGB, mock_backends(), CFG)
        assert [r.frame_id for r in results] == [fid for fid, _ in items]

    @pytest.mark.parametrize("workers", [1, 3])
    def test_worker_count_invariance(self, workers):
        items = self._items(np.random.default_rng(7), 9)
        base = run_batch(items, ApproachId.DEPTH_PATCH, mock_backends(), CFG)
        other = run_batch(
            items,
            ApproachId.DEPTH_PATCH,
            mock_backends(),
            CFG,
            workers=workers,
            backend_factory=mock_backends,
        )
        assert len(base) == len(other)
        for a, b in zip(base, other):
            assert a.frame_id == b.frame_id
            assert a.predicted is b.predicted
            assert np.array_equal(a.scores.values, b.scores.values)
            assert a.selection == b.selection

    def test_shared_backends_with_lock_also_deterministic(self):
        items = self._items(np.random.default_rng(8), 6)
        base = run_batch(items, ApproachId.RGB_PATCH, mock_backends(), CFG)
        shared = run_batch(items, ApproachId.RGB_PATCH, mock_backends(), CFG, workers=4)
        for a, b in zip(base, shared):
            assert np.array_equal(a.scores.values, b.scores.values)

    def test_failing_loader_recorded_not_fatal(self):
        rng = np.random.default_rng(9)
        items = [(f"f{i}", random_frame(rng, 32, 32)) for i in range(10)]

        def broken():
            raise OSError("decode failed")

        items[4] = ("f4", broken)
        results = run_batch(items, ApproachId.FULL_RGB, mock_backends(), CFG)
        errors = [r for r in results if isinstance(r, FrameError)]
        assert len(errors) == 1
        assert errors[0].frame_id == "f4"
        assert errors[0].stage == "load"
        assert sum(isinstance(r, FrameResult) for r in results) == 9

    def test_fail_fast_raises(self):
        items = [("f0", lambda: (_ for _ in ()).throw(OSError("nope")))]
        with pytest.raises(StageFailure, match="load"):
            run_batch(items, ApproachId.FULL_RGB, mock_backends(), CFG, fail_fast=True)

    def test_bad_worker_count(self):
        with pytest.raises(ValueError, match="workers"):
            run_batch([], ApproachId.FULL_RGB, mock_backends(), CFG, workers=0)

"""Compose backends into the four classification approaches.

Stage order per approach:

* full_rgb:    resize -> classify
* full_depth:  depth -> render -> resize -> classify
* rgb_patch:   detect -> select -> crop -> resize -> classify
* depth_patch: detect -> select -> crop -> depth -> render -> resize -> classify

Depth for the patch approach is estimated on the cropped patch, not the
full frame, so depth_patch(frame) is exactly full_depth applied to the
selected crop. Every classifier input is resized to 224x224. Wall-clock
time of each stage is recorded on the result for latency attribution.

Frames are independent: batches parallelize across worker threads, each
worker using its own backend handles, and results keep input order.
"""

from __future__ import annotations

import enum
import threading
import time
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .depth_render import render_depth
from .errors import StageFailure
from .foreground_selection import SelectionConfig, SelectionOutcome, select_primary
from .model_runtime import CLASSIFIER_INPUT_SIZE, Backends
from .vision_core import ClassScores, Frame, SkillLabel, crop, resize_bilinear


class ApproachId(enum.Enum):
    FULL_RGB = "full_rgb"
    FULL_DEPTH = "full_depth"
    RGB_PATCH = "rgb_patch"
    DEPTH_PATCH = "depth_patch"

    @classmethod
    def from_token(cls, token: str) -> "ApproachId":
        try:
            return cls(token.strip().lower().replace("-", "_"))
        except ValueError:
            raise ValueError(f"unknown approach {token!r}") from None


REQUIRED_BACKENDS: dict[ApproachId, tuple[str, ...]] = {
    ApproachId.FULL_RGB: ("classifier",),
    ApproachId.FULL_DEPTH: ("depth", "classifier"),
    ApproachId.RGB_PATCH: ("detector", "classifier"),
    ApproachId.DEPTH_PATCH: ("detector", "depth", "classifier"),
}

PATCH_APPROACHES = (ApproachId.RGB_PATCH, ApproachId.DEPTH_PATCH)

# A frame, or a callable producing one (lets decode failures surface per frame).
FrameSource = Frame | Callable[[], Frame]


@dataclass(frozen=True)
class FrameResult:
    frame_id: str
    approach: ApproachId
    predicted: SkillLabel
    scores: ClassScores
    selection: SelectionOutcome | None = None
    stage_timings: dict[str, float] = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class FrameError:
    frame_id: str
    stage: str
    message: str


class _StageClock:
    def __init__(self):
        self.timings: dict[str, float] = {}

    def run(self, stage: str, fn, *args):
        start = time.perf_counter()
        try:
            out = fn(*args)
        except StageFailure:
            raise
        except Exception as exc:
            raise StageFailure(stage, exc) from exc
        self.timings[stage] = time.perf_counter() - start
        return out


def run_frame(
    frame: Frame,
    approach: ApproachId,
    backends: Backends,
    cfg: SelectionConfig,
    frame_id: str = "",
) -> FrameResult:
    """Run one frame through the approach's stage sequence."""
    for role in REQUIRED_BACKENDS[approach]:
        if backends.get(role) is None:
            raise ValueError(f"approach {approach.value} requires a {role!r} backend")

    clock = _StageClock()
    selection: SelectionOutcome | None = None
    work = frame

    if approach in PATCH_APPROACHES:
        detections = clock.run("detect", backends.detector.detect, work)
        selection = clock.run("select", select_primary, detections, work.width, work.height, cfg)
        work = clock.run("crop", crop, work, selection.region)

    if approach in (ApproachId.FULL_DEPTH, ApproachId.DEPTH_PATCH):
        depth_map = clock.run("depth", backends.depth.estimate_depth, work)
        work = clock.run("render", render_depth, depth_map)

    work = clock.run("resize", resize_bilinear, work, CLASSIFIER_INPUT_SIZE, CLASSIFIER_INPUT_SIZE)
    scores = clock.run("classify", backends.classifier.classify, work)

    return FrameResult(
        frame_id=frame_id,
        approach=approach,
        predicted=scores.argmax_label,
        scores=scores,
        selection=selection,
        stage_timings=clock.timings,
    )


def run_batch(
    frames: Iterable[tuple[str, FrameSource]],
    approach: ApproachId,
    backends: Backends | None,
    cfg: SelectionConfig,
    workers: int = 1,
    fail_fast: bool = False,
    backend_factory: Callable[[], Backends] | None = None,
) -> list[FrameResult | FrameError]:
    """Run every frame; output order matches input order.

    Per-frame failures become FrameError records unless fail_fast is
    set. With workers > 1, pass backend_factory to give each worker its
    own handles; otherwise the shared handles are serialized behind a
    lock (decode still parallelizes).
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if backends is None and backend_factory is None:
        raise ValueError("need backends or backend_factory")

    items = list(frames)
    tls = threading.local()
    shared_lock = threading.Lock()

    def worker_backends() -> Backends:
        if backend_factory is None:
            return backends
        if not hasattr(tls, "backends"):
            tls.backends = backend_factory()
        return tls.backends

    def process(item: tuple[str, FrameSource]) -> FrameResult | FrameError:
        frame_id, source = item
        try:
            frame = source() if callable(source) else source
        except Exception as exc:
            if fail_fast:
                raise StageFailure("load", exc) from exc
            return FrameError(frame_id=frame_id, stage="load", message=str(exc))
        try:
            bset = worker_backends()
            if backend_factory is None and workers > 1:
                with shared_lock:
                    return run_frame(frame, approach, bset, cfg, frame_id=frame_id)
            return run_frame(frame, approach, bset, cfg, frame_id=frame_id)
        except StageFailure as exc:
            if fail_fast:
                raise
            return FrameError(frame_id=frame_id, stage=exc.stage, message=str(exc))

    if workers == 1:
        return [process(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(process, items))

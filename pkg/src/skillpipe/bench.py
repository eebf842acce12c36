"""Latency measurement: cold starts, steady-state averages, table rows.

Cold start deliberately includes backend loading, which dominates the
first inference. Warm timing loads once, discards one warm-up
inference, then averages individually-timed runs. Cold starts repeat
with full teardown and report the median (robust to OS noise); warm
reports the arithmetic mean. All measurement loops are single-threaded
and use a monotonic clock.
"""

from __future__ import annotations

import itertools
import statistics
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

from .metrics import BenchRecord, WaittParams
from .model_runtime import Backends, BackendSpec, load_backends
from .pipeline import REQUIRED_BACKENDS, ApproachId, run_frame
from .foreground_selection import SelectionConfig
from .vision_core import Frame, SkillLabel


@dataclass(frozen=True)
class TimingProtocol:
    warm_samples: int = 100
    repetitions: int = 3
    clock: Callable[[], float] = field(default=time.perf_counter, compare=False)

    def __post_init__(self):
        if self.warm_samples < 1:
            raise ValueError("warm_samples must be >= 1")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")


def measure_cold_start(
    approach: ApproachId,
    specs: dict[str, BackendSpec],
    cfg: SelectionConfig,
    protocol: TimingProtocol,
    n_images: int,
    frames: Sequence[Frame],
    *,
    detector_conf_threshold: float = 0.2,
) -> float:
    """Wall time from before backend loading through n_images inferences."""
    if n_images < 1:
        raise ValueError(f"n_images must be >= 1, got {n_images}")
    if not frames:
        raise ValueError("cold-start measurement needs at least one frame")
    times = []
    for _ in range(protocol.repetitions):
        start = protocol.clock()
        backends = load_backends(
            specs,
            REQUIRED_BACKENDS[approach],
            detector_conf_threshold=detector_conf_threshold,
        )
        for i in range(n_images):
            run_frame(frames[i % len(frames)], approach, backends, cfg)
        times.append(protocol.clock() - start)
        del backends  # full teardown between repetitions
    return statistics.median(times)


def measure_warm_avg(
    approach: ApproachId,
    backends: Backends,
    cfg: SelectionConfig,
    protocol: TimingProtocol,
    frames: Sequence[Frame],
) -> float:
    """Mean per-inference time after one discarded warm-up inference."""
    if len(frames) < 2:
        raise ValueError(f"warm measurement needs at least 2 frames, got {len(frames)}")
    cycle = itertools.cycle(frames)
    run_frame(next(cycle), approach, backends, cfg)  # warm-up, not timed
    samples = []
    for _ in range(protocol.warm_samples):
        frame = next(cycle)
        start = protocol.clock()
        run_frame(frame, approach, backends, cfg)
        samples.append(protocol.clock() - start)
    return statistics.fmean(samples)


def _measure_accuracy(
    approach: ApproachId,
    backends: Backends,
    cfg: SelectionConfig,
    frames: Sequence[Frame],
    labels: Sequence[SkillLabel],
) -> float:
    correct = 0
    for frame, truth in zip(frames, labels):
        result = run_frame(frame, approach, backends, cfg)
        correct += result.predicted is truth
    return correct / len(frames)


def run_benchmark(
    approaches: Sequence[ApproachId],
    specs: dict[str, BackendSpec],
    cfg: SelectionConfig,
    protocol: TimingProtocol,
    frames: Sequence[Frame],
    labels: Sequence[SkillLabel] | None = None,
    waitt_params: WaittParams = WaittParams(),
    supplied_accuracy: dict[ApproachId, float] | None = None,
    supplied_avg_iit_s: dict[ApproachId, float] | None = None,
    detector_conf_threshold: float = 0.2,
) -> list[BenchRecord]:
    """One record per approach: cold starts, warm average, accuracy, score.

    Accuracy comes from the labeled frames unless a supplied value
    overrides it (useful when no trained classifier is available); the
    record tracks which. A supplied average inference time likewise
    skips the warm measurement.
    """
    supplied_accuracy = supplied_accuracy or {}
    supplied_avg_iit_s = supplied_avg_iit_s or {}
    records = []
    for approach in approaches:
        cs1 = measure_cold_start(
            approach, specs, cfg, protocol, 1, frames,
            detector_conf_threshold=detector_conf_threshold,
        )
        cs10 = measure_cold_start(
            approach, specs, cfg, protocol, 10, frames,
            detector_conf_threshold=detector_conf_threshold,
        )
        backends = load_backends(
            specs,
            REQUIRED_BACKENDS[approach],
            detector_conf_threshold=detector_conf_threshold,
        )
        if approach in supplied_avg_iit_s:
            avg = supplied_avg_iit_s[approach]
            avg_source = "supplied"
        else:
            avg = measure_warm_avg(approach, backends, cfg, protocol, frames)
            avg_source = "measured"
        if approach in supplied_accuracy:
            accuracy = supplied_accuracy[approach]
            acc_source = "supplied"
        elif labels is not None:
            if len(labels) != len(frames):
                raise ValueError("labels must align one-to-one with frames")
            accuracy = _measure_accuracy(approach, backends, cfg, frames, labels)
            acc_source = "measured"
        else:
            raise ValueError(
                f"no accuracy available for {approach.value}: provide labels or a supplied value"
            )
        records.append(
            BenchRecord.build(
                approach=approach,
                accuracy=accuracy,
                cs1_s=cs1,
                cs10_s=cs10,
                avg_iit_s=avg,
                params=waitt_params,
                accuracy_source=acc_source,
                avg_iit_source=avg_source,
            )
        )
    return records

"""Static-pose skill classification pipelines and benchmark harness."""

from .bench import TimingProtocol, measure_cold_start, measure_warm_avg, run_benchmark
from .depth_render import DepthMap, render_depth
from .foreground_selection import (
    Detection,
    SelectionConfig,
    SelectionOutcome,
    SelectionSource,
    enlarge_box,
    fallback_center_crop,
    score_detection,
    select_primary,
)
from .metrics import (
    BenchRecord,
    ConfusionMatrix,
    MetricSummary,
    WaittParams,
    accumulate,
    compute_waitt,
    summarize,
)
from .model_runtime import (
    BackendSpec,
    Backends,
    load_backend,
    load_backends,
    mock_latency_wrap,
)
from .pipeline import ApproachId, FrameError, FrameResult, run_batch, run_frame
from .vision_core import (
    ClassScores,
    Frame,
    PatchRegion,
    SkillLabel,
    apply_colormap,
    crop,
    resize_bilinear,
)

__version__ = "0.1.0"

__all__ = [
    "ApproachId",
    "BackendSpec",
    "Backends",
    "BenchRecord",
    "ClassScores",
    "ConfusionMatrix",
    "DepthMap",
    "Detection",
    "Frame",
    "FrameError",
    "FrameResult",
    "MetricSummary",
    "PatchRegion",
    "SelectionConfig",
    "SelectionOutcome",
    "SelectionSource",
    "SkillLabel",
    "TimingProtocol",
    "WaittParams",
    "accumulate",
    "apply_colormap",
    "compute_waitt",
    "crop",
    "enlarge_box",
    "fallback_center_crop",
    "load_backend",
    "load_backends",
    "measure_cold_start",
    "measure_warm_avg",
    "mock_latency_wrap",
    "render_depth",
    "resize_bilinear",
    "run_batch",
    "run_benchmark",
    "run_frame",
    "score_detection",
    "select_primary",
    "summarize",
    "__version__",
]

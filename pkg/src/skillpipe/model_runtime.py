"""Uniform adapters for the three model roles, plus deterministic mocks.

A backend handle satisfies one behavioral contract:

* detector: Frame -> list[Detection] (pixel coords of the input frame)
* depth: Frame -> DepthMap of the same dimensions, finite values
* classifier: 224x224 Frame -> ClassScores

`graph_file` specs load a serialized network into the embedded numpy
runtime; `mock` specs build deterministic stand-ins, selected by config
like any other backend so the full CLI runs without model files. Every
handle is deterministic: identical input frames give identical outputs.

Each graph file is accompanied by a sidecar ``<graph>.meta.json``
recording role, input shape, per-channel normalization mean/std, and
(for classifiers) the class-name ordering, which must match SkillLabel
order. Adapters own input normalization and the classifier softmax, so
graphs export raw logits.

Handles are confined to one worker at a time; create one handle set per
worker for parallel runs.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, runtime_checkable

import numpy as np

from . import onnx_exec, onnx_io
from .depth_render import DepthMap
from .errors import BackendLoadError
from .foreground_selection import Detection
from .vision_core import (
    LABEL_ORDER,
    NUM_CLASSES,
    ClassScores,
    Frame,
    SkillLabel,
    resize_bilinear,
)

ROLE_DETECTOR = "detector"
ROLE_DEPTH = "depth"
ROLE_CLASSIFIER = "classifier"
ROLES = (ROLE_DETECTOR, ROLE_DEPTH, ROLE_CLASSIFIER)

CLASSIFIER_INPUT_SIZE = 224
DETECTOR_INPUT_SIZE = 640
LETTERBOX_FILL = (114, 114, 114)


@runtime_checkable
class DetectorBackend(Protocol):
    def detect(self, frame: Frame) -> list[Detection]: ...


@runtime_checkable
class DepthBackend(Protocol):
    def estimate_depth(self, frame: Frame) -> DepthMap: ...


@runtime_checkable
class ClassifierBackend(Protocol):
    def classify(self, frame: Frame) -> ClassScores: ...


@dataclass(frozen=True)
class BackendSpec:
    """How to obtain a backend: a graph file on disk, or a configured mock."""

    kind: str  # "graph_file" | "mock"
    path: str | None = None
    mock_params: dict | None = None


@dataclass
class Backends:
    """One handle per role; roles an approach does not need may stay None."""

    detector: DetectorBackend | None = None
    depth: DepthBackend | None = None
    classifier: ClassifierBackend | None = None

    def get(self, role: str):
        return getattr(self, role)


# ---------------------------------------------------------------------------
# mocks


def _peaked_scores(label: SkillLabel) -> ClassScores:
    values = np.full(NUM_CLASSES, 0.01)
    values[LABEL_ORDER.index(label)] = 1.0 - 0.01 * (NUM_CLASSES - 1)
    return ClassScores(values)


class MockDetector:
    """Returns a fixed detection list for every frame.

    Boxes are (x0, y0, x1, y1, confidence); with ``relative=True`` the
    coordinates are fractions of the frame size, which makes one config
    work across resolutions. Zero-area boxes are discarded on ingestion.
    """

    def __init__(self, boxes: list | None = None, relative: bool = False):
        self.boxes = [tuple(float(v) for v in b) for b in boxes or []]
        self.relative = relative

    def detect(self, frame: Frame) -> list[Detection]:
        out = []
        for x0, y0, x1, y1, conf in self.boxes:
            if self.relative:
                x0, x1 = x0 * frame.width, x1 * frame.width
                y0, y1 = y0 * frame.height, y1 * frame.height
            if x1 - x0 <= 0 or y1 - y0 <= 0:
                continue
            out.append(Detection(box=(x0, y0, x1, y1), confidence=conf))
        return out


class MockDepth:
    """Depth as a pure function of pixel content.

    ``luminance`` mode uses the Rec.601 luma of each pixel, so the map
    for a cropped patch equals the crop of the full-frame map; the
    ``constant`` mode emits a flat map.
    """

    def __init__(self, mode: str = "luminance", value: float = 0.5):
        if mode not in ("luminance", "constant"):
            raise ValueError(f"unknown mock depth mode {mode!r}")
        self.mode = mode
        self.value = float(value)

    def estimate_depth(self, frame: Frame) -> DepthMap:
        if self.mode == "constant":
            values = np.full((frame.height, frame.width), self.value)
        else:
            px = frame.pixels.astype(np.float64)
            values = 0.299 * px[:, :, 0] + 0.587 * px[:, :, 1] + 0.114 * px[:, :, 2]
        return DepthMap(values=values)


class MockClassifier:
    """Deterministic classifier stand-in.

    ``constant`` mode always peaks at the configured label.
    ``red_channel`` mode decodes the label index from the mean red value
    (index = round(mean_red / 25)), which pairs with synthetic frames
    that encode their ground truth as a solid color.
    """

    def __init__(self, mode: str = "constant", label: str | SkillLabel = SkillLabel.NONE):
        if mode not in ("constant", "red_channel"):
            raise ValueError(f"unknown mock classifier mode {mode!r}")
        self.mode = mode
        self.label = SkillLabel.from_token(label) if isinstance(label, str) else label

    def classify(self, frame: Frame) -> ClassScores:
        if self.mode == "constant":
            return _peaked_scores(self.label)
        mean_red = float(frame.pixels[:, :, 0].mean())
        idx = min(max(int(np.floor(mean_red / 25.0 + 0.5)), 0), NUM_CLASSES - 1)
        return _peaked_scores(LABEL_ORDER[idx])


class _LatencyWrapper:
    def __init__(self, inner, infer_delay_s: float):
        self._inner = inner
        self._infer_delay_s = infer_delay_s

    def _delegate(self, method: str, frame: Frame):
        if self._infer_delay_s > 0:
            time.sleep(self._infer_delay_s)
        return getattr(self._inner, method)(frame)

    def detect(self, frame: Frame):
        return self._delegate("detect", frame)

    def estimate_depth(self, frame: Frame):
        return self._delegate("estimate_depth", frame)

    def classify(self, frame: Frame):
        return self._delegate("classify", frame)


def mock_latency_wrap(backend, load_delay_s: float, infer_delay_s: float):
    """Simulate model latency: sleep once now, then per invocation."""
    if load_delay_s < 0 or infer_delay_s < 0:
        raise ValueError("latency delays must be >= 0")
    if load_delay_s > 0:
        time.sleep(load_delay_s)
    return _LatencyWrapper(backend, infer_delay_s)


# ---------------------------------------------------------------------------
# graph-file adapters


@dataclass(frozen=True)
class SidecarMeta:
    role: str
    input_shape: tuple
    mean: tuple[float, float, float]
    std: tuple[float, float, float]
    class_names: tuple[str, ...] | None = None


def sidecar_path(graph_path: str | Path) -> Path:
    return Path(str(graph_path) + ".meta.json")


def load_sidecar(graph_path: str | Path) -> SidecarMeta:
    path = sidecar_path(graph_path)
    if not path.exists():
        raise BackendLoadError(f"missing sidecar metadata file {path}")
    try:
        raw = json.loads(path.read_text())
        meta = SidecarMeta(
            role=raw["role"],
            input_shape=tuple(raw["input_shape"]),
            mean=tuple(float(v) for v in raw["mean"]),
            std=tuple(float(v) for v in raw["std"]),
            class_names=tuple(raw["class_names"]) if raw.get("class_names") else None,
        )
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise BackendLoadError(f"malformed sidecar {path}: {exc}") from exc
    if len(meta.mean) != 3 or len(meta.std) != 3:
        raise BackendLoadError(f"sidecar {path}: mean/std must have 3 channels")
    if any(s == 0 for s in meta.std):
        raise BackendLoadError(f"sidecar {path}: zero std channel")
    return meta


def _normalize(frame: Frame, meta: SidecarMeta) -> np.ndarray:
    """HWC uint8 -> normalized NCHW float32 batch of one."""
    x = frame.pixels.astype(np.float32) / 255.0
    x = (x - np.array(meta.mean, dtype=np.float32)) / np.array(meta.std, dtype=np.float32)
    return np.ascontiguousarray(x.transpose(2, 0, 1)[None, ...])


def letterbox_frame(frame: Frame, size: int = DETECTOR_INPUT_SIZE) -> tuple[Frame, float, int, int]:
    """Fit the frame into size x size preserving aspect; returns (frame, scale, pad_x, pad_y)."""
    scale = min(size / frame.width, size / frame.height)
    new_w = max(1, int(round(frame.width * scale)))
    new_h = max(1, int(round(frame.height * scale)))
    resized = resize_bilinear(frame, new_w, new_h)
    pad_x = (size - new_w) // 2
    pad_y = (size - new_h) // 2
    canvas = np.empty((size, size, 3), dtype=np.uint8)
    canvas[:, :] = LETTERBOX_FILL
    canvas[pad_y : pad_y + new_h, pad_x : pad_x + new_w] = resized.pixels
    return Frame(canvas), scale, pad_x, pad_y


def _dim_matches(declared, expected: int) -> bool:
    return not isinstance(declared, int) or declared == expected


def _shape_error(role: str, kind: str, expected, found) -> BackendLoadError:
    return BackendLoadError(
        f"{role} graph {kind} shape mismatch: expected {expected}, found {list(found)}"
    )


class _GraphBackend:
    def __init__(self, graph: onnx_io.ModelGraph, meta: SidecarMeta):
        self.graph = graph
        self.meta = meta
        self.input_name = graph.inputs[0].name
        self.output_name = graph.outputs[0].name

    def _run(self, feed: np.ndarray) -> np.ndarray:
        outputs = onnx_exec.execute(self.graph, {self.input_name: feed})
        return np.asarray(outputs[self.output_name])


class OnnxClassifier(_GraphBackend):
    def classify(self, frame: Frame) -> ClassScores:
        if frame.width != CLASSIFIER_INPUT_SIZE or frame.height != CLASSIFIER_INPUT_SIZE:
            raise ValueError(
                f"classifier expects {CLASSIFIER_INPUT_SIZE}x{CLASSIFIER_INPUT_SIZE} input, "
                f"got {frame.width}x{frame.height}"
            )
        logits = self._run(_normalize(frame, self.meta)).reshape(-1).astype(np.float64)
        shifted = logits - logits.max()
        e = np.exp(shifted)
        return ClassScores(e / e.sum())


class OnnxDepth(_GraphBackend):
    def estimate_depth(self, frame: Frame) -> DepthMap:
        shape = self.graph.inputs[0].shape
        if len(shape) == 4:
            for declared, actual, axis in ((shape[2], frame.height, "height"), (shape[3], frame.width, "width")):
                if isinstance(declared, int) and declared != actual:
                    raise ValueError(
                        f"depth graph expects fixed {axis} {declared}, got {actual}"
                    )
        raw = self._run(_normalize(frame, self.meta))
        values = np.squeeze(raw)
        if values.shape != (frame.height, frame.width):
            raise ValueError(
                f"depth output shape {values.shape} does not match frame "
                f"{frame.height}x{frame.width}"
            )
        values = values.astype(np.float64)
        if not np.isfinite(values).all():
            raise ValueError("depth graph produced non-finite values")
        return DepthMap(values=values)


class OnnxDetector(_GraphBackend):
    def __init__(self, graph, meta, conf_threshold: float = 0.2):
        super().__init__(graph, meta)
        self.conf_threshold = conf_threshold

    def detect(self, frame: Frame) -> list[Detection]:
        boxed, scale, pad_x, pad_y = letterbox_frame(frame)
        raw = self._run(_normalize(boxed, self.meta))
        rows = raw.reshape(-1, raw.shape[-1])
        detections = []
        for row in rows:
            conf = float(min(max(row[4], 0.0), 1.0))
            if conf < self.conf_threshold:
                continue
            x0 = (float(row[0]) - pad_x) / scale
            y0 = (float(row[1]) - pad_y) / scale
            x1 = (float(row[2]) - pad_x) / scale
            y1 = (float(row[3]) - pad_y) / scale
            x0, x1 = min(x0, x1), max(x0, x1)
            y0, y1 = min(y0, y1), max(y0, y1)
            if x1 - x0 <= 0 or y1 - y0 <= 0:
                continue
            detections.append(Detection(box=(x0, y0, x1, y1), confidence=conf))
        return detections


def _validate_graph(graph: onnx_io.ModelGraph, role: str) -> None:
    if len(graph.inputs) != 1:
        raise BackendLoadError(f"{role} graph must have exactly 1 input, found {len(graph.inputs)}")
    if len(graph.outputs) < 1:
        raise BackendLoadError(f"{role} graph declares no outputs")
    onnx_exec.validate_ops(graph)
    in_shape = graph.inputs[0].shape
    out_shape = graph.outputs[0].shape
    if role == ROLE_CLASSIFIER:
        expected = [1, 3, CLASSIFIER_INPUT_SIZE, CLASSIFIER_INPUT_SIZE]
        if len(in_shape) != 4 or not all(_dim_matches(d, e) for d, e in zip(in_shape, expected)):
            raise _shape_error(role, "input", expected, in_shape)
        classes = out_shape[-1] if out_shape else None
        if isinstance(classes, int) and classes != NUM_CLASSES:
            raise BackendLoadError(
                f"classifier graph output: expected {NUM_CLASSES} classes, found {classes}"
            )
    elif role == ROLE_DEPTH:
        if len(in_shape) != 4 or not _dim_matches(in_shape[1], 3):
            raise _shape_error(role, "input", [1, 3, "h", "w"], in_shape)
        if not 2 <= len(out_shape) <= 4:
            raise _shape_error(role, "output", "rank 2-4 depth map", out_shape)
    elif role == ROLE_DETECTOR:
        expected = [1, 3, DETECTOR_INPUT_SIZE, DETECTOR_INPUT_SIZE]
        if len(in_shape) != 4 or not all(_dim_matches(d, e) for d, e in zip(in_shape, expected)):
            raise _shape_error(role, "input", expected, in_shape)
        cols = out_shape[-1] if out_shape else None
        if isinstance(cols, int) and cols != 5:
            raise BackendLoadError(
                f"detector graph output: expected 5 columns (x0,y0,x1,y1,conf), found {cols}"
            )
    else:
        raise BackendLoadError(f"unknown backend role {role!r}")


def _load_graph_backend(spec: BackendSpec, role: str, detector_conf_threshold: float):
    path = Path(spec.path or "")
    if not path.exists():
        raise BackendLoadError(f"graph file not found: {path}")
    try:
        graph = onnx_io.decode_model(path.read_bytes())
    except ValueError as exc:
        raise BackendLoadError(f"cannot parse graph {path}: {exc}") from exc
    _validate_graph(graph, role)
    meta = load_sidecar(path)
    if meta.role != role:
        raise BackendLoadError(
            f"sidecar role mismatch for {path}: expected {role!r}, found {meta.role!r}"
        )
    if role == ROLE_CLASSIFIER:
        expected_names = tuple(lab.value for lab in LABEL_ORDER)
        if meta.class_names != expected_names:
            raise BackendLoadError(
                f"classifier sidecar class order mismatch: expected {list(expected_names)}, "
                f"found {list(meta.class_names) if meta.class_names else None}"
            )
        return OnnxClassifier(graph, meta)
    if role == ROLE_DEPTH:
        return OnnxDepth(graph, meta)
    return OnnxDetector(graph, meta, conf_threshold=detector_conf_threshold)


def _load_mock_backend(spec: BackendSpec, role: str):
    params = dict(spec.mock_params or {})
    load_delay = float(params.pop("load_delay_s", 0.0))
    infer_delay = float(params.pop("infer_delay_s", 0.0))
    try:
        if role == ROLE_DETECTOR:
            backend = MockDetector(**params)
        elif role == ROLE_DEPTH:
            backend = MockDepth(**params)
        elif role == ROLE_CLASSIFIER:
            backend = MockClassifier(**params)
        else:
            raise ValueError(f"unknown backend role {role!r}")
    except (TypeError, ValueError) as exc:
        raise BackendLoadError(f"bad mock parameters for role {role}: {exc}") from exc
    if load_delay > 0 or infer_delay > 0:
        return mock_latency_wrap(backend, load_delay, infer_delay)
    return backend


def load_backend(spec: BackendSpec, role: str, *, detector_conf_threshold: float = 0.2):
    """Build a backend handle satisfying the role's contract."""
    if spec.kind == "mock":
        return _load_mock_backend(spec, role)
    if spec.kind == "graph_file":
        return _load_graph_backend(spec, role, detector_conf_threshold)
    raise BackendLoadError(f"unknown backend kind {spec.kind!r}")


def load_backends(
    specs: dict[str, BackendSpec],
    roles: tuple[str, ...],
    *,
    detector_conf_threshold: float = 0.2,
) -> Backends:
    """Load every role an approach needs from its spec."""
    backends = Backends()
    for role in roles:
        spec = specs.get(role)
        if spec is None:
            raise BackendLoadError(f"no backend spec configured for role {role!r}")
        setattr(
            backends,
            role,
            load_backend(spec, role, detector_conf_threshold=detector_conf_threshold),
        )
    return backends

"""One structured config file drives every run; flags override fields.

The file is JSON. Defaults reproduce the published constants: selection
weights 0.6/0.4, 1% minimum area, 0.8 fallback scale, 5-15% enlargement,
0.2 detector confidence threshold, trade-off parameters alpha=1 gamma=2.
Relative paths in the file (graph files, manifest, out) resolve against
the config file's directory; paths given as flags resolve as typed.

Schema (all keys optional):

    {
      "approach": "depth-patch",
      "approaches": ["full-rgb", "rgb-patch"],        # bench runs
      "backends": {
        "detector":   {"kind": "mock", "mock_params": {...}},
        "depth":      {"kind": "graph_file", "path": "depth.onnx"},
        "classifier": {"kind": "graph_file", "path": "cls.onnx"}
      },
      "selection": {"conf_weight": 0.6, ...},
      "waitt": {"alpha": 1.0, "gamma": 2.0},
      "timing": {"warm_samples": 100, "repetitions": 3},
      "manifest": "frames.csv",
      "out": "runs/out",
      "workers": 1,
      "fail_fast": false,
      "bench": {
        "supplied_accuracy":  {"full-rgb": 0.726},
        "supplied_avg_iit_s": {"full-rgb": 0.001}
      }
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .bench import TimingProtocol
from .errors import ConfigError
from .foreground_selection import SelectionConfig
from .metrics import WaittParams
from .model_runtime import ROLES, BackendSpec
from .pipeline import ApproachId

_TOP_KEYS = {
    "approach", "approaches", "backends", "selection", "waitt", "timing",
    "manifest", "out", "workers", "fail_fast", "bench",
}


def default_mock_specs() -> dict[str, BackendSpec]:
    """Mock backends good enough for end-to-end smoke runs on any frame size."""
    return {
        "detector": BackendSpec(
            kind="mock",
            mock_params={"boxes": [[0.3, 0.15, 0.7, 0.9, 0.9]], "relative": True},
        ),
        "depth": BackendSpec(kind="mock", mock_params={"mode": "luminance"}),
        "classifier": BackendSpec(kind="mock", mock_params={"mode": "constant", "label": "NONE"}),
    }


@dataclass
class RunConfig:
    approach: ApproachId | None = None
    approaches: list[ApproachId] = field(default_factory=list)
    backend_specs: dict[str, BackendSpec] = field(default_factory=dict)
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    waitt: WaittParams = field(default_factory=WaittParams)
    timing: TimingProtocol = field(default_factory=TimingProtocol)
    manifest: Path | None = None
    out: Path = Path("skillpipe-out")
    workers: int = 1
    fail_fast: bool = False
    supplied_accuracy: dict[ApproachId, float] = field(default_factory=dict)
    supplied_avg_iit_s: dict[ApproachId, float] = field(default_factory=dict)


def load_config_file(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must contain a JSON object")
    return data


def _resolve(path_text: str, base_dir: Path | None) -> str:
    path = Path(path_text)
    if base_dir is not None and not path.is_absolute():
        return str(base_dir / path)
    return str(path)


def _parse_backend_specs(raw: dict, base_dir: Path | None) -> dict[str, BackendSpec]:
    specs = {}
    for role, entry in raw.items():
        if role not in ROLES:
            raise ConfigError(f"unknown backend role {role!r} (expected one of {ROLES})")
        if not isinstance(entry, dict) or "kind" not in entry:
            raise ConfigError(f"backend {role!r} must be an object with a 'kind'")
        kind = entry["kind"]
        if kind not in ("mock", "graph_file"):
            raise ConfigError(f"backend {role!r}: unknown kind {kind!r}")
        if kind == "graph_file" and not entry.get("path"):
            raise ConfigError(f"backend {role!r}: graph_file requires a 'path'")
        path = entry.get("path")
        specs[role] = BackendSpec(
            kind=kind,
            path=_resolve(path, base_dir) if path else None,
            mock_params=entry.get("mock_params"),
        )
    return specs


def _parse_approach_map(raw: dict, what: str) -> dict[ApproachId, float]:
    out = {}
    for token, value in raw.items():
        try:
            out[ApproachId.from_token(token)] = float(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bench.{what}: {exc}") from exc
    return out


def build_run_config(data: dict, base_dir: Path | None = None) -> RunConfig:
    """Validate a parsed config object into a RunConfig.

    Relative paths inside the file (backend graphs, manifest, out)
    resolve against base_dir, normally the config file's directory.
    """
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    cfg = RunConfig()
    try:
        if data.get("approach"):
            cfg.approach = ApproachId.from_token(data["approach"])
        cfg.approaches = [ApproachId.from_token(t) for t in data.get("approaches", [])]
        cfg.selection = SelectionConfig(**data.get("selection", {}))
        cfg.waitt = WaittParams(**data.get("waitt", {}))
        cfg.timing = TimingProtocol(**data.get("timing", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    cfg.backend_specs = _parse_backend_specs(data.get("backends", {}), base_dir)
    if data.get("manifest"):
        cfg.manifest = Path(_resolve(data["manifest"], base_dir))
    if data.get("out"):
        cfg.out = Path(_resolve(data["out"], base_dir))
    cfg.workers = int(data.get("workers", 1))
    if cfg.workers < 1:
        raise ConfigError(f"workers must be >= 1, got {cfg.workers}")
    cfg.fail_fast = bool(data.get("fail_fast", False))
    bench = data.get("bench", {})
    if not isinstance(bench, dict):
        raise ConfigError("'bench' must be an object")
    cfg.supplied_accuracy = _parse_approach_map(bench.get("supplied_accuracy", {}), "supplied_accuracy")
    cfg.supplied_avg_iit_s = _parse_approach_map(bench.get("supplied_avg_iit_s", {}), "supplied_avg_iit_s")
    return cfg


def config_snapshot(cfg: RunConfig) -> dict:
    """Serializable snapshot embedded in every report for reproducibility."""
    return {
        "approach": cfg.approach.value if cfg.approach else None,
        "approaches": [a.value for a in cfg.approaches],
        "backends": {
            role: {"kind": spec.kind, "path": spec.path, "mock_params": spec.mock_params}
            for role, spec in sorted(cfg.backend_specs.items())
        },
        "selection": {
            "conf_weight": cfg.selection.conf_weight,
            "area_weight": cfg.selection.area_weight,
            "min_area_fraction": cfg.selection.min_area_fraction,
            "fallback_scale": cfg.selection.fallback_scale,
            "enlarge_max": cfg.selection.enlarge_max,
            "enlarge_min": cfg.selection.enlarge_min,
            "detector_conf_threshold": cfg.selection.detector_conf_threshold,
        },
        "waitt": {"alpha": cfg.waitt.alpha, "gamma": cfg.waitt.gamma},
        "timing": {"warm_samples": cfg.timing.warm_samples, "repetitions": cfg.timing.repetitions},
        "manifest": str(cfg.manifest) if cfg.manifest else None,
        "workers": cfg.workers,
        "fail_fast": cfg.fail_fast,
    }

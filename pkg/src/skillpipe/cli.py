"""Command-line entry point.

Subcommands: classify, eval, bench, extract-patches, render-depth.
Exit codes partition failures: 0 success, 1 partial per-frame failures,
2 config or user error, 3 backend/environment error. The only
environment variable honored is SKILLPIPE_LOG_LEVEL.
"""

from __future__ import annotations

import argparse
import csv
import functools
import logging
import os
import sys
from pathlib import Path

from . import bench as bench_mod
from .config import (
    RunConfig,
    build_run_config,
    config_snapshot,
    default_mock_specs,
    load_config_file,
)
from .dataset_io import (
    ManifestEntry,
    RunReport,
    bench_table,
    load_frame,
    read_manifest,
    save_png,
    write_bench_csv,
    write_report,
    write_results_csv,
)
from .errors import BackendLoadError, ConfigError
from .foreground_selection import select_primary
from .metrics import ConfusionMatrix
from .model_runtime import load_backends
from .pipeline import (
    REQUIRED_BACKENDS,
    ApproachId,
    FrameError,
    FrameResult,
    run_batch,
)
from .vision_core import crop

log = logging.getLogger("skillpipe")

APPROACH_CHOICES = ["full-rgb", "full-depth", "rgb-patch", "depth-patch"]


def _entry_path(manifest: Path, entry: ManifestEntry) -> Path:
    # Relative manifest paths resolve against the manifest's directory.
    p = Path(entry.path)
    return p if p.is_absolute() else manifest.parent / p


def _frame_items(cfg: RunConfig, entries: list[ManifestEntry]):
    return [
        (e.frame_id, functools.partial(load_frame, _entry_path(cfg.manifest, e)))
        for e in entries
    ]


def _require_manifest(cfg: RunConfig) -> list[ManifestEntry]:
    if cfg.manifest is None:
        raise ConfigError("a manifest is required (--manifest or config 'manifest')")
    return read_manifest(cfg.manifest)


def _require_approach(cfg: RunConfig) -> ApproachId:
    if cfg.approach is None:
        raise ConfigError("an approach is required (--approach or config 'approach')")
    return cfg.approach


def _backends_for(cfg: RunConfig, roles: tuple[str, ...]):
    return load_backends(
        cfg.backend_specs,
        roles,
        detector_conf_threshold=cfg.selection.detector_conf_threshold,
    )


def _run_manifest_batch(cfg: RunConfig, approach: ApproachId, entries):
    roles = REQUIRED_BACKENDS[approach]
    backends = _backends_for(cfg, roles)
    factory = (lambda: _backends_for(cfg, roles)) if cfg.workers > 1 else None
    return run_batch(
        _frame_items(cfg, entries),
        approach,
        backends,
        cfg.selection,
        workers=cfg.workers,
        fail_fast=cfg.fail_fast,
        backend_factory=factory,
    )


def _finish(results, out: Path, written: list[Path]) -> int:
    errors = [r for r in results if isinstance(r, FrameError)]
    for path in written:
        print(path)
    if errors:
        print(f"{len(errors)} of {len(results)} frames failed", file=sys.stderr)
        return 1
    return 0


def cmd_classify(cfg: RunConfig) -> int:
    approach = _require_approach(cfg)
    entries = _require_manifest(cfg)
    results = _run_manifest_batch(cfg, approach, entries)
    cfg.out.mkdir(parents=True, exist_ok=True)
    out_path = cfg.out / "results.csv"
    write_results_csv(out_path, results)
    return _finish(results, cfg.out, [out_path])


def cmd_eval(cfg: RunConfig) -> int:
    approach = _require_approach(cfg)
    entries = _require_manifest(cfg)
    unlabeled = [e.frame_id for e in entries if e.label is None]
    if unlabeled:
        raise ConfigError(f"eval requires labels for every frame; unlabeled: {unlabeled}")
    truth = {e.frame_id: e.label for e in entries}
    results = _run_manifest_batch(cfg, approach, entries)
    cm = ConfusionMatrix()
    for r in results:
        if isinstance(r, FrameResult):
            cm.add(truth[r.frame_id], r.predicted)
    report = RunReport(config=config_snapshot(cfg), results=results, confusion=cm)
    written = write_report(report, cfg.out)
    return _finish(results, cfg.out, written)


def cmd_bench(cfg: RunConfig) -> int:
    approaches = cfg.approaches or ([cfg.approach] if cfg.approach else [])
    if not approaches:
        raise ConfigError("bench needs 'approaches' in the config or --approach")
    entries = _require_manifest(cfg)
    frames = [load_frame(_entry_path(cfg.manifest, e)) for e in entries]
    labels = [e.label for e in entries]
    have_labels = all(lab is not None for lab in labels) and bool(labels)
    records = bench_mod.run_benchmark(
        approaches,
        cfg.backend_specs,
        cfg.selection,
        cfg.timing,
        frames,
        labels=labels if have_labels else None,
        waitt_params=cfg.waitt,
        supplied_accuracy=cfg.supplied_accuracy,
        supplied_avg_iit_s=cfg.supplied_avg_iit_s,
        detector_conf_threshold=cfg.selection.detector_conf_threshold,
    )
    cfg.out.mkdir(parents=True, exist_ok=True)
    out_path = cfg.out / "bench.csv"
    write_bench_csv(out_path, records)
    print(bench_table(records), end="")
    print(out_path)
    return 0


def cmd_extract_patches(cfg: RunConfig) -> int:
    entries = _require_manifest(cfg)
    backends = _backends_for(cfg, ("detector",))
    cfg.out.mkdir(parents=True, exist_ok=True)
    rows = []
    failures = 0
    for entry in entries:
        try:
            frame = load_frame(_entry_path(cfg.manifest, entry))
            detections = backends.detector.detect(frame)
            outcome = select_primary(detections, frame.width, frame.height, cfg.selection)
            patch = crop(frame, outcome.region)
            save_png(patch, cfg.out / f"{entry.frame_id}.patch.png")
            region = outcome.region
            rows.append(
                [
                    entry.frame_id,
                    outcome.source.value,
                    region.x0,
                    region.y0,
                    region.x1,
                    region.y1,
                    f"{outcome.score:.6g}" if outcome.score is not None else "",
                ]
            )
        except Exception as exc:
            if cfg.fail_fast:
                raise
            failures += 1
            rows.append([entry.frame_id, "error", "", "", "", "", str(exc)])
    selections_path = cfg.out / "selections.csv"
    with selections_path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["frame_id", "source", "x0", "y0", "x1", "y1", "score"])
        writer.writerows(rows)
    print(selections_path)
    if failures:
        print(f"{failures} of {len(entries)} frames failed", file=sys.stderr)
        return 1
    return 0


def cmd_render_depth(cfg: RunConfig) -> int:
    from .depth_render import render_depth

    entries = _require_manifest(cfg)
    backends = _backends_for(cfg, ("depth",))
    cfg.out.mkdir(parents=True, exist_ok=True)
    failures = 0
    for entry in entries:
        try:
            frame = load_frame(_entry_path(cfg.manifest, entry))
            rendered = render_depth(backends.depth.estimate_depth(frame))
            save_png(rendered, cfg.out / f"{entry.frame_id}.depth.png")
        except Exception as exc:
            if cfg.fail_fast:
                raise
            failures += 1
            log.error("frame %s failed: %s", entry.frame_id, exc)
    print(cfg.out)
    if failures:
        print(f"{failures} of {len(entries)} frames failed", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skillpipe",
        description="Static-pose skill classification pipelines and benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    handlers = {
        "classify": cmd_classify,
        "eval": cmd_eval,
        "bench": cmd_bench,
        "extract-patches": cmd_extract_patches,
        "render-depth": cmd_render_depth,
    }
    for name, handler in handlers.items():
        sp = sub.add_parser(name)
        sp.set_defaults(handler=handler)
        sp.add_argument("--config", type=Path, help="JSON config file")
        sp.add_argument("--approach", choices=APPROACH_CHOICES)
        sp.add_argument("--manifest", type=Path)
        sp.add_argument("--out", type=Path)
        sp.add_argument("--workers", type=int)
        sp.add_argument("--fail-fast", action="store_true", default=None)
        sp.add_argument("--mock", action="store_true", help="use default mock backends")
        if name == "bench":
            sp.add_argument(
                "--supplied-accuracy",
                type=float,
                help="externally measured accuracy, applied to every benched approach",
            )
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    data = load_config_file(args.config) if args.config else {}
    cfg = build_run_config(data, base_dir=args.config.parent if args.config else None)
    if args.approach:
        cfg.approach = ApproachId.from_token(args.approach)
    if args.manifest:
        cfg.manifest = args.manifest
    if args.out:
        cfg.out = args.out
    if args.workers is not None:
        if args.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {args.workers}")
        cfg.workers = args.workers
    if args.fail_fast is not None:
        cfg.fail_fast = args.fail_fast
    if args.mock:
        # Force mock backends everywhere; configured mock params still apply.
        specs = default_mock_specs()
        for role, spec in cfg.backend_specs.items():
            if spec.kind == "mock":
                specs[role] = spec
        cfg.backend_specs = specs
    supplied = getattr(args, "supplied_accuracy", None)
    if supplied is not None:
        approaches = cfg.approaches or ([cfg.approach] if cfg.approach else [])
        for approach in approaches:
            cfg.supplied_accuracy[approach] = supplied
    return cfg


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("SKILLPIPE_LOG_LEVEL", "WARNING").upper())
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return args.handler(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BackendLoadError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

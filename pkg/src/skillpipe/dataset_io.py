"""Manifest ingestion, frame decode/encode, and report persistence.

The manifest is a CSV with the exact header ``frame_id,path,label,video_id``;
label and video_id may be empty. Frames are individual PNG/JPEG files
(video extraction happens upstream). Reports are written as four
deterministic files: results.csv, confusion.csv, bench.csv, and
summary.json. Floats serialize with 6 significant digits; CSVs use
RFC-4180 quoting and LF line endings, so repeated writes of the same
report are byte-identical.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import ManifestError
from .metrics import BenchRecord, ConfusionMatrix, summarize
from .pipeline import FrameError, FrameResult
from .vision_core import LABEL_ORDER, Frame, SkillLabel

MANIFEST_HEADER = ["frame_id", "path", "label", "video_id"]


@dataclass(frozen=True)
class ManifestEntry:
    frame_id: str
    path: str
    label: SkillLabel | None = None
    video_id: str | None = None


def read_manifest(path: str | Path) -> list[ManifestEntry]:
    """Parse a manifest CSV; entries come back in file order."""
    path = Path(path)
    if not path.exists():
        raise ManifestError(f"manifest not found: {path}")
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ManifestError(f"{path}: empty file, expected header {MANIFEST_HEADER}") from None
        if header != MANIFEST_HEADER:
            raise ManifestError(f"{path}: bad header {header}, expected {MANIFEST_HEADER}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(MANIFEST_HEADER):
                raise ManifestError(f"{path}:{lineno}: expected {len(MANIFEST_HEADER)} columns, got {len(row)}")
            frame_id, frame_path, label_token, video_id = (cell.strip() for cell in row)
            if not frame_id:
                raise ManifestError(f"{path}:{lineno}: empty frame_id")
            if frame_id in seen:
                raise ManifestError(f"{path}:{lineno}: duplicate frame_id {frame_id!r}")
            seen.add(frame_id)
            label = None
            if label_token:
                try:
                    label = SkillLabel.from_token(label_token)
                except ValueError as exc:
                    raise ManifestError(f"{path}:{lineno}: {exc}") from None
            entries.append(
                ManifestEntry(
                    frame_id=frame_id,
                    path=frame_path,
                    label=label,
                    video_id=video_id or None,
                )
            )
    return entries


def write_manifest(entries: list[ManifestEntry], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_HEADER)
        for e in entries:
            writer.writerow([e.frame_id, e.path, e.label.value if e.label else "", e.video_id or ""])


def load_frame(path: str | Path) -> Frame:
    """Decode a PNG/JPEG file into the canonical 8-bit RGB raster."""
    with Image.open(path) as img:
        return Frame(np.asarray(img.convert("RGB"), dtype=np.uint8))


def save_png(frame: Frame, path: str | Path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(frame.pixels).save(path, format="PNG")


def fmt_float(x: float) -> str:
    """6 significant digits, the fixed serialization for report floats."""
    return f"{x:.6g}"


@dataclass
class RunReport:
    """Everything one run produced, ready for persistence."""

    config: dict
    results: list[FrameResult | FrameError] = field(default_factory=list)
    confusion: ConfusionMatrix | None = None
    bench_records: list[BenchRecord] = field(default_factory=list)

    @property
    def total_frames(self) -> int:
        return len(self.results)

    @property
    def error_count(self) -> int:
        return sum(isinstance(r, FrameError) for r in self.results)

    @property
    def fallback_count(self) -> int:
        from .foreground_selection import SelectionSource

        return sum(
            isinstance(r, FrameResult)
            and r.selection is not None
            and r.selection.source is SelectionSource.FALLBACK_CENTER_CROP
            for r in self.results
        )

    @property
    def fallback_fraction(self) -> float:
        return self.fallback_count / self.total_frames if self.total_frames else 0.0


RESULTS_HEADER = [
    "frame_id",
    "approach",
    "predicted",
    "confidence",
    "selection_source",
    "region_x0",
    "region_y0",
    "region_x1",
    "region_y1",
    "selection_score",
    "error",
]


def _results_rows(results: list[FrameResult | FrameError]):
    for r in results:
        if isinstance(r, FrameError):
            yield [r.frame_id, "", "", "", "", "", "", "", "", "", f"{r.stage}: {r.message}"]
            continue
        row = [r.frame_id, r.approach.value, r.predicted.value, fmt_float(r.scores.max_score)]
        if r.selection is not None:
            region = r.selection.region
            row += [
                r.selection.source.value,
                region.x0,
                region.y0,
                region.x1,
                region.y1,
                fmt_float(r.selection.score) if r.selection.score is not None else "",
            ]
        else:
            row += ["", "", "", "", "", ""]
        row.append("")
        yield row


def write_results_csv(path: Path, results: list[FrameResult | FrameError]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULTS_HEADER)
        writer.writerows(_results_rows(results))


def write_confusion_csv(path: Path, cm: ConfusionMatrix | None) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label"] + [lab.value for lab in LABEL_ORDER])
        if cm is not None:
            for i, lab in enumerate(LABEL_ORDER):
                writer.writerow([lab.value] + cm.counts[i].tolist())


BENCH_HEADER = [
    "approach",
    "accuracy",
    "cs1_iit_s",
    "cs10_iit_s",
    "avg_iit_s",
    "waitt",
    "accuracy_source",
    "avg_iit_source",
]


def write_bench_csv(path: Path, records: list[BenchRecord]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(BENCH_HEADER)
        for r in records:
            writer.writerow(
                [
                    r.approach.value,
                    fmt_float(r.accuracy),
                    fmt_float(r.cs1_s),
                    fmt_float(r.cs10_s),
                    fmt_float(r.avg_iit_s),
                    fmt_float(r.waitt),
                    r.accuracy_source,
                    r.avg_iit_source,
                ]
            )


def bench_table(records: list[BenchRecord]) -> str:
    """bench.csv contents as a string, handy for logging."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BENCH_HEADER)
    for r in records:
        writer.writerow([r.approach.value, fmt_float(r.accuracy), fmt_float(r.cs1_s),
                         fmt_float(r.cs10_s), fmt_float(r.avg_iit_s), fmt_float(r.waitt),
                         r.accuracy_source, r.avg_iit_source])
    return buf.getvalue()


def _round6(x: float) -> float:
    return float(fmt_float(x))


def write_summary_json(path: Path, report: RunReport) -> None:
    summary: dict = {
        "config": report.config,
        "total_frames": report.total_frames,
        "errors": report.error_count,
        "fallback_count": report.fallback_count,
        "fallback_fraction": _round6(report.fallback_fraction),
    }
    if report.confusion is not None and report.confusion.total > 0:
        m = summarize(report.confusion)
        summary["metrics"] = {
            "accuracy": _round6(m.accuracy),
            "macro_precision": _round6(m.precision),
            "macro_recall": _round6(m.recall),
            "macro_f1": _round6(m.f1),
        }
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


def write_report(report: RunReport, out_dir: str | Path) -> list[Path]:
    """Write the four report files; byte-identical for equal reports."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results_path = out / "results.csv"
    confusion_path = out / "confusion.csv"
    bench_path = out / "bench.csv"
    summary_path = out / "summary.json"
    write_results_csv(results_path, report.results)
    write_confusion_csv(confusion_path, report.confusion)
    write_bench_csv(bench_path, report.bench_records)
    write_summary_json(summary_path, report)
    return [results_path, confusion_path, bench_path, summary_path]

import numpy as np
import pytest
from PIL import Image

from skillpipe.dataset_io import (
    ManifestEntry,
    RunReport,
    fmt_float,
    load_frame,
    read_manifest,
    save_png,
    write_manifest,
    write_report,
)
from skillpipe.errors import ManifestError
from skillpipe.foreground_selection import (
    SelectionOutcome,
    SelectionSource,
)
from skillpipe.metrics import ConfusionMatrix
from skillpipe.pipeline import ApproachId, FrameError, FrameResult
from skillpipe.vision_core import (
    LABEL_ORDER,
    ClassScores,
    PatchRegion,
    SkillLabel,
)

from conftest import random_frame


def make_result(i: int, fallback: bool = False) -> FrameResult:
    values = np.full(10, 0.01)
    values[i % 10] = 0.91
    outcome = SelectionOutcome(
        region=PatchRegion(10, 10, 50, 50),
        source=SelectionSource.FALLBACK_CENTER_CROP if fallback else SelectionSource.DETECTED,
        score=None if fallback else 0.7,
    )
    return FrameResult(
        frame_id=f"f{i:03d}",
        approach=ApproachId.RGB_PATCH,
        predicted=LABEL_ORDER[i % 10],
        scores=ClassScores(values),
        selection=outcome,
        stage_timings={"classify": 0.001},
    )


class TestManifest:
    def test_round_trip(self, tmp_path):
        entries = [
            ManifestEntry("a", "frames/a.png", SkillLabel.PL, "vid1"),
            ManifestEntry("b", "frames/b.png", None, None),
            ManifestEntry("c", "frames/c.jpg", SkillLabel.NONE, "vid2"),
        ]
        path = tmp_path / "manifest.csv"
        write_manifest(entries, path)
        assert read_manifest(path) == entries

    def test_three_row_file(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text(
            "frame_id,path,label,video_id\n"
            "f1,a.png,PL,v1\n"
            "f2,b.png,FL,\n"
            "f3,c.png,,\n"
        )
        entries = read_manifest(path)
        assert len(entries) == 3
        assert entries[1].label is SkillLabel.FL
        assert entries[2].label is None

    def test_header_only(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("frame_id,path,label,video_id\n")
        assert read_manifest(path) == []

    def test_unknown_label_names_line(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("frame_id,path,label,video_id\nf1,a.png,XYZ,\n")
        with pytest.raises(ManifestError, match=r":2: .*XYZ"):
            read_manifest(path)

    def test_duplicate_frame_id(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("frame_id,path,label,video_id\nf1,a.png,,\nf1,b.png,,\n")
        with pytest.raises(ManifestError, match="duplicate"):
            read_manifest(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ManifestError, match="not found"):
            read_manifest(tmp_path / "absent.csv")

    def test_bad_header(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("id,path\nf1,a.png\n")
        with pytest.raises(ManifestError, match="bad header"):
            read_manifest(path)


class TestFrameIO:
    def test_png_round_trip(self, tmp_path):
        frame = random_frame(np.random.default_rng(21), 33, 17)
        path = tmp_path / "f.png"
        save_png(frame, path)
        loaded = load_frame(path)
        assert np.array_equal(loaded.pixels, frame.pixels)

    def test_jpeg_decodes(self, tmp_path):
        path = tmp_path / "f.jpg"
        Image.fromarray(np.full((20, 30, 3), 128, np.uint8)).save(path, format="JPEG")
        frame = load_frame(path)
        assert (frame.width, frame.height) == (30, 20)


def test_fmt_float_six_significant_digits():
    assert fmt_float(0.123456789) == "0.123457"
    assert fmt_float(1234567.0) == "1.23457e+06"
    assert fmt_float(0.5) == "0.5"


class TestWriteReport:
    def test_labeled_run_produces_four_files(self, tmp_path):
        cm = ConfusionMatrix()
        results = []
        for i in range(10):
            results.append(make_result(i))
            cm.add(LABEL_ORDER[i % 10], LABEL_ORDER[i % 10])
        report = RunReport(config={"approach": "rgb_patch"}, results=results, confusion=cm)
        paths = write_report(report, tmp_path / "out")
        assert [p.name for p in paths] == ["results.csv", "confusion.csv", "bench.csv", "summary.json"]
        assert all(p.exists() for p in paths)
        confusion_lines = (tmp_path / "out" / "confusion.csv").read_text().splitlines()
        assert len(confusion_lines) == 11  # header + 10 label rows
        total = sum(int(c) for line in confusion_lines[1:] for c in line.split(",")[1:])
        assert total == 10

    def test_fallback_fraction(self, tmp_path):
        results = [make_result(i, fallback=(i == 7)) for i in range(40)]
        report = RunReport(config={}, results=results)
        assert report.fallback_count == 1
        assert report.fallback_fraction == 0.025
        write_report(report, tmp_path)
        summary = (tmp_path / "summary.json").read_text()
        assert '"fallback_fraction": 0.025' in summary

    def test_empty_run_writes_headers_only(self, tmp_path):
        write_report(RunReport(config={}), tmp_path)
        assert (tmp_path / "results.csv").read_text().count("\n") == 1
        assert (tmp_path / "confusion.csv").read_text().count("\n") == 1
        assert (tmp_path / "bench.csv").read_text().count("\n") == 1

    def test_writes_are_deterministic(self, tmp_path):
        results = [make_result(i, fallback=(i % 5 == 0)) for i in range(12)]
        results.append(FrameError(frame_id="f999", stage="load", message="decode failed"))
        cm = ConfusionMatrix()
        for i in range(12):
            cm.add(LABEL_ORDER[i % 10], LABEL_ORDER[(i + 1) % 10])
        report = RunReport(config={"workers": 2}, results=results, confusion=cm)
        write_report(report, tmp_path / "a")
        write_report(report, tmp_path / "b")
        for name in ("results.csv", "confusion.csv", "bench.csv", "summary.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_error_rows_serialized(self, tmp_path):
        report = RunReport(
            config={},
            results=[FrameError(frame_id="f1", stage="load", message="bad file")],
        )
        write_report(report, tmp_path)
        text = (tmp_path / "results.csv").read_text()
        assert "load: bad file" in text

import hashlib
import json

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from main import cli
from nifti_io import read_labels, read_volume, write_volume
from schemas.reports import BIOMARKER_COLUMNS, CSV_COLUMNS, RunManifest
from volume.types import RawLabelVolume

from .conftest import SMALL_SPEC, cc_slab


def _digest(path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _json(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def seg(tmp_path):
    path = tmp_path / "seg.nii.gz"
    write_volume(cc_slab(), str(path))
    return path


def test_phantom_command(runner, tmp_path):
    spec = _json(tmp_path, "spec.json", {**SMALL_SPEC, "seed": 3})
    first, second = tmp_path / "a.nii.gz", tmp_path / "b.nii.gz"
    result = runner.invoke(cli, ["phantom", spec, str(first)])
    assert result.exit_code == 0, result.output
    assert len([line for line in result.stdout.splitlines() if line.strip()]) == 9
    runner.invoke(cli, ["phantom", spec, str(second)])
    assert _digest(first) == _digest(second)


def test_infeasible_phantom_exits_2(runner, tmp_path):
    spec = _json(tmp_path, "spec.json", {**SMALL_SPEC, "dims": [32, 32, 32]})
    result = runner.invoke(cli, ["phantom", spec, str(tmp_path / "p.nii.gz")])
    assert result.exit_code == 2


def test_invalid_config_exits_2(runner, tmp_path, seg):
    config = _json(tmp_path, "aug.json", {"p_augment": 2.0})
    result = runner.invoke(cli, ["augment", str(seg), str(tmp_path / "out.nii.gz"), "--config", config])
    assert result.exit_code == 2


def test_unreadable_volume_exits_4(runner, tmp_path):
    bad = tmp_path / "bad.nii"
    bad.write_bytes(b"not a volume")
    result = runner.invoke(cli, ["augment", str(bad), str(tmp_path / "out.nii"), "--no-conform"])
    assert result.exit_code == 4


def test_augment_without_augmentation_copies_labels(runner, tmp_path, seg):
    config = _json(tmp_path, "aug.json", {"p_augment": 0.0})
    out = tmp_path / "out.nii.gz"
    result = runner.invoke(cli, ["augment", str(seg), str(out), "--config", config, "--no-conform"])
    assert result.exit_code == 0, result.output
    np.testing.assert_array_equal(read_labels(str(out)).voxels, read_labels(str(seg)).voxels)


def test_augment_forced_agenesis_and_plan(runner, tmp_path, seg):
    weights = {kind: {"weight": 0.0} for kind in (
        "partial_agenesis", "cc_thinning", "cc_thickening", "cc_kink", "cortex_thickening",
        "cortex_thinning", "cortex_smoothing", "posterior_fossa_hypoplasia", "ventriculomegaly")}
    config = _json(tmp_path, "aug.json", {"p_augment": 1.0, **weights})
    plans = []
    for name in ("a", "b"):
        out, plan = tmp_path / f"{name}.nii.gz", tmp_path / f"{name}.json"
        result = runner.invoke(cli, ["augment", str(seg), str(out), "--config", config, "--seed", "7",
                                     "--plan-out", str(plan), "--no-conform"])
        assert result.exit_code == 0, result.output
        assert "CC         0" in result.stdout
        plans.append(plan.read_text())
    assert plans[0] == plans[1]
    assert json.loads(plans[0])["steps"][0]["kind"] == "complete_agenesis"


def test_augment_conforms_to_the_canvas(runner, tmp_path, seg):
    out = tmp_path / "out.nii.gz"
    config = _json(tmp_path, "aug.json", {"p_augment": 0.0})
    result = runner.invoke(cli, ["augment", str(seg), str(out), "--config", config])
    assert result.exit_code == 0, result.output
    vol = read_labels(str(out))
    assert vol.dims == (256, 256, 256) and vol.spacing == (0.5, 0.5, 0.5)


def _synth(runner, tmp_path, seg, name, workers, count=3):
    img_dir, lbl_dir = tmp_path / name / "img", tmp_path / name / "lbl"
    result = runner.invoke(cli, ["synth", str(seg), str(img_dir), str(lbl_dir), "--seed", "21",
                                 "--count", str(count), "--workers", str(workers), "--no-conform"])
    assert result.exit_code == 0, result.output
    return img_dir, lbl_dir


def test_synth_is_independent_of_worker_count(runner, tmp_path, seg):
    runs = {w: _synth(runner, tmp_path, seg, f"w{w}", w, count=8) for w in (1, 2, 8)}
    expected = [f"sample_{i:04d}.nii.gz" for i in range(8)]
    serial = runs[1]
    for workers in (2, 8):
        for a, b in zip(serial, runs[workers]):
            names = sorted(p.name for p in a.glob("sample_*.nii.gz"))
            assert names == expected
            for name in names:
                assert _digest(a / name) == _digest(b / name)

    manifest = RunManifest.model_validate_json((serial[0] / "manifest.json").read_text())
    assert manifest.count == 8 and manifest.master_seed == 21
    assert [s.index for s in manifest.samples] == list(range(8))
    assert len({s.seed for s in manifest.samples}) == 8
    for workers in (2, 8):
        other = RunManifest.model_validate_json((runs[workers][0] / "manifest.json").read_text())
        assert [s.seed for s in other.samples] == [s.seed for s in manifest.samples]
        assert other.config_hash == manifest.config_hash


def test_synth_labels_match_the_plan(runner, tmp_path, seg):
    img_dir, lbl_dir = _synth(runner, tmp_path, seg, "run", 1, count=2)
    manifest = RunManifest.model_validate_json((img_dir / "manifest.json").read_text())
    for sample in manifest.samples:
        image = read_volume(sample.image_path)
        assert image.voxels.dtype == np.float32
        if not sample.applied:
            np.testing.assert_array_equal(read_labels(sample.label_path).voxels, read_labels(str(seg)).voxels)


def test_synth_count_zero(runner, tmp_path, seg):
    img_dir, _ = _synth(runner, tmp_path, seg, "empty", 1, count=0)
    manifest = RunManifest.model_validate_json((img_dir / "manifest.json").read_text())
    assert manifest.samples == []


def test_synth_batch_file(runner, tmp_path, seg):
    batch = tmp_path / "batch.jsonl"
    batch.write_text(json.dumps({"input": str(seg)}) + "\n\n" + json.dumps({"input": str(seg)}) + "\n")
    result = runner.invoke(cli, ["synth", str(batch), str(tmp_path / "i"), str(tmp_path / "l"),
                                 "--count", "1", "--no-conform"])
    assert result.exit_code == 0, result.output
    bad = tmp_path / "bad.jsonl"
    bad.write_text(json.dumps({"path": "x"}) + "\n")
    result = runner.invoke(cli, ["synth", str(bad), str(tmp_path / "i"), str(tmp_path / "l")])
    assert result.exit_code == 2


def test_evaluate_identity_csv(runner, tmp_path, seg):
    out = tmp_path / "report.csv"
    result = runner.invoke(cli, ["evaluate", str(seg), str(seg), "--classes", "1,3,8", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert result.stdout.startswith("gDSC 1.0000")
    frame = pd.read_csv(out, dtype={"class_code": str})
    assert list(frame.columns) == CSV_COLUMNS
    assert list(frame["class_code"]) == ["1", "3", "8", "all"]
    assert (frame["dice"] == 1.0).all()


def test_evaluate_merge_drops_cc_row(runner, tmp_path, seg):
    out = tmp_path / "report.json"
    result = runner.invoke(cli, ["evaluate", str(seg), str(seg), "--merge-cc-wm", "--out", str(out)])
    assert result.exit_code == 0, result.output
    report = json.loads(out.read_text())
    assert 8 not in report["classes"]


def test_evaluate_grid_mismatch_exits_5(runner, tmp_path, seg):
    other = tmp_path / "other.nii.gz"
    write_volume(cc_slab(shape=(12, 20, 13)), str(other))
    result = runner.invoke(cli, ["evaluate", str(seg), str(other)])
    assert result.exit_code == 5


def test_biomarker_and_growth_fit(runner, tmp_path, seg):
    curve = _json(tmp_path, "curve.json", {"kind": "quadratic", "coefficients": [-14.0, 1.8, -0.01],
                                           "ga_range": [20, 36], "source": "synthetic"})
    tables = []
    for i, ga in enumerate((22.0, 27.0, 31.0, 35.0)):
        out = tmp_path / f"bio{i}.csv"
        args = ["biomarker", str(seg), "--ga", str(ga), "--curve", curve, "--gt", str(seg), "--out", str(out)]
        result = runner.invoke(cli, args)
        assert result.exit_code == 0, result.output
        tables.append(str(out))
    row = pd.read_csv(tables[0])
    assert list(row.columns) == BIOMARKER_COLUMNS
    assert row["length_mm"][0] == 9.0 and row["delta_length_mm"][0] == 0.0

    fit = tmp_path / "fit.json"
    result = runner.invoke(cli, ["fit-growth", *tables, "--column", "length_mm", "--out", str(fit)])
    assert result.exit_code == 0, result.output
    assert json.loads(fit.read_text())["n_points"] == 4


def test_biomarker_ga_outside_curve_exits_2(runner, tmp_path, seg):
    curve = _json(tmp_path, "curve.json", {"kind": "quadratic", "coefficients": [0, 1, 0], "ga_range": [20, 36]})
    result = runner.invoke(cli, ["biomarker", str(seg), "--ga", "40", "--curve", curve])
    assert result.exit_code == 2


def test_biomarker_without_curve(runner, tmp_path, seg):
    out = tmp_path / "bio.csv"
    result = runner.invoke(cli, ["biomarker", str(seg), "--ga", "30", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert pd.isna(pd.read_csv(out)["delta_growth_mm"][0])


def test_harmonize(runner, tmp_path):
    raw = tmp_path / "drawem.nii.gz"
    write_volume(RawLabelVolume(voxels=np.arange(11, dtype=np.uint8).reshape(11, 1, 1)), str(raw))
    out = tmp_path / "feta.nii.gz"
    result = runner.invoke(cli, ["harmonize", str(raw), str(out)])
    assert result.exit_code == 0, result.output
    assert list(read_labels(str(out)).voxels.ravel()) == [0, 1, 2, 3, 0, 4, 5, 6, 7, 3, 8]

    bad = tmp_path / "unknown.nii.gz"
    write_volume(RawLabelVolume(voxels=np.full((2, 2, 2), 40, dtype=np.uint8)), str(bad))
    result = runner.invoke(cli, ["harmonize", str(bad), str(out)])
    assert result.exit_code == 6


def test_summarize(runner, tmp_path, seg):
    reports = []
    for name in ("a", "b"):
        out = tmp_path / f"{name}.csv"
        runner.invoke(cli, ["evaluate", str(seg), str(seg), "--subject", name, "--out", str(out)])
        reports.append(str(out))
    summary = tmp_path / "summary.json"
    result = runner.invoke(cli, ["summarize", *reports, "--out", str(summary)])
    assert result.exit_code == 0, result.output
    payload = json.loads(summary.read_text())
    assert payload["subjects"] == 2
    wm = next(r for r in payload["rows"] if r["class_name"] == "WM")
    assert wm["dice"]["mean"] == 1.0 and wm["dice"]["n"] == 2


def test_harmonize_identity_keeps_bytes(runner, tmp_path, seg):
    out = tmp_path / "same.nii.gz"
    result = runner.invoke(cli, ["harmonize", str(seg), str(out), "--map", "identity"])
    assert result.exit_code == 0, result.output
    assert _digest(out) == _digest(seg)


@pytest.mark.parametrize("classes", ["0,1", "9", ",", "1,x"])
def test_evaluate_bad_classes_exit_2(runner, seg, classes):
    result = runner.invoke(cli, ["evaluate", str(seg), str(seg), "--classes", classes])
    assert result.exit_code == 2
    assert "error:" in result.stderr


def test_evaluate_merge_leaving_no_classes_exits_2(runner, seg):
    result = runner.invoke(cli, ["evaluate", str(seg), str(seg), "--classes", "8", "--merge-cc-wm"])
    assert result.exit_code == 2


def test_phantom_to_evaluation_on_the_canvas(runner, tmp_path):
    spec = _json(tmp_path, "spec.json", SMALL_SPEC)
    phantom_path, augmented = tmp_path / "phantom.nii.gz", tmp_path / "augmented.nii.gz"
    img_dir, lbl_dir = tmp_path / "img", tmp_path / "lbl"

    steps = [
        ["phantom", spec, str(phantom_path)],
        ["augment", str(phantom_path), str(augmented), "--seed", "4"],
        ["synth", str(augmented), str(img_dir), str(lbl_dir), "--seed", "4", "--count", "1"],
        ["evaluate", str(augmented), str(lbl_dir / "sample_0000.nii.gz"), "--out", str(tmp_path / "r.json")],
    ]
    for args in steps:
        result = runner.invoke(cli, args)
        assert result.exit_code == 0, (args[0], result.output)

    image = read_volume(str(img_dir / "sample_0000.nii.gz"))
    assert image.dims == (256, 256, 256) and image.spacing == (0.5, 0.5, 0.5)
    assert image.voxels.dtype == np.float32
    assert 0.0 <= float(image.voxels.min()) and float(image.voxels.max()) <= 1.0
    assert json.loads((tmp_path / "r.json").read_text())["summary"]["gdsc"] > 0.0

import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fdbseg.evaluation import (DatabaseReport, EvalResult, error_rate, evaluate_database,
                               read_report_csv, write_report)
from fdbseg.params import FdbParams
from helpers import make_constant_database, save_gray, save_mask
from oracles import error_reference, whorl_image


def test_error_rate_examples():
    a = np.zeros((10, 10), bool)
    a[:5] = True
    assert error_rate(a, a).err == 0
    assert error_rate(a, ~a).err == 1
    truth = np.zeros((10, 10), bool)
    truth[0, :5] = True                 # missed foreground: 5
    est = np.zeros((10, 10), bool)
    est[9, :3] = True                   # missed background: 3
    r = error_rate(est, truth, "x")
    assert (r.missed_foreground, r.missed_background) == (5, 3)
    assert r.err == pytest.approx(0.08)
    assert (r.width, r.height, r.image_id) == (10, 10, "x")


def test_error_rate_shape_mismatch():
    with pytest.raises(ValueError):
        error_rate(np.zeros((3, 4), bool), np.zeros((4, 3), bool))


def test_error_rate_matches_reference(rng):
    for _ in range(10):
        est, truth = rng.random((2, 23, 31)) < 0.5
        assert error_rate(est, truth).err == error_reference(est, truth)


masks = st.integers(1, 12).flatmap(lambda h: st.integers(1, 12).flatmap(lambda w: arrays(bool, (h, w))))


@settings(max_examples=100, deadline=None)
@given(a=masks, data=st.data())
def test_error_rate_properties(a, data):
    b = data.draw(arrays(bool, a.shape))
    r = error_rate(a, b)
    rc = error_rate(~a, ~b)
    assert (r.missed_foreground, r.missed_background) == (rc.missed_background, rc.missed_foreground)
    assert r.err == rc.err
    assert error_rate(a, a).err == 0 and error_rate(a, ~a).err == 1
    assert 0 <= r.err <= 1


def test_evaluate_constant_database(tmp_path):
    images, truth = make_constant_database(tmp_path)
    report = evaluate_database(images, truth, FdbParams())
    assert [r.image_id for r in report.per_image] == ["img_0", "img_1", "img_2"]
    assert [r.err for r in report.per_image] == [0.0, 0.08, 0.02]
    assert report.mean_err == pytest.approx(0.1 / 3)
    assert not report.empty and report.warnings == 0


def test_evaluate_empty_directory(tmp_path):
    (tmp_path / "img").mkdir()
    (tmp_path / "gt").mkdir()
    report = evaluate_database(tmp_path / "img", tmp_path / "gt")
    assert report.empty and report.per_image == []
    assert math.isnan(report.mean_err)
    assert report.warnings > 0


def test_missing_and_unreadable_masks_are_excluded(tmp_path):
    images, truth = make_constant_database(tmp_path)
    save_gray(images / "orphan.png", np.full((50, 50), 90.0))
    save_gray(images / "broken.png", np.full((50, 50), 90.0))
    (truth / "broken.png").write_bytes(b"not an image")
    report = evaluate_database(images, truth)
    assert len(report.per_image) == 3
    assert sorted(i for i, _ in report.failures) == ["broken", "orphan"]
    assert report.warnings == 2
    assert report.mean_err == pytest.approx(0.1 / 3)


def test_truth_pattern(tmp_path):
    (tmp_path / "img").mkdir()
    (tmp_path / "gt").mkdir()
    save_gray(tmp_path / "img" / "1_1.tif", np.full((40, 40), 50.0))
    save_mask(tmp_path / "gt" / "1_1_seg.bmp", np.ones((40, 40), bool))
    report = evaluate_database(tmp_path / "img", tmp_path / "gt", truth_pattern="{stem}_seg.bmp")
    assert report.per_image[0].err == 1.0


def test_evaluate_whorl_and_parallel_equivalence(tmp_path):
    (tmp_path / "img").mkdir()
    (tmp_path / "gt").mkdir()
    for seed in range(3):
        img, disk = whorl_image(seed=seed, size=160, radius=55)
        save_gray(tmp_path / "img" / f"w{seed}.pgm", img)
        save_mask(tmp_path / "gt" / f"w{seed}.png", disk)
    serial = evaluate_database(tmp_path / "img", tmp_path / "gt")
    parallel = evaluate_database(tmp_path / "img", tmp_path / "gt", workers=2)
    assert serial.per_image == parallel.per_image
    assert serial.mean_err == parallel.mean_err < 0.1


def _report(errs):
    results = [EvalResult(f"im{i}", e, i, 2 * i, 10, 10) for i, e in enumerate(errs)]
    return DatabaseReport("db", results, FdbParams())


def test_write_report_single_image(tmp_path):
    out = tmp_path / "r.csv"
    write_report(_report([0.08]), out)
    lines = out.read_text().splitlines()
    assert lines == ["image_id,err,Mf,Mb", f"im0,{100 * 0.08!r},0,0", f"__mean__,{100 * 0.08!r},0,0"]


def test_write_report_empty(tmp_path):
    out = tmp_path / "r.csv"
    write_report(_report([]), out)
    assert out.read_text().splitlines() == ["image_id,err,Mf,Mb", "__mean__,NA,0,0"]


def test_report_roundtrip_and_stability(tmp_path, rng):
    report = _report(list(rng.uniform(0, 0.2, 25)))
    write_report(report, tmp_path / "a.csv")
    errs, mean = read_report_csv(tmp_path / "a.csv")
    assert math.fsum(sorted(errs.values())) / len(errs) == pytest.approx(report.mean_err, abs=1e-15)
    assert mean == pytest.approx(report.mean_err, abs=1e-15)
    shuffled = DatabaseReport("db", report.per_image[::-1], report.params)
    write_report(shuffled, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert shuffled.mean_err == report.mean_err


def test_report_lists_failures(tmp_path):
    report = _report([0.1])
    report.failures.append(("lost", "missing ground truth"))
    write_report(report, tmp_path / "r.csv")
    with open(tmp_path / "r.csv") as fh:
        rows = list(csv.reader(fh))
    assert ["lost", "NA", "NA", "NA"] in rows
    assert rows[-1][0] == "__mean__"


def test_write_report_unwritable(tmp_path):
    with pytest.raises(OSError):
        write_report(_report([0.1]), tmp_path / "missing" / "r.csv")

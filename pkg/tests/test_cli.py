import subprocess
import sys

import numpy as np
import pytest

from fdbseg import config as cfg
from fdbseg.cli import main
from fdbseg.evaluation import read_report_csv
from fdbseg.imageio import read_gray, read_mask
from fdbseg.params import FdbParams
from fdbseg.segmentation import convex_hull_mask
from helpers import make_constant_database, save_gray, save_mask
from oracles import whorl_image


@pytest.fixture(scope="module")
def whorl_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("img") / "whorl.pgm"
    img, _ = whorl_image(seed=3)
    save_gray(path, img)
    return path


def test_segment_writes_convex_mask(whorl_file, tmp_path):
    out = tmp_path / "mask.png"
    feature = tmp_path / "feature.png"
    assert main(["segment", str(whorl_file), "--out", str(out), "--dump-feature", str(feature)]) == 0
    mask = read_mask(out)
    assert mask.shape == (300, 300)
    assert mask.any()
    np.testing.assert_array_equal(convex_hull_mask(mask), mask)
    assert read_gray(feature).shape == (300, 300)
    assert set(np.unique(read_gray(out))) <= {0.0, 255.0}


def test_segment_constant_image(tmp_path):
    src = tmp_path / "flat.png"
    save_gray(src, np.full((300, 300), 180.0))
    assert main(["segment", str(src), "--out", str(tmp_path / "m.png")]) == 0
    mask = read_mask(tmp_path / "m.png")
    assert mask.shape == (300, 300) and not mask.any()


def test_segment_with_resize_keeps_dimensions(whorl_file, tmp_path):
    out = tmp_path / "m.png"
    assert main(["segment", str(whorl_file), "--out", str(out), "--resize", "0.8"]) == 0
    assert read_mask(out).shape == (300, 300)


def test_segment_errors(tmp_path, whorl_file, capsys):
    assert main(["segment", str(tmp_path / "nope.png"), "--out", str(tmp_path / "m.png")]) == 2
    assert "error" in capsys.readouterr().err
    assert main(["segment", str(whorl_file), "--out", str(tmp_path / "no" / "m.png")]) == 2
    assert main(["segment", str(whorl_file), "--out", str(tmp_path / "m.png"), "--params", "C=-1"]) == 1
    assert main(["segment", str(whorl_file), "--out", str(tmp_path / "m.png"), "--params", "foo=1"]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["segment"])
    assert exc.value.code == 1


def test_evaluate_reports_mean(tmp_path, capsys):
    images, truth = make_constant_database(tmp_path)
    out = tmp_path / "report.csv"
    assert main(["evaluate", str(images), str(truth), "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    _, mean = read_report_csv(out)
    assert f"{100 * mean:.2f}" in printed
    assert "3.33" in printed


def test_evaluate_empty_dir(tmp_path, capsys):
    (tmp_path / "i").mkdir()
    (tmp_path / "g").mkdir()
    assert main(["evaluate", str(tmp_path / "i"), str(tmp_path / "g"), "--out", str(tmp_path / "r.csv")]) == 0
    printed = capsys.readouterr().out
    assert "NA" in printed and "(1 warnings)" in printed
    assert (tmp_path / "r.csv").read_text().splitlines()[-1] == "__mean__,NA,0,0"


def test_evaluate_workers_byte_identical(tmp_path):
    (tmp_path / "i").mkdir()
    (tmp_path / "g").mkdir()
    for seed in range(3):
        img, disk = whorl_image(seed=seed, size=128, radius=45)
        save_gray(tmp_path / "i" / f"{seed}.png", img)
        save_mask(tmp_path / "g" / f"{seed}_gt.png", disk)
    base = ["evaluate", str(tmp_path / "i"), str(tmp_path / "g"), "--params", "truth_pattern={stem}_gt.png"]
    assert main(base + ["--out", str(tmp_path / "a.csv")]) == 0
    assert main(base + ["--out", str(tmp_path / "b.csv"), "--workers", "3"]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_config_file_and_override_precedence(tmp_path, whorl_file):
    conf = tmp_path / "db.cfg"
    conf.write_text("# trained values\nC = 0.07\ngamma = 2\nt = 5\n")
    settings = cfg.resolve(cfg.read_config(conf))
    assert settings.params == FdbParams(C=0.07, gamma=2, t=5.0)
    settings = cfg.resolve({**cfg.read_config(conf), **cfg.parse_pairs(["C=0.03"])})
    assert settings.params.C == 0.03 and settings.params.gamma == 2
    assert main(["segment", str(whorl_file), "--config", str(conf), "--out", str(tmp_path / "m.png")]) == 0


def test_config_roundtrip(tmp_path):
    settings = cfg.RunSettings(FdbParams(C=0.04, gamma=3, t=7.0), "{stem}_seg.png", 1.25)
    cfg.write_config(settings, tmp_path / "p.cfg")
    assert cfg.resolve(cfg.read_config(tmp_path / "p.cfg")) == settings


def test_config_errors():
    with pytest.raises(ValueError):
        cfg.parse_pairs(["no equals sign"])
    with pytest.raises(KeyError):
        cfg.resolve({"omega": "1"})
    with pytest.raises(ValueError):
        cfg.resolve({"n": "2.5"})
    with pytest.raises(ValueError):
        cfg.resolve({"resize": "0"})


def test_train_writes_params_and_scores(tmp_path, capsys):
    (tmp_path / "i").mkdir()
    (tmp_path / "g").mkdir()
    img, disk = whorl_image(seed=0, size=128, radius=45)
    save_gray(tmp_path / "i" / "a.png", img)
    save_mask(tmp_path / "g" / "a.png", disk)
    out = tmp_path / "trained"
    assert main(["train", str(tmp_path / "i"), str(tmp_path / "g"), "--out", str(out),
                 "--C-values", "0.04,0.06", "--gamma-values", "1", "--t-values", "4,5"]) == 0
    assert "selected" in capsys.readouterr().out
    settings = cfg.resolve(cfg.read_config(out / "params.cfg"))
    assert settings.params.C in (0.04, 0.06)
    lines = (out / "scores.csv").read_text().splitlines()
    assert lines[0] == "C,gamma,t,mean_err" and len(lines) == 5


def test_train_empty_set(tmp_path):
    (tmp_path / "i").mkdir()
    assert main(["train", str(tmp_path / "i"), str(tmp_path), "--out", str(tmp_path / "o"),
                 "--C-values", "0.1"]) == 3


def test_filters_dump(tmp_path):
    out = tmp_path / "filters"
    assert main(["filters", "--size", "64", "48", "--out", str(out)]) == 0
    files = sorted(out.iterdir())
    assert len(files) == 18
    for l in range(16):
        plane = read_gray(out / f"dhbb_{l:02d}.png")
        assert plane.shape == (48, 64)
        assert plane[24, 32] == 0
        assert plane.max() == 255
    hilbert = read_gray(out / "hilbert_00.png")
    assert np.argmax(hilbert.sum(axis=1)) == 24
    assert read_gray(out / "butterworth.png")[24, 32] == 0


def test_filters_count_follows_L(tmp_path):
    assert main(["filters", "--size", "32", "32", "--out", str(tmp_path), "--params", "L=4", "n=4"]) == 0
    assert len(list(tmp_path.iterdir())) == 6


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "fdbseg.cli", "filters", "--size", "16", "16",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run([sys.executable, "-m", "fdbseg.cli", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 1

"""Command-line interface: ``fdbseg {segment,evaluate,train,filters}``.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from fdbseg import config as cfg
from fdbseg.evaluation import evaluate_database, segment_image, write_report
from fdbseg.filterbank import build_filter_bank, butterworth_2d_spectrum, directional_spectra
from fdbseg.imageio import magnitude_to_uint8, read_gray, to_uint8, write_gray, write_mask
from fdbseg.texture import SHRINKAGE_KINDS, SYNTHESIS_KINDS
from fdbseg.training import ParamGrid, grid_search, write_scores

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_INVARIANT = 0, 1, 2, 3

log = logging.getLogger("fdbseg")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value parameter file")
    common.add_argument("--params", nargs="*", default=[], metavar="KEY=VALUE",
                        help="inline parameter overrides (take precedence over --config)")
    common.add_argument("--resize", type=float, help="uniform rescale factor before filtering")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--synthesis", choices=SYNTHESIS_KINDS, default="factorized")
    common.add_argument("--shrinkage", choices=SHRINKAGE_KINDS, default="soft")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="fdbseg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("segment", parents=[common], help="segment one image")
    p.add_argument("image", type=Path)
    p.add_argument("--out", type=Path, required=True, help="mask image to write")
    p.add_argument("--dump-feature", type=Path, help="also write the feature image")

    p = sub.add_parser("evaluate", parents=[common], help="score a database against ground truth")
    p.add_argument("image_dir", type=Path)
    p.add_argument("truth_dir", type=Path)
    p.add_argument("--out", type=Path, required=True, help="report CSV")

    p = sub.add_parser("train", parents=[common], help="grid-search C, gamma and t")
    p.add_argument("image_dir", type=Path)
    p.add_argument("truth_dir", type=Path)
    p.add_argument("--out", type=Path, required=True,
                   help="output directory for params.cfg and scores.csv")
    p.add_argument("--C-values", type=_float_list)
    p.add_argument("--gamma-values", type=_int_list)
    p.add_argument("--t-values", type=_float_list)

    p = sub.add_parser("filters", parents=[common], help="dump filter magnitude images")
    p.add_argument("--size", type=int, nargs=2, default=(256, 256), metavar=("WIDTH", "HEIGHT"))
    p.add_argument("--out", type=Path, required=True, help="output directory")
    return parser


def _settings(args) -> cfg.RunSettings:
    values = {}
    if args.config is not None:
        values.update(cfg.read_config(args.config))
    try:
        values.update(cfg.parse_pairs(args.params, "--params"))
    except ValueError as exc:
        raise UsageError(str(exc))
    if args.resize is not None:
        values["resize"] = str(args.resize)
    try:
        return cfg.resolve(values)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc).strip("'\""))


def cmd_segment(args, settings: cfg.RunSettings) -> int:
    img = read_gray(args.image)
    mask, feature = segment_image(img, settings.params, settings.resize,
                                  synthesis=args.synthesis, shrinkage=args.shrinkage,
                                  return_feature=True)
    if mask.shape != img.shape:
        log.error("mask shape %s differs from image shape %s", mask.shape, img.shape)
        return EXIT_INVARIANT
    write_mask(args.out, mask)
    if args.dump_feature is not None:
        write_gray(args.dump_feature, to_uint8(feature))
    return EXIT_OK


def cmd_evaluate(args, settings: cfg.RunSettings) -> int:
    if not args.image_dir.is_dir():
        raise FileNotFoundError(f"image directory not found: {args.image_dir}")
    report = evaluate_database(args.image_dir, args.truth_dir, settings.params,
                               truth_pattern=settings.truth_pattern,
                               resize_factor=settings.resize, synthesis=args.synthesis,
                               shrinkage=args.shrinkage, workers=args.workers)
    write_report(report, args.out)
    mean = "NA" if math.isnan(report.mean_err) else f"{100.0 * report.mean_err:.2f}"
    print(f"{report.database_id}: mean err {mean} % over {len(report.per_image)} images "
          f"({report.warnings} warnings)")
    return EXIT_OK


def cmd_train(args, settings: cfg.RunSettings) -> int:
    defaults = ParamGrid()
    try:
        grid = ParamGrid(args.C_values or defaults.C_values,
                         args.gamma_values or defaults.gamma_values,
                         args.t_values or defaults.t_values)
    except ValueError as exc:
        raise UsageError(str(exc))
    result = grid_search(args.image_dir, args.truth_dir, grid, settings.params,
                         truth_pattern=settings.truth_pattern, resize_factor=settings.resize,
                         workers=args.workers)
    args.out.mkdir(parents=True, exist_ok=True)
    cfg.write_config(cfg.RunSettings(result.params, settings.truth_pattern, settings.resize),
                     args.out / "params.cfg")
    write_scores(result.scores, args.out / "scores.csv")
    p = result.params
    print(f"selected C={p.C} gamma={p.gamma} t={p.t}: "
          f"mean err {100.0 * result.report.mean_err:.2f} %")
    return EXIT_OK


def cmd_filters(args, settings: cfg.RunSettings) -> int:
    width, height = args.size
    if width < 1 or height < 1:
        raise UsageError("--size needs positive dimensions")
    params = settings.params
    args.out.mkdir(parents=True, exist_ok=True)
    bank = build_filter_bank(width, height, params.bandpass, params.directional)
    # shift so that the zero frequency sits at (height // 2, width // 2)
    for l, plane in enumerate(bank.spectra):
        write_gray(args.out / f"dhbb_{l:02d}.png", magnitude_to_uint8(np.fft.fftshift(plane)))
    write_gray(args.out / "butterworth.png",
               magnitude_to_uint8(np.fft.fftshift(butterworth_2d_spectrum(width, height, params.bandpass))))
    hilbert = directional_spectra(width, height, params.directional)[0]
    write_gray(args.out / "hilbert_00.png", magnitude_to_uint8(np.fft.fftshift(hilbert)))
    return EXIT_OK


COMMANDS = {"segment": cmd_segment, "evaluate": cmd_evaluate,
            "train": cmd_train, "filters": cmd_filters}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.workers < 1:
        print("fdbseg: error: --workers must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        settings = _settings(args)
        return COMMANDS[args.command](args, settings)
    except UsageError as exc:
        print(f"fdbseg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"fdbseg: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"fdbseg: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())

"""Per-image error rate and benchmark runs over image/ground-truth folders."""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from fdbseg.filterbank import FilterBank, build_filter_bank
from fdbseg.imageio import list_images, read_gray, read_mask, resize, resize_mask
from fdbseg.params import FdbParams
from fdbseg.segmentation import segment

log = logging.getLogger(__name__)

DEFAULT_TRUTH_PATTERN = "{stem}.png"
AGGREGATE_ID = "__mean__"


@dataclass(frozen=True)
class EvalResult:
    image_id: str
    err: float
    missed_foreground: int
    missed_background: int
    width: int
    height: int


@dataclass
class DatabaseReport:
    database_id: str
    per_image: list[EvalResult]
    params: FdbParams
    failures: list[tuple[str, str]] = field(default_factory=list)
    warnings: int = 0

    @property
    def empty(self) -> bool:
        return not self.per_image

    @property
    def mean_err(self) -> float:
        """Mean error over scored images, ``nan`` when there are none."""
        if not self.per_image:
            return math.nan
        ordered = sorted(self.per_image, key=lambda r: r.image_id)
        return math.fsum(r.err for r in ordered) / len(ordered)


def error_rate(estimated, truth, image_id: str = "") -> EvalResult:
    """Fraction of pixels whose label disagrees with the ground truth."""
    est = np.asarray(estimated, dtype=bool)
    gt = np.asarray(truth, dtype=bool)
    if est.shape != gt.shape:
        raise ValueError(f"mask shapes differ: {est.shape} vs {gt.shape}")
    mf = int(np.count_nonzero(gt & ~est))
    mb = int(np.count_nonzero(~gt & est))
    h, w = gt.shape
    return EvalResult(image_id, (mf + mb) / (w * h), mf, mb, w, h)


class BankCache:
    """Filter banks keyed by grid size and the filter parameters."""

    def __init__(self):
        self._banks: dict = {}

    def get(self, shape, params: FdbParams) -> FilterBank:
        key = (tuple(shape), params.bandpass, params.directional)
        bank = self._banks.get(key)
        if bank is None:
            bank = build_filter_bank(shape[1], shape[0], params.bandpass, params.directional)
            self._banks[key] = bank
        return bank


_worker_cache = BankCache()


def segment_image(img, params: FdbParams, resize_factor: float = 1.0,
                  cache: BankCache | None = None, synthesis: str = "factorized",
                  shrinkage: str = "soft", return_feature: bool = False):
    """Segment with optional rescaling; the mask always matches ``img``."""
    cache = cache or _worker_cache
    work = resize(img, resize_factor) if resize_factor != 1.0 else np.asarray(img, dtype=np.float64)
    m = params.pad_margin
    bank = cache.get((work.shape[0] + 2 * m, work.shape[1] + 2 * m), params)
    mask, feature = segment(work, params, bank, synthesis=synthesis, shrinkage=shrinkage,
                            return_feature=True)
    mask = resize_mask(mask, np.shape(img))
    return (mask, feature) if return_feature else mask


def truth_path(image: Path, truth_dir, pattern: str = DEFAULT_TRUTH_PATTERN) -> Path:
    return Path(truth_dir) / pattern.format(stem=image.stem, name=image.name, suffix=image.suffix)


def _evaluate_one(task):
    image, truth, params, resize_factor, synthesis, shrinkage = task
    try:
        if not truth.is_file():
            return image.stem, f"missing ground truth {truth}"
        img = read_gray(image)
        gt = read_mask(truth)
        if gt.shape != img.shape:
            return image.stem, f"ground truth shape {gt.shape} differs from image {img.shape}"
        mask = segment_image(img, params, resize_factor, synthesis=synthesis, shrinkage=shrinkage)
        return error_rate(mask, gt, image.stem)
    except (OSError, ValueError) as exc:
        return image.stem, f"{type(exc).__name__}: {exc}"


def evaluate_database(image_dir, truth_dir, params: FdbParams | None = None, *,
                      truth_pattern: str = DEFAULT_TRUTH_PATTERN, resize_factor: float = 1.0,
                      synthesis: str = "factorized", shrinkage: str = "soft",
                      workers: int = 1, database_id: str | None = None) -> DatabaseReport:
    """Segment every image in ``image_dir`` and score it against ``truth_dir``.

    Images without a readable, same-sized mask are listed in ``failures`` and
    left out of the mean.
    """
    params = params or FdbParams()
    image_dir = Path(image_dir)
    images = list_images(image_dir)
    tasks = [(p, truth_path(p, truth_dir, truth_pattern), params, resize_factor, synthesis, shrinkage)
             for p in images]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_evaluate_one, tasks))
    else:
        outcomes = [_evaluate_one(t) for t in tasks]

    report = DatabaseReport(database_id or image_dir.name, [], params)
    for outcome in outcomes:
        if isinstance(outcome, EvalResult):
            report.per_image.append(outcome)
        else:
            report.failures.append(outcome)
            report.warnings += 1
            log.warning("%s: %s", *outcome)
    if not images:
        report.warnings += 1
        log.warning("no images found in %s", image_dir)
    report.per_image.sort(key=lambda r: r.image_id)
    return report


def _pct(value: float) -> str:
    return "NA" if math.isnan(value) else repr(float(100.0 * value))


def write_report(report: DatabaseReport, out) -> None:
    """CSV with errors in percent and a trailing ``__mean__`` row."""
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["image_id", "err", "Mf", "Mb"])
        for r in sorted(report.per_image, key=lambda r: r.image_id):
            writer.writerow([r.image_id, _pct(r.err), r.missed_foreground, r.missed_background])
        for image_id, _ in sorted(report.failures):
            writer.writerow([image_id, "NA", "NA", "NA"])
        writer.writerow([AGGREGATE_ID, _pct(report.mean_err),
                         sum(r.missed_foreground for r in report.per_image),
                         sum(r.missed_background for r in report.per_image)])


def read_report_csv(path) -> tuple[dict[str, float], float]:
    """Parse a report CSV into ``({image_id: err_fraction}, mean_fraction)``."""
    errs = {}
    mean = math.nan
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            value = math.nan if row["err"] == "NA" else float(row["err"]) / 100.0
            if row["image_id"] == AGGREGATE_ID:
                mean = value
            elif not math.isnan(value):
                errs[row["image_id"]] = value
    return errs, mean

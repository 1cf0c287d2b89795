"""Exhaustive grid search of (C, gamma, t) on a training set."""

from __future__ import annotations

import csv
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from fdbseg.evaluation import (DEFAULT_TRUTH_PATTERN, BankCache, DatabaseReport,
                               error_rate, truth_path)
from fdbseg.imageio import list_images, read_gray, read_mask, resize, resize_mask
from fdbseg.params import FdbParams
from fdbseg.segmentation import binarize, block_vote, convex_hull_mask, largest_component
from fdbseg.spectral import crop, mirror_pad
from fdbseg.texture import analyze, texture_from_coefficients


def _steps(start, stop, step):
    count = int(round((stop - start) / step)) + 1
    return tuple(round(start + i * step, 10) for i in range(count))


@dataclass(frozen=True)
class ParamGrid:
    # smallest axis-aligned box holding every published trained value
    C_values: tuple = _steps(0.01, 0.10, 0.01)
    gamma_values: tuple = (1, 2, 3, 4)
    t_values: tuple = (4.0, 5.0, 6.0, 7.0)

    def __post_init__(self):
        for name in ("C_values", "gamma_values", "t_values"):
            values = tuple(getattr(self, name))
            if not values:
                raise ValueError(f"{name} must not be empty")
            object.__setattr__(self, name, values)

    def cells(self):
        return itertools.product(sorted(set(self.C_values)), sorted(set(self.gamma_values)),
                                 sorted(set(self.t_values)))

    def __len__(self) -> int:
        return len(set(self.C_values)) * len(set(self.gamma_values)) * len(set(self.t_values))


class SearchResult(NamedTuple):
    params: FdbParams
    report: DatabaseReport
    scores: dict  # (C, gamma, t) -> mean err


def _score_image(task):
    """Per-cell results for one training image, keyed by (C, gamma, t)."""
    image, truth, grid, base, resize_factor = task
    img = read_gray(image)
    gt = read_mask(truth)
    if gt.shape != img.shape:
        raise ValueError(f"{image.name}: ground truth shape {gt.shape} differs from {img.shape}")
    work = resize(img, resize_factor) if resize_factor != 1.0 else img
    m = base.pad_margin
    padded = mirror_pad(work, m)
    reference = float(np.abs(work).max())
    cache = BankCache()
    results = {}
    for gamma in sorted(set(grid.gamma_values)):
        cell_params = base.replace(gamma=gamma)
        bank = cache.get(padded.shape, cell_params)
        coeffs = analyze(padded, bank)
        for C in sorted(set(grid.C_values)):
            feature = crop(texture_from_coefficients(coeffs, bank, C, reference=reference), m)
            binary = binarize(feature, C)
            for t in sorted(set(grid.t_values)):
                spec = base.replace(C=C, gamma=gamma, t=t).morphology
                mask = convex_hull_mask(largest_component(block_vote(binary, spec)))
                mask = resize_mask(mask, img.shape)
                results[(C, gamma, t)] = error_rate(mask, gt, image.stem)
    return results


def grid_search(train_images, train_truth, grid: ParamGrid | None = None,
                base: FdbParams | None = None, *, truth_pattern: str = DEFAULT_TRUTH_PATTERN,
                resize_factor: float = 1.0, workers: int = 1) -> SearchResult:
    """Evaluate every grid cell and return the one with the lowest mean error.

    Parameters outside (C, gamma, t) are taken from ``base``.  Ties are broken
    by the lexicographically smallest (C, gamma, t).  The full score table is
    returned alongside the winning parameters and its report.
    """
    grid = grid or ParamGrid()
    base = base or FdbParams()
    for C, gamma, t in grid.cells():
        base.replace(C=C, gamma=gamma, t=t)  # validates the cell
    images = [p for p in list_images(train_images)
              if truth_path(p, train_truth, truth_pattern).is_file()]
    if not images:
        raise ValueError(f"no training images with ground truth in {train_images}")
    tasks = [(p, truth_path(p, train_truth, truth_pattern), grid, base, resize_factor)
             for p in images]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_image = list(pool.map(_score_image, tasks))
    else:
        per_image = [_score_image(t) for t in tasks]

    scores = {}
    for cell in grid.cells():
        ordered = sorted((r[cell] for r in per_image), key=lambda r: r.image_id)
        scores[cell] = math.fsum(r.err for r in ordered) / len(ordered)
    best = min(scores, key=lambda cell: (scores[cell], cell))
    C, gamma, t = best
    params = base.replace(C=C, gamma=gamma, t=t)
    report = DatabaseReport(Path(train_images).name,
                            sorted((r[best] for r in per_image), key=lambda r: r.image_id),
                            params)
    return SearchResult(params, report, scores)


def write_scores(scores: dict, out) -> None:
    """Score table as CSV ``C,gamma,t,mean_err`` (percent), sorted by cell."""
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["C", "gamma", "t", "mean_err"])
        for (C, gamma, t) in sorted(scores):
            writer.writerow([repr(float(C)), int(gamma), repr(float(t)),
                             repr(float(100.0 * scores[(C, gamma, t)]))])

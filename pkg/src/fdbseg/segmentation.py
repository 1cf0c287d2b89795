"""From feature image to region of interest.

Masks are boolean arrays with ``True`` marking foreground.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from fdbseg.filterbank import FilterBank
from fdbseg.params import FdbParams
from fdbseg.texture import extract_texture


@dataclass(frozen=True)
class MorphologySpec:
    """Block-vote parameters.

    Each pixel looks at 3x3 cells of ``s x s`` pixels; a cell passes when it
    holds at least ``s**2 / t`` white pixels and the pixel becomes foreground
    when at least ``b`` cells pass.
    """

    s: int = 9
    t: float = 5.0
    b: int = 6

    def __post_init__(self):
        if int(self.s) != self.s or self.s < 1 or self.s % 2 == 0:
            raise ValueError(f"block size s must be a positive odd integer, got {self.s}")
        if not self.t > 0:
            raise ValueError(f"t must be positive, got {self.t}")
        if int(self.b) != self.b or not 1 <= self.b <= 9:
            raise ValueError(f"b must be an integer in [1, 9], got {self.b}")

    @property
    def count_threshold(self) -> float:
        return self.s * self.s / self.t


def binarize(feature, C: float) -> np.ndarray:
    """Foreground where the feature reaches ``C`` times its maximum.

    A feature image without any positive value gives an empty mask.
    """
    if C < 0:
        raise ValueError("C must be nonnegative")
    feature = np.asarray(feature, dtype=np.float64)
    peak = feature.max()
    if peak <= 0:
        return np.zeros(feature.shape, dtype=bool)
    return feature >= C * peak


def block_counts(binary, s: int) -> np.ndarray:
    """White-pixel count of the ``s x s`` block centered on every pixel.

    Pixels outside the mask count as black.  The result is padded by ``s``
    on each side so that the cells at offsets ``-s`` and ``+s`` can be read
    without bounds checks: ``counts[r + s + dr, c + s + dc]`` is the count
    of the block centered at ``(r + dr, c + dc)``.
    """
    binary = np.asarray(binary, dtype=bool)
    half = s // 2
    pad = s + half
    padded = np.pad(binary.astype(np.int64), pad)
    # summed-area table with a leading zero row/column
    sat = np.zeros((padded.shape[0] + 1, padded.shape[1] + 1), dtype=np.int64)
    sat[1:, 1:] = padded.cumsum(0).cumsum(1)
    h, w = binary.shape[0] + 2 * s, binary.shape[1] + 2 * s
    # block centered at padded index (i + half) spans [i, i + s)
    return sat[s:s + h, s:s + w] - sat[:h, s:s + w] - sat[s:s + h, :w] + sat[:h, :w]


def block_vote(binary, spec: MorphologySpec) -> np.ndarray:
    binary = np.asarray(binary, dtype=bool)
    s = int(spec.s)
    counts = block_counts(binary, s)
    passing = counts >= spec.count_threshold
    h, w = binary.shape
    votes = np.zeros((h, w), dtype=np.int64)
    for dr in (-s, 0, s):
        for dc in (-s, 0, s):
            votes += passing[s + dr:s + dr + h, s + dc:s + dc + w]
    return votes >= spec.b


def largest_component(binary) -> np.ndarray:
    """Keep the most populous 8-connected foreground component.

    Ties go to the component met first in raster order.
    """
    binary = np.asarray(binary, dtype=bool)
    labels, count = ndimage.label(binary, structure=np.ones((3, 3), dtype=int))
    if count == 0:
        return np.zeros_like(binary)
    sizes = np.bincount(labels.ravel())
    sizes[0] = 0
    return labels == int(np.argmax(sizes))


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_vertices(points) -> list[tuple[int, int]]:
    """Counter-clockwise hull of integer points (monotone chain).

    Collinear boundary points are dropped.  Returns one vertex for a single
    distinct point and two for a collinear set.
    """
    pts = sorted(set(map(tuple, np.asarray(points, dtype=np.int64).tolist())))
    if len(pts) <= 2:
        return pts
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return hull if len(hull) >= 2 else hull[:1]


def convex_hull_mask(binary) -> np.ndarray:
    """Fill every pixel whose center lies inside or on the hull of the foreground."""
    binary = np.asarray(binary, dtype=bool)
    out = np.zeros_like(binary)
    rows, cols = np.nonzero(binary)
    if rows.size == 0:
        return out
    # points as (x, y) = (column, row)
    hull = convex_hull_vertices(np.column_stack([cols, rows]))
    r0, r1 = rows.min(), rows.max() + 1
    c0, c1 = cols.min(), cols.max() + 1
    yy, xx = np.mgrid[r0:r1, c0:c1]
    inside = np.ones(yy.shape, dtype=bool)
    if len(hull) == 1:
        inside &= (xx == hull[0][0]) & (yy == hull[0][1])
    elif len(hull) == 2:
        (ax, ay), (bx, by) = hull
        # bounding box already clips to the segment
        inside &= (bx - ax) * (yy - ay) - (by - ay) * (xx - ax) == 0
    else:
        for (ax, ay), (bx, by) in zip(hull, hull[1:] + hull[:1]):
            inside &= (bx - ax) * (yy - ay) - (by - ay) * (xx - ax) >= 0
    out[r0:r1, c0:c1] = inside
    return out


def segment(img, params: FdbParams | None = None, bank: FilterBank | None = None,
            synthesis: str = "factorized", shrinkage: str = "soft",
            return_feature: bool = False):
    """Estimate the fingerprint region of interest of ``img``.

    Runs texture extraction, adaptive binarization, block-vote morphology,
    largest-component selection and convex hull filling.  With
    ``return_feature`` the feature image is returned as well.
    """
    params = params or FdbParams()
    feature = extract_texture(img, params, bank, synthesis=synthesis, shrinkage=shrinkage)
    mask = binarize(feature, params.C)
    mask = block_vote(mask, params.morphology)
    mask = largest_component(mask)
    mask = convex_hull_mask(mask)
    if return_feature:
        return mask, feature
    return mask

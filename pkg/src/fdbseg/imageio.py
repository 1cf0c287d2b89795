"""Grayscale image and mask files."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

IMAGE_SUFFIXES = (".pgm", ".pnm", ".png", ".bmp", ".tif", ".tiff")


def read_gray(path) -> np.ndarray:
    """Read an image as float64 gray levels; color images are converted to luminance."""
    with Image.open(path) as im:
        if im.mode not in ("L", "I", "I;16", "F"):
            im = im.convert("L")
        return np.asarray(im, dtype=np.float64)


def read_mask(path) -> np.ndarray:
    """Read a mask; gray level above 127 is foreground."""
    with Image.open(path) as im:
        if im.mode == "1":
            return np.asarray(im, dtype=bool)
        return np.asarray(im.convert("L"), dtype=np.uint8) > 127


def write_mask(path, mask) -> None:
    Image.fromarray(np.where(np.asarray(mask, dtype=bool), 255, 0).astype(np.uint8)).save(path)


def to_uint8(values) -> np.ndarray:
    """Linearly map ``[min, max]`` to ``[0, 255]`` (zero image for constant input)."""
    values = np.asarray(values, dtype=np.float64)
    lo, hi = values.min(), values.max()
    if hi <= lo:
        return np.zeros(values.shape, dtype=np.uint8)
    return np.round(255.0 * (values - lo) / (hi - lo)).astype(np.uint8)


def magnitude_to_uint8(values) -> np.ndarray:
    """Map magnitudes ``[0, max]`` to ``[0, 255]`` so that zero stays black."""
    mag = np.abs(np.asarray(values))
    peak = mag.max()
    if peak <= 0:
        return np.zeros(mag.shape, dtype=np.uint8)
    return np.round(255.0 * mag / peak).astype(np.uint8)


def write_gray(path, values) -> None:
    Image.fromarray(np.asarray(values, dtype=np.uint8)).save(path)


def list_images(directory) -> list[Path]:
    directory = Path(directory)
    return sorted(p for p in directory.iterdir()
                  if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES)


def resize(img, factor: float, resample=Image.BILINEAR) -> np.ndarray:
    """Uniformly rescale a gray image by ``factor`` (bilinear by default)."""
    img = np.asarray(img, dtype=np.float64)
    if factor == 1.0:
        return img.copy()
    h, w = img.shape
    size = (max(1, round(w * factor)), max(1, round(h * factor)))
    out = Image.fromarray(img.astype(np.float32), mode="F").resize(size, resample)
    return np.asarray(out, dtype=np.float64)


def resize_mask(mask, shape) -> np.ndarray:
    """Nearest-neighbour resize of a mask to ``shape = (height, width)``."""
    mask = np.asarray(mask, dtype=bool)
    if mask.shape == tuple(shape):
        return mask.copy()
    im = Image.fromarray(mask.astype(np.uint8) * 255).resize((shape[1], shape[0]), Image.NEAREST)
    return np.asarray(im) > 127

import numpy as np
from PIL import Image


def save_gray(path, values):
    Image.fromarray(np.clip(np.round(values), 0, 255).astype(np.uint8)).save(path)


def save_mask(path, mask):
    Image.fromarray(np.where(mask, 255, 0).astype(np.uint8)).save(path)


def truth_with_count(shape, count):
    mask = np.zeros(shape, bool)
    mask.ravel()[:count] = True
    return mask


def make_constant_database(root, fractions=(0.0, 0.08, 0.02), shape=(50, 50)):
    """Flat images (empty ROI) whose masks cover the given pixel fractions."""
    images, truth = root / "images", root / "truth"
    images.mkdir()
    truth.mkdir()
    n = shape[0] * shape[1]
    for i, frac in enumerate(fractions):
        save_gray(images / f"img_{i}.png", np.full(shape, 100.0 + i))
        save_mask(truth / f"img_{i}.png", truth_with_count(shape, round(frac * n)))
    return images, truth

"""Fourier transforms, frequency grids and boundary handling.

Images are 2D float arrays indexed ``[row, column]``.  The first frequency
coordinate ``omega1`` runs along the columns (horizontal axis ``x1``), the
second ``omega2`` along the rows.  Both are normalized angular frequencies in
``[-pi, pi)``, independently per axis.
"""

from __future__ import annotations

import numpy as np


def _as_image(img) -> np.ndarray:
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"expected a nonempty 2D image, got shape {arr.shape}")
    return arr


def forward_dft(img) -> np.ndarray:
    """Unnormalized 2D DFT of a real image."""
    return np.fft.fft2(_as_image(img))


def inverse_dft(spec) -> np.ndarray:
    """Inverse 2D DFT, keeping only the real part."""
    spec = np.asarray(spec)
    if spec.ndim < 2 or spec.size == 0:
        raise ValueError(f"expected a nonempty 2D spectrum, got shape {spec.shape}")
    return np.fft.ifft2(spec, axes=(-2, -1)).real


def frequency_grid(height: int, width: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(omega1, omega2)`` arrays of shape ``(height, width)``.

    Bin ``k`` of an axis of length ``N`` maps to ``2*pi*k/N`` folded into
    ``[-pi, pi)``, matching the layout of :func:`numpy.fft.fft2`.
    """
    if height < 1 or width < 1:
        raise ValueError("grid dimensions must be positive")
    w1 = 2.0 * np.pi * np.fft.fftfreq(width)
    w2 = 2.0 * np.pi * np.fft.fftfreq(height)
    omega2, omega1 = np.meshgrid(w2, w1, indexing="ij")
    return omega1, omega2


def mirror_pad(img, margin: int) -> np.ndarray:
    """Pad by whole-sample reflection: ``..., f[2], f[1], f[0], f[1], f[2], ...``."""
    arr = _as_image(img)
    margin = int(margin)
    if margin < 0:
        raise ValueError("margin must be nonnegative")
    if margin >= min(arr.shape):
        raise ValueError(
            f"margin {margin} too large for image of shape {arr.shape}; "
            "reflection must stay inside the source")
    if margin == 0:
        return arr.copy()
    return np.pad(arr, margin, mode="reflect")


def crop(img, margin: int) -> np.ndarray:
    """Remove ``margin`` pixels from every side."""
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2D image, got shape {arr.shape}")
    margin = int(margin)
    if margin < 0 or 2 * margin >= min(arr.shape):
        raise ValueError(f"margin {margin} too large for image of shape {arr.shape}")
    if margin == 0:
        return arr.copy()
    return arr[margin:-margin, margin:-margin].copy()

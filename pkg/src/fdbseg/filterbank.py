"""Butterworth bandpass, directional Hilbert responses and the DHBB bank.

The 1D Butterworth bandpass ``b(w)`` is factorized into a causal transfer
function ``B(jw)`` with ``|B(jw)|**2 == b(w)**2`` and then discretized with
the bilinear substitution ``jw -> 2 (z - 1) / (z + 1)``.  The 2D filter uses
the 1D response along whichever frequency axis dominates, and the DHBB filter
of direction ``l`` multiplies it by the ``n``-th power of the directional
Hilbert response ``-j cos(angle(w) - pi l / L)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fdbseg.spectral import frequency_grid


@dataclass(frozen=True)
class BandpassSpec:
    """Cutoffs (radians/sample) and order of the Butterworth bandpass."""

    omega_low: float = 0.3
    omega_high: float = 1.0
    gamma: int = 1

    def __post_init__(self):
        if not 0.0 < self.omega_low < self.omega_high <= np.pi:
            raise ValueError(
                f"need 0 < omega_low < omega_high <= pi, got "
                f"({self.omega_low}, {self.omega_high})")
        if int(self.gamma) != self.gamma or self.gamma < 1:
            raise ValueError(f"gamma must be a positive integer, got {self.gamma}")

    @property
    def bandwidth(self) -> float:
        return self.omega_high - self.omega_low

    @property
    def center(self) -> float:
        """Geometric mean of the cutoffs, where the ideal response peaks."""
        return float(np.sqrt(self.omega_low * self.omega_high))

    def poles(self) -> np.ndarray:
        """Left half-plane Butterworth prototype poles ``t_k``, k = 1..gamma."""
        k = np.arange(1, int(self.gamma) + 1)
        return np.exp(1j * np.pi * (self.gamma + 2 * k - 1) / (2 * self.gamma))


@dataclass(frozen=True)
class DirectionalSpec:
    num_directions: int = 16
    order: int = 20

    def __post_init__(self):
        if int(self.num_directions) != self.num_directions or self.num_directions < 1:
            raise ValueError("num_directions must be a positive integer")
        if int(self.order) != self.order or self.order < 1:
            raise ValueError("order must be a positive integer")

    def angle(self, l: int) -> float:
        return np.pi * l / self.num_directions


@dataclass(frozen=True, eq=False)
class FilterBank:
    """DHBB spectra, one plane per direction, in unshifted FFT layout.

    ``spectra`` has shape ``(L, height, width)``.
    """

    spectra: np.ndarray
    bandpass: BandpassSpec
    directions: DirectionalSpec

    @property
    def shape(self) -> tuple[int, int]:
        return self.spectra.shape[1:]

    @property
    def height(self) -> int:
        return self.spectra.shape[1]

    @property
    def width(self) -> int:
        return self.spectra.shape[2]

    def __len__(self) -> int:
        return self.spectra.shape[0]


def butterworth_ideal_magnitude(omega, spec: BandpassSpec):
    """Magnitude of the analog Butterworth bandpass.

    ``sqrt((w D)^(2g) / ((w D)^(2g) + (w^2 - p^2)^(2g)))`` with bandwidth ``D``
    and center ``p``.  Only even powers of ``omega`` occur, so negative
    frequencies are accepted and mirror the positive axis.
    """
    w = np.asarray(omega, dtype=np.float64)
    g2 = 2 * int(spec.gamma)
    num = (w * spec.bandwidth) ** g2
    den = num + (w * w - spec.omega_low * spec.omega_high) ** g2
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    out = np.sqrt(ratio)
    return out if out.ndim else float(out)


def analog_transfer_factor(omega, spec: BandpassSpec):
    """Causal factor ``B(jw) = prod_k D jw / ((jw)^2 - D t_k jw + p^2)``."""
    s = 1j * np.asarray(omega, dtype=np.float64)
    p2 = spec.omega_low * spec.omega_high
    d = spec.bandwidth
    out = np.ones(s.shape, dtype=np.complex128)
    for tk in spec.poles():
        out = out * (d * s) / (s * s - d * tk * s + p2)
    return out if out.ndim else complex(out)


def digital_transfer_factor(omega, spec: BandpassSpec):
    """Bilinear discretization ``B^gamma(e^{jw})`` of :func:`analog_transfer_factor`.

    Satisfies ``|B^gamma(e^{jw})| == b(2 tan(w / 2))`` for ``|w| < pi``.
    """
    z = np.exp(1j * np.asarray(omega, dtype=np.float64))
    z2 = z * z
    p2 = spec.omega_low * spec.omega_high
    d = spec.bandwidth
    out = np.ones(z.shape, dtype=np.complex128)
    for tk in spec.poles():
        num = 2.0 * d * (z2 - 1.0)
        den = (4.0 + p2 - 2.0 * d * tk) * z2 + (2.0 * p2 - 8.0) * z + (4.0 + p2 + 2.0 * d * tk)
        out = out * (num / den)
    return out if out.ndim else complex(out)


def horizontal_branch(height: int, width: int) -> np.ndarray:
    """Indicator of bins handled by the horizontal 1D response.

    Compares ``|k1| / width`` with ``|k2| / height`` in exact integer
    arithmetic.  Diagonal ties go to the horizontal branch, so the two
    branches partition the plane.
    """
    k1 = np.abs(np.fft.fftfreq(width, 1.0 / width)).astype(np.int64)
    k2 = np.abs(np.fft.fftfreq(height, 1.0 / height)).astype(np.int64)
    return k1[None, :] * height >= k2[:, None] * width


def butterworth_2d_spectrum(width: int, height: int, spec: BandpassSpec) -> np.ndarray:
    """Cartesian 2D Butterworth bandpass on a ``height x width`` FFT grid."""
    omega1, omega2 = frequency_grid(height, width)
    dominant = np.where(horizontal_branch(height, width), omega1, omega2)
    return digital_transfer_factor(dominant, spec)


def directional_response(omega1, omega2, l: int, dspec: DirectionalSpec):
    """``[-j cos(angle(w) - pi l / L)]^n``, defined as 0 at the origin."""
    if not 0 <= l < dspec.num_directions:
        raise ValueError(f"direction index {l} outside [0, {dspec.num_directions})")
    w1 = np.asarray(omega1, dtype=np.float64)
    w2 = np.asarray(omega2, dtype=np.float64)
    theta = dspec.angle(l)
    radius = np.hypot(w1, w2)
    with np.errstate(invalid="ignore", divide="ignore"):
        cos = (w1 * np.cos(theta) + w2 * np.sin(theta)) / radius
    cos = np.where(radius > 0, cos, 0.0)
    n = int(dspec.order)
    # (-j)^n cycles through 1, -j, -1, j
    unit = (1.0, -1j, -1.0, 1j)[n % 4]
    out = np.asarray(unit * cos ** n, dtype=np.complex128)
    return out if out.ndim else complex(out)


def directional_spectra(width: int, height: int, dspec: DirectionalSpec) -> np.ndarray:
    omega1, omega2 = frequency_grid(height, width)
    return np.stack([directional_response(omega1, omega2, l, dspec)
                     for l in range(dspec.num_directions)])


def build_filter_bank(width: int, height: int, spec: BandpassSpec,
                      dspec: DirectionalSpec) -> FilterBank:
    """Build the ``L`` DHBB spectra for a ``height x width`` grid."""
    g = butterworth_2d_spectrum(width, height, spec)
    h = directional_spectra(width, height, dspec)
    spectra = h * g[None, :, :]
    spectra.setflags(write=False)
    return FilterBank(spectra=spectra, bandpass=spec, directions=dspec)

"""Analysis, shrinkage and synthesis with a DHBB filter bank.

The feature image is

    f~ = sum_l  phi_l * T(phi_l^v * f, beta)

computed in the Fourier domain: analysis multiplies the image spectrum by
``conj(phi_l)`` (argument reversal of a filter with conjugate-symmetric
spectrum), thresholding acts pixelwise on each subband and synthesis
multiplies by ``phi_l`` again before summing the subbands.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fdbseg.filterbank import FilterBank
from fdbseg.params import FdbParams
from fdbseg.spectral import crop, forward_dft, inverse_dft, mirror_pad

SHRINKAGE_KINDS = ("soft", "hard", "semisoft", "nonlinear")
SYNTHESIS_KINDS = ("factorized", "max", "sum")

# Subbands weaker than this fraction of the input's peak intensity are
# treated as exact zeros (FFT round-off on flat images).
NUMERICAL_FLOOR = 1e-9


@dataclass(frozen=True)
class ShrinkageRule:
    """Thresholding operator applied to subband coefficients.

    ``beta2`` is only used by ``semisoft``; ``beta2 == beta`` degenerates
    to hard thresholding.
    """

    kind: str = "soft"
    beta: float = 0.0
    beta2: float | None = None

    def __post_init__(self):
        if self.kind not in SHRINKAGE_KINDS:
            raise ValueError(f"unknown shrinkage kind {self.kind!r}")
        if not self.beta >= 0:
            raise ValueError(f"beta must be nonnegative, got {self.beta}")
        if self.kind == "semisoft":
            if self.beta2 is None:
                object.__setattr__(self, "beta2", 2.0 * self.beta)
            elif not self.beta2 >= self.beta:
                raise ValueError("semisoft needs beta2 >= beta")


def _magnitude_gain(mag: np.ndarray, rule: ShrinkageRule) -> np.ndarray:
    """Factor g(|x|) such that shrink(x) = g(|x|) * x."""
    beta = rule.beta
    safe = np.where(mag > 0, mag, 1.0)
    if rule.kind == "soft":
        gain = np.maximum(safe - beta, 0.0) / safe
    elif rule.kind == "hard":
        gain = (mag > beta).astype(np.float64)
    elif rule.kind == "nonlinear":
        gain = np.maximum(safe * safe - beta * beta, 0.0) / (safe * safe)
    else:
        beta2 = rule.beta2
        if beta2 == beta:
            gain = (mag > beta).astype(np.float64)
        else:
            ramp = beta2 * (safe - beta) / ((beta2 - beta) * safe)
            gain = np.where(mag <= beta, 0.0, np.where(mag <= beta2, ramp, 1.0))
    return np.where(mag > 0, gain, 0.0)


def shrink(x, rule: ShrinkageRule):
    """Threshold real or complex values elementwise, preserving phase."""
    arr = np.asarray(x)
    out = _magnitude_gain(np.abs(arr), rule) * arr
    if np.ndim(out) == 0:
        return complex(out) if np.iscomplexobj(out) else float(out)
    return out


def apply_shrinkage(coeffs: np.ndarray, rule: ShrinkageRule) -> np.ndarray:
    return shrink(np.asarray(coeffs), rule)


def analyze(padded, bank: FilterBank) -> np.ndarray:
    """Subband coefficients ``c_l`` of shape ``(L, height, width)``."""
    padded = np.asarray(padded, dtype=np.float64)
    if padded.shape != bank.shape:
        raise ValueError(f"image shape {padded.shape} does not match bank {bank.shape}")
    spectrum = forward_dft(padded)
    return np.fft.ifft2(spectrum[None] * np.conj(bank.spectra), axes=(-2, -1))


def adaptive_beta(coeffs: np.ndarray, C: float) -> float:
    """``C`` times the largest coefficient magnitude over all subbands."""
    if C < 0:
        raise ValueError("C must be nonnegative")
    coeffs = np.asarray(coeffs)
    if coeffs.size == 0:
        return 0.0
    return float(C * np.abs(coeffs).max())


def synthesize_factorized(coeffs: np.ndarray, bank: FilterBank) -> np.ndarray:
    coeffs = np.asarray(coeffs)
    if coeffs.shape != bank.spectra.shape:
        raise ValueError(
            f"coefficient shape {coeffs.shape} does not match bank {bank.spectra.shape}")
    spectra = np.fft.fft2(coeffs, axes=(-2, -1))
    return inverse_dft((spectra * bank.spectra).sum(axis=0))


def synthesize_max(coeffs: np.ndarray) -> np.ndarray:
    """Largest positive plus most negative response over the planes."""
    planes = np.real(np.asarray(coeffs))
    if planes.ndim != 3 or planes.shape[0] < 1:
        raise ValueError("need at least one coefficient plane")
    return np.where(planes > 0, planes, 0.0).max(axis=0) + np.where(planes < 0, planes, 0.0).min(axis=0)


def synthesize_sum(coeffs: np.ndarray) -> np.ndarray:
    planes = np.real(np.asarray(coeffs))
    if planes.ndim != 3 or planes.shape[0] < 1:
        raise ValueError("need at least one coefficient plane")
    return planes.sum(axis=0)


def texture_from_coefficients(coeffs: np.ndarray, bank: FilterBank, C: float,
                              synthesis: str = "factorized", shrinkage: str = "soft",
                              reference: float | None = None) -> np.ndarray:
    """Threshold analysis coefficients and synthesize the padded feature image.

    ``reference`` is the input's peak magnitude; coefficients below
    ``NUMERICAL_FLOOR * reference`` are round-off and give a zero image.
    """
    if synthesis not in SYNTHESIS_KINDS:
        raise ValueError(f"unknown synthesis {synthesis!r}")
    peak = np.abs(coeffs).max()
    if reference is not None and peak <= NUMERICAL_FLOOR * reference:
        return np.zeros(coeffs.shape[1:])
    rule = ShrinkageRule(shrinkage, C * peak)
    coeffs = apply_shrinkage(coeffs, rule)
    if synthesis == "factorized":
        return synthesize_factorized(coeffs, bank)
    if synthesis == "max":
        return synthesize_max(coeffs)
    return synthesize_sum(coeffs)


def extract_texture(img, params: FdbParams, bank: FilterBank | None = None,
                    synthesis: str = "factorized", shrinkage: str = "soft") -> np.ndarray:
    """Feature image of ``img``, same shape as the input.

    ``bank`` must match the mirror-padded size; it is built on the fly when
    omitted.
    """
    img = np.asarray(img, dtype=np.float64)
    padded = mirror_pad(img, params.pad_margin)
    if bank is None:
        from fdbseg.filterbank import build_filter_bank
        bank = build_filter_bank(padded.shape[1], padded.shape[0],
                                 params.bandpass, params.directional)
    coeffs = analyze(padded, bank)
    out = texture_from_coefficients(coeffs, bank, params.C, synthesis, shrinkage,
                                    reference=float(np.abs(img).max()))
    return crop(out, params.pad_margin)

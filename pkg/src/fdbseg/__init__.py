"""Fingerprint segmentation with factorized directional bandpass filtering.

The pipeline filters an image with a bank of directional Hilbert / Butterworth
bandpass (DHBB) filters, soft-thresholds the subband coefficients, resynthesizes
a texture image with the same filters and turns that texture into a convex
region of interest through adaptive binarization and block-vote morphology.
"""

from fdbseg.evaluation import DatabaseReport, EvalResult, error_rate, evaluate_database, write_report
from fdbseg.filterbank import BandpassSpec, DirectionalSpec, FilterBank, build_filter_bank
from fdbseg.params import FdbParams
from fdbseg.segmentation import MorphologySpec, segment
from fdbseg.texture import ShrinkageRule, extract_texture
from fdbseg.training import ParamGrid, grid_search

__all__ = [
    "BandpassSpec",
    "DatabaseReport",
    "DirectionalSpec",
    "EvalResult",
    "FdbParams",
    "FilterBank",
    "MorphologySpec",
    "ParamGrid",
    "ShrinkageRule",
    "build_filter_bank",
    "error_rate",
    "evaluate_database",
    "extract_texture",
    "grid_search",
    "segment",
    "write_report",
]

__version__ = "0.1.0"

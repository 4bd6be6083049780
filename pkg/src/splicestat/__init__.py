"""Spliced-image detection from natural-image statistics.

Feature extraction fits a Gaussian to block-DCT DC coefficients and a
generalized Gaussian to the AC coefficients, adds wavelet detail-subband
energy moments, and feeds the resulting 40-dimensional vectors to a
from-scratch SMO-trained SVM. See README.md for the CLI and demos.
"""

from .errors import (
    ConvergenceFailure,
    DegenerateDistribution,
    InsufficientData,
    InvalidInput,
    SchemaError,
    SpliceStatError,
)
from .features import (
    FEATURE_NAMES,
    SCHEMA_VERSION,
    ExtractionConfig,
    FeatureVector,
    extract_features,
    extract_features_with_diagnostics,
)
from .image_pipeline import (
    GrayImage,
    PreprocessConfig,
    gaussian_filter,
    median_filter,
    preprocess,
    resize_bilinear,
    to_luminance,
)
from .imageio import read_image, read_pgm, write_pgm
from .stat_models import (
    GaussianParams,
    GGDParams,
    SubbandEnergy,
    digamma,
    fit_gaussian,
    fit_ggd,
    ggd_pdf,
    sample_ggd,
    subband_energy,
)
from .svm import KernelSpec, SvmModel, load_model, predict, save_model, train_smo
from .transforms import BlockGrid, SubbandCoefficients, block_dct, dwt_haar

__version__ = "0.1.0"

__all__ = [
    "BlockGrid",
    "ConvergenceFailure",
    "DegenerateDistribution",
    "ExtractionConfig",
    "FEATURE_NAMES",
    "FeatureVector",
    "GaussianParams",
    "GGDParams",
    "GrayImage",
    "InsufficientData",
    "InvalidInput",
    "KernelSpec",
    "PreprocessConfig",
    "SCHEMA_VERSION",
    "SchemaError",
    "SpliceStatError",
    "SubbandCoefficients",
    "SubbandEnergy",
    "SvmModel",
    "block_dct",
    "digamma",
    "dwt_haar",
    "extract_features",
    "extract_features_with_diagnostics",
    "fit_gaussian",
    "fit_ggd",
    "gaussian_filter",
    "ggd_pdf",
    "load_model",
    "median_filter",
    "predict",
    "preprocess",
    "read_image",
    "read_pgm",
    "resize_bilinear",
    "sample_ggd",
    "save_model",
    "subband_energy",
    "to_luminance",
    "train_smo",
    "write_pgm",
]

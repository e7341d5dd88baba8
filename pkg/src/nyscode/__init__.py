"""Subsampled-dictionary feature coding and its low-rank reconstruction view.

Encodes data with rectified similarities to a codebook, reconstructs the ideal
code and kernel matrices from the sampled columns, evaluates Frobenius error
bounds, fits two-point saturation models to predict accuracy at larger
codebook sizes, and prunes overshoot dictionaries by their pooled responses.
"""

from .bounds import (
    ACCURACY_FORM,
    ERROR_FORM,
    SaturationModel,
    epsilon_min,
    eval_eq1_bound,
    fit_two_point,
)
from .classifier import LinearModel, accuracy, train_ridge
from .coding import CodeMatrix, Dictionary, encode, full_code, gram_kernel
from .data import (
    DataMatrix,
    FormatError,
    LabeledDataset,
    PatchGrid,
    extract_patches,
    extract_patches_stack,
    load_cifar10_binary,
    load_csv,
    normalize_columns,
    save_csv,
    synth_labeled_manifold,
    synth_manifold,
)
from .dictionary import KMeansResult, covering_radius, kcenters, kmeans, sample_indices
from .harness import (
    CurveConfig,
    CurvePoint,
    ExperimentReport,
    NystromEvalConfig,
    PdlConfig,
    emit,
    run_curve,
    run_nystrom_eval,
    run_pdl_compare,
    synth_texture_images,
)
from .nystrom import (
    ApproximationErrors,
    NystromFactors,
    approximation_errors,
    decompose,
    reconstruct_code,
    reconstruct_kernel,
)
from .pooling import PooledFeatures, pdl, pool
from .spectra import SpectralReport, effective_rank, rank_k_residual, scaled_diag_max, spectral_report

__version__ = "0.1.0"

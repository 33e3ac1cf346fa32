"""Multi-layer matrix factorization for multi-omics clustering."""

from ._core import (
    MlmfError,
    __version__,
    adjusted_rand_index,
    build_indicator,
    fit,
    generate_synthetic,
    kmeans,
    knn_similarity,
    logrank_test,
    normalized_laplacian,
    normalized_mutual_information,
    semi_nmf,
    spectral_cluster,
    zscore_normalize,
)

__all__ = [
    "MlmfError",
    "__version__",
    "adjusted_rand_index",
    "build_indicator",
    "fit",
    "generate_synthetic",
    "kmeans",
    "knn_similarity",
    "logrank_test",
    "normalized_laplacian",
    "normalized_mutual_information",
    "semi_nmf",
    "spectral_cluster",
    "zscore_normalize",
]

"""Quality-aware training-data curation: scoring, distortion, pooling, metrics."""

from ._core import (
    FEATURE_COUNT,
    CurationError,
    degrade,
    dice,
    features,
    generate_fixtures,
    score_image,
    spp_pool,
    __version__,
)

__all__ = [
    "FEATURE_COUNT",
    "CurationError",
    "degrade",
    "dice",
    "features",
    "generate_fixtures",
    "score_image",
    "spp_pool",
    "__version__",
]

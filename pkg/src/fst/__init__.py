"""Linear-statistics style transfer in the spatial and frequency domains."""

from fst.errors import FSTError
from fst.tensor import (
    ChannelStats,
    as_fmap,
    channel_stats,
    content_loss,
    gram_loss,
    gram_matrix,
)
from fst.spectral import (
    PolarSpectrum,
    Spectrum,
    center_shift,
    decompose,
    dft,
    idft,
    inverse_shift,
    recompose,
    spectral_content_loss,
    spectral_gram,
)
from fst.stylize import (
    FrequencyWeight,
    StyleTransform,
    apply_frequency,
    apply_spatial,
    build_adain,
    build_gram_opt,
    build_optimal_wct,
    build_transform,
    build_wct,
    frequency_combine,
    phase_replace,
)

__version__ = "0.1.0"

__all__ = [
    "FSTError",
    "ChannelStats",
    "as_fmap",
    "channel_stats",
    "content_loss",
    "gram_loss",
    "gram_matrix",
    "PolarSpectrum",
    "Spectrum",
    "center_shift",
    "decompose",
    "dft",
    "idft",
    "inverse_shift",
    "recompose",
    "spectral_content_loss",
    "spectral_gram",
    "FrequencyWeight",
    "StyleTransform",
    "apply_frequency",
    "apply_spatial",
    "build_adain",
    "build_gram_opt",
    "build_optimal_wct",
    "build_transform",
    "build_wct",
    "frequency_combine",
    "phase_replace",
]

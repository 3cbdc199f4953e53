"""Speech quality benchmark toolkit: MOS aggregation, P.1401-style metrics,
monotone third-order score mapping, and degradation corpus synthesis."""

from ._moskit import (
    Clip,
    IoError,
    MappingCoefficients,
    MOSLabel,
    ValidationError,
    add_white_noise,
    aggregate_ratings,
    apply_filter,
    apply_mapping,
    clip_amplitude,
    convolve_rir,
    fit_monotone_cubic,
    load_audio,
    make_exponential_rir,
    mix_background_noise,
    outlier_ratio,
    pcc,
    perror,
    rmse,
    rmse_map,
    save_audio,
    segment_speech,
    signal_power,
    t_interval_half_width,
)

__all__ = [
    "Clip",
    "IoError",
    "MappingCoefficients",
    "MOSLabel",
    "ValidationError",
    "add_white_noise",
    "aggregate_ratings",
    "apply_filter",
    "apply_mapping",
    "clip_amplitude",
    "convolve_rir",
    "fit_monotone_cubic",
    "load_audio",
    "make_exponential_rir",
    "mix_background_noise",
    "outlier_ratio",
    "pcc",
    "perror",
    "rmse",
    "rmse_map",
    "save_audio",
    "segment_speech",
    "signal_power",
    "t_interval_half_width",
]

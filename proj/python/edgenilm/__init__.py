"""Edge NILM pipeline: synthesis, features, DTW events and MobileMini classification."""

from ._core import (  # noqa: F401
    Error,
    MobileMini,
    bench,
    default_config_json,
    detect_events,
    dtw,
    evaluate,
    extract_events,
    fft,
    fft_skip_reorder,
    odd_harmonics,
    power_features,
    sampling_rate,
    split_dataset,
    synth_scenario,
)

__all__ = [
    "Error",
    "MobileMini",
    "bench",
    "default_config_json",
    "detect_events",
    "dtw",
    "evaluate",
    "extract_events",
    "fft",
    "fft_skip_reorder",
    "odd_harmonics",
    "power_features",
    "sampling_rate",
    "split_dataset",
    "synth_scenario",
]

"""OFDM waveform dataset generation and evaluation.

Waveforms are complex128 numpy arrays. A ``spec`` argument is either a
preset name (see :func:`presets`) or a dict in the container header form.
"""

from ._core import (
    Error,
    apply_channel,
    constellation,
    convert_file,
    cp_correlation,
    demodulate,
    evaluate,
    evm_db,
    generate,
    generate_file,
    generate_waveform,
    istft,
    median_psd,
    modulate,
    multitaper_psd,
    preset,
    presets,
    psd_distance,
    read_container,
    read_waveforms,
    set_threads,
    stft,
)

__all__ = [
    "Error",
    "apply_channel",
    "constellation",
    "convert_file",
    "cp_correlation",
    "demodulate",
    "evaluate",
    "evm_db",
    "generate",
    "generate_file",
    "generate_waveform",
    "istft",
    "median_psd",
    "modulate",
    "multitaper_psd",
    "preset",
    "presets",
    "psd_distance",
    "read_container",
    "read_waveforms",
    "set_threads",
    "stft",
]

"""Sample-rate conversion: guarded decimation and interpolated upsampling.

Decimation keeps every Nth sample after an anti-alias lowpass at pi/N;
upsampling inserts N-1 zeros between samples and interpolates with a
lowpass at pi/N of gain N.  Both guards are Hamming windowed-sinc filters
of order ``AA_TAPS_PER_FACTOR * factor``, which keeps the group delay an
integer number of samples at both rates: a decimator delays its output by
``AA_TAPS_PER_FACTOR / 2`` samples, an interpolator by
``AA_TAPS_PER_FACTOR / 2 * factor`` output samples.  Callers that need
alignment (the note bank, round-trip tests) compensate using those
constants rather than re-deriving them.
"""

from __future__ import annotations

import numpy as np

from .fir import apply_fir, design_lowpass
from .signals import Signal

#: Anti-alias/anti-image filter order per unit of rate-change factor.
#: Even, and divisible by 2*factor in delay terms: group delay is
#: 8*factor input samples, i.e. exactly 8 samples at the decimated rate.
AA_TAPS_PER_FACTOR = 16


def anti_alias_order(factor: int) -> int:
    """Order of the guard filter used for a given rate-change factor."""
    return AA_TAPS_PER_FACTOR * factor


def decimation_delay(factor: int) -> int:
    """Group delay of guarded decimation, in output-rate samples."""
    return AA_TAPS_PER_FACTOR // 2 if factor > 1 else 0


def interpolation_delay(factor: int) -> int:
    """Group delay of interpolated upsampling, in output-rate samples."""
    return (AA_TAPS_PER_FACTOR // 2) * factor if factor > 1 else 0


def _check_factor(factor: int) -> int:
    if not isinstance(factor, (int, np.integer)) or isinstance(factor, bool):
        raise ValueError(f"factor must be an integer, got {factor!r}")
    if factor < 1:
        raise ValueError(f"factor must be >= 1, got {factor}")
    return int(factor)


def decimate(signal: Signal, factor: int, guard: bool = True) -> Signal:
    """Reduce the sample rate by an integer factor.

    With ``guard`` on (the default), an anti-alias lowpass at half the new
    Nyquist precedes the keep-every-Nth step; without it, content above the
    new Nyquist folds back as aliases — occasionally what you want to
    demonstrate, never what you want by accident.
    """
    factor = _check_factor(factor)
    if factor == 1:
        return signal
    if guard and len(signal) > 0:
        aa = design_lowpass(
            anti_alias_order(factor), signal.sample_rate / (2 * factor), signal.sample_rate
        )
        filtered = apply_fir(aa, signal).samples
    else:
        filtered = signal.samples
    return Signal(filtered[::factor], signal.sample_rate / factor)


def upsample(signal: Signal, factor: int, interpolate: bool = True) -> Signal:
    """Raise the sample rate by an integer factor via zero insertion.

    With ``interpolate`` on, a gain-N lowpass at the original Nyquist
    removes the spectral images so a band-limited input is reconstructed
    at the higher rate; without it, the zero-stuffed sequence is returned
    as-is and the input spectrum repeats at multiples of the old rate.
    """
    factor = _check_factor(factor)
    if factor == 1:
        return signal
    out_rate = signal.sample_rate * factor
    stuffed = np.zeros(len(signal) * factor)
    stuffed[::factor] = signal.samples
    if not interpolate or len(signal) == 0:
        return Signal(stuffed, out_rate)
    interp = design_lowpass(anti_alias_order(factor), out_rate / (2 * factor), out_rate)
    smoothed = apply_fir(interp, Signal(stuffed, out_rate)).samples
    return Signal(smoothed * factor, out_rate)

"""Signal containers, test-signal generation, and DFT-based analysis.

All signals are real-valued, dimensionless sequences with an attached sample
rate; nothing here knows about files (see :mod:`volterrakit.formats`) or
filters (see :mod:`volterrakit.fir`).

The DFT is implemented in its direct O(N^2) form, which serves as the
numerical reference; an FFT fast path is selected automatically for long
blocks and must agree with the direct form to 1e-9.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NyquistError, SpectrumError

#: Block length above which dft/idft switch from the direct O(N^2) form to
#: the FFT. Below it the direct form is cheap enough to act as the default.
DIRECT_DFT_LIMIT = 4096

SIGNAL_KINDS = ("sine", "multisine", "white_noise", "chirp")


@dataclass(frozen=True)
class Signal:
    """A finite real-valued discrete-time signal.

    Parameters
    ----------
    samples : array_like
        Amplitude sequence, nominally within [-1, 1]. Stored as float64.
    sample_rate : float
        Sampling frequency in Hz, strictly positive.
    """

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError(f"samples must be one-dimensional, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite (no NaN/Inf)")
        rate = float(self.sample_rate)
        if not rate > 0:
            raise ValueError(f"sample_rate must be positive, got {rate}")
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "sample_rate", rate)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        """Length in seconds."""
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class Spectrum:
    """DFT bins of a signal block.

    ``bins[n]`` is the complex amplitude at frequency ``n * bin_resolution``;
    the number of bins equals the length of the transformed block, so the
    originating sample rate is ``bin_resolution * len(bins)``.
    """

    bins: np.ndarray
    bin_resolution: float

    def __post_init__(self):
        arr = np.asarray(self.bins, dtype=np.complex128)
        if arr.ndim != 1:
            raise ValueError(f"bins must be one-dimensional, got shape {arr.shape}")
        res = float(self.bin_resolution)
        if not res > 0:
            raise ValueError(f"bin_resolution must be positive, got {res}")
        object.__setattr__(self, "bins", arr)
        object.__setattr__(self, "bin_resolution", res)

    def __len__(self) -> int:
        return len(self.bins)

    @property
    def frequencies(self) -> np.ndarray:
        """Center frequency of each bin in Hz."""
        return np.arange(len(self.bins)) * self.bin_resolution

    @property
    def sample_rate(self) -> float:
        return self.bin_resolution * len(self.bins)


@dataclass(frozen=True)
class SignalSpec:
    """Recipe for a synthetic test signal.

    ``kind`` selects the waveform: a single ``sine`` (one frequency), a
    ``multisine`` (one or more frequencies, summed then peak-normalized),
    seeded uniform ``white_noise``, or a linear ``chirp`` sweeping between
    two frequencies.  ``amplitude`` is a scalar peak value, or per-component
    weights for a multisine.
    """

    kind: str
    frequencies: tuple[float, ...] = ()
    duration: float = 1.0
    amplitude: float | tuple[float, ...] = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in SIGNAL_KINDS:
            raise ValueError(f"kind must be one of {SIGNAL_KINDS}, got {self.kind!r}")
        if not self.duration > 0:
            raise ValueError(f"duration must be positive, got {self.duration}")
        object.__setattr__(self, "frequencies", tuple(float(f) for f in self.frequencies))


def _direct_transform(values: np.ndarray, sign: float) -> np.ndarray:
    """O(N^2) Fourier sum with exponent sign ``sign``, blocked to bound memory."""
    n = len(values)
    k = np.arange(n)
    out = np.empty(n, dtype=np.complex128)
    block = 256  # bounds the phase matrix at 256 x N entries
    for start in range(0, n, block):
        rows = np.arange(start, min(start + block, n))
        phase = np.exp(sign * 2j * np.pi * np.outer(rows, k) / n)
        out[rows] = phase @ values
    return out


def dft(signal: Signal, method: str = "auto") -> Spectrum:
    """Discrete Fourier transform, ``bins[n] = sum_k x[k] exp(-2*pi*i*n*k/N)``.

    ``method`` is ``"direct"`` (the O(N^2) reference form), ``"fast"``
    (numpy FFT), or ``"auto"`` which uses the direct form up to
    ``DIRECT_DFT_LIMIT`` samples and the FFT beyond it. The two paths agree
    to better than 1e-9 and tests hold them to that.
    """
    if len(signal) == 0:
        raise ValueError("cannot transform an empty signal")
    if method not in ("auto", "direct", "fast"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        method = "direct" if len(signal) <= DIRECT_DFT_LIMIT else "fast"
    if method == "direct":
        bins = _direct_transform(signal.samples.astype(np.complex128), -1.0)
    else:
        bins = np.fft.fft(signal.samples)
    return Spectrum(bins, signal.sample_rate / len(signal))


def idft(spectrum: Spectrum, method: str = "auto") -> Signal:
    """Inverse DFT with 1/N normalization, returning a real signal.

    The imaginary residue of the inverse sum is asserted below
    ``1e-6 * max|bin|`` and then discarded; a larger residue means the
    spectrum does not describe a real signal and raises
    :class:`~volterrakit.errors.SpectrumError`.
    """
    if len(spectrum) == 0:
        raise ValueError("cannot invert an empty spectrum")
    if method not in ("auto", "direct", "fast"):
        raise ValueError(f"unknown method {method!r}")
    n = len(spectrum)
    if method == "auto":
        method = "direct" if n <= DIRECT_DFT_LIMIT else "fast"
    if method == "direct":
        values = _direct_transform(spectrum.bins, +1.0) / n
    else:
        values = np.fft.ifft(spectrum.bins)
    peak = np.max(np.abs(spectrum.bins))
    residue = np.max(np.abs(values.imag))
    if peak > 0 and residue > 1e-6 * peak:
        raise SpectrumError(
            f"imaginary residue {residue:.3e} exceeds 1e-6 * max|bin| = {1e-6 * peak:.3e}; "
            "spectrum is not conjugate-symmetric"
        )
    return Signal(values.real, spectrum.sample_rate)


def generate(spec: SignalSpec, sample_rate: float) -> Signal:
    """Render a :class:`SignalSpec` at the given sample rate.

    Raises :class:`~volterrakit.errors.NyquistError` if any requested
    frequency reaches half the sample rate. Deterministic given
    ``(spec, sample_rate)``; noise depends only on ``spec.seed``.
    """
    if not sample_rate > 0:
        raise ValueError(f"sample_rate must be positive, got {sample_rate}")
    for f in spec.frequencies:
        if f >= sample_rate / 2:
            raise NyquistError(
                f"frequency {f} Hz is not below Nyquist ({sample_rate / 2} Hz)"
            )
    n = int(round(spec.duration * sample_rate))
    if n <= 0:
        raise ValueError("duration too short for one sample at this rate")
    t = np.arange(n) / sample_rate

    if spec.kind == "sine":
        if len(spec.frequencies) != 1:
            raise ValueError("sine takes exactly one frequency")
        amp = _scalar_amplitude(spec.amplitude)
        x = amp * np.sin(2 * np.pi * spec.frequencies[0] * t)

    elif spec.kind == "multisine":
        if not spec.frequencies:
            raise ValueError("multisine needs at least one frequency")
        amps = _component_amplitudes(spec.amplitude, len(spec.frequencies))
        x = np.zeros(n)
        for a, f in zip(amps, spec.frequencies):
            x += a * np.sin(2 * np.pi * f * t)
        # Normalize the sum so its peak equals the largest component weight;
        # keeps superpositions inside the nominal [-1, 1] range.
        peak = np.max(np.abs(x))
        if peak > 0:
            x *= np.max(np.abs(amps)) / peak

    elif spec.kind == "white_noise":
        amp = _scalar_amplitude(spec.amplitude)
        rng = np.random.default_rng(spec.seed)
        x = amp * rng.uniform(-1.0, 1.0, n)

    else:  # chirp
        if len(spec.frequencies) != 2:
            raise ValueError("chirp takes exactly two frequencies (start, end)")
        amp = _scalar_amplitude(spec.amplitude)
        f0, f1 = spec.frequencies
        # Linear sweep: instantaneous frequency f0 + (f1 - f0) * t / T.
        phase = 2 * np.pi * (f0 * t + (f1 - f0) * t**2 / (2 * spec.duration))
        x = amp * np.sin(phase)

    return Signal(x, sample_rate)


def _scalar_amplitude(amplitude) -> float:
    if isinstance(amplitude, (tuple, list, np.ndarray)):
        raise ValueError("this signal kind takes a single scalar amplitude")
    a = float(amplitude)
    if a < 0:
        raise ValueError(f"amplitude must be non-negative, got {a}")
    return a


def _component_amplitudes(amplitude, count: int) -> np.ndarray:
    if isinstance(amplitude, (tuple, list, np.ndarray)):
        amps = np.asarray(amplitude, dtype=np.float64)
        if len(amps) != count:
            raise ValueError(
                f"got {len(amps)} amplitudes for {count} frequencies"
            )
    else:
        amps = np.full(count, float(amplitude))
    if np.any(amps < 0):
        raise ValueError("amplitudes must be non-negative")
    return amps


def mse(a: Signal, b: Signal) -> float:
    """Mean squared error ``(1/N) * sum((a_k - b_k)^2)`` between two signals."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    if len(a) == 0:
        raise ValueError("mse of empty signals is undefined")
    if abs(a.sample_rate - b.sample_rate) > 1e-9 * max(a.sample_rate, b.sample_rate):
        raise ValueError(
            f"sample-rate mismatch: {a.sample_rate} vs {b.sample_rate}"
        )
    diff = a.samples - b.samples
    return float(np.mean(diff * diff))


def split_train_test(signal: Signal, fraction: float) -> tuple[Signal, Signal]:
    """Split into a leading ``floor(fraction * N)``-sample train part and the rest.

    Concatenating the two outputs reproduces the input exactly.
    """
    if not 0 < fraction < 1:
        raise ValueError(f"fraction must lie in (0, 1), got {fraction}")
    cut = int(np.floor(fraction * len(signal)))
    return (
        Signal(signal.samples[:cut], signal.sample_rate),
        Signal(signal.samples[cut:], signal.sample_rate),
    )


def harmonic_levels(signal: Signal, fundamental: float, count: int) -> np.ndarray:
    """Levels of the harmonics of ``fundamental`` relative to the fundamental.

    Returns, for k = 1..count, ``20*log10(peak near k*f0 / peak near f0)`` in
    dB; the k = 1 entry is 0 by construction. Peaks are searched within
    ±0.4*f0 of each nominal harmonic so leakage and slight detuning do not
    fall between bins.  Harmonics at or above Nyquist are dropped from the
    end of the list with a warning.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if not 0 < fundamental < signal.sample_rate / 2:
        raise ValueError(
            f"fundamental {fundamental} Hz must be positive and below Nyquist"
        )
    spectrum = dft(signal)
    mag = np.abs(spectrum.bins)
    res = spectrum.bin_resolution
    half = len(spectrum) // 2

    def peak_near(freq: float) -> float:
        width = max(1, int(round(0.4 * fundamental / res)))
        center = int(round(freq / res))
        lo = max(0, center - width)
        hi = min(half, center + width) + 1
        return float(np.max(mag[lo:hi]))

    reference = peak_near(fundamental)
    if reference == 0:
        raise ValueError("no energy at the fundamental; levels are undefined")

    levels = [0.0]
    for k in range(2, count + 1):
        fk = k * fundamental
        if fk >= signal.sample_rate / 2:
            warnings.warn(
                f"harmonic {k} at {fk} Hz is at or above Nyquist "
                f"({signal.sample_rate / 2} Hz); truncating the level list",
                stacklevel=2,
            )
            break
        p = peak_near(fk)
        levels.append(20 * np.log10(p / reference) if p > 0 else -np.inf)
    return np.asarray(levels)


def dominant_frequency(signal: Signal) -> float:
    """Frequency of the largest-magnitude DFT bin in the positive half-band."""
    spectrum = dft(signal)
    half = len(spectrum) // 2 + 1
    idx = int(np.argmax(np.abs(spectrum.bins[:half])))
    return idx * spectrum.bin_resolution

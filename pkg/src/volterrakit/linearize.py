"""Synthetic weakly nonlinear plants and pre-distortion verification.

The plant stands in for a physical transducer: a ground-truth Volterra
kernel plus optional additive measurement noise.  Its inverse is estimated
directly, by swapping the estimator's input and desired signals — learn the
map output -> input, then use it as a pre-filter.  For weakly nonlinear
systems the p-th order pre-inverse and post-inverse coincide, which is what
makes the swapped-signal shortcut legitimate; ``verify_pre_post_equivalence``
checks that numerically rather than taking it on faith.

A third-order inverse cancels nonlinear terms through order 3, so the
cascade's leftover error is an order-4 remainder: halving the probe
amplitude should shrink residual power by roughly 2**6.  Estimation error
flattens that slope long before floating point does, so the check carries
a generous slack factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import VolterraKernel, apply_kernel, packed2_size, packed3_size
from .nlms import EstimationConfig, estimate
from .signals import Signal, harmonic_levels, mse

#: Inverse kernels are truncated at this Volterra order.
INVERSE_ORDER = 3


@dataclass(frozen=True)
class SyntheticPlant:
    """Ground-truth nonlinear system: a Volterra kernel plus output noise.

    Weak nonlinearity is enforced at construction: the largest second- and
    third-order coefficients must each stay below half the largest
    first-order coefficient, otherwise low-order inversion is hopeless.
    Noise is uniform in [-noise_level, +noise_level], drawn deterministically
    from ``seed`` (and the signal length) on every simulation.
    """

    kernel: VolterraKernel
    noise_level: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.noise_level < 0:
            raise ValueError(f"noise_level must be >= 0, got {self.noise_level}")
        h1_peak = float(np.max(np.abs(self.kernel.h1)))
        for name in ("h2", "h3"):
            peak = float(np.max(np.abs(getattr(self.kernel, name))))
            if peak >= 0.5 * h1_peak:
                raise ValueError(
                    f"plant is not weakly nonlinear: max|{name}| = {peak} "
                    f"is not below 0.5 * max|h1| = {0.5 * h1_peak}"
                )


def make_random_plant(
    memory: int,
    seed: int = 0,
    noise_level: float = 0.0,
    scales: tuple[float, float, float] = (0.25, 0.1, 0.01),
) -> SyntheticPlant:
    """A reproducible weakly nonlinear plant with decaying random kernels.

    The linear part is a leading unit tap with a small random tail; the
    order-2 and order-3 blocks are uniform random coefficients shrunk by
    one and two decades, keeping the first order dominant.
    """
    rng = np.random.default_rng(seed)
    h1 = np.zeros(memory)
    h1[0] = 1.0
    if memory > 1:
        h1[1:] = scales[0] * rng.uniform(-1, 1, memory - 1) * 0.5 ** np.arange(memory - 1)
    h2 = scales[1] * rng.uniform(-1, 1, packed2_size(memory))
    h3 = scales[2] * rng.uniform(-1, 1, packed3_size(memory))
    kernel = VolterraKernel(memory, 0.0, h1, h2, h3)
    return SyntheticPlant(kernel, noise_level, seed)


def simulate_plant(plant: SyntheticPlant, input: Signal) -> Signal:
    """Drive the plant: kernel response plus seeded uniform noise."""
    clean = apply_kernel(plant.kernel, input)
    if plant.noise_level == 0:
        return clean
    rng = np.random.default_rng(plant.seed)
    noise = plant.noise_level * rng.uniform(-1.0, 1.0, len(input))
    return Signal(clean.samples + noise, input.sample_rate)


def estimate_inverse(
    config: EstimationConfig, plant_input: Signal, plant_output: Signal
) -> VolterraKernel:
    """Identify the plant's inverse directly: fit output -> input.

    The returned kernel is the post-inverse by construction and is used as
    a pre-inverse downstream; the two coincide for p-th order inverses.
    """
    return estimate(config, input=plant_output, desired=plant_input).kernel


@dataclass(frozen=True)
class CascadeReport:
    """Linearization quality of inverse -> plant on one probe.

    Harmonic arrays are present only for sine probes (a fundamental was
    given); entry k is the level of harmonic k+1 relative to the
    fundamental, and suppression is uncorrected minus corrected level.
    ``amplitude_flagged`` marks probes that exceeded the stated training
    peak — extrapolation territory, where no guarantee holds.
    """

    residual_mse: float
    first_order_gain_error: float
    harmonic_levels_uncorrected: np.ndarray | None = None
    harmonic_levels_corrected: np.ndarray | None = None
    harmonic_suppression_db: np.ndarray | None = None
    amplitude_flagged: bool = False


def evaluate_cascade(
    plant: SyntheticPlant,
    inverse: VolterraKernel,
    probe: Signal,
    fundamental: float | None = None,
    harmonic_count: int = 3,
    training_peak: float | None = None,
) -> CascadeReport:
    """Run probe -> inverse -> plant and measure how linear the result is."""
    corrected = simulate_plant(plant, apply_kernel(inverse, probe))
    residual = mse(corrected, probe)
    energy = float(np.dot(probe.samples, probe.samples))
    gain = float(np.dot(corrected.samples, probe.samples) / energy) if energy > 0 else 0.0
    flagged = bool(
        training_peak is not None
        and len(probe) > 0
        and np.max(np.abs(probe.samples)) > training_peak * (1 + 1e-12)
    )
    if fundamental is None:
        return CascadeReport(residual, abs(gain - 1.0), amplitude_flagged=flagged)

    uncorrected = simulate_plant(plant, probe)
    lu = harmonic_levels(uncorrected, fundamental, harmonic_count)
    lc = harmonic_levels(corrected, fundamental, harmonic_count)
    k = min(len(lu), len(lc))
    return CascadeReport(
        residual,
        abs(gain - 1.0),
        harmonic_levels_uncorrected=lu,
        harmonic_levels_corrected=lc,
        harmonic_suppression_db=lu[:k] - lc[:k],
        amplitude_flagged=flagged,
    )


@dataclass(frozen=True)
class EquivalenceRow:
    """Pre/post residuals for one probe, largest amplitude first."""

    peak_amplitude: float
    pre_residual_mse: float
    post_residual_mse: float
    agreement_ratio: float


@dataclass(frozen=True)
class EquivalenceReport:
    """Numerical check of the pre-inverse == post-inverse identity.

    ``halving_ratios`` pairs each probe with one of half its amplitude and
    lists pre-residual power ratios; ``order_consistent`` is True when every
    ratio reaches the order-(p+1) remainder bound 2**(2(p+1)-2) divided by
    a 3x slack, for p = 3.
    """

    rows: tuple[EquivalenceRow, ...]
    halving_ratios: tuple[float, ...]
    order_consistent: bool


#: Residual-power shrink required per amplitude halving: 2^(2(p+1)-2) / 3.
ORDER_BOUND = 2 ** (2 * (INVERSE_ORDER + 1) - 2) / 3


def verify_pre_post_equivalence(
    plant: SyntheticPlant, inverse: VolterraKernel, probes
) -> EquivalenceReport:
    """Measure H(G(x)) vs G(H(x)) residuals over a set of probes.

    Probes should span at least three amplitudes (e.g. scalings 1.0, 0.5,
    0.25 of one waveform) so the remainder order is observable.  Plants
    should be noise-free here: additive noise floors both residuals and
    says nothing about the theorem being exercised.
    """
    probes = list(probes)
    if not probes:
        raise ValueError("need at least one probe")
    rows = []
    for probe in probes:
        pre = simulate_plant(plant, apply_kernel(inverse, probe))
        post = apply_kernel(inverse, simulate_plant(plant, probe))
        r_pre = mse(pre, probe)
        r_post = mse(post, probe)
        lo, hi = sorted((r_pre, r_post))
        ratio = hi / lo if lo > 0 else (1.0 if hi == 0 else np.inf)
        rows.append(
            EquivalenceRow(float(np.max(np.abs(probe.samples))), r_pre, r_post, ratio)
        )
    rows.sort(key=lambda r: -r.peak_amplitude)

    halvings = []
    for a in rows:
        for b in rows:
            if abs(b.peak_amplitude - a.peak_amplitude / 2) <= 1e-6 * a.peak_amplitude:
                halvings.append(
                    a.pre_residual_mse / b.pre_residual_mse
                    if b.pre_residual_mse > 0
                    else np.inf
                )
    consistent = bool(halvings) and all(r >= ORDER_BOUND for r in halvings)
    return EquivalenceReport(tuple(rows), tuple(halvings), consistent)

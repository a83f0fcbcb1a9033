"""volterrakit: Volterra-kernel system identification and inverse filtering.

The package models weakly nonlinear systems as truncated third-order
Volterra filters with packed symmetric kernels, estimates kernels by
normalized LMS, derives pre-distortion inverses by the swapped-signal
method, and ships the supporting DSP: windowed FIR design, guarded
multirate conversion, a 120-filter note bank, spectra, and file formats.
The `volterrakit` console script exposes the same machinery end to end.
"""

from .errors import (
    DesignError,
    DivergenceError,
    FormatError,
    NumericError,
    NyquistError,
    SpectrumError,
    VolterrakitError,
)
from .signals import (
    Signal,
    SignalSpec,
    Spectrum,
    dft,
    dominant_frequency,
    generate,
    harmonic_levels,
    idft,
    mse,
    split_train_test,
)
from .kernels import (
    ExpansionVectors,
    VolterraKernel,
    apply_kernel,
    build_expansion,
    pack_index2,
    pack_index3,
    packed2_size,
    packed3_size,
    symmetrize_dense,
)
from .nlms import (
    EstimationConfig,
    EstimationReport,
    estimate,
    estimate_precomputed_speedup_probe,
    init_kernel,
    step_size,
)
from .fir import FirFilter, apply_fir, design_bandpass, design_lowpass
from .multirate import (
    anti_alias_order,
    decimate,
    decimation_delay,
    interpolation_delay,
    upsample,
)
from .bank import (
    Band,
    BandPlan,
    BankReport,
    NoteBank,
    NoteEntry,
    bank_split_recombine,
    band_for_frequency,
    build_note_bank,
    default_band_plan,
    default_order_policy,
    note_frequency,
)
from .linearize import (
    CascadeReport,
    EquivalenceReport,
    SyntheticPlant,
    estimate_inverse,
    evaluate_cascade,
    make_random_plant,
    simulate_plant,
    verify_pre_post_equivalence,
)
from .formats import (
    ESTIMATION_KEYS,
    load_kernel,
    read_estimation_object,
    read_signal_csv,
    save_kernel,
    signal_digest,
    write_estimation_object,
    write_signal_csv,
)

__version__ = "0.1.0"

__all__ = [
    "Band",
    "BandPlan",
    "BankReport",
    "CascadeReport",
    "DesignError",
    "DivergenceError",
    "ESTIMATION_KEYS",
    "EquivalenceReport",
    "EstimationConfig",
    "EstimationReport",
    "ExpansionVectors",
    "FirFilter",
    "FormatError",
    "NoteBank",
    "NoteEntry",
    "NumericError",
    "NyquistError",
    "Signal",
    "SignalSpec",
    "Spectrum",
    "SpectrumError",
    "SyntheticPlant",
    "VolterraKernel",
    "VolterrakitError",
    "anti_alias_order",
    "apply_fir",
    "apply_kernel",
    "bank_split_recombine",
    "band_for_frequency",
    "build_expansion",
    "build_note_bank",
    "decimate",
    "decimation_delay",
    "default_band_plan",
    "default_order_policy",
    "design_bandpass",
    "design_lowpass",
    "dft",
    "dominant_frequency",
    "estimate",
    "estimate_inverse",
    "estimate_precomputed_speedup_probe",
    "evaluate_cascade",
    "generate",
    "harmonic_levels",
    "idft",
    "init_kernel",
    "interpolation_delay",
    "load_kernel",
    "make_random_plant",
    "mse",
    "note_frequency",
    "pack_index2",
    "pack_index3",
    "packed2_size",
    "packed3_size",
    "read_estimation_object",
    "read_signal_csv",
    "save_kernel",
    "signal_digest",
    "simulate_plant",
    "split_train_test",
    "step_size",
    "symmetrize_dense",
    "upsample",
    "verify_pre_post_equivalence",
    "write_estimation_object",
    "write_signal_csv",
]

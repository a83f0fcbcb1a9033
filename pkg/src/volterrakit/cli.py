"""Command-line interface.

Subcommands cover the full workflow: signal generation, rate conversion,
forward/inverse kernel estimation, filtering, linearization metrics,
spectra, the note-filter-bank demonstration, and the end-to-end `protocol`
runner (catalog generation, 70/30 split, forward + inverse fits, metric
table).

Every run that emits a report directory writes machine-readable files
(key=value report, CSV tables) plus rendered figures; `--no-plot` skips
the figures.  Given identical flags and seeds, all outputs are
deterministic except the `# generated <timestamp>` header line and the
timestamp inside kernel-archive metadata.
"""

from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .bank import build_note_bank, bank_split_recombine, note_frequency, NOTE_BAND_FRACTION
from .errors import VolterrakitError
from .fir import design_bandpass, STOPBAND_SPEC_DB
from .formats import (
    read_estimation_object,
    read_signal_csv,
    save_kernel,
    signal_digest,
    load_kernel,
    write_signal_csv,
)
from .kernels import apply_kernel
from .linearize import SyntheticPlant, evaluate_cascade, make_random_plant, simulate_plant
from .multirate import decimate, upsample
from .nlms import EstimationConfig, estimate
from .signals import Signal, SignalSpec, dft, generate, mse, split_train_test

SIGNAL_KINDS = ("sine", "multisine", "white_noise", "chirp")


def _stamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _write_report(path: Path, stamp: str, pairs) -> None:
    """Flat key=value report; the generated-at header line carries the only
    timestamp, so the remainder is comparable across runs."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# generated {stamp}\n")
        for key, value in pairs:
            fh.write(f"{key}={value}\n")


def _write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(str(cell) for cell in row) + "\n")


def _config_from_flags(args) -> EstimationConfig:
    if args.memory is None:
        raise VolterrakitError("--memory is required unless --object supplies one")
    return EstimationConfig(
        memory=args.memory,
        alpha1=args.alpha1,
        alpha2=args.alpha2,
        alpha3=args.alpha3,
        phi=args.phi,
        max_iterations=args.iterations,
        error_threshold=args.error_max,
        precompute=args.precompute,
    )


def _estimation_outputs(out_dir: Path, command: str, config, report, input_sig, desired_sig,
                        no_plot: bool) -> None:
    """Shared artifact writer for `estimate` and `invert`."""
    out_dir.mkdir(parents=True, exist_ok=True)
    stamp = _stamp()
    kernel = report.kernel
    save_kernel(
        out_dir / "kernel.json",
        kernel,
        config=config,
        training_digest=signal_digest(input_sig),
        created=stamp,
    )
    # Recomputing the training MSE through apply_kernel (rather than reusing
    # the estimator's last sweep error) guarantees `estimate` then `apply`
    # reproduces this exact number.
    prediction = apply_kernel(kernel, input_sig)
    train_mse = mse(prediction, desired_sig)
    _write_report(
        out_dir / "report.txt",
        stamp,
        [
            ("command", command),
            ("samples", len(input_sig)),
            ("sample_rate", f"{input_sig.sample_rate:g}"),
            ("memory", config.memory),
            ("alpha1", config.alpha1),
            ("alpha2", config.alpha2),
            ("alpha3", config.alpha3),
            ("phi", config.phi),
            ("max_iterations", config.max_iterations),
            ("error_threshold", config.error_threshold),
            ("precompute", config.precompute),
            ("iterations_run", report.iterations_run),
            ("stopped_early", report.stopped_early),
            ("final_mean_error", f"{report.error_trace[-1]:.17g}"),
            ("train_mse", f"{train_mse:.17g}"),
        ],
    )
    _write_csv(
        out_dir / "trace.csv",
        "sweep,mean_abs_error",
        [(i + 1, f"{e:.17g}") for i, e in enumerate(report.error_trace)],
    )
    if not no_plot:
        from . import plots

        plots.save_error_trace(
            out_dir / "trace.png",
            report.error_trace,
            threshold=config.error_threshold or None,
            title=f"{command}: mean |e| per sweep",
        )
    print(f"wrote {out_dir}/kernel.json report.txt trace.csv"
          + ("" if no_plot else " trace.png"))


# ---------------------------------------------------------------- commands


def _cmd_gen(args) -> int:
    freqs = tuple(args.freq or ())
    spec = SignalSpec(args.kind, freqs, args.dur, amplitude=args.amplitude, seed=args.seed)
    sig = generate(spec, args.fs)
    write_signal_csv(sig, args.out)
    print(f"wrote {args.out}: {len(sig)} samples at {sig.sample_rate:g} Hz")
    return 0


def _cmd_resample(args) -> int:
    sig = read_signal_csv(args.infile)
    if args.down:
        out = decimate(sig, args.down, guard=not args.no_guard)
    else:
        out = upsample(sig, args.up, interpolate=not args.no_interpolate)
    write_signal_csv(out, args.out)
    print(f"wrote {args.out}: {len(out)} samples at {out.sample_rate:g} Hz")
    return 0


def _cmd_estimate(args) -> int:
    if args.object:
        text = Path(args.object).read_text(encoding="utf-8")
        config, input_sig, desired_sig = read_estimation_object(
            text, args.fs, phi=args.phi, precompute=args.precompute
        )
    else:
        if not (args.input and args.desired):
            raise VolterrakitError("estimate needs --object or both --input and --desired")
        input_sig = read_signal_csv(args.input)
        desired_sig = read_signal_csv(args.desired)
        config = _config_from_flags(args)
    report = estimate(config, input_sig, desired_sig)
    _estimation_outputs(Path(args.out), "estimate", config, report,
                        input_sig, desired_sig, args.no_plot)
    return 0


def _cmd_invert(args) -> int:
    plant_in = read_signal_csv(args.plant_input)
    plant_out = read_signal_csv(args.plant_output)
    config = _config_from_flags(args)
    # Swapped-signal method: learn the map from plant output back to input.
    report = estimate(config, input=plant_out, desired=plant_in)
    _estimation_outputs(Path(args.out), "invert", config, report,
                        plant_out, plant_in, args.no_plot)
    return 0


def _cmd_apply(args) -> int:
    kernel, _ = load_kernel(args.kernel)
    sig = read_signal_csv(args.infile)
    out = apply_kernel(kernel, sig)
    write_signal_csv(out, args.out)
    print(f"wrote {args.out}: {len(out)} samples at {out.sample_rate:g} Hz")
    return 0


def _cmd_evaluate(args) -> int:
    inverse, _ = load_kernel(args.inverse)
    plant_kernel, _ = load_kernel(args.plant)
    plant = SyntheticPlant(plant_kernel, noise_level=args.noise_level, seed=args.seed)
    probe = read_signal_csv(args.probe)
    report = evaluate_cascade(
        plant, inverse, probe,
        fundamental=args.fundamental, harmonic_count=args.harmonics,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    pairs = [
        ("command", "evaluate"),
        ("probe_samples", len(probe)),
        ("sample_rate", f"{probe.sample_rate:g}"),
        ("residual_mse", f"{report.residual_mse:.17g}"),
        ("first_order_gain_error", f"{report.first_order_gain_error:.17g}"),
        ("amplitude_flagged", report.amplitude_flagged),
    ]
    _write_report(out_dir / "report.txt", _stamp(), pairs)
    wrote = ["report.txt"]
    if report.harmonic_suppression_db is not None:
        rows = [
            (k + 1,
             f"{report.harmonic_levels_uncorrected[k]:.6f}",
             f"{report.harmonic_levels_corrected[k]:.6f}",
             f"{report.harmonic_suppression_db[k]:.6f}")
            for k in range(len(report.harmonic_suppression_db))
        ]
        _write_csv(out_dir / "harmonics.csv",
                   "harmonic,uncorrected_db,corrected_db,suppression_db", rows)
        wrote.append("harmonics.csv")
        if not args.no_plot:
            from . import plots

            plots.save_harmonic_comparison(
                out_dir / "harmonics.png",
                {
                    "uncorrected": report.harmonic_levels_uncorrected,
                    "linearized": report.harmonic_levels_corrected,
                },
                title="harmonic levels before/after pre-distortion",
            )
            wrote.append("harmonics.png")
    print(f"wrote {out_dir}/" + " ".join(wrote))
    return 0


def _cmd_spectrum(args) -> int:
    sig = read_signal_csv(args.infile)
    spec = dft(sig)
    n = len(sig)
    half = n // 2 + 1
    mags = np.abs(spec.bins[:half]) / n
    if half > 2:
        mags[1: half - 1] *= 2.0
    rows = [
        (f"{spec.bin_resolution * k:.17g}", f"{mags[k]:.17g}")
        for k in range(half)
    ]
    _write_csv(Path(args.out), "frequency_hz,amplitude", rows)
    wrote = [str(args.out)]
    if args.plot:
        from . import plots

        plots.save_spectrum_plot(Path(args.plot), spec, title=f"spectrum of {args.infile}")
        wrote.append(str(args.plot))
    print("wrote " + " ".join(wrote))
    return 0


def _cmd_bankdemo(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stamp = _stamp()

    bank = build_note_bank()
    _write_csv(
        out_dir / "bank.csv",
        "note,octave,frequency_hz,band,band_rate_hz,order,achieved_stopband_db,meets_spec",
        [
            (e.note_name, e.octave, f"{e.frequency:.6g}", e.band_index,
             f"{e.filter.sample_rate:g}", e.filter.order,
             f"{e.filter.achieved_stopband_db:.3f}", e.meets_stopband_spec)
            for e in bank.entries
        ],
    )

    # The narrow low-note passband realized at two rates: full audio rate vs
    # a rate commensurate with the band.  Order is capped at 100 in the
    # first case and fixed at 50 in the second.
    f_lo = note_frequency(6, 0) * (1 - NOTE_BAND_FRACTION)
    f_hi = note_frequency(6, 0) * (1 + NOTE_BAND_FRACTION)
    wide = design_bandpass(100, f_lo, f_hi, 44100.0, transition_hz=3.0)
    narrow = design_bandpass(50, f_lo, f_hi, 300.0, transition_hz=3.0)

    tone_count = sum(1 for e in bank.entries if e.meets_stopband_spec)
    probe = generate(
        SignalSpec("multisine", (30.0, 60.0, 90.0, 120.0, 150.0), 1.2, amplitude=0.8),
        44100.0,
    )
    recombined, fit = bank_split_recombine(bank, probe)

    _write_report(
        out_dir / "report.txt",
        stamp,
        [
            ("command", "bankdemo"),
            ("bank_entries", len(bank.entries)),
            ("entries_meeting_stopband", tone_count),
            ("narrowband_hz", f"{f_lo:.2f}..{f_hi:.2f}"),
            ("wide_rate_hz", f"{wide.sample_rate:g}"),
            ("wide_order", wide.order),
            ("wide_achieved_stopband_db", f"{wide.achieved_stopband_db:.3f}"),
            ("wide_meets_spec", wide.achieved_stopband_db <= STOPBAND_SPEC_DB),
            ("narrow_rate_hz", f"{narrow.sample_rate:g}"),
            ("narrow_order", narrow.order),
            ("narrow_achieved_stopband_db", f"{narrow.achieved_stopband_db:.3f}"),
            ("narrow_meets_spec", narrow.achieved_stopband_db <= STOPBAND_SPEC_DB),
            ("recombine_probe", "multisine 30/60/90/120/150 Hz"),
            ("recombine_best_scale", f"{fit.best_scale:.6g}"),
            ("recombine_residual_mse", f"{fit.residual_mse:.6g}"),
            ("recombine_residual_power_fraction", f"{fit.residual_power_fraction:.6g}"),
            ("recombine_trim_samples", fit.trim_samples),
        ],
    )
    wrote = ["bank.csv", "report.txt"]
    if not args.no_plot:
        from . import plots

        plots.save_filter_response(out_dir / "narrowband_full_rate.png", wide)
        plots.save_filter_response(out_dir / "narrowband_low_rate.png", narrow)
        plots.save_waveform_overlay(
            out_dir / "recombined.png",
            [("input", probe), ("recombined", recombined)],
            title="bank split/recombine", max_seconds=0.1,
        )
        wrote += ["narrowband_full_rate.png", "narrowband_low_rate.png", "recombined.png"]
    print(f"wrote {out_dir}/" + " ".join(wrote))
    return 0


def _protocol_catalog(fs: float, duration: float, amplitude: float, seed: int):
    """The measurement-campaign test set: one chirp, three tones, two
    multisines whose components sit 6 Hz and 3 Hz apart."""
    return [
        ("chirp", SignalSpec("chirp", (20.0, 150.0), duration, amplitude=amplitude)),
        ("sine20", SignalSpec("sine", (20.0,), duration, amplitude=amplitude)),
        ("sine50", SignalSpec("sine", (50.0,), duration, amplitude=amplitude)),
        ("sine70", SignalSpec("sine", (70.0,), duration, amplitude=amplitude)),
        ("multisine6", SignalSpec("multisine", (20.0, 26.0, 32.0, 38.0), duration,
                                  amplitude=amplitude)),
        ("multisine3", SignalSpec("multisine", (20.0, 23.0, 26.0, 29.0), duration,
                                  amplitude=amplitude)),
    ]


def _cmd_protocol(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stamp = _stamp()
    rate_out = args.fs / args.down
    if abs(rate_out - round(rate_out)) > 1e-9:
        raise VolterrakitError(f"--fs {args.fs} is not divisible by --down {args.down}")

    plant = make_random_plant(memory=args.plant_memory, seed=args.seed)
    forward_cfg = EstimationConfig(
        memory=args.memory, alpha1=1.0, alpha2=0.4, alpha3=0.3,
        max_iterations=args.iterations, error_threshold=args.error_max, precompute=True,
    )
    inverse_cfg = EstimationConfig(
        memory=args.memory, alpha1=0.5, alpha2=0.2, alpha3=0.1,
        max_iterations=8, precompute=True,
    )

    rows = []
    mses_linear = []
    names = []
    first_pair = None
    for name, spec in _protocol_catalog(args.fs, args.dur, args.amplitude, args.seed):
        raw = generate(spec, args.fs)
        low = decimate(raw, args.down)
        if first_pair is None:
            first_pair = (raw, low)
        train, test = split_train_test(low, args.train_fraction)

        train_out = simulate_plant(plant, train)
        test_out = simulate_plant(plant, test)

        fwd = estimate(forward_cfg, train, train_out).kernel
        mse_forward = mse(apply_kernel(fwd, test), test_out)

        inv = estimate(inverse_cfg, train_out, train).kernel
        mse_uncorrected = mse(test_out, test)
        mse_linearized = evaluate_cascade(plant, inv, test).residual_mse
        improvement = mse_uncorrected / mse_linearized if mse_linearized > 0 else float("inf")

        rows.append(
            (name, f"{mse_forward:.6e}", f"{mse_uncorrected:.6e}",
             f"{mse_linearized:.6e}", f"{improvement:.3f}")
        )
        names.append(name)
        mses_linear.append(mse_linearized)

    _write_csv(out_dir / "metrics.csv",
               "signal,mse_forward,mse_uncorrected,mse_linearized,improvement", rows)
    _write_report(
        out_dir / "report.txt",
        stamp,
        [
            ("command", "protocol"),
            ("seed", args.seed),
            ("source_rate_hz", f"{args.fs:g}"),
            ("decimation_factor", args.down),
            ("working_rate_hz", f"{rate_out:g}"),
            ("duration_s", args.dur),
            ("amplitude", args.amplitude),
            ("train_fraction", args.train_fraction),
            ("plant_memory", args.plant_memory),
            ("model_memory", args.memory),
            ("signals", " ".join(names)),
        ],
    )
    wrote = ["metrics.csv", "report.txt"]
    if not args.no_plot:
        from . import plots

        raw, low = first_pair
        plots.save_waveform_overlay(
            out_dir / "decimation.png",
            [(f"{raw.sample_rate:g} Hz", raw), (f"{low.sample_rate:g} Hz", low)],
            title="original vs decimated", max_seconds=0.25,
        )
        plots.save_mse_bars(out_dir / "mse.png", names, mses_linear,
                            title="linearized cascade MSE per test signal")
        wrote += ["decimation.png", "mse.png"]
    print(f"wrote {out_dir}/" + " ".join(wrote))
    return 0


# ----------------------------------------------------------------- parser


def _add_nlms_flags(p: argparse.ArgumentParser, memory_required: bool = False) -> None:
    p.add_argument("--memory", type=int, required=memory_required,
                   help="kernel memory length M")
    p.add_argument("--alpha1", type=float, default=1.0, help="order-1 step size")
    p.add_argument("--alpha2", type=float, default=0.4, help="order-2 step size")
    p.add_argument("--alpha3", type=float, default=0.3, help="order-3 step size")
    p.add_argument("--phi", type=float, default=0.5, help="energy regularizer")
    p.add_argument("--iterations", type=int, default=100, help="sweep budget")
    p.add_argument("--error-max", type=float, default=0.0,
                   help="early-stop threshold on sweep mean |e| (0 disables)")
    p.add_argument("--precompute", action="store_true",
                   help="precompute expansion vectors (more memory, less time)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="volterrakit",
        description="Volterra-kernel system identification and inverse filtering",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a test signal to CSV")
    p.add_argument("--kind", choices=SIGNAL_KINDS, required=True)
    p.add_argument("--freq", type=float, action="append",
                   help="component frequency in Hz (repeatable)")
    p.add_argument("--fs", type=float, required=True, help="sample rate in Hz")
    p.add_argument("--dur", type=float, required=True, help="duration in seconds")
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("resample", help="decimate or upsample a CSV signal")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--down", type=int, help="decimation factor")
    group.add_argument("--up", type=int, help="interpolation factor")
    p.add_argument("--no-guard", action="store_true",
                   help="skip the anti-alias filter when decimating")
    p.add_argument("--no-interpolate", action="store_true",
                   help="zero-stuff only when upsampling")
    p.set_defaults(func=_cmd_resample)

    p = sub.add_parser("estimate", help="fit a forward kernel by NLMS")
    p.add_argument("--object", help="estimation-object JSON document")
    p.add_argument("--fs", type=float, default=1.0,
                   help="sample rate for --object arrays (the document has none)")
    p.add_argument("--input", help="input CSV (alternative to --object)")
    p.add_argument("--desired", help="desired-output CSV")
    _add_nlms_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("invert", help="fit an inverse kernel (swapped signals)")
    p.add_argument("--plant-input", required=True, help="plant input CSV")
    p.add_argument("--plant-output", required=True, help="plant output CSV")
    _add_nlms_flags(p, memory_required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=_cmd_invert)

    p = sub.add_parser("apply", help="filter a CSV signal through a kernel archive")
    p.add_argument("--kernel", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_apply)

    p = sub.add_parser("evaluate", help="linearization metrics for inverse+plant")
    p.add_argument("--inverse", required=True, help="inverse kernel archive")
    p.add_argument("--plant", required=True, help="plant kernel archive")
    p.add_argument("--probe", required=True, help="probe CSV")
    p.add_argument("--fundamental", type=float, help="probe fundamental in Hz")
    p.add_argument("--harmonics", type=int, default=3)
    p.add_argument("--noise-level", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("spectrum", help="DFT magnitude table from a CSV signal")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True, help="output CSV of frequency,amplitude")
    p.add_argument("--plot", help="optional spectrum PNG")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("bankdemo", help="note filter bank design study")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=_cmd_bankdemo)

    p = sub.add_parser("protocol", help="full measurement-protocol reproduction")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--fs", type=float, default=2560.0, help="catalog generation rate")
    p.add_argument("--down", type=int, default=5, help="decimation factor")
    p.add_argument("--dur", type=float, default=2.5, help="catalog duration in seconds")
    p.add_argument("--amplitude", type=float, default=0.5)
    p.add_argument("--train-fraction", type=float, default=0.7)
    p.add_argument("--plant-memory", type=int, default=2)
    p.add_argument("--memory", type=int, default=3, help="model memory")
    p.add_argument("--iterations", type=int, default=30, help="forward sweep budget")
    p.add_argument("--error-max", type=float, default=0.0)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=_cmd_protocol)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (VolterrakitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

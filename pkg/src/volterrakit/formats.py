"""File formats: estimation objects (JSON), kernel archives (JSON), signal CSV.

The estimation object is the interchange document that drives one NLMS run:
step sizes, sweep budget, memory, early-stop level, and the two equal-length
sample arrays.  Its key set is fixed — see ``ESTIMATION_KEYS`` — and is never
extended, so documents written here remain readable by any other tool using
the same schema.  The sample rate deliberately travels out-of-band (CSV
header or CLI flag) rather than inside the object.

Kernel archives and the CSV signal format are this package's own plumbing:
both round-trip losslessly at full double precision.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from datetime import datetime, timezone

import numpy as np

from .errors import FormatError
from .kernels import VolterraKernel, packed2_size, packed3_size
from .nlms import EstimationConfig
from .signals import Signal

# The exact key set (and canonical order) of an estimation object.
ESTIMATION_KEYS = (
    "alpha1",
    "alpha2",
    "alpha3",
    "iterations",
    "memory",
    "errorMax",
    "input",
    "desired",
)


def _require_number(obj: dict, key: str) -> float:
    if key not in obj:
        raise FormatError(f"estimation object is missing key '{key}'")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError(f"key '{key}' must be a number, got {type(value).__name__}")
    return float(value)


def _require_integer(obj: dict, key: str) -> int:
    if key not in obj:
        raise FormatError(f"estimation object is missing key '{key}'")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"key '{key}' must be an integer, got {type(value).__name__}")
    return value


def _require_array(obj: dict, key: str) -> np.ndarray:
    if key not in obj:
        raise FormatError(f"estimation object is missing key '{key}'")
    value = obj[key]
    if not isinstance(value, list):
        raise FormatError(f"key '{key}' must be an array, got {type(value).__name__}")
    for entry in value:
        if isinstance(entry, bool) or not isinstance(entry, (int, float)):
            raise FormatError(f"array '{key}' holds a non-numeric entry: {entry!r}")
    return np.asarray(value, dtype=np.float64)


def read_estimation_object(
    text: str,
    sample_rate: float,
    phi: float = 0.5,
    precompute: bool = False,
) -> tuple[EstimationConfig, Signal, Signal]:
    """Parse an estimation-object document into (config, input, desired).

    ``sample_rate`` is supplied by the caller because the document format
    does not carry one.  ``phi`` and ``precompute`` likewise live outside
    the schema.  Unknown keys are ignored with a warning; missing keys,
    type mismatches, and unequal array lengths raise :class:`FormatError`
    naming the offending key.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"estimation object is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise FormatError(f"estimation object must be a JSON object, got {type(obj).__name__}")

    unknown = sorted(set(obj) - set(ESTIMATION_KEYS))
    if unknown:
        warnings.warn(f"estimation object has unknown keys (ignored): {unknown}", stacklevel=2)

    alpha1 = _require_number(obj, "alpha1")
    alpha2 = _require_number(obj, "alpha2")
    alpha3 = _require_number(obj, "alpha3")
    iterations = _require_integer(obj, "iterations")
    memory = _require_integer(obj, "memory")
    error_max = _require_number(obj, "errorMax")
    input_samples = _require_array(obj, "input")
    desired_samples = _require_array(obj, "desired")
    if len(input_samples) != len(desired_samples):
        raise FormatError(
            f"'input' and 'desired' lengths differ "
            f"({len(input_samples)} vs {len(desired_samples)})"
        )

    try:
        config = EstimationConfig(
            memory=memory,
            alpha1=alpha1,
            alpha2=alpha2,
            alpha3=alpha3,
            phi=phi,
            max_iterations=iterations,
            error_threshold=error_max,
            precompute=precompute,
        )
    except ValueError as exc:
        raise FormatError(f"estimation object violates a config constraint: {exc}") from exc
    return (
        config,
        Signal(input_samples, sample_rate),
        Signal(desired_samples, sample_rate),
    )


def write_estimation_object(
    config: EstimationConfig, input: Signal, desired: Signal
) -> str:
    """Serialize a run to the interchange document (exact key set/order).

    Numbers are emitted at full double precision (shortest round-trip
    form), so ``read(write(x))`` reproduces every value bit-exactly.
    """
    if len(input) != len(desired):
        raise FormatError(
            f"'input' and 'desired' lengths differ ({len(input)} vs {len(desired)})"
        )
    document = {
        "alpha1": config.alpha1,
        "alpha2": config.alpha2,
        "alpha3": config.alpha3,
        "iterations": config.max_iterations,
        "memory": config.memory,
        "errorMax": config.error_threshold,
        "input": [float(v) for v in input.samples],
        "desired": [float(v) for v in desired.samples],
    }
    return json.dumps(document, indent=2)


def signal_digest(signal: Signal) -> str:
    """SHA-256 over the raw little-endian float64 samples plus the rate."""
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(signal.samples, dtype="<f8").tobytes())
    h.update(np.float64(signal.sample_rate).tobytes())
    return h.hexdigest()


def save_kernel(
    path,
    kernel: VolterraKernel,
    config: EstimationConfig | None = None,
    training_digest: str | None = None,
    created: str | None = None,
) -> None:
    """Write a kernel archive: coefficients plus provenance metadata."""
    metadata = {
        "created": created if created is not None
        else datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": None
        if config is None
        else {
            "memory": config.memory,
            "alpha1": config.alpha1,
            "alpha2": config.alpha2,
            "alpha3": config.alpha3,
            "phi": config.phi,
            "max_iterations": config.max_iterations,
            "error_threshold": config.error_threshold,
            "precompute": config.precompute,
        },
        "training_digest": training_digest,
    }
    document = {
        "memory": kernel.memory,
        "h0": float(kernel.h0),
        "h1": [float(v) for v in kernel.h1],
        "h2": [float(v) for v in kernel.h2],
        "h3": [float(v) for v in kernel.h3],
        "metadata": metadata,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(document, fh, indent=2)
        fh.write("\n")


def load_kernel(path) -> tuple[VolterraKernel, dict]:
    """Read a kernel archive; returns (kernel, metadata)."""
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"kernel archive is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise FormatError("kernel archive must be a JSON object")
    memory = _require_integer(obj, "memory")
    h0 = _require_number(obj, "h0")
    h1 = _require_array(obj, "h1")
    h2 = _require_array(obj, "h2")
    h3 = _require_array(obj, "h3")
    for name, arr, want in (
        ("h1", h1, memory),
        ("h2", h2, packed2_size(memory)),
        ("h3", h3, packed3_size(memory)),
    ):
        if len(arr) != want:
            raise FormatError(
                f"kernel archive '{name}' has length {len(arr)}, expected {want} "
                f"for memory {memory}"
            )
    metadata = obj.get("metadata") or {}
    if not isinstance(metadata, dict):
        raise FormatError("kernel archive 'metadata' must be an object")
    try:
        kernel = VolterraKernel(memory, h0, h1, h2, h3)
    except ValueError as exc:
        raise FormatError(f"kernel archive is inconsistent: {exc}") from exc
    return kernel, metadata


def write_signal_csv(signal: Signal, path) -> None:
    """Write the CSV signal form: `sample_rate,<Hz>` then one sample/line.

    Values use 17 significant digits, the smallest count that round-trips
    any IEEE double exactly.
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"sample_rate,{signal.sample_rate:.17g}\n")
        for value in signal.samples:
            fh.write(f"{value:.17g}\n")


def read_signal_csv(path) -> Signal:
    """Read the CSV signal form; errors carry 1-based line numbers."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise FormatError("line 1: empty file, expected 'sample_rate,<Hz>' header")
    head = lines[0].split(",")
    if len(head) != 2 or head[0].strip() != "sample_rate":
        raise FormatError(f"line 1: expected 'sample_rate,<Hz>' header, got {lines[0]!r}")
    try:
        rate = float(head[1])
    except ValueError:
        raise FormatError(f"line 1: sample rate {head[1]!r} is not a number") from None
    samples = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            samples.append(float(line))
        except ValueError:
            raise FormatError(f"line {lineno}: {line!r} is not a number") from None
    if not samples:
        raise FormatError("line 2: no samples after the header")
    try:
        return Signal(np.asarray(samples, dtype=np.float64), rate)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc

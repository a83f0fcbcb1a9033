"""Exception types shared across the package.

Generic argument validation raises plain :class:`ValueError`; the classes
here mark failures a caller may want to handle distinctly (rate violations,
degenerate designs, diverging adaptation, malformed files).
"""


class VolterrakitError(Exception):
    """Base class for all package-specific errors."""


class NyquistError(VolterrakitError, ValueError):
    """A requested frequency is at or above half the sample rate."""


class SpectrumError(VolterrakitError, ValueError):
    """A spectrum is inconsistent with a real-valued time signal."""


class DesignError(VolterrakitError, ValueError):
    """Filter design parameters are out of range or degenerate."""


class NumericError(VolterrakitError, ArithmeticError):
    """A computation produced a non-finite intermediate value."""


class DivergenceError(VolterrakitError, RuntimeError):
    """Adaptive estimation diverged instead of converging."""


class FormatError(VolterrakitError, ValueError):
    """A serialized document violates its format contract."""

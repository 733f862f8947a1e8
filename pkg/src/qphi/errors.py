"""Exception types shared across the package."""


class AngleParseError(ValueError):
    """Malformed or rational-valued angle text."""


class PrecisionError(RuntimeError):
    """Requested accuracy is unreachable at the configured maximum precision."""


class SingularTermError(ValueError):
    """log|1 - e^(2*pi*i*x)| requested exactly at its singularity."""


class DepthCapError(ValueError):
    """Liouville denominator depth beyond the computable cap."""


class InsufficientDepthError(ValueError):
    """Certificate needs more denominator depth than the sequence carries."""


class SizeRefusedError(ValueError):
    """Direct product refused: the index range is astronomically large."""

"""Exception types shared across the package."""


class PdcchError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(PdcchError, ValueError):
    """An argument is outside the domain an operation is defined on."""


class ConfigurationError(PdcchError, ValueError):
    """A configuration is structurally invalid for the requested operation."""


class UnsupportedNumerology(DomainError):
    """Monitoring-limit tables are only defined for mu in 0..3."""


class CodecError(PdcchError, ValueError):
    """Encoding or decoding chain cannot be applied to the given input."""


class PayloadTooLarge(CodecError):
    """DCI payload exceeds the 140-bit cap (164-bit CRC interleaver input)."""


class SizeAlignmentError(CodecError):
    """Size alignment could not reduce the DCI size set to the 3+1 budget."""

    def __init__(self, message: str, residual_sizes: dict):
        super().__init__(message)
        self.residual_sizes = dict(residual_sizes)

"""Error taxonomy shared across the package.

Exit-code mapping used by the CLI: CertificationFailure -> 1,
InvalidInput -> 2, PrecisionExhausted -> 3, WindowExhausted -> 4.
"""


class DiodivError(Exception):
    """Base class for all package errors."""


class InvalidInput(DiodivError):
    """Malformed or out-of-contract input (reducible polynomial, D <= 0, ...)."""


class CertificationFailure(DiodivError):
    """A certified check came out definitely false, or a structural guarantee broke."""


class PrecisionExhausted(DiodivError):
    """A certified decision could not be resolved at the maximum working precision."""


class WindowExhausted(DiodivError):
    """A finite-window search ended without a witness (honest failure, not an error in the data)."""

"""Exception types raised by gluekit."""


class GluekitError(Exception):
    """Base class for all library errors."""


class ParseError(GluekitError):
    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col
        self.bare_message = message


class UnsupportedRegime(GluekitError):
    pass


class RegimeMismatch(GluekitError):
    pass


class AlgebraMismatch(GluekitError):
    pass


class NotAUnit(GluekitError):
    pass


class NotIntegral(GluekitError):
    pass


class NoExactSource(GluekitError):
    pass


class CapExceeded(GluekitError):
    pass


class IncompatibleDatum(GluekitError):
    pass


class PrecisionLoss(GluekitError):
    pass


class SearchExhausted(GluekitError):
    def __init__(self, message: str, frontier=()):
        super().__init__(message)
        self.frontier = list(frontier)


class VerificationFailed(GluekitError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class DegreeBoundInconclusive(GluekitError):
    pass

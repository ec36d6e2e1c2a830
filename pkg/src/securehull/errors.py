"""Exception hierarchy shared by every layer."""


class SecureHullError(Exception):
    """Base class for all package errors."""


# geometry
class DegenerateHull(SecureHullError):
    pass


class OracleScaleExceeded(SecureHullError):
    pass


class Inconclusive(SecureHullError):
    """Iteration guard tripped before a verdict was reached."""

    def __init__(self, max_iter):
        super().__init__(f"no verdict after {max_iter} iterations")
        self.max_iter = max_iter


# encryption
class UnsupportedKeySize(SecureHullError):
    pass


class KeyMismatch(SecureHullError):
    pass


class EncodingOverflow(SecureHullError):
    pass


# protocols
class ProtocolError(SecureHullError):
    """Anything that aborts a two-party session."""


class LengthMismatch(ProtocolError):
    pass


class ValueOutOfRange(ProtocolError):
    pass


class ZeroCoordinate(ProtocolError):
    pass


class DegenerateDenominator(ProtocolError):
    pass


class AllZeroSum(ProtocolError):
    pass


class TransportError(ProtocolError):
    pass


class Timeout(TransportError):
    pass


class VersionMismatch(ProtocolError):
    pass


class ParameterMismatch(ProtocolError):
    pass


class ProtocolOrderViolation(ProtocolError):
    pass


class MalformedFrame(ProtocolError):
    pass


class RemoteAbort(ProtocolError):
    """The counterparty aborted; ``name`` carries its error class name."""

    def __init__(self, name, detail=""):
        super().__init__(f"{name}: {detail}" if detail else name)
        self.name = name
        self.detail = detail


def error_class(name):
    """Look up an error class by name (used to re-raise remote aborts)."""
    cls = globals().get(name)
    if isinstance(cls, type) and issubclass(cls, SecureHullError):
        return cls
    return None

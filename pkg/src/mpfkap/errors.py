"""Exception hierarchy shared by every layer of the package."""


class MpfKapError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(MpfKapError):
    """Invalid dimensions, moduli, or other malformed inputs."""


class SerializationError(MpfKapError):
    """A value does not fit the canonical 8-byte wire encoding."""


class ProtocolError(MpfKapError):
    """A protocol message or transcript violates the session contract."""


class RestartRequired(ProtocolError):
    """A degenerate (zero-containing) token was seen; the round must be redrawn."""


class DegenerateSetupError(ProtocolError):
    """Restart cap exceeded: the public setup cannot produce usable tokens."""


class FrameError(ProtocolError):
    """A wire frame failed to decode."""


class TransportError(MpfKapError):
    """The peer could not be reached or the exchange timed out."""

"""Exception types shared across the package."""


class ProtocolError(Exception):
    """Base class for everything raised by this package."""


class RingError(ProtocolError):
    """Illegal ring construction or arithmetic (bad modulus, impossible division)."""


class TopologyError(ProtocolError):
    """Channel graph rejected for the requested protocol."""


class DummyRandomnessError(ProtocolError):
    """A dummy participant tried to draw randomness.

    Dummies have no randomness source by definition; any draw attempt is a
    programming fault in the protocol, not a recoverable condition.
    """


class PhaseError(ProtocolError):
    """A two-phase protocol was driven out of order (e.g. reveal before commit)."""


class CheatDetected(ProtocolError):
    """A reveal-phase transmission failed corroboration.

    ``message_label`` names the offending message.
    """

    def __init__(self, message_label: str, detail: str = ""):
        self.message_label = message_label
        text = f"cheat detected at {message_label!r}"
        if detail:
            text += f": {detail}"
        super().__init__(text)


class BudgetExceeded(ProtocolError):
    """An exhaustive enumeration would exceed the configured budget."""


class ReplayError(ProtocolError):
    """Transcript file unreadable or truncated (distinct from a divergence verdict)."""

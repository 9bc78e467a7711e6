"""Exception hierarchy shared by every nicheck module."""


class NicheckError(Exception):
    """Base class for all errors raised by nicheck."""


class StructuralError(NicheckError, ValueError):
    """A net violates a well-formedness rule (unknown id, overlap, level clash...)."""


class FiringError(NicheckError):
    """A transition was fired at a marking that does not enable it.

    ``place`` names the first blocking place; ``index`` is the position of the
    offending transition when the error comes from a firing sequence.
    """

    def __init__(self, transition: str, place: str, needed: int, available: int,
                 index: int | None = None):
        self.transition = transition
        self.place = place
        self.needed = needed
        self.available = available
        self.index = index
        where = f" at position {index}" if index is not None else ""
        super().__init__(
            f"transition {transition!r}{where} is not enabled: place {place!r} "
            f"holds {available} token(s), needs {needed}"
        )


class UsageError(NicheckError, ValueError):
    """A check or construction was applied to an input it does not accept."""


class ConfigurationError(NicheckError, ValueError):
    """Search limits or other settings are out of range."""


class OracleOverflow(NicheckError):
    """The explicit-state oracle cannot handle the net within its limits."""


class WitnessError(NicheckError, AssertionError):
    """A witness failed to replay.  Always indicates an internal defect."""

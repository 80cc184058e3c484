"""Exception hierarchy shared by all scatterlab modules.

The CLI maps these onto distinct process exit codes, so library code
should raise the most specific class that applies.
"""


class ScatterlabError(Exception):
    """Base class for all scatterlab errors."""


class ConfigError(ScatterlabError, ValueError):
    """Invalid, contradictory, or malformed run configuration."""


class PhysicsError(ScatterlabError, ValueError):
    """A physical precondition is violated (invalid spec, k at a band
    edge, packet not fitting in its lead, undefined observable, ...)."""


class NumericalError(ScatterlabError, RuntimeError):
    """A numerical procedure failed (singular system, eigensolver cap
    exceeded, propagator tolerance unachievable, ...)."""

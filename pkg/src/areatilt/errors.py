"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration / ensemble spec."""


class DimensionError(ValueError):
    """Mismatched grid lengths or array shapes."""


class DomainError(ValueError):
    """Argument outside an operation's admissible domain."""


class InvalidStateError(ValueError):
    """A path configuration violates ordering / floor / ceiling / increment
    constraints."""


class InfeasibleError(ValueError):
    """The constraint set of an ensemble spec is empty."""


class StepSizeError(ValueError):
    """A PDE time step cannot be fitted to the requested output times or
    grid."""


class CouplingBrokenError(RuntimeError):
    """Pathwise order between coupled chains was violated.

    This falsifies the monotone-update implementation, not the theory; the
    offending states are attached for post-mortem.
    """

    def __init__(self, message, lower=None, upper=None, site=None, path=None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper
        self.site = site
        self.path = path

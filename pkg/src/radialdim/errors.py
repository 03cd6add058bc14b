"""Exception types shared across the package."""


class RadialDimError(Exception):
    """Base class for all package-specific errors."""


class DomainError(RadialDimError):
    """An argument lies outside the mathematical domain of the operation."""


class RootFindingFailure(RadialDimError):
    """Polynomial root solver failed to reach the residual tolerance."""


class UnivalenceFailure(RadialDimError):
    """A pullback step is not certifiably univalent.

    `step` is the 1-based index of the offending pullback step.
    """

    def __init__(self, step, message=""):
        self.step = step
        super().__init__(message or f"univalence certification failed at step {step}")


class NewtonDivergence(RadialDimError):
    """Newton tracking of an inverse branch failed to converge."""


class InsufficientData(RadialDimError):
    """Not enough certified data to perform the requested construction."""


class EnumerationOverflow(RadialDimError):
    """Word enumeration would exceed the configured cap."""


class BracketFailure(RadialDimError):
    """Pressure root bracketing failed (degenerate system)."""


class InsufficientMass(RadialDimError):
    """The selected branch family fails the mass condition."""


class NoQualifyingBranch(RadialDimError):
    """No certified branch clears the selection threshold."""


class SearchExhausted(RadialDimError):
    """Periodic-point search found no usable branch pair."""


class DegenerateFit(RadialDimError):
    """Box-counting regression residual exceeds the threshold."""


class ConfigParseError(RadialDimError):
    """A scenario configuration file could not be parsed or validated."""

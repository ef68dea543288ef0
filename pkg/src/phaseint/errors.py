"""Exception hierarchy shared by all phaseint modules."""


class PhaseIntError(Exception):
    """Base class for numerical failures raised by phaseint."""


class PoleError(PhaseIntError):
    """Evaluation requested at (or too close to) a pole of the potential."""


class SingularPointError(PhaseIntError):
    """Quantity undefined at a zero or pole of the potential."""


class RootFindingError(PhaseIntError):
    """Turning points could not be located to the requested tolerance."""


class NotRegularSingularError(PhaseIntError):
    """The origin is an irregular singular point (pole order above 2)."""


class ConvergenceRadiusError(PhaseIntError):
    """Series evaluation requested outside its trusted disc."""


class BranchCutError(PhaseIntError):
    """A multivalued function was evaluated on its cut without a sheet."""


class BranchPointError(PhaseIntError):
    """A path crosses or grazes a branch point of the phase integrand."""


class QuadratureError(PhaseIntError):
    """Adaptive quadrature failed to reach its tolerance."""


class IntegrationError(PhaseIntError):
    """The ODE integrator failed (step underflow or tolerance not met)."""


class ContourError(PhaseIntError):
    """Malformed path: gaps between segments, wrong closure, bad endpoints."""


class InconsistentRegionError(PhaseIntError):
    """Connection-matrix factors with mismatched region or dominancy labels."""


class ProjectionError(PhaseIntError):
    """Ill-conditioned projection onto the WKB basis."""


class TracingError(PhaseIntError):
    """Stokes-line tracing stalled."""


class ValidityWarning(RuntimeWarning):
    """WKB approximation is not accurate at a point where it was used."""

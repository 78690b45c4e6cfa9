"""Exception types shared across the package."""


class NVGatesError(Exception):
    """Base class for all package errors."""


class DimensionError(NVGatesError):
    """Operands act on incompatible Hilbert spaces."""


class SpecError(NVGatesError):
    """A gate or recipe specification is malformed."""


class HermiticityError(NVGatesError):
    """A matrix that must be Hermitian is not."""


class GeometryError(NVGatesError):
    """Spin positions are degenerate or otherwise unusable."""


class StateError(NVGatesError):
    """A state vector or density operator fails its invariants."""


class ScheduleError(NVGatesError):
    """Pulse events overlap or are otherwise untimeable."""


class SynthesisError(NVGatesError):
    """The pulse tuner cannot reach the requested conditional phase.

    Carries the best phase that was achievable so callers can report
    how far off the synthesis ended up.
    """

    def __init__(self, message, best_phase=None):
        super().__init__(message)
        self.best_phase = best_phase

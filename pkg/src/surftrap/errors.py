"""Exception hierarchy. Every error carries a stable machine-readable code."""


class SurftrapError(Exception):
    code = "surftrap_error"


class DomainError(SurftrapError, ValueError):
    """Evaluation point lies below the surface cutoff."""

    code = "domain_error"


class SubcriticalAngle(SurftrapError, ValueError):
    """No total internal reflection: n*sin(theta) <= 1."""

    code = "subcritical_angle"


class ZeroDetuning(SurftrapError, ValueError):
    code = "zero_detuning"


class NoStationaryPoint(SurftrapError):
    code = "no_stationary_point"


class NoSaddle(SurftrapError):
    code = "no_saddle"


class NoTrap(SurftrapError):
    code = "no_trap"


class NoBarrier(SurftrapError):
    code = "no_barrier"


class AboveBarrier(SurftrapError):
    """Energy at or above the barrier top; callers should treat T as 1."""

    code = "above_barrier"


class NonConvergence(SurftrapError):
    code = "non_convergence"


class InsufficientData(SurftrapError, ValueError):
    code = "insufficient_data"


class DegenerateDesign(SurftrapError, ValueError):
    code = "degenerate_design"


class DegenerateFit(SurftrapError, ValueError):
    code = "degenerate_fit"


class ParseError(SurftrapError, ValueError):
    code = "parse_error"

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class ValidationError(SurftrapError, ValueError):
    code = "validation_error"

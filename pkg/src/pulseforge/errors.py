"""Exception types raised across pulseforge."""


class PulseforgeError(Exception):
    """Base class for all library errors."""


class InvalidArgument(PulseforgeError, ValueError):
    pass


class IntegrationError(PulseforgeError, ArithmeticError):
    """A propagator or ODE integrator hit a non-finite value."""

    def __init__(self, message, t=None, stage=None):
        super().__init__(message)
        self.t = t
        self.stage = stage


class ConstructionError(PulseforgeError):
    pass


class SingularityError(PulseforgeError):
    """Wei-Norman coordinates crossed the sin(alpha2) = 0 chart boundary."""


class OptimizationError(PulseforgeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SynthesisError(PulseforgeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConfigError(PulseforgeError, ValueError):
    """Run configuration could not be parsed or validated."""

    def __init__(self, message, field=None, line=None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if field is not None:
            loc.append(f"field '{field}'")
        prefix = f"{', '.join(loc)}: " if loc else ""
        super().__init__(prefix + message)
        self.field = field
        self.line = line

"""Exception types raised across the package."""


class KindMismatchError(TypeError):
    """Operands of different kinds (e.g. a state and an operator) were combined."""


class DimensionMismatchError(ValueError):
    pass


class NormalizationError(ValueError):
    pass


class DegeneratePhaseError(ValueError):
    """sin(phi/2) * sin(varphi/2) vanishes, so no iteration count exists."""


class ConfigError(ValueError):
    """Invalid scenario configuration. The CLI maps this to exit code 2."""


class InvariantViolation(RuntimeError):
    """A numerical invariant failed at runtime. The CLI maps this to exit code 3."""

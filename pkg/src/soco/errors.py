"""Exception types shared across the package."""


class SocoError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(SocoError, ValueError):
    """Vector dimension does not match the body's ambient dimension."""


class InvalidDelta(SocoError, ValueError):
    """Shrinking parameter outside [0, 1)."""


class DegenerateDirection(SocoError, ArithmeticError):
    """Separator is (numerically) orthogonal to the affine hull."""


class IterationCapExceeded(SocoError, RuntimeError):
    """Infeasible projection hit its safety cap; geometry or oracle bug."""


class InvalidConfig(SocoError, ValueError):
    """Learner or run parameters violate their preconditions."""


class BlockOverflow(SocoError, RuntimeError):
    """More gradients fed to a block than its size allows."""


class NumericOverflow(SocoError, OverflowError):
    """Potential-function weight left the floating-point range."""


class InvalidScenario(SocoError, ValueError):
    """Adversary specification cannot produce a feasible sequence."""


class ConfigError(SocoError, ValueError):
    """Harness config text is invalid; carries key and line number."""

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        loc = ""
        if key is not None:
            loc += f" (key {key!r}"
            loc += f", line {line})" if line is not None else ")"
        elif line is not None:
            loc += f" (line {line})"
        super().__init__(message + loc)


class DegenerateFit(SocoError, ValueError):
    """Log-log fit impossible: a mean metric is not positive."""


class Unsupported(SocoError, NotImplementedError):
    """Operation needs an exact helper this geometry does not provide."""


class InfeasibleCertificate(SocoError, RuntimeError):
    """No point satisfying every round's constraint was found."""

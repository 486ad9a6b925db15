"""Exception hierarchy shared by all modules."""


class ChainError(ValueError):
    """Base class for invalid chain input."""


class DuplicateLabel(ChainError):
    pass


class UnknownLabel(ChainError):
    pass


class NegativeEntry(ChainError):
    pass


class RowSumError(ChainError):
    pass


class NotIrreducible(ChainError):
    pass


class NoAbsorption(ChainError):
    pass


class NotStationary(ChainError):
    pass


class ChiTooLarge(ChainError):
    pass


class ChiZero(ChainError):
    pass


class ChiUnitEntry(ChainError):
    pass


class ResultNotIrreducible(ChainError):
    pass


class ReducibleResultWarning(UserWarning):
    """Emitted instead of ResultNotIrreducible when irreducibility is not required."""


class InvalidInput(ChainError):
    """Several independent problems found in one input.

    ``errors`` holds the individual exception instances so callers can
    report every violated condition at once.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{type(e).__name__}: {e}" for e in self.errors))

    def has(self, kind):
        return any(isinstance(e, kind) for e in self.errors)


class InvalidChain(InvalidInput):
    pass


class InvalidChi(InvalidInput):
    pass


class NoConvergence(RuntimeError):
    def __init__(self, iterations, residual):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"power iteration did not converge after {iterations} iterations "
            f"(last residual {residual:.3e})"
        )


class ConsistencyError(ArithmeticError):
    """Two independent evaluations of the same closed-form quantity disagree."""


class ZeroProbabilityTransition(ValueError):
    pass


class PathTooShort(ValueError):
    pass


class ChainFileError(ValueError):
    """Chain definition text could not be parsed."""

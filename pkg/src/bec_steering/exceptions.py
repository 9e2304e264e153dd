"""Exception types shared across the package."""


class ConsistencyError(RuntimeError):
    """An internal cross-check failed (e.g. a variance came out negative)."""


class ConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap without converging."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best

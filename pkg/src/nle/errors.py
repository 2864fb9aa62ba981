"""Exception types shared across the package."""


class KernelError(ValueError):
    """Invalid kernel data (ellipticity band, mesh, or symmetry violated)."""


class CancellationError(KernelError):
    """First angular moments could not be removed within the band."""


class QuadratureError(RuntimeError):
    """Requested tolerance not reachable within the node budget."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class BudgetError(RuntimeError):
    """A cost guard tripped (e.g. expected jump count too large)."""

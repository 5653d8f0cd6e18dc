"""Exception types shared across the toolkit."""


class TflatError(Exception):
    """Base class for all toolkit errors."""


class SingularMatrixError(TflatError):
    """Generator matrix is not full rank."""


class ResourceLimitError(TflatError):
    """A grid or enumeration exceeded its configured cap."""


class ResolutionError(TflatError):
    """Grid step too coarse for the requested construction."""


class DegenerateMarginError(TflatError):
    """The certified thickening margin collapsed below the grid step."""


class PreconditionError(TflatError):
    """A documented operation precondition failed certification."""


class NotReducibleError(TflatError):
    """Block-triangular lattice cannot be reduced (D*A^-1 not symmetric)."""


class UnclassifiedLatticeError(TflatError):
    """No constructive pipeline matches this lattice (not a disproof)."""

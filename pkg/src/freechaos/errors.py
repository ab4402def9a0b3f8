"""Exception types shared across the package."""


class SizeLimitError(ValueError):
    """A combinatorial or table-size guard was exceeded."""


class GridMismatchError(ValueError):
    """Operands live on incompatible grids (bins, cell width, or arity)."""


class GroundSetMismatchError(ValueError):
    """A partition does not cover the expected ground set."""


class MirrorSymmetryError(ValueError):
    """An operation that requires a mirror-symmetric kernel got an asymmetric one."""


class IdentityMismatchError(ArithmeticError):
    """Two independently computed sides of an exact identity disagree."""

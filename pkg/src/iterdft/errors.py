"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """Input is empty, non-finite, mis-shaped or otherwise outside the contract."""


class SymmetryViolationError(ArithmeticError):
    """An inverse transform produced an imaginary residue above tolerance.

    Raised when a frequency-domain operator broke the conjugate symmetry
    that a real-valued inverse requires.
    """


class DegenerateSpecError(ValueError):
    """A sparsifier would zero nothing and so act as the identity."""

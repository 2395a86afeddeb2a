"""Exception hierarchy shared by all modules."""


class BraidkitError(Exception):
    """Base class for library errors."""


class DomainError(BraidkitError, ValueError):
    """A computation is undefined at the requested point (boundary, EP, pole, singularity)."""


class PhaseBoundaryError(DomainError):
    """The gap function vanishes on the Brillouin-zone circle."""


class ReferenceOnSpectrumError(DomainError):
    """The reference energy lies on the periodic spectrum."""


class EPOnGridError(DomainError):
    """Two band strands coincide on a sampled momentum."""

    def __init__(self, message: str, k: float | None = None):
        super().__init__(message)
        self.k = k


class SingularLaplacianError(DomainError):
    """The circuit Laplacian is singular or ill conditioned at the drive frequency."""


class NotRepresentableError(DomainError):
    """Model couplings cannot be mapped onto passive/INIC circuit elements."""


class ConvergenceError(BraidkitError, RuntimeError):
    """An iterative solver did not converge; ``partial`` holds what was obtained."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial

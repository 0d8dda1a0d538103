"""Exception types shared across the simulation modules."""


class SpinMetroError(Exception):
    """Base class for all library errors."""


class NotHermitian(SpinMetroError):
    """Matrix failed the Hermitian symmetry check."""


class InvalidSpin(SpinMetroError):
    """Spin quantum number is not a positive half-integer."""


class DegenerateSpectrum(SpinMetroError):
    """Hamiltonian spectrum is degenerate; signals an invalid axis upstream."""


class NotNormalized(SpinMetroError):
    """State or probability vector violates its normalization."""


class DivergentFI(SpinMetroError):
    """An outcome has vanishing probability but non-vanishing sensitivity."""


class BadCoefficients(SpinMetroError):
    """Entanglement coefficients violate their constraints."""


class NonOrthogonalAncilla(SpinMetroError):
    """Ancilla branch states are not mutually orthogonal; the direct
    branch measurement does not apply (use the projected-vector protocol)."""


class ZeroProjection(SpinMetroError):
    """The target branch has no component inside the solution space."""


class NotSpecialCase(SpinMetroError):
    """Inputs do not match any degenerate special-case branch."""


class UnreachableCase(SpinMetroError):
    """The requested collapse target cannot be reached for these inputs."""


class OutOfDomain(SpinMetroError):
    """Closed-form expression evaluated outside its validity domain."""


class FlatLikelihood(SpinMetroError):
    """Likelihood is constant over the whole search domain."""


class ConfigError(SpinMetroError):
    """Run configuration is missing, malformed, or inconsistent."""

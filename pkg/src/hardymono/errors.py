"""Exception hierarchy.

Two failure families matter to callers (and to the CLI exit codes):

* :class:`DomainError` -- the request itself is invalid (exponent outside the
  half plane, evaluation point outside (0,1), degenerate inputs, ...).
* :class:`IllConditioningError` -- the request is fine but the current
  precision cannot resolve it; ``info["required_bits"]`` carries an estimate
  of a precision that would.
"""


class HardymonoError(Exception):
    """Base class for all package errors."""

    exit_code = 2

    def __init__(self, message, **info):
        super().__init__(message)
        self.info = dict(info)


class DomainError(HardymonoError):
    """Input outside the mathematical domain of the operation."""

    exit_code = 2


class HalfPlaneError(DomainError):
    """Exponent with Re(s) <= -1/2 (plus margin); x^s would leave L^2[0,1]."""


class BackendError(DomainError):
    """Operation not supported by the active scalar backend."""


class DegenerateKernelError(DomainError):
    """Kernel vector is empty / the rational symbol cannot be formed."""


class CaseTwoAnomalyError(DomainError):
    """The symbol vanishes at s = -1, so no exponent 0 is produced."""


class DegenerateSubspaceError(DomainError):
    """The reconstructed exponent multiset is empty."""


class SpaceDenseError(DomainError):
    """No basis vector e_k escapes the subspace within the search budget."""


class UnboundedScalingError(DomainError):
    """All moments vanish; the scaling constant has no finite supremum."""


class ReconstructionDomainError(DomainError):
    """A reconstructed exponent falls outside the admissible half plane."""


class QuadratureError(HardymonoError):
    """The adaptive integrator could not certify the requested tolerance."""


class IllConditioningError(HardymonoError):
    """Working precision is insufficient for a reliable answer."""

    exit_code = 3

    @property
    def required_bits(self):
        return self.info.get("required_bits")


class PrecisionEscalationError(IllConditioningError):
    """An iteration failed to converge at the current precision."""

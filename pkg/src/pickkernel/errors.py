"""Exception hierarchy.

Every error carries a short machine-readable ``code`` that the CLI echoes in
its ``{"error": code, "detail": ...}`` object.
"""


class PickKernelError(ValueError):
    code = "error"


class DomainError(PickKernelError):
    code = "domain_error"


class UnknownPoint(PickKernelError):
    code = "unknown_point"


class NonFiniteEntry(PickKernelError):
    code = "non_finite_entry"


class DimensionMismatch(PickKernelError):
    code = "dimension_mismatch"


class NotPSD(PickKernelError):
    code = "not_psd"


class VanishingKernel(PickKernelError):
    code = "vanishing_kernel"


class DegenerateBasePoint(PickKernelError):
    code = "degenerate_base_point"


class ShapeMismatch(PickKernelError):
    code = "shape_mismatch"


class NonConvergence(PickKernelError):
    code = "non_convergence"


class PreconditionFailed(PickKernelError):
    code = "precondition_failed"


class InfeasibleBase(PickKernelError):
    code = "infeasible_base"


class HypothesisFailed(PickKernelError):
    code = "hypothesis_failed"

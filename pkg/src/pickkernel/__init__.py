"""Finite-point-set computations for complete Pick kernels."""

from .errors import *  # noqa: F403
from .kernel_core import (
    DEFAULT_TOL,
    HermitianMatrix,
    KernelSpec,
    PointSet,
    PSDReport,
    assemble_gram,
    evaluate_kernel,
    psd_check,
    rank_factorization,
    schur_product,
)
from .multiplier import (
    ExtensionDisk,
    MultiplierData,
    PickReport,
    defect_gram,
    defect_invariance_check,
    grid_scan_disk,
    is_contractive_multiplier,
    multiplier_norm,
    one_point_extension_disk,
    pick_feasible,
)
from .pick_analysis import (
    CriterionReport,
    IrreducibilityReport,
    cpp_check,
    cpp_verdict,
    fz_gram,
    irreducibility_check,
    schur_complement_gram,
)
from .proof_engine import (
    InductionStepRecord,
    ProofCertificate,
    induction_step,
    necessity_certificate,
    shuffled_certificates,
)

__version__ = "0.1.0"

"""Executable form of the inductive necessity argument for complete Pick kernels.

Given an ordering ``x_1, ..., x_M`` the engine proves, one prefix at a time,
that ``F_{x_{N+1}}`` is PSD on ``x_1..x_N`` from the same statement for
``F_{x_N}`` on ``x_1..x_{N-1}``. Each step records every intermediate matrix
and a named check for every matrix fact the argument asserts:

``hypothesis``              F_{x_N} on x_1..x_{N-1} is PSD
``zero_padding``            padding it with a zero row/column gives F_{x_N} on x_1..x_N
``factorization``           A = V V^* with rows v_i
``rank_one_identity``       (1 - v_i v_j^*) k_ij = k_iN k_Nj / k_NN
``rank_one_psd``            that matrix is PSD of rank one
``kz_defect``               (1 - v_i v_j^*) k^{x_{N+1}}_ij is PSD
``kz_defect_identity``      ... and equals (k_iN k_Nj / k_NN) F_{x_{N+1}}(x_i, x_j)
``schur_scaler``            (k_NN / (k_iN k_Nj)) is PSD of rank one
``schur_product_identity``  scaler o kz_defect matrix reproduces F_{x_{N+1}}
``schur_product``           ... and is PSD
``conclusion``              F_{x_{N+1}} on x_1..x_N, assembled directly, is PSD

The ``kz_defect`` check stands in for the contractive multiplier whose
existence the complete Pick property would guarantee: it is not constructed,
so a failure there is evidence that the kernel lacks the property.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisFailed, PickKernelError, VanishingKernel
from .kernel_core import (
    DEFAULT_TOL,
    HermitianMatrix,
    KernelSpec,
    PointSet,
    assemble_gram,
    psd_check,
    rank_factorization,
    schur_product,
)
from .pick_analysis import (
    VANISHING_TOL,
    CriterionReport,
    fz_gram,
    schur_complement_gram,
)

PADDING_TOL = 1e-12
IDENTITY_TOL = 1e-8


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    verdict: str | None = None
    min_eigenvalue: float | None = None
    residual: float | None = None
    rank: int | None = None


def _psd_check(name: str, M, tol, rank: int | None = None) -> Check:
    r = psd_check(M, tol)
    ok = r.is_psd and (rank is None or r.numerical_rank == rank)
    return Check(name, ok, r.verdict, r.min_eigenvalue, rank=r.numerical_rank)


def _residual_check(name: str, lhs, rhs, bound: float) -> Check:
    res = float(np.max(np.abs(np.asarray(lhs) - np.asarray(rhs))))
    return Check(name, res <= bound, residual=res)


@dataclass(frozen=True, eq=False)
class InductionStepRecord:
    n: int
    points: PointSet
    A: HermitianMatrix
    factors: np.ndarray
    rank_one_matrix: HermitianMatrix
    schur_scaler: HermitianMatrix
    conclusion: CriterionReport
    checks: list[Check] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def first_failure(self) -> str | None:
        return next((c.name for c in self.checks if not c.passed), None)


@dataclass(frozen=True)
class BaseCaseCheck:
    x: int
    z: int
    value: float
    passed: bool


@dataclass(frozen=True, eq=False)
class ProofCertificate:
    kernel: KernelSpec
    ordering: PointSet
    base_case: list[BaseCaseCheck]
    steps: list[InductionStepRecord]
    final_cross_check: Check | None
    overall: str | dict

    @property
    def valid(self) -> bool:
        return self.overall == "valid"


def _require_nonvanishing(K: np.ndarray) -> None:
    scale = max(1.0, float(np.max(np.abs(K.diagonal()))))
    small = np.abs(K) <= VANISHING_TOL * scale
    if np.any(small):
        i, j = map(int, np.argwhere(small)[0])
        raise VanishingKernel(f"k(x_{i + 1}, x_{j + 1}) vanishes")


def induction_step(
    spec: KernelSpec, points: PointSet, tol: float | None = None
) -> InductionStepRecord:
    """One step of the induction on ``points = x_1..x_{N+1}`` (``N >= 2``)."""
    N = len(points) - 1
    if N < 2:
        raise ValueError(f"an induction step needs at least 3 points, got {len(points)}")
    _require_nonvanishing(assemble_gram(spec, points).data)
    first = points.take(range(N))
    xN, xN1 = points[N - 1], points[N]
    checks: list[Check] = []

    hyp = fz_gram(spec, xN, points.take(range(N - 1)), tol)
    if not hyp.psd.is_psd:
        raise HypothesisFailed(
            f"F at x_{N} is not PSD on x_1..x_{N - 1} "
            f"(min eigenvalue {hyp.psd.min_eigenvalue:.3e})"
        )
    checks.append(Check("hypothesis", True, hyp.psd.verdict, hyp.psd.min_eigenvalue))

    # (1) expand with zeros
    padded = np.zeros((N, N), dtype=complex)
    padded[: N - 1, : N - 1] = hyp.gram_of_Fz.data
    A = HermitianMatrix(padded)
    direct_A = fz_gram(spec, xN, first, tol).gram_of_Fz
    checks.append(_residual_check("zero_padding", A, direct_A, PADDING_TOL * A.scale))

    # (2) factor A = V V^*
    V = rank_factorization(A, tol)
    VV = V @ V.conj().T
    checks.append(_residual_check("factorization", VV, A, IDENTITY_TOL * A.scale))

    # (3) (1 - v_i v_j^*) k_ij is the rank-one k_iN k_Nj / k_NN
    K = assemble_gram(spec, first).data
    kN, kNN = K[:, N - 1], K[N - 1, N - 1].real
    kscale = max(1.0, float(np.max(np.abs(K.diagonal()))))
    R = HermitianMatrix(np.outer(kN, kN.conj()) / kNN)
    one_minus = 1.0 - VV
    checks.append(
        _residual_check("rank_one_identity", one_minus * K, R, IDENTITY_TOL * kscale)
    )
    checks.append(_psd_check("rank_one_psd", R, tol, rank=1))

    # (4) contractive multipliers stay contractive against k^{x_{N+1}}
    Kz = schur_complement_gram(spec, xN1, first)
    C = HermitianMatrix(one_minus * Kz.data)
    checks.append(_psd_check("kz_defect", C, tol))

    # (5) which is the rank-one matrix times F_{x_{N+1}}
    conclusion = fz_gram(spec, xN1, first, tol)
    F = conclusion.gram_of_Fz
    checks.append(
        _residual_check("kz_defect_identity", C, R.data * F.data, IDENTITY_TOL * kscale)
    )

    # (6) the entrywise inverse of the rank-one matrix is rank-one PSD
    S = HermitianMatrix(kNN / np.outer(kN, kN.conj()))
    checks.append(_psd_check("schur_scaler", S, tol, rank=1))

    # (7) Schur product recovers F_{x_{N+1}}
    P = schur_product(S, C)
    checks.append(
        _residual_check("schur_product_identity", P, F, IDENTITY_TOL * max(1.0, F.scale))
    )
    checks.append(_psd_check("schur_product", P, tol))
    checks.append(
        Check("conclusion", conclusion.psd.is_psd, conclusion.psd.verdict,
              conclusion.psd.min_eigenvalue)
    )
    return InductionStepRecord(N, points, A, V, R, S, conclusion, checks)


def necessity_certificate(
    spec: KernelSpec, ordering: PointSet, tol: float | None = None
) -> ProofCertificate:
    """Run the base case and every induction step along ``ordering``.

    Stops at the first invalid step. A valid certificate ends with an
    independent re-check: ``F`` at the last point, assembled directly on the
    remaining points, must pass :func:`psd_check`.
    """
    M = len(ordering)
    if M < 3:
        raise ValueError(f"the ordering needs at least 3 points, got {M}")
    coeff = DEFAULT_TOL if tol is None else tol
    K = assemble_gram(spec, ordering).data
    _require_nonvanishing(K)

    base_case = []
    d = K.diagonal().real
    for i in range(M):
        for j in range(M):
            if i != j:
                val = float(1.0 - abs(K[i, j]) ** 2 / (d[i] * d[j]))
                base_case.append(BaseCaseCheck(i, j, val, val >= -coeff))
    if not all(b.passed for b in base_case):
        return ProofCertificate(spec, ordering, base_case, [], None,
                                {"invalid_at": {"step": 0, "check": "base_case"}})

    steps = []
    overall: str | dict = "valid"
    for n in range(2, M):
        try:
            rec = induction_step(spec, ordering.take(range(n + 1)), tol)
        except PickKernelError as exc:
            raise type(exc)(f"step {n}: {exc}") from exc
        steps.append(rec)
        if not rec.valid:
            overall = {"invalid_at": {"step": n, "check": rec.first_failure}}
            break

    final = None
    if overall == "valid":
        direct = fz_gram(spec, ordering[M - 1], ordering.take(range(M - 1)), tol)
        final = Check("final_cross_check", direct.psd.is_psd, direct.psd.verdict,
                      direct.psd.min_eigenvalue)
        if not final.passed:
            overall = {"invalid_at": {"step": M - 1, "check": "final_cross_check"}}
    return ProofCertificate(spec, ordering, base_case, steps, final, overall)


def shuffled_certificates(
    spec: KernelSpec,
    ordering: PointSet,
    shuffles: int,
    seed: int = 0,
    tol: float | None = None,
) -> list[tuple[list[int], ProofCertificate]]:
    """The given ordering followed by ``shuffles`` seeded random permutations."""
    rng = np.random.default_rng(seed)
    perms = [list(range(len(ordering)))]
    perms += [rng.permutation(len(ordering)).tolist() for _ in range(shuffles)]
    return [(p, necessity_certificate(spec, ordering.take(p), tol)) for p in perms]

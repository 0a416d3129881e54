"""The complete-Pick criterion kernel F_z and the Schur-complement kernel k^z.

For a kernel ``k`` and base point ``z``::

    k^z(x, y) = k(x, y) - k(x, z) k(z, y) / k(z, z)
    F_z(x, y) = 1 - k(x, z) k(z, y) / (k(z, z) k(x, y))

so that ``F_z(x, y) * k(x, y) == k^z(x, y)``. ``k`` has the complete Pick
property exactly when every ``F_z`` is positive semidefinite; on a finite
sample this can only be tested as a necessary condition.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBasePoint, VanishingKernel
from .kernel_core import (
    HermitianMatrix,
    KernelSpec,
    PointSet,
    PSDReport,
    as_point,
    psd_check,
)

log = logging.getLogger(__name__)

#: Kernel values below this times the Gram scale count as zero.
VANISHING_TOL = 1e-14
#: Relative threshold on 2x2 Gram determinants for independence of sections.
INDEPENDENCE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CriterionReport:
    base_point: complex
    sample: PointSet
    gram_of_Fz: HermitianMatrix
    psd: PSDReport

    @property
    def verdict(self) -> str:
        return self.psd.verdict


@dataclass(frozen=True)
class IrreducibilityReport:
    nonvanishing: bool
    independent_pairs: bool
    offending_pairs: list

    @property
    def irreducible(self) -> bool:
        return self.nonvanishing and self.independent_pairs


def _augmented(spec: KernelSpec, z: complex, sample: PointSet):
    """Gram block on ``sample``, column ``k(x_i, z)`` and ``k(z, z)``."""
    pts = np.append(sample.array, z)
    G = spec.matrix(pts, pts)
    n = len(sample)
    scale = max(1.0, float(np.max(np.abs(np.diag(G)))))
    return G[:n, :n], G[:n, n], G[n, n], scale


def _zero_base_rows(M: np.ndarray, sample: PointSet, z: complex) -> np.ndarray:
    hit = sample.array == z
    if np.any(hit):
        M[hit, :] = 0
        M[:, hit] = 0
    return M


def fz_gram(
    spec: KernelSpec, z, sample: PointSet, tol: float | None = None
) -> CriterionReport:
    """Gram of ``F_z`` on ``sample`` together with its PSD verdict."""
    z = as_point(z)
    K, g, kzz, scale = _augmented(spec, z, sample)
    cutoff = VANISHING_TOL * scale
    if abs(kzz) <= cutoff:
        raise VanishingKernel(f"k(z, z) vanishes at z={z!r}")
    small = np.abs(K) <= cutoff
    if np.any(small):
        i, j = map(int, np.argwhere(small)[0])
        raise VanishingKernel(
            f"k(x_{i}, x_{j}) vanishes; F_z is undefined (z={z!r})"
        )
    F = 1.0 - np.outer(g, g.conj()) / (kzz * K)
    F = _zero_base_rows(F, sample, z)
    H = HermitianMatrix(F)
    return CriterionReport(z, sample, H, psd_check(H, tol))


def schur_complement_gram(spec: KernelSpec, z, sample: PointSet) -> HermitianMatrix:
    """Gram of ``k^z`` on ``sample``: the kernel of functions vanishing at ``z``."""
    z = as_point(z)
    x = sample.array
    zz = np.array([z])
    kzz = spec.matrix(zz, zz)[0, 0]
    scale = max(1.0, float(np.max(np.abs(spec.matrix(x, x).diagonal()))), abs(kzz))
    if not kzz.real > VANISHING_TOL * scale:
        raise DegenerateBasePoint(f"k(z, z) = {kzz!r} is not positive at z={z!r}")
    kxz = spec.matrix(x, zz)[:, 0]
    kzx = spec.matrix(zz, x)[0, :]
    M = spec.matrix(x, x) - kxz[:, None] * kzx[None, :] / kzz
    return HermitianMatrix(_zero_base_rows(M, sample, z))


def cpp_check(
    spec: KernelSpec,
    base_points: PointSet,
    sample: PointSet,
    tol: float | None = None,
) -> list[CriterionReport]:
    """One :func:`fz_gram` report per base point, in input order.

    All verdicts ``psd`` is necessary (not sufficient) for the complete Pick
    property of ``spec``.
    """
    reports = []
    for idx, z in enumerate(base_points):
        try:
            reports.append(fz_gram(spec, z, sample, tol))
        except VanishingKernel as exc:
            raise VanishingKernel(f"base point #{idx} ({z!r}): {exc}") from exc
    return reports


def cpp_verdict(reports: list[CriterionReport]) -> str:
    return "psd" if all(r.psd.is_psd for r in reports) else "not_psd"


def irreducibility_check(spec: KernelSpec, sample: PointSet) -> IrreducibilityReport:
    """Diagnose the two halves of irreducibility on a finite sample.

    ``nonvanishing`` fails when some ``|k(x_i, x_j)|`` is numerically zero;
    ``independent_pairs`` fails when some pair of distinct indices has a
    numerically singular 2x2 Gram (for instance a duplicated point).
    """
    x = sample.array
    K = spec.matrix(x, x)
    diag = K.diagonal().real
    scale = max(1.0, float(np.max(np.abs(diag))))
    offending = []
    zero = np.abs(K) <= VANISHING_TOL * scale
    nonvanishing = not np.any(zero)
    independent = True
    n = len(sample)
    for i in range(n):
        for j in range(i + 1, n):
            det = diag[i] * diag[j] - abs(K[i, j]) ** 2
            bad_det = det <= INDEPENDENCE_TOL * scale**2
            if bad_det:
                independent = False
            if bad_det or zero[i, j]:
                offending.append((i, j))
    for i in range(n):
        if zero[i, i]:
            offending.append((i, i))
    return IrreducibilityReport(nonvanishing, independent, offending)

"""Multipliers on finite point sets.

A function ``W`` on points ``x_1..x_N`` with values in ``s x t`` matrices is a
contractive multiplier of the kernel ``k`` restricted to those points exactly
when the block defect matrix with blocks ``(I - W_i W_j^*) k(x_i, x_j)`` is
positive semidefinite.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import (
    InfeasibleBase,
    NonConvergence,
    PreconditionFailed,
    ShapeMismatch,
)
from .kernel_core import (
    DEFAULT_TOL,
    HermitianMatrix,
    KernelSpec,
    PointSet,
    PSDReport,
    as_point,
    assemble_gram,
    psd_check,
)
from .pick_analysis import schur_complement_gram

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MultiplierData:
    """Matrix targets ``W_i`` (all ``s x t``) attached to points of a kernel."""

    spec: KernelSpec
    points: PointSet
    targets: np.ndarray

    def __post_init__(self):
        W = np.array(self.targets, dtype=complex)
        if W.ndim == 1:
            W = W[:, None, None]
        if W.ndim != 3:
            raise ShapeMismatch(
                f"targets must be N matrices of shape (s, t), got array of shape {W.shape}"
            )
        if W.shape[0] != len(self.points):
            raise ShapeMismatch(f"{W.shape[0]} targets for {len(self.points)} points")
        if W.shape[1] < 1 or W.shape[2] < 1:
            raise ShapeMismatch(f"target matrices must be at least 1x1, got {W.shape[1:]}")
        if not np.all(np.isfinite(W)):
            raise ShapeMismatch("targets contain NaN or Inf")
        W.setflags(write=False)
        object.__setattr__(self, "targets", W)

    @classmethod
    def scalar(cls, spec: KernelSpec, points, values) -> MultiplierData:
        pts = points if isinstance(points, PointSet) else PointSet.of(points)
        return cls(spec, pts, np.asarray(values, dtype=complex).reshape(-1, 1, 1))

    @property
    def shape(self) -> tuple[int, int]:
        return self.targets.shape[1], self.targets.shape[2]

    def scaled(self, factor) -> MultiplierData:
        return MultiplierData(self.spec, self.points, factor * self.targets)


@dataclass(frozen=True)
class ExtensionDisk:
    center: complex | None
    radius: float | None
    verified: bool = True

    @property
    def empty(self) -> bool:
        return self.center is None

    def contains(self, w, slack: float = 0.0) -> bool:
        return not self.empty and abs(complex(w) - self.center) <= self.radius + slack


def _defect(targets: np.ndarray, K: np.ndarray, c: float) -> HermitianMatrix:
    N, s, _ = targets.shape
    WW = np.einsum("iab,jcb->iajc", targets, targets.conj())
    eye = np.eye(s)[None, :, None, :]
    D = (c * c * eye - WW) * K[:, None, :, None]
    return HermitianMatrix(D.reshape(N * s, N * s))


def defect_gram(data: MultiplierData, c: float = 1.0) -> HermitianMatrix:
    """Block matrix ``((c^2 I - W_i W_j^*) k(x_i, x_j))``, row index ``i*s + a``."""
    if c < 0:
        raise ValueError("c must be nonnegative")
    return _defect(data.targets, assemble_gram(data.spec, data.points).data, c)


def is_contractive_multiplier(data: MultiplierData, tol: float | None = None) -> PSDReport:
    return psd_check(defect_gram(data, 1.0), tol)


def multiplier_norm(data: MultiplierData, tol: float = 1e-8) -> float:
    """Least ``c`` for which the defect matrix at ``c`` is PSD, to within ``tol``.

    Bisection on ``c^2``: the defect grows in the PSD order with ``c^2``
    because its derivative is ``I (x) Gram``. Feasibility is decided by the
    exact sign of the smallest eigenvalue (zero tolerance) so the answer is
    not biased by the PSD tolerance; the returned value is the feasible end of
    the final bracket.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    W = data.targets
    K = assemble_gram(data.spec, data.points).data

    def feasible(c2: float) -> bool:
        return psd_check(_defect(W, K, np.sqrt(c2)), 0.0).is_psd

    if feasible(0.0):
        return 0.0
    sigma = max(float(np.linalg.norm(Wi, 2)) for Wi in W)
    kappa = 1.0
    while not feasible((sigma * kappa) ** 2):
        kappa *= 2.0
        if kappa > 2.0**40:
            raise NonConvergence(
                "no feasible c found below 2^40 * max ||W_i||; is the Gram PSD?"
            )
    lo, hi = 0.0, (sigma * kappa) ** 2
    # Bracket far below tol so homogeneity holds for scaled data too.
    while np.sqrt(hi) - np.sqrt(lo) > tol * 1e-2:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return float(np.sqrt(hi))


def defect_invariance_check(
    data: MultiplierData, z, tol: float | None = None
) -> tuple[PSDReport, PSDReport]:
    """PSD reports for the defect over ``k`` and over ``k^z``.

    A contractive multiplier stays contractive on the subspace of functions
    vanishing at ``z``; the second report is the finite-matrix form of that
    statement. It is guaranteed for every kernel when ``z`` is one of the
    data points, and for complete Pick kernels (which let ``W`` extend to
    ``z``) for arbitrary ``z``.
    """
    z = as_point(z)
    ambient = is_contractive_multiplier(data, tol)
    if not ambient.is_psd:
        raise PreconditionFailed(
            f"ambient defect is not PSD (min eigenvalue {ambient.min_eigenvalue:.3e})"
        )
    Kz = schur_complement_gram(data.spec, z, data.points)
    return ambient, psd_check(_defect(data.targets, Kz.data, 1.0), tol)


@dataclass(frozen=True, eq=False)
class PickReport:
    """Pick matrix in product form ``(1 - w_i conj(w_j)) k(z_i, z_j)`` and in
    quotient form ``(1 - w_i conj(w_j)) / (1 / k(z_i, z_j))``.

    For the Szego kernel the quotient denominator is computed directly as
    ``1 - z_i conj(z_j)``. ``psd`` (product form) decides the verdict.
    """

    product_matrix: HermitianMatrix
    quotient_matrix: HermitianMatrix
    psd: PSDReport
    quotient_psd: PSDReport

    @property
    def verdict(self) -> str:
        return self.psd.verdict

    @property
    def is_psd(self) -> bool:
        return self.psd.is_psd

    @property
    def min_eigenvalue(self) -> float:
        return self.psd.min_eigenvalue

    @property
    def forms_agree(self) -> bool:
        return self.psd.verdict == self.quotient_psd.verdict


def _pick_inputs(z, w):
    pts = z if isinstance(z, PointSet) else PointSet.of(z)
    w = np.array([as_point(v) for v in w], dtype=complex)
    if len(w) != len(pts):
        raise ShapeMismatch(f"{len(w)} targets for {len(pts)} nodes")
    return pts, pts.array, w


def pick_feasible(z, w, spec: KernelSpec | None = None, tol: float | None = None) -> PickReport:
    """Can ``z_i -> w_i`` be interpolated by a contractive multiplier of ``spec``?

    With the default Szego kernel this is the classical disk problem: a
    holomorphic ``f`` with ``|f| <= 1`` and ``f(z_i) = w_i`` exists iff the
    Pick matrix is PSD.
    """
    spec = KernelSpec.szego() if spec is None else spec
    pts, x, w = _pick_inputs(z, w)
    dups = pts.duplicate_pairs()
    if dups:
        log.debug("duplicate Pick nodes %s; targets must agree there", dups)
    K = spec.matrix(x, x)
    ww = 1.0 - np.outer(w, w.conj())
    product = HermitianMatrix(ww * K)
    if spec.variant == "szego":
        denom = 1.0 - np.outer(x, x.conj())
    else:
        denom = 1.0 / K
    quotient = HermitianMatrix(ww / denom)
    return PickReport(product, quotient, psd_check(product, tol), psd_check(quotient, tol))


def one_point_extension_disk(
    z, w, z_new, spec: KernelSpec | None = None, tol: float | None = None
) -> ExtensionDisk:
    """Set of values ``u`` at ``z_new`` keeping the Pick problem solvable.

    The augmented Pick matrix is PSD iff the Schur complement

        (1 - |u|^2) k00 - b(u)^* P^+ b(u),   b(u)_i = (1 - w_i conj(u)) k(z_i, z_new)

    is nonnegative (and ``b(u)`` lies in the range of ``P``). This is a
    quadratic inequality in ``u`` with positive leading coefficient, hence a
    closed disk (possibly a single point, possibly empty).
    """
    spec = KernelSpec.szego() if spec is None else spec
    coeff = DEFAULT_TOL if tol is None else tol
    base = pick_feasible(z, w, spec, tol)
    if not base.is_psd:
        raise InfeasibleBase(
            f"base Pick matrix is not PSD (min eigenvalue {base.min_eigenvalue:.3e})"
        )
    pts, x, wv = _pick_inputs(z, w)
    z_new = as_point(z_new)
    P = base.product_matrix.data
    a = spec.matrix(x, np.array([z_new]))[:, 0]
    d = wv * a
    k00 = spec.matrix(np.array([z_new]), np.array([z_new]))[0, 0].real

    vals, vecs = np.linalg.eigh(P)
    thresh = base.psd.tolerance_used
    keep = vals > thresh
    Vr, lr = vecs[:, keep], vals[keep]
    Vn = vecs[:, ~keep]

    def inner(p, q):
        # p^* P^+ q restricted to the numerical range of P
        return (Vr.conj().T @ p).conj() @ ((Vr.conj().T @ q) / lr)

    alpha = inner(a, a).real
    beta = inner(d, a)
    delta = inner(d, d).real
    gamma = k00 + delta
    scale = max(1.0, abs(k00), base.product_matrix.scale)

    if Vn.shape[1]:
        # b(u) = a - conj(u) d must lie in range(P)
        na, nd = Vn.conj().T @ a, Vn.conj().T @ d
        range_tol = np.sqrt(coeff) * np.sqrt(scale)
        if np.linalg.norm(nd) > range_tol:
            ubar = complex((nd.conj() @ na) / (nd.conj() @ nd))
            if np.linalg.norm(na - ubar * nd) > range_tol:
                return ExtensionDisk(None, None)
            u = ubar.conjugate()
            slack = (k00 - alpha) - abs(u) ** 2 * gamma + 2 * (u * beta).real
            if slack < -coeff * scale:
                return ExtensionDisk(None, None)
            return _verified(ExtensionDisk(u, 0.0), pts, wv, z_new, spec, tol)
        if np.linalg.norm(na) > range_tol:
            return ExtensionDisk(None, None)

    center = complex(np.conj(beta) / gamma)
    r2 = (k00 - alpha) / gamma + abs(beta) ** 2 / gamma**2
    if r2 < -coeff * scale:
        return ExtensionDisk(None, None)
    return _verified(ExtensionDisk(center, float(np.sqrt(max(r2, 0.0)))), pts, wv, z_new, spec, tol)


def _verified(disk, pts, w, z_new, spec, tol, samples: int = 8) -> ExtensionDisk:
    """Re-check the center and boundary samples against the augmented Pick test."""
    aug = pts.append(z_new)
    angles = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    probes = [disk.center] + [disk.center + disk.radius * np.exp(1j * t) for t in angles]
    ok = all(
        pick_feasible(aug, np.append(w, u), spec, tol).is_psd for u in probes
    )
    if not ok:
        log.warning("extension disk failed re-verification at the requested tolerance")
    return ExtensionDisk(disk.center, disk.radius, ok)


def grid_scan_disk(
    z, w, z_new, spec: KernelSpec | None = None, resolution: float = 1e-3,
    tol: float | None = None, chunk: int = 400_000,
) -> ExtensionDisk:
    """Brute-force oracle for :func:`one_point_extension_disk`.

    Tests every grid value ``u`` in the closed unit square at the given
    resolution with a batched eigenvalue solve of the augmented Pick matrix
    and returns the disk spanned by the extremes of the feasible set. The
    returned radius is the larger of the half-widths in the two axes.
    """
    spec = KernelSpec.szego() if spec is None else spec
    coeff = DEFAULT_TOL if tol is None else tol
    pts, x, wv = _pick_inputs(z, w)
    z_new = as_point(z_new)
    xs = np.append(x, z_new)
    K = spec.matrix(xs, xs)
    n = len(x)
    ticks = np.linspace(-1.0, 1.0, 2 * int(round(1.0 / resolution)) + 1)
    re, im = np.meshgrid(ticks, ticks, indexing="ij")
    U = (re + 1j * im).ravel()
    U = U[np.abs(U) <= 1.0]
    base = (1.0 - np.outer(wv, wv.conj())) * K[:n, :n]
    feasible_mask = np.zeros(U.size, dtype=bool)
    for lo in range(0, U.size, chunk):
        u = U[lo:lo + chunk]
        m = u.size
        M = np.empty((m, n + 1, n + 1), dtype=complex)
        M[:, :n, :n] = base
        col = (1.0 - wv[None, :] * u.conj()[:, None]) * K[:n, n][None, :]
        M[:, :n, n] = col
        M[:, n, :n] = col.conj()
        M[:, n, n] = (1.0 - np.abs(u) ** 2) * K[n, n]
        scale = np.maximum(1.0, np.max(np.abs(np.diagonal(M, axis1=1, axis2=2)), axis=1))
        lam = np.linalg.eigvalsh(M)[:, 0]
        feasible_mask[lo:lo + chunk] = lam >= -coeff * scale
    hits = U[feasible_mask]
    if hits.size == 0:
        return ExtensionDisk(None, None)
    c = complex(0.5 * (hits.real.max() + hits.real.min()), 0.5 * (hits.imag.max() + hits.imag.min()))
    r = 0.5 * max(hits.real.max() - hits.real.min(), hits.imag.max() - hits.imag.min())
    return ExtensionDisk(c, float(r))

"""Points, the kernel catalog, Gram assembly and Hermitian/PSD machinery.

Every finite matrix in the package is a :class:`HermitianMatrix`, and every
positivity verdict comes from :func:`psd_check`, which runs a full Hermitian
eigendecomposition so that a failing verdict always carries a witness vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainError,
    NonFiniteEntry,
    NotPSD,
    UnknownPoint,
)

#: Relative PSD tolerance coefficient; the absolute threshold is this times
#: ``max(1, max|diag|)``.
DEFAULT_TOL = 1e-9

Point = complex


def as_point(value) -> complex:
    """Coerce a number or an ``[re, im]`` pair to a finite complex point."""
    if isinstance(value, (list, tuple, np.ndarray)):
        if len(value) != 2:
            raise ValueError(f"a point must be [re, im], got {value!r}")
        p = complex(float(value[0]), float(value[1]))
    else:
        p = complex(value)
    if not (np.isfinite(p.real) and np.isfinite(p.imag)):
        raise NonFiniteEntry(f"point {p!r} is not finite")
    return p


@dataclass(frozen=True)
class PointSet:
    """Ordered, nonempty collection of complex points with optional labels.

    Matrix indices follow list order. Duplicates are allowed; they make Gram
    matrices singular and are reported by :meth:`duplicate_pairs`.
    """

    points: tuple[complex, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        pts = tuple(as_point(p) for p in self.points)
        if not pts:
            raise ValueError("PointSet must be nonempty")
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != len(pts):
                raise DimensionMismatch(
                    f"{len(labels)} labels for {len(pts)} points"
                )
            object.__setattr__(self, "labels", labels)

    @classmethod
    def of(cls, values: Iterable, labels: Iterable[str] | None = None) -> PointSet:
        return cls(tuple(values), None if labels is None else tuple(labels))

    @classmethod
    def random_disk(
        cls, n: int, rng: np.random.Generator, radius: float = 0.9
    ) -> PointSet:
        """``n`` points uniform (by area) in the disk of the given radius."""
        r = radius * np.sqrt(rng.uniform(size=n))
        theta = rng.uniform(0.0, 2 * np.pi, size=n)
        return cls(tuple(r * np.exp(1j * theta)))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[complex]:
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    @property
    def array(self) -> np.ndarray:
        return np.array(self.points, dtype=complex)

    def duplicate_pairs(self) -> list[tuple[int, int]]:
        seen: dict[complex, int] = {}
        pairs = []
        for j, p in enumerate(self.points):
            if p in seen:
                pairs.append((seen[p], j))
            else:
                seen[p] = j
        return pairs

    def append(self, p) -> PointSet:
        labels = None if self.labels is None else self.labels + (f"x{len(self)}",)
        return PointSet(self.points + (as_point(p),), labels)

    def take(self, idx: Sequence[int]) -> PointSet:
        labels = None if self.labels is None else tuple(self.labels[i] for i in idx)
        return PointSet(tuple(self.points[i] for i in idx), labels)


class HermitianMatrix:
    """Immutable dense complex Hermitian matrix.

    The input is symmetrized as ``(M + M*) / 2`` on construction, so the stored
    entries satisfy ``a[i, j] == conj(a[j, i])`` exactly.
    """

    __slots__ = ("_data",)

    def __init__(self, entries):
        if isinstance(entries, HermitianMatrix):
            self._data = entries._data
            return
        a = np.array(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise DimensionMismatch(f"expected a nonempty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise NonFiniteEntry("matrix has NaN or Inf entries")
        a = (a + a.conj().T) / 2
        a.setflags(write=False)
        self._data = a

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def dim(self) -> int:
        return self._data.shape[0]

    @property
    def scale(self) -> float:
        """``max(1, max |diagonal|)``: the reference magnitude for tolerances."""
        return max(1.0, float(np.max(np.abs(np.diag(self._data)))))

    def __array__(self, dtype=None, copy=None):
        return self._data if dtype is None else self._data.astype(dtype)

    def __getitem__(self, idx):
        return self._data[idx]

    def __eq__(self, other):
        if not isinstance(other, HermitianMatrix):
            return NotImplemented
        return self._data.shape == other._data.shape and bool(
            np.array_equal(self._data, other._data)
        )

    __hash__ = None

    def __repr__(self):
        return f"HermitianMatrix({np.array2string(self._data, precision=6)})"


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """A positive kernel on the unit disk or an explicit Gram table.

    ``szego`` is ``1/(1 - x conj(y))``, ``bergman`` its square, and
    ``power(alpha)`` is ``(1 - x conj(y))**(-alpha)``. All three share one
    evaluation path, so ``power(1)`` and ``szego`` agree bit for bit.
    """

    variant: str
    alpha: float | None = None
    table: HermitianMatrix | None = None
    table_points: PointSet | None = None
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.variant not in ("szego", "bergman", "power", "gram_table"):
            raise ValueError(f"unknown kernel variant {self.variant!r}")
        if self.variant == "power":
            if self.alpha is None or not self.alpha > 0 or not np.isfinite(self.alpha):
                raise ValueError("power kernel needs a finite alpha > 0")
            object.__setattr__(self, "alpha", float(self.alpha))
        if self.variant == "gram_table":
            if self.table is None or self.table_points is None:
                raise ValueError("gram_table needs both a matrix and its points")
            table = HermitianMatrix(self.table)
            if table.dim != len(self.table_points):
                raise DimensionMismatch(
                    f"gram_table matrix is {table.dim}x{table.dim} "
                    f"but has {len(self.table_points)} points"
                )
            index: dict[complex, int] = {}
            for i, p in enumerate(self.table_points):
                index.setdefault(p, i)
            object.__setattr__(self, "table", table)
            object.__setattr__(self, "_index", index)

    @classmethod
    def szego(cls) -> KernelSpec:
        return cls("szego")

    @classmethod
    def bergman(cls) -> KernelSpec:
        return cls("bergman")

    @classmethod
    def power(cls, alpha: float) -> KernelSpec:
        return cls("power", alpha=alpha)

    @classmethod
    def gram_table(cls, matrix, points: PointSet) -> KernelSpec:
        return cls("gram_table", table=HermitianMatrix(matrix), table_points=points)

    @property
    def exponent(self) -> float | None:
        """Exponent of ``1/(1 - x conj(y))`` for disk kernels, else None."""
        return {"szego": 1.0, "bergman": 2.0, "power": self.alpha}.get(self.variant)

    @property
    def is_disk_kernel(self) -> bool:
        return self.variant != "gram_table"

    @property
    def name(self) -> str:
        if self.variant == "power":
            return f"power({self.alpha:g})"
        return self.variant

    def __call__(self, x, y) -> complex:
        return evaluate_kernel(self, x, y)

    def matrix(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Rectangular block ``(k(xs[i], ys[j]))`` as a plain complex array."""
        xs = np.asarray(xs, dtype=complex).ravel()
        ys = np.asarray(ys, dtype=complex).ravel()
        if self.variant == "gram_table":
            ix = self._lookup(xs)
            iy = self._lookup(ys)
            return np.array(self.table.data[np.ix_(ix, iy)])
        for arr in (xs, ys):
            bad = np.abs(arr) >= 1
            if np.any(bad):
                raise DomainError(
                    f"point {arr[bad][0]!r} is outside the open unit disk"
                )
        w = 1.0 - xs[:, None] * ys[None, :].conj()
        a = self.exponent
        if float(a).is_integer():
            return 1.0 / w ** int(a)
        return np.exp(-a * np.log(w))

    def _lookup(self, pts: np.ndarray) -> list[int]:
        out = []
        for p in pts:
            try:
                out.append(self._index[complex(p)])
            except KeyError:
                raise UnknownPoint(f"point {complex(p)!r} is not in the gram_table") from None
        return out


def evaluate_kernel(spec: KernelSpec, x, y) -> complex:
    """Return ``k(x, y)``."""
    return complex(spec.matrix(np.array([as_point(x)]), np.array([as_point(y)]))[0, 0])


def assemble_gram(spec: KernelSpec, pts: PointSet) -> HermitianMatrix:
    """Gram matrix ``(k(x_i, x_j))`` of ``spec`` on ``pts``."""
    arr = pts.array
    return HermitianMatrix(spec.matrix(arr, arr))


@dataclass(frozen=True, eq=False)
class PSDReport:
    verdict: str
    min_eigenvalue: float
    tolerance_used: float
    witness: np.ndarray
    numerical_rank: int
    eigenvalues: np.ndarray = field(repr=False)

    @property
    def is_psd(self) -> bool:
        return self.verdict == "psd"


def _as_hermitian(A) -> HermitianMatrix:
    return A if isinstance(A, HermitianMatrix) else HermitianMatrix(A)


def psd_check(A, tol: float | None = None) -> PSDReport:
    """Certify or refute positive semidefiniteness of ``A``.

    ``tol`` is a relative coefficient: the matrix is declared PSD when its
    smallest eigenvalue is at least ``-tol * max(1, max|diag A|)``. The witness
    is the unit eigenvector of the smallest eigenvalue.
    """
    A = _as_hermitian(A)
    coeff = DEFAULT_TOL if tol is None else float(tol)
    if coeff < 0:
        raise ValueError("tol must be nonnegative")
    threshold = coeff * A.scale
    vals, vecs = np.linalg.eigh(A.data)
    lam = float(vals[0])
    return PSDReport(
        verdict="psd" if lam >= -threshold else "not_psd",
        min_eigenvalue=lam,
        tolerance_used=threshold,
        witness=vecs[:, 0].copy(),
        numerical_rank=int(np.count_nonzero(vals > threshold)),
        eigenvalues=vals,
    )


def schur_product(A, B) -> HermitianMatrix:
    """Entrywise (Hadamard) product."""
    A, B = _as_hermitian(A), _as_hermitian(B)
    if A.dim != B.dim:
        raise DimensionMismatch(f"cannot Schur-multiply {A.dim}x{A.dim} by {B.dim}x{B.dim}")
    return HermitianMatrix(A.data * B.data)


def rank_factorization(A, tol: float | None = None) -> np.ndarray:
    """Rows ``v_i`` with ``A[i, j] = v_i . conj(v_j)``.

    Returns an ``(n, r)`` array whose rows are the ``v_i``; ``r`` is the
    numerical rank. Eigenvalues within the PSD tolerance of zero are dropped.
    The factor is unique only up to a right unitary, so compare ``V V*``.
    """
    report = psd_check(A, tol)
    if not report.is_psd:
        raise NotPSD(
            f"min eigenvalue {report.min_eigenvalue:.3e} below "
            f"-{report.tolerance_used:.3e}"
        )
    A = _as_hermitian(A)
    vals, vecs = np.linalg.eigh(A.data)
    keep = vals > report.tolerance_used
    return vecs[:, keep] * np.sqrt(vals[keep])

"""JSON encodings shared by the CLI and the library.

Complex numbers are ``[re, im]``; matrices are row-major nested lists of
complex numbers. Decoders also accept a bare real number wherever a complex
number is expected.
"""

from __future__ import annotations

import numpy as np

from .kernel_core import HermitianMatrix, KernelSpec, PointSet, PSDReport, as_point
from .multiplier import ExtensionDisk, MultiplierData, PickReport
from .pick_analysis import CriterionReport, IrreducibilityReport
from .proof_engine import Check, InductionStepRecord, ProofCertificate


def enc_complex(c) -> list[float]:
    c = complex(c)
    return [float(c.real), float(c.imag)]


def dec_complex(v) -> complex:
    return as_point(v)


def enc_vector(v) -> list[list[float]]:
    return [enc_complex(c) for c in np.ravel(v)]


def enc_matrix(M) -> list[list[list[float]]]:
    return [[enc_complex(c) for c in row] for row in np.asarray(M)]


def dec_matrix(rows) -> np.ndarray:
    return np.array([[dec_complex(c) for c in row] for row in rows], dtype=complex)


def enc_pointset(pts: PointSet) -> dict:
    doc = {"points": [enc_complex(p) for p in pts]}
    if pts.labels is not None:
        doc["labels"] = list(pts.labels)
    return doc


def dec_pointset(doc) -> PointSet:
    if isinstance(doc, list):
        return PointSet.of(doc)
    return PointSet.of(doc["points"], doc.get("labels"))


def enc_kernel(spec: KernelSpec) -> dict:
    doc: dict = {"type": spec.variant}
    if spec.variant == "power":
        doc["alpha"] = spec.alpha
    elif spec.variant == "gram_table":
        doc["matrix"] = enc_matrix(spec.table.data)
        doc["points"] = enc_pointset(spec.table_points)
    return doc


def dec_kernel(doc) -> KernelSpec:
    if isinstance(doc, str):
        doc = {"type": doc}
    kind = doc["type"]
    if kind == "szego":
        return KernelSpec.szego()
    if kind == "bergman":
        return KernelSpec.bergman()
    if kind == "power":
        return KernelSpec.power(float(doc["alpha"]))
    if kind == "gram_table":
        return KernelSpec.gram_table(dec_matrix(doc["matrix"]), dec_pointset(doc["points"]))
    raise ValueError(f"unknown kernel type {kind!r}")


def enc_psd(report: PSDReport) -> dict:
    return {
        "verdict": report.verdict,
        "min_eigenvalue": report.min_eigenvalue,
        "tolerance": report.tolerance_used,
        "numerical_rank": report.numerical_rank,
        "witness": enc_vector(report.witness),
    }


def enc_criterion(report: CriterionReport) -> dict:
    return {
        "z": enc_complex(report.base_point),
        "verdict": report.psd.verdict,
        "min_eigenvalue": report.psd.min_eigenvalue,
        "tolerance": report.psd.tolerance_used,
        "matrix": enc_matrix(report.gram_of_Fz.data),
        "witness": enc_vector(report.psd.witness),
    }


def enc_irreducibility(report: IrreducibilityReport) -> dict:
    return {
        "nonvanishing": report.nonvanishing,
        "independent_pairs": report.independent_pairs,
        "offending_pairs": [list(p) for p in report.offending_pairs],
    }


def dec_multiplier(doc) -> MultiplierData:
    spec = dec_kernel(doc["kernel"])
    pts = dec_pointset(doc["points"])
    raw = doc["targets"]
    if all(not isinstance(t, list) or _is_pair(t) for t in raw):
        targets = np.array([dec_complex(t) for t in raw], dtype=complex)[:, None, None]
    else:
        targets = np.array([dec_matrix(t) for t in raw], dtype=complex)
    return MultiplierData(spec, pts, targets)


def _is_pair(v) -> bool:
    return len(v) == 2 and all(isinstance(x, (int, float)) for x in v)


def enc_multiplier(data: MultiplierData) -> dict:
    return {
        "kernel": enc_kernel(data.spec),
        "points": enc_pointset(data.points),
        "targets": [enc_matrix(W) for W in data.targets],
    }


def enc_pick(report: PickReport) -> dict:
    doc = enc_psd(report.psd)
    doc.update(
        product_matrix=enc_matrix(report.product_matrix.data),
        quotient_matrix=enc_matrix(report.quotient_matrix.data),
        quotient_verdict=report.quotient_psd.verdict,
        quotient_min_eigenvalue=report.quotient_psd.min_eigenvalue,
        forms_agree=report.forms_agree,
    )
    return doc


def enc_disk(disk: ExtensionDisk) -> dict:
    if disk.empty:
        return {"empty": True}
    return {"center": enc_complex(disk.center), "radius": disk.radius, "verified": disk.verified}


def enc_check(check: Check) -> dict:
    doc: dict = {"name": check.name, "passed": check.passed}
    if check.verdict is not None:
        doc["verdict"] = check.verdict
        doc["min_eigenvalue"] = check.min_eigenvalue
    if check.residual is not None:
        doc["residual"] = check.residual
    if check.rank is not None:
        doc["rank"] = check.rank
    return doc


def enc_step(rec: InductionStepRecord) -> dict:
    return {
        "n": rec.n,
        "valid": rec.valid,
        "points": enc_pointset(rec.points),
        "A": enc_matrix(rec.A.data),
        "factors": [enc_vector(v) for v in rec.factors],
        "rank_one_matrix": enc_matrix(rec.rank_one_matrix.data),
        "schur_scaler": enc_matrix(rec.schur_scaler.data),
        "conclusion": enc_criterion(rec.conclusion),
        "checks": [enc_check(c) for c in rec.checks],
    }


def enc_certificate(cert: ProofCertificate) -> dict:
    doc = {
        "kernel": enc_kernel(cert.kernel),
        "ordering": enc_pointset(cert.ordering),
        "base_case": [
            {"x": b.x, "z": b.z, "value": b.value, "passed": b.passed}
            for b in cert.base_case
        ],
        "steps": [enc_step(s) for s in cert.steps],
        "overall": cert.overall,
    }
    if cert.final_cross_check is not None:
        doc["final_cross_check"] = enc_check(cert.final_cross_check)
    return doc

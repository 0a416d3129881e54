import json

import numpy as np
import pytest

from pickkernel import (
    HypothesisFailed,
    KernelSpec,
    PointSet,
    VanishingKernel,
    fz_gram,
    induction_step,
    necessity_certificate,
    psd_check,
    shuffled_certificates,
)
from pickkernel.codec import enc_certificate

S = KernelSpec.szego()
B = KernelSpec.bergman()

CHECK_NAMES = [
    "hypothesis",
    "zero_padding",
    "factorization",
    "rank_one_identity",
    "rank_one_psd",
    "kz_defect",
    "kz_defect_identity",
    "schur_scaler",
    "schur_product_identity",
    "schur_product",
    "conclusion",
]


def test_szego_step_passes_every_check():
    rec = induction_step(S, PointSet.of([0.3, -0.2, 0.5]))
    assert [c.name for c in rec.checks] == CHECK_NAMES
    assert rec.valid and rec.conclusion.verdict == "psd"
    # every recorded matrix re-verified independently
    for M in (rec.A, rec.rank_one_matrix, rec.schur_scaler, rec.conclusion.gram_of_Fz):
        assert np.linalg.eigvalsh(M.data)[0] >= -1e-12


def test_step_record_invariants(rng):
    # three points keep the hypothesis a 1x1 Cauchy-Schwarz fact, so Bergman qualifies
    for spec, hi in ((S, 7), (B, 3), (KernelSpec.power(0.7), 7)):
        for _ in range(5):
            rec = induction_step(spec, PointSet.random_disk(int(rng.integers(3, hi + 1)), rng))
            A = rec.A.data
            assert np.all(np.abs(A[-1, :]) <= 1e-12 * rec.A.scale)
            assert np.all(np.abs(A[:, -1]) <= 1e-12 * rec.A.scale)
            assert psd_check(rec.rank_one_matrix).numerical_rank == 1
            assert psd_check(rec.schur_scaler).numerical_rank == 1
            ones = rec.rank_one_matrix.data * rec.schur_scaler.data
            assert np.max(np.abs(ones - 1)) <= 1e-10
            # the algebraic identities hold whether or not the PSD checks pass
            by_name = {c.name: c for c in rec.checks}
            for name in ("rank_one_identity", "kz_defect_identity", "schur_product_identity"):
                assert by_name[name].passed, (spec.name, name, by_name[name].residual)


def test_repeated_last_point_gives_zero_row():
    rec = induction_step(S, PointSet.of([0.3, -0.2, -0.2]))
    F = rec.conclusion.gram_of_Fz.data
    assert np.all(F[1, :] == 0) and np.all(F[:, 1] == 0)
    assert rec.conclusion.verdict == "psd"


def test_bergman_step_is_flagged():
    rec = induction_step(B, PointSet.of([0.5, -0.5, 0.25]))
    assert not rec.valid
    assert rec.first_failure == "kz_defect"
    direct = fz_gram(B, 0.25, PointSet.of([0.5, -0.5]))
    assert direct.verdict == "not_psd"
    assert rec.conclusion.psd.min_eigenvalue == direct.psd.min_eigenvalue


def test_step_needs_three_points():
    with pytest.raises(ValueError):
        induction_step(S, PointSet.of([0.1, 0.2]))


def test_step_rejects_failed_hypothesis():
    # F_0 on {1/2, -1/2} fails for Bergman, so it cannot serve as a hypothesis
    with pytest.raises(HypothesisFailed):
        induction_step(B, PointSet.of([0.5, -0.5, 0.0, 0.3]))


def test_step_rejects_vanishing_kernel():
    pts = PointSet.of([0, 1, 2])
    table = KernelSpec.gram_table([[1, 0, 0.5], [0, 1, 0.5], [0.5, 0.5, 1]], pts)
    with pytest.raises(VanishingKernel):
        induction_step(table, pts)


def test_szego_certificate_is_valid_and_sound(rng):
    pts = PointSet.random_disk(6, rng)
    cert = necessity_certificate(S, pts)
    assert cert.valid
    assert len(cert.steps) == 4
    assert len(cert.base_case) == 30 and all(b.passed for b in cert.base_case)
    direct = fz_gram(S, pts[5], pts.take(range(5)))
    assert cert.final_cross_check.passed == direct.psd.is_psd


def test_power_one_certificate_matches_szego(rng):
    pts = PointSet.random_disk(6, rng)
    a = enc_certificate(necessity_certificate(S, pts))
    b = enc_certificate(necessity_certificate(KernelSpec.power(1), pts))
    assert a.pop("kernel") == {"type": "szego"}
    assert b.pop("kernel") == {"type": "power", "alpha": 1.0}
    assert json.dumps(a) == json.dumps(b)


def test_certificate_is_deterministic(rng):
    pts = PointSet.random_disk(5, rng)
    a = json.dumps(enc_certificate(necessity_certificate(S, pts)))
    assert a == json.dumps(enc_certificate(necessity_certificate(S, pts)))


def test_bergman_certificate_names_the_failure():
    cert = necessity_certificate(B, PointSet.of([0.5, -0.5, 0.0]))
    assert cert.overall == {"invalid_at": {"step": 2, "check": "kz_defect"}}
    assert fz_gram(B, 0.0, PointSet.of([0.5, -0.5])).verdict == "not_psd"


def test_certificate_stops_at_first_invalid_step():
    cert = necessity_certificate(B, PointSet.of([0.5, -0.5, 0.0, 0.3, -0.1j]))
    assert len(cert.steps) == 1 and cert.final_cross_check is None


def test_complete_pick_powers_certify(rng):
    for alpha in (0.25, 0.5, 1.0):
        assert necessity_certificate(KernelSpec.power(alpha), PointSet.random_disk(7, rng)).valid


def test_certificate_needs_three_points():
    with pytest.raises(ValueError):
        necessity_certificate(S, PointSet.of([0.1, 0.2]))


def test_shuffled_certificates(rng):
    pts = PointSet.random_disk(5, rng)
    runs = shuffled_certificates(S, pts, 3, seed=7)
    assert len(runs) == 4 and runs[0][0] == list(range(5))
    assert all(c.valid for _, c in runs)
    again = shuffled_certificates(S, pts, 3, seed=7)
    assert [p for p, _ in runs] == [p for p, _ in again]

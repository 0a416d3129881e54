import numpy as np
import pytest
import scipy.linalg

from pickkernel import (
    DomainError,
    InfeasibleBase,
    KernelSpec,
    MultiplierData,
    NonConvergence,
    PointSet,
    PreconditionFailed,
    ShapeMismatch,
    assemble_gram,
    defect_gram,
    defect_invariance_check,
    grid_scan_disk,
    is_contractive_multiplier,
    multiplier_norm,
    one_point_extension_disk,
    pick_feasible,
    psd_check,
)

S = KernelSpec.szego()
IDENTITY_DATA = MultiplierData.scalar(S, [0, 0.5], [0, 0.5])


def random_multiplier(rng, spec, max_n=6, max_dim=2):
    n = int(rng.integers(1, max_n + 1))
    s, t = rng.integers(1, max_dim + 1, size=2)
    pts = PointSet.random_disk(n, rng)
    W = rng.normal(size=(n, s, t)) + 1j * rng.normal(size=(n, s, t))
    return MultiplierData(spec, pts, W)


def shrink_to_contractive(data):
    while not is_contractive_multiplier(data).is_psd:
        data = data.scaled(0.9)
    return data


def generalized_eig_norm(data):
    # independent oracle: c^2 >= lambda_max of (W W^* o K) relative to (I o K)
    N, s, _ = data.targets.shape
    K = assemble_gram(data.spec, data.points).data
    WW = np.einsum("iab,jcb->iajc", data.targets, data.targets.conj())
    M = (WW * K[:, None, :, None]).reshape(N * s, N * s)
    B = (np.eye(s)[None, :, None, :] * K[:, None, :, None]).reshape(N * s, N * s)
    return float(np.sqrt(max(scipy.linalg.eigh(M, B, eigvals_only=True)[-1], 0.0)))


def test_multiplier_data_shapes():
    with pytest.raises(ShapeMismatch):
        MultiplierData(S, PointSet.of([0, 0.1]), np.zeros((3, 1, 1)))
    with pytest.raises(ShapeMismatch):
        MultiplierData(S, PointSet.of([0]), np.zeros((1, 2)))
    assert IDENTITY_DATA.shape == (1, 1)


def test_zero_multiplier_defect_is_gram(rng):
    pts = PointSet.random_disk(4, rng)
    data = MultiplierData.scalar(KernelSpec.bergman(), pts, np.zeros(4))
    assert defect_gram(data) == assemble_gram(KernelSpec.bergman(), pts)
    assert is_contractive_multiplier(data).is_psd


def test_identity_multiplier_defect():
    D = defect_gram(IDENTITY_DATA, 1.0)
    np.testing.assert_allclose(D.data, [[1, 1], [1, 1]], atol=1e-15)
    r = psd_check(D)
    assert r.is_psd and r.min_eigenvalue == pytest.approx(0, abs=1e-15)
    assert not psd_check(defect_gram(IDENTITY_DATA, 0.9)).is_psd


def test_block_layout_matches_definition(rng):
    data = random_multiplier(rng, KernelSpec.power(1.5))
    N, s, _ = data.targets.shape
    K = assemble_gram(data.spec, data.points).data
    D = defect_gram(data, 0.7).data
    for i in range(N):
        for j in range(N):
            block = (0.49 * np.eye(s) - data.targets[i] @ data.targets[j].conj().T) * K[i, j]
            np.testing.assert_allclose(D[i * s:(i + 1) * s, j * s:(j + 1) * s], block, atol=1e-13)


def test_contractivity_examples():
    assert is_contractive_multiplier(MultiplierData.scalar(S, [0.3], [0.99j])).is_psd
    assert is_contractive_multiplier(IDENTITY_DATA).is_psd
    bad = MultiplierData.scalar(S, [0, 0.5], [0, 0.9])
    assert not is_contractive_multiplier(bad).is_psd


def test_defect_is_monotone_in_c(rng):
    for _ in range(20):
        data = random_multiplier(rng, KernelSpec.bergman())
        c1, c2 = sorted(rng.uniform(0, 3, size=2))
        diff = defect_gram(data, c2).data - defect_gram(data, c1).data
        assert psd_check(diff).is_psd


def test_multiplier_norm_examples():
    assert multiplier_norm(MultiplierData.scalar(S, [0.4j], [0.3 - 0.4j])) == pytest.approx(0.5, abs=1e-8)
    assert multiplier_norm(IDENTITY_DATA, 1e-8) == pytest.approx(1.0, abs=2e-8)
    assert multiplier_norm(MultiplierData.scalar(S, [0.1, 0.2], [0, 0])) == 0.0


def test_multiplier_norm_matches_generalized_eigenvalue(rng):
    for spec in (S, KernelSpec.bergman(), KernelSpec.power(0.5)):
        for _ in range(10):
            data = random_multiplier(rng, spec, max_n=4)
            assert multiplier_norm(data, 1e-8) == pytest.approx(generalized_eig_norm(data), abs=1e-7)


def test_multiplier_norm_consistency(rng):
    tol = 1e-8
    for _ in range(20):
        data = random_multiplier(rng, S)
        c = multiplier_norm(data, tol)
        assert psd_check(defect_gram(data, c + 2 * tol)).is_psd
        below = psd_check(defect_gram(data, c * (1 - 1e-3)))
        assert below.min_eigenvalue < -below.tolerance_used


def test_multiplier_norm_homogeneity(rng):
    tol = 1e-8
    for _ in range(20):
        data = random_multiplier(rng, S, max_dim=1)
        lam = complex(rng.normal(), rng.normal())
        assert abs(multiplier_norm(data.scaled(lam), tol) - abs(lam) * multiplier_norm(data, tol)) <= 2 * tol


def test_multiplier_norm_non_psd_gram_does_not_converge():
    pts = PointSet.of([0, 1])
    table = KernelSpec.gram_table([[1, 2], [2, 1]], pts)
    with pytest.raises(NonConvergence):
        multiplier_norm(MultiplierData.scalar(table, pts, [0, 0.5]))


def test_defect_invariance_examples():
    zero = MultiplierData.scalar(KernelSpec.bergman(), [0.1, -0.6j], [0, 0])
    amb, kz = defect_invariance_check(zero, 0.3)
    assert amb.is_psd and kz.is_psd
    amb, kz = defect_invariance_check(IDENTITY_DATA, 0.25)
    assert amb.is_psd and kz.is_psd
    with pytest.raises(PreconditionFailed):
        defect_invariance_check(MultiplierData.scalar(S, [0, 0.5], [0, 0.9]), 0.25)


@pytest.mark.parametrize("spec", [S, KernelSpec.power(0.5)], ids=lambda s: s.name)
def test_defect_invariance_random_complete_pick(spec, rng):
    for _ in range(50):
        data = shrink_to_contractive(random_multiplier(rng, spec))
        _, kz = defect_invariance_check(data, PointSet.random_disk(1, rng)[0])
        assert kz.is_psd


@pytest.mark.parametrize("spec", [KernelSpec.bergman(), KernelSpec.power(3)], ids=lambda s: s.name)
def test_defect_invariance_any_kernel_at_a_data_point(spec, rng):
    for _ in range(50):
        data = shrink_to_contractive(random_multiplier(rng, spec))
        z = data.points[int(rng.integers(len(data.points)))]
        _, kz = defect_invariance_check(data, z)
        assert kz.is_psd


def test_defect_invariance_can_fail_off_sample_for_bergman(rng):
    # the Bergman kernel lacks the complete Pick property, so W need not
    # extend to z and the k^z defect may lose positivity
    failures = 0
    for _ in range(100):
        data = shrink_to_contractive(random_multiplier(rng, KernelSpec.bergman()))
        _, kz = defect_invariance_check(data, PointSet.random_disk(1, rng)[0])
        failures += not kz.is_psd
    assert failures > 0


def test_pick_examples():
    r = pick_feasible([0, 0.5], [0, 0.5])
    assert r.is_psd and r.forms_agree
    np.testing.assert_allclose(r.quotient_matrix.data, [[1, 1], [1, 1]], atol=1e-15)
    np.testing.assert_allclose(r.psd.eigenvalues, [0, 2], atol=1e-12)
    r = pick_feasible([0, 0.5], [0, 0.9])
    assert not r.is_psd
    assert np.linalg.det(r.quotient_matrix.data).real == pytest.approx(19 / 75 - 1, abs=1e-12)
    r = pick_feasible([0.1, 0.2j, -0.3], [0, 1.01, 0.2])
    assert not r.is_psd
    with pytest.raises(DomainError):
        pick_feasible([0, 1.0], [0, 0])


def test_pick_quotient_and_product_forms_agree(rng):
    for _ in range(100):
        n = int(rng.integers(1, 6))
        z = PointSet.random_disk(n, rng)
        w = rng.uniform(0, 1.1, n) * np.exp(2j * np.pi * rng.uniform(size=n))
        assert pick_feasible(z, w).forms_agree


def test_pick_matches_schwarz_pick_for_two_points(rng):
    # two-point problem: feasible iff pseudo-hyperbolic distances shrink
    def rho(a, b):
        return abs(a - b) / abs(1 - np.conj(b) * a)

    for _ in range(100):
        z = PointSet.random_disk(2, rng)
        w = PointSet.random_disk(2, rng, radius=0.99).array
        margin = rho(*z.array) - rho(*w)
        if abs(margin) < 1e-6:
            continue
        assert pick_feasible(z, w).is_psd == (margin > 0)


def _pseudo_hyperbolic_disk(z0, w0, z_new):
    r = abs(z_new - z0) / abs(1 - np.conj(z0) * z_new)
    denom = 1 - r**2 * abs(w0) ** 2
    return w0 * (1 - r**2) / denom, r * (1 - abs(w0) ** 2) / denom


def test_extension_disk_origin_to_origin():
    disk = one_point_extension_disk([0], [0], 0.5)
    assert abs(disk.center) <= 1e-9 and disk.radius == pytest.approx(0.5, abs=1e-6)
    assert disk.verified


def test_extension_disk_single_node_closed_form(rng):
    for _ in range(30):
        z0, z_new = PointSet.random_disk(2, rng)
        w0 = PointSet.random_disk(1, rng, radius=0.95)[0]
        c, r = _pseudo_hyperbolic_disk(z0, w0, z_new)
        disk = one_point_extension_disk([z0], [w0], z_new)
        assert abs(disk.center - c) <= 1e-9 and disk.radius == pytest.approx(r, abs=1e-9)


def test_extension_disk_duplicate_node_is_a_point():
    disk = one_point_extension_disk([0], [0], 0)
    assert abs(disk.center) <= 1e-12 and disk.radius == 0


def test_extension_disk_degenerate_base():
    # the identity function is the only solution, so 1/4 is forced
    disk = one_point_extension_disk([0, 0.5], [0, 0.5], 0.25)
    assert disk.contains(0.25, slack=1e-6)
    assert disk.radius <= 1e-6


def test_extension_disk_rejects_infeasible_base():
    with pytest.raises(InfeasibleBase):
        one_point_extension_disk([0, 0.5], [0, 0.9], 0.25)


def test_extension_disk_against_grid_scan(rng):
    for _ in range(4):
        n = int(rng.integers(1, 4))
        z = PointSet.random_disk(n + 1, rng, radius=0.8)
        w = 0.5 * PointSet.random_disk(n, rng).array
        if not pick_feasible(z.take(range(n)), w).psd.min_eigenvalue > 1e-3:
            continue
        disk = one_point_extension_disk(z.take(range(n)), w, z[n])
        grid = grid_scan_disk(z.take(range(n)), w, z[n], resolution=5e-3)
        assert abs(grid.center - disk.center) <= 1e-2
        assert abs(grid.radius - disk.radius) <= 1e-2


def test_extension_disk_boundary_is_feasible(rng):
    z = PointSet.random_disk(3, rng)
    w = [0.1, -0.2j, 0.3]
    disk = one_point_extension_disk(z, w, 0.5j)
    aug = z.append(0.5j)
    for t in np.linspace(0, 2 * np.pi, 12, endpoint=False):
        edge = disk.center + disk.radius * np.exp(1j * t)
        assert pick_feasible(aug, list(w) + [edge]).is_psd
        assert not pick_feasible(aug, list(w) + [disk.center + 1.01 * disk.radius * np.exp(1j * t)]).is_psd

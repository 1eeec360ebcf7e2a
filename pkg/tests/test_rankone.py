"""Quaternionic-hyperbolic curvature algebra tests."""

import numpy as np
import pytest

from wpcurv import rankone, wedge
from wpcurv.errors import DimensionMismatch


@pytest.mark.parametrize("m", [1, 2, 3])
def test_structures_algebra(m):
    I, J, K = rankone.structures(m)
    d = 4 * m
    for A in (I, J, K):
        assert np.abs(A @ A.T - np.eye(d)).max() < 1e-12   # orthogonal
        assert np.abs(A @ A + np.eye(d)).max() < 1e-12     # square -id
    assert np.abs(I @ J - K).max() < 1e-12
    assert np.abs(J @ I + K).max() < 1e-12


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        rankone.quat_curvature(np.ones(4), np.ones(4), np.ones(4), np.ones(5), 1)
    with pytest.raises(DimensionMismatch):
        rankone.lie_triple_curvature(np.ones(8), np.ones(4), np.ones(4),
                                     np.ones(4), 1)


@pytest.mark.parametrize("m", [1, 2])
def test_curvature_symmetries(m):
    rng = np.random.default_rng(0)
    X, Y, Z, W = rng.standard_normal((4, 4 * m))
    R = lambda *a: rankone.quat_curvature(*a, m)
    assert R(X, Y, Z, W) == pytest.approx(-R(Y, X, Z, W))
    assert R(X, Y, Z, W) == pytest.approx(-R(X, Y, W, Z))
    assert R(X, Y, Z, W) == pytest.approx(R(Z, W, X, Y))
    assert R(X, X, Z, W) == pytest.approx(0.0, abs=1e-12)
    # first Bianchi identity
    assert (R(X, Y, Z, W) + R(Y, Z, X, W)
            + R(Z, X, Y, W)) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("m", [1, 2])
def test_isometry_invariance(m):
    rng = np.random.default_rng(1)
    X, Y, Z, W = rng.standard_normal((4, 4 * m))
    base = rankone.quat_curvature(X, Y, Z, W, m)
    for A in rankone.structures(m):
        rotated = rankone.quat_curvature(A @ X, A @ Y, A @ Z, A @ W, m)
        assert rotated == pytest.approx(base)


def test_sectional_range():
    """Holomorphic planes have curvature -4, totally real planes -1."""
    I, J, K = rankone.structures(1)
    v = np.array([1.0, 0, 0, 0])
    assert rankone.quat_curvature(v, I @ v, v, I @ v, 1) == pytest.approx(-4.0)
    # a direction in a different quaternionic block spans a totally real
    # plane with v
    m = 2
    v = np.zeros(8)
    v[0] = 1.0
    w = np.zeros(8)
    w[4] = 1.0
    assert rankone.quat_curvature(v, w, v, w, m) == pytest.approx(-1.0)


def test_paired_plane_identity():
    """R(Kv, Iv, Kv, Iv) equals R(v, Jv, v, Jv) for every v."""
    rng = np.random.default_rng(2)
    for m in (1, 2):
        I, J, K = rankone.structures(m)
        for _ in range(10):
            v = rng.standard_normal(4 * m)
            lhs = rankone.quat_curvature(K @ v, I @ v, K @ v, I @ v, m)
            rhs = rankone.quat_curvature(v, J @ v, v, J @ v, m)
            assert lhs == pytest.approx(rhs)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_evaluators_agree(m):
    """The space-form tensor and the Lie-triple bracket evaluator are
    proportional with a single constant across random inputs."""
    rng = np.random.default_rng(3)
    ratios = []
    for _ in range(10):
        X, Y, Z, W = rng.standard_normal((4, 4 * m))
        a = rankone.quat_curvature(X, Y, Z, W, m)
        b = rankone.lie_triple_curvature(X, Y, Z, W, m)
        if abs(a) > 1e-9:
            ratios.append(b / a)
    ratios = np.array(ratios)
    assert np.abs(ratios - ratios[0]).max() < 1e-9
    assert ratios[0] == pytest.approx(1.0)


def test_omega_nonzero_and_j_invariant():
    rng = np.random.default_rng(4)
    for m in (1, 2):
        I, J, K = rankone.structures(m)
        v = rng.standard_normal(4 * m)
        om = rankone.omega_wedge(v, m)
        assert np.linalg.norm(om) > 0
        assert np.abs(om + om.T).max() < 1e-12
        # invariance: omega(Jx, Jy) = omega(x, y) as a bilinear form
        assert np.abs(J.T @ om @ J - om).max() < 1e-12 * np.abs(om).max()


def test_wedge_j_action_involution():
    for m in (1, 2):
        W, pairs = rankone.wedge_j_action(m)
        assert len(pairs) == (4 * m) * (4 * m - 1) // 2
        assert np.abs(W @ W - np.eye(len(pairs))).max() < 1e-12


def test_wedge_j_action_matches_complex_basis():
    """Under the alignment x_i = e_{4b}, y_i = e_{4b+2} (and the partner
    pair inside each quaternionic block), the wedge action of J agrees
    with the matrix built directly on the complex wedge basis."""
    m = 1
    W, pairs = rankone.wedge_j_action(m)
    Jc = wedge.j_wedge_matrix(2)
    # real basis order for n = 2: x1, x2, y1, y2 -> disk coordinates
    perm = [0, 3, 2, 1]   # x1=e0, x2=e3, y1=e2, y2=e1
    cbasis = wedge.wedge_basis(2)
    lift = np.zeros((len(pairs), len(cbasis)))
    index = {p: i for i, p in enumerate(pairs)}
    for col, (a, b) in enumerate(cbasis):
        ra, rb = perm[a], perm[b]
        s = 1.0
        if ra > rb:
            ra, rb, s = rb, ra, -1.0
        lift[index[(ra, rb)], col] = s
    assert np.abs(W @ lift - lift @ Jc).max() < 1e-12


def test_lemma_margins():
    rep = rankone.lemma51_check(1, 10)
    assert rep["worst_j_invariance"] < 1e-12
    assert rep["min_lstsq_resid"] >= 0.5
    # the claimed curvature-expansion vanishing does not hold: the value
    # is -8 |v|^4 for every unit v (see the acceptance criterion report)
    for r in rep["records"]:
        assert r["null_expansion_abs"] == pytest.approx(8.0)


def test_mixed_term_is_zero_not_negative():
    """The root cause of the failed null claim: R(v,Jv,Kv,Iv) = 0."""
    rng = np.random.default_rng(5)
    for m in (1, 2):
        I, J, K = rankone.structures(m)
        v = rng.standard_normal(4 * m)
        v /= np.linalg.norm(v)
        mixed = rankone.quat_curvature(v, J @ v, K @ v, I @ v, m)
        assert mixed == pytest.approx(0.0, abs=1e-12)
        diag = rankone.quat_curvature(v, J @ v, v, J @ v, m)
        assert diag == pytest.approx(-4.0)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        rankone.lemma51_check(0, 5)
    with pytest.raises(ValueError):
        rankone.lemma51_check(1, 0)


def test_export(tmp_path):
    rep = rankone.lemma51_check(1, 2)
    rankone.export_report_json(rep, tmp_path / "r.json")
    assert (tmp_path / "r.json").exists()

"""Mesh, quadrature, Laplacian, resolvent and Green-kernel tests."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wpcurv import surface
from wpcurv.errors import KernelBudget, MeshBudget
from wpcurv.fuchsian import octagon_group


def test_level_bounds(group):
    for bad in (0, 9):
        with pytest.raises(ValueError):
            surface.build_mesh(group, bad)


def test_mesh_budget(group):
    with pytest.raises(MeshBudget):
        surface.build_mesh(group, 3, node_cap=10)


def test_triangle_count(group, surf3):
    assert len(surf3.triangles) == 8 * 4 ** 4


def test_area_convergence(group, surf4):
    target = 4 * np.pi
    coarse = surface.build_mesh(group, 1)
    assert abs(coarse.area - target) / target < 0.05
    assert abs(surf4.area - target) / target < 0.005


def test_euler_characteristic(surf3):
    assert surf3.euler_characteristic() == -2


def test_corner_class(group, surf3):
    """All 8 octagon corners are glued into one class of the quotient."""
    rv = np.abs(group.vertices[0])
    classes = [raw for raw in surf3.identification.values()]
    nodes_raw = surf3._raw[0]
    corner_classes = [
        c for c in classes
        if any(abs(abs(nodes_raw[i]) - rv) < 1e-12 for i in c)
    ]
    assert len(corner_classes) == 1
    assert len(corner_classes[0]) == 8


def test_boundary_nodes_pair_two_to_one(surf3):
    """Every non-corner boundary class contains exactly two raw nodes."""
    sizes = sorted(len(c) for c in surf3.identification.values() if len(c) > 1)
    assert sizes[-1] == 8          # the corner class
    assert set(sizes[:-1]) == {2}  # all other glued classes are side pairs


def test_stiffness_annihilates_constants(surf3):
    r = np.abs(surf3.stiffness @ np.ones(surf3.num_nodes))
    assert r.max() < 1e-9 * np.abs(surf3.stiffness.data).max()


def test_laplacian_nonpositive(surf3):
    rng = np.random.default_rng(0)
    for _ in range(100):
        f = rng.standard_normal(surf3.num_nodes)
        val = surf3.inner(surf3.apply_laplacian(f), f).real
        assert val <= 1e-9 * surf3.inner(f, f).real


def test_low_eigenvalues(surf3, surf4):
    """lambda_0 = 0; the first nonzero eigenvalue is positive, appears with
    multiplicity 3 (octagon symmetry), and is stable under refinement."""
    ev3 = surface.laplacian_eigenvalues(surf3, k=5)
    ev4 = surface.laplacian_eigenvalues(surf4, k=5)
    assert abs(ev3[0]) < 1e-8
    assert ev3[1] > 1.0
    # the mesh keeps only the dihedral symmetry, so the continuum triple
    # eigenvalue splits by O(h^2); the cluster width shrinks on refinement
    width3 = np.abs(ev3[1:4] - ev3[1]).max()
    width4 = np.abs(ev4[1:4] - ev4[1]).max()
    assert width3 < 0.02 * ev3[1]
    assert width4 < width3 / 2
    assert np.abs(ev3[1:] - ev4[1:]).max() < 0.03 * ev4[1]


def test_resolvent_fixes_constants(surf3):
    u = surface.apply_D(surf3, np.ones(surf3.num_nodes))
    assert np.abs(u - 1).max() < 1e-10


def test_resolvent_of_zero(surf3):
    u = surface.apply_D(surf3, np.zeros(surf3.num_nodes))
    assert np.abs(u).max() == 0.0


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_resolvent_self_adjoint_positive(surf3, seed):
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(surf3.num_nodes)
    g = rng.standard_normal(surf3.num_nodes)
    Df = surface.apply_D(surf3, f)
    Dg = surface.apply_D(surf3, g)
    scale = np.sqrt(surf3.inner(f, f).real * surf3.inner(g, g).real)
    assert abs(surf3.inner(Df, g) - surf3.inner(f, Dg)) < 1e-10 * scale
    assert surf3.inner(Df, f).real > -1e-10 * surf3.inner(f, f).real


def test_resolvent_spectral_mapping(surf3):
    """On an eigenfunction with -Delta phi = lam phi, D acts as the scalar
    2/(lam + 2)."""
    import scipy.sparse as sp
    import scipy.sparse.linalg as spla

    M = sp.diags(surf3.weights).tocsc()
    lam, vec = spla.eigsh(surf3.stiffness, k=5, M=M, sigma=0, which="LM")
    order = np.argsort(lam)
    for idx in order:
        phi = vec[:, idx]
        expected = 2.0 / (lam[idx] + 2.0) * phi
        got = surface.apply_D(surf3, phi)
        assert np.abs(got - expected).max() < 1e-8 * np.abs(phi).max()


def test_green_matches_resolvent(surf3, green3):
    rng = np.random.default_rng(1)
    for _ in range(20):
        f = rng.standard_normal(surf3.num_nodes)
        direct = surface.apply_D(surf3, f)
        via_kernel = green3.apply(surf3, f)
        assert np.abs(direct - via_kernel).max() < 1e-8 * np.abs(direct).max()


def test_green_report(green3):
    rep = green3.report
    assert rep["min_entry"] > 0
    assert rep["asymmetry_rel"] < 1e-12
    assert rep["rowsum_err"] < 1e-10


def test_green_budget(surf3):
    with pytest.raises(KernelBudget):
        surface.green_kernel(surf3, bytes_cap=1000)


def test_green_export_roundtrip(tmp_path, surf3, green3):
    prefix = tmp_path / "green"
    surface.export_green(green3, surf3, prefix)
    loaded = surface.load_green(prefix)
    assert np.array_equal(loaded.matrix, green3.matrix)
    assert loaded.report == green3.report


def test_node_hash_deterministic(group, surf3):
    again = surface.build_mesh(group, 3)
    assert surface.node_hash(again) == surface.node_hash(surf3)


def test_mesh_export(tmp_path, surf3):
    payload = surface.export_mesh_json(surf3, tmp_path / "mesh.json")
    assert len(payload["nodes"]) == surf3.num_nodes
    assert (tmp_path / "mesh.json").exists()

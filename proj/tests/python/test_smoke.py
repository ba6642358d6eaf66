"""Smoke tests for the frdpy module built by CMake (or scikit-build-core)."""

import numpy as np
import pytest

frdpy = pytest.importorskip("frdpy")


@pytest.fixture(scope="module")
def small_final():
    geom = frdpy.TorusGeometry(L=3, N=2, d=2, m=1)
    mset = frdpy.MultiIndexSet.gradients(2)
    lap = frdpy.laplacian_generator(mset, 1, 0.5, 2.0)
    aniso = frdpy.diagonal_generator(mset, 1, [1.0, 0.6], 0.5, 2.0)
    bl = frdpy.BaseBuilder(geom, lap, 0.0, 2)
    ba = frdpy.BaseBuilder(geom, aniso, 0.0, 2)
    lap_base, aniso_base = bl.build(), ba.build()
    lap_nt = frdpy.improved_decomposition(lap_base, 3)
    lap_n = frdpy.improved_decomposition(lap_base, 1)
    aniso_nt = frdpy.improved_decomposition(aniso_base, 3)
    K = max(frdpy.estimate_K(aniso_nt, lap_nt, 3), frdpy.estimate_K(lap_nt, lap_nt, 3))
    fin = frdpy.final_decomposition(aniso_nt, lap_nt, lap_n, K)
    return geom, ba, fin


def test_geometry_roundtrip():
    geom = frdpy.TorusGeometry(L=3, N=2, d=2, m=1)
    assert geom.side == 9
    assert geom.volume == 81
    assert geom.wrap([4, -4]) == [4, -4]
    assert geom.wrap([5, 13]) == [-4, 4]


def test_final_decomposition_invariants(small_final):
    geom, builder, fin = small_final
    assert fin.scales == geom.N + 1
    assert fin.sum_identity_defect(builder.green()) <= 1e-10
    for k in range(1, geom.N + 1):
        assert fin.finite_range_defect(k) <= 1e-9
        assert fin.min_mode_eigenvalue_rel(k) >= -1e-10
        tail = fin.tail_matrix(k)
        assert np.max(np.linalg.eigvalsh(tail)) <= 1e-10 * (np.linalg.norm(tail) + 1e-300)
    assert frdpy.final_lower_envelope_c(fin) > 0


def test_export_roundtrip(small_final):
    _, _, fin = small_final
    text = fin.to_text()
    back = frdpy.decomposition_from_text(text)
    assert back.to_text() == text
    assert back.K == fin.K


def test_sampling(small_final):
    geom, _, fin = small_final
    a = frdpy.sample_decomposition_scale(fin, 1, seed=42, count=8)
    b = frdpy.sample_decomposition_scale(fin, 1, seed=42, count=8, workers=2)
    c = frdpy.sample_decomposition_scale(fin, 1, seed=43, count=8)
    assert a.shape == (8, geom.volume, geom.m)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    # Samples are zero-mean fields.
    assert np.abs(a.sum(axis=1)).max() <= 1e-10 * max(np.abs(a).max(), 1.0)


def test_generator_json_roundtrip():
    mset = frdpy.MultiIndexSet.gradients_plus(2)
    gen = frdpy.random_generator(mset, 2, 0.5, 2.0, 7)
    back = frdpy.generator_from_json(gen.to_json())
    assert back.to_json() == gen.to_json()
    assert back.op_norm() == pytest.approx(gen.op_norm(), abs=0)

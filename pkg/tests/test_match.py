import json
import math

import numpy as np
import pytest

from sgltrans import oracle
from sgltrans.match import (
    MatchResult,
    PoseGrid,
    TableCache,
    grid_search,
    moved_spectrum,
    octahedral_rotations,
    overlap,
    planted_pose_experiment,
    results_to_json,
)
from sgltrans.sgl import SglIndex, SglSpectrum, cartesian_to_spherical, synthesize
from sgltrans.translate import Pose, coupled_element
from sgltrans.sgl import indices
from sgltrans.wigner import EulerZYZ


def _fx(spec):
    return lambda x: synthesize(spec, cartesian_to_spherical(x))


def test_constant_function_overlap_is_one():
    h = SglSpectrum.unit(3, SglIndex(1, 0, 0))
    for pose in (Pose(), Pose.from_vector(EulerZYZ(1, 2, 3), [0.5, -1.0, 2.0])):
        assert overlap(h, h, pose) == pytest.approx(1.0, abs=1e-13)


def test_parseval_at_identity():
    rng = np.random.default_rng(0)
    f, g = SglSpectrum.random(4, rng), SglSpectrum.random(4, rng)
    assert abs(overlap(f, g, Pose()) - np.sum(f.coeffs * np.conj(g.coeffs))) <= 1e-12


def test_overlap_matches_quadrature():
    rng = np.random.default_rng(1)
    f, g = SglSpectrum.random(3, rng), SglSpectrum.random(3, rng)
    for _ in range(3):
        pose = Pose.from_vector(EulerZYZ(rng.uniform(0, 6), rng.uniform(0, 3), rng.uniform(0, 6)),
                                rng.normal(size=3) * 0.5)
        ref = oracle.inner_product_h(pose.apply(_fx(f)), _fx(g), 6)
        assert abs(overlap(f, g, pose) - ref) <= 1e-8 * abs(ref)


def test_overlap_matches_coupled_element_sum():
    rng = np.random.default_rng(2)
    f, g = SglSpectrum.random(3, rng), SglSpectrum.random(3, rng)
    pose = Pose.from_vector(EulerZYZ(0.2, 1.3, 2.4), [0.3, 0.1, -0.5])
    idx = list(indices(3))
    total = sum(f[i] * np.conj(g[j]) * coupled_element(i, j, pose) for i in idx for j in idx)
    assert abs(overlap(f, g, pose) - total) <= 1e-12


def test_moved_spectrum_is_exact_rigid_motion():
    rng = np.random.default_rng(3)
    f = SglSpectrum.random(3, rng)
    pose = Pose.from_vector(EulerZYZ(2.0, 0.4, 1.0), [-0.6, 0.2, 0.9])
    moved = moved_spectrum(f, pose)
    pts = rng.normal(size=(30, 3))
    assert np.allclose(synthesize(moved, cartesian_to_spherical(pts)), pose.apply(_fx(f))(pts),
                       atol=1e-10)


def test_bandwidth_mismatch():
    rng = np.random.default_rng(4)
    with pytest.raises(ValueError):
        overlap(SglSpectrum.random(2, rng), SglSpectrum.random(3, rng), Pose())


def test_table_cache_rounds_lengths():
    cache = TableCache(2)
    a = cache.get(0.3)
    b = cache.get(0.3 + 1e-15)
    assert a is b and len(cache) == 1


def test_self_match_ranks_identity_first():
    rng = np.random.default_rng(5)
    f = SglSpectrum.random(3, rng)
    grid = PoseGrid(tuple(octahedral_rotations()), ((0.0, 0.0, 0.0),))
    results = grid_search(f, f, grid, top_k=3)
    best = results[0]
    assert np.allclose(best.pose.rotation.as_matrix(), np.eye(3), atol=1e-12)
    assert best.score == pytest.approx(f.norm_squared(), rel=1e-12)
    assert [r.rank for r in results] == [1, 2, 3]
    assert all(r.score == abs(r.overlap) for r in results)


def test_orthogonal_spectra_score_zero():
    f = SglSpectrum.unit(3, SglIndex(2, 1, 0))
    g = SglSpectrum.unit(3, SglIndex(3, 0, 0))
    grid = PoseGrid(tuple(octahedral_rotations()), ((0.0, 0.0, 0.0),))
    assert max(r.score for r in grid_search(f, g, grid)) <= 1e-14


def test_grid_order_does_not_change_scores():
    rng = np.random.default_rng(6)
    f, g = SglSpectrum.random(3, rng), SglSpectrum.random(3, rng)
    rots = tuple(octahedral_rotations()[:6])
    trans = ((0.0, 0.0, 0.0), (0.5, 0.0, 0.0), (0.0, -0.5, 0.5), (0.25, 0.25, 0.25))
    a = grid_search(f, g, PoseGrid(rots, trans))
    b = grid_search(f, g, PoseGrid(rots[::-1], trans[::-1]))
    key = lambda r: (tuple(np.round(r.pose.rotation.as_matrix(), 9).ravel()),
                     tuple(np.round(r.pose.translation_vector(), 12)))
    sa = {key(r): r.score for r in a}
    sb = {key(r): r.score for r in b}
    assert sa == sb


def test_ties_break_by_grid_index():
    h = SglSpectrum.unit(2, SglIndex(1, 0, 0))
    grid = PoseGrid((EulerZYZ(), EulerZYZ(0.5, 0.5, 0.5)), ((0.0, 0.0, 0.0),))
    results = grid_search(h, h, grid)
    assert [r.grid_index for r in results] == [0, 1]


def test_planted_pose_with_correlation_ranking():
    for seed in range(3):
        out = planted_pose_experiment(4, seed=seed, rank_by="correlation")
        assert out.planted_rank == 1
        assert out.results[0].correlation == pytest.approx(1.0, abs=1e-12)
        assert abs(out.truncation_residual) <= 1e-9 * out.g_norm_squared


def test_planted_score_equals_target_norm():
    out = planted_pose_experiment(4)
    planted = next(r for r in out.results if r.grid_index == out.planted_index)
    assert planted.score == pytest.approx(out.g_hat.norm_squared(), rel=1e-10)


def test_grid_json_roundtrip_and_errors():
    grid = PoseGrid((EulerZYZ(0.1, 0.2, 0.3),), ((1.0, 0.0, -2.0), (0.0, 0.0, 0.0)))
    back = PoseGrid.from_json(grid.to_json())
    assert back == grid
    with pytest.raises(ValueError):
        PoseGrid.from_json("{not json")
    with pytest.raises(ValueError):
        PoseGrid.from_json(json.dumps({"rotations": [[0, 0, 0]]}))
    with pytest.raises(ValueError):
        PoseGrid.from_json(json.dumps({"rotations": [], "translations": [[0, 0, 0]]}))


def test_results_json():
    h = SglSpectrum.unit(2, SglIndex(1, 0, 0))
    grid = PoseGrid((EulerZYZ(),), ((0.0, 0.0, 1.0),))
    data = json.loads(results_to_json(grid_search(h, h, grid)))
    assert data[0]["rank"] == 1
    assert data[0]["translation"] == pytest.approx([0.0, 0.0, 1.0])
    assert set(data[0]) == {"rank", "grid_index", "score", "correlation", "overlap",
                            "rotation", "translation"}

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import special_ortho_group

from trajgrowth.distributions import gaussian, make_rng
from trajgrowth.network import Network, NetworkConfig, build_network, forward_trace
from trajgrowth.trajectory import (
    GrowthAccumulator,
    Polyline,
    arc_length,
    arc_trajectory,
    growth_profile,
    line_trajectory,
    random_endpoints,
    segment_norms,
)


def test_line_length_exact():
    assert arc_length(line_trajectory([0, 0], [3, 4], 1)) == 5.0
    assert math.isclose(arc_length(line_trajectory([0, 0], [3, 4], 1000)), 5.0, rel_tol=1e-14)


def test_line_validation():
    with pytest.raises(ValueError):
        line_trajectory([1, 1], [1, 1], 10)
    with pytest.raises(ValueError):
        line_trajectory([0, 0], [1, 1], 0)
    with pytest.raises(ValueError):
        Polyline(np.zeros((1, 3)))


def test_unit_circle_perimeter():
    t = np.linspace(0, 2 * np.pi, 10**4 + 1)
    pts = np.column_stack([np.cos(t), np.sin(t)])
    assert abs(arc_length(pts) - 2 * np.pi) <= 1e-6


def test_semicircle_in_single_plane():
    x0, x1 = np.array([1.0, 0, 0]), np.array([-1.0, 0, 0])
    p = arc_trajectory(x0, x1, 10**4, 1, make_rng(0))
    # diameter 2 -> half circumference pi
    assert abs(arc_length(p) / math.pi - 1) <= 1e-3
    np.testing.assert_array_equal(p.points[0], x0)
    np.testing.assert_array_equal(p.points[-1], x1)
    mid = 0.5 * (x0 + x1)
    r = np.linalg.norm(p.points - mid, axis=1)
    np.testing.assert_allclose(r, 1.0, atol=1e-12)


def test_arc_validation_and_line_fallback():
    rng = make_rng(0)
    with pytest.raises(ValueError):
        arc_trajectory([0.0], [1.0], 10, 0, rng)
    with pytest.raises(ValueError):
        arc_trajectory([0.0, 0.0], [1.0, 0.0], 10, 2, rng)
    line = line_trajectory([0, 0], [1, 0], 10)
    np.testing.assert_array_equal(arc_trajectory([0, 0], [1, 0], 10, 0, rng).points, line.points)


def test_arc_longer_than_chord_in_high_dim():
    x0, x1 = random_endpoints(100, make_rng(1))
    p = arc_trajectory(x0, x1, 2000, 50, make_rng(2))
    assert arc_length(p) > np.linalg.norm(x1 - x0)


def test_random_endpoints_on_sphere():
    a, b = random_endpoints(784, make_rng(3))
    assert math.isclose(np.linalg.norm(a), 1.0, rel_tol=1e-14)
    assert math.isclose(np.linalg.norm(b), 1.0, rel_tol=1e-14)


@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_length_invariant_under_rotation_and_translation(dim, seed):
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((30, dim))
    q = special_ortho_group.rvs(dim, random_state=seed)
    moved = pts @ q.T + rng.standard_normal(dim)
    assert math.isclose(arc_length(moved), arc_length(pts), rel_tol=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_refinement_never_shortens(seed):
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((10, 3))
    mids = 0.5 * (pts[1:] + pts[:-1]) + 0.1 * rng.standard_normal((9, 3))
    fine = np.empty((19, 3))
    fine[0::2], fine[1::2] = pts, mids
    assert arc_length(fine) >= arc_length(pts) * (1 - 1e-12)


def test_segment_norms():
    np.testing.assert_array_equal(segment_norms([[0, 0], [3, 4], [3, 4]]), [5.0, 0.0])


def _zero_bias(net):
    return Network(net.weights, [np.zeros_like(b) for b in net.biases])


def test_growth_profile_layer_zero_and_zero_weights():
    poly = line_trajectory(np.zeros(4), np.ones(4), 50)
    net = Network([np.zeros((4, 4))] * 3, [np.ones(4)] * 3)
    prof = growth_profile(forward_trace(net, poly.points), poly)
    assert prof.lengths[0] == arc_length(poly)
    assert prof.lengths[1:] == [0.0, 0.0, 0.0]
    assert prof.mean_ratio[0] == 0.0
    # everything is dead after layer 1
    assert prof.dead_fraction == [0.0, 1.0, 1.0]
    assert prof.pooled_ratio() == 0.0


def test_growth_profile_homogeneity():
    cfg = NetworkConfig(16, 5, gaussian(2.0, 1.0, True), gaussian(0.01))
    net = _zero_bias(build_network(cfg, 9))
    x0, x1 = random_endpoints(16, make_rng(4))
    poly = line_trajectory(x0, x1, 200)
    base = growth_profile(forward_trace(net, poly.points), poly)
    for c in (0.5, 2.0):
        prof = growth_profile(forward_trace(net.scaled(c), poly.points), poly)
        for d in range(1, 6):
            assert math.isclose(prof.lengths[d], c ** d * base.lengths[d], rel_tol=1e-9)
        np.testing.assert_allclose(prof.mean_ratio, c * np.asarray(base.mean_ratio), rtol=1e-9)


def test_accumulator_matches_profile():
    cfg = NetworkConfig(12, 4, gaussian(2.0, 0.5, True), gaussian(0.01))
    net = build_network(cfg, 2)
    poly = line_trajectory(np.zeros(12), np.ones(12), 100)
    trace = forward_trace(net, poly.points)
    acc = GrowthAccumulator(poly.points)
    for h, z in zip(trace.pre, trace.post):
        acc.add(h, z)
    assert acc.profile == growth_profile(trace, poly)


def test_growth_profile_rejects_mismatch():
    poly = line_trajectory(np.zeros(3), np.ones(3), 10)
    net = Network([np.eye(3)], [np.zeros(3)])
    trace = forward_trace(net, np.ones((4, 3)))
    with pytest.raises(ValueError):
        growth_profile(trace, poly)

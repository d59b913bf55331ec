import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from singscan import (
    DampingFunction,
    dispersion,
    filter_labels,
    kde_density,
    knee_detect,
    knn_neighbor_sets,
    log_inv_p,
    purity,
    roc_auc,
    separation,
)
from singscan.scoring import CONCAVE_INC, CONVEX_DEC, DAMP_GLOBAL, DAMP_LOCAL


def test_log_inv_p_values():
    out = log_inv_p([1.0, math.exp(-1.0), 1e-300, np.nan])
    assert out[0] == pytest.approx(0.0)
    assert out[1] == pytest.approx(1.0)
    assert out[2] == pytest.approx(300 * math.log(10), rel=1e-3)
    assert np.isnan(out[3])


def test_log_inv_p_rejects_out_of_range():
    with pytest.raises(ValueError):
        log_inv_p([0.0])
    with pytest.raises(ValueError):
        log_inv_p([1.2])


def test_kde_normal_sample():
    rng = np.random.default_rng(0)
    grid, dens = kde_density(rng.standard_normal(10_000))
    at0 = dens[np.argmin(np.abs(grid))]
    assert at0 == pytest.approx(1.0 / math.sqrt(2 * math.pi), rel=0.15)
    assert np.all(dens >= 0.0)
    assert np.trapezoid(dens, grid) == pytest.approx(1.0, abs=0.01)


def test_kde_symmetric_data_gives_symmetric_density():
    rng = np.random.default_rng(1)
    half = rng.standard_normal(4000)
    values = np.concatenate([half, -half])  # exactly symmetric about 0
    grid, dens = kde_density(values)
    assert dens == pytest.approx(dens[::-1], abs=1e-10)


def test_kde_degenerate_inputs():
    with pytest.raises(ValueError, match="degenerate"):
        kde_density(np.ones(50))
    with pytest.raises(ValueError):
        kde_density([1.0])


def test_knee_straight_line_has_none():
    xs = np.linspace(0, 1, 50)
    assert knee_detect(xs, xs, 1.0, CONCAVE_INC) is None


def test_knee_of_saturating_curve():
    xs = np.linspace(0, 1, 400)
    ys = 1.0 - np.exp(-5.0 * xs)
    knee = knee_detect(xs, ys, 1.0, CONCAVE_INC)
    # independent brute-force oracle over the normalized difference curve
    xn = (xs - xs[0]) / (xs[-1] - xs[0])
    yn = (ys - ys.min()) / (ys.max() - ys.min())
    oracle = xs[np.argmax(yn - xn)]
    assert knee == pytest.approx(oracle, abs=1e-12)
    assert abs(knee - 0.32) < 0.05


def test_knee_convex_decreasing_orientation():
    xs = np.linspace(0, 1, 400)
    ys = np.exp(-5.0 * xs)
    knee = knee_detect(xs, ys, 1.0, CONVEX_DEC)
    assert knee is not None
    assert abs(knee - 0.32) < 0.05


def test_knee_unreachable_sensitivity():
    xs = np.linspace(0, 1, 100)
    ys = 1.0 - np.exp(-5.0 * xs)
    assert knee_detect(xs, ys, 1e9, CONCAVE_INC) is None


def test_knee_input_validation():
    with pytest.raises(ValueError):
        knee_detect([0, 1, 2], [0, 1, 2], 1.0, CONCAVE_INC)
    with pytest.raises(ValueError):
        knee_detect(np.arange(6), np.arange(6), 1.0, "sideways")


def test_filter_uniform_p_values_label_few():
    # Monte-Carlo: with uniform p-values (the manifold case) the knee cut
    # labels a small tail; on average no more than 10%.
    fracs = []
    for seed in range(20):
        rng = np.random.default_rng(seed)
        fracs.append(filter_labels(rng.random(2000)).mean())
    assert np.mean(fracs) <= 0.10
    assert max(fracs) <= 0.20


def test_filter_mixture_catches_the_atom():
    rng = np.random.default_rng(0)
    p = rng.random(1000)
    p[:100] = 1e-12
    labels = filter_labels(p)
    assert labels[:100].sum() == 100
    assert labels[100:].sum() <= 10


def test_filter_constant_p_values_all_zero():
    assert filter_labels(np.full(50, 0.25)).sum() == 0


def test_filter_missing_are_labeled_zero():
    rng = np.random.default_rng(1)
    p = rng.random(500)
    p[::7] = np.nan
    labels = filter_labels(p)
    assert labels[::7].sum() == 0


def test_filter_needs_ten_scored():
    with pytest.raises(ValueError):
        filter_labels(np.array([0.5] * 9))


def test_purity_examples():
    labels = np.array([1, 1, 0, 0, 0])
    nbrs = np.array([[0, 1, 2, 3]] * 5)
    nbrs[:, 0] = np.arange(5)
    got = purity(labels, np.array([[0, 1, 2, 3], [1, 0, 2, 3], [2, 0, 1, 3], [3, 0, 1, 2], [4, 0, 1, 2]]))
    assert got[0] == pytest.approx(0.5)
    assert purity(np.ones(4, int), np.tile(np.arange(4), (4, 1))) == pytest.approx(np.ones(4))
    assert purity(np.zeros(4, int), np.tile(np.arange(4), (4, 1))) == pytest.approx(np.zeros(4))


def test_roc_auc_examples():
    assert roc_auc([1, 2, 3, 4], [0, 0, 1, 1]) == 1.0
    assert roc_auc([1.0, 1.0, 1.0, 1.0], [0, 1, 0, 1]) == 0.5
    rng = np.random.default_rng(2)
    scores = rng.standard_normal(10_000)
    labels = rng.integers(0, 2, 10_000)
    assert roc_auc(scores, labels) == pytest.approx(0.5, abs=0.02)
    with pytest.raises(ValueError, match="AUC undefined"):
        roc_auc([1.0, 2.0], [1, 1])


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_roc_auc_invariant_under_increasing_transform(seed):
    rng = np.random.default_rng(seed)
    scores = rng.standard_normal(40)
    labels = np.concatenate([np.ones(20, int), np.zeros(20, int)])
    base = roc_auc(scores, labels)
    assert roc_auc(np.exp(scores), labels) == pytest.approx(base)
    assert roc_auc(3.0 * scores + 7.0, labels) == pytest.approx(base)


def test_separation_hand_enumerated_line():
    pts = np.array([[0.0], [1.0], [2.0], [-1.0], [-2.0]])
    labels = np.array([1, 1, 1, 0, 0])
    nbrs = np.tile(np.arange(5), (5, 1))
    nbrs[:, 0] = np.arange(5)
    s = separation(pts, labels, nbrs)
    # first label-1 point sits at 0: direction +1, t = (0, 1, 2, -1, -2),
    # every (one, zero) pair is correctly ordered
    assert s[0] == pytest.approx(1.0)


def test_separation_degenerate_cases():
    pts = np.array([[0.0], [1.0], [2.0]])
    # the only label-1 neighbor of point 0 is itself: direction is zero
    labels = np.array([1, 0, 0])
    nbrs = np.array([[0, 1, 2], [1, 0, 2], [2, 0, 1]])
    assert separation(pts, labels, nbrs)[0] == pytest.approx(0.5)
    # single-class neighborhood
    labels_all = np.array([1, 1, 1])
    assert separation(pts, labels_all, nbrs) == pytest.approx(np.full(3, 0.5))


def test_separation_random_labels_near_half():
    # The direction vector is built from the label-1 displacements themselves,
    # so random labels sit slightly above 1/2, approaching it as the
    # neighborhood grows.
    rng = np.random.default_rng(3)
    pts = rng.standard_normal((400, 2))
    labels = rng.integers(0, 2, 400)
    small = separation(pts, labels, knn_neighbor_sets(pts, 20)).mean()
    large = separation(pts, labels, knn_neighbor_sets(pts, 150)).mean()
    assert 0.5 <= small < 0.62
    assert 0.5 <= large < small


def test_dispersion_all_zero_labels():
    pts = np.random.default_rng(4).standard_normal((30, 2))
    nbrs = knn_neighbor_sets(pts, 10)
    rep = dispersion(pts, np.zeros(30, int), nbrs, alpha_reg=7.5)
    assert rep.dispersion == 0.0
    assert rep.global_purity == 0.0


def test_dispersion_all_one_labels_equals_alpha_reg():
    pts = np.random.default_rng(5).standard_normal((30, 2))
    nbrs = knn_neighbor_sets(pts, 10)
    rep = dispersion(pts, np.ones(30, int), nbrs, alpha_reg=7.5)
    # purity 1 everywhere and separation 1/2 make q = 1/4, damped to zero
    assert rep.purity_scores == pytest.approx(np.ones(30))
    assert rep.q_scores.max() <= 0.25 + 1e-12
    assert rep.dispersion == pytest.approx(7.5)


def test_dispersion_report_internal_consistency():
    rng = np.random.default_rng(6)
    pts = rng.standard_normal((200, 2))
    labels = (pts[:, 0] > 0.8).astype(int)
    nbrs = knn_neighbor_sets(pts, 20)
    rep = dispersion(pts, labels, nbrs, alpha_reg=50.0)
    assert rep.q_scores == pytest.approx(
        1.0 - 0.5 * (rep.separation_scores + rep.purity_scores)
    )
    recomputed = 50.0 * DAMP_GLOBAL(rep.global_purity) + DAMP_LOCAL(rep.q_scores).sum()
    assert rep.dispersion == pytest.approx(recomputed)


def test_clean_band_beats_random_labeling():
    # A spatially clean thin band should disperse less than the same number
    # of ones scattered at random.
    wins = 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        pts = rng.uniform(0, 1, size=(500, 2))
        band = ((pts[:, 0] > 0.45) & (pts[:, 0] < 0.55)).astype(int)
        if band.sum() == 0:
            band[0] = 1
        scattered = np.zeros(500, int)
        scattered[rng.choice(500, band.sum(), replace=False)] = 1
        nbrs = knn_neighbor_sets(pts, 20)
        d_band = dispersion(pts, band, nbrs, alpha_reg=125.0).dispersion
        d_rand = dispersion(pts, scattered, nbrs, alpha_reg=125.0).dispersion
        if d_band < d_rand:
            wins += 1
    assert wins == 20


def test_damping_function_properties():
    f = DampingFunction(0.5, 5.0)
    grid = np.linspace(0.0, 1.0, 200)
    vals = f(grid)
    assert np.all(np.diff(vals) >= -1e-15)
    assert np.all(vals <= grid + 1e-12)
    assert f(1.0) == pytest.approx(1.0)
    assert f(0.49) == 0.0
    g = DampingFunction(0.0, 2.0)
    assert np.all(g(grid) <= grid + 1e-12)
    with pytest.raises(ValueError):
        DampingFunction(1.0, 2.0)
    with pytest.raises(ValueError):
        DampingFunction(0.0, 0.5)


def test_filter_permutation_invariant():
    rng = np.random.default_rng(7)
    p = rng.random(300)
    labels = filter_labels(p)
    perm = rng.permutation(300)
    assert np.array_equal(filter_labels(p[perm]), labels[perm])

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decontam.learners import (CorrelationFilter, DegenerateProblemError, DimensionMismatch,
                               FrameGroup, LearnerError, TrainingSample, filter_confidence,
                               filter_frame_loss, make_gaussian_label, train_filter,
                               train_filter_spatial)
from decontam.learners.spatial import LearnerError as SpatialError
from decontam.learners.spatial import convolution_matrix, normal_equations

from oracles import (circulant_block, circular_convolve_naive, dense_ridge_filter,
                     weighted_objective)


def random_samples(rng, n, H, W, d):
    return [TrainingSample(rng.normal(size=(H, W, d)), rng.normal(size=(H, W)), frame_index=k + 1)
            for k in range(n)]


def random_alpha(rng, n):
    a = rng.uniform(0.1, 1.0, n)
    return a / a.sum()


# --- labels -------------------------------------------------------------------

def test_label_peak_and_wrap():
    y = make_gaussian_label(8, 8, (0, 0), 1.0)
    assert y[0, 0] == 1.0
    assert y[4, 4] == pytest.approx(np.exp(-16.0), rel=1e-14)
    assert y[7, 0] == pytest.approx(np.exp(-0.5), rel=1e-14)      # wrapped neighbour


def test_label_flat_limit():
    np.testing.assert_allclose(make_gaussian_label(8, 8, (3, 5), 1e6), 1.0, atol=1e-6)


@pytest.mark.parametrize("center,sigma", [((8, 0), 1.0), ((0, -1), 1.0), ((1, 1), 0.0)])
def test_label_preconditions(center, sigma):
    with pytest.raises(LearnerError):
        make_gaussian_label(8, 8, center, sigma)


# --- confidence and loss ------------------------------------------------------

def test_impulse_filter_is_identity(rng):
    x = rng.normal(size=(6, 5, 1))
    f = np.zeros((6, 5, 1))
    f[0, 0, 0] = 1.0
    np.testing.assert_allclose(filter_confidence(CorrelationFilter(f), x), x[:, :, 0], atol=1e-12)


def test_zero_filter(rng):
    x = rng.normal(size=(6, 5, 2))
    y = rng.normal(size=(6, 5))
    model = CorrelationFilter.zeros((6, 5, 2))
    assert np.all(filter_confidence(model, x) == 0)
    s = TrainingSample(x, y)
    assert filter_frame_loss(model, s) == pytest.approx(np.sum(y**2), rel=1e-12)


@settings(max_examples=15, deadline=None)
@given(H=st.integers(1, 6), W=st.integers(1, 6), d=st.integers(1, 3), seed=st.integers(0, 2**31))
def test_confidence_matches_naive_convolution(H, W, d, seed):
    rng = np.random.default_rng(seed)
    f, x = rng.normal(size=(H, W, d)), rng.normal(size=(H, W, d))
    np.testing.assert_allclose(filter_confidence(CorrelationFilter(f), x),
                               circular_convolve_naive(f, x), rtol=0, atol=1e-10)


def test_confidence_and_loss_vs_spatial_at_16(rng):
    H, W, d = 16, 16, 2
    f, x, y = rng.normal(size=(H, W, d)), rng.normal(size=(H, W, d)), rng.normal(size=(H, W))
    model = CorrelationFilter(f)
    C = convolution_matrix(x)
    direct = (C @ f.transpose(2, 0, 1).ravel()).reshape(H, W)
    conf = filter_confidence(model, x)
    assert np.max(np.abs(conf - direct)) <= 1e-10 * max(1.0, np.abs(direct).max())
    spatial = np.sum((y - direct) ** 2)
    assert abs(filter_frame_loss(model, TrainingSample(x, y)) - spatial) <= 1e-10 * spatial


@settings(max_examples=25, deadline=None)
@given(H=st.integers(2, 8), W=st.integers(2, 8), d=st.integers(1, 3), seed=st.integers(0, 2**31))
def test_parseval_loss(H, W, d, seed):
    rng = np.random.default_rng(seed)
    s = TrainingSample(rng.normal(size=(H, W, d)), rng.normal(size=(H, W)))
    f = rng.normal(size=(H, W, d))
    spatial = np.sum((s.label - circular_convolve_naive(f, s.features)) ** 2)
    assert filter_frame_loss(CorrelationFilter(f), s) == pytest.approx(spatial, rel=1e-10)


def test_dimension_mismatch(rng):
    model = CorrelationFilter.zeros((4, 4, 2))
    with pytest.raises(DimensionMismatch):
        filter_confidence(model, rng.normal(size=(4, 4, 3)))
    with pytest.raises(DimensionMismatch):
        filter_frame_loss(model, TrainingSample(rng.normal(size=(5, 4, 2)), np.zeros((5, 4))))


# --- exact ridge filter -------------------------------------------------------

def test_impulse_data_recovers_label(rng):
    x = np.zeros((6, 7, 1))
    x[0, 0, 0] = 1.0
    y = rng.normal(size=(6, 7))
    model = train_filter([TrainingSample(x, y)], [1.0], lam=0.0)
    np.testing.assert_allclose(model.coeffs[:, :, 0], y, atol=1e-12)
    assert filter_frame_loss(model, TrainingSample(x, y)) <= 1e-12


def test_huge_regularization_zeroes_filter(rng):
    samples = random_samples(rng, 3, 5, 5, 2)
    model = train_filter(samples, [0.2, 0.3, 0.5], lam=1e12)
    assert np.abs(model.coeffs).max() <= 1e-9


@pytest.mark.parametrize("H,W,d", [(4, 4, 2), (4, 6, 1), (5, 5, 2), (8, 8, 1), (8, 8, 2)])
def test_matches_dense_least_squares(rng, H, W, d):
    samples = random_samples(rng, 3, H, W, d)
    alpha = random_alpha(rng, 3)
    model = train_filter(samples, alpha, lam=0.05)
    ref = dense_ridge_filter(samples, alpha, 0.05)
    assert np.linalg.norm(model.coeffs - ref) <= 1e-8 * np.linalg.norm(ref)


def test_first_order_optimality(rng):
    samples = random_samples(rng, 3, 4, 4, 2)
    alpha = random_alpha(rng, 3)
    lam = 0.1
    f = train_filter(samples, alpha, lam).coeffs
    base = weighted_objective(f, samples, alpha, lam)
    for _ in range(20):
        eps = rng.normal(size=f.shape)
        eps *= 1e-4 / np.linalg.norm(eps)
        assert weighted_objective(f + eps, samples, alpha, lam) >= base - 1e-8


def test_duplicate_sample_half_weight(rng):
    samples = random_samples(rng, 3, 6, 6, 2)
    alpha = np.array([0.5, 0.3, 0.2])
    ref = train_filter(samples, alpha, 0.01).coeffs
    dup = train_filter(samples + [samples[1]], [0.5, 0.15, 0.2, 0.15], 0.01).coeffs
    np.testing.assert_allclose(dup, ref, rtol=0, atol=1e-10)


def test_result_is_real(rng):
    samples = random_samples(rng, 2, 7, 9, 3)
    alpha = [0.4, 0.6]
    H, W, d = 7, 9, 3
    X = np.stack([s.features_hat for s in samples]).reshape(2, H * W, d).transpose(1, 0, 2)
    Y = np.stack([s.label_hat for s in samples]).reshape(2, H * W).T
    A = np.conj(X).transpose(0, 2, 1) @ (np.array(alpha)[None, :, None] * X)
    A[:, range(d), range(d)] += 0.01
    b = np.conj(X).transpose(0, 2, 1) @ (np.array(alpha)[None, :] * Y)[:, :, None]
    F = np.linalg.solve(A, b)[:, :, 0].reshape(H, W, d)
    assert np.abs(np.fft.ifft2(F, axes=(0, 1)).imag).max() <= 1e-10
    model = train_filter(samples, alpha, 0.01)
    assert model.coeffs.dtype == np.float64


def test_unregularized_rank_deficient_raises():
    x = np.zeros((4, 4, 2))
    x[0, 0, 0] = 1.0        # second channel identically zero
    with pytest.raises(DegenerateProblemError):
        train_filter([TrainingSample(x, np.ones((4, 4)))], [1.0], lam=0.0)


def test_zero_weight_frames_do_not_matter(rng):
    samples = random_samples(rng, 3, 5, 5, 1)
    a = train_filter(samples, [0.5, 0.0, 0.5], 0.1).coeffs
    b = train_filter([samples[0], samples[2]], [0.5, 0.5], 0.1).coeffs
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_shape_checks(rng):
    s = random_samples(rng, 1, 4, 4, 1) + random_samples(rng, 1, 5, 4, 1)
    with pytest.raises(DimensionMismatch):
        train_filter(s, [0.5, 0.5])
    with pytest.raises(DimensionMismatch):
        train_filter(s[:1], [0.5, 0.5])


# --- spatially penalized filter -----------------------------------------------

def test_convolution_matrix_matches_reference(rng):
    x = rng.normal(size=(3, 4, 2))
    np.testing.assert_array_equal(convolution_matrix(x), circulant_block(x))


def test_spatial_zero_iterations_identity(rng):
    samples = random_samples(rng, 2, 4, 4, 1)
    warm = CorrelationFilter(rng.normal(size=(4, 4, 1)))
    assert train_filter_spatial(samples, [0.5, 0.5], np.ones((4, 4)), 0, warm) is warm


def test_spatial_constant_penalty_equals_ridge(rng):
    samples = random_samples(rng, 3, 6, 6, 2)
    alpha = random_alpha(rng, 3)
    lam = 4.0
    ref = train_filter(samples, alpha, lam).coeffs
    warm = CorrelationFilter.zeros((6, 6, 2))
    got = train_filter_spatial(samples, alpha, np.full((6, 6), np.sqrt(lam)), 400, warm).coeffs
    assert np.max(np.abs(got - ref)) <= 1e-6


def test_spatial_ramp_penalty_matches_direct_solve(rng):
    samples = random_samples(rng, 2, 8, 8, 1)
    alpha = [0.3, 0.7]
    r = np.abs(np.arange(8) - 4)
    w = 1.0 + 0.5 * (r[:, None] + r[None, :])      # ramp: larger away from the center
    A, b = normal_equations(samples, alpha, w)
    direct = np.linalg.solve(A, b).reshape(1, 8, 8).transpose(1, 2, 0)
    model, hist = train_filter_spatial(samples, alpha, w, 200, CorrelationFilter.zeros((8, 8, 1)),
                                       return_history=True)
    assert np.max(np.abs(model.coeffs - direct)) <= 1e-6
    assert hist[-1] < 1e-6 * hist[0]


def test_spatial_energy_decreases_monotonically(rng):
    samples = random_samples(rng, 3, 5, 5, 2)
    alpha = random_alpha(rng, 3)
    w = rng.uniform(0.5, 2.0, (5, 5))
    A, b = normal_equations(samples, alpha, w)
    x_star = np.linalg.solve(A, b)
    model = CorrelationFilter.zeros((5, 5, 2))
    energies = []
    for _ in range(30):
        model = train_filter_spatial(samples, alpha, w, 1, model)
        e = model.coeffs.transpose(2, 0, 1).ravel() - x_star
        energies.append(e @ A @ e)
    assert all(b_ <= a_ * (1 + 1e-12) for a_, b_ in zip(energies, energies[1:]))


def test_spatial_warm_start_shortcut(rng):
    samples = random_samples(rng, 2, 4, 4, 1)
    w = np.full((4, 4), 0.7)
    A, b = normal_equations(samples, [0.5, 0.5], w)
    exact = CorrelationFilter(np.linalg.solve(A, b).reshape(1, 4, 4).transpose(1, 2, 0))
    _, hist = train_filter_spatial(samples, [0.5, 0.5], w, 3, exact, return_history=True)
    assert max(hist) <= 1e-10


def test_spatial_rejects_bad_inputs(rng):
    samples = random_samples(rng, 1, 4, 4, 1)
    warm = CorrelationFilter.zeros((4, 4, 1))
    with pytest.raises(SpatialError):
        train_filter_spatial(samples, [1.0], np.zeros((4, 4)), 1, warm)
    big = random_samples(rng, 1, 40, 40, 3)
    with pytest.raises(SpatialError):
        train_filter_spatial(big, [1.0], np.ones((40, 40)), 1, CorrelationFilter.zeros((40, 40, 3)))


def test_sample_validation():
    with pytest.raises(LearnerError):
        TrainingSample(np.zeros((3, 3, 1)))
    with pytest.raises(LearnerError):
        TrainingSample(np.zeros(3), cls=0)
    with pytest.raises(DimensionMismatch):
        TrainingSample(np.zeros((3, 3, 1)), np.zeros((3, 4)))
    with pytest.raises(LearnerError):
        FrameGroup(1, [])

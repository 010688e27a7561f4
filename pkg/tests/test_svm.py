import numpy as np
import pytest

from decontam.learners import (DimensionMismatch, FrameGroup, LearnerError, LinearSvmModel,
                               TrainingSample, svm_frame_loss, svm_objective, train_svm)

from oracles import projected_subgradient_svm


def vec(x, c, k=1):
    return TrainingSample(np.atleast_1d(np.asarray(x, dtype=float)), cls=c, frame_index=k)


def random_groups(rng, frames=6, per=5, dim=3):
    w = rng.normal(size=dim)
    groups = []
    for k in range(1, frames + 1):
        X = rng.normal(size=(per, dim))
        y = np.where(X @ w + 0.3 * rng.normal(size=per) > 0, 1, -1)
        groups.append(FrameGroup(k, [vec(x, int(c), k) for x, c in zip(X, y)]))
    return groups


def flat(groups, alpha):
    X = np.vstack([s.features for g in groups for s in g.samples])
    y = np.array([s.cls for g in groups for s in g.samples], dtype=float)
    c = np.concatenate([[a] * len(g.samples) for g, a in zip(groups, alpha)])
    return X, y, c


def test_frame_loss_examples():
    m = LinearSvmModel([1.0], 0.0)
    assert svm_frame_loss(m, [vec(2.0, 1), vec(-3.0, -1)]) == 0.0
    assert svm_frame_loss(m, [vec(0.0, 1)]) == 1.0
    assert svm_frame_loss(m, [vec(0.5, 1), vec(-0.5, 1)]) == pytest.approx(2.0)


def test_frame_loss_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        svm_frame_loss(LinearSvmModel([1.0, 2.0]), [vec(1.0, 1)])


def test_separable_points_reach_zero_hinge():
    groups = [FrameGroup(1, [vec(-2.0, -1, 1)]), FrameGroup(2, [vec(2.0, 1, 2)])]
    model = train_svm(groups, [0.5, 0.5], lam=1e-6, iterations=3000)
    hinge = sum(a * svm_frame_loss(model, g.samples) for a, g in zip([0.5, 0.5], groups))
    assert hinge <= 1e-3


def test_zero_weight_frames_can_be_dropped(rng):
    groups = random_groups(rng)
    alpha = np.array([0.3, 0.0, 0.2, 0.0, 0.25, 0.25])
    keep = [i for i, a in enumerate(alpha) if a > 0]
    a = train_svm(groups, alpha, lam=0.05, iterations=4000)
    b = train_svm([groups[i] for i in keep], alpha[keep], lam=0.05, iterations=4000)
    oa = svm_objective(a, groups, alpha, 0.05)
    ob = svm_objective(b, groups, alpha, 0.05)
    assert abs(oa - ob) <= 1e-3


def test_matches_projected_subgradient_oracle(rng):
    groups = random_groups(rng, frames=5, per=6, dim=3)
    alpha = rng.uniform(0.1, 1, 5)
    alpha /= alpha.sum()
    lam = 0.05
    model = train_svm(groups, alpha, lam, iterations=20000)
    X, y, c = flat(groups, alpha)
    _, oracle_f = projected_subgradient_svm(X, y, c, lam, iterations=60000)
    assert abs(svm_objective(model, groups, alpha, lam) - oracle_f) <= 1e-3


def test_matches_exact_qp(rng):
    cp = pytest.importorskip("cvxpy")
    groups = random_groups(rng, frames=4, per=8, dim=4)
    alpha = np.array([0.1, 0.2, 0.3, 0.4])
    lam = 0.02
    X, y, c = flat(groups, alpha)
    w, b = cp.Variable(4), cp.Variable()
    prob = cp.Problem(cp.Minimize(c @ cp.pos(1 - cp.multiply(y, X @ w + b)) + lam * cp.sum_squares(w)))
    prob.solve()
    model = train_svm(groups, alpha, lam, iterations=20000)
    assert svm_objective(model, groups, alpha, lam) - prob.value <= 1e-3


def test_accepted_objectives_non_increasing(rng):
    groups = random_groups(rng)
    alpha = np.full(6, 1 / 6)
    model, hist = train_svm(groups, alpha, 0.01, iterations=500, return_history=True)
    assert all(b <= a for a, b in zip(hist, hist[1:]))
    assert svm_objective(model, groups, alpha, 0.01) == pytest.approx(hist[-1], rel=1e-12)


def test_warm_start_never_worse(rng):
    groups = random_groups(rng)
    alpha = np.full(6, 1 / 6)
    first = train_svm(groups, alpha, 0.01, iterations=300)
    second = train_svm(groups, alpha, 0.01, iterations=50, warm_start=first)
    assert svm_objective(second, groups, alpha, 0.01) <= svm_objective(first, groups, alpha, 0.01)


def test_deterministic(rng):
    groups = random_groups(rng)
    alpha = np.full(6, 1 / 6)
    a = train_svm(groups, alpha, 0.01, iterations=200)
    b = train_svm(groups, alpha, 0.01, iterations=200)
    assert np.array_equal(a.weight_vector, b.weight_vector) and a.bias == b.bias


def test_single_class_allowed():
    groups = [FrameGroup(1, [vec([1.0, 0.0], 1), vec([0.0, 1.0], 1)])]
    model = train_svm(groups, [1.0], 0.1, iterations=500)
    assert svm_frame_loss(model, groups[0].samples) <= 1e-2


def test_errors():
    with pytest.raises(LearnerError):
        train_svm([], [])
    with pytest.raises(DimensionMismatch):
        train_svm([FrameGroup(1, [vec([1.0], 1), vec([1.0, 2.0], -1)])], [1.0])

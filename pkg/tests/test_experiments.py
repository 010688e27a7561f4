import numpy as np

from decontam.eval import TrackReport
from decontam.experiments import (StreamConfig, corruption_ratio, make_flip_stream,
                                  svm_stream_trial)
from decontam.rect import Rect


def test_flip_stream_shape():
    cfg = StreamConfig(frames=20, dim=4, negatives=5, test_size=10)
    data = make_flip_stream(0, cfg)
    assert len(data.groups) == 20 and data.flipped.sum() == 6 and not data.flipped[0]
    for g, bad in zip(data.groups, data.flipped):
        labels = [s.cls for s in g.samples]
        assert labels.count(-1 if bad else 1) == 1 and len(labels) == 6
    assert data.X_test.shape == (20, 4) and data.y_test.sum() == 0


def test_flip_stream_deterministic():
    a, b = make_flip_stream(3), make_flip_stream(3)
    assert np.array_equal(a.flipped, b.flipped) and np.array_equal(a.X_test, b.X_test)


def test_svm_stream_small_run():
    r = svm_stream_trial(1, StreamConfig(frames=20, test_size=50), iterations=100)
    assert abs(r.alpha.sum() - 1) <= 1e-10
    assert r.alpha_flipped < r.alpha_clean
    assert 0 <= r.acc_fixed <= 1 and 0 <= r.acc_joint <= 1


def test_corruption_ratio():
    rep = TrackReport([Rect(1, 1, 1, 1)] * 3, [Rect(1, 1, 1, 1)] * 3,
                      [(3, 1, 0.5, 0.3, 0.0), (3, 2, 0.1, 0.3, 0.0), (3, 3, 0.4, 0.4, 0.0)])
    assert np.isclose(corruption_ratio(rep, [False, True, False]), 0.1 / 0.45)
    assert np.isnan(corruption_ratio(rep, [False] * 3))

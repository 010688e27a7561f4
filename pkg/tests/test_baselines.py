import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from decontam.baselines import (DecayConfig, PsrConfig, PsrError, ZeroVarianceError,
                                decay_weights, decay_weights_from_ages, psr, psr_gate,
                                sidelobe_mask)


def psr_example():
    g = np.array([[0.0, 2.0, 0.0], [2.0, 10.0, 2.0], [0.0, 2.0, 0.0]])
    return g


def test_decay_uniform():
    np.testing.assert_allclose(decay_weights(6, 0.0), np.full(6, 1 / 6), atol=1e-15)


def test_decay_example():
    np.testing.assert_allclose(decay_weights(3, 0.5), [1 / 7, 2 / 7, 4 / 7], atol=1e-15)


def test_decay_one_hot():
    assert decay_weights(4, 1.0).tolist() == [0.0, 0.0, 0.0, 1.0]


def test_decay_window_caps_ages():
    w = decay_weights(6, 0.5, window=2)
    assert w[0] == w[1] == w[2] == w[3]
    assert w[4] == pytest.approx(2 * w[3])


@given(t=st.integers(1, 400), gamma=st.floats(0.0, 0.999))
@settings(max_examples=100, deadline=None)
def test_decay_recursion(t, gamma):
    w = decay_weights(t, gamma)
    assert abs(w.sum() - 1) <= 1e-12 and np.all(w >= 0)
    np.testing.assert_allclose(w[:-1], (1 - gamma) * w[1:], rtol=0, atol=1e-12)


def test_decay_from_ages_order_free():
    w = decay_weights_from_ages([0, 2, 1], 0.5)
    np.testing.assert_allclose(w, np.array([4, 1, 2]) / 7)


def test_decay_errors():
    with pytest.raises(ValueError):
        decay_weights(0, 0.1)
    with pytest.raises(ValueError):
        DecayConfig(gamma=1.5)


def test_psr_example():
    assert psr(psr_example(), PsrConfig(exclusion_radius=0)) == pytest.approx(9.0, abs=1e-12)


def test_psr_scale_invariant():
    g = psr_example()
    cfg = PsrConfig(exclusion_radius=0)
    assert abs(psr(3.7 * g, cfg) - psr(g, cfg)) <= 1e-12


@given(g=arrays(np.float64, (7, 9), elements=st.floats(-10, 10)),
       c=st.floats(0.01, 100), b=st.floats(-100, 100))
@settings(max_examples=100, deadline=None)
def test_psr_affine_invariant(g, c, b):
    cfg = PsrConfig(exclusion_radius=1)
    try:
        p = psr(g, cfg)
    except ZeroVarianceError:
        return
    side = g[sidelobe_mask(g.shape, np.unravel_index(np.argmax(g), g.shape), 1)]
    if side.std() < 1e-3:
        return
    assert abs(psr(c * g + b, cfg) - p) <= 1e-10 * max(1.0, abs(p))


def test_sidelobe_mask_wraps():
    m = sidelobe_mask((5, 5), (0, 0), 1)
    excluded = {tuple(i) for i in np.argwhere(~m)}
    assert excluded == {(r, c) for r in (4, 0, 1) for c in (4, 0, 1)}


def test_psr_no_sidelobe():
    with pytest.raises(PsrError):
        psr(np.ones((3, 3)), PsrConfig(exclusion_radius=1))


def test_psr_constant_map():
    with pytest.raises(ZeroVarianceError):
        psr(np.full((5, 5), 2.0), PsrConfig(exclusion_radius=0))


def test_gate_accepts_example():
    assert psr_gate(psr_example(), PsrConfig(0, threshold=5.0))
    assert not psr_gate(psr_example(), PsrConfig(0, threshold=9.5))


def test_gate_disabled_always_accepts():
    cfg = PsrConfig(0, threshold=-math.inf)
    assert psr_gate(np.zeros((4, 4)), cfg)
    assert psr_gate(psr_example(), cfg)


@pytest.mark.parametrize("threshold", [-1e6, 0.0, 5.0])
def test_gate_rejects_constant(threshold):
    assert not psr_gate(np.full((6, 6), 0.3), PsrConfig(2, threshold))


@pytest.mark.parametrize("kw", [{"exclusion_radius": -1}, {"threshold": math.inf},
                                {"threshold": math.nan}])
def test_psr_config_validation(kw):
    with pytest.raises(ValueError):
        PsrConfig(**kw)

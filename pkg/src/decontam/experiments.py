"""Desk-scale experiments: occlusion decontamination and a label-flipped SVM stream."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .baselines import decay_weights_from_ages
from .joint import JointConfig, TrainingMemory, acs_update
from .learners import FrameGroup, SvmLearner, TrainingSample
from .tracking import (CorruptionScript, OcclusionEvent, TrackerConfig, generate_sequence,
                       matched_fixed_config, track)

# 30 of 100 frames fully covered by background texture.
OCCLUSION_SCENARIO = CorruptionScript(
    length=100,
    occlusions=(OcclusionEvent(20, 29), OcclusionEvent(45, 54), OcclusionEvent(70, 79)),
    noise_std=0.01,
    speed=0.25,
)


def corruption_ratio(report, labels) -> float:
    """mean alpha over corrupted frames / mean alpha over clean frames, final memory."""
    final = report.final_alpha()
    bad = [a for k, a in final.items() if labels[k - 1]]
    good = [a for k, a in final.items() if not labels[k - 1]]
    if not bad or not good or np.mean(good) == 0:
        return float("nan")
    return float(np.mean(bad) / np.mean(good))


@dataclass
class DecontaminationResult:
    seed: int
    op_joint: float
    op_fixed: float
    ratio: float


def decontamination_trial(seed: int, script: CorruptionScript = OCCLUSION_SCENARIO,
                          config: TrackerConfig = TrackerConfig()) -> DecontaminationResult:
    """Joint vs fixed decay (matched schedule) on one generated sequence."""
    seq = generate_sequence(script, seed)
    joint = track(seq, config, seed)
    fixed = track(seq, matched_fixed_config(config), seed)
    return DecontaminationResult(seed, joint.metrics()["op_50"], fixed.metrics()["op_50"],
                                 corruption_ratio(joint, seq.corruption_labels))


# --- SVM stream -------------------------------------------------------------------

@dataclass(frozen=True)
class StreamConfig:
    frames: int = 40
    dim: int = 10
    flip_fraction: float = 0.3
    negatives: int = 20
    separation: float = 1.0
    noise: float = 0.3
    test_size: int = 500


@dataclass
class StreamData:
    groups: list
    flipped: np.ndarray
    X_test: np.ndarray
    y_test: np.ndarray


def make_flip_stream(seed: int, cfg: StreamConfig = StreamConfig()) -> StreamData:
    """Two Gaussian classes at ``+-separation * w``; each frame has 1 positive and
    ``negatives`` negatives, and a ``flip_fraction`` of frames (never the first)
    has every label flipped."""
    rng = np.random.default_rng(seed)
    w = rng.normal(size=cfg.dim)
    w /= np.linalg.norm(w)
    n_bad = int(round(cfg.flip_fraction * cfg.frames))
    flipped = np.zeros(cfg.frames, dtype=bool)
    flipped[rng.choice(np.arange(1, cfg.frames), n_bad, replace=False)] = True

    def draw(sign, n):
        return sign * cfg.separation * w + cfg.noise * rng.normal(size=(n, cfg.dim))

    groups = []
    for k in range(1, cfg.frames + 1):
        X = np.vstack([draw(1, 1), draw(-1, cfg.negatives)])
        y = np.r_[1, -np.ones(cfg.negatives, dtype=int)]
        if flipped[k - 1]:
            y = -y
        groups.append(FrameGroup(k, [TrainingSample(x, cls=int(c), frame_index=k)
                                     for x, c in zip(X, y)]))
    X_test = np.vstack([draw(1, cfg.test_size), draw(-1, cfg.test_size)])
    y_test = np.r_[np.ones(cfg.test_size), -np.ones(cfg.test_size)]
    return StreamData(groups, flipped, X_test, y_test)


def accuracy(model, X, y) -> float:
    # a zero score counts as an error
    return float(np.mean(np.sign(model.decision(X)) == y))


@dataclass
class StreamResult:
    seed: int
    alpha_flipped: float
    alpha_clean: float
    acc_joint: float
    acc_fixed: float
    alpha: np.ndarray = field(repr=False)


def svm_stream_trial(seed: int, stream: StreamConfig = StreamConfig(),
                     joint: JointConfig = JointConfig(), iterations: int = 300) -> StreamResult:
    """Online joint weighting over the stream vs fixed decay with the matched schedule."""
    data = make_flip_stream(seed, stream)
    learner = SvmLearner(joint.lam, iterations)
    memory = TrainingMemory(joint.capacity, joint.schedule)
    model = None
    for g in data.groups:
        memory.add_frame(g)
        model, _ = acs_update(memory, joint, learner, model)
    flipped = data.flipped[memory.frame_indices - 1]
    s = joint.schedule
    fixed_alpha = decay_weights_from_ages(memory.newest - memory.frame_indices, s.eta, s.K)
    fixed = learner.fit(memory.groups, fixed_alpha)
    return StreamResult(seed, float(np.median(memory.alpha[flipped])),
                        float(np.median(memory.alpha[~flipped])),
                        accuracy(model, data.X_test, data.y_test),
                        accuracy(fixed, data.X_test, data.y_test), memory.alpha.copy())

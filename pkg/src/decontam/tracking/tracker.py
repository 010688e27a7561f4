"""Per-frame tracking loop: localize, collect a sample, reweight, retrain."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from ..baselines import DecayConfig, PsrConfig, decay_weights_from_ages, psr_gate
from ..eval import TrackReport
from ..joint import JointConfig, TrainingMemory, acs_update
from ..learners import (FilterLearner, FrameGroup, SvmLearner, TrainingSample,
                        filter_confidence, make_gaussian_label)
from .features import FeatureConfig, extract_features, sample_patch
from .types import Rect, Sequence, SequenceError

STRATEGIES = ("joint", "fixed", "psr")
LEARNERS = ("dcf", "svm")


@dataclass(frozen=True)
class SvmTrackConfig:
    patch: int = 12
    negatives: int = 20
    search_radius: float = 0.5      # fraction of target size
    search_step: float = 2.0        # pixels
    iterations: int = 300


@dataclass(frozen=True)
class TrackerConfig:
    joint: JointConfig = field(default_factory=JointConfig)
    strategy: str = "joint"
    decay: DecayConfig = field(default_factory=DecayConfig)
    psr: PsrConfig = field(default_factory=PsrConfig)
    features: FeatureConfig = field(default_factory=FeatureConfig)
    sigma_factor: float = 0.1
    learner: str = "dcf"
    svm: SvmTrackConfig = field(default_factory=SvmTrackConfig)

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if self.learner not in LEARNERS:
            raise ValueError(f"learner must be one of {LEARNERS}, got {self.learner!r}")
        if self.sigma_factor <= 0:
            raise ValueError("sigma_factor must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["psr"]["threshold"] = _encode_float(self.psr.threshold)
        return d

    def label_sigma(self) -> float:
        """Label width in grid cells: ``sigma_factor * sqrt(target area in cells)``."""
        return self.sigma_factor * self.features.grid / self.features.search_factor


def _encode_float(v):
    return v if math.isfinite(v) else repr(v)


def matched_fixed_config(config: TrackerConfig) -> TrackerConfig:
    """Fixed-decay config whose weights equal the joint config's priors."""
    s = config.joint.schedule
    return TrackerConfig(config.joint, "fixed", DecayConfig(s.eta, s.K), config.psr,
                         config.features, config.sigma_factor, config.learner, config.svm)


def make_label(config: TrackerConfig) -> np.ndarray:
    g = config.features.grid
    return make_gaussian_label(g, g, config.features.center_cell, config.label_sigma())


def peak_shift(confidence: np.ndarray):
    """Integer argmax (first in row-major order) as a wrapped displacement from the center cell."""
    H, W = confidence.shape
    pr, pc = np.unravel_index(np.argmax(confidence), confidence.shape)
    # Center cell is (H//2, W//2), so offsets already lie in [-H//2, H - H//2).
    dr = pr - H // 2
    dc = pc - W // 2
    return int(dr), int(dc)


def localize_dcf(model, frame, previous: Rect, config: TrackerConfig):
    feats = extract_features(frame, previous, config.features)
    conf = filter_confidence(model, feats)
    dr, dc = peak_shift(conf)
    sr, sc = config.features.cell_size(previous)
    return previous.translated(dc * sc, dr * sr), conf


def localize(model, frame, previous: Rect, config: TrackerConfig = TrackerConfig()) -> Rect:
    """New target rect from the filter's confidence peak around ``previous``."""
    if config.learner == "svm":
        return localize_svm(model, frame, previous, config)[0]
    return localize_dcf(model, frame, previous, config)[0]


# --- SVM path -----------------------------------------------------------------

def svm_vector(frame, rect: Rect, config: TrackerConfig) -> np.ndarray:
    p = config.svm.patch
    fc = FeatureConfig(grid=p, search_factor=1.0, cosine_window=False)
    patch = sample_patch(frame, rect, fc)
    v = (patch - patch.mean()).ravel()
    n = np.linalg.norm(v)
    return v / n if n > 1e-12 else v


def _candidate_shifts(rect: Rect, config: TrackerConfig):
    r = config.svm.search_radius
    step = config.svm.search_step
    xs = np.arange(-r * rect.w, r * rect.w + 1e-9, step)
    ys = np.arange(-r * rect.h, r * rect.h + 1e-9, step)
    return [(dx, dy) for dy in ys for dx in xs]


def svm_frame_group(frame, rect: Rect, frame_index: int, config: TrackerConfig, rng) -> FrameGroup:
    """One positive at ``rect`` plus negatives on a ring of shifted boxes."""
    samples = [TrainingSample(svm_vector(frame, rect, config), cls=1, frame_index=frame_index)]
    n = config.svm.negatives
    phase = rng.uniform(0, 2 * math.pi)
    for j in range(n):
        ang = phase + 2 * math.pi * j / n
        dist = rng.uniform(0.5, 1.0)
        cand = rect.translated(dist * rect.w * math.cos(ang), dist * rect.h * math.sin(ang))
        if cand.intersects_frame(frame.shape):
            samples.append(TrainingSample(svm_vector(frame, cand, config), cls=-1,
                                          frame_index=frame_index))
    return FrameGroup(frame_index, samples)


def localize_svm(model, frame, previous: Rect, config: TrackerConfig):
    cands = [previous.translated(dx, dy) for dx, dy in _candidate_shifts(previous, config)]
    cands = [c for c in cands if c.intersects_frame(frame.shape)]
    X = np.vstack([svm_vector(frame, c, config) for c in cands])
    scores = model.decision(X)
    return cands[int(np.argmax(scores))], scores


# --- main loop ----------------------------------------------------------------

def _learner(config: TrackerConfig):
    if config.learner == "svm":
        return SvmLearner(config.joint.lam, config.svm.iterations)
    return FilterLearner(config.joint.lam)


def _frame_group(frame, rect, k, config, label, rng):
    if config.learner == "svm":
        return svm_frame_group(frame, rect, k, config, rng)
    feats = extract_features(frame, rect, config.features)
    return FrameGroup(k, [TrainingSample(feats, label, frame_index=k)])


def track(sequence: Sequence, config: TrackerConfig = TrackerConfig(), seed: int = 0) -> TrackReport:
    """Run the tracker over ``sequence`` starting from its first ground-truth rect."""
    if len(sequence) < 2:
        raise SequenceError("need at least two frames")
    rng = np.random.default_rng(seed)
    learner = _learner(config)
    label = make_label(config) if config.learner == "dcf" else None
    memory = TrainingMemory(config.joint.capacity, config.joint.schedule)
    decay = config.decay

    def reweight(k):
        if config.strategy == "joint":
            return acs_update(memory, config.joint, learner, model, current_frame=k)[0]
        memory.alpha = decay_weights_from_ages(k - memory.frame_indices, decay.gamma, decay.window)
        fitted = learner.fit(memory.groups, memory.alpha, model)
        memory.losses = learner.frame_losses(fitted, memory.groups)
        return fitted

    rect = sequence.ground_truth[0]
    trajectory, lost, timing, weight_log = [rect], [False], [], []
    t0 = time.perf_counter()
    model = None
    memory.add_frame(_frame_group(sequence.frames[0], rect, 1, config, label, rng))
    model = reweight(1)
    timing.append(1e3 * (time.perf_counter() - t0))
    weight_log.extend(memory.weight_rows(1))

    for k in range(2, len(sequence) + 1):
        t0 = time.perf_counter()
        frame = sequence.frames[k - 1]
        if config.learner == "svm":
            new_rect, conf = localize_svm(model, frame, rect, config)
        else:
            new_rect, conf = localize_dcf(model, frame, rect, config)
        is_lost = not new_rect.intersects_frame(frame.shape)
        if not is_lost:
            rect = new_rect
            accept = True
            if config.strategy == "psr" and config.learner == "dcf":
                accept = psr_gate(conf, config.psr)
            if accept:
                memory.add_frame(_frame_group(frame, rect, k, config, label, rng))
                model = reweight(k)
        trajectory.append(rect)
        lost.append(is_lost)
        timing.append(1e3 * (time.perf_counter() - t0))
        weight_log.extend(memory.weight_rows(k))

    return TrackReport(trajectory, list(sequence.ground_truth), weight_log, timing,
                       config.to_dict(), lost,
                       None if sequence.corruption_labels is None else list(sequence.corruption_labels))

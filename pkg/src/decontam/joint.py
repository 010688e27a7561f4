"""Joint estimation of model and frame weights by alternate convex search.

The joint objective over stored frames ``k = 1..t`` is

    J(theta, a) = sum_k a_k L_k(theta) + (1/mu) sum_k a_k**2 / rho_k + lam R(theta)

with ``a`` on the probability simplex. Each ACS iteration refits ``theta``
under fixed ``a`` (a plain weighted training run) and then re-solves the QP
for ``a`` under fixed ``theta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .learners.base import FrameGroup
from .weights import AlphaSubproblem, PriorSchedule, prior_masses, solve_alpha


class MemoryStateError(ValueError):
    pass


@dataclass(frozen=True)
class JointConfig:
    mu: float = 5.0
    acs_iterations: int = 1
    schedule: PriorSchedule = field(default_factory=PriorSchedule)
    capacity: int = 300
    activation_frame: int = 10
    lam: float = 1e-2

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu!r}")
        if self.acs_iterations < 1:
            raise ValueError("acs_iterations must be >= 1")
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        if self.activation_frame < 1:
            raise ValueError("activation_frame must be >= 1")
        if self.lam < 0:
            raise ValueError("lam must be >= 0")


def carry_over_weights(previous_alpha, new_prior: float) -> np.ndarray:
    """Previous weights plus the new frame's prior mass, renormalized jointly.

    >>> carry_over_weights([0.6, 0.4], 0.2)
    array([0.5       , 0.33333333, 0.16666667])
    """
    alpha = np.append(np.asarray(previous_alpha, dtype=float), new_prior)
    return alpha / alpha.sum()


class TrainingMemory:
    """Stored frames with their quality weights ``alpha`` and priors ``rho``.

    Priors are recomputed from frame ages relative to the newest frame, so
    frames that were never stored (rejected) or were evicted simply leave a
    gap and their prior mass is absorbed by normalization.
    """

    def __init__(self, capacity: int = 300, schedule: PriorSchedule | None = None):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.schedule = schedule or PriorSchedule()
        self.groups: list[FrameGroup] = []
        self.alpha = np.zeros(0)
        self.priors = np.zeros(0)
        self.losses = np.full(0, np.nan)

    def __len__(self):
        return len(self.groups)

    @property
    def frame_indices(self) -> np.ndarray:
        return np.array([g.frame_index for g in self.groups], dtype=int)

    @property
    def newest(self) -> int:
        return self.groups[-1].frame_index

    def recompute_priors(self) -> np.ndarray:
        ages = self.newest - self.frame_indices
        masses = prior_masses(ages, self.schedule)
        self.priors = masses / masses.sum()
        return self.priors

    def add_frame(self, group: FrameGroup) -> "TrainingMemory":
        """Append a frame, set its weight to its prior, renormalize, evict if full."""
        if self.groups and group.frame_index <= self.newest:
            raise MemoryStateError(
                f"frame index {group.frame_index} not after newest stored {self.newest}")
        self.groups.append(group)
        self.recompute_priors()
        self.alpha = carry_over_weights(self.alpha, self.priors[-1])
        self.losses = np.append(self.losses, np.nan)
        if len(self.groups) > self.capacity:
            self.evict()
        return self

    def evict(self) -> "TrainingMemory":
        """Drop the lowest-weight frame other than the newest (oldest on ties)."""
        if len(self.groups) < 2:
            raise MemoryStateError("nothing to evict")
        victim = int(np.argmin(self.alpha[:-1]))
        del self.groups[victim]
        self.alpha = np.delete(self.alpha, victim)
        self.losses = np.delete(self.losses, victim)
        self.alpha = self.alpha / self.alpha.sum()
        self.recompute_priors()
        return self

    def weight_rows(self, update_index: int):
        """Rows ``(update_index, frame_index, alpha, rho, loss)`` for the current state."""
        return [(int(update_index), int(g.frame_index), float(a), float(r), float(l))
                for g, a, r, l in zip(self.groups, self.alpha, self.priors, self.losses)]


def joint_loss(model, memory: TrainingMemory, mu: float, learner, alpha=None) -> float:
    """Joint objective at ``(model, alpha)``; ``alpha`` defaults to the stored weights.

    The learner supplies per-frame losses and its own ``lam * R(theta)`` term.
    """
    a = memory.alpha if alpha is None else np.asarray(alpha, dtype=float)
    losses = learner.frame_losses(model, memory.groups)
    return float(a @ losses + np.sum(a**2 / memory.priors) / mu + learner.regularizer(model))


def acs_update(memory: TrainingMemory, config: JointConfig, learner, warm=None,
               current_frame: int | None = None, history: list | None = None):
    """Run ``config.acs_iterations`` alternations of theta-step and alpha-step.

    Before ``config.activation_frame`` the alpha-step is skipped and the
    weights are pinned to the priors. Updates ``memory.alpha`` and
    ``memory.losses`` in place and returns ``(model, alpha)``. If ``history``
    is a list, the joint objective after each half-step is appended to it.
    """
    if len(memory) == 0:
        raise MemoryStateError("acs_update on empty memory")
    t = memory.newest if current_frame is None else current_frame
    active = t >= config.activation_frame
    if not active:
        memory.alpha = memory.priors.copy()
    model = warm
    for _ in range(config.acs_iterations):
        model = learner.fit(memory.groups, memory.alpha, model)
        losses = learner.frame_losses(model, memory.groups)
        memory.losses = losses
        if history is not None:
            history.append(joint_loss(model, memory, config.mu, learner))
        if not active:
            break
        memory.alpha = solve_alpha(AlphaSubproblem(losses, memory.priors, config.mu))
        if history is not None:
            history.append(joint_loss(model, memory, config.mu, learner))
    return model, memory.alpha

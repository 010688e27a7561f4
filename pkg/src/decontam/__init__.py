"""Online model learning with jointly estimated per-frame sample weights.

Modules: ``weights`` (frame-weight QP and priors), ``learners`` (correlation
filters and a linear SVM), ``joint`` (training memory and alternate convex
search), ``baselines`` (fixed decay, PSR gating), ``tracking`` (sequences,
features, tracker loop), ``eval`` (metrics and reports), ``cli``.
"""

from .joint import JointConfig, TrainingMemory, acs_update, joint_loss
from .weights import AlphaSubproblem, PriorSchedule, compute_priors, solve_alpha

__version__ = "0.1.0"

__all__ = ["JointConfig", "TrainingMemory", "acs_update", "joint_loss", "AlphaSubproblem",
           "PriorSchedule", "compute_priors", "solve_alpha", "__version__"]

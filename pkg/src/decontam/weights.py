"""Prior weight schedule and the simplex-constrained QP for frame weights.

The frame-weight subproblem is

    minimize    sum_k L_k a_k + (1/mu) sum_k a_k**2 / rho_k
    subject to  a_k >= 0,  sum_k a_k = 1

Its KKT conditions give a water-filling solution
``a_k = max(0, mu * rho_k * (nu - L_k) / 2)`` for a scalar multiplier ``nu``,
which :func:`solve_alpha` finds exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class WeightsError(ValueError):
    """Raised for malformed weight problems (empty, non-finite, bad shapes)."""


@dataclass(frozen=True)
class PriorSchedule:
    """Exponential decay over the ``K`` newest frames, constant before that."""

    K: int = 50
    eta: float = 0.035

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise WeightsError(f"K must be a positive integer, got {self.K!r}")
        if not 0.0 <= self.eta < 1.0:
            raise WeightsError(f"eta must lie in [0, 1), got {self.eta!r}")


@dataclass(frozen=True)
class AlphaSubproblem:
    losses: np.ndarray
    priors: np.ndarray
    mu: float

    def __post_init__(self):
        losses = np.asarray(self.losses, dtype=float).ravel()
        priors = np.asarray(self.priors, dtype=float).ravel()
        if losses.size == 0:
            raise WeightsError("empty weight problem (t = 0)")
        if losses.shape != priors.shape:
            raise WeightsError(
                f"losses and priors differ in length: {losses.size} vs {priors.size}")
        if not np.all(np.isfinite(losses)):
            raise WeightsError("losses must be finite")
        if not np.all(np.isfinite(priors)) or np.any(priors <= 0):
            raise WeightsError("priors must be finite and strictly positive")
        if not (np.isfinite(self.mu) and self.mu > 0):
            raise WeightsError(f"mu must be positive, got {self.mu!r}")
        object.__setattr__(self, "losses", losses)
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "mu", float(self.mu))

    @property
    def size(self) -> int:
        return self.losses.size

    def objective(self, alpha) -> float:
        alpha = np.asarray(alpha, dtype=float)
        return float(self.losses @ alpha + np.sum(alpha**2 / self.priors) / self.mu)

    def gradient(self, alpha) -> np.ndarray:
        return self.losses + 2.0 * np.asarray(alpha, dtype=float) / (self.mu * self.priors)


def prior_masses(ages, schedule: PriorSchedule) -> np.ndarray:
    """Unnormalized prior mass for frames of the given ages.

    ``age = t - k`` for frame ``k`` at current frame ``t``; the newest frame has
    age 0 and mass 1. Masses decay by ``1 - eta`` per frame up to age ``K``
    and stay constant beyond it.
    """
    ages = np.asarray(ages)
    if np.any(ages < 0):
        raise WeightsError("frame ages must be non-negative")
    exponent = np.minimum(ages, schedule.K).astype(float)
    return (1.0 - schedule.eta) ** exponent


def compute_priors(t: int, schedule: PriorSchedule) -> np.ndarray:
    """Normalized prior weights ``rho_1 .. rho_t`` (oldest first).

    For ``t <= K`` the decay recursion covers every frame.

    >>> compute_priors(4, PriorSchedule(K=2, eta=0.5))
    array([0.125, 0.125, 0.25 , 0.5  ])
    """
    if int(t) != t or t < 1:
        raise WeightsError(f"t must be a positive integer, got {t!r}")
    if schedule.eta == 0.0:
        return np.full(t, 1.0 / t)
    masses = prior_masses(np.arange(t - 1, -1, -1), schedule)
    return masses / masses.sum()


def prior_normalizer(t: int, schedule: PriorSchedule) -> float:
    """Closed-form value of the oldest-frame prior ``a`` for ``t > K``.

    ``a = (t - K + ((1 - eta)**-K - 1) / eta)**-1``; with ``eta = 0`` the limit
    ``1/t`` is returned.
    """
    K, eta = schedule.K, schedule.eta
    if t <= K:
        raise WeightsError("closed form needs t > K")
    if eta == 0.0:
        return 1.0 / t
    # expm1/log1p keep ((1 - eta)**-K - 1) / eta accurate for tiny eta.
    return 1.0 / (t - K + np.expm1(-K * np.log1p(-eta)) / eta)


def _alpha_from_nu(nu, losses, priors, mu):
    return np.maximum(0.0, 0.5 * mu * priors * (nu - losses))


def _nu_scan(losses, priors, mu):
    """Exact multiplier by scanning support sets in order of increasing loss."""
    order = np.argsort(losses, kind="stable")
    ls = losses[order]
    ps = priors[order]
    # Support = m cheapest frames: sum_k mu*rho_k*(nu - L_k)/2 = 1.
    cum_p = np.cumsum(ps)
    cum_pl = np.cumsum(ps * ls)
    nus = (2.0 / mu + cum_pl) / cum_p
    upper = np.append(ls[1:], np.inf)
    valid = np.flatnonzero((nus > ls) & (nus <= upper))
    if valid.size == 0:
        return None
    return nus[valid[0]]


def _nu_bisect(losses, priors, mu, tol=0.0, max_iter=200):
    lo = losses.min()
    # At nu = min(L) + 2/(mu*min(rho)) the cheapest frame alone has mass >= 1.
    hi = lo + 2.0 / (mu * priors[np.argmin(losses)])
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= tol:
            break
        if _alpha_from_nu(mid, losses, priors, mu).sum() < 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def solve_alpha(problem: AlphaSubproblem, method: str = "scan") -> np.ndarray:
    """Exact minimizer of the frame-weight QP.

    Parameters
    ----------
    problem : AlphaSubproblem
    method : {"scan", "bisect"}
        ``"scan"`` sorts frames by loss and locates the support set exactly.
        ``"bisect"`` bisects on the multiplier; it is the fallback when the
        scan finds no consistent support set due to rounding.

    Returns
    -------
    alpha : ndarray
        Non-negative weights summing to one.
    """
    if method not in ("scan", "bisect"):
        raise WeightsError(f"unknown method {method!r}")
    if problem.size == 1:
        return np.ones(1)
    # Shifting all losses by a constant leaves the minimizer unchanged.
    losses = problem.losses - problem.losses.min()
    priors, mu = problem.priors, problem.mu
    nu = _nu_scan(losses, priors, mu) if method == "scan" else None
    if nu is None:
        nu = _nu_bisect(losses, priors, mu)
    alpha = _alpha_from_nu(nu, losses, priors, mu)
    return alpha / alpha.sum()


def kkt_residual(problem: AlphaSubproblem, alpha) -> float:
    """Largest violation of the KKT conditions of the frame-weight QP.

    Covers primal feasibility, stationarity on the support (all gradient
    entries equal the multiplier) and dual feasibility off the support
    (gradient entries not below the multiplier).
    """
    alpha = np.asarray(alpha, dtype=float)
    grad = problem.gradient(alpha)
    support = alpha > 0
    nu = grad[support].mean()
    res = [abs(alpha.sum() - 1.0), max(0.0, -alpha.min())]
    res.append(np.max(np.abs(grad[support] - nu)))
    if np.any(~support):
        res.append(max(0.0, np.max(nu - grad[~support])))
    return float(max(res))


def project_to_simplex(v) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    r = np.flatnonzero(u - css / idx > 0)[-1]
    return np.maximum(v - css[r] / (r + 1), 0.0)


def oracle_solve_alpha(problem: AlphaSubproblem, iterations: int = 20000,
                       step: float | None = None, tol: float = 1e-14) -> np.ndarray:
    """Reference solver: accelerated projected gradient with restarts.

    Independent of the water-filling structure; used to check
    :func:`solve_alpha`. The default step is ``1/Lipschitz``. Iteration stops
    early once successive iterates differ by less than ``tol`` (sup-norm).
    """
    t = problem.size
    if t == 1:
        return np.ones(1)
    if step is None:
        step = 0.5 * problem.mu * problem.priors.min()
    x = problem.priors.copy()
    z = x.copy()
    momentum = 1.0
    f_prev = problem.objective(x)
    for _ in range(iterations):
        x_new = project_to_simplex(z - step * problem.gradient(z))
        f_new = problem.objective(x_new)
        if f_new > f_prev:
            # Restart: drop momentum and take a plain projected step.
            momentum = 1.0
            z = x
            x_new = project_to_simplex(x - step * problem.gradient(x))
            f_new = problem.objective(x_new)
        m_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * momentum**2))
        z = x_new + ((momentum - 1.0) / m_new) * (x_new - x)
        momentum = m_new
        delta = np.max(np.abs(x_new - x))
        x, f_prev = x_new, f_new
        if delta < tol:
            break
    return x

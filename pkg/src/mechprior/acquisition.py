"""Maximization of acquisition criteria over bounded action spaces.

Evaluates the criterion on a coarse inclusive lattice, then refines the few
best lattice points with bounded Nelder-Mead. Score functions are
vectorized: they take an (n, d) array of actions and return (n,) scores.
Everything here is deterministic; lattice ties break toward the lowest
lattice index (row-major over dimensions).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .gp import GpState, posterior_batch
from .mechanisms import ActionBounds


@dataclass(frozen=True)
class AcquisitionConfig:
    grid_points: int = 25
    top_k: int = 5
    max_iterations: int = 100
    tolerance: float = 1e-6

    def __post_init__(self) -> None:
        if self.grid_points < 2:
            raise ValueError("grid_points must be at least 2")
        if self.top_k < 1 or self.max_iterations < 1:
            raise ValueError("top_k and max_iterations must be positive")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")


def lattice(bounds: ActionBounds, points_per_dim: int) -> np.ndarray:
    """Full inclusive grid over the bounds, (points^dim, dim), row-major."""
    low, high = bounds.as_arrays()
    axes = [np.linspace(low[d], high[d], points_per_dim) for d in range(bounds.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def maximize(score_fn, bounds: ActionBounds, cfg: AcquisitionConfig) -> tuple[np.ndarray, float]:
    """Maximize a vectorized score function over the bounds.

    Returns (action, score) with score >= the best lattice score. The
    refiner clips out-of-bounds proposals back into the box.
    """
    pts = lattice(bounds, cfg.grid_points)
    scores = np.asarray(score_fn(pts), dtype=float)
    order = np.argsort(-scores, kind="stable")[: cfg.top_k]

    low, high = bounds.as_arrays()

    def negated(x: np.ndarray) -> float:
        return -float(score_fn(np.clip(x, low, high)[None, :])[0])

    best_idx = int(order[0])
    best_action = pts[best_idx]
    best_score = float(scores[best_idx])
    for idx in order:
        result = minimize(
            negated,
            pts[int(idx)],
            method="Nelder-Mead",
            bounds=list(zip(low, high)),
            options={
                "maxiter": cfg.max_iterations,
                "xatol": cfg.tolerance,
                "fatol": cfg.tolerance,
            },
        )
        candidate = np.clip(result.x, low, high)
        candidate_score = float(score_fn(candidate[None, :])[0])
        if candidate_score > best_score:
            best_action, best_score = candidate, candidate_score
    return np.array(best_action, dtype=float), best_score


def select_ucb_action(
    prior_fn,
    state: GpState,
    bounds: ActionBounds,
    beta: float,
    cfg: AcquisitionConfig,
) -> np.ndarray:
    """Argmax of prior(a) + posterior mean + sqrt(beta) * posterior std."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    sqrt_beta = math.sqrt(beta)

    def score(actions: np.ndarray) -> np.ndarray:
        mean, var = posterior_batch(state, actions)
        total = prior_fn(actions) + mean
        if sqrt_beta > 0.0:
            total = total + sqrt_beta * np.sqrt(var)
        return total

    action, _ = maximize(score, bounds, cfg)
    return action


def best_estimate(prior_fn, state: GpState, bounds: ActionBounds, cfg: AcquisitionConfig) -> np.ndarray:
    """Current best guess at the optimal action: the beta=0 criterion."""
    return select_ucb_action(prior_fn, state, bounds, 0.0, cfg)


def zero_prior(actions: np.ndarray) -> np.ndarray:
    return np.zeros(actions.shape[0])

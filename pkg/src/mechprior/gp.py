"""Exact Gaussian-process regression with a squared-exponential kernel.

The GP models the residual between the true reward and a prior mean
supplied by the caller (zero for the uninformed baselines). States are
immutable values: adding an observation returns a new state carrying a
refreshed Cholesky factorization of the regularized Gram matrix, so
posterior queries are cheap and safe to run concurrently.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

# Always added to the noise variance so duplicate observations stay factorable.
NOISE_FLOOR = 1e-8
_JITTER_START = 1e-8
_JITTER_GROWTH = 10.0
_JITTER_ATTEMPTS = 3


class FactorizationError(RuntimeError):
    """Gram matrix could not be factorized even after jitter escalation."""


@dataclass(frozen=True)
class KernelParams:
    lengthscales: tuple[float, ...]
    signal_variance: float
    noise_variance: float

    def __post_init__(self) -> None:
        if not all(l > 0 for l in self.lengthscales):
            raise ValueError("lengthscales must be positive")
        if self.signal_variance <= 0:
            raise ValueError("signal_variance must be positive")
        if self.noise_variance < 0:
            raise ValueError("noise_variance must be nonnegative")

    @property
    def dim(self) -> int:
        return len(self.lengthscales)


@dataclass(frozen=True)
class Posterior:
    mean: float
    variance: float


@dataclass(frozen=True)
class GpState:
    kernel: KernelParams
    x: np.ndarray  # (n, d) observed actions
    y: np.ndarray  # (n,) observed residuals
    chol: np.ndarray | None  # lower-triangular factor of K + noise*I
    alpha: np.ndarray | None  # (K + noise*I)^-1 y

    def __len__(self) -> int:
        return self.x.shape[0]


def empty_state(kernel: KernelParams) -> GpState:
    d = kernel.dim
    return GpState(
        kernel=kernel,
        x=np.empty((0, d)),
        y=np.empty((0,)),
        chol=None,
        alpha=None,
    )


def sqexp_kernel(a: np.ndarray, b: np.ndarray, kernel: KernelParams) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != (kernel.dim,) or b.shape != (kernel.dim,):
        raise ValueError("kernel inputs must match the lengthscale dimension")
    z = (a - b) / np.asarray(kernel.lengthscales)
    return kernel.signal_variance * math.exp(-0.5 * float(z @ z))


def _cross_kernel(xa: np.ndarray, xb: np.ndarray, kernel: KernelParams) -> np.ndarray:
    """Kernel matrix between row sets xa (m, d) and xb (n, d)."""
    ell = np.asarray(kernel.lengthscales)
    sa = xa / ell
    sb = xb / ell
    sq = (
        np.sum(sa * sa, axis=1)[:, None]
        + np.sum(sb * sb, axis=1)[None, :]
        - 2.0 * (sa @ sb.T)
    )
    return kernel.signal_variance * np.exp(-0.5 * np.maximum(sq, 0.0))


def _factorize(x: np.ndarray, y: np.ndarray, kernel: KernelParams) -> tuple[np.ndarray, np.ndarray]:
    gram = _cross_kernel(x, x, kernel)
    noise = kernel.noise_variance + NOISE_FLOOR
    jitters = [0.0] + [_JITTER_START * _JITTER_GROWTH**k for k in range(_JITTER_ATTEMPTS - 1)]
    for jitter in jitters:
        try:
            chol = np.linalg.cholesky(gram + (noise + jitter) * np.eye(len(x)))
        except np.linalg.LinAlgError:
            continue
        alpha = solve_triangular(
            chol.T, solve_triangular(chol, y, lower=True), lower=False
        )
        return chol, alpha
    raise FactorizationError(f"Cholesky failed for {len(x)} observations after jitter escalation")


def add_observation(state: GpState, action: np.ndarray, residual: float) -> GpState:
    """Return a new state with the (action, residual) pair appended."""
    a = np.asarray(action, dtype=float)
    if a.shape != (state.kernel.dim,):
        raise ValueError("action dimension does not match the kernel")
    if not math.isfinite(residual):
        raise ValueError("residual must be finite")
    x = np.vstack([state.x, a[None, :]])
    y = np.append(state.y, float(residual))
    chol, alpha = _factorize(x, y, state.kernel)
    return GpState(kernel=state.kernel, x=x, y=y, chol=chol, alpha=alpha)


def posterior_batch(state: GpState, actions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Posterior means and variances at each row of actions (m, d)."""
    a = np.asarray(actions, dtype=float)
    if a.ndim != 2 or a.shape[1] != state.kernel.dim:
        raise ValueError("actions must be (m, d) with d matching the kernel")
    prior_var = np.full(a.shape[0], state.kernel.signal_variance)
    if len(state) == 0:
        return np.zeros(a.shape[0]), prior_var
    k_star = _cross_kernel(state.x, a, state.kernel)  # (n, m)
    mean = k_star.T @ state.alpha
    v = solve_triangular(state.chol, k_star, lower=True)
    var = prior_var - np.sum(v * v, axis=0)
    return mean, np.maximum(var, 0.0)


def posterior(state: GpState, action: np.ndarray) -> Posterior:
    mean, var = posterior_batch(state, np.asarray(action, dtype=float)[None, :])
    return Posterior(mean=float(mean[0]), variance=float(var[0]))


def ucb_score(state: GpState, prior_mean: float, action: np.ndarray, beta: float) -> float:
    """Optimistic score: prior mean + posterior mean + sqrt(beta) * posterior std."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    post = posterior(state, action)
    return prior_mean + post.mean + math.sqrt(beta) * math.sqrt(post.variance)

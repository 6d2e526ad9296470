"""Acquisition maximization tests: lattice search plus local refinement."""
import numpy as np
import pytest

from mechprior.acquisition import (
    AcquisitionConfig,
    best_estimate,
    lattice,
    maximize,
    select_ucb_action,
    zero_prior,
)
from mechprior.gp import KernelParams, add_observation, empty_state
from mechprior.harness import normalized_regret
from mechprior.mechanisms import (
    ActionBounds,
    MechanismKind,
    action_bounds,
    execute_action,
    generate_mechanism,
    oracle_optimal,
)

BOUNDS_2D = ActionBounds(low=(-1.0, -1.0), high=(1.0, 1.0))
CFG = AcquisitionConfig(grid_points=15, top_k=3, max_iterations=100, tolerance=1e-6)


def gaussian_bumps(rng, dim, n_bumps=4):
    centers = rng.uniform(-1, 1, (n_bumps, dim))
    weights = rng.uniform(0.2, 1.0, n_bumps)
    widths = rng.uniform(0.1, 0.6, n_bumps)

    def score(actions):
        d2 = ((actions[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        return (weights * np.exp(-d2 / (2 * widths**2))).sum(axis=1)

    return score


class TestMaximize:
    def test_finds_quadratic_optimum(self):
        center = np.array([0.31, -0.22])
        action, score = maximize(lambda a: -((a - center) ** 2).sum(axis=1), BOUNDS_2D, CFG)
        assert np.linalg.norm(action - center) < 1e-3
        assert score <= 0.0

    def test_constant_score_returns_first_lattice_point(self):
        action, _ = maximize(lambda a: np.zeros(a.shape[0]), BOUNDS_2D, CFG)
        assert np.array_equal(action, lattice(BOUNDS_2D, CFG.grid_points)[0])
        assert action.tolist() == [-1.0, -1.0]

    def test_refinement_never_regresses(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            score_fn = gaussian_bumps(rng, 2)
            pts = lattice(BOUNDS_2D, CFG.grid_points)
            best_lattice = score_fn(pts).max()
            _, score = maximize(score_fn, BOUNDS_2D, CFG)
            assert score >= best_lattice

    def test_result_within_bounds(self):
        rng = np.random.default_rng(9)
        bounds = ActionBounds(low=(0.0, -np.pi, -1.5), high=(0.4, np.pi, 1.5))
        for _ in range(10):
            score_fn = gaussian_bumps(rng, 3)
            action, _ = maximize(score_fn, bounds, AcquisitionConfig(grid_points=8))
            assert bounds.contains(action)

    def test_deterministic(self):
        rng = np.random.default_rng(10)
        score_fn = gaussian_bumps(rng, 2)
        a1, s1 = maximize(score_fn, BOUNDS_2D, CFG)
        a2, s2 = maximize(score_fn, BOUNDS_2D, CFG)
        assert np.array_equal(a1, a2) and s1 == s2

    def test_config_validation(self):
        with pytest.raises(ValueError):
            AcquisitionConfig(grid_points=1)
        with pytest.raises(ValueError):
            AcquisitionConfig(top_k=0)
        with pytest.raises(ValueError):
            AcquisitionConfig(tolerance=0.0)


class TestSelectUcbAction:
    def test_empty_gp_beta_zero_maximizes_prior(self):
        rng = np.random.default_rng(11)
        prior = gaussian_bumps(rng, 2)
        state = empty_state(KernelParams((0.3, 0.3), 1.0, 1e-6))
        chosen = select_ucb_action(prior, state, BOUNDS_2D, 0.0, CFG)
        direct, _ = maximize(prior, BOUNDS_2D, CFG)
        assert np.array_equal(chosen, direct)

    def test_flat_criterion_tie_breaks_to_first_lattice_point(self):
        state = empty_state(KernelParams((0.3, 0.3), 1.0, 1e-6))
        chosen = select_ucb_action(zero_prior, state, BOUNDS_2D, 4.0, CFG)
        assert chosen.tolist() == [-1.0, -1.0]

    def test_single_positive_residual_attracts_best_estimate(self):
        state = empty_state(KernelParams((0.3, 0.3), 1.0, 1e-6))
        observed = np.array([0.25, -0.5])
        state = add_observation(state, observed, 0.8)
        chosen = select_ucb_action(zero_prior, state, BOUNDS_2D, 0.0, CFG)
        cell = 2.0 / (CFG.grid_points - 1)
        assert np.all(np.abs(chosen - observed) <= cell + 1e-9)

    def test_negative_beta_rejected(self):
        state = empty_state(KernelParams((0.3, 0.3), 1.0, 1e-6))
        with pytest.raises(ValueError):
            select_ucb_action(zero_prior, state, BOUNDS_2D, -1.0, CFG)


class TestBestEstimate:
    def test_equals_beta_zero_selection(self):
        rng = np.random.default_rng(12)
        prior = gaussian_bumps(rng, 2)
        state = empty_state(KernelParams((0.3, 0.3), 1.0, 1e-6))
        state = add_observation(state, np.array([0.0, 0.0]), 0.3)
        assert np.array_equal(
            best_estimate(prior, state, BOUNDS_2D, CFG),
            select_ucb_action(prior, state, BOUNDS_2D, 0.0, CFG),
        )

    def test_oracle_prior_reaches_optimum_without_observations(self):
        # With the true reward surface as prior, the zero-interaction best
        # estimate is already essentially optimal.
        cfg = AcquisitionConfig(grid_points=25)
        kernel = KernelParams((0.55, 0.12), 0.04, 1e-6)
        bounds = action_bounds(MechanismKind.SLIDER)
        failures = 0
        for s in range(50):
            m = generate_mechanism(MechanismKind.SLIDER, 30_000 + s)

            def true_reward(actions):
                travel = actions[:, 1] * np.cos(actions[:, 0] - m.params.track_angle)
                return np.clip(travel, 0.0, m.params.track_length)

            action = best_estimate(true_reward, empty_state(kernel), bounds, cfg)
            _, r_star = oracle_optimal(m)
            regret = normalized_regret(r_star, execute_action(m, action))
            if regret >= 0.01:
                failures += 1
        assert failures == 0

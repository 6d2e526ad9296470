"""Mechanism generation, rendering, and reward-model tests.

Reward values are checked against independent scalar re-derivations of the
projection/falloff formulas, and the analytic optimum against brute-force
lattice sweeps.
"""
import math

import numpy as np
import pytest
from scipy.stats import spearmanr

from mechprior.mechanisms import (
    DOOR_MIN_ANGLE,
    DOOR_SIGMA_PITCH,
    DOOR_SIGMA_RADIUS,
    BoundsViolation,
    DoorParams,
    Mechanism,
    MechanismKind,
    SliderParams,
    action_bounds,
    execute_action,
    generate_mechanism,
    mechanism_from_json,
    mechanism_to_json,
    oracle_optimal,
    render,
    write_pgm,
)

SLIDER = MechanismKind.SLIDER
DOOR = MechanismKind.DOOR


def slider(track_angle, track_length, handle_offset=(0.0, 0.0), seed=0):
    return Mechanism(SLIDER, SliderParams(track_angle, track_length, handle_offset), seed)


def door(radius, hinge_sign=1, axis_pitch=0.0, seed=0):
    return Mechanism(DOOR, DoorParams(radius, hinge_sign, axis_pitch, math.pi / 2), seed)


def reference_reward(mechanism, action):
    """Scalar re-derivation of the reward formulas, independent of numpy."""
    if mechanism.kind is SLIDER:
        p = mechanism.params
        travel = action[1] * math.cos(action[0] - p.track_angle)
        return min(max(travel, 0.0), p.track_length)
    p = mechanism.params
    g = math.exp(-((action[0] - p.radius) ** 2) / (2 * DOOR_SIGMA_RADIUS**2)) * math.exp(
        -((action[2] - p.axis_pitch) ** 2) / (2 * DOOR_SIGMA_PITCH**2)
    )
    angle = min(max(p.hinge_sign * action[1] * g, 0.0), p.max_angle)
    if angle < DOOR_MIN_ANGLE:
        angle = 0.0
    return p.radius * angle


class TestGeneration:
    def test_same_seed_identical(self):
        for kind in (SLIDER, DOOR):
            assert generate_mechanism(kind, 42) == generate_mechanism(kind, 42)

    def test_different_seeds_differ(self):
        assert generate_mechanism(SLIDER, 1) != generate_mechanism(SLIDER, 2)

    def test_uniform_sampling_statistics(self):
        lengths = np.array(
            [generate_mechanism(SLIDER, s).params.track_length for s in range(10_000)]
        )
        assert lengths.min() >= 0.10 and lengths.max() <= 0.50
        assert abs(lengths.mean() - 0.30) < 0.01

    def test_door_fields_in_range(self):
        for s in range(200):
            p = generate_mechanism(DOOR, s).params
            assert p.hinge_sign in (1, -1)
            assert 0.05 <= p.radius <= 0.30
            assert -math.pi / 4 <= p.axis_pitch <= math.pi / 4
            assert p.max_angle == math.pi / 2


class TestExecuteAction:
    def test_aligned_slider_at_limit(self):
        assert execute_action(slider(0.0, 0.3), np.array([0.0, 0.3])) == pytest.approx(0.3)

    def test_orthogonal_push_no_motion(self):
        assert execute_action(slider(0.0, 0.3), np.array([math.pi / 2, 0.5])) == pytest.approx(0.0, abs=1e-15)

    def test_door_fully_aligned(self):
        m = door(0.2, hinge_sign=1, axis_pitch=0.0)
        r = execute_action(m, np.array([0.2, math.pi / 2, 0.0]))
        assert r == pytest.approx(0.2 * math.pi / 2)

    def test_slider_projection_value(self):
        r = execute_action(slider(0.7, 0.4), np.array([0.9, 0.35]))
        assert r == pytest.approx(min(0.35 * math.cos(0.2), 0.4), abs=1e-15)

    def test_out_of_bounds_rejected(self):
        with pytest.raises(BoundsViolation):
            execute_action(slider(0.0, 0.3), np.array([0.0, 0.7]))
        with pytest.raises(BoundsViolation):
            execute_action(door(0.1), np.array([0.5, 0.0, 0.0]))

    def test_matches_reference_formula(self):
        rng = np.random.default_rng(11)
        for kind in (SLIDER, DOOR):
            bounds = action_bounds(kind)
            low, high = bounds.as_arrays()
            for _ in range(2_000):
                m = generate_mechanism(kind, int(rng.integers(0, 1 << 32)))
                a = rng.uniform(low, high)
                assert execute_action(m, a) == pytest.approx(reference_reward(m, a), abs=1e-12)

    def test_reward_bounded_by_optimum(self):
        rng = np.random.default_rng(12)
        for kind in (SLIDER, DOOR):
            bounds = action_bounds(kind)
            low, high = bounds.as_arrays()
            for _ in range(500):
                m = generate_mechanism(kind, int(rng.integers(0, 1 << 32)))
                _, r_star = oracle_optimal(m)
                r = execute_action(m, rng.uniform(low, high))
                assert 0.0 <= r <= r_star

    def test_slider_sign_symmetry(self):
        rng = np.random.default_rng(13)
        for _ in range(300):
            m = generate_mechanism(SLIDER, int(rng.integers(0, 1 << 32)))
            theta = rng.uniform(-math.pi, math.pi)
            q = rng.uniform(-0.6, 0.6)
            flipped = theta + math.pi if theta < 0 else theta - math.pi
            r1 = execute_action(m, np.array([theta, q]))
            r2 = execute_action(m, np.array([flipped, -q]))
            assert r1 == pytest.approx(r2, abs=1e-12)


class TestOracle:
    def test_slider_optimum_is_travel_limit(self):
        _, r_star = oracle_optimal(slider(0.3, 0.25))
        assert r_star == 0.25

    def test_door_optimum_is_arc_length(self):
        _, r_star = oracle_optimal(door(0.1))
        assert r_star == pytest.approx(0.1 * math.pi / 2)

    def test_oracle_action_achieves_optimum_exactly(self):
        rng = np.random.default_rng(14)
        for kind in (SLIDER, DOOR):
            for _ in range(100):
                m = generate_mechanism(kind, int(rng.integers(0, 1 << 32)))
                a_star, r_star = oracle_optimal(m)
                assert execute_action(m, a_star) == r_star

    def test_oracle_dominates_lattice(self):
        # Smaller sweep here; the acceptance suite runs 200 mechanisms at
        # 100 points per dimension.
        for kind, n in ((SLIDER, 40), (DOOR, 15)):
            for s in range(n):
                m = generate_mechanism(kind, 7_000 + s)
                _, r_star = oracle_optimal(m)
                assert lattice_max(m, 60) <= r_star + 1e-12


def lattice_max(mechanism, points_per_dim):
    """Brute-force lattice maximum of the reference reward formulas."""
    low, high = action_bounds(mechanism.kind).as_arrays()
    axes = [np.linspace(low[d], high[d], points_per_dim) for d in range(len(low))]
    if mechanism.kind is SLIDER:
        p = mechanism.params
        theta, q = np.meshgrid(*axes, indexing="ij")
        travel = q * np.cos(theta - p.track_angle)
        return float(np.clip(travel, 0.0, p.track_length).max())
    p = mechanism.params
    r, q, psi = np.meshgrid(*axes, indexing="ij")
    g = np.exp(-((r - p.radius) ** 2) / (2 * DOOR_SIGMA_RADIUS**2)) * np.exp(
        -((psi - p.axis_pitch) ** 2) / (2 * DOOR_SIGMA_PITCH**2)
    )
    angle = np.clip(p.hinge_sign * q * g, 0.0, p.max_angle)
    angle = np.where(angle < DOOR_MIN_ANGLE, 0.0, angle)
    return float((p.radius * angle).max())


class TestActionBounds:
    def test_dimensions(self):
        assert action_bounds(SLIDER).dim == 2
        assert action_bounds(DOOR).dim == 3

    def test_slider_magnitude_contains_max_track_length(self):
        bounds = action_bounds(SLIDER)
        assert bounds.low[1] == -0.60 and bounds.high[1] == 0.60
        assert bounds.high[1] > 0.50


class TestRender:
    def test_deterministic(self):
        for kind in (SLIDER, DOOR):
            m = generate_mechanism(kind, 5)
            assert np.array_equal(render(m), render(m))

    def test_axis_aligned_slider_layout(self):
        img = render(slider(0.0, 0.5, (0.0, 0.0)))
        assert img.shape == (64, 64)
        assert img.min() >= 0.0 and img.max() <= 1.0
        # Bright 5x5 handle block centered on the canvas center.
        assert np.all(img[30:35, 30:35] == 1.0)
        assert img.max() == 1.0
        # Track extends to the right of the handle along the center row
        # (the 50 px track is clipped at the canvas edge).
        assert np.all(img[32, 35:64] > 0.0)
        # Nothing behind the track start or far off-axis.
        assert np.all(img[32, :28] == 0.0)
        assert np.all(img[:27, :] == 0.0)

    def test_angle_perturbation_changes_pixels(self):
        changed = []
        for s in range(60):
            m = generate_mechanism(SLIDER, s)
            if m.params.track_angle > math.pi - 0.5:
                continue
            bumped = Mechanism(
                SLIDER,
                SliderParams(
                    m.params.track_angle + 0.5,
                    m.params.track_length,
                    m.params.handle_offset,
                ),
                m.seed,
            )
            changed.append(int(np.sum(render(m) != render(bumped))))
        assert min(changed) >= 20

    def test_door_visual_features(self):
        img = render(door(0.3, hinge_sign=1, axis_pitch=0.0))
        assert img.max() == 1.0  # handle dot
        assert np.any(np.isclose(img, 0.3))  # hinge edge
        wide = np.sum(render(door(0.3)) > 0)
        narrow = np.sum(render(door(0.06)) > 0)
        assert wide > narrow

    def test_image_distance_tracks_parameter_distance(self):
        # Pairs are a mechanism plus a perturbed copy at log-uniform
        # perturbation scales, covering near-identical through unrelated
        # parameter vectors. (Pairs of two independent mechanisms mostly
        # land where thin-stroke images no longer overlap, so their L1
        # distance saturates and carries no distance signal.)
        rng = np.random.default_rng(15)
        for kind in (SLIDER, DOOR):
            img_d, par_d = [], []
            for t in range(1_000):
                m = generate_mechanism(kind, 50_000 + t)
                eps = 10 ** rng.uniform(-2, 0)
                m2 = Mechanism(kind, _perturb(m.params, eps, rng), m.seed)
                img_d.append(float(np.abs(render(m) - render(m2)).sum()))
                par_d.append(_param_distance(m.params, m2.params))
            rho = spearmanr(img_d, par_d).statistic
            assert rho > 0.3, f"{kind.value}: rank correlation {rho}"


def _perturb(params, eps, rng):
    if isinstance(params, SliderParams):
        return SliderParams(
            track_angle=float(np.clip(params.track_angle + eps * math.pi * rng.normal(), 0, math.pi - 1e-9)),
            track_length=float(np.clip(params.track_length + eps * 0.4 * rng.normal(), 0.10, 0.50)),
            handle_offset=(
                float(np.clip(params.handle_offset[0] + eps * 0.3 * rng.normal(), -0.15, 0.15)),
                float(np.clip(params.handle_offset[1] + eps * 0.3 * rng.normal(), -0.15, 0.15)),
            ),
        )
    return DoorParams(
        radius=float(np.clip(params.radius + eps * 0.25 * rng.normal(), 0.05, 0.30)),
        hinge_sign=params.hinge_sign if rng.uniform() > eps else -params.hinge_sign,
        axis_pitch=float(np.clip(params.axis_pitch + eps * (math.pi / 2) * rng.normal(), -math.pi / 4, math.pi / 4)),
        max_angle=params.max_angle,
    )


def _param_distance(a, b):
    if isinstance(a, SliderParams):
        return math.sqrt(
            ((a.track_angle - b.track_angle) / math.pi) ** 2
            + ((a.track_length - b.track_length) / 0.4) ** 2
            + ((a.handle_offset[0] - b.handle_offset[0]) / 0.3) ** 2
            + ((a.handle_offset[1] - b.handle_offset[1]) / 0.3) ** 2
        )
    return math.sqrt(
        ((a.radius - b.radius) / 0.25) ** 2
        + ((a.hinge_sign - b.hinge_sign) / 2) ** 2
        + ((a.axis_pitch - b.axis_pitch) / (math.pi / 2)) ** 2
    )


class TestSerialization:
    def test_json_round_trip(self):
        for kind in (SLIDER, DOOR):
            m = generate_mechanism(kind, 77)
            assert mechanism_from_json(mechanism_to_json(m)) == m

    def test_pgm_output(self, tmp_path):
        m = generate_mechanism(SLIDER, 7)
        path = tmp_path / "m.pgm"
        write_pgm(render(m), path)
        data = path.read_bytes()
        assert data.startswith(b"P5\n64 64\n255\n")
        assert len(data) == len(b"P5\n64 64\n255\n") + 64 * 64
        write_pgm(render(m), tmp_path / "m2.pgm")
        assert data == (tmp_path / "m2.pgm").read_bytes()

"""Feasibility model tests, including a from-scratch robot check oracle."""

import numpy as np
import pytest

from actmap.envs import PathPlanEnv, RobotArmEnv, ToyDiskEnv
from actmap.envs.robot import RobotPartialState
from actmap.envs.toy import disk_distance, sample_disks
from actmap.feasibility import (
    FeasibilityModel,
    PathFeasibilityModel,
    RobotFeasibilityModel,
    ToyFeasibilityModel,
    joint_cost,
    make_model,
    trajectory_cost,
)
from actmap.geometry import JOINT_LIMITS


class TestJointCost:
    def test_worked_example(self):
        assert joint_cost([0.5, -0.2], [0.3, 0.0]) == pytest.approx(0.2)

    def test_zero_at_or_below_bounds(self):
        assert joint_cost([0.3, 0.0], [0.3, 0.0]) == 0.0
        assert joint_cost([-1.0], [0.0]) == 0.0

    def test_random_values_match_clip_sum(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            c = rng.normal(size=5)
            w = rng.normal(size=5)
            assert joint_cost(c, w) == pytest.approx(np.maximum(c - w, 0.0).sum(), abs=1e-15)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            joint_cost([1.0, 2.0], [0.0])


# independent redo of every robot one-step check, with its own kinematics

_ORACLE_DH = [
    (0.0, 0.333, 0.0),
    (0.0, 0.0, -np.pi / 2),
    (0.0, 0.316, np.pi / 2),
    (0.0825, 0.0, np.pi / 2),
    (-0.0825, 0.384, -np.pi / 2),
    (0.0, 0.0, np.pi / 2),
    (0.088, 0.0, np.pi / 2),
    (0.0, 0.107, 0.0),
]

_ORACLE_LIMITS = [
    (-2.7437, 2.7437),
    (-1.7837, 1.7837),
    (-2.9007, 2.9007),
    (-3.0421, -0.1518),
    (-2.8065, 2.8065),
    (0.5445, 4.5169),
    (-3.0159, 3.0159),
]


def _rot_x(t):
    m = np.eye(4)
    m[1, 1] = m[2, 2] = np.cos(t)
    m[2, 1] = np.sin(t)
    m[1, 2] = -np.sin(t)
    return m


def _rot_z(t):
    m = np.eye(4)
    m[0, 0] = m[1, 1] = np.cos(t)
    m[1, 0] = np.sin(t)
    m[0, 1] = -np.sin(t)
    return m


def _trans(x, y, z):
    m = np.eye(4)
    m[:3, 3] = (x, y, z)
    return m


def oracle_origins(joints):
    t = np.eye(4)
    out = [t[:3, 3].copy()]
    thetas = list(joints) + [0.0]
    for (a, d, alpha), th in zip(_ORACLE_DH, thetas):
        t = t @ _rot_x(alpha) @ _trans(a, 0, 0) @ _rot_z(th) @ _trans(0, 0, d)
        out.append(t[:3, 3].copy())
    return np.array(out)


def _seg_point_dist(p, a, b):
    ab = b - a
    denom = float(ab @ ab)
    lam = 0.0 if denom == 0.0 else float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
    return float(np.linalg.norm(a + lam * ab - p))


def oracle_feasible(partial, action, capsule_radius=0.06):
    a = np.clip(np.asarray(action, float), -1.0, 1.0)
    new = partial.joints + a * (np.pi / 2)
    for j in range(7):
        lo, hi = _ORACLE_LIMITS[j]
        if new[j] < lo or new[j] > hi:
            return False
    old_o = oracle_origins(partial.joints)
    new_o = oracle_origins(new)
    for i in range(len(old_o)):
        if np.linalg.norm(new_o[i] - old_o[i]) > 0.3 * 0.5:
            return False
    for i in range(len(new_o) - 1):
        for c, r in zip(partial.obstacle_centers, partial.obstacle_radii):
            if _seg_point_dist(c, new_o[i], new_o[i + 1]) < r + capsule_radius:
                return False
    return True


class TestRobotModel:
    def test_brute_force_agreement(self):
        env = RobotArmEnv()
        model = RobotFeasibilityModel()
        rng = np.random.default_rng(17)
        n, per_state = 1500, 30
        checked = 0
        for _ in range(n // per_state):
            partial = env.generate_partial_state(rng)
            scale = rng.choice([1.0, 0.2, 0.05, 0.01], size=(per_state, 1))
            acts = rng.uniform(-1.0, 1.0, size=(per_state, 7)) * scale
            got = model.g_batch(partial, acts)
            for k in range(per_state):
                assert bool(got[k]) == oracle_feasible(partial, acts[k])
                checked += 1
        assert checked == n

    def test_single_equals_batch_bitwise(self):
        env = RobotArmEnv()
        model = RobotFeasibilityModel()
        rng = np.random.default_rng(3)
        partial = env.generate_partial_state(rng)
        acts = rng.uniform(-0.3, 0.3, size=(64, 7))
        batch = model.violation_batch(partial, acts)
        singles = np.array([model.G(partial, a) for a in acts])
        assert np.array_equal(batch, singles)

    def test_g_iff_measure_zero(self):
        env = RobotArmEnv()
        model = RobotFeasibilityModel()
        rng = np.random.default_rng(5)
        partial = env.generate_partial_state(rng)
        acts = rng.uniform(-1.0, 1.0, size=(256, 7)) * rng.choice(
            [1.0, 0.02], size=(256, 1)
        )
        measure = model.violation_batch(partial, acts)
        assert np.all(measure >= 0.0)
        assert np.array_equal(model.g_batch(partial, acts), measure == 0.0)
        assert measure.min() == 0.0 and measure.max() > 0.0

    def test_measure_invariant_to_obstacle_order(self):
        env = RobotArmEnv()
        model = RobotFeasibilityModel()
        rng = np.random.default_rng(7)
        for _ in range(10):
            partial = env.generate_partial_state(rng)
            if len(partial.obstacle_centers) < 2:
                continue
            acts = rng.uniform(-1.0, 1.0, size=(32, 7))
            perm = rng.permutation(len(partial.obstacle_centers))
            shuffled = RobotPartialState(
                partial.joints,
                partial.obstacle_centers[perm],
                partial.obstacle_radii[perm],
            )
            assert np.array_equal(
                model.violation_batch(partial, acts),
                model.violation_batch(shuffled, acts),
            )

    def test_capsule_radius_is_configurable(self):
        env = RobotArmEnv()
        rng = np.random.default_rng(11)
        partial = env.generate_partial_state(rng)
        acts = rng.uniform(-0.2, 0.2, size=(128, 7))
        thin = RobotFeasibilityModel(capsule_radius=0.001).violation_batch(partial, acts)
        fat = RobotFeasibilityModel(capsule_radius=0.3).violation_batch(partial, acts)
        assert np.all(fat >= thin)


class TestPathModel:
    def test_single_equals_batch_bitwise(self):
        env = PathPlanEnv()
        model = PathFeasibilityModel()
        rng = np.random.default_rng(2)
        partial = env.generate_partial_state(rng)
        acts = rng.uniform(-1.0, 1.0, size=(64, 5))
        batch = model.violation_batch(partial, acts)
        singles = np.array([model.G(partial, a) for a in acts])
        assert np.array_equal(batch, singles)

    def test_g_iff_measure_zero(self):
        env = PathPlanEnv()
        model = PathFeasibilityModel()
        rng = np.random.default_rng(4)
        partial = env.generate_partial_state(rng)
        acts = rng.uniform(-1.0, 1.0, size=(512, 5))
        measure = model.violation_batch(partial, acts)
        assert np.all(measure >= 0.0)
        assert np.array_equal(model.g_batch(partial, acts), measure == 0.0)

    def test_measure_invariant_to_obstacle_order(self):
        from actmap.envs.path import PathPartialState

        env = PathPlanEnv()
        model = PathFeasibilityModel()
        rng = np.random.default_rng(6)
        partial = env.generate_partial_state(rng)
        acts = rng.uniform(-1.0, 1.0, size=(64, 5))
        perm = rng.permutation(len(partial.rect_lo))
        shuffled = PathPartialState(
            partial.position, partial.heading, partial.rect_lo[perm], partial.rect_hi[perm]
        )
        assert np.array_equal(
            model.violation_batch(partial, acts), model.violation_batch(shuffled, acts)
        )

    def test_resolution_is_configurable(self):
        with pytest.raises(ValueError):
            PathFeasibilityModel(s_points=1)
        assert PathFeasibilityModel(s_points=128).s_points == 128


class TestToyModel:
    def test_matches_disk_distance_exactly(self):
        rng = np.random.default_rng(0)
        model = ToyFeasibilityModel()
        disks = sample_disks(rng)
        partial = disks.as_vector()
        acts = rng.uniform(-1.0, 1.0, size=(1000, 2))
        assert np.array_equal(model.violation_batch(partial, acts), disk_distance(disks, acts))
        assert np.array_equal(model.g_batch(partial, acts), disk_distance(disks, acts) == 0.0)

    def test_center_feasible_far_corner_not(self):
        rng = np.random.default_rng(1)
        model = ToyFeasibilityModel()
        disks = sample_disks(rng)
        partial = disks.as_vector()
        assert model.g(partial, disks.centers[0])
        assert not model.g(partial, np.array([1.0, 1.0]))


class TestFactory:
    def test_known_names(self):
        assert isinstance(make_model("toy"), ToyFeasibilityModel)
        assert isinstance(make_model("robot"), RobotFeasibilityModel)
        assert isinstance(make_model("path"), PathFeasibilityModel)
        assert isinstance(make_model("path", s_points=32), FeasibilityModel)

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError, match="no feasibility model"):
            make_model("maze")


class TestTrajectoryCost:
    def test_clean_toy_episode_scores_zero(self):
        env = ToyDiskEnv()
        model = ToyFeasibilityModel()
        assert trajectory_cost(env, model, lambda s: env.safe_action(s), seed=0) == 0.0

    def test_violating_step_scores_its_distance(self):
        env = ToyDiskEnv()
        model = ToyFeasibilityModel()
        seen = {}

        def policy(state):
            if state.steps < 2:
                return env.safe_action(state)
            corner = np.array([1.0, 1.0])
            seen["dist"] = float(disk_distance(state.disks, corner)[0])
            return corner

        cost = trajectory_cost(env, model, policy, seed=3)
        assert cost == pytest.approx(seen["dist"], abs=1e-15)
        assert cost > 0.0

    def test_limit_breach_magnitude_is_the_cost(self):
        env = RobotArmEnv()
        env.reset(seed=0)
        env.state.joints = JOINT_LIMITS.mean(axis=1)
        env.state.joints[6] = 3.0
        env.state.obstacle_centers = np.zeros((0, 3))
        env.state.obstacle_radii = np.zeros(0)
        model = RobotFeasibilityModel()
        overshoot = 0.05

        def policy(state):
            act = np.zeros(7)
            act[6] = (JOINT_LIMITS[6, 1] - 3.0 + overshoot) / (np.pi / 2)
            return act

        # reset is part of trajectory_cost, so rebuild the state afterwards
        state0 = env.state

        def run(env_seed):
            env.reset(env_seed)
            env.state = state0
            worst = 0.0
            done = False
            state = state0
            while not done:
                act = policy(state)
                worst = max(worst, model.G(env.partial_state(state), act))
                res = env.step(act)
                state, done = res.state, res.done
            return worst

        assert run(0) == pytest.approx(overshoot, abs=1e-12)

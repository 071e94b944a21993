"""Environment tests: determinism, rewards, constraint semantics, scene IO."""

import numpy as np
import pytest

from actmap.envs import (
    PathPlanEnv,
    RobotArmEnv,
    ToyDiskEnv,
    load_scene,
    make_env,
    save_scene,
)
from actmap.envs.path import (
    ALL_TARGETS_BONUS,
    D_STEP,
    N_RECTS,
    N_TARGETS,
    TARGET_REWARD,
    PathPartialState,
    PathState,
    decode_spline,
    spline_violation,
    spline_violation_batch,
)
from actmap.envs.robot import (
    DT,
    MAX_DELTA,
    SPEED_LIMIT,
    MAX_OBSTACLES,
    RobotPartialState,
    one_step_violation_batch,
    sample_joints,
)
from actmap.envs.scene_io import scene_lines
from actmap.envs.toy import (
    DiskPair,
    disk_distance,
    disk_feasible,
    disk_membership,
    perfect_disk_map,
    sample_disks,
)
from actmap.geometry import JOINT_LIMITS, rotation_angle, fk_frames


def rollout(env, seed, policy, max_steps=1000):
    state = env.reset(seed)
    results = []
    for _ in range(max_steps):
        res = env.step(policy(state))
        results.append(res)
        state = res.state
        if res.done:
            break
    return results


class TestDeterminism:
    @pytest.mark.parametrize("name", ["toy", "robot", "path"])
    def test_reset_is_reproducible(self, name):
        a = make_env(name).reset(seed=123)
        b = make_env(name).reset(seed=123)
        assert scene_lines(a) == scene_lines(b)

    @pytest.mark.parametrize("name", ["toy", "robot", "path"])
    def test_trajectory_is_reproducible(self, name):
        runs = []
        for _ in range(2):
            env = make_env(name)
            env.reset(seed=7)
            rng = np.random.default_rng(0)
            rewards = []
            for _ in range(5):
                res = env.step(rng.uniform(-0.05, 0.05, size=env.action_dim))
                rewards.append(res.reward)
                if res.done:
                    break
            runs.append((rewards, scene_lines(env.state)))
        assert runs[0][0] == runs[1][0]
        assert runs[0][1] == runs[1][1]

    @pytest.mark.parametrize("name", ["toy", "robot", "path"])
    def test_different_seeds_differ(self, name):
        a = make_env(name).reset(seed=1)
        b = make_env(name).reset(seed=2)
        assert scene_lines(a) != scene_lines(b)

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError, match="unknown environment"):
            make_env("gridworld")


class TestToyDisks:
    def test_sampled_disks_are_disjoint_and_inside(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            d = sample_disks(rng)
            gap = np.linalg.norm(d.centers[0] - d.centers[1]) - d.radii.sum()
            assert gap >= 0.1 - 1e-12
            assert np.all(np.abs(d.centers) + d.radii[:, None] <= 0.95 + 1e-12)
            assert np.all((d.radii >= 0.25) & (d.radii <= 0.4))

    def test_feasible_area_fraction_matches_geometry(self):
        # uniform actions hit the disks in proportion to their total area
        rng = np.random.default_rng(3)
        disks = sample_disks(rng)
        pts = rng.uniform(-1.0, 1.0, size=(1_000_000, 2))
        frac = disk_feasible(disks, pts).mean()
        expect = np.pi * (disks.radii**2).sum() / 4.0
        assert abs(frac - expect) / expect < 0.01

    def test_perfect_map_lands_inside_and_covers_both_disks(self):
        rng = np.random.default_rng(5)
        disks = sample_disks(rng)
        z = rng.uniform(-1.0, 1.0, size=(10_000, 2))
        acts = perfect_disk_map(disks, z)
        assert np.all(disk_feasible(disks, acts))
        member = disk_membership(disks, acts)
        share0 = (member == 0).mean()
        assert 0.3 < share0 < 0.7
        assert np.all(member >= 0)

    def test_perfect_map_reaches_disk_interiors_broadly(self):
        # occupancy of each disk should not collapse onto a thin subset
        rng = np.random.default_rng(8)
        disks = sample_disks(rng)
        z = rng.uniform(-1.0, 1.0, size=(20_000, 2))
        acts = perfect_disk_map(disks, z)
        for k in range(2):
            inside = acts[disk_membership(disks, acts) == k]
            r = np.linalg.norm(inside - disks.centers[k], axis=1) / disks.radii[k]
            assert r.max() > 0.9
            assert np.median(r) < 0.85

    def test_membership_of_centers_and_outside_point(self):
        disks = DiskPair(centers=np.array([[-0.5, 0.0], [0.5, 0.0]]), radii=np.array([0.3, 0.3]))
        member = disk_membership(disks, np.array([[-0.5, 0.0], [0.5, 0.0], [0.0, 0.9]]))
        assert member.tolist() == [0, 1, -1]

    def test_corner_action_always_violates(self):
        env = ToyDiskEnv()
        for seed in range(20):
            env.reset(seed)
            res = env.step(np.array([1.0, 1.0]))
            assert res.done and res.violation
            assert res.info["constraint"] == "outside-feasible-disks"
            assert res.info["cost"] == 1.0

    def test_rewards_telescope_to_distance_decrement(self):
        env = ToyDiskEnv()
        state = env.reset(seed=11)
        d0 = np.linalg.norm(state.position - state.goal)
        results = rollout(env, 11, lambda s: env.safe_action(s))
        total = sum(r.reward for r in results)
        if results[-1].info.get("success"):
            total -= env.goal_reward
        d_end = np.linalg.norm(env.state.position - env.state.goal)
        assert abs(total - (d0 - d_end)) < 1e-9

    def test_timeout_terminates(self):
        env = ToyDiskEnv(timeout=5)
        results = rollout(env, 2, lambda s: s.disks.centers[1].copy())
        assert len(results) <= 5
        assert results[-1].done

    def test_safe_action_is_feasible(self):
        env = ToyDiskEnv()
        for seed in range(10):
            state = env.reset(seed)
            assert bool(disk_feasible(state.disks, env.safe_action())[0])


class TestRobotEnv:
    def test_reset_obstacle_budget_and_target_pose(self):
        env = RobotArmEnv()
        counts = []
        for seed in range(30):
            s = env.reset(seed)
            counts.append(len(s.obstacle_centers))
            assert len(s.obstacle_centers) <= MAX_OBSTACLES
            # target pose comes from forward kinematics, so the rotation is orthonormal
            assert np.allclose(s.target_rot @ s.target_rot.T, np.eye(3), atol=1e-12)
            assert np.all(np.abs(s.joints) < 5.0)
        assert max(counts) > 0

    def test_zero_action_is_feasible_with_zero_reward(self):
        env = RobotArmEnv()
        for seed in range(10):
            env.reset(seed)
            res = env.step(np.zeros(7))
            assert not res.violation
            assert res.reward == 0.0

    def test_wrist_roll_limit_breach_measure_is_exact(self):
        # rotating the last joint moves no frame origin, so the measure is
        # purely the joint-limit overshoot
        q = JOINT_LIMITS.mean(axis=1)
        q[6] = 3.0
        partial = RobotPartialState(q, np.zeros((0, 3)), np.zeros(0))
        act = np.zeros((1, 7))
        act[0, 6] = 1.0
        total, reasons = one_step_violation_batch(partial, act)
        assert reasons[0] == "joint-limit"
        assert total[0] == pytest.approx(3.0 + MAX_DELTA - JOINT_LIMITS[6, 1], abs=1e-12)

    def test_large_swing_violates_speed_cap(self):
        q = JOINT_LIMITS.mean(axis=1)
        partial = RobotPartialState(q, np.zeros((0, 3)), np.zeros(0))
        act = np.zeros((1, 7))
        act[0, 0] = 1.0
        total, reasons = one_step_violation_batch(partial, act)
        assert reasons[0] == "cartesian-speed"
        assert total[0] > 0

    def test_obstacle_on_link_is_a_collision(self):
        q = JOINT_LIMITS.mean(axis=1)
        origins, _ = fk_frames(q)
        mid = 0.5 * (origins[3] + origins[4])
        partial = RobotPartialState(q, mid[None, :], np.array([0.1]))
        total, reasons = one_step_violation_batch(partial, np.zeros((1, 7)))
        assert reasons[0] == "collision"
        # the touched link contributes its full 0.06 + 0.10 penetration depth;
        # neighbouring links passing nearby may add more
        assert total[0] >= 0.16 - 1e-9

    def test_violation_terminates_episode(self):
        env = RobotArmEnv()
        env.reset(seed=4)
        res = env.step(np.ones(7))
        assert res.done and res.violation
        assert res.info["constraint"] in {"joint-limit", "cartesian-speed", "collision"}

    def test_rewards_telescope_to_error_decrements(self):
        env = RobotArmEnv()
        state = env.reset(seed=9)
        origins, rot = fk_frames(state.joints)
        d0 = np.linalg.norm(origins[-1] - state.target_pos)
        a0 = rotation_angle(rot, state.target_rot)
        rng = np.random.default_rng(1)
        total = 0.0
        for _ in range(40):
            res = env.step(rng.uniform(-0.01, 0.01, size=7))
            if res.violation:
                break
            total += res.reward
            if res.done:
                break
        origins, rot = fk_frames(env.state.joints)
        d1 = np.linalg.norm(origins[-1] - env.state.target_pos)
        a1 = rotation_angle(rot, env.state.target_rot)
        assert total == pytest.approx(env.w_pos * (d0 - d1) + env.w_rot * (a0 - a1), abs=1e-9)

    def test_generated_partial_states_admit_stopping(self):
        env = RobotArmEnv()
        rng = np.random.default_rng(0)
        for _ in range(30):
            partial = env.generate_partial_state(rng)
            assert len(partial.obstacle_centers) <= MAX_OBSTACLES
            total, _ = one_step_violation_batch(partial, np.zeros((1, 7)))
            assert total[0] == 0.0

    def test_sample_joints_respects_limits(self):
        rng = np.random.default_rng(0)
        qs = sample_joints(rng, 500)
        assert np.all(qs >= JOINT_LIMITS[:, 0]) and np.all(qs <= JOINT_LIMITS[:, 1])

    def test_timeout(self):
        env = RobotArmEnv(timeout=3)
        env.reset(seed=1)
        done = False
        for _ in range(3):
            res = env.step(np.zeros(7))
            done = res.done
        assert done and res.info.get("timeout")


class TestPathEnv:
    def empty_partial(self, pos=(0.5, 0.5), heading=0.0):
        return PathPartialState(np.asarray(pos, float), heading, np.zeros((0, 2)), np.zeros((0, 2)))

    def test_reset_scene_shape(self):
        env = PathPlanEnv()
        for seed in range(20):
            s = env.reset(seed)
            assert s.rect_lo.shape == (N_RECTS, 2) and np.all(s.rect_hi > s.rect_lo)
            assert np.all(s.rect_lo >= 0.0) and np.all(s.rect_hi <= 1.0)
            assert s.target_centers.shape == (N_TARGETS, 2)
            assert not s.collected.any()

    def test_collecting_everything_pays_two(self):
        assert N_TARGETS * TARGET_REWARD + ALL_TARGETS_BONUS == pytest.approx(2.0)
        env = PathPlanEnv()
        env.reset(seed=0)
        rng = np.random.default_rng(0)
        offsets = rng.uniform(-0.03, 0.03, size=(N_TARGETS, 2))
        env.state = PathState(
            position=np.array([0.5, 0.5]),
            heading=0.0,
            rect_lo=np.zeros((0, 2)),
            rect_hi=np.zeros((0, 2)),
            target_centers=0.5 + offsets,
            target_radii=np.full(N_TARGETS, 0.045),
            collected=np.zeros(N_TARGETS, dtype=bool),
        )
        res = env.step(np.zeros(5))
        assert res.done and res.info.get("success")
        assert res.reward == pytest.approx(2.0)

    def test_straight_spline_is_feasible_and_advances_one_step(self):
        env = PathPlanEnv()
        env.reset(seed=0)
        env.state = PathState(
            position=np.array([0.4, 0.6]),
            heading=0.0,
            rect_lo=np.zeros((0, 2)),
            rect_hi=np.zeros((0, 2)),
            target_centers=np.full((N_TARGETS, 2), 9.0),
            target_radii=np.full(N_TARGETS, 0.02),
            collected=np.zeros(N_TARGETS, dtype=bool),
        )
        res = env.step(np.zeros(5))
        assert not res.violation
        moved = res.state.position - np.array([0.4, 0.6])
        assert moved[0] == pytest.approx(D_STEP, abs=1e-9)
        assert moved[1] == pytest.approx(0.0, abs=1e-12)
        assert res.state.heading == pytest.approx(0.0, abs=1e-12)

    def test_length_band_measure_example(self):
        # shortest decode: three legs of 0.1 * 3 d_step = 0.9 d_step of straight
        # line, 1.6 step units below the 2.5 d_step floor
        g, reason = spline_violation(self.empty_partial(), np.array([-1.0, -1.0, 0.0, -1.0, 0.0]))
        assert reason == "length-band"
        assert g == pytest.approx(1.6, abs=1e-9)

    def test_curvature_and_arena_reasons(self):
        g, reason = spline_violation(self.empty_partial(), np.array([-1.0, -1.0, 1.0, -1.0, -1.0]))
        assert reason == "curvature" and g > 0
        g, reason = spline_violation(self.empty_partial(pos=(0.99, 0.5)), np.zeros(5))
        assert reason == "arena" and g > 0

    def test_rect_on_path_is_a_collision(self):
        partial = PathPartialState(
            np.array([0.5, 0.5]),
            0.0,
            np.array([[0.55, 0.45]]),
            np.array([[0.6, 0.55]]),
        )
        g, reason = spline_violation(partial, np.zeros(5))
        assert reason == "collision" and g > 0

    def test_decoded_lengths_straddle_the_band(self):
        rng = np.random.default_rng(0)
        partial = self.empty_partial()
        lo, hi = 2.5 * D_STEP, 3.5 * D_STEP
        lengths = []
        for _ in range(500):
            curve = decode_spline(partial.position, partial.heading, rng.uniform(-1, 1, size=5))
            ts = np.linspace(0, 1, 64)
            pts = curve.point(ts)
            lengths.append(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())
        lengths = np.array(lengths)
        assert lengths.min() < lo and lengths.max() > hi
        assert ((lengths >= lo) & (lengths <= hi)).mean() > 0.2

    def test_violation_terminates_without_moving(self):
        env = PathPlanEnv()
        s = env.reset(seed=3)
        pos = s.position.copy()
        res = env.step(np.array([-1.0, -1.0, 0.0, -1.0, 0.0]))
        assert res.done and res.violation
        assert np.array_equal(res.state.position, pos)
        assert res.state.steps == 0

    def test_sampling_resolution_agreement(self):
        # the default evaluation grid should almost always match a twice-finer one
        rng = np.random.default_rng(12)
        env = PathPlanEnv()
        agree = 0
        n = 2000
        for i in range(n // 100):
            partial = env.generate_partial_state(rng)
            acts = rng.uniform(-1.0, 1.0, size=(100, 5))
            g64 = spline_violation_batch(partial, acts, 64)[0] == 0.0
            g128 = spline_violation_batch(partial, acts, 128)[0] == 0.0
            agree += int((g64 == g128).sum())
        assert agree / n >= 0.98

    def test_too_few_sample_points_rejected(self):
        with pytest.raises(ValueError, match="at least 2"):
            spline_violation_batch(self.empty_partial(), np.zeros((1, 5)), 1)

    def test_generated_partial_state_pose_is_free(self):
        env = PathPlanEnv()
        rng = np.random.default_rng(1)
        for _ in range(30):
            partial = env.generate_partial_state(rng)
            from actmap.geometry import rect_signed_distance

            for lo, hi in zip(partial.rect_lo, partial.rect_hi):
                assert rect_signed_distance(partial.position[None, :], lo, hi)[0] > 0


class TestSceneIO:
    @pytest.mark.parametrize("name", ["toy", "robot", "path"])
    def test_round_trip_is_bit_exact(self, tmp_path, name):
        env = make_env(name)
        state = env.reset(seed=42)
        f = tmp_path / "scene.txt"
        save_scene(f, state)
        loaded = load_scene(f)
        assert scene_lines(loaded) == scene_lines(state)

    def test_round_trip_preserves_arrays_exactly(self, tmp_path):
        env = RobotArmEnv()
        state = env.reset(seed=5)
        f = tmp_path / "scene.txt"
        save_scene(f, state)
        loaded = load_scene(f)
        assert np.array_equal(loaded.joints, state.joints)
        assert np.array_equal(loaded.target_rot, state.target_rot)
        assert np.array_equal(loaded.obstacle_centers, state.obstacle_centers)

    def test_header_is_validated(self, tmp_path):
        f = tmp_path / "bad.txt"
        f.write_text("something else\n")
        with pytest.raises(ValueError, match="not a scene file"):
            load_scene(f)
        f.write_text("actmap-scene 99 toy\n")
        with pytest.raises(ValueError, match="unsupported scene version"):
            load_scene(f)

    def test_mid_episode_state_round_trips(self, tmp_path):
        env = PathPlanEnv()
        env.reset(seed=8)
        for _ in range(3):
            res = env.step(np.zeros(5))
            if res.done:
                break
        f = tmp_path / "scene.txt"
        save_scene(f, env.state)
        assert scene_lines(load_scene(f)) == scene_lines(env.state)

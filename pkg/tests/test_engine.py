"""World construction, association, failures, switching, integration."""

import numpy as np
import pytest

from uavswarm.engine import (
    advance,
    associate_users,
    channel_switching,
    inject_failures,
    make_world,
    resolve_user_positions,
    run,
    step,
    update_rates,
)
from uavswarm.kernels import KernelParams
from uavswarm.model import (
    ControlGains,
    RadioParams,
    ScenarioConfig,
    ScenarioError,
    UserSpec,
    vec3,
)
from uavswarm.radio import sinr as sinr_of


def _region_config(seed=5):
    return ScenarioConfig(
        users=[
            UserSpec(klass="premium", position=(-40.0, 0.0)),
            UserSpec(klass="regular", region=(0.0, 0.0, 200.0, 100.0),
                     count=20),
        ],
        uav_count=2,
        uav_region=(-100.0, -100.0, 100.0, 100.0),
        seed=seed,
        duration=1.0,
    )


class TestResolveUsers:
    def test_deterministic_and_in_bounds(self):
        cfg = _region_config()
        a = resolve_user_positions(cfg)
        b = resolve_user_positions(cfg)
        assert a == b
        assert len(a) == 21
        assert a[0] == ("premium", -40.0, 0.0)
        for klass, x, y in a[1:]:
            assert klass == "regular"
            assert 0.0 <= x <= 200.0 and 0.0 <= y <= 100.0

    def test_seed_changes_draw(self):
        assert resolve_user_positions(_region_config(seed=5)) != \
            resolve_user_positions(_region_config(seed=6))


class TestMakeWorld:
    def test_explicit_starts(self):
        cfg = ScenarioConfig(
            users=[UserSpec(klass="premium", position=(0.0, 0.0))],
            uav_count=2,
            uav_initial_positions=[(10.0, 20.0), (30.0, 40.0)],
            H=120.0)
        world = make_world(cfg)
        assert [tuple(u.position) for u in world.uavs] == \
            [(10.0, 20.0, 120.0), (30.0, 40.0, 120.0)]
        assert all(u.channel == 0 and u.alive for u in world.uavs)
        assert world.users[0].target_rate == 300e6
        assert world.time == 0.0 and world.tick == 0

    def test_run_seed_moves_uavs_not_users(self):
        cfg = _region_config()
        w1 = make_world(cfg, run_seed=101)
        w2 = make_world(cfg, run_seed=202)
        for u1, u2 in zip(w1.users, w2.users):
            assert np.array_equal(u1.position, u2.position)
        moved = any(not np.array_equal(a.position, b.position)
                    for a, b in zip(w1.uavs, w2.uavs))
        assert moved

    def test_validates_config(self):
        cfg = _region_config()
        cfg.uav_count = -1
        with pytest.raises(ScenarioError):
            make_world(cfg)


class TestInjectFailures:
    def _world(self, n=15):
        cfg = ScenarioConfig(
            users=[UserSpec(klass="premium", position=(0.0, 0.0))],
            uav_count=n,
            uav_initial_positions=[(50.0 * k, 0.0) for k in range(n)])
        return make_world(cfg)

    def test_rounds_half_up(self):
        # 0.3 of 15 alive = 4.5 -> 5 killed
        world = self._world(15)
        killed = inject_failures(world, 0.3)
        assert len(killed) == 5
        assert sum(1 for u in world.uavs if not u.alive) == 5

    def test_zero_fraction_is_noop(self):
        world = self._world(4)
        assert inject_failures(world, 0.0) == []
        assert all(u.alive for u in world.uavs)

    def test_deterministic_per_seed(self):
        a = inject_failures(self._world(), 0.3)
        b = inject_failures(self._world(), 0.3)
        assert a == b

    def test_releases_connected_users(self):
        world = self._world(2)
        world.uavs[0].connected_users = [0]
        world.users[0].serving_uav = 0
        world.users[0].achieved_rate = 1e8
        killed = inject_failures(world, 1.0)
        assert killed == [0, 1]
        assert world.users[0].serving_uav is None
        assert world.users[0].achieved_rate == 0.0

    def test_dead_uavs_not_rekilled(self):
        world = self._world(6)
        first = inject_failures(world, 0.5)
        second = inject_failures(world, 1.0)
        assert set(first).isdisjoint(second)
        assert sorted(first + second) == list(range(6))


def _assoc_world(uav_xy, channels, user_specs, gains=None):
    gains = gains or ControlGains()
    cfg = ScenarioConfig(users=user_specs, uav_count=len(uav_xy),
                         uav_initial_positions=uav_xy, gains=gains)
    world = make_world(cfg)
    for uav, ch in zip(world.uavs, channels):
        uav.channel = ch
    return world, gains


class TestAssociation:
    def test_nearest_eligible_wins(self):
        world, gains = _assoc_world(
            [(0.0, 0.0), (200.0, 0.0)], [0, 0],
            [UserSpec(klass="premium", position=(150.0, 0.0))])
        associate_users(world, gains)
        assert world.users[0].serving_uav == 1
        assert world.uavs[1].connected_users == [0]

    def test_regular_users_need_default_channel(self):
        # the nearer UAV sits off the default channel, so the regular user
        # walks past it while the premium user does not
        world, gains = _assoc_world(
            [(0.0, 0.0), (180.0, 0.0)], [0, 2],
            [UserSpec(klass="regular", position=(170.0, 0.0)),
             UserSpec(klass="premium", position=(170.0, 10.0))])
        associate_users(world, gains)
        assert world.users[0].serving_uav == 0
        assert world.users[1].serving_uav == 1

    def test_out_of_range_unserved(self):
        world, gains = _assoc_world(
            [(0.0, 0.0)], [0],
            [UserSpec(klass="premium", position=(1000.0, 0.0))])
        associate_users(world, gains)
        assert world.users[0].serving_uav is None

    def test_capacity_spill_to_next_nearest(self):
        gains = ControlGains(n_max=1)
        world, gains = _assoc_world(
            [(0.0, 0.0), (100.0, 0.0)], [0, 0],
            [UserSpec(klass="premium", position=(10.0, 0.0)),
             UserSpec(klass="premium", position=(20.0, 0.0))],
            gains)
        associate_users(world, gains)
        assert world.users[0].serving_uav == 0
        assert world.users[1].serving_uav == 1
        assert world.uavs[0].load == world.uavs[1].load == 1

    def test_dead_uav_never_serves(self):
        world, gains = _assoc_world(
            [(0.0, 0.0)], [0],
            [UserSpec(klass="premium", position=(10.0, 0.0))])
        world.uavs[0].alive = False
        associate_users(world, gains)
        assert world.users[0].serving_uav is None


def _switch_world(num_channels=8, extra_uav=None, regular_too=True,
                  time=10.0):
    """Two co-channel UAVs; UAV 0 serves a deficient premium user."""
    uav_xy = [(0.0, 0.0), (150.0, 0.0)]
    channels = [0, 0]
    if extra_uav is not None:
        uav_xy.append(extra_uav[0])
        channels.append(extra_uav[1])
    users = [UserSpec(klass="premium", position=(10.0, 0.0))]
    if regular_too:
        users.append(UserSpec(klass="regular", position=(-10.0, 0.0)))
    cfg = ScenarioConfig(users=users, uav_count=len(uav_xy),
                         uav_initial_positions=uav_xy,
                         radio=RadioParams(num_channels=num_channels))
    world = make_world(cfg)
    for uav, ch in zip(world.uavs, channels):
        uav.channel = ch
    world.time = time
    associate_users(world, cfg.gains)
    powers, chan_power = update_rates(world, cfg.radio, cfg.gains)
    return world, cfg, powers, chan_power


class TestChannelSwitching:
    def test_switch_to_free_channel_and_release_regulars(self):
        world, cfg, powers, chan_power = _switch_world()
        assert world.users[0].achieved_rate < 300e6
        events = channel_switching(world, powers, chan_power, cfg.radio,
                                   cfg.gains)
        assert len(events) == 1
        ev = events[0]
        assert (ev.uav_id, ev.old_channel, ev.new_channel) == (0, 0, 1)
        assert ev.user_ids == [0]       # premium kept, regular dropped
        assert world.users[1].serving_uav is None
        assert world.uavs[0].channel == 1
        assert world.uavs[0].last_switch_time == world.time

    def test_event_sinr_matches_independent_recompute(self):
        world, cfg, powers, chan_power = _switch_world()
        before = sinr_of(0, 0, world.uavs, world.users, cfg.radio)
        [ev] = channel_switching(world, powers, chan_power, cfg.radio,
                                 cfg.gains)
        after = sinr_of(0, 0, world.uavs, world.users, cfg.radio)
        assert ev.sinr_before[0] == pytest.approx(before, rel=1e-9)
        assert ev.sinr_after[0] == pytest.approx(after, rel=1e-9)
        assert after > before

    def test_no_free_channel_picks_least_interfered(self):
        # 2 channels; channel 1 already occupied by a distant UAV
        world, cfg, powers, chan_power = _switch_world(
            num_channels=2, extra_uav=((2000.0, 0.0), 1))
        [ev] = channel_switching(world, powers, chan_power, cfg.radio,
                                 cfg.gains)
        assert ev.new_channel == 1
        assert ev.sinr_after[0] < ev.sinr_before[0] * 1e9  # finite, interfered
        assert ev.sinr_after[0] > ev.sinr_before[0]

    def test_blocked_when_candidate_not_strictly_better(self):
        # channel 1 held by a UAV even closer than the co-channel one
        world, cfg, powers, chan_power = _switch_world(
            num_channels=2, extra_uav=((60.0, 0.0), 1))
        events = channel_switching(world, powers, chan_power, cfg.radio,
                                   cfg.gains)
        assert events == []
        assert world.uavs[0].channel == 0

    def test_cooldown_blocks_early_switch(self):
        world, cfg, powers, chan_power = _switch_world(time=0.0)
        assert channel_switching(world, powers, chan_power, cfg.radio,
                                 cfg.gains) == []

    def test_regular_deficit_never_triggers(self):
        # same interference picture but the deficient user is regular
        uav_xy = [(0.0, 0.0), (150.0, 0.0)]
        cfg = ScenarioConfig(
            users=[UserSpec(klass="regular", position=(10.0, 0.0))],
            uav_count=2, uav_initial_positions=uav_xy)
        world = make_world(cfg)
        world.time = 10.0
        associate_users(world, cfg.gains)
        powers, chan_power = update_rates(world, cfg.radio, cfg.gains)
        assert world.users[0].achieved_rate < 100e6
        assert channel_switching(world, powers, chan_power, cfg.radio,
                                 cfg.gains) == []


class TestAdvance:
    def _world(self, n=1):
        cfg = ScenarioConfig(
            users=[UserSpec(klass="premium", position=(0.0, 0.0))],
            uav_count=n,
            uav_initial_positions=[(100.0 * k, 0.0) for k in range(n)])
        return make_world(cfg), cfg

    def test_semi_implicit_euler(self):
        world, cfg = self._world()
        advance(world, np.array([[3.0, 4.0, 0.0]]), cfg.gains, cfg.H)
        uav = world.uavs[0]
        assert np.allclose(uav.velocity, [0.3, 0.4, 0.0])
        assert np.allclose(uav.position, [0.03, 0.04, 100.0])
        assert world.tick == 1
        assert world.time == pytest.approx(0.1)

    def test_speed_clamp(self):
        world, cfg = self._world()
        advance(world, np.array([[1000.0, 0.0, 0.0]]), cfg.gains, cfg.H)
        assert np.linalg.norm(world.uavs[0].velocity) == pytest.approx(
            cfg.gains.v_max)

    def test_height_pinned(self):
        world, cfg = self._world()
        world.uavs[0].position[2] = 57.0
        advance(world, np.zeros((1, 3)), cfg.gains, cfg.H)
        assert world.uavs[0].position[2] == cfg.H

    def test_dead_uav_frozen(self):
        world, cfg = self._world(2)
        world.uavs[1].alive = False
        before = world.uavs[1].position.copy()
        advance(world, np.full((2, 3), 5.0), cfg.gains, cfg.H)
        assert np.array_equal(world.uavs[1].position, before)


class TestRun:
    def test_same_seed_reruns_identical(self, fig3_config, fig3_result):
        again = run(fig3_config)
        assert again.metrics == fig3_result.metrics
        assert again.trace == fig3_result.trace
        assert [e.__dict__ for e in again.switch_events] == \
            [e.__dict__ for e in fig3_result.switch_events]

    def test_tick_count_and_times(self, fig3_config, fig3_result):
        dt = fig3_config.gains.dt
        expect = int(round(fig3_config.duration / dt)) + 1
        assert len(fig3_result.metrics) == expect
        assert fig3_result.metrics[0].time == 0.0
        assert fig3_result.metrics[-1].time == pytest.approx(
            fig3_config.duration)

    def test_zero_duration_still_evaluates(self):
        cfg = ScenarioConfig(
            users=[UserSpec(klass="premium", position=(10.0, 0.0))],
            uav_count=1, uav_initial_positions=[(0.0, 0.0)], duration=0.0)
        result = run(cfg)
        assert len(result.metrics) == 1
        assert result.metrics[0].premium_served_pct == 100.0

    def test_min_distance_violations_recorded(self):
        cfg = ScenarioConfig(
            users=[], uav_count=2,
            uav_initial_positions=[(0.0, 0.0), (50.0, 0.0)], duration=0.0)
        result = run(cfg)
        assert result.min_distance_violations
        t, i, j, dist = result.min_distance_violations[0]
        assert (t, i, j) == (0.0, 0, 1) and dist == pytest.approx(50.0)

    def test_bad_mode_rejected(self, fig3_config):
        with pytest.raises(ScenarioError):
            run(fig3_config, mode="hover")

    def test_user_trace_collection(self, fig3_config):
        from dataclasses import replace
        cfg = replace(fig3_config, duration=1.0)
        result = run(cfg, collect_user_trace=True)
        rows = [r for r in result.user_trace if r[0] == 0.0]
        assert len(rows) == 3
        for t, uid, serving, rate, mean in result.user_trace:
            assert serving == -1 or 0 <= serving < cfg.uav_count
            assert rate >= 0.0 and mean >= 0.0


def test_step_matches_run_loop(fig3_config):
    kp = KernelParams.from_gains(fig3_config.gains)
    world = make_world(fig3_config)
    rows = []
    for _ in range(11):
        metrics, _ = step(world, fig3_config, kp, "qos_driven")
        rows.append(metrics)
    full = run(fig3_config)
    assert rows == full.metrics[:11]

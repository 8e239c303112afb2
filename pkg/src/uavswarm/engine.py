"""Discrete-time world state and the per-tick orchestration loop.

Tick order: (1) due failure events fire, (2) users associate to UAVs,
(3) link rates and trailing-rate windows update, (4) UAVs may switch
channels (QoS mode only), (5) metrics are recorded from the frozen state,
(6) control inputs are computed and integrated.  Time advances as
tick * dt from an integer tick counter, never by accumulation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .kernels import KernelParams, control_input
from .metrics import TickMetrics, compute_metrics
from .model import (
    L0,
    MODES,
    PREMIUM,
    QOS_MODE,
    REGULAR,
    TARGET_RATE,
    ControlGains,
    RadioParams,
    ScenarioConfig,
    ScenarioError,
    UavState,
    UserState,
    distance,
    round_half_up,
    vec3,
)
from .radio import data_rate, dbm_to_mw, received_power_field


@dataclass
class WorldState:
    time: float
    tick: int
    uavs: list[UavState]
    users: list[UserState]
    failure_rng: np.random.Generator


@dataclass
class SwitchEvent:
    time: float
    uav_id: int
    old_channel: int
    new_channel: int
    user_ids: list[int]             # premium users retained across the switch
    sinr_before: list[float]        # linear, at frozen positions
    sinr_after: list[float]


@dataclass
class RunResult:
    config: ScenarioConfig
    mode: str
    seed: int
    metrics: list[TickMetrics]
    trace: list[tuple]              # (time, uav_id, x, y, z, vx, vy, ch, alive, load)
    user_trace: list[tuple]         # (time, user_id, serving, rate, mean_rate)
    switch_events: list[SwitchEvent]
    failures: list[tuple[float, list[int]]]
    min_distance_violations: list[tuple[float, int, int, float]]
    world: WorldState


def resolve_user_positions(config: ScenarioConfig) -> list[tuple[str, float, float]]:
    """Expand user specs to (klass, x, y) triples.

    Region entries draw from a stream keyed only by the scenario seed, so
    every run of a sweep sees the same user field.
    """
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0]))
    out = []
    for spec in config.users:
        if spec.position is not None:
            out.append((spec.klass, float(spec.position[0]),
                        float(spec.position[1])))
        else:
            x0, y0, x1, y1 = spec.region
            xs = rng.uniform(x0, x1, size=spec.count)
            ys = rng.uniform(y0, y1, size=spec.count)
            for xx, yy in zip(xs, ys):
                out.append((spec.klass, float(xx), float(yy)))
    return out


def make_world(config: ScenarioConfig, run_seed: Optional[int] = None) -> WorldState:
    config.validate()
    seed = config.seed if run_seed is None else int(run_seed)
    users = [
        UserState(id=m, position=vec3(x, y, 0.0), klass=klass,
                  target_rate=TARGET_RATE[klass])
        for m, (klass, x, y) in enumerate(resolve_user_positions(config))
    ]
    if config.uav_count == 0:
        starts = []
    elif config.uav_initial_positions is not None:
        starts = [(float(x), float(y)) for x, y in config.uav_initial_positions]
    else:
        rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
        x0, y0, x1, y1 = config.uav_region
        xs = rng.uniform(x0, x1, size=config.uav_count)
        ys = rng.uniform(y0, y1, size=config.uav_count)
        starts = [(float(x), float(y)) for x, y in zip(xs, ys)]
    uavs = [
        UavState(id=n, position=vec3(x, y, config.H), velocity=vec3(), channel=L0)
        for n, (x, y) in enumerate(starts)
    ]
    failure_rng = np.random.default_rng(np.random.SeedSequence([seed, 2]))
    return WorldState(time=0.0, tick=0, uavs=uavs, users=users,
                      failure_rng=failure_rng)


def inject_failures(world: WorldState, fraction: float) -> list[int]:
    """Kill a round-half-up fraction of the alive UAVs, chosen uniformly."""
    alive_ids = sorted(u.id for u in world.uavs if u.alive)
    count = min(round_half_up(fraction * len(alive_ids)), len(alive_ids))
    if count <= 0:
        return []
    chosen = world.failure_rng.choice(np.array(alive_ids), size=count,
                                      replace=False)
    killed = sorted(int(c) for c in chosen)
    for n in killed:
        uav = world.uavs[n]
        uav.alive = False
        uav.velocity = vec3()
        for m in uav.connected_users:
            world.users[m].serving_uav = None
            world.users[m].achieved_rate = 0.0
        uav.connected_users = []
    return killed


def associate_users(world: WorldState, gains: ControlGains) -> None:
    """Greedy nearest-feasible association with per-UAV capacity.

    A UAV is eligible for a user when alive, within range r, and (for
    regular users) on the default channel.  Users are processed in order of
    distance to their nearest eligible UAV; each takes the nearest eligible
    UAV with spare capacity, spilling to the next nearest when full.
    """
    uavs, users = world.uavs, world.users
    for uav in uavs:
        uav.connected_users = []
    if not uavs or not users:
        for user in users:
            user.serving_uav = None
        return
    uav_pos = np.array([u.position for u in uavs])
    user_pos = np.array([u.position for u in users])
    dist = np.linalg.norm(uav_pos[:, None, :] - user_pos[None, :, :], axis=2)
    alive = np.array([u.alive for u in uavs])
    on_default = np.array([u.channel == L0 for u in uavs])
    prem = np.array([u.klass == PREMIUM for u in users])
    eligible = alive[:, None] & (dist <= gains.r) & \
        (prem[None, :] | on_default[:, None])
    nearest = np.where(eligible, dist, np.inf).min(axis=0)
    order = sorted(range(len(users)), key=lambda m: (nearest[m], m))
    load = [0] * len(uavs)
    for m in order:
        user = users[m]
        user.serving_uav = None
        if not np.isfinite(nearest[m]):
            continue
        candidates = sorted((n for n in range(len(uavs)) if eligible[n, m]),
                            key=lambda n: (dist[n, m], n))
        for n in candidates:
            if load[n] < gains.n_max:
                user.serving_uav = n
                load[n] += 1
                uavs[n].connected_users.append(m)
                break
    for uav in uavs:
        uav.connected_users.sort()


def _apply_rates(world: WorldState, powers: np.ndarray, chan_power: np.ndarray,
                 radio: RadioParams, gains: ControlGains, record: bool) -> None:
    noise_mw = float(dbm_to_mw(radio.noise))
    for m, user in enumerate(world.users):
        n = user.serving_uav
        if n is None:
            rate = 0.0
        else:
            signal = powers[n, m]
            interference = chan_power[world.uavs[n].channel, m] - signal
            rate = float(data_rate(signal / (noise_mw + interference),
                                   radio.bandwidth))
        user.achieved_rate = rate
        if record:
            user.record_rate(world.time, rate, gains.tau)


def update_rates(world: WorldState, radio: RadioParams,
                 gains: ControlGains) -> tuple[np.ndarray, np.ndarray]:
    """Compute every link's achieved rate and push it into the rate windows.

    Returns the (n_uavs, n_users) received-power matrix in mW with dead
    UAVs zeroed, and the (num_channels, n_users) per-channel power sums.
    """
    n_users = len(world.users)
    n_uavs = len(world.uavs)
    if n_uavs == 0 or n_users == 0:
        powers = np.zeros((n_uavs, n_users))
    else:
        uav_pos = np.array([u.position for u in world.uavs])
        user_pos = np.array([u.position for u in world.users])
        powers = received_power_field(uav_pos, user_pos, radio)
        alive = np.array([u.alive for u in world.uavs])
        powers[~alive] = 0.0
    chan_power = np.zeros((radio.num_channels, n_users))
    for n, uav in enumerate(world.uavs):
        if uav.alive:
            chan_power[uav.channel] += powers[n]
    _apply_rates(world, powers, chan_power, radio, gains, record=True)
    return powers, chan_power


def channel_switching(world: WorldState, powers: np.ndarray,
                      chan_power: np.ndarray, radio: RadioParams,
                      gains: ControlGains) -> list[SwitchEvent]:
    """Per-tick channel reassignment pass, ascending UAV id.

    A UAV considers switching when some connected premium user is below
    target, at or below its own trailing mean, and the UAV's cooldown has
    elapsed.  The candidate channel (never the default) is the lowest-index
    free one, else the one with least co-channel power at the worst-deficit
    user.  The switch happens only if it strictly reduces interference for
    that user; leaving the default channel releases any regular users.
    Later UAVs in the same pass see the updated channel occupancy.
    """
    events: list[SwitchEvent] = []
    noise_mw = float(dbm_to_mw(radio.noise))
    n_channels = radio.num_channels
    usage = [0] * n_channels
    for uav in world.uavs:
        if uav.alive:
            usage[uav.channel] += 1
    for uav in world.uavs:
        if not uav.alive or not uav.connected_users:
            continue
        if world.time - uav.last_switch_time < gains.tau:
            continue
        trig = None
        best_deficit = 0.0
        for m in uav.connected_users:
            user = world.users[m]
            if user.klass != PREMIUM:
                continue
            c = user.achieved_rate
            if c < user.target_rate and c <= user.mean_rate:
                deficit = user.target_rate - c
                if deficit > best_deficit:
                    best_deficit = deficit
                    trig = m
        if trig is None:
            continue
        n = uav.id
        current = uav.channel
        current_interf = float(chan_power[current, trig] - powers[n, trig])
        free = [k for k in range(1, n_channels) if usage[k] == 0]
        if free:
            best_k = free[0]
            cand_interf = 0.0
        else:
            best_k = None
            cand_interf = np.inf
            for k in range(1, n_channels):
                if k == current:
                    continue
                ik = float(chan_power[k, trig])
                if ik < cand_interf:
                    cand_interf = ik
                    best_k = k
        if best_k is None or not cand_interf < current_interf:
            continue
        released = [m for m in uav.connected_users
                    if current == L0 and world.users[m].klass == REGULAR]
        retained = [m for m in uav.connected_users if m not in released]
        sinr_before = [
            float(powers[n, m] / (noise_mw + chan_power[current, m] - powers[n, m]))
            for m in retained]
        sinr_after = [
            float(powers[n, m] / (noise_mw + chan_power[best_k, m]))
            for m in retained]
        chan_power[current] -= powers[n]
        chan_power[best_k] += powers[n]
        usage[current] -= 1
        usage[best_k] += 1
        uav.channel = best_k
        uav.last_switch_time = world.time
        for m in released:
            world.users[m].serving_uav = None
            world.users[m].achieved_rate = 0.0
        uav.connected_users = retained
        events.append(SwitchEvent(world.time, n, current, best_k, retained,
                                  sinr_before, sinr_after))
    return events


def control_all(world: WorldState, kp: KernelParams, gains: ControlGains,
                mode: str) -> np.ndarray:
    """Control inputs for all UAVs from one frozen state snapshot."""
    n_uavs = len(world.uavs)
    n_users = len(world.users)
    controls = np.zeros((n_uavs, 3))
    if n_uavs == 0:
        return controls
    positions = np.array([u.position for u in world.uavs])
    velocities = np.array([u.velocity for u in world.uavs])
    loads = np.array([u.load for u in world.uavs])
    alive = np.array([u.alive for u in world.uavs])
    if n_users:
        user_pos = np.array([u.position for u in world.users])
        rates = np.array([u.achieved_rate for u in world.users])
        targets = np.array([u.target_rate for u in world.users])
        premium = np.array([u.klass == PREMIUM for u in world.users])
    else:
        user_pos = np.zeros((0, 3))
        rates = np.zeros(0)
        targets = np.zeros(0)
        premium = np.zeros(0, dtype=bool)
    for i, uav in enumerate(world.uavs):
        if not uav.alive:
            continue
        connected = np.zeros(n_users, dtype=bool)
        if uav.connected_users:
            connected[np.array(uav.connected_users)] = True
        controls[i] = control_input(
            i, positions, velocities, loads, alive, connected, user_pos,
            rates, targets, premium, kp, gains.u_max, mode)
    return controls


def advance(world: WorldState, controls: np.ndarray, gains: ControlGains,
            height: float) -> None:
    """Semi-implicit Euler step with speed clamp and fixed flight height."""
    for i, uav in enumerate(world.uavs):
        if not uav.alive:
            continue
        uav.velocity = uav.velocity + controls[i] * gains.dt
        uav.velocity[2] = 0.0
        speed = float(np.linalg.norm(uav.velocity))
        if speed > gains.v_max:
            uav.velocity = uav.velocity * (gains.v_max / speed)
        uav.position = uav.position + uav.velocity * gains.dt
        uav.position[2] = height
    world.tick += 1
    world.time = world.tick * gains.dt


def _check_invariants(world: WorldState, config: ScenarioConfig) -> None:
    for uav in world.uavs:
        if uav.load > config.gains.n_max:
            raise RuntimeError(f"UAV {uav.id} over capacity: {uav.load}")
        if not np.all(np.isfinite(uav.position)):
            raise RuntimeError(f"UAV {uav.id} position not finite")
        if uav.alive:
            if uav.position[2] != config.H:
                raise RuntimeError(f"UAV {uav.id} off the flight plane")
            if uav.velocity[2] != 0.0:
                raise RuntimeError(f"UAV {uav.id} has vertical velocity")
        if not 0 <= uav.channel < config.radio.num_channels:
            raise RuntimeError(f"UAV {uav.id} on invalid channel {uav.channel}")
    for user in world.users:
        if user.serving_uav is None:
            continue
        server = world.uavs[user.serving_uav]
        if not server.alive:
            raise RuntimeError(f"user {user.id} served by dead UAV {server.id}")
        if distance(server.position, user.position) > config.gains.r:
            raise RuntimeError(f"user {user.id} served out of range")
        if user.klass == REGULAR and server.channel != L0:
            raise RuntimeError(
                f"regular user {user.id} served off the default channel")


def _record_min_distance(world: WorldState, gains: ControlGains,
                         out: list[tuple[float, int, int, float]]) -> None:
    alive = [u for u in world.uavs if u.alive]
    for i in range(len(alive)):
        for j in range(i + 1, len(alive)):
            dist = distance(alive[i].position, alive[j].position)
            if dist < gains.d:
                out.append((world.time, alive[i].id, alive[j].id, dist))


def step(world: WorldState, config: ScenarioConfig, kp: KernelParams,
         mode: str) -> tuple[TickMetrics, list[SwitchEvent]]:
    """One full evaluate-and-advance cycle for callers driving a world by hand.

    The run() loop inlines the same sequence so that the final tick is
    evaluated without a trailing integration step.
    """
    metrics, events = _evaluate(world, config, mode, fired=None,
                                failures_out=None)
    controls = control_all(world, kp, config.gains, mode)
    advance(world, controls, config.gains, config.H)
    return metrics, events


def _evaluate(world: WorldState, config: ScenarioConfig, mode: str,
              fired: Optional[set], failures_out: Optional[list]):
    if fired is not None:
        for idx, ev in enumerate(config.failure_events):
            if idx in fired or world.time < ev.at_time:
                continue
            killed = inject_failures(world, ev.fraction)
            fired.add(idx)
            if killed and failures_out is not None:
                failures_out.append((world.time, killed))
    associate_users(world, config.gains)
    powers, chan_power = update_rates(world, config.radio, config.gains)
    events: list[SwitchEvent] = []
    if mode == QOS_MODE:
        events = channel_switching(world, powers, chan_power, config.radio,
                                   config.gains)
        if events:
            _apply_rates(world, powers, chan_power, config.radio,
                         config.gains, record=False)
    active = len({u.channel for u in world.uavs if u.alive})
    metrics = compute_metrics(world.time, world.users, active)
    _check_invariants(world, config)
    return metrics, events


def run(config: ScenarioConfig, mode: Optional[str] = None,
        run_seed: Optional[int] = None,
        collect_user_trace: bool = False) -> RunResult:
    """Simulate a scenario end to end.

    The loop evaluates ticks 0..T inclusive and integrates between them, so
    a zero-duration scenario still yields one metrics row.  `mode` overrides
    the scenario's controller mode; `run_seed` overrides the seed used for
    UAV placement and failure draws (user placement always follows the
    scenario seed).
    """
    config.validate()
    mode = config.controller_mode if mode is None else mode
    if mode not in MODES:
        raise ScenarioError(f"mode must be one of {MODES}")
    seed = config.seed if run_seed is None else int(run_seed)
    world = make_world(config, seed)
    gains = config.gains
    kp = KernelParams.from_gains(gains)
    ticks = int(round(config.duration / gains.dt))
    metrics_rows: list[TickMetrics] = []
    trace: list[tuple] = []
    user_trace: list[tuple] = []
    switch_events: list[SwitchEvent] = []
    failures: list[tuple[float, list[int]]] = []
    min_dist: list[tuple[float, int, int, float]] = []
    fired: set[int] = set()
    for k in range(ticks + 1):
        metrics, events = _evaluate(world, config, mode, fired, failures)
        switch_events.extend(events)
        metrics_rows.append(metrics)
        _record_min_distance(world, gains, min_dist)
        for uav in world.uavs:
            trace.append((world.time, uav.id,
                          float(uav.position[0]), float(uav.position[1]),
                          float(uav.position[2]),
                          float(uav.velocity[0]), float(uav.velocity[1]),
                          uav.channel, uav.alive, uav.load))
        if collect_user_trace:
            for user in world.users:
                user_trace.append((world.time, user.id,
                                   -1 if user.serving_uav is None
                                   else user.serving_uav,
                                   user.achieved_rate, user.mean_rate))
        if k < ticks:
            controls = control_all(world, kp, gains, mode)
            advance(world, controls, gains, config.H)
    return RunResult(config=config, mode=mode, seed=seed, metrics=metrics_rows,
                     trace=trace, user_trace=user_trace,
                     switch_events=switch_events, failures=failures,
                     min_distance_violations=min_dist, world=world)

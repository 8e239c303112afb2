"""Core domain types, geometry helpers, and scenario configuration.

Everything internal is SI (m, s, Hz, bits/s).  Transmit and noise powers are
carried in dBm at the configuration boundary and converted to mW exactly once,
inside the radio module.  Positions are numpy float arrays of shape (3,).
UAVs fly at a fixed height with zero vertical velocity; ground users sit at
z = 0 and do not move.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import yaml

PREMIUM = "premium"
REGULAR = "regular"
USER_CLASSES = (PREMIUM, REGULAR)

# Per-class downlink rate targets, bits/s.
TARGET_RATE = {PREMIUM: 300e6, REGULAR: 100e6}

# Default channel.  Regular users can only be served on it.
L0 = 0

QOS_MODE = "qos_driven"
FLOCKING_MODE = "flocking_baseline"
MODES = (QOS_MODE, FLOCKING_MODE)

PLOS_AS_WRITTEN = "as_written"
PLOS_STANDARD = "standard"
PLOS_FORMS = (PLOS_AS_WRITTEN, PLOS_STANDARD)


class ScenarioError(ValueError):
    """Raised for malformed or inconsistent scenario configurations."""


def vec3(x: float = 0.0, y: float = 0.0, z: float = 0.0) -> np.ndarray:
    return np.array([float(x), float(y), float(z)])


def distance(a, b) -> float:
    """Euclidean distance between two points, in meters."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.linalg.norm(a - b))


def elevation_angle(uav, user) -> float:
    """Elevation angle in radians from a ground user up to a UAV.

    atan2(height difference, horizontal distance); pi/2 when the UAV is
    directly overhead.
    """
    dx = float(uav[0]) - float(user[0])
    dy = float(uav[1]) - float(user[1])
    dz = float(uav[2]) - float(user[2])
    return math.atan2(dz, math.hypot(dx, dy))


def round_half_up(x: float) -> int:
    """Round to the nearest integer with ties going up (4.5 -> 5)."""
    return int(math.floor(x + 0.5))


@dataclass
class UavState:
    id: int
    position: np.ndarray            # (3,) m, z pinned to the scenario height
    velocity: np.ndarray            # (3,) m/s, z component always 0
    channel: int = L0
    connected_users: list[int] = field(default_factory=list)  # sorted user ids
    alive: bool = True
    last_switch_time: float = 0.0

    @property
    def load(self) -> int:
        return len(self.connected_users)


@dataclass
class UserState:
    id: int
    position: np.ndarray            # (3,) m, z = 0
    klass: str                      # PREMIUM or REGULAR
    target_rate: float              # bits/s
    serving_uav: Optional[int] = None
    achieved_rate: float = 0.0      # bits/s, 0 while unserved
    rate_window: deque = field(default_factory=deque)  # (time, rate) pairs
    mean_rate: float = 0.0          # arithmetic mean over the trailing window

    def record_rate(self, time: float, rate: float, tau: float) -> None:
        """Append this tick's rate and refresh the trailing-tau-seconds mean."""
        self.rate_window.append((time, rate))
        while self.rate_window and self.rate_window[0][0] <= time - tau:
            self.rate_window.popleft()
        self.mean_rate = sum(r for _, r in self.rate_window) / len(self.rate_window)


def neighbor_set(uav_id: int, uavs: list[UavState], comm_range: float) -> list[int]:
    """Ids of alive UAVs within comm_range of uav_id, excluding itself."""
    me = uavs[uav_id]
    if not me.alive:
        return []
    out = []
    for other in uavs:
        if other.id == uav_id or not other.alive:
            continue
        if distance(me.position, other.position) <= comm_range:
            out.append(other.id)
    return out


@dataclass
class RadioParams:
    """Air-to-ground link parameters.  Powers in dBm, frequencies in Hz."""

    f_c: float = 2e9                # carrier frequency
    delta: float = 2.0              # path-loss exponent
    eta_los: float = 0.1            # excess LoS loss, dB
    eta_nlos: float = 21.0          # excess NLoS loss, dB
    theta_env: float = 4.88         # environment constant (dimensionless)
    xi_env: float = 0.43            # environment constant (1/deg)
    p_t: float = 37.0               # transmit power, dBm
    bandwidth: float = 15e6         # per-link bandwidth, Hz
    noise: float = -80.0            # thermal noise power, dBm
    c_light: float = 3e8            # propagation speed, m/s
    num_channels: int = 8           # channels 0 .. num_channels - 1
    plos_form: str = PLOS_AS_WRITTEN

    def validate(self) -> None:
        if self.f_c <= 0:
            raise ScenarioError("radio.f_c must be positive")
        if self.delta <= 0:
            raise ScenarioError("radio.delta must be positive")
        if self.bandwidth <= 0:
            raise ScenarioError("radio.bandwidth must be positive")
        if self.c_light <= 0:
            raise ScenarioError("radio.c_light must be positive")
        if self.num_channels < 1:
            raise ScenarioError("radio.num_channels must be >= 1")
        if self.plos_form not in PLOS_FORMS:
            raise ScenarioError(f"radio.plos_form must be one of {PLOS_FORMS}")


@dataclass
class ControlGains:
    """Controller gains, spacing constraints, and integration settings."""

    eps: float = 0.1                # sigma-norm curvature
    a: float = 5.0                  # sigmoid ceiling / crowding gain
    b: float = 5.0                  # sigmoid floor
    c1: float = 6.0                 # repulsion / navigation gain
    c2_reg: float = 4.0             # attraction gain, regular users
    c2_prem: float | None = None    # attraction gain, premium; 1.5 * c2_reg
    beta: float = 1.5               # satisfaction ceiling factor
    n_max: int = 80                 # per-UAV serving capacity
    r: float = 300.0                # communication range, m
    d: float = 100.0                # minimum separation, m
    tau: float = 5.0                # rate window span / switch cooldown, s
    dt: float = 0.1                 # tick length, s
    v_max: float = 20.0             # speed clamp, m/s
    u_max: float = 10.0             # control clamp, m/s^2

    def __post_init__(self) -> None:
        if self.c2_prem is None:
            self.c2_prem = 1.5 * self.c2_reg

    def validate(self) -> None:
        if self.eps <= 0:
            raise ScenarioError("gains.eps must be positive")
        if self.a <= 0 or self.b <= 0:
            raise ScenarioError("gains.a and gains.b must be positive")
        if self.c1 < 0 or self.c2_reg < 0:
            raise ScenarioError("gains.c1 and gains.c2_reg must be non-negative")
        if abs(self.c2_prem - 1.5 * self.c2_reg) > 1e-9 * max(1.0, self.c2_reg):
            raise ScenarioError("gains.c2_prem must equal 1.5 * c2_reg")
        if self.beta <= 0:
            raise ScenarioError("gains.beta must be positive")
        if self.n_max < 1:
            raise ScenarioError("gains.n_max must be >= 1")
        if not 0 < self.d < self.r:
            raise ScenarioError("gains must satisfy 0 < d < r")
        if self.tau <= 0:
            raise ScenarioError("gains.tau must be positive")
        if self.dt <= 0:
            raise ScenarioError("gains.dt must be positive")
        if self.v_max <= 0 or self.u_max <= 0:
            raise ScenarioError("gains.v_max and gains.u_max must be positive")


@dataclass
class UserSpec:
    """One entry of a scenario's user list.

    Either a single user at an explicit (x, y) position, or `count` users
    sampled uniformly in a rectangular region (x0, y0, x1, y1).
    """

    klass: str
    position: tuple[float, float] | None = None
    region: tuple[float, float, float, float] | None = None
    count: int = 1


@dataclass
class FailureEvent:
    at_time: float                  # s; fires at the first tick at or past this
    fraction: float                 # fraction of currently alive UAVs to kill


@dataclass
class ScenarioConfig:
    users: list[UserSpec]
    uav_count: int
    uav_initial_positions: list[tuple[float, float]] | None = None
    uav_region: tuple[float, float, float, float] | None = None
    H: float = 100.0                # flight height, m
    duration: float = 30.0          # s
    seed: int = 0
    failure_events: list[FailureEvent] = field(default_factory=list)
    controller_mode: str = QOS_MODE
    radio: RadioParams = field(default_factory=RadioParams)
    gains: ControlGains = field(default_factory=ControlGains)

    def n_users(self) -> int:
        return sum(s.count if s.region is not None else 1 for s in self.users)

    def validate(self) -> None:
        for i, spec in enumerate(self.users):
            where = f"users[{i}]"
            if spec.klass not in USER_CLASSES:
                raise ScenarioError(f"{where}: klass must be one of {USER_CLASSES}")
            if (spec.position is None) == (spec.region is None):
                raise ScenarioError(f"{where}: exactly one of position/region required")
            if spec.position is not None and len(spec.position) != 2:
                raise ScenarioError(f"{where}: position must be [x, y]")
            if spec.region is not None:
                _check_region(spec.region, where)
                if spec.count < 1:
                    raise ScenarioError(f"{where}: count must be >= 1")
            elif spec.count != 1:
                raise ScenarioError(f"{where}: count requires a region")
        if self.uav_count < 0:
            raise ScenarioError("uav_count must be >= 0")
        if self.uav_count > 0:
            has_pos = self.uav_initial_positions is not None
            has_reg = self.uav_region is not None
            if has_pos == has_reg:
                raise ScenarioError(
                    "exactly one of uav_initial_positions/uav_region required")
            if has_pos and len(self.uav_initial_positions) != self.uav_count:
                raise ScenarioError(
                    "uav_initial_positions length must equal uav_count")
            if has_reg:
                _check_region(self.uav_region, "uav_region")
        if self.H <= 0:
            raise ScenarioError("H must be positive")
        if self.duration < 0:
            raise ScenarioError("duration must be >= 0")
        if not 0 <= self.seed < 2**63:
            raise ScenarioError("seed must be a non-negative 63-bit integer")
        for i, ev in enumerate(self.failure_events):
            if ev.at_time < 0:
                raise ScenarioError(f"failure_events[{i}]: at_time must be >= 0")
            if not 0 <= ev.fraction <= 1:
                raise ScenarioError(f"failure_events[{i}]: fraction must be in [0, 1]")
        if self.controller_mode not in MODES:
            raise ScenarioError(f"controller_mode must be one of {MODES}")
        self.radio.validate()
        self.gains.validate()


def _check_region(region, where: str) -> None:
    if len(region) != 4:
        raise ScenarioError(f"{where}: region must be [x0, y0, x1, y1]")
    x0, y0, x1, y1 = region
    if not (x1 > x0 and y1 > y0):
        raise ScenarioError(f"{where}: region must have positive extent")


# --- scenario file format -------------------------------------------------
#
# One YAML document per scenario, keys mirroring ScenarioConfig field names.
# Unknown keys are rejected at every level.

_RADIO_KEYS = set(RadioParams.__dataclass_fields__)
_GAINS_KEYS = set(ControlGains.__dataclass_fields__)
_TOP_KEYS = {
    "users", "uav_count", "uav_initial_positions", "uav_region", "H",
    "duration", "seed", "failure_events", "controller_mode", "radio", "gains",
}
_USER_KEYS = {"klass", "position", "region", "count"}
_FAILURE_KEYS = {"at_time", "fraction"}


def _reject_unknown(mapping: dict, allowed: set, where: str) -> None:
    if not isinstance(mapping, dict):
        raise ScenarioError(f"{where}: expected a mapping")
    unknown = set(mapping) - allowed
    if unknown:
        raise ScenarioError(f"{where}: unknown keys {sorted(unknown)}")


def _as_float_pair(value, where: str) -> tuple[float, float]:
    try:
        x, y = value
        return (float(x), float(y))
    except (TypeError, ValueError):
        raise ScenarioError(f"{where}: expected [x, y]") from None


def _as_region(value, where: str) -> tuple[float, float, float, float]:
    try:
        x0, y0, x1, y1 = value
        return (float(x0), float(y0), float(x1), float(y1))
    except (TypeError, ValueError):
        raise ScenarioError(f"{where}: expected [x0, y0, x1, y1]") from None


def scenario_from_dict(data: dict) -> ScenarioConfig:
    _reject_unknown(data, _TOP_KEYS, "scenario")
    if "users" not in data or "uav_count" not in data:
        raise ScenarioError("scenario requires 'users' and 'uav_count'")

    users = []
    if not isinstance(data["users"], list):
        raise ScenarioError("users: expected a list")
    for i, entry in enumerate(data["users"]):
        where = f"users[{i}]"
        _reject_unknown(entry, _USER_KEYS, where)
        if "klass" not in entry:
            raise ScenarioError(f"{where}: klass required")
        spec = UserSpec(
            klass=str(entry["klass"]),
            position=_as_float_pair(entry["position"], where)
            if entry.get("position") is not None else None,
            region=_as_region(entry["region"], where)
            if entry.get("region") is not None else None,
            count=int(entry.get("count", 1)),
        )
        users.append(spec)

    positions = None
    if data.get("uav_initial_positions") is not None:
        raw = data["uav_initial_positions"]
        if not isinstance(raw, list):
            raise ScenarioError("uav_initial_positions: expected a list")
        positions = [_as_float_pair(p, f"uav_initial_positions[{i}]")
                     for i, p in enumerate(raw)]

    region = None
    if data.get("uav_region") is not None:
        region = _as_region(data["uav_region"], "uav_region")

    failures = []
    for i, entry in enumerate(data.get("failure_events", []) or []):
        where = f"failure_events[{i}]"
        _reject_unknown(entry, _FAILURE_KEYS, where)
        if "at_time" not in entry or "fraction" not in entry:
            raise ScenarioError(f"{where}: at_time and fraction required")
        failures.append(FailureEvent(float(entry["at_time"]),
                                     float(entry["fraction"])))

    radio_data = data.get("radio", {}) or {}
    _reject_unknown(radio_data, _RADIO_KEYS, "radio")
    radio_kwargs = {}
    for key, value in radio_data.items():
        if key == "plos_form":
            radio_kwargs[key] = str(value)
        elif key == "num_channels":
            radio_kwargs[key] = int(value)
        else:
            radio_kwargs[key] = float(value)
    radio = RadioParams(**radio_kwargs)

    gains_data = data.get("gains", {}) or {}
    _reject_unknown(gains_data, _GAINS_KEYS, "gains")
    gains_kwargs = {}
    for key, value in gains_data.items():
        if key == "n_max":
            gains_kwargs[key] = int(value)
        else:
            gains_kwargs[key] = float(value)
    gains = ControlGains(**gains_kwargs)

    return ScenarioConfig(
        users=users,
        uav_count=int(data["uav_count"]),
        uav_initial_positions=positions,
        uav_region=region,
        H=float(data.get("H", 100.0)),
        duration=float(data.get("duration", 30.0)),
        seed=int(data.get("seed", 0)),
        failure_events=failures,
        controller_mode=str(data.get("controller_mode", QOS_MODE)),
        radio=radio,
        gains=gains,
    )


def scenario_to_dict(config: ScenarioConfig) -> dict:
    users = []
    for spec in config.users:
        entry: dict = {"klass": spec.klass}
        if spec.position is not None:
            entry["position"] = [spec.position[0], spec.position[1]]
        else:
            entry["region"] = list(spec.region)
            entry["count"] = spec.count
        users.append(entry)
    data: dict = {"users": users, "uav_count": config.uav_count}
    if config.uav_initial_positions is not None:
        data["uav_initial_positions"] = [[x, y] for x, y in
                                         config.uav_initial_positions]
    if config.uav_region is not None:
        data["uav_region"] = list(config.uav_region)
    data["H"] = config.H
    data["duration"] = config.duration
    data["seed"] = config.seed
    if config.failure_events:
        data["failure_events"] = [{"at_time": ev.at_time, "fraction": ev.fraction}
                                  for ev in config.failure_events]
    data["controller_mode"] = config.controller_mode
    data["radio"] = {k: getattr(config.radio, k) for k in
                     RadioParams.__dataclass_fields__}
    data["gains"] = {k: getattr(config.gains, k) for k in
                     ControlGains.__dataclass_fields__}
    return data


def load_scenario(path) -> ScenarioConfig:
    """Load, parse, and validate a scenario file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ScenarioError(f"{path}: not valid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioError(f"{path}: expected a mapping at top level")
    config = scenario_from_dict(data)
    config.validate()
    return config


def save_scenario(config: ScenarioConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(scenario_to_dict(config), fh, sort_keys=False)

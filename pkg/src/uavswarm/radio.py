"""Air-to-ground radio link model.

Chain: elevation angle -> LoS probability -> mean path loss -> received
power -> SINR -> Shannon rate.  All primitives broadcast over numpy arrays
so the per-tick engine path and the scalar convenience wrappers share one
code route.

Interference is network wide: every alive UAV on the same channel as a
user's serving UAV contributes its received power at that user, whether or
not it currently serves anyone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    PLOS_AS_WRITTEN,
    PLOS_STANDARD,
    RadioParams,
    UavState,
    UserState,
    elevation_angle,
)


def los_probability(elevation_rad, params: RadioParams):
    """Probability of a line-of-sight link at the given elevation angle.

    Two sigmoid-in-degrees forms are supported:

    * ``as_written``: 1 / (1 + theta * exp(-xi * theta_deg - theta))
    * ``standard``:   1 / (1 + theta * exp(-xi * (theta_deg - theta)))

    where theta_deg is the elevation in degrees and (theta, xi) are the
    environment constants.  The first keeps p_los near 1 at all angles for
    urban constants; the second falls off at low elevation.
    """
    theta_deg = np.degrees(elevation_rad)
    th, xi = params.theta_env, params.xi_env
    if params.plos_form == PLOS_AS_WRITTEN:
        expo = -xi * theta_deg - th
    elif params.plos_form == PLOS_STANDARD:
        expo = -xi * (theta_deg - th)
    else:
        raise ValueError(f"unknown plos_form {params.plos_form!r}")
    return 1.0 / (1.0 + th * np.exp(expo))


def path_loss_db(distance_m, elevation_rad, params: RadioParams):
    """Mean path loss in dB over a slant distance at an elevation angle.

    Free-space term with exponent delta, plus the LoS/NLoS excess losses
    weighted by the LoS probability.
    """
    distance_m = np.asarray(distance_m, dtype=float)
    if np.any(distance_m <= 0):
        raise ValueError("path loss requires a positive distance")
    p_los = los_probability(elevation_rad, params)
    fspl = 10.0 * params.delta * np.log10(
        4.0 * math.pi * params.f_c * distance_m / params.c_light)
    return fspl + p_los * params.eta_los + (1.0 - p_los) * params.eta_nlos


def path_loss(uav_pos, user_pos, params: RadioParams) -> float:
    """Path loss in dB between a UAV and a ground user position."""
    uav_pos = np.asarray(uav_pos, dtype=float)
    user_pos = np.asarray(user_pos, dtype=float)
    dist = float(np.linalg.norm(uav_pos - user_pos))
    if dist <= 0:
        raise ValueError("path loss undefined at zero distance")
    elev = elevation_angle(uav_pos, user_pos)
    return float(path_loss_db(dist, elev, params))


def dbm_to_mw(dbm):
    return np.power(10.0, np.asarray(dbm, dtype=float) / 10.0)


def received_power_mw(uav_pos, user_pos, params: RadioParams) -> float:
    """Received power in mW at a user from one UAV's transmission."""
    pl = path_loss(uav_pos, user_pos, params)
    return float(dbm_to_mw(params.p_t - pl))


def received_power_field(uav_positions, user_positions, params: RadioParams):
    """Received power matrix in mW, shape (n_uavs, n_users).

    Vectorized over all UAV/user pairs; the per-pair math is identical to
    received_power_mw.
    """
    uavs = np.asarray(uav_positions, dtype=float).reshape(-1, 3)
    users = np.asarray(user_positions, dtype=float).reshape(-1, 3)
    diff = uavs[:, None, :] - users[None, :, :]
    dist = np.linalg.norm(diff, axis=2)
    horiz = np.hypot(diff[:, :, 0], diff[:, :, 1])
    elev = np.arctan2(diff[:, :, 2], horiz)
    pl = path_loss_db(dist, elev, params)
    return dbm_to_mw(params.p_t - pl)


def sinr(user_id: int, serving_uav_id: int, uavs: list[UavState],
         users: list[UserState], params: RadioParams) -> float:
    """Downlink SINR (linear) for one user served by one UAV.

    Interference sums received power from every other alive UAV sharing the
    serving UAV's channel, idle or not.
    """
    user = users[user_id]
    serving = uavs[serving_uav_id]
    if not serving.alive:
        raise ValueError("serving UAV is not alive")
    signal = received_power_mw(serving.position, user.position, params)
    noise_mw = float(dbm_to_mw(params.noise))
    interference = 0.0
    for other in uavs:
        if other.id == serving_uav_id or not other.alive:
            continue
        if other.channel != serving.channel:
            continue
        interference += received_power_mw(other.position, user.position, params)
    return signal / (noise_mw + interference)


def data_rate(sinr_linear, bandwidth: float):
    """Shannon rate in bits/s for a linear SINR over the given bandwidth."""
    return bandwidth * np.log2(1.0 + np.asarray(sinr_linear, dtype=float))


def p0_objective(users: list[UserState]) -> float:
    """Aggregate QoS gap: sum over users of |achieved - target| in bits/s.

    Unserved users contribute their full target.
    """
    return sum(abs(u.achieved_rate - u.target_rate) for u in users)


@dataclass
class LinkBudget:
    distance_m: float
    elevation_rad: float
    p_los: float
    path_loss_db: float
    received_mw: float
    snr_db: float
    rate_bps: float


def link_budget(uav_pos, user_pos, params: RadioParams) -> LinkBudget:
    """Single-link budget with no interference, for inspection and tests."""
    uav_pos = np.asarray(uav_pos, dtype=float)
    user_pos = np.asarray(user_pos, dtype=float)
    dist = float(np.linalg.norm(uav_pos - user_pos))
    elev = elevation_angle(uav_pos, user_pos)
    p_los = float(los_probability(elev, params))
    pl = float(path_loss_db(dist, elev, params))
    rx_mw = float(dbm_to_mw(params.p_t - pl))
    noise_mw = float(dbm_to_mw(params.noise))
    snr = rx_mw / noise_mw
    return LinkBudget(
        distance_m=dist,
        elevation_rad=elev,
        p_los=p_los,
        path_loss_db=pl,
        received_mw=rx_mw,
        snr_db=10.0 * math.log10(snr),
        rate_bps=float(data_rate(snr, params.bandwidth)),
    )

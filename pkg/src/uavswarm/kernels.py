"""Potential-field kernels and the three-term swarm controller.

The controller output for UAV i is u_i = f_i + g_i + h_i:

* f: pairwise cohesion/separation between UAVs, shaped by a smooth pair
  potential with its zero at the desired spacing, plus a crowding penalty
  that ramps up as a neighbor's serving load approaches capacity;
* g: velocity consensus with neighbors, weighted by a bump of distance;
* h: user coupling.  Non-connected in-range users with unmet targets repel
  (pushing the UAV off station toward coverage gaps is handled by sign:
  the gradient points away from the user, freeing crowded spots); connected
  users attract or repel through an odd sigmoid of their rate deficit,
  gated off once the trailing rate clears beta times the target.

All kernels are built on the sigma-norm, a smooth everywhere-differentiable
surrogate for the Euclidean norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import PREMIUM, ControlGains, FLOCKING_MODE, QOS_MODE


@dataclass(frozen=True)
class KernelParams:
    """Controller gains plus sigma-norm images of the key distances."""

    eps: float
    a: float
    b: float
    c_sig: float        # sigmoid shift |a - b| / sqrt(4ab)
    c1: float
    c2_reg: float
    c2_prem: float
    beta: float
    n_max: int
    r: float
    d: float
    r_sig: float        # sigma-norm of r
    d_sig: float        # sigma-norm of d
    n_max_sig: float    # sigma-norm of n_max

    @classmethod
    def from_gains(cls, gains: ControlGains) -> "KernelParams":
        eps = gains.eps
        return cls(
            eps=eps,
            a=gains.a,
            b=gains.b,
            c_sig=abs(gains.a - gains.b) / math.sqrt(4.0 * gains.a * gains.b),
            c1=gains.c1,
            c2_reg=gains.c2_reg,
            c2_prem=gains.c2_prem,
            beta=gains.beta,
            n_max=gains.n_max,
            r=gains.r,
            d=gains.d,
            r_sig=sigma_norm_scalar(gains.r, eps),
            d_sig=sigma_norm_scalar(gains.d, eps),
            n_max_sig=sigma_norm_scalar(gains.n_max, eps),
        )


def bump(z, gamma: float):
    """Smooth cutoff: 1 on [0, gamma), cosine taper to 0 on [gamma, 1).

    Negative arguments clamp to 1; arguments at or past 1 give 0.
    """
    z = np.asarray(z, dtype=float)
    out = np.zeros_like(z)
    out[z < gamma] = 1.0
    mid = (z >= gamma) & (z < 1.0)
    if gamma < 1.0:
        out[mid] = 0.5 * (1.0 + np.cos(np.pi * (z[mid] - gamma) / (1.0 - gamma)))
    if out.ndim == 0:
        return float(out)
    return out


def sigma_norm_scalar(x, eps: float):
    """Sigma-norm of a non-negative magnitude: ((1 + eps x^2)^0.5 - 1)/eps."""
    x = np.asarray(x, dtype=float)
    val = (np.sqrt(1.0 + eps * x * x) - 1.0) / eps
    if val.ndim == 0:
        return float(val)
    return val


def sigma_norm(vec, eps: float) -> float:
    """Sigma-norm of a vector; shares the scalar code path exactly."""
    return sigma_norm_scalar(float(np.linalg.norm(np.asarray(vec, dtype=float))),
                             eps)


def sigma_grad(vec, eps: float) -> np.ndarray:
    """Gradient of the sigma-norm: z / sqrt(1 + eps |z|^2).

    Bounded by 1/sqrt(eps) in magnitude; equals z near the origin.
    """
    vec = np.asarray(vec, dtype=float)
    return vec / np.sqrt(1.0 + eps * float(vec @ vec))


def phi_sigmoid(z, p: KernelParams):
    """Uneven sigmoid through the origin with limits -b and a.

    phi(z) = 0.5 * [(a + b) * s(z + c) + (a - b)], s(y) = y / sqrt(1 + y^2).
    With a = b the shift c is 0 and phi is odd.
    """
    z = np.asarray(z, dtype=float)
    y = z + p.c_sig
    s = y / np.sqrt(1.0 + y * y)
    val = 0.5 * ((p.a + p.b) * s + (p.a - p.b))
    if val.ndim == 0:
        return float(val)
    return val


def pair_potential(z_sig, p: KernelParams):
    """Action function for UAV pairs: bump-windowed sigmoid of spacing error.

    Zero crossing at the sigma-image of the desired spacing d; support ends
    at the sigma-image of the communication range r.
    """
    z_sig = np.asarray(z_sig, dtype=float)
    val = bump(z_sig / p.r_sig, 0.2) * phi_sigmoid(z_sig - p.d_sig, p)
    if np.ndim(val) == 0:
        return float(val)
    return val


def f_term(i: int, positions: np.ndarray, loads: np.ndarray,
           alive: np.ndarray, p: KernelParams) -> np.ndarray:
    """Inter-UAV spacing force on UAV i.

    For each alive neighbor within range r: pair potential of the
    sigma-distance plus a crowding penalty a * (1 - bump(...)) that turns on
    as the neighbor's load approaches n_max, both along the sigma-gradient
    toward the neighbor.
    """
    out = np.zeros(3)
    qi = positions[i]
    for j in range(len(positions)):
        if j == i or not alive[j]:
            continue
        rel = positions[j] - qi
        dist = float(np.linalg.norm(rel))
        if dist > p.r or dist <= 0.0:
            continue
        z_sig = sigma_norm_scalar(dist, p.eps)
        overload = max(loads[j] - p.n_max, 0)
        crowd = p.a * (1.0 - bump(
            sigma_norm_scalar(float(overload), p.eps) / p.n_max_sig, 0.0))
        out += (pair_potential(z_sig, p) + crowd) * sigma_grad(rel, p.eps)
    return out


def g_term(i: int, positions: np.ndarray, velocities: np.ndarray,
           alive: np.ndarray, p: KernelParams) -> np.ndarray:
    """Velocity consensus force on UAV i over alive neighbors within r."""
    out = np.zeros(3)
    qi = positions[i]
    vi = velocities[i]
    for j in range(len(positions)):
        if j == i or not alive[j]:
            continue
        rel = positions[j] - qi
        dist = float(np.linalg.norm(rel))
        if dist > p.r:
            continue
        weight = bump(sigma_norm_scalar(dist, p.eps) / p.r_sig, 0.2)
        out += weight * (velocities[j] - vi)
    return out


def h_term(uav_pos: np.ndarray, connected: np.ndarray, user_pos: np.ndarray,
           rates: np.ndarray, targets: np.ndarray, premium: np.ndarray,
           p: KernelParams) -> np.ndarray:
    """User-coupling force on one UAV.

    Non-connected users within range r and short of their target repel in
    proportion to the relative deficit; connected users pull (or push) along
    the line of sight through an odd sigmoid of the deficit in Mbit/s, with
    class-specific gain, gated to zero once the rate reaches beta * target.
    """
    out = np.zeros(3)
    for m in range(len(user_pos)):
        rel = user_pos[m] - uav_pos
        if connected[m]:
            gain = p.c2_prem if premium[m] else p.c2_reg
            gate = bump(rates[m] / (p.beta * targets[m]), 0.0)
            deficit_mbps = (targets[m] - rates[m]) / 1e6
            out += gain * gate * phi_sigmoid(deficit_mbps, p) * \
                sigma_grad(rel, p.eps)
        else:
            dist = float(np.linalg.norm(rel))
            if dist > p.r:
                continue
            shortfall = max(targets[m] - rates[m], 0.0) / targets[m]
            out += p.c1 * shortfall * sigma_grad(-rel, p.eps)
    return out


def flocking_goal_term(uav_pos: np.ndarray, user_pos: np.ndarray,
                       p: KernelParams) -> np.ndarray:
    """Baseline navigation force: pull toward the user centroid."""
    if len(user_pos) == 0:
        return np.zeros(3)
    centroid = user_pos.mean(axis=0)
    return p.c1 * sigma_grad(centroid - uav_pos, p.eps)


def control_input(i: int, positions: np.ndarray, velocities: np.ndarray,
                  loads: np.ndarray, alive: np.ndarray,
                  connected: np.ndarray, user_pos: np.ndarray,
                  rates: np.ndarray, targets: np.ndarray,
                  premium: np.ndarray, p: KernelParams, u_max: float,
                  mode: str = QOS_MODE) -> np.ndarray:
    """Full control input for UAV i, z zeroed, clamped to u_max."""
    u = f_term(i, positions, loads, alive, p) + \
        g_term(i, positions, velocities, alive, p)
    if mode == QOS_MODE:
        u = u + h_term(positions[i], connected, user_pos, rates, targets,
                       premium, p)
    elif mode == FLOCKING_MODE:
        u = u + flocking_goal_term(positions[i], user_pos, p)
    else:
        raise ValueError(f"unknown controller mode {mode!r}")
    u[2] = 0.0
    norm = float(np.linalg.norm(u))
    if norm > u_max:
        u = u * (u_max / norm)
    return u

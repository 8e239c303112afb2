"""Anatomy of the three-term controller.

Prints the shape of each kernel, then integrates a bare two-UAV world to
show the spacing term settling at the rest distance, and a single
UAV-plus-user world to show the rate-coupling term parking a cell where
the target is met.
"""

import numpy as np

from uavswarm import KernelParams, bump, pair_potential, phi_sigmoid
from uavswarm.engine import advance, associate_users, make_world, update_rates
from uavswarm.engine import control_all
from uavswarm.kernels import sigma_norm_scalar
from uavswarm.model import ControlGains, RadioParams, ScenarioConfig, UserSpec

gains = ControlGains()
p = KernelParams.from_gains(gains)

print("bump gate: flat at 1, cosine taper, hard zero")
for z in (0.0, 0.2, 0.5, 0.8, 1.0, 1.3):
    print(f"  bump({z:.1f}, 0.2) = {bump(z, 0.2):.4f}")

print()
print("pair potential over the sigma-distance (zero crossing at 100 m)")
for dist in (40, 70, 100, 150, 250, 299):
    z = sigma_norm_scalar(float(dist), p.eps)
    print(f"  {dist:4d} m -> {pair_potential(z, p):+8.4f}")

print()
print("odd deficit sigmoid, saturates near +/-5 within a few Mbit/s")
for mbps in (-50, -2, 0, 2, 50):
    print(f"  phi({mbps:+4d} Mbps) = {phi_sigmoid(float(mbps), p):+7.4f}")

# two free-floating UAVs released 40 m apart with no users: the spacing
# force alone should push them out to the 100 m rest distance
cfg = ScenarioConfig(users=[], uav_count=2,
                     uav_initial_positions=[(0.0, 0.0), (40.0, 0.0)],
                     radio=RadioParams(), gains=gains)
world = make_world(cfg)
print()
print("two UAVs released 40 m apart, spacing term only:")
for tick in range(1200):
    associate_users(world, gains)
    update_rates(world, cfg.radio, gains)
    controls = control_all(world, p, gains, "qos_driven")
    advance(world, controls, gains, cfg.H)
    if tick % 200 == 199:
        sep = float(np.linalg.norm(world.uavs[0].position -
                                   world.uavs[1].position))
        print(f"  t={world.time:5.1f}s separation {sep:7.2f} m")
print("the velocity-matching term damps the relative motion, so the pair")
print("parks on the 100 m rest distance instead of ringing around it")

# one UAV, one premium user 250 m away: the coupling term drags the cell
# until the achieved rate clears the target, then the gate closes
cfg = ScenarioConfig(
    users=[UserSpec(klass="premium", position=(250.0, 0.0))],
    uav_count=1, uav_initial_positions=[(0.0, 0.0)],
    radio=RadioParams(delta=1.43, plos_form="standard"), gains=gains)
world = make_world(cfg)
print()
print("single cell chasing one premium user 250 m away:")
for tick in range(600):
    associate_users(world, gains)
    update_rates(world, cfg.radio, gains)
    controls = control_all(world, p, gains, "qos_driven")
    advance(world, controls, gains, cfg.H)
    if tick % 100 == 99:
        user = world.users[0]
        gap = float(np.linalg.norm(world.uavs[0].position[:2] -
                                   user.position[:2]))
        print(f"  t={world.time:5.1f}s offset {gap:6.1f} m "
              f"rate {user.achieved_rate / 1e6:6.1f} Mbps")
print("the cell hunts around the 300 Mbit/s contour: outside it the")
print("deficit pulls in, inside it the surplus pushes back out, and with")
print("no damping partner nearby the hover is a slow orbit, not a point")

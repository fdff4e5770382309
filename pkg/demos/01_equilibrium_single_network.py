"""
One network at equilibrium
==========================

Draw a single multipath realization, build the rake receiver gains and let
each terminal play best responses until nobody wants to move.
"""

import numpy as np

from uwbpowergame import ChannelConfig, GameParams, RakeConfig, compute_gains, db_to_linear, draw_channels
from uwbpowergame import solve_equilibrium
from uwbpowergame.game import sinr

# Ten terminals, 200 paths each, last path 20 dB below the first.
channel = ChannelConfig(num_users=10, num_paths=200, pdp_ratio=db_to_linear(20.0), seed=3)
channels = draw_channels(channel)
print("distances (m):", np.round(channels.distances, 1))

# A partial rake keeping the strongest 20% of the fingers, 10 chips per frame.
rake = RakeConfig(finger_fraction=0.2, chips_per_frame=10, processing_gain=256)
gains = compute_gains(channels, rake)
print("SP/SI ratio zeta:", np.round(gains.zeta, 1))

# Each user aims at the SINR that maximizes bits per joule.
game = GameParams()
out = solve_equilibrium(gains, game)
print(f"converged after {out.iterations} sweeps, saturated users: {list(out.saturated)}")

# Distant users spend more power to reach the same target SINR.
order = np.argsort(channels.distances)
print(f"{'d (m)':>7} {'power (W)':>11} {'SINR':>8} {'target':>8} {'u/h_sp':>10}")
realized = sinr(out.powers, gains, game.noise_power)
for k in order:
    print(f"{channels.distances[k]:7.1f} {out.powers[k]:11.3e} {realized[k]:8.3f} "
          f"{out.targets[k]:8.3f} {out.utilities[k] / gains.h_sp[k]:10.4g}")

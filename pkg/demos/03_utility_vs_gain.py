"""
Utility versus processing gain
==============================

Compare the simulated Nash equilibrium with the large-system prediction
for DS-CDMA and two impulse-radio configurations. A few dozen paired
realizations keep this quick; the acceptance suite uses 2000.
"""

import warnings

from uwbpowergame import ChannelConfig, GameParams, Scenario, RakeConfig, db_to_linear, sweep_gain

warnings.filterwarnings("ignore", message="K/N")

channel = ChannelConfig(num_users=10, num_paths=200, pdp_ratio=db_to_linear(20.0))
base = Scenario(channel, RakeConfig(1.0, 1, 256), GameParams(), "cdma", n_realizations=40, master_seed=7)

# Rows come back per (N, Nc, rho) cell with the closed form alongside.
rows = sweep_gain(base, gains=[200, 400, 800], modes=[1, 10, 50], finger_fractions=[0.2, 1.0], workers=1)

# At N=200 with a 20% rake the load is too high for the closed form to
# exist; the simulated users then sit at maximum power.
print(f"{'N':>5} {'Nc':>4} {'rho':>4} {'simulated':>11} {'closed form':>12} {'gap':>7} {'pair dB':>8}")
for r in rows:
    if "note" in r:
        print("  ", r["note"])
        continue
    pair = r["loss_db_pair"]
    cf = r["closed_form_util_norm"]
    closed = f"{cf:12.4g} {r['rel_gap']:7.3f}" if cf == cf else f"{'infeasible':>12} {'':>7}"
    print(f"{r['N']:5d} {r['Nc']:4d} {r['rho']:4.1f} {r['mean_util_norm']:11.4g} {closed} "
          f"{'' if pair is None else format(pair, '8.3f')}")

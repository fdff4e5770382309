"""
How much does impulse radio give up?
====================================

With few users per unit of spreading, the utility gap between a UWB
network and a DS-CDMA network with the same rake is a small first-order
term. Here it is in dB across spreading factors and finger fractions.
"""

import warnings

from uwbpowergame import AsymptoticInputs, loss

warnings.filterwarnings("ignore", message="K/N")

lam, K = 100.0, 10
print(f"{'N':>6} {'rho':>5} {'beta':>5} {'eps':>9} {'loss dB':>8}")
for N in (256, 512, 1024, 2048):
    for rho in (0.2, 1.0):
        for beta in (0.05, 0.25, 1.0):
            eps, db = loss(AsymptoticInputs(lam, rho, beta, N, K))
            print(f"{N:6d} {rho:5.1f} {beta:5.2f} {eps:9.5f} {db:8.4f}")

# The loss depends on chips per frame and paths only through their ratio.
a = loss(AsymptoticInputs(lam, 0.5, 50 / 200, 1024, K))[0]
b = loss(AsymptoticInputs(lam, 0.5, 100 / 400, 1024, K))[0]
print("\nL=200, Nc=50 vs L=400, Nc=100:", a, b, "identical" if a == b else "different")

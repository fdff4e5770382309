"""
Shape of the self-interference factor
=====================================

The large-system analysis condenses the multipath self-interference into a
single number. Its value depends on the profile ratio, the fraction of
fingers the rake keeps and the ratio of chips per frame to paths (beta).
Small beta approaches the DS-CDMA value.
"""

from uwbpowergame import mu, nu, nu0

rhos = [0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0]
betas = [0.25, 1.0]

# One table per profile ratio, in the layout of a figure with three curves.
for lam in (10.0, 100.0):
    print(f"\nlambda = {lam:g}")
    print(f"{'rho':>5} {'mu':>8} {'nu0':>8}" + "".join(f" {'nu(' + str(b) + ')':>9}" for b in betas))
    for rho in rhos:
        row = f"{rho:5.2f} {mu(lam, rho):8.4f} {nu0(lam, rho):8.4f}"
        row += "".join(f" {nu(lam, rho, b):9.4f}" for b in betas)
        print(row)

# Larger beta means more pulse positions per frame and less self-interference.
print("\nbeta sweep at lambda=100, rho=0.5:")
for b in (1e-6, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0):
    print(f"  beta={b:<6g} nu={nu(100.0, 0.5, b):.6f}")

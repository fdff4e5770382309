"""Game-theoretic energy-efficient power control for DS-CDMA and IR-UWB uplinks.

Finite-L Monte Carlo equilibria over Rayleigh multipath with partial-Rake
MRC reception, and the large-system closed forms they converge to.
"""

from .asymptotics import (
    AsymptoticInputs,
    AsymptoticReport,
    InfeasibleScenario,
    analyze,
    asymptotic_utility,
    loss,
    mu,
    nu,
    nu0,
)
from .channel import ChannelConfig, ChannelSet, apdp_variance, db_to_linear, draw_channels
from .experiments import AggregateStats, Scenario, run_ensemble, run_paired, sweep_gain, sweep_loss
from .game import GameParams, NashOutcome, efficiency, gamma_star, solve_equilibrium, utility
from .rake import GainSet, RakeConfig, compute_gains, phi_coefficients, prake_weights

__version__ = "0.1.0"

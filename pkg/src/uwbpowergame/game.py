"""Noncooperative energy-efficient power control game.

Each user maximizes throughput per unit transmit power,
``u_k = (D / M) R f(sinr_k) / p_k``, with the efficiency function
``f(x) = (1 - exp(-x / 2)) ** M``. The best response is a capped linear
function of the other users' powers, and the Nash equilibrium is found by
sequential best-response sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rake import GainSet

TOLERANCE = 1e-8
MAX_SWEEPS = 10_000
INITIAL_POWER = 1e-12
BISECTION_STEPS = 200


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class GameParams:
    """Packet, rate, noise and power-cap parameters (Table I defaults)."""

    total_bits: int = 100
    info_bits: int = 100
    rate: float = 100e3
    noise_power: float = 5e-16
    p_max: float = 1e-6

    def __post_init__(self):
        if self.total_bits < 1 or self.info_bits < 1:
            raise ValueError("bit counts must be positive")
        if self.info_bits > self.total_bits:
            raise ValueError("info_bits cannot exceed total_bits")
        if not (self.rate > 0 and self.noise_power > 0 and self.p_max > 0):
            raise ValueError("rate, noise_power and p_max must be positive")

    @property
    def p_min(self) -> float:
        return 0.0


@dataclass
class NashOutcome:
    powers: np.ndarray
    sinrs: np.ndarray
    utilities: np.ndarray
    targets: np.ndarray
    iterations: int
    converged: bool
    saturated: frozenset = field(default_factory=frozenset)


def efficiency(sinr, total_bits: int):
    """Packet success rate approximation ``(1 - exp(-sinr/2)) ** M``."""
    return (-np.expm1(-np.asarray(sinr, dtype=float) / 2.0)) ** total_bits


def efficiency_derivative(sinr, total_bits: int):
    x = np.asarray(sinr, dtype=float)
    e = np.exp(-x / 2.0)
    return 0.5 * total_bits * e * (-np.expm1(-x / 2.0)) ** (total_bits - 1)


def _reduced_condition(gamma, zeta, total_bits):
    # f'(g) g (1 - g/zeta) - f(g), divided by (1 - e^{-g/2})^(M-1) > 0
    e = np.exp(-gamma / 2.0)
    return 0.5 * total_bits * gamma * (1.0 - gamma / zeta) * e + np.expm1(-gamma / 2.0)


def target_residual(gamma, zeta, total_bits: int):
    """Relative residual ``(f'(g) g (1 - g/zeta) - f(g)) / f(g)`` of the target equation."""
    gamma = np.asarray(gamma, dtype=float)
    return _reduced_condition(gamma, zeta, total_bits) / -np.expm1(-gamma / 2.0)


def gamma_star_array(zeta, total_bits: int) -> np.ndarray:
    """Vectorized utility-maximizing target SINR for each SP/SI ratio.

    Bisection on the reduced first-order condition, which is positive for
    small SINR when ``M > 1`` and negative at ``zeta`` (or for large SINR
    when ``zeta`` is infinite).
    """
    zeta = np.atleast_1d(np.asarray(zeta, dtype=float))
    if np.any(~(zeta > 0)):
        raise ValueError("zeta must be positive")
    if total_bits < 2:
        raise SolverError(f"target equation has no interior root for M={total_bits}")
    hi = np.where(np.isfinite(zeta), zeta, 4.0 * np.log(total_bits) + 8.0)
    for _ in range(64):
        open_hi = ~np.isfinite(zeta) & (_reduced_condition(hi, zeta, total_bits) >= 0)
        if not open_hi.any():
            break
        hi = np.where(open_hi, 2.0 * hi, hi)
    lo = np.zeros_like(hi)
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if np.all((mid == lo) | (mid == hi)):
            break
        pos = _reduced_condition(mid, zeta, total_bits) > 0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    gamma = 0.5 * (lo + hi)
    if not np.all((gamma > 0) & (gamma < zeta)):
        raise SolverError(f"no bracketed root for zeta={zeta[~((gamma > 0) & (gamma < zeta))]}")
    return gamma


def gamma_star(zeta: float, total_bits: int) -> float:
    """Target SINR maximizing utility for SP/SI ratio ``zeta`` (``inf`` allowed)."""
    return float(gamma_star_array(zeta, total_bits)[0])


def utility(power, sinr, params: GameParams):
    """Bits per Joule; zero at zero power (limit along zero SINR)."""
    power = np.asarray(power, dtype=float)
    f = efficiency(sinr, params.total_bits)
    scale = params.info_bits / params.total_bits * params.rate
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(power > 0, scale * f / np.where(power > 0, power, 1.0), 0.0)
    return float(u) if u.ndim == 0 else u


def sinr(powers: np.ndarray, gains: GainSet, noise_power: float) -> np.ndarray:
    powers = np.asarray(powers, dtype=float)
    interference = gains.h_mai @ powers + gains.h_si * powers + noise_power
    return gains.h_sp * powers / interference


def best_response(k: int, powers: np.ndarray, gains: GainSet, target: float, params: GameParams) -> float:
    zeta_k = gains.zeta[k]
    if not target < zeta_k:
        raise SolverError(f"target SINR {target} not below zeta {zeta_k} for user {k}")
    mai = float(gains.h_mai[k] @ powers) - gains.h_mai[k, k] * powers[k]
    p = target * (mai + params.noise_power) / (gains.h_sp[k] * (1.0 - target / zeta_k))
    return min(p, params.p_max)


def solve_equilibrium(
    gains: GainSet,
    params: GameParams,
    tol: float = TOLERANCE,
    max_sweeps: int = MAX_SWEEPS,
    initial_powers: np.ndarray | None = None,
) -> NashOutcome:
    """Sequential best-response sweeps from a small common starting power.

    Stops when no power moved by more than ``tol`` relative in a sweep.
    """
    K = gains.num_users
    zeta = gains.zeta
    targets = gamma_star_array(zeta, params.total_bits)
    # p_k = min(a_k (sum_j h_mai[k, j] p_j + sigma^2), p_max)
    slope = targets / (gains.h_sp * (1.0 - targets / zeta))
    coupling = (slope[:, None] * gains.h_mai).tolist()
    offset = (slope * params.noise_power).tolist()
    p_max = params.p_max

    if initial_powers is None:
        powers = [INITIAL_POWER] * K
    else:
        powers = [float(p) for p in initial_powers]
    converged = False
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        change = 0.0
        for k in range(K):
            row = coupling[k]
            acc = offset[k]
            for j in range(K):
                if j != k:
                    acc += row[j] * powers[j]
            new = acc if acc < p_max else p_max
            old = powers[k]
            rel = abs(new - old) / new
            if rel > change:
                change = rel
            powers[k] = new
        if change < tol:
            converged = True
            break

    powers = np.array(powers)
    achieved = sinr(powers, gains, params.noise_power)
    saturated = frozenset(int(k) for k in np.flatnonzero(powers >= p_max))
    return NashOutcome(
        powers=powers,
        sinrs=achieved,
        utilities=utility(powers, achieved, params),
        targets=targets,
        iterations=sweeps,
        converged=converged,
        saturated=saturated,
    )

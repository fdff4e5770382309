"""Large-system closed forms for dense multipath (L -> infinity).

With ``rho = L_p / L`` and ``beta = N_c / L`` held fixed, the MAI and SI
terms of each user converge to deterministic coefficients ``mu`` and
``nu``; ``nu0`` is the ``beta -> 0`` limit that describes DS-CDMA.
All powers ``lam ** x`` are evaluated as ``exp(x * log(lam))``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .game import GameParams, efficiency, gamma_star

LOG10_E = 10.0 * math.log10(math.e)


class InfeasibleScenario(ValueError):
    """Equilibrium demands more interference margin than the spreading factor offers."""


def _check(lam: float, rho: float) -> None:
    if not lam > 1.0:
        raise ValueError(f"pdp ratio must be > 1 (linear), got {lam}")
    if not 0.0 < rho <= 1.0:
        raise ValueError(f"rho must be in (0, 1], got {rho}")


def mu(lam: float, rho: float) -> float:
    """MAI coefficient ``(lam - 1) lam**(rho - 1) / (lam**rho - 1)``."""
    _check(lam, rho)
    ln = math.log(lam)
    return (lam - 1.0) * math.exp((rho - 1.0) * ln) / math.expm1(rho * ln)


def nu0(lam: float, rho: float) -> float:
    """SI coefficient in the CDMA limit ``beta -> 0``."""
    _check(lam, rho)
    x = math.exp(rho * math.log(lam))
    return (lam + x - 2.0 * lam * x) / (lam - lam * x)


# Each branch takes (lam, rho, beta, ln lam). Numerators and denominators
# are divided through by their largest power of lam to keep magnitudes O(1).

def _nu_a(lam, rho, beta, ln):
    x, y = math.exp(rho * ln), math.exp(beta * ln)
    num = lam * math.expm1(beta * ln) * (4 * x * x + 3 * y - 1) - 2 * x * y * (x + 3 * lam - 1) * beta * ln
    return num / (2 * math.expm1(rho * ln) ** 2 * beta * lam * y * ln)


def _nu_b(lam, rho, beta, ln):
    x, y = math.exp(rho * ln), math.exp(beta * ln)
    num = lam * (4 * y - 1) * math.expm1(2 * rho * ln) - 2 * x * y * (3 * lam * rho - beta + x * beta) * ln
    return num / (2 * math.expm1(rho * ln) ** 2 * beta * lam * y * ln)


def _nu_cd(lam, rho, beta, ln, upper):
    # scaled by lam**-(2 + beta); the upper branch drops the lam**(2 + 2 beta)
    # term and carries 3 lam rho (not 3 lam beta) in the log factor
    x, y = math.exp(rho * ln), math.exp(beta * ln)
    if upper:
        poly = -x * x / y
        slope = 3 * lam * rho
    else:
        poly = -4 * x * x / y + 3 * y
        slope = 3 * lam * beta
    num = poly - 4.0 + x * x * y / (lam * lam) + 4.0 * x * x - 2.0 * x / lam * (rho + slope + x * beta - 1) * ln
    return num / (2 * math.expm1(rho * ln) ** 2 * beta * ln)


def _nu_c(lam, rho, beta, ln):
    return _nu_cd(lam, rho, beta, ln, upper=False)


def _nu_d(lam, rho, beta, ln):
    return _nu_cd(lam, rho, beta, ln, upper=True)


def _nu_e(lam, rho, beta, ln):
    x = math.exp(rho * ln)
    num = 2 * lam * math.expm1(2 * rho * ln) - (x + rho + 3 * lam * rho - 1) * x * ln
    return num / (math.expm1(rho * ln) ** 2 * beta * lam * ln)


NU_BRANCHES = {"a": _nu_a, "b": _nu_b, "c": _nu_c, "d": _nu_d, "e": _nu_e}


def nu_branch(rho: float, beta: float) -> str:
    """Name of the closed form valid at ``(rho, beta)``; ties go to the lower-beta branch."""
    if beta <= min(rho, 1.0 - rho):
        return "a"
    if rho <= 0.5 and beta <= 1.0 - rho:
        return "b"
    if rho >= 0.5 and beta <= rho:
        return "c"
    if beta <= 1.0:
        return "d"
    return "e"


def nu_branch_value(branch: str, lam: float, rho: float, beta: float) -> float:
    """Evaluate one branch formula regardless of whether it applies."""
    _check(lam, rho)
    return NU_BRANCHES[branch](float(lam), float(rho), float(beta), math.log(lam))


def nu(lam: float, rho: float, beta: float) -> float:
    """SI coefficient for IR-UWB with load factor ``beta = N_c / L > 0``."""
    _check(lam, rho)
    if not beta > 0.0:
        raise ValueError(f"beta must be > 0, got {beta}; use nu0 for the CDMA limit")
    lam, rho, beta = float(lam), float(rho), float(beta)
    return NU_BRANCHES[nu_branch(rho, beta)](lam, rho, beta, math.log(lam))


@dataclass(frozen=True)
class AsymptoticInputs:
    """Large-system operating point. ``beta == 0`` denotes DS-CDMA."""

    pdp_ratio: float
    finger_fraction: float
    load_factor: float
    processing_gain: int
    num_users: int
    game: GameParams = GameParams()

    def __post_init__(self):
        _check(self.pdp_ratio, self.finger_fraction)
        if self.load_factor < 0:
            raise ValueError("load_factor must be >= 0")
        if self.processing_gain < 1 or self.num_users < 1:
            raise ValueError("processing_gain and num_users must be positive")
        if self.num_users / self.processing_gain > 0.1:
            warnings.warn(
                f"K/N = {self.num_users / self.processing_gain:.3g} > 0.1; "
                "the large-system approximation assumes K << N",
                stacklevel=3,
            )

    @property
    def mu(self) -> float:
        return mu(self.pdp_ratio, self.finger_fraction)

    @property
    def nu(self) -> float:
        if self.load_factor == 0:
            return self.nu0
        return nu(self.pdp_ratio, self.finger_fraction, self.load_factor)

    @property
    def nu0(self) -> float:
        return nu0(self.pdp_ratio, self.finger_fraction)


@dataclass(frozen=True)
class AsymptoticReport:
    mu: float
    nu: float
    nu0: float
    gamma_target: float
    normalized_utility: float
    normalized_utility_cdma: float
    epsilon: float
    loss_db: float

    @property
    def exact_loss_db(self) -> float:
        """``10 log10`` of the closed-form UWB/CDMA utility ratio."""
        return 10.0 * math.log10(self.normalized_utility / self.normalized_utility_cdma)


def _utility(si: float, mai: float, inp: AsymptoticInputs) -> float:
    g = inp.game
    N, K = inp.processing_gain, inp.num_users
    target = gamma_star(N / si, g.total_bits)
    margin = 1.0 - target * ((K - 1) * mai + si) / N
    if not margin > 0.0:
        raise InfeasibleScenario(
            f"infeasible: target {target:.4g} x ((K-1) mu + nu) = "
            f"{target * ((K - 1) * mai + si):.4g} >= N = {N}"
        )
    f = float(efficiency(target, g.total_bits))
    return g.info_bits / g.total_bits * g.rate * f / (g.noise_power * target) * margin


def asymptotic_utility(inp: AsymptoticInputs, mode: str = "uwb") -> float:
    """Limit of ``u_k / h_sp,k`` at the Nash equilibrium.

    ``mode="cdma"`` (or ``load_factor == 0``) swaps ``nu`` for ``nu0``.
    Raises :class:`InfeasibleScenario` when the equilibrium margin is not positive.
    """
    mode = mode.lower()
    if mode not in ("uwb", "cdma"):
        raise ValueError(f"unknown mode {mode!r}")
    si = inp.nu0 if mode == "cdma" else inp.nu
    return _utility(si, inp.mu, inp)


def loss(inp: AsymptoticInputs) -> tuple[float, float]:
    """Linear loss ``epsilon`` of CDMA wrt IR-UWB and its first-order value in dB."""
    N, K = inp.processing_gain, inp.num_users
    m, v = inp.mu, inp.nu
    target = gamma_star(N / v, inp.game.total_bits)
    denom = N - target * ((K - 1) * m + v)
    if not denom > 0.0:
        raise InfeasibleScenario(f"infeasible: N - target ((K-1) mu + nu) = {denom:.4g} <= 0")
    eps = target * (inp.nu0 - v) / denom
    return eps, LOG10_E * eps


def analyze(inp: AsymptoticInputs) -> AsymptoticReport:
    eps, loss_db = loss(inp)
    v = inp.nu
    return AsymptoticReport(
        mu=inp.mu,
        nu=v,
        nu0=inp.nu0,
        gamma_target=gamma_star(inp.processing_gain / v, inp.game.total_bits),
        normalized_utility=asymptotic_utility(inp, "uwb"),
        normalized_utility_cdma=asymptotic_utility(inp, "cdma"),
        epsilon=eps,
        loss_db=loss_db,
    )

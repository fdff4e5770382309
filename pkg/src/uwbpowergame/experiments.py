"""Monte Carlo ensembles and parameter sweeps.

A realization draws every user's channel once and then solves the game for
each requested receiver configuration, so CDMA and UWB results computed in
the same call see identical channels (common random numbers).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .asymptotics import AsymptoticInputs, InfeasibleScenario, asymptotic_utility, loss
from .asymptotics import LOG10_E
from .channel import ChannelConfig, draw_channels, linear_to_db
from .game import GameParams, solve_equilibrium
from .rake import RakeConfig, compute_gains

WORKERS_ENV = "UWBPOWERGAME_WORKERS"
DEFAULT_REALIZATIONS = 2000
MAX_NONCONVERGED_FRACTION = 0.01


def default_workers() -> int:
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


@dataclass(frozen=True)
class Scenario:
    channel: ChannelConfig
    rake: RakeConfig
    game: GameParams = GameParams()
    mode: str = "uwb"
    n_realizations: int = DEFAULT_REALIZATIONS
    master_seed: int = 0

    def __post_init__(self):
        if self.mode not in ("uwb", "cdma"):
            raise ValueError(f"mode must be 'uwb' or 'cdma', got {self.mode!r}")
        if self.mode == "cdma" and self.rake.chips_per_frame != 1:
            raise ValueError("CDMA requires chips_per_frame == 1")
        if self.n_realizations < 1:
            raise ValueError("n_realizations must be positive")

    @property
    def processing_gain(self) -> int:
        return self.rake.processing_gain

    def with_gain(self, processing_gain: int, chips_per_frame: int | None = None,
                  finger_fraction: float | None = None, strict: bool = True) -> Scenario:
        nc = self.rake.chips_per_frame if chips_per_frame is None else chips_per_frame
        rho = self.rake.finger_fraction if finger_fraction is None else finger_fraction
        return replace(
            self,
            rake=RakeConfig.from_gain(processing_gain, nc, rho, strict),
            mode="cdma" if nc == 1 else "uwb",
        )

    def asymptotic_inputs(self) -> AsymptoticInputs:
        return asymptotic_inputs(self.channel, self.rake, self.game)


def asymptotic_inputs(channel: ChannelConfig, rake: RakeConfig, game: GameParams) -> AsymptoticInputs:
    beta = 0.0 if rake.chips_per_frame == 1 else rake.chips_per_frame / channel.num_paths
    return AsymptoticInputs(
        pdp_ratio=channel.pdp_ratio,
        finger_fraction=rake.finger_fraction,
        load_factor=beta,
        processing_gain=rake.processing_gain,
        num_users=channel.num_users,
        game=game,
    )


@dataclass
class AggregateStats:
    mean_normalized_utility: float
    std_error: float
    n_realizations: int
    rejection_count: int = 0
    nonconverged_count: int = 0
    zeta_violations: int = 0
    mean_loss_db: float | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.nonconverged_count > MAX_NONCONVERGED_FRACTION * self.n_realizations


def simulate_realization(channel: ChannelConfig, rakes: Sequence[RakeConfig], game: GameParams,
                         index: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Solve one realization for every receiver configuration.

    Returns the user-averaged ``u_k / h_sp,k`` per configuration, the
    convergence flags, the count of users with SP/SI ratio below one, and
    the number of redrawn channels.
    """
    channels = draw_channels(channel, index)
    utils = np.empty(len(rakes))
    converged = np.empty(len(rakes), dtype=bool)
    violations = np.empty(len(rakes), dtype=int)
    for i, rake in enumerate(rakes):
        gains = compute_gains(channels, rake)
        outcome = solve_equilibrium(gains, game)
        utils[i] = np.mean(outcome.utilities / gains.h_sp)
        converged[i] = outcome.converged
        violations[i] = gains.zeta_violations().size
    return utils, converged, violations, channels.rejections


def _run_chunk(args):
    channel, rakes, game, indices = args
    return [simulate_realization(channel, rakes, game, i) for i in indices]


def _collect(channel, rakes, game, n, workers):
    indices = list(range(n))
    if workers <= 1:
        results = _run_chunk((channel, rakes, game, indices))
    else:
        size = math.ceil(n / (4 * workers))
        chunks = [(channel, rakes, game, indices[i:i + size]) for i in range(0, n, size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [r for part in pool.map(_run_chunk, chunks) for r in part]
    utils = np.array([r[0] for r in results])
    converged = np.array([r[1] for r in results])
    violations = np.array([r[2] for r in results])
    rejections = sum(r[3] for r in results)
    return utils, converged, violations, rejections


def _metadata(channel: ChannelConfig, rake: RakeConfig) -> dict:
    return {
        "N": rake.processing_gain,
        "Nf": rake.frames_per_symbol,
        "Nc": rake.chips_per_frame,
        "K": channel.num_users,
        "L": channel.num_paths,
        "lambda_db": float(linear_to_db(channel.pdp_ratio)),
        "rho": rake.finger_fraction,
        "mode": "cdma" if rake.chips_per_frame == 1 else "uwb",
    }


def run_paired(channel: ChannelConfig, rakes: Sequence[RakeConfig], game: GameParams,
               n_realizations: int, master_seed: int, workers: int | None = None) -> list[AggregateStats]:
    """Ensembles for several receivers over one shared set of channel draws.

    If a CDMA configuration (one chip per frame) with the same spreading
    factor and finger fraction is present, each UWB entry also gets the
    paired empirical loss ``10 log10(mean_uwb / mean_cdma)``.
    """
    if not rakes:
        return []
    workers = default_workers() if workers is None else workers
    channel = replace(channel, seed=master_seed)
    utils, converged, violations, rejections = _collect(channel, list(rakes), game, n_realizations, workers)
    n = n_realizations
    means = utils.sum(axis=0) / n
    if n > 1:
        errors = utils.std(axis=0, ddof=1) / math.sqrt(n)
    else:
        errors = np.full(len(rakes), np.nan)
    stats = [
        AggregateStats(
            mean_normalized_utility=float(means[i]),
            std_error=float(errors[i]),
            n_realizations=n,
            rejection_count=rejections,
            nonconverged_count=int(n - converged[:, i].sum()),
            zeta_violations=int(violations[:, i].sum()),
            metadata=_metadata(channel, rake),
        )
        for i, rake in enumerate(rakes)
    ]
    for i, rake in enumerate(rakes):
        if rake.chips_per_frame == 1:
            continue
        for j, other in enumerate(rakes):
            if (other.chips_per_frame == 1 and other.processing_gain == rake.processing_gain
                    and other.finger_fraction == rake.finger_fraction):
                stats[i].mean_loss_db = float(10.0 * math.log10(means[i] / means[j]))
                break
    return stats


def run_ensemble(s: Scenario, workers: int | None = None) -> AggregateStats:
    return run_paired(s.channel, [s.rake], s.game, s.n_realizations, s.master_seed, workers)[0]


def closed_form(channel: ChannelConfig, rake: RakeConfig, game: GameParams) -> float:
    """Large-system ``u / h_sp`` for this configuration, NaN when infeasible."""
    inp = asymptotic_inputs(channel, rake, game)
    try:
        return asymptotic_utility(inp, "cdma" if rake.chips_per_frame == 1 else "uwb")
    except InfeasibleScenario:
        return math.nan


def sweep_gain(base: Scenario, gains: Sequence[int], modes: Sequence[int],
               finger_fractions: Sequence[float] | None = None,
               workers: int | None = None, fractional_frames: bool = False) -> list[dict]:
    """Simulated and closed-form normalized utility per (N, N_c, rho) cell.

    ``modes`` lists chips-per-frame values, 1 meaning DS-CDMA. All modes
    sharing (N, rho) run on the same channel draws. Cells whose N is not a
    multiple of N_c are skipped with a note unless ``fractional_frames``
    is set, in which case the SINR model is evaluated at (N, N_c) anyway.
    """
    rows = []
    rhos = [base.rake.finger_fraction] if finger_fractions is None else list(finger_fractions)
    for N in gains:
        for rho in rhos:
            rakes, notes = [], []
            for nc in modes:
                if N % nc and not fractional_frames:
                    notes.append(f"N={N} not divisible by Nc={nc} (rho={rho}); skipped")
                    continue
                rakes.append(RakeConfig.from_gain(N, nc, rho, strict=False))
            stats = run_paired(base.channel, rakes, base.game, base.n_realizations, base.master_seed, workers)
            for rake, st in zip(rakes, stats):
                cf = closed_form(base.channel, rake, base.game)
                row = dict(st.metadata)
                row.update(
                    n_real=st.n_realizations,
                    mean_util_norm=st.mean_normalized_utility,
                    stderr=st.std_error,
                    closed_form_util_norm=cf,
                    rel_gap=abs(st.mean_normalized_utility - cf) / cf if cf == cf else math.nan,
                    loss_db_pair=st.mean_loss_db,
                    nonconverged=st.nonconverged_count,
                    rejections=st.rejection_count,
                    zeta_violations=st.zeta_violations,
                    failed=st.failed,
                )
                if rake.chips_per_frame > 1:
                    try:
                        row["loss_db"] = loss(asymptotic_inputs(base.channel, rake, base.game))[1]
                    except InfeasibleScenario:
                        row["loss_db"] = math.nan
                rows.append(row)
            rows.extend({"N": N, "rho": rho, "note": note} for note in notes)
    return rows


def sweep_loss(base: Scenario, gains: Sequence[int], users: Sequence[int], paths: Sequence[int],
               finger_fractions: Sequence[float], chips_per_frame: int | None = None) -> list[dict]:
    """Closed-form CDMA-vs-UWB loss over a grid; no simulation involved."""
    nc = base.rake.chips_per_frame if chips_per_frame is None else chips_per_frame
    rows = []
    for N in gains:
        for K in users:
            for L in paths:
                for rho in finger_fractions:
                    beta = nc / L
                    row = {"N": N, "K": K, "L": L, "Nc": nc, "rho": rho, "beta": beta}
                    inp = AsymptoticInputs(base.channel.pdp_ratio, rho, beta, N, K, base.game)
                    try:
                        eps, loss_db = loss(inp)
                        exact = 10.0 * math.log10(asymptotic_utility(inp, "uwb") / asymptotic_utility(inp, "cdma"))
                        row.update(epsilon=eps, loss_db=loss_db, exact_loss_db=exact, feasible=True)
                    except InfeasibleScenario:
                        row.update(epsilon=math.nan, loss_db=math.nan, exact_loss_db=math.nan, feasible=False)
                    rows.append(row)
    return rows

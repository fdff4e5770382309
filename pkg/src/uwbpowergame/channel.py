"""Seeded multipath channel realizations with an exponential power delay profile."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * np.log10(value)


@dataclass(frozen=True)
class ChannelConfig:
    """Parameters of the random channel ensemble.

    ``pdp_ratio`` is the linear ratio between the first and last tap
    variance. User ``k`` sits at a distance drawn uniformly in
    ``distance_range`` and has total path gain ``path_gain_scale / d_k**2``.
    """

    num_users: int
    num_paths: int
    pdp_ratio: float
    distance_range: tuple[float, float] = (3.0, 30.0)
    path_gain_scale: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.num_users < 1:
            raise ValueError(f"num_users must be >= 1, got {self.num_users}")
        if self.num_paths < 1:
            raise ValueError(f"num_paths must be >= 1, got {self.num_paths}")
        if not self.pdp_ratio > 1.0:
            raise ValueError(f"pdp_ratio must be > 1 (linear), got {self.pdp_ratio}")
        d_min, d_max = self.distance_range
        if not 0.0 < d_min <= d_max:
            raise ValueError(f"invalid distance_range {self.distance_range}")
        if not self.path_gain_scale > 0.0:
            raise ValueError("path_gain_scale must be positive")


@dataclass(frozen=True)
class ChannelSet:
    """One network realization: ``gains`` is (K, L) complex, ``variances`` (K, L)."""

    gains: np.ndarray
    distances: np.ndarray
    variances: np.ndarray
    rejections: int = field(default=0, compare=False)

    def __post_init__(self):
        for arr in (self.gains, self.distances, self.variances):
            arr.setflags(write=False)

    @property
    def num_users(self) -> int:
        return self.gains.shape[0]

    @property
    def num_paths(self) -> int:
        return self.gains.shape[1]


def apdp_variance(l, num_paths: int, pdp_ratio: float, user_variance: float):
    """Variance of tap ``l`` (1-based) under the exponential profile.

    ``l`` may be an integer or an integer array. With a single path the
    exponent is taken as zero.
    """
    l_arr = np.asarray(l)
    if np.any(l_arr < 1) or np.any(l_arr > num_paths):
        raise ValueError(f"path index out of range 1..{num_paths}: {l}")
    if not pdp_ratio > 1.0:
        raise ValueError(f"pdp_ratio must be > 1, got {pdp_ratio}")
    if not user_variance > 0.0:
        raise ValueError(f"user variance must be positive, got {user_variance}")
    if num_paths == 1:
        exponent = np.zeros(l_arr.shape)
    else:
        exponent = -(l_arr - 1) / (num_paths - 1)
    out = user_variance * np.exp(exponent * np.log(pdp_ratio))
    return float(out) if np.ndim(out) == 0 else out


def user_rng(seed: int, realization: int, user: int, attempt: int = 0) -> np.random.Generator:
    """Independent stream keyed on (seed, realization, user, attempt)."""
    ss = np.random.SeedSequence(seed, spawn_key=(realization, user, attempt))
    return np.random.Generator(np.random.PCG64(ss))


def _draw_user(cfg: ChannelConfig, rng: np.random.Generator, profile: np.ndarray):
    d_min, d_max = cfg.distance_range
    distance = rng.uniform(d_min, d_max)
    variances = cfg.path_gain_scale * distance ** -2 * profile
    z = rng.standard_normal((2, cfg.num_paths))
    gains = (z[0] + 1j * z[1]) * np.sqrt(variances / 2.0)
    return gains, distance, variances


def draw_channels(cfg: ChannelConfig, realization: int = 0) -> ChannelSet:
    """Draw one realization of all ``K`` users' channels.

    Each user has its own stream, so a user's channel does not depend on
    how many other users are drawn. A user whose first tap is exactly zero
    (probability zero) is redrawn from a fresh stream and counted.
    """
    K, L = cfg.num_users, cfg.num_paths
    profile = apdp_variance(np.arange(1, L + 1), L, cfg.pdp_ratio, 1.0)
    profile = np.atleast_1d(profile)
    gains = np.empty((K, L), dtype=complex)
    distances = np.empty(K)
    variances = np.empty((K, L))
    rejections = 0
    for k in range(K):
        attempt = 0
        while True:
            g, d, v = _draw_user(cfg, user_rng(cfg.seed, realization, k, attempt), profile)
            if np.all(np.isfinite(g)) and abs(g[0]) > 0.0:
                break
            attempt += 1
            rejections += 1
        gains[k], distances[k], variances[k] = g, d, v
    return ChannelSet(gains, distances, variances, rejections)

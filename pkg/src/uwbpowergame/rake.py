"""Partial-Rake MRC combining and the SP / SI / MAI gain terms of the SINR model."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RakeConfig:
    """Receiver and spreading parameters.

    ``chips_per_frame`` is the number of pulse positions per frame; setting
    it to 1 gives DS-CDMA. The SINR model depends on the spreading factor
    and ``chips_per_frame`` only, so frames per symbol is derived.
    """

    finger_fraction: float
    chips_per_frame: int
    processing_gain: int
    combining: str = "mrc"

    def __post_init__(self):
        if not 0.0 < self.finger_fraction <= 1.0:
            raise ValueError(f"finger_fraction must be in (0, 1], got {self.finger_fraction}")
        if self.chips_per_frame < 1 or self.processing_gain < 1:
            raise ValueError("chips_per_frame and processing_gain must be >= 1")
        if self.combining != "mrc":
            raise ValueError(f"unsupported combining scheme {self.combining!r}")

    @property
    def frames_per_symbol(self) -> float:
        return self.processing_gain / self.chips_per_frame

    @property
    def integral_frames(self) -> bool:
        return self.processing_gain % self.chips_per_frame == 0

    @classmethod
    def from_gain(cls, processing_gain: int, chips_per_frame: int, finger_fraction: float,
                  strict: bool = True) -> RakeConfig:
        if strict and processing_gain % chips_per_frame:
            raise ValueError(
                f"processing gain {processing_gain} is not a multiple of chips_per_frame {chips_per_frame}"
            )
        return cls(finger_fraction, chips_per_frame, processing_gain)

    @classmethod
    def from_frames(cls, frames_per_symbol: int, chips_per_frame: int, finger_fraction: float) -> RakeConfig:
        return cls(finger_fraction, chips_per_frame, frames_per_symbol * chips_per_frame)


@dataclass(frozen=True)
class GainSet:
    """Per-user gain coefficients entering the SINR.

    ``h_mai[k, j]`` is the interference coefficient of user ``j`` on user
    ``k``; its diagonal is set to zero and never used.
    """

    h_sp: np.ndarray
    h_si: np.ndarray
    h_mai: np.ndarray
    processing_gain: int

    @property
    def zeta(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.where(self.h_si > 0.0, self.h_sp / np.where(self.h_si > 0, self.h_si, 1.0), np.inf)

    @property
    def num_users(self) -> int:
        return self.h_sp.shape[0]

    def zeta_violations(self) -> np.ndarray:
        """Indices of users whose SP/SI ratio falls below one."""
        return np.flatnonzero(self.zeta < 1.0)


def num_fingers(num_paths: int, finger_fraction: float) -> int:
    if not 0.0 < finger_fraction <= 1.0:
        raise ValueError(f"finger_fraction must be in (0, 1], got {finger_fraction}")
    # guard against ceil(0.2 * 200) = 41 from binary rounding
    return max(1, min(num_paths, math.ceil(round(finger_fraction * num_paths, 9))))


def prake_weights(alpha: np.ndarray, finger_fraction: float) -> np.ndarray:
    """MRC weights keeping the first ``ceil(rho * L)`` taps of ``alpha``.

    Works on a single vector or on the last axis of a (K, L) array.
    """
    alpha = np.asarray(alpha)
    lp = num_fingers(alpha.shape[-1], finger_fraction)
    beta = np.zeros_like(alpha)
    beta[..., :lp] = alpha[..., :lp]
    return beta


def phi_coefficients(num_paths: int, chips_per_frame: int) -> np.ndarray:
    lags = num_paths - np.arange(1, num_paths)
    return np.sqrt(np.minimum(lags, chips_per_frame) / chips_per_frame)


def _fft_size(num_paths: int) -> int:
    return 1 << (2 * num_paths - 1).bit_length()


def compute_gains(channels: ChannelSet | np.ndarray, rake: RakeConfig) -> GainSet:
    """SP, SI and MAI coefficients for every user of a realization.

    The lagged inner products that the shift matrices encode are
    cross-correlations of the combining weights with the channel taps, so
    they are evaluated for all lags at once in the frequency domain.
    Parseval turns each MAI numerator into a sum over frequency bins.
    """
    alpha = channels.gains if isinstance(channels, ChannelSet) else np.asarray(channels, dtype=complex)
    if alpha.ndim != 2:
        raise ValueError("channel gains must be a (K, L) array")
    K, L = alpha.shape
    N = rake.processing_gain
    beta = prake_weights(alpha, rake.finger_fraction)

    h_sp = np.einsum("kl,kl->k", beta.conj(), alpha).real
    if np.any(h_sp <= 0.0):
        raise ValueError(f"degenerate channel: h_sp <= 0 for users {np.flatnonzero(h_sp <= 0.0)}")

    nfft = _fft_size(L)
    fa = np.fft.fft(alpha, nfft, axis=1)
    fb = np.fft.fft(beta, nfft, axis=1)

    if L > 1:
        # lag m: sum_i conj(beta_{i+m}) alpha_i + conj(alpha_{i+m}) beta_i
        spec = fa * fb.conj() + fb * fa.conj()
        cross = np.fft.ifft(spec, axis=1)[:, -(L - 1):][:, ::-1]
        phi2 = phi_coefficients(L, rake.chips_per_frame)[::-1] ** 2
        h_si = (np.abs(cross) ** 2 @ phi2) / (N * h_sp)
    else:
        h_si = np.zeros(K)

    # all-lag cross-correlation energy of beta_k with alpha_j
    h_mai = (np.abs(fb) ** 2 @ (np.abs(fa) ** 2).T) / nfft
    h_mai /= N * h_sp[:, None]
    np.fill_diagonal(h_mai, 0.0)

    gains = GainSet(h_sp, h_si, h_mai, N)
    bad = gains.zeta_violations()
    if bad.size:
        logger.debug("SP/SI ratio below 1 for users %s", bad.tolist())
    return gains

"""Distribution-divergence metrics and image-quality metrics.

Distribution inputs are accepted as exact Born distributions, empirical shot
counts, or plain probability vectors; everything is coerced to a dense vector
over the full outcome space before the formula is applied.

Note that classical cross-entropy -sum p log q and the linear cross-entropy
benchmarking fidelity 2^n * mean[p_ideal(sample)] - 1 are different
quantities; both are provided and never conflated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.ndimage import convolve1d

from .errors import ParameterError
from .quantum import BornDistribution, ShotCounts

__all__ = [
    "DistributionReport",
    "ImageQualityReport",
    "shannon_entropy",
    "total_variation_distance",
    "cross_entropy",
    "linear_xeb",
    "image_quality",
    "distribution_report",
]

DistributionLike = Union[BornDistribution, ShotCounts, np.ndarray]

# SSIM constants: window and stabilizers from the canonical formulation
_SSIM_RADIUS = 5
_SSIM_SIGMA = 1.5
_SSIM_K1 = 0.01
_SSIM_K2 = 0.03
_SSIM_L = 255.0

# BT.601 luma weights
_LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class DistributionReport:
    """Divergence summary between two shot regimes of the same circuit."""

    entropy_sim: float
    entropy_hw: float
    cross_entropy: float
    linear_xeb_sim: float
    linear_xeb_hw: float
    tvd: float
    peak_sim: str
    peak_hw: str
    peaks_agree: bool


@dataclass(frozen=True)
class ImageQualityReport:
    """Full-reference quality of image b against reference a."""

    ssim: float
    psnr: float
    rmse: float
    mae: float


def _as_probs(dist: DistributionLike):
    """Coerce to (probability vector, shot count or None)."""
    if isinstance(dist, ShotCounts):
        return dist.to_distribution(), dist.shots
    if isinstance(dist, BornDistribution):
        return dist.probabilities, None
    arr = np.asarray(dist, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ParameterError("distribution must be a non-empty 1-D vector")
    if np.any(arr < 0) or not math.isclose(float(arr.sum()), 1.0, abs_tol=1e-6):
        raise ParameterError("distribution entries must be non-negative and sum to 1")
    return arr, None


def _matched(p: DistributionLike, q: DistributionLike):
    pp, _ = _as_probs(p)
    qq, q_shots = _as_probs(q)
    if pp.shape != qq.shape:
        raise ParameterError(f"support mismatch: {pp.size} vs {qq.size} outcomes")
    return pp, qq, q_shots


def shannon_entropy(dist: DistributionLike) -> float:
    """H(p) = -sum p(z) log2 p(z), with 0*log(0) := 0.  Result is in bits."""
    probs, _ = _as_probs(dist)
    nz = probs[probs > 0]
    return float(-np.sum(nz * np.log2(nz)))


def total_variation_distance(p: DistributionLike, q: DistributionLike) -> float:
    """TVD(p, q) = 1/2 * sum |p(z) - q(z)|, in [0, 1]."""
    pp, qq, _ = _matched(p, q)
    return float(0.5 * np.abs(pp - qq).sum())


def cross_entropy(
    p: DistributionLike,
    q: DistributionLike,
    smoothing: Optional[float] = None,
    base: Optional[float] = None,
) -> float:
    """-sum p(z) log q(z); natural log unless `base` is given.

    When q is empirical and `smoothing` is not given, q is smoothed additively
    by eps = 1/(2*shots), renormalized, so zero-count outcomes stay finite.
    Pass smoothing=0 to disable; p > 0 where q = 0 then yields infinity.
    """
    pp, qq, q_shots = _matched(p, q)
    if smoothing is None:
        smoothing = 1.0 / (2.0 * q_shots) if q_shots else 0.0
    if smoothing < 0:
        raise ParameterError("smoothing must be non-negative")
    if smoothing > 0:
        qq = (qq + smoothing) / (1.0 + smoothing * qq.size)
    mask = pp > 0
    if np.any(qq[mask] == 0):
        return math.inf
    value = float(-np.sum(pp[mask] * np.log(qq[mask])))
    if base is not None:
        value /= math.log(base)
    return value


def linear_xeb(samples: ShotCounts, ideal: BornDistribution) -> float:
    """Benchmarking fidelity F = 2^n * mean_i[p_ideal(z_i)] - 1."""
    if samples.n_qubits != ideal.n_qubits:
        raise ParameterError("sample and ideal qubit counts differ")
    size = 2 ** ideal.n_qubits
    total = 0.0
    for bits, count in samples.counts.items():
        total += count * float(ideal.probabilities[int(bits, 2)])
    return size * (total / samples.shots) - 1.0


def distribution_report(
    sim: ShotCounts,
    hw: ShotCounts,
    ideal: BornDistribution,
    base: Optional[float] = None,
) -> DistributionReport:
    """Summarize a simulator-shots vs hardware-proxy-shots comparison.

    Entropies are per regime; XEB scores each compare a regime against the
    exact distribution; tvd and cross_entropy compare the two regimes to each
    other (p = sim, q = hw).
    """
    return DistributionReport(
        entropy_sim=shannon_entropy(sim),
        entropy_hw=shannon_entropy(hw),
        cross_entropy=cross_entropy(sim, hw, base=base),
        linear_xeb_sim=linear_xeb(sim, ideal),
        linear_xeb_hw=linear_xeb(hw, ideal),
        tvd=total_variation_distance(sim, hw),
        peak_sim=sim.modal_bitstring(),
        peak_hw=hw.modal_bitstring(),
        peaks_agree=sim.modal_bitstring() == hw.modal_bitstring(),
    )


def _gaussian_window(radius: int, sigma: float) -> np.ndarray:
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-(offsets**2) / (2.0 * sigma**2))
    return taps / taps.sum()


def _windowed_mean(img: np.ndarray, taps: np.ndarray, radius: int) -> np.ndarray:
    # separable Gaussian, then crop to windows fully inside the image
    out = convolve1d(img, taps, axis=0, mode="constant")
    out = convolve1d(out, taps, axis=1, mode="constant")
    return out[radius:-radius, radius:-radius]


def _ssim_luma(a: np.ndarray, b: np.ndarray) -> float:
    x = a[:, :, :3].astype(np.float64) @ _LUMA
    y = b[:, :, :3].astype(np.float64) @ _LUMA
    r = _SSIM_RADIUS
    if x.shape[0] < 2 * r + 1 or x.shape[1] < 2 * r + 1:
        raise ParameterError("images must be at least 11x11 for SSIM")
    taps = _gaussian_window(r, _SSIM_SIGMA)
    mu_x = _windowed_mean(x, taps, r)
    mu_y = _windowed_mean(y, taps, r)
    var_x = _windowed_mean(x * x, taps, r) - mu_x * mu_x
    var_y = _windowed_mean(y * y, taps, r) - mu_y * mu_y
    cov = _windowed_mean(x * y, taps, r) - mu_x * mu_y
    c1 = (_SSIM_K1 * _SSIM_L) ** 2
    c2 = (_SSIM_K2 * _SSIM_L) ** 2
    num = (2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    return float(np.mean(num / den))


def image_quality(a: np.ndarray, b: np.ndarray) -> ImageQualityReport:
    """SSIM (BT.601 luma, 11x11 Gaussian windows), PSNR, RMSE, MAE.

    RMSE and MAE run over all channels jointly; PSNR = 20*log10(255/RMSE)
    and is infinite for identical images.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ParameterError(f"image shapes differ: {a.shape} vs {b.shape}")
    if a.ndim != 3 or a.shape[2] not in (3, 4):
        raise ParameterError("images must be (H, W, 3|4) arrays")
    diff = a.astype(np.float64) - b.astype(np.float64)
    mae = float(np.mean(np.abs(diff)))
    rmse = float(np.sqrt(np.mean(diff * diff)))
    psnr = math.inf if rmse == 0.0 else 20.0 * math.log10(255.0 / rmse)
    return ImageQualityReport(ssim=_ssim_luma(a, b), psnr=psnr, rmse=rmse, mae=mae)

"""Nonparametric click-offset model.

A user's click times relative to a reference instant (clock noon, or the
midpoint of a scan dwell) are modelled by a kernel-smoothed circular
histogram over [-period/2, period/2).  The model is learned online with
exponential forgetting and kept strictly positive by a per-bin floor so
log-likelihoods stay finite for any click.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

DEFAULT_BINS = 80
DEFAULT_FORGETTING = 0.98
FLOOR_TOTAL = 1e-4          # total probability mass reserved for the floor


def wrap_offset(t_click: float, t_noon: float, period: float) -> float:
    """Wrap t_click - t_noon into [-period/2, period/2)."""
    if period <= 0:
        raise ValueError("period must be positive")
    half = period / 2.0
    return (t_click - t_noon + half) % period - half


def _floor_mix(weights: np.ndarray, floor: float) -> np.ndarray:
    """Normalize and blend with the uniform floor so min weight >= floor."""
    b = len(weights)
    w = weights / weights.sum()
    return (1.0 - b * floor) * w + floor


@dataclass(frozen=True)
class ClickTimeDistribution:
    period: float                 # ms; offsets live in [-period/2, period/2)
    weights: np.ndarray           # (B,) non-negative, sums to 1
    kernel_sigma: float           # ms
    floor: float                  # minimum per-bin weight
    forgetting: float = DEFAULT_FORGETTING

    @property
    def bins(self) -> int:
        return len(self.weights)

    @property
    def binwidth(self) -> float:
        return self.period / self.bins

    def bin_centers(self) -> np.ndarray:
        return -self.period / 2 + (np.arange(self.bins) + 0.5) * self.binwidth

    def bin_of(self, offset: float) -> int:
        i = int((offset + self.period / 2) // self.binwidth)
        return min(max(i, 0), self.bins - 1)

    def density(self, offset: float) -> float:
        """Piecewise-constant density (per ms) at a wrapped offset."""
        return self.weights[self.bin_of(offset)] / self.binwidth

    def log_density_at_bins(self) -> np.ndarray:
        """log density of every bin; cached by callers on hot paths."""
        return np.log(self.weights / self.binwidth)

    def _kernel(self, offset: float) -> np.ndarray:
        """Circular Gaussian bin mass centered at offset, summing to 1."""
        d = self.bin_centers() - offset
        d = (d + self.period / 2) % self.period - self.period / 2
        k = np.exp(-0.5 * (d / self.kernel_sigma) ** 2)
        return k / k.sum()

    def update(self, offset: float) -> "ClickTimeDistribution":
        """Blend a kernel at the observed offset into the forgotten history."""
        w = self.forgetting * self.weights + (1.0 - self.floor * self.bins) * self._kernel(offset)
        return replace(self, weights=_floor_mix(w, self.floor))

    def sample(self, rng: np.random.Generator) -> float:
        b = rng.choice(self.bins, p=self.weights)
        return -self.period / 2 + (b + rng.random()) * self.binwidth

    def sample_many(self, rng: np.random.Generator, n: int) -> np.ndarray:
        b = rng.choice(self.bins, size=n, p=self.weights)
        return -self.period / 2 + (b + rng.random(n)) * self.binwidth

    def mode_offset(self) -> float:
        return float(self.bin_centers()[int(np.argmax(self.weights))])

    def rescaled(self, period: float) -> "ClickTimeDistribution":
        """Same bin weights over a new period (offsets scale with the domain)."""
        scale = period / self.period
        return replace(self, period=float(period), kernel_sigma=self.kernel_sigma * scale)


def uniform_distribution(period: float, bins: int = DEFAULT_BINS) -> ClickTimeDistribution:
    w = np.full(bins, 1.0 / bins)
    return ClickTimeDistribution(period=float(period), weights=w,
                                 kernel_sigma=2.0 * period / bins,
                                 floor=FLOOR_TOTAL / bins)


def gaussian_distribution(period: float, mean: float, sigma: float,
                          bins: int = DEFAULT_BINS) -> ClickTimeDistribution:
    """Wrapped Gaussian over the circular offset domain."""
    centers = -period / 2 + (np.arange(bins) + 0.5) * (period / bins)
    w = np.zeros(bins)
    for k in (-2, -1, 0, 1, 2):
        w += np.exp(-0.5 * ((centers - mean + k * period) / sigma) ** 2)
    dist = ClickTimeDistribution(period=float(period), weights=np.full(bins, 1.0 / bins),
                                 kernel_sigma=2.0 * period / bins,
                                 floor=FLOOR_TOTAL / bins)
    return replace(dist, weights=_floor_mix(w, dist.floor))


def default_prior_distribution(period: float, bins: int = DEFAULT_BINS) -> ClickTimeDistribution:
    """Wide zero-centered prior used before any calibration data exists."""
    return gaussian_distribution(period, mean=0.0, sigma=period / 8.0, bins=bins)


def init_from_calibration(samples, period: float,
                          bins: int = DEFAULT_BINS,
                          kernel_sigma: float | None = None) -> ClickTimeDistribution:
    """Kernel density over calibration offsets, floored and normalized."""
    samples = list(samples)
    if not samples:
        raise ValueError("calibration requires at least one sample")
    binwidth = period / bins
    if kernel_sigma is None:
        kernel_sigma = 2.0 * binwidth
    base = ClickTimeDistribution(period=float(period),
                                 weights=np.full(bins, 1.0 / bins),
                                 kernel_sigma=float(kernel_sigma),
                                 floor=FLOOR_TOTAL / bins)
    w = np.zeros(bins)
    for s in samples:
        w += base._kernel(wrap_offset(s, 0.0, period))
    return replace(base, weights=_floor_mix(w, base.floor))


# ---------------------------------------------------------------------------
# serialization: header line `period B kernel_sigma floor`, then B weights
# ---------------------------------------------------------------------------

def save_distribution(dist: ClickTimeDistribution, path) -> None:
    with open(path, "w") as f:
        f.write(f"{dist.period:.12g} {dist.bins} {dist.kernel_sigma:.12g} {dist.floor:.12g}\n")
        for w in dist.weights:
            f.write(f"{w:.12g}\n")


def load_distribution(path) -> ClickTimeDistribution:
    with open(path) as f:
        period, b, sigma, floor = f.readline().split()
        weights = np.array([float(f.readline()) for _ in range(int(b))])
    if not math.isclose(weights.sum(), 1.0, abs_tol=1e-9):
        weights = weights / weights.sum()
    return ClickTimeDistribution(period=float(period), weights=weights,
                                 kernel_sigma=float(sigma), floor=float(floor))

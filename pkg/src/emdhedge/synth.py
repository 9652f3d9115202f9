"""Seeded synthetic series with known ground truth (cycles, slopes, basis).

Randomness comes from the Philox 4x64 counter-based generator with Gaussian
draws via the inverse normal CDF, so identical specs produce bit-identical
streams on every platform. Draw order is fixed: futures-walk innovations
first, then basis innovations, then the initial basis value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .errors import DataError
from .series import Leg, PriceSeries

__all__ = ["CointSpec", "SynthSpec", "gen_tones", "gen_coint_pair"]

EPOCH = np.datetime64("2000-01-03", "D")


@dataclass(frozen=True)
class CointSpec:
    """Cointegrated pair parameters: log S = intercept + slope * log F + basis."""

    long_run_slope: float = 0.9
    basis_phi: float = 0.8
    basis_sigma: float = 0.005
    intercept: float = 0.1
    walk_drift: float = 0.0002
    walk_sigma: float = 0.01
    start_price: float = 100.0

    def __post_init__(self):
        if not abs(self.basis_phi) < 1.0:
            raise DataError("|basis AR coefficient| must be < 1")


@dataclass(frozen=True)
class SynthSpec:
    length: int = 1000
    seed: int = 0
    tones: tuple[tuple[float, float], ...] = ()  # (period days, amplitude)
    trend_slope: float = 0.0
    noise_sigma: float = 0.0
    coint: CointSpec | None = None

    def __post_init__(self):
        if self.length < 100:
            raise DataError("length must be >= 100")
        for period, _ in self.tones:
            if period < 4:
                raise DataError("tone periods must be >= 4 samples")


def _normals(rng: np.random.Generator, n: int) -> np.ndarray:
    """Standard normals via inverse CDF of Philox uniforms (portable)."""
    u = rng.random(n)
    return ndtri(np.clip(u, 1e-15, 1.0 - 1e-16))


def _timestamps(n: int) -> np.ndarray:
    return EPOCH + np.arange(n)


def gen_tones(spec: SynthSpec) -> PriceSeries:
    """Sum of sinusoids plus linear trend and optional Gaussian noise,
    offset so every level is strictly positive."""
    t = np.arange(spec.length, dtype=float)
    x = np.zeros(spec.length)
    for period, amplitude in spec.tones:
        x += amplitude * np.sin(2.0 * math.pi * t / period)
    x += spec.trend_slope * t
    if spec.noise_sigma > 0.0:
        rng = np.random.Generator(np.random.Philox(spec.seed))
        x += spec.noise_sigma * _normals(rng, spec.length)
    offset = 1.0 - min(0.0, float(x.min()))
    return PriceSeries(
        id=f"tones-{spec.seed}",
        leg=Leg.SPOT,
        timestamps=_timestamps(spec.length),
        values=x + offset,
    )


def gen_coint_pair(spec: SynthSpec) -> tuple[PriceSeries, PriceSeries]:
    """Cointegrated (spot, futures) levels.

    log F is a Gaussian random walk with drift; log S = a + b log F + u with
    u a stationary AR(1) basis started from its stationary distribution.
    """
    if spec.coint is None:
        raise DataError("coint parameters required")
    c = spec.coint
    n = spec.length
    rng = np.random.Generator(np.random.Philox(spec.seed))
    walk_z = _normals(rng, n - 1)
    basis_z = _normals(rng, n - 1)
    u0_z = _normals(rng, 1)[0]

    log_f = np.empty(n)
    log_f[0] = math.log(c.start_price)
    np.cumsum(c.walk_drift + c.walk_sigma * walk_z, out=log_f[1:])
    log_f[1:] += log_f[0]

    u = np.empty(n)
    stat_sd = c.basis_sigma / math.sqrt(1.0 - c.basis_phi**2) if c.basis_sigma > 0 else 0.0
    u[0] = stat_sd * u0_z
    for i in range(1, n):
        u[i] = c.basis_phi * u[i - 1] + c.basis_sigma * basis_z[i - 1]

    log_s = c.intercept + c.long_run_slope * log_f + u
    ts = _timestamps(n)
    spot = PriceSeries(f"coint-spot-{spec.seed}", Leg.SPOT, ts, np.exp(log_s))
    fut = PriceSeries(f"coint-fut-{spec.seed}", Leg.FUTURES, ts, np.exp(log_f))
    return spot, fut

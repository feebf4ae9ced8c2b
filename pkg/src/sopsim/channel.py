"""Rayleigh block-fading link primitives.

Everything here works on *linear* average SNR; dB only appears in the
conversion helpers used by the interface layer.  The squared fading
magnitude of a Rayleigh link is modeled as a unit-mean exponential, so
the average SNR carries the whole link budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LinkBudget",
    "FadingDraw",
    "db_to_linear",
    "linear_to_db",
    "link_outage",
    "mrc2_outage",
    "sample_fading",
    "sample_effective_snr",
    "effective_snr_cdf",
]


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x_lin: float) -> float:
    if x_lin <= 0.0:
        raise ValueError(f"cannot convert non-positive value {x_lin} to dB")
    return 10.0 * math.log10(x_lin)


@dataclass(frozen=True)
class LinkBudget:
    """Average SNR of one fading link (linear scale)."""

    avg_snr: float

    def __post_init__(self) -> None:
        if not (self.avg_snr > 0.0 and math.isfinite(self.avg_snr)):
            raise ValueError(f"avg_snr must be positive and finite, got {self.avg_snr}")

    @classmethod
    def from_db(cls, snr_db: float) -> "LinkBudget":
        return cls(db_to_linear(snr_db))

    @classmethod
    def from_power(
        cls, power: float, distance: float, path_loss_exp: float, noise_var: float
    ) -> "LinkBudget":
        """Budget from transmit power, distance, path-loss exponent and noise variance."""
        if power <= 0.0:
            raise ValueError("power must be positive")
        if distance <= 1.0:
            raise ValueError("distance must exceed 1 (normalized units)")
        if path_loss_exp <= 0.0:
            raise ValueError("path_loss_exp must be positive")
        if noise_var <= 0.0:
            raise ValueError("noise_var must be positive")
        return cls(power / (distance**path_loss_exp * noise_var))

    @property
    def snr_db(self) -> float:
        return linear_to_db(self.avg_snr)


@dataclass(frozen=True)
class FadingDraw:
    """One realization of a link: squared fading gain and the resulting SNR."""

    gain: float
    snr: float


def _check_rate(rate: float) -> None:
    if rate < 0.0 or not math.isfinite(rate):
        raise ValueError(f"rate must be a finite non-negative number, got {rate}")


def link_outage(rate: float, budget: LinkBudget) -> float:
    """Outage probability of a single Rayleigh link at `rate` bits/channel use.

    Pr{log2(1 + snr) < rate} = 1 - exp(-(2**rate - 1) / avg_snr).
    """
    _check_rate(rate)
    return -math.expm1(-(2.0**rate - 1.0) / budget.avg_snr)


def mrc2_outage(rate: float, budget: LinkBudget) -> float:
    """Outage probability after maximal ratio combining of two i.i.d. copies.

    The combined SNR is the sum of two exponentials, so
    Pr{outage} = 1 - exp(-x) * (1 + x) with x = (2**rate - 1) / avg_snr.
    Always at most `link_outage` for the same arguments.
    """
    _check_rate(rate)
    x = (2.0**rate - 1.0) / budget.avg_snr
    return 1.0 - math.exp(-x) * (1.0 + x)


def sample_fading(rng: np.random.Generator, budget: LinkBudget) -> FadingDraw:
    """Draw one squared Rayleigh gain (unit-mean exponential) and its SNR."""
    gain = float(rng.standard_exponential())
    return FadingDraw(gain=gain, snr=budget.avg_snr * gain)


def sample_effective_snr(u, budget: LinkBudget, order: int):
    """Invert the effective-SNR distribution F(g) = (1 - exp(-g/avg_snr))**order.

    Maps a uniform variate from the open interval (0, 1) to an SNR draw via
    g = -avg_snr * ln(1 - u**(1/order)).  `u` may be a scalar or an ndarray;
    the result has the same shape.  Endpoint values raise, since they map
    to 0 or +inf.
    """
    if order < 1 or int(order) != order:
        raise ValueError(f"order must be a positive integer, got {order}")
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr <= 0.0) or np.any(u_arr >= 1.0):
        raise ValueError("u must lie strictly inside (0, 1)")
    # -expm1(log(u)/order) == 1 - u**(1/order), accurate for u near 1.
    snr = -budget.avg_snr * np.log(-np.expm1(np.log(u_arr) / order))
    return float(snr) if np.isscalar(u) else snr


def effective_snr_cdf(snr, budget: LinkBudget, order: int):
    """CDF of the order-`order` effective-SNR distribution; inverse of the sampler."""
    if order < 1:
        raise ValueError(f"order must be a positive integer, got {order}")
    snr_arr = np.asarray(snr, dtype=float)
    if np.any(snr_arr < 0.0):
        raise ValueError("snr must be non-negative")
    cdf = (-np.expm1(-snr_arr / budget.avg_snr)) ** order
    return float(cdf) if np.isscalar(snr) else cdf

"""Reliability outage of the network-coded cooperative schemes (no eavesdropper).

Closed forms for two-source non-binary network coding (NC), the generalized
scheme (GNC) with k1 broadcast and k2 parity frames per source, their
high-SNR approximations, and log-log slope (diversity order) estimation.

The combinatorial formulas take the per-frame outage probability `p` as the
primitive argument so that the exhaustive enumeration oracle and the closed
forms share one contract; thin wrappers apply p = link_outage(rate / code
rate, budget).  They use only ring arithmetic, so passing a
`fractions.Fraction` yields an exact rational result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence, Tuple

import numpy as np

from .channel import LinkBudget, link_outage, mrc2_outage

__all__ = [
    "GncParams",
    "HighSnrForm",
    "gnc_rate",
    "gnc_outage_exact_2src",
    "gnc_outage_free_intersource",
    "gnc_highsnr_form",
    "gnc_outage_highsnr",
    "nc_outage",
    "nc_outage_highsnr",
    "diversity_estimate",
]


@dataclass(frozen=True)
class GncParams:
    """Cooperative-code geometry: M sources, k1 broadcast frames, k2 parity frames."""

    sources: int
    broadcast_frames: int
    parity_frames: int

    def __post_init__(self) -> None:
        if self.sources < 2:
            raise ValueError("sources must be >= 2")
        if self.broadcast_frames < 1:
            raise ValueError("broadcast_frames must be >= 1")
        if self.parity_frames < 0:
            raise ValueError("parity_frames must be >= 0")

    @property
    def code_rate(self) -> float:
        return gnc_rate(self)

    def require_two_sources(self, what: str) -> None:
        if self.sources != 2:
            raise ValueError(f"{what} is defined for two sources only, got {self.sources}")


@dataclass(frozen=True)
class HighSnrForm:
    """Coefficients of the high-SNR outage template mu * [1 - exp(-x)]**diversity."""

    coding_gain: float
    diversity_order: float

    def __post_init__(self) -> None:
        if self.coding_gain <= 0.0:
            raise ValueError("coding_gain must be positive")
        if self.diversity_order < 1.0:
            raise ValueError("diversity_order must be >= 1")

    def evaluate(self, rate: float, budget: LinkBudget) -> float:
        return self.coding_gain * link_outage(rate, budget) ** self.diversity_order


def gnc_rate(params: GncParams) -> float:
    """Code rate k1 / (k1 + k2): fraction of slots carrying new data."""
    k1, k2 = params.broadcast_frames, params.parity_frames
    return k1 / (k1 + k2)


def _check_probability(p) -> None:
    if p < 0 or p > 1:
        raise ValueError(f"per-frame outage probability must lie in [0, 1], got {p}")


def _free_branch(p, m: int, k1: int, k2: int):
    # Tagged frame lost and at least m*k2 of the other m*(k1+k2)-1 frames lost.
    total = m * k1 + m * k2 - 1
    return p * sum(
        comb(total, m * k2 + i) * p ** (m * k2 + i) * (1 - p) ** (m * k1 - 1 - i)
        for i in range(m * k1)
    )


def _fallback_branch(p, k1: int, k2: int):
    # Intersource outage: each source protects only its own frames; tagged
    # frame lost and at least k2 of the other k1+k2-1 own frames lost.
    total = k1 + k2 - 1
    return p * sum(
        comb(total, k2 + i) * p ** (k2 + i) * (1 - p) ** (k1 - 1 - i)
        for i in range(k1)
    )


def gnc_outage_exact_2src(p, params: GncParams):
    """Exact two-source outage of a tagged information frame.

    Weighs the outage-free-intersource branch against the fallback branch by
    the intersource outage probability, which equals the same per-frame `p`
    in the symmetric network.
    """
    _check_probability(p)
    params.require_two_sources("the exact two-source formula")
    k1, k2 = params.broadcast_frames, params.parity_frames
    return (1 - p) * _free_branch(p, 2, k1, k2) + p * _fallback_branch(p, k1, k2)


def gnc_outage_free_intersource(p, params: GncParams):
    """Outage of a tagged frame when the intersource channels never fail (any M)."""
    _check_probability(p)
    return _free_branch(p, params.sources, params.broadcast_frames, params.parity_frames)


def gnc_highsnr_form(params: GncParams, mode: str) -> HighSnrForm:
    """Coding gain / diversity pair of the high-SNR outage approximation.

    mode "free_intersource":  mu = C(M*k2 + M*k1 - 1, M*k2), diversity M*k2 + 1.
    mode "faded_intersource": mu = C(k1 + k2 - 1, k2),        diversity M + k2.
    """
    m, k1, k2 = params.sources, params.broadcast_frames, params.parity_frames
    if mode == "free_intersource":
        return HighSnrForm(comb(m * k2 + m * k1 - 1, m * k2), m * k2 + 1)
    if mode == "faded_intersource":
        return HighSnrForm(comb(k1 + k2 - 1, k2), m + k2)
    raise ValueError(f"unknown mode {mode!r}; use 'free_intersource' or 'faded_intersource'")


def gnc_outage_highsnr(
    rate: float, budget: LinkBudget, params: GncParams, mode: str
) -> float:
    """High-SNR outage approximation at the pre-cooperation rate `rate`."""
    form = gnc_highsnr_form(params, mode)
    return form.evaluate(rate / gnc_rate(params), budget)


def nc_outage(rate: float, budget: LinkBudget) -> float:
    """Two-source NC outage at the pre-cooperation rate `rate` (code rate 1/2).

    Good intersource channel: the tagged frame survives unless its direct
    copy and at least two of the other three frames fail, approximated by
    3 * O**3.  Bad intersource channel: own-frame retransmission combined by
    MRC at the destination.
    """
    o = link_outage(2.0 * rate, budget)
    return (1.0 - o) * 3.0 * o**3 + o * mrc2_outage(2.0 * rate, budget)


def nc_outage_highsnr(rate: float, budget: LinkBudget) -> float:
    """High-SNR form of the NC outage, 3.5 * O**3 (diversity three)."""
    return 3.5 * link_outage(2.0 * rate, budget) ** 3


def diversity_estimate(points: Sequence[Tuple[float, float]]) -> float:
    """Least-squares slope of -log(probability) against log(average SNR).

    `points` are (avg_snr, probability) pairs with strictly increasing SNR
    and probabilities strictly inside (0, 1).
    """
    if len(points) < 2:
        raise ValueError("at least two points are required")
    snr = np.array([s for s, _ in points], dtype=float)
    prob = np.array([q for _, q in points], dtype=float)
    if np.any(np.diff(snr) <= 0.0):
        raise ValueError("avg_snr values must be strictly increasing")
    if np.any(prob <= 0.0) or np.any(prob >= 1.0):
        raise ValueError("probabilities must lie strictly inside (0, 1)")
    slope, _ = np.polyfit(np.log(snr), -np.log(prob), 1)
    return float(slope)

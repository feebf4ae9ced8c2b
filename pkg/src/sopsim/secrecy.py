"""Secrecy outage probability (SOP) closed forms for all schemes.

Two CSI regimes are covered.  With partial CSI (legitimate channels known)
the SOP is the probability that the instantaneous secrecy capacity falls
below the target secrecy rate.  Without CSI it is the union of the
reliability outage at the destination and the leakage event at the
eavesdropper, composed by inclusion-exclusion.

All public rates are pre-cooperation rates; the scheme code-rate scaling
(factor 2 for the two-source relayed schemes, 1/code_rate for the
network-coded one) happens inside the operations, never at call sites.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from math import comb, lgamma
from typing import Optional

from scipy import integrate

from .channel import LinkBudget, link_outage, mrc2_outage
from .reliability import (
    GncParams,
    gnc_highsnr_form,
    gnc_outage_exact_2src,
    gnc_outage_free_intersource,
    gnc_rate,
)

__all__ = [
    "SecrecyRates",
    "SopBreakdown",
    "QuadratureError",
    "beta_fn",
    "prob_positive_secrecy_dt",
    "sop_dt_csi",
    "sop_dt_nocsi",
    "sop_df_csi",
    "sop_df_nocsi",
    "sop_nocsi_compose",
    "sop_gnc_csi",
    "sop_gnc_nocsi",
    "GNC_CSI_METHODS",
    "GNC_NOCSI_METHODS",
]

GNC_CSI_METHODS = ("closed_form", "quadrature", "asymptotic")
GNC_NOCSI_METHODS = ("exact_2src", "approx", "floor", "max_approx")

# Alternating-sum evaluations whose condition estimate (sum of absolute
# terms over the absolute result) exceeds this are rerouted to quadrature.
_CANCELLATION_LIMIT = 1e8


class QuadratureError(RuntimeError):
    """Numerical integration did not converge to the requested tolerance."""


@dataclass(frozen=True)
class SecrecyRates:
    """Target rates in bits per channel use.

    In the no-CSI regime the wiretap code is fixed, so the attempted total
    rate and the equivocation rate are the primitives and the secrecy rate
    is their difference.  With partial CSI the total rate tracks the
    instantaneous legitimate capacity and only the secrecy rate is
    meaningful; the other two fields stay None.
    """

    secrecy_rate: float
    total_rate: Optional[float] = None
    equivocation_rate: Optional[float] = None

    def __post_init__(self) -> None:
        if self.secrecy_rate < 0.0:
            raise ValueError("secrecy_rate must be >= 0")
        if (self.total_rate is None) != (self.equivocation_rate is None):
            raise ValueError("total_rate and equivocation_rate must be given together")
        if self.total_rate is not None:
            if self.equivocation_rate < 0.0 or self.total_rate < self.equivocation_rate:
                raise ValueError("rates must satisfy total_rate >= equivocation_rate >= 0")
            if self.secrecy_rate != self.total_rate - self.equivocation_rate:
                raise ValueError("secrecy_rate must equal total_rate - equivocation_rate")

    @classmethod
    def csi(cls, secrecy_rate: float) -> "SecrecyRates":
        return cls(secrecy_rate=secrecy_rate)

    @classmethod
    def no_csi(cls, total_rate: float, equivocation_rate: float) -> "SecrecyRates":
        return cls(
            secrecy_rate=total_rate - equivocation_rate,
            total_rate=total_rate,
            equivocation_rate=equivocation_rate,
        )

    def require_no_csi(self) -> None:
        if self.total_rate is None:
            raise ValueError(
                "this operation needs the no-CSI rate pair; build the rates "
                "with SecrecyRates.no_csi(total_rate, equivocation_rate)"
            )


@dataclass(frozen=True)
class SopBreakdown:
    """No-CSI SOP split into its two independent event probabilities."""

    total: float
    reliability: float
    secrecy: float

    def __post_init__(self) -> None:
        for name in ("total", "reliability", "secrecy"):
            v = getattr(self, name)
            if not (-1e-12 <= v <= 1.0 + 1e-12):
                raise ValueError(f"{name} must be a probability, got {v}")
        recomposed = self.reliability + self.secrecy - self.reliability * self.secrecy
        if abs(self.total - recomposed) > 1e-12:
            raise ValueError("total must equal r + s - r*s")


def beta_fn(x: float, y: float) -> float:
    """Euler Beta function B(x, y), evaluated in log-Gamma space."""
    if x <= 0.0 or y <= 0.0:
        raise ValueError(f"beta_fn needs positive arguments, got ({x}, {y})")
    return math.exp(lgamma(x) + lgamma(y) - lgamma(x + y))


def prob_positive_secrecy_dt(gd: LinkBudget, ge: LinkBudget) -> float:
    """Probability that the direct link offers any positive secrecy capacity."""
    return gd.avg_snr / (gd.avg_snr + ge.avg_snr)


def sop_dt_csi(rates: SecrecyRates, gd: LinkBudget, ge: LinkBudget) -> float:
    """SOP of direct transmission with partial CSI.

    1 - snr_d / (snr_d + xi*snr_e) * exp(-(xi - 1)/snr_d) with xi = 2**Rs.
    """
    xi = 2.0**rates.secrecy_rate
    sd, se = gd.avg_snr, ge.avg_snr
    return 1.0 - sd / (sd + xi * se) * math.exp(-(xi - 1.0) / sd)


def sop_dt_nocsi(rates: SecrecyRates, gd: LinkBudget, ge: LinkBudget) -> SopBreakdown:
    """SOP of direct transmission without CSI."""
    rates.require_no_csi()
    reliability = link_outage(rates.total_rate, gd)
    secrecy = 1.0 - link_outage(rates.equivocation_rate, ge)
    return sop_nocsi_compose(reliability, secrecy)


def sop_df_csi(rates: SecrecyRates, gd: LinkBudget, ge: LinkBudget) -> float:
    """SOP of two-source decode-and-forward with partial CSI.

    Both receivers combine the two independent copies by MRC; the factor-two
    rate expansion of the half-rate protocol enters through xi = 2**(2*Rs).
    """
    xi = 2.0 ** (2.0 * rates.secrecy_rate)
    sd, se = gd.avg_snr, ge.avg_snr
    return 1.0 - sd / (sd + xi * se) ** 3 * math.exp(-(xi - 1.0) / sd) * (
        sd * (xi - 1.0 + sd) + xi * se * (xi - 1.0 + 3.0 * sd)
    )


def sop_df_nocsi(rates: SecrecyRates, gd: LinkBudget, ge: LinkBudget) -> SopBreakdown:
    """SOP of two-source decode-and-forward without CSI (MRC at both receivers)."""
    rates.require_no_csi()
    reliability = mrc2_outage(2.0 * rates.total_rate, gd)
    secrecy = 1.0 - mrc2_outage(2.0 * rates.equivocation_rate, ge)
    return sop_nocsi_compose(reliability, secrecy)


def sop_nocsi_compose(reliability: float, secrecy: float) -> SopBreakdown:
    """Union of the independent reliability and secrecy outage events."""
    for name, v in (("reliability", reliability), ("secrecy", secrecy)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {v}")
    total = reliability + secrecy - reliability * secrecy
    return SopBreakdown(total=total, reliability=reliability, secrecy=secrecy)


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def _gnc_orders(params: GncParams) -> tuple[int, int]:
    # Exponents of the approximated effective-SNR distributions: the
    # legitimate side decays with diversity M + k2, the eavesdropper side is
    # favored with the outage-free-intersource diversity M*k2 + 1.
    m, k2 = params.sources, params.parity_frames
    return m + k2, m * k2 + 1


def _gnc_csi_series(xi: float, sd: float, se: float, d_order: int, e_order: int):
    """Alternating binomial-Beta sum for the GNC partial-CSI SOP.

    Returns (value, condition) where condition is the ratio of the sum of
    absolute terms to the absolute result; large values mean the alternating
    sum cancelled catastrophically in floating point.
    """
    terms = [
        comb(d_order, i)
        * (-1.0) ** i
        * math.exp(-(xi - 1.0) * i / sd)
        * beta_fn((xi * se * i + sd) / sd, e_order)
        for i in range(d_order + 1)
    ]
    signed = e_order * math.fsum(terms)
    absolute = e_order * math.fsum(abs(t) for t in terms)
    if signed <= 0.0:
        return signed, math.inf
    return signed, absolute / signed


def _gnc_csi_quadrature(xi: float, sd: float, se: float, d_order: int, e_order: int) -> float:
    """Integrate the destination CDF against the eavesdropper density.

    The integrand is F_D(xi*(1+y) - 1) * p_E(y) on y in (0, y_max).  The cut
    y_max keeps the truncated eavesdropper tail mass below 1e-12 and scales
    with d_order because the destination CDF grows like y**d_order in the
    deep-outage regime, shifting the integrand mass out to y ~ d_order*se.
    """
    eps = 1e-12
    y_max = se * (math.log(1.0 / eps) + math.log(e_order) + 2.5 * d_order + 5.0)

    def integrand(y: float) -> float:
        gu = xi * (1.0 + y) - 1.0
        f_d = (-math.expm1(-gu / sd)) ** d_order
        p_e = (
            e_order / se
            * math.exp(-y / se)
            * (-math.expm1(-y / se)) ** (e_order - 1)
        )
        return f_d * p_e

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        value, abserr = integrate.quad(
            integrand, 0.0, y_max, limit=300, epsabs=0.0, epsrel=1e-11
        )
    if not math.isfinite(value) or abserr > max(1e-15, 1e-9 * abs(value)):
        notes = "; ".join(str(w.message) for w in caught)
        raise QuadratureError(
            f"adaptive quadrature did not converge: value={value!r}, "
            f"abserr={abserr!r}, y_max={y_max!r}"
            + (f" ({notes})" if notes else "")
        )
    return value


def sop_gnc_csi(
    rates: SecrecyRates,
    gd: LinkBudget,
    ge: LinkBudget,
    params: GncParams,
    method: str = "closed_form",
) -> float:
    """SOP of the generalized network-coded scheme with partial CSI.

    method "closed_form": alternating binomial-Beta sum; evaluated with
    compensated summation and rerouted to the quadrature path when the
    cancellation estimate exceeds ``1e8`` (deep outage makes the sum
    meaningless in double precision).
    method "quadrature": adaptive integration of the same approximated
    distribution pair; the independent cross-check for the sum.
    method "asymptotic": high-SNR collapse (1 - exp(-(xi-1)/snr_d))**(M+k2),
    exposing the diversity order M + k2.
    """
    d_order, e_order = _gnc_orders(params)
    xi = 2.0 ** (rates.secrecy_rate / gnc_rate(params))
    sd, se = gd.avg_snr, ge.avg_snr
    if method == "asymptotic":
        return _clamp01((-math.expm1(-(xi - 1.0) / sd)) ** d_order)
    if method == "quadrature":
        return _clamp01(_gnc_csi_quadrature(xi, sd, se, d_order, e_order))
    if method == "closed_form":
        value, condition = _gnc_csi_series(xi, sd, se, d_order, e_order)
        if condition > _CANCELLATION_LIMIT:
            return _clamp01(_gnc_csi_quadrature(xi, sd, se, d_order, e_order))
        return _clamp01(value)
    raise ValueError(f"unknown method {method!r}; choose one of {GNC_CSI_METHODS}")


def sop_gnc_nocsi(
    rates: SecrecyRates,
    gd: LinkBudget,
    ge: LinkBudget,
    params: GncParams,
    method: str = "exact_2src",
) -> SopBreakdown:
    """SOP of the generalized network-coded scheme without CSI.

    The secrecy side always favors the eavesdropper by granting it
    outage-free intersource channels.  Methods:

    - "exact_2src": exact two-source destination outage composed with the
      eavesdropper complement (M must be 2);
    - "approx": high-SNR forms on both sides, clamped into [0, 1];
    - "floor": limit for asymptotically large legitimate SNR, set entirely
      by the eavesdropper's chance of decoding;
    - "max_approx": elementwise maximum of "approx" and "floor", which
      tracks both the slope region and the floor.
    """
    rates.require_no_csi()
    code_rate = gnc_rate(params)
    p_e = link_outage(rates.equivocation_rate / code_rate, ge)
    secrecy_floor = 1.0 - gnc_outage_free_intersource(p_e, params)

    if method == "floor":
        return SopBreakdown(total=secrecy_floor, reliability=0.0, secrecy=secrecy_floor)
    if method == "exact_2src":
        params.require_two_sources("the exact no-CSI composition")
        p_d = link_outage(rates.total_rate / code_rate, gd)
        reliability = gnc_outage_exact_2src(p_d, params)
        return sop_nocsi_compose(reliability, secrecy_floor)
    if method == "approx":
        return _gnc_nocsi_approx(rates, gd, ge, params)
    if method == "max_approx":
        floor = SopBreakdown(
            total=secrecy_floor, reliability=0.0, secrecy=secrecy_floor
        )
        approx = _gnc_nocsi_approx(rates, gd, ge, params)
        return approx if approx.total >= floor.total else floor
    raise ValueError(f"unknown method {method!r}; choose one of {GNC_NOCSI_METHODS}")


def _gnc_nocsi_approx(
    rates: SecrecyRates, gd: LinkBudget, ge: LinkBudget, params: GncParams
) -> SopBreakdown:
    # High-SNR forms overshoot 1 at low SNR (coding gains exceed one), so
    # both event probabilities are clamped before composing.
    code_rate = gnc_rate(params)
    faded = gnc_highsnr_form(params, "faded_intersource")
    free = gnc_highsnr_form(params, "free_intersource")
    reliability = _clamp01(faded.evaluate(rates.total_rate / code_rate, gd))
    secrecy = _clamp01(1.0 - free.evaluate(rates.equivocation_rate / code_rate, ge))
    return sop_nocsi_compose(reliability, secrecy)

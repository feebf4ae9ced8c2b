"""Secrecy outage probability of network-coded cooperative wireless networks.

Closed-form analytics for direct transmission, decode-and-forward and
(generalized) network-coded cooperation under Rayleigh block fading with a
passive eavesdropper, together with seeded Monte Carlo estimators and an
exact enumeration oracle that independently verify every formula.
"""

from .channel import (
    FadingDraw,
    LinkBudget,
    db_to_linear,
    effective_snr_cdf,
    linear_to_db,
    link_outage,
    mrc2_outage,
    sample_effective_snr,
    sample_fading,
)
from .montecarlo import (
    Estimate,
    EstimateBreakdown,
    SimConfig,
    simulate_reliability_outage,
    simulate_sop_csi,
    simulate_sop_nocsi,
)
from .oracle import (
    ErasurePattern,
    enumerate_gnc_outage,
    multiplicity_coefficients,
    tagged_frame_unrecoverable,
)
from .reliability import (
    GncParams,
    HighSnrForm,
    diversity_estimate,
    gnc_highsnr_form,
    gnc_outage_exact_2src,
    gnc_outage_free_intersource,
    gnc_outage_highsnr,
    gnc_rate,
    nc_outage,
    nc_outage_highsnr,
)
from .secrecy import (
    QuadratureError,
    SecrecyRates,
    SopBreakdown,
    beta_fn,
    prob_positive_secrecy_dt,
    sop_df_csi,
    sop_df_nocsi,
    sop_dt_csi,
    sop_dt_nocsi,
    sop_gnc_csi,
    sop_gnc_nocsi,
    sop_nocsi_compose,
)

__version__ = "0.1.0"

__all__ = [
    "FadingDraw",
    "LinkBudget",
    "db_to_linear",
    "linear_to_db",
    "link_outage",
    "mrc2_outage",
    "sample_fading",
    "sample_effective_snr",
    "effective_snr_cdf",
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
    "SimConfig",
    "Estimate",
    "EstimateBreakdown",
    "simulate_sop_csi",
    "simulate_sop_nocsi",
    "simulate_reliability_outage",
    "ErasurePattern",
    "tagged_frame_unrecoverable",
    "enumerate_gnc_outage",
    "multiplicity_coefficients",
    "__version__",
]

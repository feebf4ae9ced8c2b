"""Seeded Monte Carlo estimation of every outage and SOP quantity.

Trials are processed in fixed-size chunks of 2**16; chunk i draws from an
independent substream spawned as SeedSequence(seed, spawn_key=(i,)), so an
estimate depends only on (samples, seed) and never on how chunks are
scheduled across workers.  Chunk results are integer event counts and merge
by summation, which makes worker-count invariance exact.

All fading is drawn at the frame level as unit-mean exponential gains and
decoded by mutual-information thresholds; decode success of frame j at a
receiver with average SNR s and attempted rate r is gain_j >= (2**r - 1)/s.
Capacity comparisons are done in the linear SNR domain (1 + snr_d <
xi * (1 + snr_e)), which is the same event as the log-domain definition
and, at zero secrecy rate, counts zero-capacity ties as outages exactly
like the closed forms do.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .channel import LinkBudget
from .reliability import GncParams, gnc_rate
from .secrecy import SecrecyRates

__all__ = [
    "SimConfig",
    "Estimate",
    "EstimateBreakdown",
    "simulate_sop_csi",
    "simulate_sop_nocsi",
    "simulate_reliability_outage",
    "CHUNK_SIZE",
    "LOW_CONFIDENCE_EVENTS",
]

CHUNK_SIZE = 1 << 16
# Below this many observed events the estimate is flagged low-confidence and
# the confidence interval switches to the Wilson form.
LOW_CONFIDENCE_EVENTS = 20

_Z95 = 1.959963984540054

MODES = ("event_level", "inverse_transform")
COUPLINGS = ("eve_perfect_intersource", "shared_intersource")


@dataclass(frozen=True)
class SimConfig:
    """Sample budget, seed and execution shape of one simulation."""

    samples: int
    seed: int
    mode: str = "event_level"
    coupling: str = "eve_perfect_intersource"
    workers: int = 1

    def __post_init__(self) -> None:
        if self.samples < 1000:
            raise ValueError("a reported estimate needs at least 1000 samples")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.coupling not in COUPLINGS:
            raise ValueError(f"coupling must be one of {COUPLINGS}, got {self.coupling!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo probability estimate with a 95% confidence interval."""

    p_hat: float
    std_err: float
    ci95: Tuple[float, float]
    n: int
    seed: int
    low_confidence: bool

    @classmethod
    def from_counts(cls, events: int, n: int, seed: int) -> "Estimate":
        p = events / n
        se = math.sqrt(p * (1.0 - p) / n)
        if events < LOW_CONFIDENCE_EVENTS:
            ci = _wilson_interval(events, n)
        else:
            ci = (max(0.0, p - _Z95 * se), min(1.0, p + _Z95 * se))
        return cls(
            p_hat=p,
            std_err=se,
            ci95=ci,
            n=n,
            seed=seed,
            low_confidence=events < LOW_CONFIDENCE_EVENTS,
        )


def _wilson_interval(events: int, n: int) -> Tuple[float, float]:
    p = events / n
    z2 = _Z95 * _Z95
    denom = 1.0 + z2 / n
    center = (p + z2 / (2.0 * n)) / denom
    half = _Z95 * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass(frozen=True)
class EstimateBreakdown:
    """No-CSI estimates: the union outage plus its two constituent events.

    The union count is taken per trial, so `total` is a direct estimate and
    is not recomposed from the parts (the analytic inclusion-exclusion
    identity holds only in expectation).
    """

    total: Estimate
    reliability: Estimate
    secrecy: Estimate


ChunkFn = Callable[[np.random.Generator, int], Tuple[int, ...]]


def _run_chunked(cfg: SimConfig, chunk_fn: ChunkFn, n_counts: int) -> Tuple[int, ...]:
    sizes = [CHUNK_SIZE] * (cfg.samples // CHUNK_SIZE)
    if cfg.samples % CHUNK_SIZE:
        sizes.append(cfg.samples % CHUNK_SIZE)

    def run_one(index: int) -> Tuple[int, ...]:
        ss = np.random.SeedSequence(cfg.seed, spawn_key=(index,))
        rng = np.random.Generator(np.random.PCG64(ss))
        return chunk_fn(rng, sizes[index])

    if cfg.workers == 1:
        results = [run_one(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(run_one, range(len(sizes))))
    totals = tuple(int(sum(r[k] for r in results)) for k in range(n_counts))
    return totals


def _open_uniform(rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniform draws from the open interval (0, 1); zeros are redrawn."""
    u = rng.random(size)
    while True:
        zero = u == 0.0
        if not zero.any():
            return u
        u[zero] = rng.random(int(zero.sum()))


def _effective_snr(u: np.ndarray, avg_snr: float, order: int) -> np.ndarray:
    # Inverse of (1 - exp(-g/avg_snr))**order; see channel.sample_effective_snr.
    return -avg_snr * np.log(-np.expm1(np.log(u) / order))


def _require_params(params: Optional[GncParams], scheme: str) -> GncParams:
    if params is None:
        raise ValueError(f"scheme {scheme!r} requires GncParams")
    return params


# --------------------------------------------------------------------------
# Partial-CSI secrecy outage
# --------------------------------------------------------------------------


def simulate_sop_csi(
    scheme: str,
    rates: SecrecyRates,
    gd: LinkBudget,
    ge: LinkBudget,
    params: Optional[GncParams] = None,
    cfg: SimConfig = None,
) -> Estimate:
    """Estimate the partial-CSI SOP of one scheme.

    DT and DF draw the combined SNRs event-by-event (mode "event_level");
    the network-coded scheme draws its effective SNRs by inverse-transform
    sampling of the approximated distribution pair (mode
    "inverse_transform"), whose orders are M + k2 at the destination and
    M*k2 + 1 at the eavesdropper.
    """
    if cfg is None:
        raise ValueError("cfg is required")
    scheme = scheme.upper()
    sd, se = gd.avg_snr, ge.avg_snr

    if scheme == "DT":
        _require_mode(cfg, "event_level", scheme, "csi")
        xi = 2.0**rates.secrecy_rate

        def chunk(rng: np.random.Generator, m: int) -> Tuple[int, ...]:
            snr_d = sd * rng.standard_exponential(m)
            snr_e = se * rng.standard_exponential(m)
            return (int(np.count_nonzero(1.0 + snr_d < xi * (1.0 + snr_e))),)

    elif scheme == "DF":
        _require_mode(cfg, "event_level", scheme, "csi")
        xi = 2.0 ** (2.0 * rates.secrecy_rate)

        def chunk(rng: np.random.Generator, m: int) -> Tuple[int, ...]:
            snr_d = sd * (rng.standard_exponential(m) + rng.standard_exponential(m))
            snr_e = se * (rng.standard_exponential(m) + rng.standard_exponential(m))
            return (int(np.count_nonzero(1.0 + snr_d < xi * (1.0 + snr_e))),)

    elif scheme == "GNC":
        _require_mode(cfg, "inverse_transform", scheme, "csi")
        p = _require_params(params, scheme)
        d_order = p.sources + p.parity_frames
        e_order = p.sources * p.parity_frames + 1
        xi = 2.0 ** (rates.secrecy_rate / gnc_rate(p))

        def chunk(rng: np.random.Generator, m: int) -> Tuple[int, ...]:
            snr_d = _effective_snr(_open_uniform(rng, m), sd, d_order)
            snr_e = _effective_snr(_open_uniform(rng, m), se, e_order)
            return (int(np.count_nonzero(1.0 + snr_d < xi * (1.0 + snr_e))),)

    else:
        raise ValueError(f"unsupported scheme {scheme!r} for partial-CSI simulation")

    (events,) = _run_chunked(cfg, chunk, 1)
    return Estimate.from_counts(events, cfg.samples, cfg.seed)


def _require_mode(cfg: SimConfig, needed: str, scheme: str, regime: str) -> None:
    if cfg.mode != needed:
        raise ValueError(
            f"scheme {scheme!r} in the {regime} regime requires mode {needed!r}, "
            f"got {cfg.mode!r}"
        )


# --------------------------------------------------------------------------
# No-CSI secrecy outage
# --------------------------------------------------------------------------


def simulate_sop_nocsi(
    scheme: str,
    rates: SecrecyRates,
    gd: LinkBudget,
    ge: LinkBudget,
    params: Optional[GncParams] = None,
    cfg: SimConfig = None,
) -> EstimateBreakdown:
    """Estimate the no-CSI SOP (union of reliability and secrecy events).

    Every frame slot draws fresh independent fading on every link.  The
    reliability event is the tagged information frame being unrecoverable
    at the destination; the secrecy event is the tagged frame being
    recoverable at the eavesdropper with the per-frame threshold set by the
    equivocation rate.  For the network-coded scheme one shared binary
    intersource state decides whether the cooperative phase carries
    network-coded parity frames or own-frame retransmissions; the
    "eve_perfect_intersource" coupling additionally grants the eavesdropper
    outage-free intersource channels regardless of that state.
    """
    if cfg is None:
        raise ValueError("cfg is required")
    rates.require_no_csi()
    scheme = scheme.upper()
    _require_mode(cfg, "event_level", scheme, "no-CSI")
    sd, se = gd.avg_snr, ge.avg_snr

    if scheme == "DT":
        thr_d = 2.0**rates.total_rate - 1.0
        thr_e = 2.0**rates.equivocation_rate - 1.0

        def chunk(rng: np.random.Generator, m: int) -> Tuple[int, ...]:
            rel = sd * rng.standard_exponential(m) < thr_d
            sec = se * rng.standard_exponential(m) >= thr_e
            return _event_counts(rel, sec)

    elif scheme == "DF":
        thr_d = 2.0 ** (2.0 * rates.total_rate) - 1.0
        thr_e = 2.0 ** (2.0 * rates.equivocation_rate) - 1.0

        def chunk(rng: np.random.Generator, m: int) -> Tuple[int, ...]:
            mrc_d = sd * (rng.standard_exponential(m) + rng.standard_exponential(m))
            mrc_e = se * (rng.standard_exponential(m) + rng.standard_exponential(m))
            return _event_counts(mrc_d < thr_d, mrc_e >= thr_e)

    elif scheme == "GNC":
        p = _require_params(params, scheme)
        p.require_two_sources("event-level no-CSI simulation")
        k1, k2 = p.broadcast_frames, p.parity_frames
        own = k1 + k2
        n_frames = 2 * own
        code_rate = gnc_rate(p)
        thr_d = 2.0 ** (rates.total_rate / code_rate) - 1.0
        thr_e = 2.0 ** (rates.equivocation_rate / code_rate) - 1.0
        eve_perfect = cfg.coupling == "eve_perfect_intersource"

        def chunk(rng: np.random.Generator, m: int) -> Tuple[int, ...]:
            # Draw order: intersource state, destination frames, then
            # eavesdropper frames.  Column 0 is the tagged direct copy,
            # columns 1..own-1 the tagged source's other frames.
            is_out = sd * rng.standard_exponential(m) < thr_d
            loss_d = sd * rng.standard_exponential((m, n_frames)) < thr_d
            loss_e = se * rng.standard_exponential((m, n_frames)) < thr_e
            rel = _gnc_unrecoverable(loss_d, is_out, own, k2)
            if eve_perfect:
                unrec_e = _gnc_free_unrecoverable(loss_e, k2)
            else:
                unrec_e = _gnc_unrecoverable(loss_e, is_out, own, k2)
            return _event_counts(rel, ~unrec_e)

    else:
        raise ValueError(f"unsupported scheme {scheme!r} for no-CSI simulation")

    rel_n, sec_n, union_n = _run_chunked(cfg, chunk, 3)
    return EstimateBreakdown(
        total=Estimate.from_counts(union_n, cfg.samples, cfg.seed),
        reliability=Estimate.from_counts(rel_n, cfg.samples, cfg.seed),
        secrecy=Estimate.from_counts(sec_n, cfg.samples, cfg.seed),
    )


def _event_counts(rel: np.ndarray, sec: np.ndarray) -> Tuple[int, int, int]:
    return (
        int(np.count_nonzero(rel)),
        int(np.count_nonzero(sec)),
        int(np.count_nonzero(rel | sec)),
    )


def _gnc_free_unrecoverable(loss: np.ndarray, k2: int) -> np.ndarray:
    # Network code spans both sources: direct copy lost and at least 2*k2
    # of the remaining frames lost.
    return loss[:, 0] & (loss[:, 1:].sum(axis=1) >= 2 * k2)


def _gnc_unrecoverable(
    loss: np.ndarray, is_out: np.ndarray, own: int, k2: int
) -> np.ndarray:
    # With the intersource channel in outage each source protects only its
    # own `own` frames and the loss threshold drops to k2.
    free = _gnc_free_unrecoverable(loss, k2)
    fallback = loss[:, 0] & (loss[:, 1:own].sum(axis=1) >= k2)
    return np.where(is_out, fallback, free)


# --------------------------------------------------------------------------
# Reliability outage (no eavesdropper)
# --------------------------------------------------------------------------


def simulate_reliability_outage(
    scheme: str,
    rate: float,
    gd: LinkBudget,
    params: Optional[GncParams] = None,
    cfg: SimConfig = None,
    intersource: str = "faded",
) -> Estimate:
    """Estimate the no-eavesdropper outage probability at the destination.

    `rate` is the pre-cooperation rate; the per-frame decoding threshold
    uses rate / code_rate of the scheme.  For the network-coded schemes
    `intersource` selects the faded two-source model (default) or the
    outage-free model valid for any number of sources.
    """
    if cfg is None:
        raise ValueError("cfg is required")
    if rate < 0.0:
        raise ValueError("rate must be >= 0")
    scheme = scheme.upper()
    _require_mode(cfg, "event_level", scheme, "reliability")
    sd = gd.avg_snr

    if scheme == "DT":
        thr = 2.0**rate - 1.0

        def chunk(rng: np.random.Generator, m: int) -> Tuple[int, ...]:
            return (int(np.count_nonzero(sd * rng.standard_exponential(m) < thr)),)

    elif scheme == "DF":
        thr = 2.0 ** (2.0 * rate) - 1.0

        def chunk(rng: np.random.Generator, m: int) -> Tuple[int, ...]:
            mrc = sd * (rng.standard_exponential(m) + rng.standard_exponential(m))
            return (int(np.count_nonzero(mrc < thr)),)

    elif scheme == "NC":
        thr = 2.0 ** (2.0 * rate) - 1.0

        def chunk(rng: np.random.Generator, m: int) -> Tuple[int, ...]:
            # Draw order: intersource, the four frames toward the
            # destination, the own-frame retransmission used on fallback.
            is_out = sd * rng.standard_exponential(m) < thr
            gains = rng.standard_exponential((m, 4))
            retx = rng.standard_exponential(m)
            loss = sd * gains < thr
            free = loss[:, 0] & (loss[:, 1:].sum(axis=1) >= 2)
            fallback = sd * (gains[:, 0] + retx) < thr  # MRC of the two copies
            return (int(np.count_nonzero(np.where(is_out, fallback, free))),)

    elif scheme == "GNC":
        p = _require_params(params, scheme)
        code_rate = gnc_rate(p)
        thr = 2.0 ** (rate / code_rate) - 1.0
        k1, k2 = p.broadcast_frames, p.parity_frames
        if intersource == "free":
            m_src = p.sources
            n_frames = m_src * (k1 + k2)

            def chunk(rng: np.random.Generator, m: int) -> Tuple[int, ...]:
                loss = sd * rng.standard_exponential((m, n_frames)) < thr
                unrec = loss[:, 0] & (loss[:, 1:].sum(axis=1) >= m_src * k2)
                return (int(np.count_nonzero(unrec)),)

        elif intersource == "faded":
            p.require_two_sources("the faded-intersource event model")
            own = k1 + k2
            n_frames = 2 * own

            def chunk(rng: np.random.Generator, m: int) -> Tuple[int, ...]:
                is_out = sd * rng.standard_exponential(m) < thr
                loss = sd * rng.standard_exponential((m, n_frames)) < thr
                return (
                    int(np.count_nonzero(_gnc_unrecoverable(loss, is_out, own, k2))),
                )

        else:
            raise ValueError(
                f"unknown intersource mode {intersource!r}; use 'faded' or 'free'"
            )

    else:
        raise ValueError(f"unsupported scheme {scheme!r} for reliability simulation")

    (events,) = _run_chunked(cfg, chunk, 1)
    return Estimate.from_counts(events, cfg.samples, cfg.seed)

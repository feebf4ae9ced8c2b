"""Exhaustive verification of the network-coded outage combinatorics.

Enumerates every frame-erasure pattern and decides recoverability of a
tagged information frame by the erasure-counting rule of a maximum-
distance-separable code: a receiver holding the direct copy always
recovers, and otherwise fails exactly when too few of the remaining frames
survive.  All probability mass is carried in exact rational arithmetic;
floats appear only at the comparison boundary, so these results can
arbitrate any disagreement with the closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import List, Tuple

from .reliability import GncParams

__all__ = [
    "ErasurePattern",
    "tagged_frame_unrecoverable",
    "enumerate_gnc_outage",
    "multiplicity_coefficients",
    "pattern_space_mass",
    "PATTERN_SPACE_LIMIT",
]

# Largest erasure-pattern space we are willing to walk exhaustively.
PATTERN_SPACE_LIMIT = 1 << 26


@dataclass(frozen=True)
class ErasurePattern:
    """One outcome of the frame-level erasure experiment.

    `frame_lost[0]` is the tagged information frame's direct copy; the rest
    are the remaining frames transmitted toward the same receiver.
    """

    intersource_ok: bool
    frame_lost: Tuple[bool, ...]


def tagged_frame_unrecoverable(pattern: ErasurePattern, loss_threshold: int) -> bool:
    """Erasure-counting recoverability rule for one pattern.

    The tagged frame is unrecoverable iff its direct copy is lost and at
    least `loss_threshold` of the remaining frames are lost as well.
    """
    return pattern.frame_lost[0] and sum(pattern.frame_lost[1:]) >= loss_threshold


def _unrecoverable_class_counts(n_frames: int, loss_threshold: int) -> List[int]:
    """Visit all 2**n_frames patterns; count the unrecoverable ones per loss count.

    The loop inlines `tagged_frame_unrecoverable` on the bitmask encoding
    (bit 0 = tagged direct copy); patterns with the same number of lost
    frames share one probability weight, so only integer counts are kept.
    """
    if 1 << n_frames > PATTERN_SPACE_LIMIT:
        raise ValueError(
            f"pattern space 2**{n_frames} exceeds the enumeration limit "
            f"2**{PATTERN_SPACE_LIMIT.bit_length() - 1}"
        )
    counts = [0] * (n_frames + 1)
    for mask in range(1 << n_frames):
        lost = mask.bit_count()
        if mask & 1 and lost - 1 >= loss_threshold:
            counts[lost] += 1
    return counts


def _branch_outage(p: Fraction, n_frames: int, loss_threshold: int) -> Fraction:
    q = 1 - p
    counts = _unrecoverable_class_counts(n_frames, loss_threshold)
    return sum(
        (c * p**j * q ** (n_frames - j) for j, c in enumerate(counts) if c),
        start=Fraction(0),
    )


def enumerate_gnc_outage(params: GncParams, p, intersource: str = "faded") -> Fraction:
    """Exact outage probability of a tagged frame by exhaustive enumeration.

    Parameters
    ----------
    params : GncParams
        Two-source geometry (the fallback branch is only defined there).
    p : Fraction | int | str
        Per-frame outage probability as an exact rational.  Floats are
        rejected: the whole point of this path is exactness.
    intersource : "perfect" | "faded"
        "perfect" grants outage-free intersource channels, so the network
        code always spans all sources.  "faded" draws one shared intersource
        state with the same probability `p`; on failure each source falls
        back to protecting only its own frames.
    """
    params.require_two_sources("exhaustive enumeration")
    if isinstance(p, float):
        raise TypeError("p must be an exact rational (Fraction, int or string)")
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    m, k1, k2 = params.sources, params.broadcast_frames, params.parity_frames

    free = _branch_outage(p, m * (k1 + k2), m * k2)
    if intersource == "perfect":
        return free
    if intersource == "faded":
        fallback = _branch_outage(p, k1 + k2, k2)
        return (1 - p) * free + p * fallback
    raise ValueError(f"unknown intersource mode {intersource!r}; use 'perfect' or 'faded'")


def pattern_space_mass(n_frames: int, p) -> Fraction:
    """Total probability weight over all 2**n_frames erasure patterns.

    Must equal one exactly; exposed so the enumeration's weighting can be
    audited independently of any outage rule.
    """
    if isinstance(p, float):
        raise TypeError("p must be an exact rational (Fraction, int or string)")
    p = Fraction(p)
    if 1 << n_frames > PATTERN_SPACE_LIMIT:
        raise ValueError("pattern space exceeds the enumeration limit")
    q = 1 - p
    total = Fraction(0)
    for mask in range(1 << n_frames):
        lost = mask.bit_count()
        total += p**lost * q ** (n_frames - lost)
    return total


def _branch_polynomial(n_frames: int, loss_threshold: int) -> List[int]:
    """Integer coefficients of the branch outage as a polynomial in p."""
    counts = _unrecoverable_class_counts(n_frames, loss_threshold)
    # sum_j counts[j] p^j (1-p)^(n-j), expanded into monomial coefficients
    coeffs = [0] * (n_frames + 1)
    for j, c in enumerate(counts):
        if c == 0:
            continue
        for t in range(n_frames - j + 1):
            coeffs[j + t] += c * (-1) ** t * comb(n_frames - j, t)
    return coeffs


def _poly_mul(a: List[int], b: List[int]) -> List[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def _poly_add(a: List[int], b: List[int]) -> List[int]:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def multiplicity_coefficients(
    params: GncParams, branch: str = "free"
) -> List[Tuple[int, int]]:
    """Polynomial-in-p expansion of the enumerated outage, as (exponent, coefficient).

    branch "free":     outage-free intersource channels (uses all M sources);
    branch "fallback": each source protects only its own frames;
    branch "combined": the two-source mixture with the intersource state
    itself a fresh draw at the same p.

    The lowest-order coefficient is the event multiplicity that governs the
    high-SNR behavior of the corresponding closed form.
    """
    m, k1, k2 = params.sources, params.broadcast_frames, params.parity_frames
    if branch == "free":
        poly = _branch_polynomial(m * (k1 + k2), m * k2)
    elif branch == "fallback":
        poly = _branch_polynomial(k1 + k2, k2)
    elif branch == "combined":
        params.require_two_sources("the combined expansion")
        free = _branch_polynomial(m * (k1 + k2), m * k2)
        fallback = _branch_polynomial(k1 + k2, k2)
        # (1 - p) * free + p * fallback
        poly = _poly_add(_poly_mul([1, -1], free), _poly_mul([0, 1], fallback))
    else:
        raise ValueError(
            f"unknown branch {branch!r}; use 'free', 'fallback' or 'combined'"
        )
    return [(e, c) for e, c in enumerate(poly) if c != 0]

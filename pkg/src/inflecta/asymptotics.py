"""Closed-form asymptotic regime formulas for the caustic wavefield.

Each evaluator is an exact transcription of a leading-order result; the
dispatcher ``asym_abs_A`` selects the applicable magnitude law from the
similarity variables.  No blending between regimes: the composite curve
has a discontinuous slope at the regime boundaries by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import airy_ai
from .wavefield import phase_phi

__all__ = [
    "AsymptoticEstimate",
    "FRESNEL_KBAR_THRESHOLD",
    "asym_incoming",
    "tau0",
    "asym_Iminus_far",
    "asym_abs_A",
    "asym_Iplus_bright",
    "asym_fresnel",
]

# |Kbar| below this: the stationary point sits within O(1) of the endpoint
# in the Fresnel variable and the constant-amplitude law applies.  Calibrated
# so the dispatcher's left/right limits at the boundary agree within 2% for
# S >= 10 (the bright-side law departs from sqrt(2*pi/S) fastest).
FRESNEL_KBAR_THRESHOLD = 0.2


@dataclass(frozen=True)
class AsymptoticEstimate:
    """A regime-tagged estimate; ``value`` is None for magnitude-only laws."""

    regime: str
    magnitude: float
    value: complex | None = None
    note: str = ""


def asym_incoming(S, N, gamma):
    """Incoming field 2*pi*(-4*gamma*S)^(1/3) * Ai((-4*gamma*S)^(1/3) * N),
    the S -> -infinity limit."""
    if not S < 0:
        raise ValueError("incoming form requires S < 0")
    zeta = (-4.0 * gamma * S) ** (1.0 / 3.0)
    return 2.0 * math.pi * zeta * airy_ai(zeta * N)


def tau0(K, gamma):
    """Positive root of K + tau^2 + (2/(3*sqrt(gamma))) tau^3 = 0 for K <= 0.

    tau0(0) = 0; tau0 grows like (3*sqrt(gamma)*|K|/2)^(1/3) as K -> -inf.
    """
    if K > 0:
        raise ValueError("tau0 defined for K <= 0")
    if K == 0:
        return 0.0
    c = 2.0 / (3.0 * math.sqrt(gamma))
    # bracketing: f(0) = K < 0, f grows without bound
    hi = max(math.sqrt(-K), (-K / c) ** (1.0 / 3.0)) * 1.5 + 1.0
    lo = 0.0
    f = lambda t: K + t * t + c * t**3
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    for _ in range(6):
        df = 2.0 * t + 3.0 * c * t * t
        if df == 0:
            break
        t -= f(t) / df
    return t


def asym_Iminus_far(S, N, gamma):
    """Endpoint expansion of the left piece for S^2 K >> 1:
    exp(i*Phi) * (i/(S^3 K)) * (1 + i/(S^5 K^2))."""
    K = N / S**3 - gamma / 3.0
    if K == 0:
        raise ValueError("endpoint expansion undefined at K = 0")
    pref = np.exp(1j * phase_phi(S, N, gamma))
    return pref * (1j / (S**3 * K)) * (1.0 + 1j / (S**5 * K * K))


def asym_Iplus_bright(S, N, gamma):
    """Leading stationary-point term of the right piece for K < 0, scaled by
    2 S^2 exp(i Phi); its magnitude reduces exactly to the bright-side law."""
    if not S > 0:
        raise ValueError("requires S > 0")
    K = N / S**3 - gamma / 3.0
    if K >= 0:
        raise ValueError("bright-side form requires K < 0")
    sg = math.sqrt(gamma)
    t0 = tau0(K, gamma)
    g_t0 = 2.0 * K * t0**2 + t0**4 + 8.0 / (15.0 * sg) * t0**5
    gpp = 8.0 * t0 * t0 * (1.0 + t0 / sg)
    pref = 2.0 * S * S * np.exp(1j * phase_phi(S, N, gamma))
    return (pref * np.exp(-1j * math.pi / 4.0) * t0
            * np.exp(-0.5j * S**5 * g_t0)
            * math.sqrt(4.0 * math.pi / (S**5 * gpp)))


def asym_fresnel(S, N, gamma):
    """Shadow-boundary layer value sqrt(2*pi) S^(-1/2) e^{i(Phi + Kbar^2/2 - pi/4)};
    magnitude independent of Kbar."""
    if not S > 0:
        raise ValueError("requires S > 0")
    K = N / S**3 - gamma / 3.0
    kbar = S**2.5 * K
    return (math.sqrt(2.0 * math.pi / S)
            * np.exp(1j * (phase_phi(S, N, gamma) + 0.5 * kbar * kbar
                           - math.pi / 4.0)))


def asym_abs_A(S, N, gamma):
    """Magnitude dispatcher for S > 0.

    Fresnel layer for |Kbar| below the threshold, otherwise the dark-side
    exponential law for K > 0 or the bright-side stationary-point law for
    K < 0.  Returns an AsymptoticEstimate with the regime tag.
    """
    if not S > 0:
        raise ValueError("dispatcher requires S > 0; use asym_incoming for S < 0")
    sg = math.sqrt(gamma)
    K = N / S**3 - gamma / 3.0
    kbar = S**2.5 * K
    khat = S * S * K
    base = math.sqrt(2.0 * math.pi / S)
    if abs(kbar) <= FRESNEL_KBAR_THRESHOLD:
        return AsymptoticEstimate(
            regime="fresnel",
            magnitude=base,
            value=asym_fresnel(S, N, gamma),
            note="constant-amplitude layer, |Kbar| small",
        )
    if K > 0:
        mag = base * math.exp(-4.0 * khat**2.5 / (15.0 * sg))
        return AsymptoticEstimate(
            regime="outer_dark",
            magnitude=mag,
            note="exponential decay above the tangent line",
        )
    t0 = tau0(K, gamma)
    mag = math.sqrt(2.0 * math.pi / (S * (1.0 + t0 / sg)))
    return AsymptoticEstimate(
        regime="outer_bright",
        magnitude=mag,
        value=asym_Iplus_bright(S, N, gamma),
        note="stationary-point law below the tangent line",
    )

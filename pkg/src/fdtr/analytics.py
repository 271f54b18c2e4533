"""Closed-form ergodic SINR and secrecy-rate models.

All formulas are ratios of the exact component-power expectations listed
in :func:`component_power`; the ratio-of-expectations step (swapping the
expectation into numerator and denominator) is the only approximation and
is validated against Monte Carlo throughout the test suite.

Per-symbol SINR models (U = BOR, s_b/s_e per-subcarrier noise variances):

    bob : alpha (U+1) / (U s_b)
    sds : (alpha/U) / (s_e + (1-alpha)/U)
    mf  : (alpha (U+3)/U) / (s_e + (1-alpha)/(U+1))
    oc  : (alpha/U) / (s_e/2 + (1-alpha)/U)

Infinite SINRs are first-class values (exact-zero noise limits).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ParameterError
from .scenario import DECODERS, normalize_decoder


@dataclass(frozen=True)
class SinrInputs:
    """Operating point for the SINR models."""

    alpha: float
    bor: int
    noise_var_bob: float
    noise_var_eve: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ParameterError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.bor < 1:
            raise ParameterError(f"bor must be >= 1, got {self.bor}")
        if self.noise_var_bob < 0 or self.noise_var_eve < 0:
            raise ParameterError("noise variances must be >= 0")


def _ratio(num: float, den: float) -> float:
    if den == 0.0:
        return math.inf if num > 0 else 0.0
    return num / den


def sinr_bob(inputs: SinrInputs) -> float:
    """Ergodic SINR at the legitimate receiver: alpha (U+1) / (U s_b)."""
    u = inputs.bor
    return _ratio(inputs.alpha * (u + 1) / u, inputs.noise_var_bob)


def sinr_eve(decoder: str, inputs: SinrInputs) -> float:
    """Ergodic SINR at the eavesdropper for the given decoding structure."""
    decoder = normalize_decoder(decoder)
    a, u, s_e = inputs.alpha, inputs.bor, inputs.noise_var_eve
    if decoder == "sds":
        return _ratio(a / u, s_e + (1.0 - a) / u)
    if decoder == "mf":
        return _ratio(a * (u + 3) / u, s_e + (1.0 - a) / (u + 1))
    return _ratio(a / u, s_e / 2.0 + (1.0 - a) / u)  # oc


def secrecy_rate(gamma_bob: float, gamma_eve: float) -> float:
    """Achievable ergodic secrecy rate max(0, log2(1+g_B) - log2(1+g_E))."""
    if math.isinf(gamma_bob):
        raise ParameterError("infinite legitimate SINR is an unsupported operating point")
    if gamma_bob < 0 or gamma_eve < 0:
        raise ParameterError("SINRs must be >= 0")
    if math.isinf(gamma_eve):
        return 0.0
    return max(0.0, math.log2(1.0 + gamma_bob) - math.log2(1.0 + gamma_eve))


def analytic_sr(decoder: str, inputs: SinrInputs) -> float:
    """Closed-form secrecy rate: compose the SINR models and the rate difference."""
    return secrecy_rate(sinr_bob(inputs), sinr_eve(decoder, inputs))


def sr_curve(
    decoder: str,
    alphas: np.ndarray,
    bor: int,
    noise_var_bob: float,
    noise_var_eve: float,
) -> np.ndarray:
    """Vectorized analytic secrecy rate over an array of alpha values.

    Matches :func:`analytic_sr` pointwise; used by grid searches and
    figure sweeps. Requires finite positive noise at the legitimate side.
    """
    decoder = normalize_decoder(decoder)
    if noise_var_bob <= 0:
        raise ParameterError("sr_curve needs a positive legitimate noise variance")
    a = np.asarray(alphas, dtype=float)
    u = bor
    g_b = a * (u + 1) / (u * noise_var_bob)
    if decoder == "sds":
        num, den = a / u, noise_var_eve + (1.0 - a) / u
    elif decoder == "mf":
        num, den = a * (u + 3) / u, noise_var_eve + (1.0 - a) / (u + 1)
    else:
        num, den = a / u, noise_var_eve / 2.0 + (1.0 - a) / u
    with np.errstate(divide="ignore"):
        g_e = np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)
        rate = np.log2(1.0 + g_b) - np.log2(1.0 + g_e)
    return np.maximum(rate, 0.0)


# Exact component-power expectations of the decoded (pre-equalization)
# sequences, per receiver and per part. Keys: (link, part) with link in
# {bob, sds, mf, oc} and part in {data, noise, an}.
def component_power(link: str, part: str, inputs: SinrInputs) -> float:
    """Closed-form expectation of a per-symbol component power.

    data : E|data_n|^2 of the decoded data term (includes the alpha weight)
    noise: E|noise_n|^2 (the receiver's own noise variance in all cases)
    an   : E|an_n|^2 of the decoded artificial-noise term
    """
    link = "bob" if link == "bob" else normalize_decoder(link)
    a, u = inputs.alpha, inputs.bor
    table = {
        ("bob", "data"): a * (u + 1) / u,
        ("bob", "noise"): inputs.noise_var_bob,
        ("bob", "an"): 0.0,
        ("sds", "data"): a / u,
        ("sds", "noise"): inputs.noise_var_eve,
        ("sds", "an"): (1.0 - a) / u,
        ("mf", "data"): a * (u + 3) / u,
        ("mf", "noise"): inputs.noise_var_eve,
        ("mf", "an"): (1.0 - a) / (u + 1),
        ("oc", "data"): 2.0 * a / u,
        ("oc", "noise"): inputs.noise_var_eve,
        ("oc", "an"): 2.0 * (1.0 - a) / u,
    }
    try:
        return table[(link, part)]
    except KeyError:
        raise ParameterError(f"unknown component ({link!r}, {part!r})") from None


__all__ = [
    "DECODERS",
    "SinrInputs",
    "analytic_sr",
    "component_power",
    "secrecy_rate",
    "sinr_bob",
    "sinr_eve",
    "sr_curve",
]

"""Receive chains for the legitimate receiver and the eavesdropper.

The legitimate receiver despreads (S^H) and zero-forces by the real
per-symbol gain sqrt(alpha)/U * sum_i |h_B|^2. The eavesdropper applies
one of three decoding structures G before her own zero-forcing step,
depending on what the handshake let her estimate:

    sds : G = S^H                     (despread only, no channel knowledge)
    mf  : G = S^H H_B conj(H_E)       (matched filter on the equivalent channel)
    oc  : G = S^H conj(H_E)           (own-channel knowledge)

Because S has disjoint column supports, G * channel * S is exactly
diagonal in all cases, so zero-forcing is a per-symbol complex division,
never a matrix inversion.

Decoding also exposes the per-symbol data / noise / AN split of the
pre-equalization sequence, obtained by pushing each constituent transmit
signal through the same linear receive operator. The split is the raw
material for SINR estimation; it requires the transmit-side ground truth
(`frame`) and, when available, the drawn noise vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .channel import DiagonalChannel, crandn
from .exceptions import DegenerateTrialError, ParameterError
from .scenario import DECODERS, normalize_decoder
from .txchain import SpreadingMatrix, TransmitFrame

# Zero-forcing gains with modulus below this are treated as degenerate.
ZF_GAIN_FLOOR = 1e-12


@dataclass(frozen=True)
class DecodeComponents:
    """Per-symbol split of the decoded (pre-equalization) sequence.

    data + noise + an reconstructs the despread sequence; at the
    legitimate receiver the AN part is numerically zero by construction.
    """

    data: np.ndarray
    noise: np.ndarray
    an: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.data + self.noise + self.an


def apply_channel(
    x_tr: np.ndarray,
    ch: DiagonalChannel,
    noise_var: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """y_q = h_q * x_tr_q + v_q with v_q ~ CN(0, noise_var)."""
    if noise_var < 0:
        raise ParameterError(f"noise variance must be >= 0, got {noise_var}")
    x_tr = np.asarray(x_tr)
    if x_tr.shape != ch.gains.shape:
        raise ParameterError("transmit vector and channel length mismatch")
    y = ch.gains * x_tr
    if noise_var > 0:
        y = y + np.sqrt(noise_var) * crandn(rng, x_tr.size)
    return y


def _component_split(
    signal_op,
    noise_op,
    spreading: SpreadingMatrix,
    h_bob: DiagonalChannel,
    frame: TransmitFrame,
    decoded_total: np.ndarray,
    noise: Optional[np.ndarray],
) -> DecodeComponents:
    """Split the decoded sequence by pushing each constituent through the
    receive operators.

    `signal_op` carries a transmitted length-Q vector through the
    observer's propagation channel and decoding structure; `noise_op`
    carries the receiver noise through the decoding structure alone. When
    the drawn noise vector is unavailable the noise component falls back
    to the decoded residual.
    """
    if frame.precoded is not None:
        precoded = frame.precoded
    elif frame.data is not None:
        precoded = np.conj(h_bob.gains) * spreading.spread(frame.data)
    else:
        raise ParameterError("frame must carry data or precoded signal for a component split")
    data_part = np.sqrt(frame.alpha) * signal_op(precoded)
    an_part = np.sqrt(1.0 - frame.alpha) * signal_op(frame.an)
    if noise is not None:
        noise_part = noise_op(noise)
    else:
        noise_part = decoded_total - data_part - an_part
    return DecodeComponents(data=data_part, noise=noise_part, an=an_part)


def bob_decode(
    y: np.ndarray,
    spreading: SpreadingMatrix,
    h_bob: DiagonalChannel,
    alpha: float,
    frame: Optional[TransmitFrame] = None,
    noise: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, Optional[DecodeComponents]]:
    """Despread and zero-force at the legitimate receiver.

    The per-symbol gain sqrt(alpha)/U * sum_i |h_B, n+iN|^2 is real and
    positive; alpha = 0 leaves nothing to equalize and is rejected.
    Returns (symbol estimates, component split or None).
    """
    if alpha <= 0.0:
        raise ParameterError("zero-forcing is undefined at alpha = 0 (no data transmitted)")
    z = spreading.despread(y)
    gain = np.sqrt(alpha) * spreading.group_mean(np.abs(h_bob.gains) ** 2)
    if np.any(gain < ZF_GAIN_FLOOR):
        raise DegenerateTrialError("legitimate zero-forcing gain below floor")
    x_hat = z / gain
    comps = None
    if frame is not None:
        comps = _component_split(
            lambda v: spreading.despread(h_bob.gains * v),
            spreading.despread,
            spreading, h_bob, frame, z, noise,
        )
    return x_hat, comps


def _eve_decode_weight(decoder: str, h_bob: DiagonalChannel, h_eve: DiagonalChannel) -> np.ndarray:
    """Per-subcarrier weight g such that G = S^H diag(g)."""
    if decoder == "sds":
        return np.ones_like(h_eve.gains)
    if decoder == "mf":
        return h_bob.gains * np.conj(h_eve.gains)
    return np.conj(h_eve.gains)  # oc


def eve_zf_gain(
    decoder: str,
    spreading: SpreadingMatrix,
    h_bob: DiagonalChannel,
    h_eve: DiagonalChannel,
) -> np.ndarray:
    """Diagonal of G H_E conj(H_B) S: the eavesdropper's per-symbol
    equivalent channel. Complex for sds/oc, real positive for mf."""
    decoder = normalize_decoder(decoder)
    weight = _eve_decode_weight(decoder, h_bob, h_eve)
    return spreading.group_mean(weight * h_eve.gains * np.conj(h_bob.gains))


def eve_decode(
    y: np.ndarray,
    decoder: str,
    spreading: SpreadingMatrix,
    h_bob: DiagonalChannel,
    h_eve: DiagonalChannel,
    alpha: float,
    frame: Optional[TransmitFrame] = None,
    noise: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, Optional[DecodeComponents]]:
    """Apply the eavesdropper decoding structure and zero-force.

    Zero-forcing divides by the per-symbol equivalent channel excluding
    the sqrt(alpha) power weight, so the estimates carry sqrt(alpha) * x
    plus equalized AN and noise residuals. For sds/oc the equivalent
    channel is complex and can come arbitrarily close to zero; such
    realizations raise DegenerateTrialError.
    """
    decoder = normalize_decoder(decoder)
    weight = _eve_decode_weight(decoder, h_bob, h_eve)
    z = spreading.despread(weight * y)  # G y
    gain = eve_zf_gain(decoder, spreading, h_bob, h_eve)
    if np.any(np.abs(gain) < ZF_GAIN_FLOOR):
        raise DegenerateTrialError(f"{decoder} zero-forcing gain below floor")
    x_hat = z / gain
    comps = None
    if frame is not None:
        comps = _component_split(
            lambda v: spreading.despread(weight * h_eve.gains * v),
            lambda v: spreading.despread(weight * v),
            spreading, h_bob, frame, z, noise,
        )
    return x_hat, comps


__all__ = [
    "DECODERS",
    "DecodeComponents",
    "ZF_GAIN_FLOOR",
    "apply_channel",
    "bob_decode",
    "eve_decode",
    "eve_zf_gain",
]

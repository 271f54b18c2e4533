"""Vectorized numpy implementation of the per-trial decode chain.

One call processes a whole batch of trials. For every trial the chain
draws nothing itself: all randomness (channels, symbols, AN seeds, noise)
arrives as arguments, so results are bit-reproducible given the caller's
generators and identical across backends up to floating-point summation
order.

Group layout: subcarrier q = i*N + n carries symbol n as its i-th
replica, so a length-Q vector reshaped to (U, N) has group members along
axis 0. All per-symbol reductions below exploit that layout.

Artificial noise is built per symbol group. The despread-channel row for
group n is a_i = s_{n+iN} h_{B,n+iN} / sqrt(U); a unitary Householder
reflector mapping e_0 onto b = conj(a)/|a| supplies, in its remaining
U-1 columns, an orthonormal basis of the null space of a. Independent
CN(0,1) seeds through that basis, scaled by 1/sqrt(U-1), give AN with
E|w_q|^2 = 1/U that despreads to zero at the legitimate receiver. The
covariance of the result depends only on the null-space projector, so the
construction is statistically identical to an SVD-based basis.

All returned components are unit-scale: the data gain excludes
sqrt(alpha), the AN terms exclude sqrt(1-alpha), and the noise terms are
for unit noise variance. Callers apply the scalings analytically.
"""

import numpy as np

DECODER_ORDER = ("sds", "mf", "oc")


def null_space_an(h_bob_g, signs_g, an_seeds):
    """Per-group null-space AN for a batch.

    Parameters are grouped arrays of shape (T, N, U) for the channel and
    signs and (T, N, U-1) for the CN(0,1) seeds. Returns (T, N, U)
    grouped AN with unit per-symbol energy (scale 1/sqrt(U-1) included).
    """
    u = h_bob_g.shape[-1]
    if u < 2:
        raise ValueError("no AN degrees of freedom for bor < 2")
    a = signs_g * h_bob_g / np.sqrt(u)
    norm = np.linalg.norm(a, axis=-1, keepdims=True)
    b = np.conj(a) / norm
    b0 = b[..., 0]
    mag0 = np.abs(b0)
    phase = np.where(mag0 > 0, b0 / np.where(mag0 > 0, mag0, 1.0), 1.0)
    refl = b.copy()
    refl[..., 0] += phase
    # u^H u = 2 (1 + |b0|) for the reflector direction u = b + phase*e0
    uu = 2.0 * (1.0 + mag0)
    # columns 1..U-1 of (I - 2 u u^H / u^H u) applied to the seeds
    dot = np.einsum("tnu,tnu->tn", np.conj(refl[..., 1:]), an_seeds)
    w = -(2.0 * dot / uu)[..., None] * refl
    w[..., 1:] += an_seeds
    return w / np.sqrt(u - 1)


def run_chain(h_bob, h_eve, an_seeds, v_bob, v_eve, signs, bor):
    """Decode-component chain for a batch of trials.

    Parameters
    ----------
    h_bob, h_eve : (T, Q) complex channel gains.
    an_seeds : (T, Q - N) complex CN(0,1) AN seeds (ignored when bor = 1).
    v_bob, v_eve : (T, Q) unit-variance complex noise.
    signs : (Q,) spreading signs.
    bor : spreading factor U.

    Returns a dict of unit-scale per-symbol arrays, all shaped (T, N)
    unless noted:
      bob_gain  real data gain (1/U) sum_i |h_B|^2 (also the ZF gain / sqrt(alpha))
      bob_noise complex despread noise, unit variance
      bob_an    complex despread AN (numerically zero)
      eve_gain, eve_noise, eve_an : dicts keyed by decoder name
      an : (T, Q) the artificial-noise vector itself
    """
    t, q = h_bob.shape
    u = int(bor)
    n = q // u

    def grouped(arr):
        return arr.reshape(t, u, n).swapaxes(1, 2)  # (T, N, U)

    sg = signs.reshape(u, n).T[None, :, :]  # (1, N, U)
    hb = grouped(h_bob)
    he = grouped(h_eve)
    vb = grouped(v_bob)
    ve = grouped(v_eve)

    if u >= 2:
        w_g = null_space_an(hb, sg, an_seeds.reshape(t, n, u - 1))
    else:
        w_g = np.zeros_like(hb)

    rs_u = 1.0 / np.sqrt(u)
    abs_hb2 = np.abs(hb) ** 2
    abs_he2 = np.abs(he) ** 2

    bob_gain = abs_hb2.mean(axis=-1)
    bob_noise = rs_u * (sg * vb).sum(axis=-1)
    bob_an = rs_u * (sg * hb * w_g).sum(axis=-1)

    eve_gain = {
        "sds": (he * np.conj(hb)).mean(axis=-1),
        "mf": (abs_he2 * abs_hb2).mean(axis=-1) + 0j,
        "oc": (abs_he2 * np.conj(hb)).mean(axis=-1),
    }
    eve_noise = {
        "sds": rs_u * (sg * ve).sum(axis=-1),
        "mf": rs_u * (sg * hb * np.conj(he) * ve).sum(axis=-1),
        "oc": rs_u * (sg * np.conj(he) * ve).sum(axis=-1),
    }
    eve_an = {
        "sds": rs_u * (sg * he * w_g).sum(axis=-1),
        "mf": rs_u * (sg * hb * abs_he2 * w_g).sum(axis=-1),
        "oc": rs_u * (sg * abs_he2 * w_g).sum(axis=-1),
    }

    an_flat = w_g.swapaxes(1, 2).reshape(t, q)
    return {
        "bob_gain": bob_gain,
        "bob_noise": bob_noise,
        "bob_an": bob_an,
        "eve_gain": eve_gain,
        "eve_noise": eve_noise,
        "eve_an": eve_an,
        "an": an_flat,
    }

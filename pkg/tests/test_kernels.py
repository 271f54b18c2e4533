"""Kernel backends: equivalence with each other and with the public ops."""

import numpy as np
import pytest

from fdtr._kernels import backend_name, fallback
from fdtr.channel import DiagonalChannel, crandn
from fdtr.harness import simulate_batch
from fdtr.rxchain import bob_decode, eve_decode, eve_zf_gain
from fdtr.txchain import SpreadingMatrix, assemble_transmit, build_spreading_matrix

try:
    from fdtr._kernels import _core
except ImportError:
    _core = None

needs_core = pytest.mark.skipif(_core is None, reason="compiled kernel not built")


def chain_inputs(t, n, u, seed):
    rng = np.random.default_rng(seed)
    q = n * u
    draws = {
        "h_bob": crandn(rng, t, q),
        "h_eve": crandn(rng, t, q),
        "symbols": crandn(rng, t, n),
        "an_seeds": crandn(rng, t, q - n),
        "v_bob": crandn(rng, t, q),
        "v_eve": crandn(rng, t, q),
    }
    return draws


@needs_core
@pytest.mark.parametrize("n,u", [(4, 2), (8, 4), (4, 8), (16, 1)])
def test_backends_agree(n, u):
    spreading = build_spreading_matrix(n, u, sign_seed=41)
    draws = chain_inputs(40, n, u, seed=5)
    args = (draws["h_bob"], draws["h_eve"], draws["an_seeds"],
            draws["v_bob"], draws["v_eve"])
    a = fallback.run_chain(*args, spreading.signs, u)
    b = _core.run_chain(*args, spreading.signs, u)
    for key in ("bob_gain", "bob_noise", "bob_an", "an"):
        assert np.allclose(a[key], b[key], rtol=1e-12, atol=1e-13), key
    for group in ("eve_gain", "eve_noise", "eve_an"):
        for decoder in ("sds", "mf", "oc"):
            assert np.allclose(
                a[group][decoder], b[group][decoder], rtol=1e-12, atol=1e-13
            ), (group, decoder)


def test_kernel_matches_public_receive_chain(rng):
    """One trial through the batch kernel equals the explicit operator path."""
    n, u = 8, 4
    q = n * u
    spreading = build_spreading_matrix(n, u, sign_seed=42)
    draws = chain_inputs(1, n, u, seed=9)
    h_bob, h_eve, x = draws["h_bob"], draws["h_eve"], draws["symbols"]
    v_bob, v_eve = draws["v_bob"], draws["v_eve"]
    out = fallback.run_chain(h_bob, h_eve, draws["an_seeds"], v_bob, v_eve,
                             spreading.signs, u)

    alpha, nv_b, nv_e = 0.6, 0.04, 0.09
    ch_bob = DiagonalChannel(h_bob[0])
    ch_eve = DiagonalChannel(h_eve[0])
    precoded = np.conj(h_bob[0]) * spreading.spread(x[0])
    frame = assemble_transmit(precoded, out["an"][0], alpha, data=x[0])
    noise_b = np.sqrt(nv_b) * v_bob[0]
    y_bob = h_bob[0] * frame.composite + noise_b
    x_hat, comps = bob_decode(y_bob, spreading, ch_bob, alpha, frame=frame, noise=noise_b)

    assert np.allclose(comps.data, np.sqrt(alpha) * out["bob_gain"][0] * x[0], atol=1e-12)
    assert np.allclose(comps.noise, np.sqrt(nv_b) * out["bob_noise"][0], atol=1e-12)
    assert np.allclose(comps.an, np.sqrt(1 - alpha) * out["bob_an"][0], atol=1e-12)

    noise_e = np.sqrt(nv_e) * v_eve[0]
    y_eve = h_eve[0] * frame.composite + noise_e
    for decoder in ("sds", "mf", "oc"):
        _, ecomps = eve_decode(
            y_eve, decoder, spreading, ch_bob, ch_eve, alpha, frame=frame, noise=noise_e
        )
        assert np.allclose(
            ecomps.data, np.sqrt(alpha) * out["eve_gain"][decoder][0] * x[0], atol=1e-12
        ), decoder
        assert np.allclose(
            ecomps.noise, np.sqrt(nv_e) * out["eve_noise"][decoder][0], atol=1e-12
        ), decoder
        assert np.allclose(
            ecomps.an, np.sqrt(1 - alpha) * out["eve_an"][decoder][0], atol=1e-12
        ), decoder
        assert np.allclose(
            eve_zf_gain(decoder, spreading, ch_bob, ch_eve),
            out["eve_gain"][decoder][0],
            atol=1e-12,
        ), decoder


def test_kernel_an_leakage_floor():
    batch = simulate_batch(8, 4, 2000, rng_seed=77)
    assert np.max(np.abs(batch.bob_an)) < 1e-10


def test_kernel_an_matches_structured_null_space(rng):
    """The grouped Householder basis spans the same null space as the SVD route."""
    n, u = 1, 5
    spreading = SpreadingMatrix(signs=np.ones(u), n_symbols=n, bor=u)
    h = crandn(rng, 1, u)
    # feed unit seeds to expose the basis columns
    cols = []
    for j in range(u - 1):
        seeds = np.zeros((1, u - 1), dtype=complex)
        seeds[0, j] = np.sqrt(u - 1)  # undo the 1/sqrt(U-1) AN scaling
        out = fallback.run_chain(
            h, h, seeds,
            np.zeros((1, u), dtype=complex), np.zeros((1, u), dtype=complex),
            spreading.signs, u,
        )
        cols.append(out["an"][0])
    basis = np.array(cols).T
    assert np.max(np.abs(basis.conj().T @ basis - np.eye(u - 1))) < 1e-12
    from fdtr.txchain import null_space_basis

    svd_basis = null_space_basis(spreading, DiagonalChannel(h[0]))
    proj_struct = basis @ basis.conj().T
    proj_svd = svd_basis @ svd_basis.conj().T
    assert np.max(np.abs(proj_struct - proj_svd)) < 1e-10


def test_batch_trials_are_offset_invariant():
    full = simulate_batch(4, 4, 5, rng_seed=11)
    single = simulate_batch(4, 4, 1, rng_seed=11, trial_offset=3)
    assert np.array_equal(full.h_bob[3], single.h_bob[0])
    assert np.array_equal(full.an[3], single.an[0])
    assert np.array_equal(full.bob_noise[3], single.bob_noise[0])
    assert np.array_equal(full.eve_gain["mf"][3], single.eve_gain["mf"][0])
    # fast fading: every trial sees a fresh realization
    assert not np.array_equal(full.h_bob[0], full.h_bob[1])


def test_backend_name_reports():
    assert backend_name() in ("compiled", "fallback")

"""Spreading structure, precoding, AN null-space construction, energy budget."""

import numpy as np
import pytest

from fdtr.channel import DiagonalChannel, crandn, sample_channel
from fdtr.exceptions import ParameterError
from fdtr.txchain import (
    SpreadingMatrix,
    assemble_transmit,
    build_spreading_matrix,
    despread,
    despread_channel_matrix,
    draw_symbols,
    generate_an,
    null_space_basis,
    spread,
    tr_precode,
)

SIZES = [(1, 1), (2, 2), (4, 4), (3, 5), (16, 4)]


@pytest.mark.parametrize("n,u", SIZES)
def test_columns_are_orthonormal(n, u):
    s = build_spreading_matrix(n, u, sign_seed=3)
    dense = s.as_dense()
    assert np.max(np.abs(dense.T @ dense - np.eye(n))) < 1e-12


@pytest.mark.parametrize("n,u", SIZES)
def test_spread_isometry_and_round_trip(n, u, rng):
    s = build_spreading_matrix(n, u, sign_seed=4)
    x = crandn(rng, n)
    y = spread(x, s)
    assert np.linalg.norm(y) == pytest.approx(np.linalg.norm(x), rel=1e-12)
    assert np.max(np.abs(despread(y, s) - x)) < 1e-12


def test_spread_basis_vector_two_by_two():
    s = SpreadingMatrix(signs=np.ones(4), n_symbols=2, bor=2)
    y = spread(np.array([1.0, 0.0]), s)
    expected = np.array([1 / np.sqrt(2), 0.0, 1 / np.sqrt(2), 0.0])
    assert np.array_equal(y, expected)


def test_unit_size_matrix_is_sign():
    s = build_spreading_matrix(1, 1, sign_seed=0)
    assert s.as_dense().shape == (1, 1)
    assert abs(abs(s.as_dense()[0, 0]) - 1.0) < 1e-15


def test_quadratic_despread_is_exactly_diagonal(rng):
    s = build_spreading_matrix(4, 4, sign_seed=5)
    d = crandn(rng, 16)
    dense = s.as_dense()
    full = dense.conj().T @ np.diag(d) @ dense
    assert np.max(np.abs(full - np.diag(np.diag(full)))) < 1e-12
    assert np.max(np.abs(np.diag(full) - s.group_mean(d))) < 1e-12


def test_spread_dimension_mismatch():
    s = build_spreading_matrix(4, 2, sign_seed=1)
    with pytest.raises(ParameterError):
        spread(np.zeros(5), s)


def test_tr_precode(rng):
    ch = sample_channel(12, rng)
    y = crandn(rng, 12)
    out = tr_precode(y, ch)
    assert np.allclose(np.abs(out), np.abs(ch.gains) * np.abs(y), atol=1e-14)
    ones = DiagonalChannel(np.ones(12, dtype=complex))
    assert np.array_equal(tr_precode(y, ones), y)
    with pytest.raises(ParameterError):
        tr_precode(y[:6], ch)


def test_an_requires_spreading(rng):
    s = build_spreading_matrix(4, 1, sign_seed=2)
    with pytest.raises(ParameterError):
        generate_an(sample_channel(4, rng), s, rng)


def test_an_rejects_rank_deficient_channel(rng):
    from fdtr.exceptions import DegenerateTrialError

    s = build_spreading_matrix(4, 4, sign_seed=12)
    gains = sample_channel(16, rng).gains.copy()
    gains[0::4] = 0.0  # wipe every subcarrier carrying symbol 0
    with pytest.raises(DegenerateTrialError):
        generate_an(DiagonalChannel(gains), s, rng)


def test_an_is_invisible_at_legitimate_receiver(rng):
    s = build_spreading_matrix(8, 4, sign_seed=6)
    worst = 0.0
    for _ in range(300):
        ch = sample_channel(32, rng)
        w = generate_an(ch, s, rng)
        worst = max(worst, np.max(np.abs(despread(ch.gains * w, s))))
    assert worst < 1e-10


def test_an_per_subcarrier_energy(rng):
    s = build_spreading_matrix(8, 4, sign_seed=7)
    total = 0.0
    n_draws = 10_000
    for _ in range(n_draws):
        ch = sample_channel(32, rng)
        w = generate_an(ch, s, rng)
        total += np.mean(np.abs(w) ** 2)
    assert total / n_draws == pytest.approx(0.25, rel=0.02)


def test_an_covariance_matches_null_space_projector(rng):
    # E[w w^H] = P_null / (U - 1) for a fixed channel realization
    s = build_spreading_matrix(4, 4, sign_seed=8)
    ch = sample_channel(16, rng)
    basis = null_space_basis(s, ch)
    proj = basis @ basis.conj().T
    acc = np.zeros((16, 16), dtype=complex)
    n_draws = 20_000
    for _ in range(n_draws):
        w = generate_an(ch, s, rng)
        acc += np.outer(w, np.conj(w))
    emp = acc / n_draws
    assert np.max(np.abs(emp - proj / 3.0)) < 0.02


def test_null_space_basis_shape_and_residual(rng):
    s = build_spreading_matrix(8, 4, sign_seed=9)
    ch = sample_channel(32, rng)
    basis = null_space_basis(s, ch)
    assert basis.shape == (32, 24)
    assert np.max(np.abs(basis.conj().T @ basis - np.eye(24))) < 1e-12
    a = despread_channel_matrix(s, ch)
    assert np.max(np.abs(a @ basis)) < 1e-12


def test_assemble_transmit_extremes(rng):
    precoded = crandn(rng, 16)
    w = crandn(rng, 16)
    assert np.array_equal(assemble_transmit(precoded, w, 1.0).composite, precoded)
    assert np.array_equal(assemble_transmit(precoded, w, 0.0).composite, w)
    with pytest.raises(ParameterError):
        assemble_transmit(precoded, w, 1.5)


@pytest.mark.parametrize("alpha", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_mean_transmit_energy_is_one_per_symbol(alpha):
    # alpha/U from the data replica plus (1-alpha)/U from the AN on each of
    # the U subcarriers per symbol
    rng = np.random.default_rng(99)
    n, u = 8, 4
    s = build_spreading_matrix(n, u, sign_seed=10)
    total = 0.0
    n_trials = 10_000
    for _ in range(n_trials):
        ch = sample_channel(n * u, rng)
        x = draw_symbols(n, rng)
        precoded = tr_precode(spread(x, s), ch)
        w = generate_an(ch, s, rng)
        frame = assemble_transmit(precoded, w, alpha, data=x)
        total += np.sum(np.abs(frame.composite) ** 2) / n
    assert total / n_trials == pytest.approx(1.0, rel=0.02)


def test_draw_symbols_unit_energy(rng):
    x = draw_symbols(4096, rng)
    assert np.allclose(np.abs(x), 1.0)
    x16 = draw_symbols(200_000, rng, order=16)
    assert np.mean(np.abs(x16) ** 2) == pytest.approx(1.0, rel=0.01)
    with pytest.raises(ParameterError):
        draw_symbols(8, rng, order=12)

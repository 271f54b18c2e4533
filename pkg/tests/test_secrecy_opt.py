"""Optimal power splits, required-SNR calibration, waterfilling."""

import math

import numpy as np
import pytest

from fdtr.analytics import SinrInputs, analytic_sr, sr_curve
from fdtr.channel import DiagonalChannel, sample_channel
from fdtr.exceptions import ParameterError
from fdtr.secrecy_opt import (
    WaterfillProblem,
    alpha_infinity,
    alpha_opt,
    per_symbol_gains,
    required_snr_bob,
    required_snr_infinite_eve,
    waterfill,
)
from fdtr.txchain import build_spreading_matrix, generate_an

DECODERS = ("sds", "mf", "oc")


def test_alpha_opt_noiseless_limit_is_half():
    for bor in (2, 4, 8, 16):
        assert alpha_opt("sds", bor, 0.0, 0.0).alpha == pytest.approx(0.5, rel=1e-12)
        assert alpha_opt("oc", bor, 0.0, 0.0).alpha == pytest.approx(0.5, rel=1e-12)


def test_alpha_opt_sds_at_fifteen_db():
    nv = 1.0 / (4 * 10**1.5)
    assert alpha_opt("sds", 4, nv, nv).alpha == pytest.approx(0.5126, abs=1e-3)


def test_alpha_opt_mf_noiseless_bob_limit():
    # the zero-noise branch continues the positive-noise root
    for nv_e in (0.0, 0.05, 0.5):
        limit = alpha_opt("mf", 4, 0.0, nv_e).alpha
        near = alpha_opt("mf", 4, 1e-9, nv_e).alpha
        assert limit == pytest.approx(near, abs=1e-6)
        curve = sr_curve("mf", np.arange(1e-4, 1.0, 1e-4), 4, 1e-9, nv_e)
        assert limit == pytest.approx(
            np.arange(1e-4, 1.0, 1e-4)[np.argmax(curve)], abs=1e-3
        )


def test_alpha_opt_clamps_and_flags():
    split = alpha_opt("sds", 4, 10.0, 0.0)  # overwhelming legitimate noise
    assert split.alpha == 0.0
    assert split.clamped


@pytest.mark.parametrize("decoder", DECODERS)
def test_alpha_opt_matches_grid_argmax(decoder):
    rng = np.random.default_rng(17)
    alphas = np.arange(0.0, 1.0 + 1e-12, 1e-4)
    for _ in range(10):
        bor = int(rng.choice([2, 4, 8, 16]))
        nv_b = 1.0 / (bor * 10 ** (rng.uniform(5, 25) / 10))
        nv_e = 1.0 / (bor * 10 ** (rng.uniform(0, 25) / 10))
        split = alpha_opt(decoder, bor, nv_b, nv_e)
        curve = sr_curve(decoder, alphas, bor, nv_b, nv_e)
        best = curve.max()
        at_formula = sr_curve(decoder, np.array([split.alpha]), bor, nv_b, nv_e)[0]
        assert at_formula >= best - 1e-9
        if best > 1e-6:
            assert abs(split.alpha - alphas[np.argmax(curve)]) <= 1e-3


@pytest.mark.parametrize("decoder", DECODERS)
def test_required_snr_round_trips(decoder):
    rng = np.random.default_rng(18)
    for _ in range(30):
        bor = int(rng.integers(1, 17))
        delta = float(rng.uniform(0.05, 4.0))
        alpha = float(rng.uniform(0.05, 0.95))
        nv_e = float(10 ** rng.uniform(-3, 0.5))
        snr = required_snr_bob(decoder, delta, alpha, bor, nv_e)
        point = SinrInputs(alpha=alpha, bor=bor, noise_var_bob=1.0 / (bor * snr),
                           noise_var_eve=nv_e)
        assert analytic_sr(decoder, point) == pytest.approx(delta, abs=1e-9)


def test_required_snr_rejects_boundary_alpha():
    for alpha in (0.0, 1.0):
        with pytest.raises(ParameterError):
            required_snr_bob("sds", 1.0, alpha, 4, 0.0)


def test_sds_and_oc_required_snr_coincide_at_zero_eve_noise():
    for delta, alpha, bor in ((0.5, 0.3, 2), (1.0, 0.5, 4), (2.5, 0.7, 8)):
        sds = required_snr_bob("sds", delta, alpha, bor, 0.0)
        oc = required_snr_bob("oc", delta, alpha, bor, 0.0)
        assert sds == pytest.approx(oc, rel=1e-12)


def test_alpha_infinity_values():
    assert alpha_infinity("sds", 1.0, 4) == pytest.approx(math.sqrt(2.0) - 1.0, rel=1e-12)
    assert alpha_infinity("mf", 0.75, 8) == pytest.approx(0.1533, abs=1e-3)
    for decoder in DECODERS:
        assert alpha_infinity(decoder, 0.0, 8) == 0.0


def test_alpha_infinity_sds_equals_oc():
    for delta in np.linspace(0.1, 3.0, 10):
        assert alpha_infinity("sds", delta, 4) == alpha_infinity("oc", delta, 4)


def test_required_snr_infinite_eve_headline_points():
    snr = required_snr_infinite_eve("mf", 0.75, 8)
    assert snr == pytest.approx(3.2253, abs=0.01)
    assert 10 * math.log10(snr) == pytest.approx(5.08, abs=0.05)
    assert 10 * math.log10(required_snr_infinite_eve("mf", 2.2, 8)) == pytest.approx(
        9.95, abs=0.05
    )
    assert required_snr_infinite_eve("sds", 0.0, 8) == 0.0


@pytest.mark.parametrize("decoder", DECODERS)
def test_alpha_infinity_minimizes_required_snr(decoder):
    for delta, bor in ((0.5, 4), (1.5, 8)):
        a_star = alpha_infinity(decoder, delta, bor)
        best = required_snr_bob(decoder, delta, a_star, bor, 0.0)
        for da in (-0.01, 0.01):
            a = min(max(a_star + da, 1e-6), 1 - 1e-6)
            assert required_snr_bob(decoder, delta, a, bor, 0.0) >= best - 1e-12


def test_required_snr_monotone_in_target_and_bor():
    deltas = np.linspace(0.2, 3.0, 12)
    for decoder in DECODERS:
        values = [required_snr_infinite_eve(decoder, d, 8) for d in deltas]
        assert all(b > a for a, b in zip(values, values[1:]))
    for bor_small, bor_big in ((2, 4), (4, 8), (8, 16)):
        assert required_snr_infinite_eve("mf", 1.0, bor_big) < required_snr_infinite_eve(
            "mf", 1.0, bor_small
        )


def test_mf_alpha_infinity_increases_with_target():
    deltas = np.linspace(0.1, 3.0, 15)
    values = [alpha_infinity("mf", d, 8) for d in deltas]
    assert all(b > a for a, b in zip(values, values[1:]))


# ---------------------------------------------------------------------------
#  Waterfilling
# ---------------------------------------------------------------------------

def make_problem(n, u, seed, alpha_init=0.55, channel=None):
    s = build_spreading_matrix(n, u, sign_seed=31)
    ch = channel or sample_channel(n * u, np.random.default_rng(seed))
    w = generate_an(ch, s, np.random.default_rng(seed + 1))
    return WaterfillProblem(h_bob=ch, spreading=s, an=w, alpha_init=alpha_init), s, ch


def test_waterfill_problem_validation(rng):
    s = build_spreading_matrix(4, 4, sign_seed=32)
    ch = sample_channel(16, rng)
    w = generate_an(ch, s, rng)
    for bad_alpha in (0.0, 1.0):
        with pytest.raises(ParameterError):
            WaterfillProblem(h_bob=ch, spreading=s, an=w, alpha_init=bad_alpha)
    with pytest.raises(ParameterError):
        WaterfillProblem(h_bob=ch, spreading=s, an=w[:8], alpha_init=0.5)
    with pytest.raises(ParameterError):
        WaterfillProblem(h_bob=ch, spreading=s, an=w, alpha_init=0.5, epsilon=0.0)


def test_waterfill_flat_channel_has_no_headroom():
    flat = DiagonalChannel(np.ones(32, dtype=complex))
    problem, _, _ = make_problem(8, 4, seed=50, alpha_init=0.5, channel=flat)
    solution = waterfill(problem)
    assert solution.objective_gain < 1e-3
    assert max(solution.constraint_residuals) <= problem.epsilon


@pytest.mark.parametrize("seed", [60, 61, 62])
def test_waterfill_random_channels(seed):
    problem, s, ch = make_problem(8, 4, seed=seed)
    solution = waterfill(problem)
    assert solution.alpha.shape == (32,)
    assert np.all(solution.alpha >= 0.0) and np.all(solution.alpha <= 1.0)
    assert solution.objective_gain >= -1e-9
    assert max(solution.constraint_residuals) <= problem.epsilon
    # fading channels always leave reallocation headroom
    assert solution.objective_gain > 0.01
    # the AN stays invisible after reallocation
    assert solution.constraint_residuals[0] <= problem.epsilon


def test_waterfill_bor_two_rank_deficient_groups():
    problem, _, _ = make_problem(8, 2, seed=70)
    solution = waterfill(problem)
    assert solution.converged
    assert solution.objective_gain > 0.0
    assert max(solution.constraint_residuals) <= problem.epsilon


def test_per_symbol_gains_matches_uniform_split(rng):
    s = build_spreading_matrix(8, 4, sign_seed=33)
    ch = sample_channel(32, rng)
    uniform = per_symbol_gains(s, ch, 0.49)
    expected = math.sqrt(0.49) * s.group_mean(np.abs(ch.gains) ** 2)
    assert np.allclose(uniform, expected, atol=1e-14)

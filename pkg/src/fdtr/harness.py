"""Seeded Monte Carlo experiment harness.

Experiments run as batches of independent trials. Trial i of a run draws
everything it needs (both channels, data symbols, AN seeds, both noise
vectors) from a generator seeded with (master seed, i), so results are
reproducible and independent of execution order or batching. The batch
kernel returns unit-scale decode components: the data gain without
sqrt(alpha), the AN terms without sqrt(1 - alpha) and the noise terms at
unit variance. Operating points (alpha, SNRs) are applied analytically
afterwards, which makes parameter sweeps over a shared batch exact and
cheap.

Empirical conventions:

* mean SINR is the ratio of the mean data power to the mean
  noise-plus-AN power, pooled over trials and symbols (the estimator the
  analytic models approximate);
* the per-trial SINR pools over the symbols of that trial, and the
  per-trial secrecy rate is log2(1+g_B) - log2(1+g_E);
* the reported ergodic secrecy rate clamps each trial at zero before
  averaging; the unclamped mean and the log2(1 + mean SINR) form are
  reported alongside, with their gap.

Degenerate trials (any per-symbol zero-forcing gain below the floor) are
excluded from the averages and counted.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, fields
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import analytics, secrecy_opt
from ._kernels import run_chain
from .channel import DiagonalChannel, crandn, trial_rng
from .exceptions import ParameterError
from .rxchain import ZF_GAIN_FLOOR
from .scenario import (
    DECODERS,
    ScenarioConfig,
    db_to_linear,
    linear_to_db,
    normalize_decoder,
)
from .txchain import SpreadingMatrix, build_spreading_matrix, draw_symbols

# Dedicated stream tag for the spreading-sign seed, shared by transmitter
# and receivers of a scenario.
SIGN_SEED_TAG = 0x5349474E


def sign_seed_for(master_seed: int) -> int:
    return int(np.random.default_rng([int(master_seed), SIGN_SEED_TAG]).integers(0, 2**63))


# ---------------------------------------------------------------------------
#  Trial batches
# ---------------------------------------------------------------------------

@dataclass
class TrialBatch:
    """Unit-scale decode components for a batch of channel realizations."""

    n_symbols: int
    bor: int
    rng_seed: int
    spreading: SpreadingMatrix
    symbols: np.ndarray                  # (T, N) complex
    h_bob: np.ndarray                    # (T, Q) complex
    an: np.ndarray                       # (T, Q) complex, unit AN vector
    bob_gain: np.ndarray                 # (T, N) real
    bob_noise: np.ndarray                # (T, N) complex, unit variance
    bob_an: np.ndarray                   # (T, N) complex
    eve_gain: Dict[str, np.ndarray]
    eve_noise: Dict[str, np.ndarray]
    eve_an: Dict[str, np.ndarray]

    @property
    def n_trials(self) -> int:
        return self.symbols.shape[0]

    def degenerate_mask(self, decoder: str) -> np.ndarray:
        """Trials with any unit-scale per-symbol zero-forcing gain below
        the floor (alpha-independent, so a sweep shares one mask)."""
        decoder = normalize_decoder(decoder)
        bad_bob = self.bob_gain.min(axis=1) < ZF_GAIN_FLOOR
        bad_eve = np.abs(self.eve_gain[decoder]).min(axis=1) < ZF_GAIN_FLOOR
        return bad_bob | bad_eve


def draw_trial_inputs(n_symbols: int, bor: int, rng: np.random.Generator):
    """Fixed-order random draws for one trial."""
    q = n_symbols * bor
    h_bob = crandn(rng, q)
    h_eve = crandn(rng, q)
    symbols = draw_symbols(n_symbols, rng)
    an_seeds = crandn(rng, q - n_symbols)
    v_bob = crandn(rng, q)
    v_eve = crandn(rng, q)
    return h_bob, h_eve, symbols, an_seeds, v_bob, v_eve


def simulate_batch(
    n_symbols: int,
    bor: int,
    n_trials: int,
    rng_seed: int,
    trial_offset: int = 0,
) -> TrialBatch:
    """Draw and decode `n_trials` independent realizations.

    Trial indices run from trial_offset; index i always reproduces the
    same record regardless of how trials are grouped into batches.
    """
    if n_trials < 1:
        raise ParameterError("n_trials must be >= 1")
    q = n_symbols * bor
    h_bob = np.empty((n_trials, q), dtype=np.complex128)
    h_eve = np.empty((n_trials, q), dtype=np.complex128)
    symbols = np.empty((n_trials, n_symbols), dtype=np.complex128)
    an_seeds = np.empty((n_trials, q - n_symbols), dtype=np.complex128)
    v_bob = np.empty((n_trials, q), dtype=np.complex128)
    v_eve = np.empty((n_trials, q), dtype=np.complex128)
    for i in range(n_trials):
        rng = trial_rng(rng_seed, trial_offset + i)
        h_bob[i], h_eve[i], symbols[i], an_seeds[i], v_bob[i], v_eve[i] = draw_trial_inputs(
            n_symbols, bor, rng
        )
    spreading = build_spreading_matrix(n_symbols, bor, sign_seed_for(rng_seed))
    out = run_chain(h_bob, h_eve, an_seeds, v_bob, v_eve, spreading.signs, bor)
    return TrialBatch(
        n_symbols=n_symbols,
        bor=bor,
        rng_seed=rng_seed,
        spreading=spreading,
        symbols=symbols,
        h_bob=h_bob,
        an=out["an"],
        bob_gain=out["bob_gain"],
        bob_noise=out["bob_noise"],
        bob_an=out["bob_an"],
        eve_gain=out["eve_gain"],
        eve_noise=out["eve_noise"],
        eve_an=out["eve_an"],
    )


# ---------------------------------------------------------------------------
#  Metrics at an operating point
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class McMetrics:
    """Aggregated Monte Carlo metrics for one (alpha, SNRs, decoder) point."""

    sinr_bob: float
    sinr_eve: float
    sr_clamped: float          # mean of per-trial [rate]^+
    sr_unclamped: float        # mean of per-trial rate
    sr_from_mean_sinr: float   # [log2(1 + mean g_B) - log2(1 + mean g_E)]^+
    sr_gap: float              # |[mean rate]^+ - sr_from_mean_sinr|
    component_means: Dict[str, Dict[str, float]]
    n_used: int
    degenerate_count: int


def _pooled_sinr(data_pow: np.ndarray, interference_pow: np.ndarray) -> np.ndarray:
    num = data_pow.sum(axis=1)
    den = interference_pow.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)
    return np.where((den == 0) & (num == 0), 0.0, out)


def evaluate_batch(
    batch: TrialBatch,
    alpha: float,
    noise_var_bob: float,
    noise_var_eve: float,
    decoder: str,
) -> McMetrics:
    """Scale the unit components to an operating point and aggregate."""
    decoder = normalize_decoder(decoder)
    if not 0.0 <= alpha <= 1.0:
        raise ParameterError(f"alpha must lie in [0, 1], got {alpha}")
    if noise_var_bob <= 0:
        raise ParameterError("empirical secrecy metrics need a finite legitimate SNR")
    keep = ~batch.degenerate_mask(decoder)
    n_used = int(keep.sum())
    if n_used == 0:
        raise ParameterError("all trials degenerate; cannot aggregate")

    sqrt_a, sqrt_an = math.sqrt(alpha), math.sqrt(1.0 - alpha)
    x = batch.symbols[keep]
    data_b = sqrt_a * batch.bob_gain[keep] * x
    resid_b = math.sqrt(noise_var_bob) * batch.bob_noise[keep] + sqrt_an * batch.bob_an[keep]
    data_e = sqrt_a * batch.eve_gain[decoder][keep] * x
    resid_e = (
        math.sqrt(noise_var_eve) * batch.eve_noise[decoder][keep]
        + sqrt_an * batch.eve_an[decoder][keep]
    )

    pd_b, pi_b = np.abs(data_b) ** 2, np.abs(resid_b) ** 2
    pd_e, pi_e = np.abs(data_e) ** 2, np.abs(resid_e) ** 2

    sinr_bob = float(pd_b.mean() / pi_b.mean())
    mean_pi_e = pi_e.mean()
    sinr_eve = float(pd_e.mean() / mean_pi_e) if mean_pi_e > 0 else math.inf

    g_b = _pooled_sinr(pd_b, pi_b)
    g_e = _pooled_sinr(pd_e, pi_e)
    with np.errstate(invalid="ignore"):
        rates = np.log2(1.0 + g_b) - np.log2(1.0 + g_e)
    sr_clamped = float(np.maximum(rates, 0.0).mean())
    sr_unclamped = float(rates.mean())
    if math.isinf(sinr_eve):
        sr_from_mean = 0.0
    else:
        sr_from_mean = max(0.0, math.log2(1.0 + sinr_bob) - math.log2(1.0 + sinr_eve))
    sr_gap = abs(max(0.0, sr_unclamped) - sr_from_mean)

    comp = {
        "bob": {
            "data": float(pd_b.mean()),
            "noise": float(noise_var_bob * (np.abs(batch.bob_noise[keep]) ** 2).mean()),
            "an": float((1.0 - alpha) * (np.abs(batch.bob_an[keep]) ** 2).mean()),
        },
        "eve": {
            "data": float(pd_e.mean()),
            "noise": float(noise_var_eve * (np.abs(batch.eve_noise[decoder][keep]) ** 2).mean()),
            "an": float((1.0 - alpha) * (np.abs(batch.eve_an[decoder][keep]) ** 2).mean()),
        },
    }
    return McMetrics(
        sinr_bob=sinr_bob,
        sinr_eve=sinr_eve,
        sr_clamped=sr_clamped,
        sr_unclamped=sr_unclamped,
        sr_from_mean_sinr=sr_from_mean,
        sr_gap=sr_gap,
        component_means=comp,
        n_used=n_used,
        degenerate_count=int(batch.n_trials - n_used),
    )


# ---------------------------------------------------------------------------
#  Single trials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrialRecord:
    """One full transmit/receive pass at a configured operating point."""

    sinr_bob: float
    sinr_eve: float
    secrecy_rate: Optional[float]        # None when the legitimate SINR is infinite
    bob_components: Dict[str, np.ndarray]
    eve_components: Dict[str, np.ndarray]
    x_hat_bob: Optional[np.ndarray]
    x_hat_eve: Optional[np.ndarray]
    symbols: np.ndarray
    degenerate: bool
    waterfill: Optional[secrecy_opt.WaterfillSolution] = None


def run_trial(
    cfg: ScenarioConfig,
    trial_index: int,
    with_waterfill: bool = False,
) -> TrialRecord:
    """Deterministic single trial: fresh channels, AN, noise, decode, metrics."""
    batch = simulate_batch(cfg.n_symbols, cfg.bor, 1, cfg.rng_seed, trial_offset=trial_index)
    decoder = cfg.decoder
    alpha = cfg.alpha
    nv_b, nv_e = cfg.noise_var_bob, cfg.noise_var_eve
    sqrt_a, sqrt_an = math.sqrt(alpha), math.sqrt(1.0 - alpha)

    x = batch.symbols[0]
    bob = {
        "data": sqrt_a * batch.bob_gain[0] * x,
        "noise": math.sqrt(nv_b) * batch.bob_noise[0],
        "an": sqrt_an * batch.bob_an[0],
    }
    eve = {
        "data": sqrt_a * batch.eve_gain[decoder][0] * x,
        "noise": math.sqrt(nv_e) * batch.eve_noise[decoder][0],
        "an": sqrt_an * batch.eve_an[decoder][0],
    }

    def pooled(parts):
        num = float(np.sum(np.abs(parts["data"]) ** 2))
        den = float(np.sum(np.abs(parts["noise"] + parts["an"]) ** 2))
        if den == 0:
            return math.inf if num > 0 else 0.0
        return num / den

    g_b, g_e = pooled(bob), pooled(eve)
    if math.isinf(g_b):
        rate = None
    elif math.isinf(g_e):
        rate = 0.0
    else:
        rate = max(0.0, math.log2(1.0 + g_b) - math.log2(1.0 + g_e))

    degenerate = bool(batch.degenerate_mask(decoder)[0])
    x_hat_bob = None
    if alpha > 0 and not degenerate:
        x_hat_bob = (bob["data"] + bob["noise"] + bob["an"]) / (sqrt_a * batch.bob_gain[0])
    x_hat_eve = None
    if not degenerate:
        x_hat_eve = (eve["data"] + eve["noise"] + eve["an"]) / batch.eve_gain[decoder][0]

    wf = None
    if with_waterfill and not degenerate:
        split = secrecy_opt.alpha_opt(decoder, cfg.bor, nv_b, nv_e)
        alpha0 = min(max(split.alpha, 0.02), 0.98)
        wf = secrecy_opt.waterfill(
            secrecy_opt.WaterfillProblem(
                h_bob=DiagonalChannel(batch.h_bob[0]),
                spreading=batch.spreading,
                an=batch.an[0],
                alpha_init=alpha0,
            )
        )
    return TrialRecord(
        sinr_bob=g_b,
        sinr_eve=g_e,
        secrecy_rate=rate,
        bob_components=bob,
        eve_components=eve,
        x_hat_bob=x_hat_bob,
        x_hat_eve=x_hat_eve,
        symbols=x,
        degenerate=degenerate,
        waterfill=wf,
    )


# ---------------------------------------------------------------------------
#  Waterfilling gain over a batch
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WaterfillSummary:
    alpha_init: float
    mean_sr_gain: float
    max_leakage: float
    max_energy_residual: float
    max_an_residual: float
    n_solves: int
    n_converged: int


def pooled_rate(gains: np.ndarray, noise_var_bob: float) -> float:
    """Legitimate capacity from the symbol-pooled SINR of one realization.

    Matches the per-trial SINR convention used throughout the harness
    (mean data power over mean noise power); the reallocation objective
    maximizes exactly this pooled SINR, so its rate gain is nonnegative
    by construction.
    """
    return float(np.log2(1.0 + np.mean(gains**2) / noise_var_bob))


def waterfill_gain(
    batch: TrialBatch,
    decoder: str,
    noise_var_bob: float,
    noise_var_eve: float,
    n_solves: int,
) -> WaterfillSummary:
    """Solve the per-realization reallocation on a subsample of trials.

    The secrecy-rate gain per realization is the legitimate-capacity gain:
    the eavesdropper's ergodic statistics are untouched by construction
    (unchanged AN vector, AN energy and total energy).
    """
    decoder = normalize_decoder(decoder)
    if noise_var_bob <= 0:
        raise ParameterError("waterfilling gain needs a finite legitimate SNR")
    split = secrecy_opt.alpha_opt(decoder, batch.bor, noise_var_bob, noise_var_eve)
    alpha0 = min(max(split.alpha, 0.02), 0.98)
    keep = np.flatnonzero(~batch.degenerate_mask(decoder))[: int(n_solves)]
    if keep.size == 0:
        raise ParameterError("no usable trials for waterfilling")
    gains0 = math.sqrt(alpha0) * batch.bob_gain  # (T, N): uniform split amplitudes
    sr_gains, leaks, e_res, an_res, conv = [], [], [], [], 0
    for t in keep:
        h_t = DiagonalChannel(batch.h_bob[t])
        sol = secrecy_opt.waterfill(
            secrecy_opt.WaterfillProblem(
                h_bob=h_t,
                spreading=batch.spreading,
                an=batch.an[t],
                alpha_init=alpha0,
            )
        )
        gains_after = secrecy_opt.per_symbol_gains(batch.spreading, h_t, sol.alpha)
        gain = pooled_rate(gains_after, noise_var_bob) - pooled_rate(
            gains0[t], noise_var_bob
        )
        sr_gains.append(gain)
        leaks.append(sol.constraint_residuals[0])
        e_res.append(sol.constraint_residuals[1])
        an_res.append(sol.constraint_residuals[2])
        conv += int(sol.converged)
    return WaterfillSummary(
        alpha_init=alpha0,
        mean_sr_gain=float(np.mean(sr_gains)),
        max_leakage=float(np.max(leaks)),
        max_energy_residual=float(np.max(e_res)),
        max_an_residual=float(np.max(an_res)),
        n_solves=int(keep.size),
        n_converged=conv,
    )


# ---------------------------------------------------------------------------
#  Sweeps
# ---------------------------------------------------------------------------

SWEEP_VARIABLES = ("alpha", "bor", "snr_bob", "delta_target")


@dataclass(frozen=True)
class SweepSpec:
    """A one-dimensional experiment sweep."""

    variable: str
    grid: Sequence[float]
    fixed: ScenarioConfig = field(default_factory=ScenarioConfig)
    decoders: Sequence[str] = DECODERS
    include_waterfill: bool = False
    waterfill_trials: int = 100

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ParameterError(
                f"unknown sweep variable {self.variable!r}; expected one of {SWEEP_VARIABLES}"
            )
        grid = [float(v) for v in self.grid]
        if not grid:
            raise ParameterError("sweep grid must be nonempty")
        diffs = np.diff(grid)
        if len(grid) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ParameterError("sweep grid must be strictly monotone")
        object.__setattr__(self, "grid", tuple(grid))
        object.__setattr__(
            self, "decoders", tuple(normalize_decoder(d) for d in self.decoders)
        )
        if not self.decoders:
            raise ParameterError("at least one decoder required")


@dataclass(frozen=True)
class ResultRow:
    """One aggregated sweep point. Field order defines the CSV schema."""

    sweep_variable: str
    sweep_value: float
    decoder: str
    alpha: float
    an_fraction: float
    sr_emp: float
    sr_emp_unclamped: float
    sr_from_mean_sinr: float
    sr_gap: float
    sr_analytic: float
    sinr_bob_emp: float
    sinr_bob_analytic: float
    sinr_eve_emp: float
    sinr_eve_analytic: float
    waterfill_gain: Optional[float]
    n_trials: int
    degenerate_count: int


@dataclass(frozen=True)
class CalibrationRow:
    """Guaranteed-secrecy calibration point (analytic, no Monte Carlo)."""

    sweep_variable: str
    sweep_value: float
    decoder: str
    bor: int
    alpha_inf: float
    an_fraction_inf: float
    required_snr_linear: float
    required_snr_db: float


def _mc_row(
    spec: SweepSpec,
    sweep_value: float,
    decoder: str,
    batch: TrialBatch,
    alpha: float,
    nv_b: float,
    nv_e: float,
    wf: Optional[WaterfillSummary],
) -> ResultRow:
    metrics = evaluate_batch(batch, alpha, nv_b, nv_e, decoder)
    inp = analytics.SinrInputs(
        alpha=alpha, bor=batch.bor, noise_var_bob=nv_b, noise_var_eve=nv_e
    )
    return ResultRow(
        sweep_variable=spec.variable,
        sweep_value=sweep_value,
        decoder=decoder,
        alpha=alpha,
        an_fraction=1.0 - alpha,
        sr_emp=metrics.sr_clamped,
        sr_emp_unclamped=metrics.sr_unclamped,
        sr_from_mean_sinr=metrics.sr_from_mean_sinr,
        sr_gap=metrics.sr_gap,
        sr_analytic=analytics.analytic_sr(decoder, inp),
        sinr_bob_emp=metrics.sinr_bob,
        sinr_bob_analytic=analytics.sinr_bob(inp),
        sinr_eve_emp=metrics.sinr_eve,
        sinr_eve_analytic=analytics.sinr_eve(decoder, inp),
        waterfill_gain=None if wf is None else wf.mean_sr_gain,
        n_trials=batch.n_trials,
        degenerate_count=metrics.degenerate_count,
    )


def run_sweep(spec: SweepSpec) -> List:
    """Run the Monte Carlo (or analytic) sweep and aggregate one row per
    (grid value, decoder)."""
    cfg = spec.fixed
    rows: List = []

    if spec.variable == "delta_target":
        for value in spec.grid:
            for decoder in spec.decoders:
                a_inf = secrecy_opt.alpha_infinity(decoder, value, cfg.bor)
                snr = secrecy_opt.required_snr_infinite_eve(decoder, value, cfg.bor)
                rows.append(
                    CalibrationRow(
                        sweep_variable=spec.variable,
                        sweep_value=value,
                        decoder=decoder,
                        bor=cfg.bor,
                        alpha_inf=a_inf,
                        an_fraction_inf=1.0 - a_inf,
                        required_snr_linear=snr,
                        required_snr_db=linear_to_db(snr) if snr > 0 else -math.inf,
                    )
                )
        return rows

    nv_b, nv_e = cfg.noise_var_bob, cfg.noise_var_eve

    if spec.variable == "alpha":
        batch = simulate_batch(cfg.n_symbols, cfg.bor, cfg.n_trials, cfg.rng_seed)
        wf_cache: Dict[str, Optional[WaterfillSummary]] = {}
        for decoder in spec.decoders:
            wf_cache[decoder] = (
                waterfill_gain(batch, decoder, nv_b, nv_e, spec.waterfill_trials)
                if spec.include_waterfill
                else None
            )
        for value in spec.grid:
            for decoder in spec.decoders:
                rows.append(
                    _mc_row(spec, value, decoder, batch, value, nv_b, nv_e, wf_cache[decoder])
                )
        return rows

    if spec.variable == "snr_bob":
        batch = simulate_batch(cfg.n_symbols, cfg.bor, cfg.n_trials, cfg.rng_seed)
        for value in spec.grid:
            nv_b_point = 1.0 / (cfg.bor * db_to_linear(value))
            for decoder in spec.decoders:
                wf = (
                    waterfill_gain(batch, decoder, nv_b_point, nv_e, spec.waterfill_trials)
                    if spec.include_waterfill
                    else None
                )
                rows.append(
                    _mc_row(spec, value, decoder, batch, cfg.alpha, nv_b_point, nv_e, wf)
                )
        return rows

    # bor sweep: a fresh batch per BOR value (noise variances follow the BOR)
    for value in spec.grid:
        bor = int(value)
        if bor != value or bor < 1:
            raise ParameterError(f"bor grid values must be positive integers, got {value}")
        point = cfg.replace(bor=bor)
        batch = simulate_batch(point.n_symbols, bor, point.n_trials, point.rng_seed)
        for decoder in spec.decoders:
            wf = (
                waterfill_gain(
                    batch, decoder, point.noise_var_bob, point.noise_var_eve,
                    spec.waterfill_trials,
                )
                if spec.include_waterfill
                else None
            )
            rows.append(
                _mc_row(
                    spec, value, decoder, batch, point.alpha,
                    point.noise_var_bob, point.noise_var_eve, wf,
                )
            )
    return rows


def simulate_point(
    cfg: ScenarioConfig,
    include_waterfill: bool = False,
    waterfill_trials: int = 100,
):
    """One operating point: returns ([ResultRow], waterfill summary or None)."""
    batch = simulate_batch(cfg.n_symbols, cfg.bor, cfg.n_trials, cfg.rng_seed)
    nv_b, nv_e = cfg.noise_var_bob, cfg.noise_var_eve
    summary = (
        waterfill_gain(batch, cfg.decoder, nv_b, nv_e, waterfill_trials)
        if include_waterfill
        else None
    )
    spec = SweepSpec(variable="alpha", grid=[cfg.alpha], fixed=cfg, decoders=(cfg.decoder,))
    row = _mc_row(spec, cfg.alpha, cfg.decoder, batch, cfg.alpha, nv_b, nv_e, summary)
    return [row], summary


def load_sweep_spec(path: str, **overrides) -> SweepSpec:
    """Read a sweep description from a TOML file.

    Top-level keys: variable, grid, decoders, include_waterfill,
    waterfill_trials; the [fixed] table holds ScenarioConfig keys.
    """
    import sys

    if sys.version_info >= (3, 11):
        import tomllib
    else:
        import tomli as tomllib
    from .scenario import config_from_mapping

    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    fixed = config_from_mapping(data.pop("fixed", {}))
    merged = {**data, **{k: v for k, v in overrides.items() if v is not None}}
    try:
        return SweepSpec(fixed=fixed, **merged)
    except TypeError as exc:
        raise ParameterError(f"bad sweep specification: {exc}") from exc


# ---------------------------------------------------------------------------
#  Bundled experiment presets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OptimalSplitRow:
    """Optimal power split per BOR: analytic closed form vs empirical argmax."""

    sweep_variable: str
    sweep_value: float
    decoder: str
    alpha_opt_analytic: float
    alpha_opt_empirical: float
    sr_emp_at_analytic_opt: float
    sr_emp_max: float
    sr_analytic_at_opt: float
    n_trials: int


@dataclass(frozen=True)
class WaterfillRow:
    """Per-realization power-allocation gain summary for one (BOR, decoder)."""

    sweep_variable: str
    sweep_value: float
    decoder: str
    alpha_init: float
    mean_sr_gain: float
    max_leakage: float
    max_energy_residual: float
    max_an_residual: float
    n_solves: int
    n_converged: int


FIGURE_IDS = (2, 3, 4, 5)


def reproduce_figure(
    figure_id: int,
    n_trials: Optional[int] = None,
    waterfill_trials: Optional[int] = None,
    rng_seed: int = 12345,
) -> List:
    """Bundled experiment presets.

    2: secrecy rate vs injected AN fraction, all decoders (10 dB, BOR 4).
    3: optimal power split and resulting rate vs BOR (15 dB).
    4: guaranteed-secrecy calibration vs target rate, noiseless
       eavesdropper (analytic only, MF decoder).
    5: per-realization waterfilling gain vs BOR (15 dB).
    """
    if figure_id == 2:
        an_fractions = np.round(np.arange(0.0, 1.0001, 0.05), 10)
        alphas = np.round(1.0 - an_fractions, 10)[::-1]  # increasing alpha grid
        spec = SweepSpec(
            variable="alpha",
            grid=alphas.tolist(),
            fixed=ScenarioConfig(
                n_symbols=64, bor=4, snr_bob_db=10.0, snr_eve_db=10.0,
                n_trials=n_trials or 1000, rng_seed=rng_seed,
            ),
        )
        return run_sweep(spec)

    if figure_id == 3:
        rows: List = []
        alphas = np.round(np.arange(0.01, 0.995, 0.01), 10)
        for bor in (2, 4, 8, 16):
            cfg = ScenarioConfig(
                n_symbols=64, bor=bor, snr_bob_db=15.0, snr_eve_db=15.0,
                n_trials=n_trials or 1000, rng_seed=rng_seed,
            )
            batch = simulate_batch(cfg.n_symbols, bor, cfg.n_trials, cfg.rng_seed)
            nv_b, nv_e = cfg.noise_var_bob, cfg.noise_var_eve
            for decoder in DECODERS:
                sr_emp = np.array(
                    [
                        evaluate_batch(batch, a, nv_b, nv_e, decoder).sr_clamped
                        for a in alphas
                    ]
                )
                split = secrecy_opt.alpha_opt(decoder, bor, nv_b, nv_e)
                inp = analytics.SinrInputs(
                    alpha=split.alpha, bor=bor, noise_var_bob=nv_b, noise_var_eve=nv_e
                )
                at_analytic = evaluate_batch(
                    batch, split.alpha, nv_b, nv_e, decoder
                ).sr_clamped
                rows.append(
                    OptimalSplitRow(
                        sweep_variable="bor",
                        sweep_value=float(bor),
                        decoder=decoder,
                        alpha_opt_analytic=split.alpha,
                        alpha_opt_empirical=float(alphas[int(np.argmax(sr_emp))]),
                        sr_emp_at_analytic_opt=at_analytic,
                        sr_emp_max=float(sr_emp.max()),
                        sr_analytic_at_opt=analytics.analytic_sr(decoder, inp),
                        n_trials=batch.n_trials,
                    )
                )
        return rows

    if figure_id == 4:
        deltas = np.round(np.arange(0.05, 3.0001, 0.05), 10)
        rows = []
        for bor in (2, 4, 8, 16):
            spec = SweepSpec(
                variable="delta_target",
                grid=deltas.tolist(),
                fixed=ScenarioConfig(bor=bor, rng_seed=rng_seed),
                decoders=("mf",),
            )
            rows.extend(run_sweep(spec))
        return rows

    if figure_id == 5:
        rows = []
        for bor in (2, 4, 8):
            cfg = ScenarioConfig(
                n_symbols=8, bor=bor, snr_bob_db=15.0, snr_eve_db=15.0,
                n_trials=n_trials or 1000, rng_seed=rng_seed,
            )
            batch = simulate_batch(cfg.n_symbols, bor, cfg.n_trials, cfg.rng_seed)
            for decoder in DECODERS:
                summary = waterfill_gain(
                    batch, decoder, cfg.noise_var_bob, cfg.noise_var_eve,
                    waterfill_trials or 100,
                )
                rows.append(
                    WaterfillRow(
                        sweep_variable="bor",
                        sweep_value=float(bor),
                        decoder=decoder,
                        alpha_init=summary.alpha_init,
                        mean_sr_gain=summary.mean_sr_gain,
                        max_leakage=summary.max_leakage,
                        max_energy_residual=summary.max_energy_residual,
                        max_an_residual=summary.max_an_residual,
                        n_solves=summary.n_solves,
                        n_converged=summary.n_converged,
                    )
                )
        return rows

    raise ParameterError(f"unknown figure id {figure_id}; expected one of {FIGURE_IDS}")


# ---------------------------------------------------------------------------
#  Output
# ---------------------------------------------------------------------------

def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".9g")
    return str(value)


def rows_to_csv(rows: Sequence) -> str:
    """Render dataclass rows as CSV with 9-significant-digit floats."""
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = [f.name for f in fields(rows[0])]
    writer.writerow(names)
    for row in rows:
        writer.writerow([_format_value(getattr(row, name)) for name in names])
    return buf.getvalue()


def rows_to_json(rows: Sequence) -> str:
    def clean(value):
        if isinstance(value, float) and math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value

    payload = [
        {f.name: clean(getattr(row, f.name)) for f in fields(row)} for row in rows
    ]
    return json.dumps(payload, indent=2) + "\n"


def write_rows(rows: Sequence, path: Optional[str], fmt: str = "csv") -> str:
    """Serialize rows; write to `path` when given. Returns the rendered text."""
    if fmt not in ("csv", "json"):
        raise ParameterError(f"unknown output format {fmt!r}")
    text = rows_to_csv(rows) if fmt == "csv" else rows_to_json(rows)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    return text

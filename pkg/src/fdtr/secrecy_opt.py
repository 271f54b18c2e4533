"""Power-split optimization and guaranteed-secrecy calibration.

Three groups of results:

* closed-form optimal data fraction alpha maximizing the analytic secrecy
  rate, per eavesdropper decoder;
* the legitimate SNR required to hit a target secrecy rate, including the
  worst case of an infinitely good eavesdropper (exact-zero noise), where
  the minimizing alpha has a closed form as well;
* a per-realization waterfilling reallocation of the data power across
  subcarriers that raises the legitimate capacity while keeping the AN
  invisible, the AN energy and the total energy unchanged to tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from .channel import DiagonalChannel
from .exceptions import ParameterError
from .scenario import normalize_decoder
from .txchain import SpreadingMatrix, despread_channel_matrix


class PowerSplit(NamedTuple):
    """An optimal data fraction, flagged when the unconstrained optimum
    fell outside [0, 1] and was clamped."""

    alpha: float
    clamped: bool


def alpha_opt(decoder: str, bor: int, noise_var_bob: float, noise_var_eve: float) -> PowerSplit:
    """Data fraction maximizing the analytic secrecy rate.

    sds/oc have rational closed forms; mf is the positive root of the
    stationarity quadratic. Values outside [0, 1] (extreme noise regimes)
    are clamped and flagged.
    """
    decoder = normalize_decoder(decoder)
    if noise_var_bob < 0 or noise_var_eve < 0:
        raise ParameterError("noise variances must be >= 0")
    u, s_b, s_e = bor, noise_var_bob, noise_var_eve
    if decoder == "sds":
        raw = ((u + 1) * (u * s_e + 1) - u * s_b) / (2.0 * (u + 1))
    elif decoder == "oc":
        raw = ((u + 1) * (2.0 + u * s_e) - 2.0 * u * s_b) / (4.0 * (u + 1))
    else:  # mf: positive root of the stationarity quadratic in alpha
        t1 = u + 1.0
        if s_b == 0:
            # noiseless legitimate side: take the limit of the root, with
            # the common s_b factor cancelled from t3 and t4
            c3 = u * ((u + 1.0) * s_e + 1.0)
            c4 = (u + 1.0) * (u + 3.0) - u
            t2 = (u + 1.0) ** 2 * s_e + (u + 1.0)
            raw = (math.sqrt(t1 * c3 * (t1 * c3 + t2 * c4)) - t1 * c3) / (t1 * c4)
        else:
            t2 = (u + 1.0) ** 2 * s_e + (u + 1.0) - u * s_b
            t3 = u * (u + 1.0) * s_b * s_e + u * s_b
            t4 = (u + 1.0) * (u + 3.0) * s_b - u * s_b
            disc = t1 * t1 * t3 * t3 + t1 * t2 * t3 * t4 - t1 * t3 * t4 * t4
            if disc < 0:
                raw = 1.0  # no interior stationary point; rate is monotone
            else:
                raw = (math.sqrt(disc) - t1 * t3) / (t1 * t4)
    clamped = not 0.0 <= raw <= 1.0
    return PowerSplit(alpha=min(max(raw, 0.0), 1.0), clamped=clamped)


def required_snr_bob(
    decoder: str, target_sr: float, alpha: float, bor: int, noise_var_eve: float
) -> float:
    """Linear legitimate SNR hitting the target secrecy rate at a given alpha.

    Exact algebraic inverse of the analytic secrecy-rate model in the
    legitimate noise variance; plugging the result back reproduces the
    target to machine precision.
    """
    decoder = normalize_decoder(decoder)
    if target_sr < 0:
        raise ParameterError(f"target secrecy rate must be >= 0, got {target_sr}")
    if not 0.0 < alpha < 1.0:
        raise ParameterError("required SNR is undefined at alpha in {0, 1}")
    u, s_e, two_d = bor, noise_var_eve, 2.0 ** target_sr
    if decoder == "sds":
        num = two_d * (u * s_e + 1.0) - (u * s_e + 1.0 - alpha)
        den = alpha * (u + 1.0) * (u * s_e + 1.0 - alpha)
    elif decoder == "oc":
        num = two_d * (u * s_e + 2.0) - (u * s_e + 2.0 - 2.0 * alpha)
        den = alpha * (u + 1.0) * (u * s_e + 2.0 - 2.0 * alpha)
    else:  # mf
        eve_den = u * (u + 1.0) * s_e + u * (1.0 - alpha)
        eve_num = eve_den + alpha * (u + 1.0) * (u + 3.0)
        num = two_d * eve_num - eve_den
        den = alpha * u * (u + 1.0) * ((u + 1.0) * s_e + (1.0 - alpha))
    return num / den


def alpha_infinity(decoder: str, target_sr: float, bor: int) -> float:
    """Data fraction minimizing the required legitimate SNR when the
    eavesdropper noise is exactly zero."""
    decoder = normalize_decoder(decoder)
    if target_sr < 0:
        raise ParameterError(f"target secrecy rate must be >= 0, got {target_sr}")
    c = 2.0 ** target_sr - 1.0
    if decoder in ("sds", "oc"):
        return math.sqrt(c * c + c) - c
    a1 = 2.0 ** target_sr * (bor + 1.0) * (bor + 3.0) - bor * c
    a2 = bor * c
    return (-a2 + math.sqrt(a2 * (a1 + a2))) / a1


def required_snr_infinite_eve(decoder: str, target_sr: float, bor: int) -> float:
    """Minimum linear legitimate SNR guaranteeing the target secrecy rate
    against a noiseless eavesdropper (evaluated at the minimizing alpha;
    the expression is convex in alpha)."""
    decoder = normalize_decoder(decoder)
    if target_sr < 0:
        raise ParameterError(f"target secrecy rate must be >= 0, got {target_sr}")
    if target_sr == 0:
        return 0.0
    alpha = alpha_infinity(decoder, target_sr, bor)
    return required_snr_bob(decoder, target_sr, alpha, bor, 0.0)


# ---------------------------------------------------------------------------
#  Per-realization waterfilling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WaterfillProblem:
    """One constrained reallocation instance.

    The variable is a per-subcarrier data fraction vector alpha_w in
    [0, 1]^Q, started from the uniform optimal split. Constraints, each to
    tolerance `epsilon`: the despread AN leakage at the legitimate
    receiver stays at its (zero) baseline, and the total transmitted
    energy and the transmitted AN energy stay at their uniform-split
    values.
    """

    h_bob: DiagonalChannel
    spreading: SpreadingMatrix
    an: np.ndarray
    alpha_init: float
    epsilon: float = 1e-6
    max_iters: int = 2500
    step_tol: float = 1e-6

    def __post_init__(self):
        if not 0.0 < self.alpha_init < 1.0:
            raise ParameterError("waterfilling needs an interior initial fraction")
        if self.epsilon <= 0:
            raise ParameterError("constraint tolerance must be positive")
        an = np.asarray(self.an, dtype=np.complex128)
        if an.shape != (self.spreading.n_subcarriers,):
            raise ParameterError("AN vector length must equal the subcarrier count")
        object.__setattr__(self, "an", an)


@dataclass(frozen=True)
class WaterfillSolution:
    alpha: np.ndarray               # per-subcarrier fractions in [0, 1]
    objective_gain: float           # f(alpha) - f(alpha_init * 1), >= 0 up to roundoff
    constraint_residuals: tuple     # (AN leakage, |total energy change|, |AN energy change|)
    iterations: int
    converged: bool


def per_symbol_gains(spreading: SpreadingMatrix, h_bob: DiagonalChannel, alpha) -> np.ndarray:
    """Despread data amplitudes (1/U) sum_i sqrt(alpha_q) |h_q|^2 per symbol.

    `alpha` may be a scalar or a length-Q vector of per-subcarrier
    fractions.
    """
    m = np.abs(h_bob.gains) ** 2
    a = np.broadcast_to(np.asarray(alpha, dtype=float), m.shape)
    u, n = spreading.bor, spreading.n_symbols
    return (np.sqrt(np.clip(a, 0.0, 1.0)) * m).reshape(u, n).sum(axis=0) / u


def _waterfill_terms(problem: WaterfillProblem):
    spreading, u = problem.spreading, problem.spreading.bor
    n, q = spreading.n_symbols, spreading.n_subcarriers
    m = np.abs(problem.h_bob.gains) ** 2                   # |h_B,q|^2
    m_g = m.reshape(u, n)                                  # grouped, [i, n]
    a_rows = despread_channel_matrix(spreading, problem.h_bob)
    # leak_coef[i, n] = A[n, n+iN] * w_{n+iN}: one complex leakage term per
    # (group member, symbol); group sums vanish at the uniform split.
    leak_coef = (a_rows[np.arange(q) % n, np.arange(q)] * problem.an).reshape(u, n)
    w_pow = np.abs(problem.an) ** 2
    return m, m_g, leak_coef, w_pow


def _leakage_rows(leak_coef: np.ndarray, u: int, n: int, q: int) -> np.ndarray:
    """Orthonormal independent rows of the per-group leakage equalities.

    Group n contributes the complex equality sum_i leak_coef[i, n] *
    sqrt(1 - alpha_{n+iN}) = 0, i.e. two real rows acting on the AN
    amplitudes beta = sqrt(1 - alpha). The two rows can be linearly
    dependent (always at U = 2, where the coefficients sum to zero), so
    each group's system is reduced to its SVD row space; this keeps the
    constraint Jacobian full rank for the solver.
    """
    rows = []
    for g in range(n):
        pair = np.vstack([leak_coef[:, g].real, leak_coef[:, g].imag])  # (2, U)
        _, sv, vt = np.linalg.svd(pair, full_matrices=False)
        rank = int(np.sum(sv > 1e-10 * max(sv[0], 1e-30))) if sv.size else 0
        for r in range(rank):
            row = np.zeros(q)
            row[g + np.arange(u) * n] = vt[r]
            rows.append(row)
    return np.array(rows) if rows else np.zeros((0, q))


def waterfill(problem: WaterfillProblem) -> WaterfillSolution:
    """Maximize the legitimate per-symbol gains over per-subcarrier fractions.

    Objective: sum_n [ (1/U) sum_i sqrt(alpha_{n+iN}) |h_B,n+iN|^2 ]^2,
    the squared per-symbol despread data gains, seeded at the uniform
    split. The three secrecy-preserving constraints (AN leakage at the
    legitimate receiver, total transmit energy, AN energy, each held to
    its uniform-split value within `epsilon`) are enforced as equalities,
    which any epsilon-feasible formulation accepts: data energy and AN
    energy are linear in alpha, and the leakage equalities are rank
    reduced per symbol group. Solved with scipy's SLSQP under the native
    box constraint, capped at `max_iters`; the function-precision goal is
    step_tol * 1e-3. If the final iterate is infeasible beyond epsilon or
    below the initial objective, the result backtracks toward the
    (feasible) initial point, so the returned gain is never meaningfully
    negative and residuals always satisfy the tolerance.
    """
    u = problem.spreading.bor
    n, q = problem.spreading.n_symbols, problem.spreading.n_subcarriers
    eps = problem.epsilon
    m, m_g, leak_coef, w_pow = _waterfill_terms(problem)
    x0 = np.full(q, problem.alpha_init)

    def gains(alpha):
        return (np.sqrt(np.clip(alpha, 0.0, 1.0)).reshape(u, n) * m_g).sum(axis=0) / u

    def neg_objective(alpha):
        return -np.sum(gains(alpha) ** 2)

    def neg_objective_grad(alpha):
        a = np.clip(alpha, 1e-12, 1.0)
        # d f / d alpha_q = g_n * m_q / (U sqrt(alpha_q))
        return -(np.tile(gains(a), u) * m) / (u * np.sqrt(a))

    leak_rows = _leakage_rows(leak_coef, u, n, q)

    def leak_fun(alpha):
        return leak_rows @ np.sqrt(np.clip(1.0 - alpha, 0.0, 1.0))

    def leak_jac(alpha):
        beta = np.sqrt(np.clip(1.0 - alpha, 1e-12, 1.0))
        return leak_rows * (-0.5 / beta)[None, :]

    data_coef = m / u
    data0 = float(data_coef @ x0)
    an0 = float(w_pow @ x0)
    constraints = [
        {"type": "eq", "fun": lambda a: np.array([data_coef @ a - data0]),
         "jac": lambda a: data_coef[None, :]},
        {"type": "eq", "fun": lambda a: np.array([w_pow @ a - an0]),
         "jac": lambda a: w_pow[None, :]},
    ]
    if leak_rows.shape[0]:
        constraints.append({"type": "eq", "fun": leak_fun, "jac": leak_jac})

    result = minimize(
        neg_objective,
        x0,
        jac=neg_objective_grad,
        method="SLSQP",
        bounds=[(0.0, 1.0)] * q,
        constraints=constraints,
        options={"maxiter": problem.max_iters, "ftol": problem.step_tol * 1e-3},
    )

    w_total = float(w_pow.sum())
    tot0 = data0 + w_total - an0

    def residuals(alpha):
        beta_g = np.sqrt(np.clip(1.0 - alpha, 0.0, 1.0)).reshape(u, n)
        leakage = float(np.sum(np.abs((beta_g * leak_coef).sum(axis=0)) ** 2))
        total = float(data_coef @ alpha + w_total - w_pow @ alpha)
        an_energy = float(w_total - w_pow @ alpha)
        return (leakage, abs(total - tot0), abs(an_energy - (w_total - an0)))

    x = np.clip(result.x, 0.0, 1.0)
    f0 = -neg_objective(x0)
    converged = bool(result.status == 0)
    # Backtrack toward the feasible initial point if the iterate ended
    # outside tolerance or below the initial objective.
    if max(residuals(x)) > eps or -neg_objective(x) < f0 - 1e-12:
        t = 1.0
        for _ in range(60):
            cand = x0 + t * (x - x0)
            if max(residuals(cand)) <= eps and -neg_objective(cand) >= f0 - 1e-12:
                x = cand
                break
            t *= 0.5
        else:
            x = x0
        converged = False
    return WaterfillSolution(
        alpha=x,
        objective_gain=float(-neg_objective(x) - f0),
        constraint_residuals=residuals(x),
        iterations=int(result.nit),
        converged=converged,
    )


__all__ = [
    "PowerSplit",
    "WaterfillProblem",
    "WaterfillSolution",
    "alpha_infinity",
    "alpha_opt",
    "required_snr_bob",
    "required_snr_infinite_eve",
    "waterfill",
]

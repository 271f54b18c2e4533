"""Quick invariant battery behind the `selftest` CLI command.

A trimmed version of the test suite's structural and statistical checks,
sized to finish in a few seconds. Each check returns (name, passed,
detail) so the CLI can print one line per check.
"""

from __future__ import annotations

import numpy as np

from . import analytics, harness
from .channel import sample_channel, trial_rng
from .txchain import build_spreading_matrix, generate_an


def run_selftest(n_trials: int = 2000):
    results = []
    rng = np.random.default_rng(2024)

    spreading = build_spreading_matrix(16, 4, sign_seed=7)
    dense = spreading.as_dense()
    gram_err = float(np.max(np.abs(dense.T @ dense - np.eye(16))))
    results.append(("spreading orthonormality", gram_err < 1e-12, f"max |S^H S - I| = {gram_err:.2e}"))

    x = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    rt_err = float(np.max(np.abs(spreading.despread(spreading.spread(x)) - x)))
    results.append(("despread(spread(x)) identity", rt_err < 1e-12, f"max error = {rt_err:.2e}"))

    leak = 0.0
    for _ in range(50):
        ch = sample_channel(64, rng)
        w = generate_an(ch, spreading, rng)
        leak = max(leak, float(np.max(np.abs(spreading.despread(ch.gains * w)))))
    results.append(("AN leakage (SVD route)", leak < 1e-10, f"max leakage = {leak:.2e}"))

    batch = harness.simulate_batch(16, 4, n_trials, rng_seed=99)
    kernel_leak = float(np.max(np.abs(batch.bob_an)))
    results.append(("AN leakage (kernel route)", kernel_leak < 1e-10,
                    f"max leakage = {kernel_leak:.2e}"))

    alpha, nv = 0.5, 0.025
    metrics = {d: harness.evaluate_batch(batch, alpha, nv, nv, d) for d in ("sds", "mf", "oc")}
    inp = analytics.SinrInputs(alpha=alpha, bor=4, noise_var_bob=nv, noise_var_eve=nv)
    worst = 0.0
    for link, part in (("bob", "data"), ("sds", "an"), ("mf", "an"), ("oc", "data")):
        closed = analytics.component_power(link, part, inp)
        key = "bob" if link == "bob" else "eve"
        mc = metrics["sds"] if link == "bob" else metrics[link]
        est = mc.component_means[key][part]
        worst = max(worst, abs(est - closed) / closed)
    results.append(("component powers vs closed forms", worst < 0.10,
                    f"worst relative error = {worst:.3f}"))

    rec_a = harness.run_trial(harness.ScenarioConfig(n_symbols=16, bor=4, rng_seed=5), 3)
    rec_b = harness.run_trial(harness.ScenarioConfig(n_symbols=16, bor=4, rng_seed=5), 3)
    same = rec_a.sinr_bob == rec_b.sinr_bob and np.array_equal(rec_a.symbols, rec_b.symbols)
    results.append(("trial determinism", same, "identical (seed, index) reproduces the record"))

    g = trial_rng(5, 3).standard_normal(4)
    g2 = trial_rng(5, 3).standard_normal(4)
    results.append(("per-trial sub-seeding", bool(np.array_equal(g, g2)),
                    "generator streams reproduce"))
    return results

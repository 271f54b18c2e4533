"""Command-line interface.

Subcommands: simulate (single operating point), sweep (grid experiment
from a TOML spec), optimize (closed-form power-split and required-SNR
tables), reproduce-figure (bundled experiment presets), selftest (quick
invariant battery).

Exit codes: 0 success, 1 parameter error, 2 numerical failure (with
--strict, a non-converged solve counts as failure).
"""

from __future__ import annotations

import dataclasses
import json
import math
import sys

import click

from . import harness, secrecy_opt
from ._kernels import backend_name
from .exceptions import ConvergenceError, DegenerateTrialError, ParameterError
from .scenario import (
    DECODERS,
    ScenarioConfig,
    config_from_mapping,
    linear_to_db,
    load_config,
    noise_variance_from_snr,
    db_to_linear,
    parse_snr_db,
)


def _scenario_options(fn):
    opts = [
        click.option("--config", "config_path", type=click.Path(exists=True), default=None,
                     help="TOML scenario file; flags override its keys."),
        click.option("--n-symbols", type=int, default=None, help="Data symbols per block (N)."),
        click.option("--bor", type=int, default=None, help="Back-off rate U = Q/N."),
        click.option("--alpha", type=float, default=None,
                     help="Fraction of transmit power carrying data."),
        click.option("--snr-bob-db", type=str, default=None, help="Legitimate SNR in dB."),
        click.option("--snr-eve-db", type=str, default=None,
                     help="Eavesdropper SNR in dB; accepts 'inf'."),
        click.option("--decoder", type=click.Choice(list(DECODERS), case_sensitive=False),
                     default=None, help="Eavesdropper decoding structure."),
        click.option("--trials", type=int, default=None, help="Monte Carlo realizations."),
        click.option("--seed", type=int, default=None, help="Master RNG seed."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _output_options(fn):
    for opt in reversed([
        click.option("--out", "out_path", type=click.Path(), default=None,
                     help="Write results to this file."),
        click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
                     help="Output format."),
    ]):
        fn = opt(fn)
    return fn


def _build_config(config_path, **flags) -> ScenarioConfig:
    renames = {"trials": "n_trials", "seed": "rng_seed"}
    overrides = {renames.get(k, k): v for k, v in flags.items()}
    if config_path:
        return load_config(config_path, **overrides)
    return config_from_mapping({}, **overrides)


@click.group()
@click.version_option(package_name="fdtr")
def main():
    """Link-level simulator for time-reversal OFDM precoding with
    artificial-noise injection in SISO wiretap channels."""


@main.command()
@_scenario_options
@_output_options
@click.option("--waterfill", is_flag=True, help="Also solve the per-realization reallocation.")
@click.option("--waterfill-trials", type=int, default=100, show_default=True,
              help="Realizations given to the waterfilling solver.")
@click.option("--strict", is_flag=True, help="Treat non-converged solves as failures (exit 2).")
def simulate(config_path, out_path, fmt, waterfill, waterfill_trials, strict, **flags):
    """Run one operating point and report aggregated metrics."""
    cfg = _build_config(config_path, **flags)
    rows, summary = harness.simulate_point(
        cfg, include_waterfill=waterfill, waterfill_trials=waterfill_trials
    )
    if strict and summary is not None and summary.n_converged < summary.n_solves:
        raise ConvergenceError(
            f"{summary.n_solves - summary.n_converged} waterfilling solves did not converge"
        )
    click.echo(harness.write_rows(rows, out_path, fmt), nl=False)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), required=True,
              help="TOML sweep specification (variable, grid, decoders, [fixed]).")
@_output_options
@click.option("--n-symbols", type=int, default=None, help="Override fixed.n_symbols.")
@click.option("--bor", type=int, default=None, help="Override fixed.bor.")
@click.option("--alpha", type=float, default=None, help="Override fixed.alpha.")
@click.option("--snr-bob-db", type=str, default=None, help="Override fixed.snr_bob_db.")
@click.option("--snr-eve-db", type=str, default=None, help="Override fixed.snr_eve_db.")
@click.option("--decoder", type=click.Choice(list(DECODERS), case_sensitive=False),
              default=None, help="Override fixed.decoder.")
@click.option("--trials", type=int, default=None, help="Override fixed.n_trials.")
@click.option("--seed", type=int, default=None, help="Override fixed.rng_seed.")
@click.option("--waterfill/--no-waterfill", default=None,
              help="Override the spec's waterfilling switch.")
@click.option("--waterfill-trials", type=int, default=None,
              help="Override the spec's waterfilling subsample size.")
def sweep(config_path, out_path, fmt, trials, seed, waterfill, waterfill_trials, **flags):
    """Run a sweep described by a TOML file."""
    spec = harness.load_sweep_spec(config_path)
    renames = {"trials": "n_trials", "seed": "rng_seed"}
    fixed_changes = {renames.get(k, k): v for k, v in flags.items() if v is not None}
    if trials is not None:
        fixed_changes["n_trials"] = trials
    if seed is not None:
        fixed_changes["rng_seed"] = seed
    spec_changes = {}
    if fixed_changes:
        spec_changes["fixed"] = spec.fixed.replace(**fixed_changes)
    if waterfill is not None:
        spec_changes["include_waterfill"] = waterfill
    if waterfill_trials is not None:
        spec_changes["waterfill_trials"] = waterfill_trials
    if spec_changes:
        spec = dataclasses.replace(spec, **spec_changes)
    rows = harness.run_sweep(spec)
    click.echo(harness.write_rows(rows, out_path, fmt), nl=False)


@main.command()
@click.option("--bor", type=int, default=4, show_default=True)
@click.option("--snr-bob-db", type=str, default="10")
@click.option("--snr-eve-db", type=str, default="10", help="Accepts 'inf'.")
@click.option("--target-sr", "targets", type=float, multiple=True,
              default=(0.75, 2.2), show_default=True,
              help="Target secrecy rates (repeatable).")
@_output_options
def optimize(bor, snr_bob_db, snr_eve_db, targets, out_path, fmt):
    """Closed-form optimal power splits and guaranteed-secrecy SNR tables."""
    nv_b = noise_variance_from_snr(db_to_linear(parse_snr_db(snr_bob_db)), bor)
    nv_e = noise_variance_from_snr(db_to_linear(parse_snr_db(snr_eve_db)), bor)
    payload = {"bor": bor, "snr_bob_db": parse_snr_db(snr_bob_db),
               "snr_eve_db": parse_snr_db(snr_eve_db), "alpha_opt": {}, "guaranteed": []}
    for decoder in DECODERS:
        split = secrecy_opt.alpha_opt(decoder, bor, nv_b, nv_e)
        payload["alpha_opt"][decoder] = {"alpha": split.alpha, "clamped": split.clamped}
    for delta in targets:
        for decoder in DECODERS:
            a_inf = secrecy_opt.alpha_infinity(decoder, delta, bor)
            snr = secrecy_opt.required_snr_infinite_eve(decoder, delta, bor)
            payload["guaranteed"].append({
                "decoder": decoder,
                "target_sr": delta,
                "alpha_inf": a_inf,
                "required_snr_linear": snr,
                "required_snr_db": linear_to_db(snr) if snr > 0 else -math.inf,
            })
    if fmt == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = [f"# bor={bor} snr_bob_db={snr_bob_db} snr_eve_db={snr_eve_db}"]
        lines.append("decoder,alpha_opt,alpha_opt_clamped")
        for decoder in DECODERS:
            entry = payload["alpha_opt"][decoder]
            lines.append(f"{decoder},{entry['alpha']:.9g},{entry['clamped']}")
        lines.append("decoder,target_sr,alpha_inf,required_snr_linear,required_snr_db")
        for item in payload["guaranteed"]:
            lines.append(
                f"{item['decoder']},{item['target_sr']:.9g},{item['alpha_inf']:.9g},"
                f"{item['required_snr_linear']:.9g},{item['required_snr_db']:.9g}"
            )
        text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    click.echo(text, nl=False)


@main.command("reproduce-figure")
@click.argument("figure_id", type=click.Choice([str(i) for i in harness.FIGURE_IDS]))
@click.option("--trials", type=int, default=None, help="Monte Carlo realizations per point.")
@click.option("--waterfill-trials", type=int, default=None,
              help="Solver subsample size (preset 5).")
@click.option("--seed", type=int, default=12345, show_default=True)
@_output_options
def reproduce_figure(figure_id, trials, waterfill_trials, seed, out_path, fmt):
    """Emit the plot-ready data for a bundled experiment preset."""
    rows = harness.reproduce_figure(
        int(figure_id), n_trials=trials, waterfill_trials=waterfill_trials, rng_seed=seed
    )
    click.echo(harness.write_rows(rows, out_path, fmt), nl=False)


@main.command()
@click.option("--trials", type=int, default=2000, show_default=True,
              help="Realizations for the statistical checks.")
def selftest(trials):
    """Run the quick invariant battery and report one line per check."""
    from . import selfcheck

    results = selfcheck.run_selftest(n_trials=trials)
    failed = 0
    for name, ok, detail in results:
        click.echo(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        failed += 0 if ok else 1
    click.echo(f"backend: {backend_name()}")
    if failed:
        raise ConvergenceError(f"{failed} selftest checks failed")
    click.echo("all selftest checks passed")


def entry():
    try:
        main(standalone_mode=False)
    except ParameterError as exc:
        click.echo(f"parameter error: {exc}", err=True)
        sys.exit(1)
    except (ConvergenceError, DegenerateTrialError) as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(2)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(1)


if __name__ == "__main__":
    entry()

"""Command-line interface.

Subcommands: pool, synth, run, eval, budget-trace. Exit codes: 0 success,
1 input/config errors, 2 budget exhaustion.
"""

from __future__ import annotations

import sys

import click
import numpy as np

from .budget import DecaySeriesConfig, budget_series, optimal_eta_schedule
from .distributions import ProbabilityVector, kl_divergence, mse
from .exceptions import BudgetExhaustedError, BudgetOverflowError, DpStreamError
from .pool import generate_pool, save_pool
from .stream import DEFAULT_VARIANCES, RunConfig, gen_synthetic, parse_stream, run_pipeline, write_stream


@click.group()
def cli():
    """Differentially private distribution release over data streams."""


@cli.command("pool")
@click.option("--n", "trials", type=int, required=True, help="Trials per synopsis (1/precision).")
@click.option("--k", "domain_size", type=int, required=True, help="Domain size.")
@click.option("--pool-size", type=int, required=True, help="Number of synopses.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True, help="Output pool file.")
def pool_cmd(trials, domain_size, pool_size, seed, out):
    """Generate a data-independent synopsis pool and serialize it."""
    save_pool(generate_pool(trials, domain_size, pool_size, seed), out)
    click.echo(f"wrote {pool_size} synopses to {out}")


@cli.command("synth")
@click.option("--slots", type=int, required=True)
@click.option("--items", type=int, default=100, show_default=True)
@click.option("--mean", type=float, default=100.0, show_default=True)
@click.option("--variances", default=",".join(str(v) for v in DEFAULT_VARIANCES),
              show_default=True, help="Comma-separated variance choices.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def synth_cmd(slots, items, mean, variances, seed, out):
    """Generate a dynamic-distribution synthetic stream file."""
    variance_set = tuple(float(v) for v in variances.split(","))
    write_stream(gen_synthetic(slots, items, mean, variance_set, seed), out)
    click.echo(f"wrote {slots} slots to {out}")


_CONFIG_FLAGS = [
    ("epsilon", "epsilon_total", float),
    ("lam", "lam", float),
    ("mu", "mu", float),
    ("zeta", "zeta", float),
    ("pool-trials", "pool_trials", int),
    ("pool-size", "pool_size", int),
    ("sample-count", "sample_count", int),
    ("queries-per-slot", "queries_per_slot", int),
    ("forgetting", "forgetting", float),
    ("horizon", "horizon", int),
    ("hbos-quantile", "hbos_quantile", float),
    ("seed", "seed", int),
]


def _run_options(fn):
    fn = click.option("--stream", "stream_path", type=click.Path(exists=True), required=True)(fn)
    fn = click.option("--config", "config_path", type=click.Path(exists=True), default=None,
                      help="Plain 'key = value' config file; flags override it.")(fn)
    fn = click.option("--out-dir", type=click.Path(), required=True)(fn)
    for flag, _, kind in _CONFIG_FLAGS:
        fn = click.option(f"--{flag}", type=kind, default=None)(fn)
    fn = click.option("--lambda-rate", default=None, help="Exponential rate for RBA, or 'auto'.")(fn)
    fn = click.option("--queries", default=None, help="Semicolon-separated query specs.")(fn)
    fn = click.option("--release", type=click.Choice(["argmax", "sample"]), default=None)(fn)
    fn = click.option("--restart-on-exhaustion", is_flag=True, default=None)(fn)
    return fn


@cli.command("run")
@_run_options
def run_cmd(stream_path, config_path, out_dir, **flags):
    """Run the release pipeline over a stream file and export results."""
    overrides = {}
    for _, name, _ in _CONFIG_FLAGS:
        if flags.get(name) is not None:
            overrides[name] = flags[name]
    if flags.get("lambda_rate") is not None:
        raw = flags["lambda_rate"]
        overrides["lambda_rate"] = raw if raw == "auto" else float(raw)
    if flags.get("queries") is not None:
        overrides["queries"] = tuple(q.strip() for q in flags["queries"].split(";") if q.strip())
    if flags.get("release") is not None:
        overrides["release"] = flags["release"]
    if flags.get("restart_on_exhaustion"):
        overrides["restart_on_exhaustion"] = True
    if config_path is not None:
        cfg = RunConfig.from_file(config_path, **overrides)
    else:
        cfg = RunConfig(**overrides)
    report = run_pipeline(cfg, parse_stream(stream_path), out_dir=out_dir)
    click.echo(
        f"{report.slots} slots, ledger cumulative {report.ledger_cumulative:.6g}, "
        f"remaining budget {report.remaining_budget:.6g}, "
        f"mean instantaneous KL {report.mean_inst_kl:.6g}"
    )


@cli.command("eval")
@click.option("--released", "released_path", type=click.Path(exists=True), required=True)
@click.option("--reference", "reference_path", type=click.Path(exists=True), required=True)
@click.option("--smoothing", type=float, default=1e-6, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def eval_cmd(released_path, reference_path, smoothing, out):
    """Per-slot MSE/KL between two release files (same schema as releases.csv)."""
    released = _read_releases(released_path)
    reference = _read_releases(reference_path)
    common = sorted(set(released) & set(reference))
    with open(out, "w") as fh:
        fh.write("slot,mse,kl\n")
        for t in common:
            p = ProbabilityVector(reference[t])
            q = ProbabilityVector(released[t])
            fh.write(f"{t},{mse(p, q):.12g},{kl_divergence(p, q, smoothing):.12g}\n")
    click.echo(f"compared {len(common)} slots into {out}")


def _read_releases(path) -> dict[int, np.ndarray]:
    per_slot: dict[int, dict[int, float]] = {}
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "slot,query_id,category,probability":
            raise DpStreamError(f"unexpected release header {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            t, _, category, prob = line.split(",")
            per_slot.setdefault(int(t), {})[int(category)] = float(prob)
    out = {}
    for t, cols in per_slot.items():
        k = max(cols) + 1
        vec = np.zeros(k)
        for c, prob in cols.items():
            vec[c] = prob
        out[t] = vec / vec.sum()
    return out


@cli.command("budget-trace")
@click.option("--epsilon", type=float, required=True)
@click.option("--mu", type=float, default=0.05, show_default=True)
@click.option("--zeta", type=float, default=0.1, show_default=True)
@click.option("--horizon", type=int, default=1000, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def budget_trace_cmd(epsilon, mu, zeta, horizon, out):
    """Emit the optimal per-slot schedule: slot,eta,slot_cost,cumulative,remaining."""
    cfg = DecaySeriesConfig(epsilon_total=epsilon, zeta=zeta, mu=mu)
    etas = optimal_eta_schedule(cfg, horizon)
    costs = budget_series(cfg, horizon)
    cumulative = np.cumsum(costs)
    with open(out, "w") as fh:
        fh.write("slot,eta,slot_cost,cumulative,remaining\n")
        for t in range(horizon):
            fh.write(
                f"{t + 1},{etas[t]:.12g},{costs[t]:.12g},"
                f"{cumulative[t]:.12g},{epsilon - cumulative[t]:.12g}\n"
            )
    click.echo(f"wrote {horizon} slots to {out}")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except (BudgetExhaustedError, BudgetOverflowError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.Abort:
        sys.exit(1)
    except (DpStreamError, OSError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    return 0


if __name__ == "__main__":
    sys.exit(main())

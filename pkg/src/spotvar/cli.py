"""Command-line pipeline driver.

Subcommands mirror the pipeline stages: fetch, variation, summarize,
dftest, fit, simulate, ci, and report (everything end-to-end). Parameters
resolve with precedence flag > environment variable > manifest file.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric error,
5 network error.
"""

from __future__ import annotations

import hashlib
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .errors import DataError, NetworkError, NumericError, SpotvarError
from .ingest import PriceSeries, FetchConfig, fetch_klines, parse_klines
from .montecarlo import McConfig, confidence_intervals, sampling_distribution
from .ou import OUParams, log_likelihood, mle_fit, simulate_path
from .summary import iqr, percentiles, split_years
from .unitroot import DFModel, df_test
from .variation import VariationSeries, align, compute_variation
from . import reports

# 2017-09-01 00:00:00 UTC, the default sample epoch
DEFAULT_EPOCH_MS = 1_504_224_000_000
DEFAULT_PROBES = (0, 25, 50, 75, 100)

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4
EXIT_NETWORK = 5


class StageError(SpotvarError):
    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}': {cause}")


def _exit_code(exc):
    cause = exc.cause if isinstance(exc, StageError) else exc
    if isinstance(cause, NetworkError):
        return EXIT_NETWORK
    if isinstance(cause, NumericError):
        return EXIT_NUMERIC
    if isinstance(cause, DataError):
        return EXIT_DATA
    return EXIT_USAGE


def _sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class RunManifest:
    """Resolved run configuration plus content hashes of the inputs.

    The manifest hash covers everything that determines the outputs, so two
    runs with the same hash must produce byte-identical bundles.
    """

    def __init__(self, data):
        self.data = data

    @classmethod
    def resolve(cls, manifest_file=None, overrides=None):
        base = {
            "inputs": {},
            "dt": 1.0,
            "year_split": {"epoch_start_ms": DEFAULT_EPOCH_MS, "n_years": 4},
            "percentile_probes": list(DEFAULT_PROBES),
            "df_level": 0.01,
            "mc": {
                "replications": 1000,
                "path_length": None,  # None -> full-sample n
                "confidence": 0.90,
                "master_seed": 0,
                "initial_value": None,
            },
            "skip_mc": False,
            "version": __version__,
        }
        if manifest_file:
            loaded = json.loads(Path(manifest_file).read_text())
            for key, value in loaded.items():
                if isinstance(value, dict) and isinstance(base.get(key), dict):
                    base[key].update(value)
                else:
                    base[key] = value
        for key, value in (overrides or {}).items():
            if value is None:
                continue
            node = base
            *parents, leaf = key.split(".")
            for p in parents:
                node = node[p]
            node[leaf] = value
        return cls(base)

    def with_input_hashes(self):
        hashes = {
            leg: _sha256_file(path) for leg, path in sorted(self.data["inputs"].items())
        }
        data = dict(self.data, input_hashes=hashes)
        return RunManifest(data)

    @property
    def hash(self):
        canonical = json.dumps(self.data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    def dump(self, path):
        payload = dict(self.data, manifest_hash=self.hash)
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


@click.group()
@click.version_option(__version__)
def main():
    """Spot-quotient variation analysis pipeline."""


def _run(stage, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except SpotvarError as exc:
        raise StageError(stage, exc) from exc


@main.command()
@click.option("--symbol", "symbols", multiple=True, required=True)
@click.option("--start", type=int, required=True, help="window start, ms UTC")
@click.option("--end", type=int, required=True, help="window end, ms UTC (exclusive)")
@click.option("--endpoint", envvar="SPOTVAR_ENDPOINT", default=None)
@click.option("--pause", type=float, default=0.0, help="seconds between pages")
@click.option("--max-retries", type=int, default=4, show_default=True)
@click.option("--backoff", type=float, default=0.5, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=".")
def fetch(symbols, start, end, endpoint, pause, max_retries, backoff, out_dir):
    """Fetch 1m klines for each symbol and write <symbol>.csv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = FetchConfig(pause_s=pause, max_retries=max_retries, backoff_base_s=backoff)
    if endpoint:
        cfg.endpoint = endpoint
    for symbol in symbols:
        series = _run("fetch", fetch_klines, symbol, start, end, config=cfg)
        path = out / f"{symbol}.csv"
        series.to_csv(path)
        click.echo(f"{symbol}: {len(series)} rows -> {path}")


@main.command("variation")
@click.option("--spot", type=click.Path(exists=True), required=True)
@click.option("--num", type=click.Path(exists=True), required=True)
@click.option("--den", type=click.Path(exists=True), required=True)
@click.option("--raw-klines", is_flag=True, help="inputs are raw Binance kline CSVs")
@click.option("--out", type=click.Path(), default="variation.csv")
def variation_cmd(spot, num, den, raw_klines, out):
    """Align the three legs and write the variation series."""
    series = {}
    for leg, path in (("spot", spot), ("num", num), ("den", den)):
        if raw_klines:
            series[leg] = _run("parse", parse_klines, Path(path).read_bytes(), leg)
        else:
            series[leg] = _run("parse", PriceSeries.from_csv, path, leg)
    triple = _run("align", align, series["spot"], series["num"], series["den"])
    var = _run("variation", compute_variation, triple)
    var.to_csv(out)
    click.echo(f"{len(var)} aligned minutes -> {out} (dropped: {triple.dropped})")


def _load_variation(path):
    return _run("load", VariationSeries.from_csv, path)


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True), required=True)
@click.option("--epoch-start", type=int, default=DEFAULT_EPOCH_MS, show_default=True)
@click.option("--years", type=int, default=4, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=".")
def summarize(input_path, epoch_start, years, out_dir):
    """Emit the percentile / yearwise / IQR tables."""
    var = _load_variation(input_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _emit_summary_tables(var, epoch_start, years, DEFAULT_PROBES, out, manifest_hash="")
    click.echo(f"tables 1-3 -> {out}")


def _emit_summary_tables(var, epoch_start, years, probes, out, manifest_hash):
    table1 = _run("summary", percentiles, var, probes)
    slices = _run("summary", split_years, var, epoch_start, years)
    year_tables = [
        (s.label, percentiles(s.series, probes)) for s in slices if len(s.series)
    ]
    year_iqrs = [(label, iqr(t)) for label, t in year_tables]
    reports.percentile_table(table1, manifest_hash).write(out)
    reports.yearwise_percentile_table(year_tables, manifest_hash).write(out)
    reports.yearwise_iqr_table(year_iqrs, manifest_hash).write(out)


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True), required=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=".")
@click.option("--verbose/--brief", default=True)
def dftest(input_path, out_dir, verbose):
    """Run the three Dickey-Fuller models at the 1% level."""
    var = _load_variation(input_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = [_run("dftest", df_test, var, m) for m in DFModel]
    reports.df_table(results, verbose=verbose).write(out)
    for r in results:
        decision = "Rejected" if r.reject_null else "Not rejected"
        click.echo(f"Model ({r.variant.value}): {decision} (tau={r.tau:.4f})")


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True), required=True)
@click.option("--dt", type=float, default=1.0, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=".")
def fit(input_path, dt, out_dir):
    """Closed-form OU maximum-likelihood fit."""
    var = _load_variation(input_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    params, trans, stats = _run("fit", mle_fit, var, dt)
    loglik = log_likelihood(params, var, dt)
    reports.ou_fit_table(params, trans, stats, loglik, dt).write(out)
    click.echo(
        f"alpha={params.alpha:.6f} mu={params.mu:.6e} sigma={params.sigma:.6f}"
    )


@main.command()
@click.option("--alpha", type=float, required=True)
@click.option("--mu", type=float, required=True)
@click.option("--sigma", type=float, required=True)
@click.option("--v0", type=float, default=None, help="initial value (default mu)")
@click.option("--steps", type=int, required=True)
@click.option("--dt", type=float, default=1.0, show_default=True)
@click.option("--seed", type=int, envvar="SPOTVAR_SEED", default=0)
@click.option("--out", type=click.Path(), default="simulated.csv")
def simulate(alpha, mu, sigma, v0, steps, dt, seed, out):
    """Simulate an OU path via the exact transition law."""
    params = OUParams(alpha=alpha, mu=mu, sigma=sigma)
    start = mu if v0 is None else v0
    path = _run("simulate", simulate_path, params, start, steps, dt, seed)
    times = np.arange(len(path), dtype=np.int64)
    VariationSeries(times, path).to_csv(out)
    click.echo(f"{len(path)} values -> {out}")


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True), required=True)
@click.option("--replications", type=int, default=1000, show_default=True)
@click.option("--path-length", type=int, default=None, help="default: sample size")
@click.option("--confidence", type=float, default=0.90, show_default=True)
@click.option("--seed", type=int, envvar="SPOTVAR_SEED", default=0)
@click.option("--workers", type=int, envvar="SPOTVAR_WORKERS", default=1)
@click.option("--dt", type=float, default=1.0, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=".")
def ci(input_path, replications, path_length, confidence, seed, workers, dt, out_dir):
    """Fit, then Monte Carlo confidence intervals for the parameters."""
    var = _load_variation(input_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    params, _, _ = _run("fit", mle_fit, var, dt)
    cfg = McConfig(
        replications=replications,
        path_length=path_length or len(var),
        dt=dt,
        confidence=confidence,
        master_seed=seed,
    )
    samples = _run("montecarlo", sampling_distribution, params, cfg, workers)
    report = _run("montecarlo", confidence_intervals, samples, confidence, params)
    reports.ci_table(report).write(out)
    for name in ("alpha", "mu", "sigma"):
        click.echo(
            f"{name}: {report.point[name]:.6e} "
            f"[{report.lower[name]:.6e}, {report.upper[name]:.6e}]"
        )


@main.command()
@click.option("--manifest", "manifest_file", type=click.Path(exists=True), default=None)
@click.option("--spot", type=click.Path(exists=True), default=None)
@click.option("--num", type=click.Path(exists=True), default=None)
@click.option("--den", type=click.Path(exists=True), default=None)
@click.option("--out-dir", type=click.Path(file_okay=False), default="report")
@click.option("--seed", type=int, envvar="SPOTVAR_SEED", default=None)
@click.option("--workers", type=int, envvar="SPOTVAR_WORKERS", default=1)
@click.option("--replications", type=int, default=None)
@click.option("--path-length", type=int, default=None)
@click.option("--skip-mc", is_flag=True, default=None)
def report(manifest_file, spot, num, den, out_dir, seed, workers, replications,
           path_length, skip_mc):
    """Run the full pipeline and emit the paper-shaped report bundle."""
    overrides = {
        "inputs.spot": spot,
        "inputs.num": num,
        "inputs.den": den,
        "mc.master_seed": seed,
        "mc.replications": replications,
        "mc.path_length": path_length,
        "skip_mc": skip_mc,
    }
    manifest = RunManifest.resolve(manifest_file, overrides)
    for leg in ("spot", "num", "den"):
        if not manifest.data["inputs"].get(leg):
            raise click.UsageError(f"missing input for leg '{leg}'")
    manifest = manifest.with_input_hashes()
    mhash = manifest.hash

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    legs = {
        leg: _run("load", PriceSeriesLoader, manifest.data["inputs"][leg], leg)
        for leg in ("spot", "num", "den")
    }
    triple = _run("align", align, legs["spot"], legs["num"], legs["den"])
    var = _run("variation", compute_variation, triple)
    var.to_csv(out / "variation.csv", header_comment=f"manifest_hash={mhash}")

    ys = manifest.data["year_split"]
    _emit_summary_tables(
        var, ys["epoch_start_ms"], ys["n_years"],
        manifest.data["percentile_probes"], out, mhash,
    )

    df_results = [_run("dftest", df_test, var, m, manifest.data["df_level"]) for m in DFModel]
    reports.df_table(df_results, mhash).write(out)

    dt = manifest.data["dt"]
    params, trans, stats = _run("fit", mle_fit, var, dt)
    loglik = log_likelihood(params, var, dt)
    reports.ou_fit_table(params, trans, stats, loglik, dt, mhash).write(out)

    if not manifest.data["skip_mc"]:
        mc = manifest.data["mc"]
        cfg = McConfig(
            replications=mc["replications"],
            path_length=mc["path_length"] or len(var),
            dt=dt,
            confidence=mc["confidence"],
            master_seed=mc["master_seed"],
            initial_value=mc["initial_value"],
        )
        samples = _run("montecarlo", sampling_distribution, params, cfg, workers)
        ci_report = _run("montecarlo", confidence_intervals, samples, cfg.confidence, params)
        reports.ci_table(ci_report, mhash).write(out)

    manifest.dump(out / "manifest.json")
    click.echo(f"report bundle -> {out} (manifest {mhash[:12]})")


def PriceSeriesLoader(path, leg):
    return PriceSeries.from_csv(path, symbol=leg)


def cli_entry(argv=None):
    """Entry point with exit-code mapping for pipeline errors."""
    try:
        main.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except (click.UsageError, click.BadParameter) as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except StageError as exc:
        click.echo(f"error at {exc}", err=True)
        return _exit_code(exc)
    except SpotvarError as exc:
        click.echo(f"error: {exc}", err=True)
        return _exit_code(exc)
    return 0


def entry():
    sys.exit(cli_entry())


if __name__ == "__main__":
    entry()

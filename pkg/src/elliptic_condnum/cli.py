"""Command-line interface: ``elliptic-condnum {jdf,density,limit,experiment,selftest}``.

Numbers are printed with 17 significant digits, which round-trips doubles.
Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 statistical
test failure.  ``ELLIPTIC_CONDNUM_WORKERS`` sets the default worker count.
"""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from importlib import resources
from pathlib import Path

import click
import numpy as np
from scipy import integrate

from . import __version__
from .harness import (
    WORKERS_ENV,
    ExperimentConfig,
    compare_to_model,
    default_workers,
    finite_model,
    fn_model,
    limit_model,
    marginal_model,
    run_experiment,
    save_histogram,
    tail_slope,
    weak_conditional_model,
)
from .jdf import NumericalError, fn_density, jdf_q, jdf_t, marginal_density
from .limits import BulkPoint, EdgePoint, WeakPoint, bulk_jdf, edge_jdf, weak_jdf
from .prt import EnsembleParams

EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_STAT = 4


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def parse_values(spec: str, name: str) -> np.ndarray:
    """``"1.5"``, ``"0,1,2"`` or ``"start:stop:num"`` (inclusive linspace)."""
    try:
        if ":" in spec:
            a, b, n = spec.split(":")
            if int(n) < 1:
                raise ValueError
            return np.linspace(float(a), float(b), int(n))
        return np.array([float(v) for v in spec.split(",")])
    except ValueError:
        raise click.BadParameter(f"cannot parse {spec!r}; use a number, a comma list or start:stop:num",
                                 param_hint=name) from None


def _emit(rows, header, fmt_name, output):
    if fmt_name == "json":
        text = json.dumps([dict(zip(header, [float(v) for v in r])) for r in rows], indent=1) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])
        text = buf.getvalue()
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


class _Guard:
    """Map library exceptions to the documented exit codes."""

    def __enter__(self):
        return self

    def __exit__(self, et, ev, tb):
        if et is None or issubclass(et, (click.exceptions.ClickException, click.exceptions.Exit, SystemExit)):
            return False
        if issubclass(et, NotImplementedError):
            click.echo(f"error: {ev}", err=True)
            sys.exit(EXIT_USAGE)
        if issubclass(et, (NumericalError, ArithmeticError, FloatingPointError)):
            click.echo(f"numerical failure: {ev}", err=True)
            sys.exit(EXIT_NUMERIC)
        if issubclass(et, ValueError):
            click.echo(f"invalid input: {ev}", err=True)
            sys.exit(EXIT_USAGE)
        return False


_format_opt = click.option("--format", "fmt_name", type=click.Choice(["csv", "json"]), default="csv",
                           show_default=True)
_output_opt = click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
                           help="Write to a file instead of stdout.")


@click.group()
@click.version_option(__version__)
def main():
    """Condition numbers of real eigenvalues in the real elliptic ensemble."""


def _params(n, tau):
    if n < 2:
        raise click.BadParameter("the joint density needs n >= 2", param_hint="--n")
    if not (0.0 <= tau < 1.0):
        raise click.BadParameter("tau must lie in [0, 1)", param_hint="--tau")
    return EnsembleParams(n, tau)


@main.command()
@click.option("--n", type=int, required=True)
@click.option("--tau", type=float, required=True)
@click.option("--z", "z_spec", default=None, help="Eigenvalue(s): number, list or start:stop:num.")
@click.option("--q", "q_spec", default=None, help="Rescaled overlap(s) q = t/(1-tau).")
@click.option("--t", "t_spec", default=None, help="Shifted overlap(s) t = kappa^2 - 1.")
@click.option("--grid", "grid_spec", default=None,
              help="Lattice 'z0:z1:nz,v0:v1:nv'; the second axis is q unless --var t.")
@click.option("--var", type=click.Choice(["q", "t"]), default="q", show_default=True)
@_format_opt
@_output_opt
def jdf(n, tau, z_spec, q_spec, t_spec, grid_spec, var, fmt_name, output):
    """Finite-N joint density of a real eigenvalue z and its overlap."""
    params = _params(n, tau)
    if grid_spec is not None:
        if z_spec or q_spec or t_spec:
            raise click.UsageError("--grid excludes --z, --q and --t")
        try:
            zs_, vs_ = grid_spec.split(",")
        except ValueError:
            raise click.BadParameter("expected 'z0:z1:nz,v0:v1:nv'", param_hint="--grid") from None
        zs, vs = parse_values(zs_, "--grid"), parse_values(vs_, "--grid")
    else:
        if z_spec is None or (q_spec is None) == (t_spec is None):
            raise click.UsageError("give --z and exactly one of --q and --t (or --grid)")
        zs = parse_values(z_spec, "--z")
        var = "q" if q_spec is not None else "t"
        vs = parse_values(q_spec if var == "q" else t_spec, f"--{var}")
    if np.any(vs <= 0):
        raise click.BadParameter(f"{var} must be > 0", param_hint=f"--{var}")
    s = 1.0 - tau
    rows = []
    with _Guard():
        for z in zs:
            for v in vs:
                if var == "q":
                    rows.append((z, v, s * v, jdf_q(params, float(z), float(v))))
                else:
                    rows.append((z, v / s, v, jdf_t(params, float(z), float(v))))
    _emit(rows, ["z", "q", "t", "density"], fmt_name, output)


@main.command()
@click.option("--n", type=int, required=True)
@click.option("--tau", type=float, required=True)
@click.option("--z-grid", "z_spec", required=True, help="Number, list or start:stop:num.")
@click.option("--method", type=click.Choice(["fn", "marginal"]), default="fn", show_default=True,
              help="Closed form (even n only) or the joint density integrated over q.")
@click.option("--normalize", type=click.Choice(["count", "unit"]), default="count", show_default=True,
              help="count: integrates to the mean number of real eigenvalues; unit: to 1.")
@_format_opt
@_output_opt
def density(n, tau, z_spec, method, normalize, fmt_name, output):
    """Mean density of real eigenvalues."""
    if method == "fn" and n % 2:
        click.echo("unsupported: odd N with --method fn (use --method marginal)", err=True)
        sys.exit(EXIT_USAGE)
    if method == "fn" and not (0.0 < tau < 1.0):
        raise click.BadParameter("--method fn needs 0 < tau < 1", param_hint="--tau")
    params = _params(n, tau)
    f = fn_density if method == "fn" else marginal_density
    zs = parse_values(z_spec, "--z-grid")
    with _Guard():
        vals = np.array([f(params, float(z)) for z in zs])
        if normalize == "unit":
            half = (1.0 + tau) * math.sqrt(n) + 10.0 * math.sqrt(1.0 + tau)
            total, err = integrate.quad(lambda z: f(params, z), -half, half, epsabs=1e-13, epsrel=1e-11,
                                        limit=400, points=[0.0])
            vals = vals / total
    _emit(list(zip(zs, vals)), ["z", "density"], fmt_name, output)


@main.command()
@click.option("--regime", type=click.Choice(["bulk", "edge", "weak"]), required=True)
@click.option("--tau", type=float, default=None, help="bulk, edge")
@click.option("--a", "a", type=float, default=None, help="weak")
@click.option("--z", "z_spec", default=None, help="bulk, weak (units of sqrt(N))")
@click.option("--t", "t_spec", default=None, help="bulk (units of N), weak")
@click.option("--delta", "d_spec", default=None, help="edge")
@click.option("--sigma", "s_spec", default=None, help="edge")
@_format_opt
@_output_opt
def limit(regime, tau, a, z_spec, t_spec, d_spec, s_spec, fmt_name, output):
    """Large-N limit laws of the joint density."""
    need = {"bulk": ("tau", "z", "t"), "edge": ("tau", "delta", "sigma"), "weak": ("a", "z", "t")}[regime]
    given = {"tau": tau, "a": a, "z": z_spec, "t": t_spec, "delta": d_spec, "sigma": s_spec}
    missing = [k for k in need if given[k] is None]
    extra = [k for k, v in given.items() if v is not None and k not in need]
    if missing or extra:
        raise click.UsageError(f"--regime {regime} needs --{', --'.join(need)}"
                               + (f"; unexpected --{', --'.join(extra)}" if extra else ""))
    rows = []
    with _Guard():
        if regime == "bulk":
            for z in parse_values(z_spec, "--z"):
                for t in parse_values(t_spec, "--t"):
                    rows.append((tau, z, t, bulk_jdf(BulkPoint(tau, float(z), float(t)))))
            header = ["tau", "z", "t", "density"]
        elif regime == "edge":
            for d in parse_values(d_spec, "--delta"):
                for s in parse_values(s_spec, "--sigma"):
                    rows.append((tau, d, s, edge_jdf(EdgePoint(tau, float(d), float(s)))))
            header = ["tau", "delta", "sigma", "density"]
        else:
            for z in parse_values(z_spec, "--z"):
                for t in parse_values(t_spec, "--t"):
                    rows.append((a, z, t, weak_jdf(WeakPoint(a, float(z), float(t)))))
            header = ["a", "z", "t", "density"]
    _emit(rows, header, fmt_name, output)


def _load_config(ref: str) -> dict:
    p = Path(ref)
    if p.exists():
        return json.loads(p.read_text())
    bundled = resources.files("elliptic_condnum").joinpath("configs", ref)
    if bundled.is_file():
        return json.loads(bundled.read_text())
    raise click.BadParameter(f"no such file or bundled config: {ref}", param_hint="--config")


_MODELS = {"finite": finite_model, "marginal": marginal_model, "fn": fn_model, "limit": limit_model}


def _compare(h, spec: dict):
    kind = spec.get("model")
    kw = {k: spec[k] for k in ("z_lo", "z_hi", "min_expected", "alpha", "z_limit", "mode") if k in spec}
    if kind == "weak_conditional":
        if h.config.a is None:
            raise ValueError("weak_conditional model needs a weak-regime config (a)")
        model = weak_conditional_model(float(h.config.a), float(spec.get("z", 0.0)))
    elif kind in _MODELS:
        model = _MODELS[kind](h.config)
    else:
        raise ValueError(f"unknown model {kind!r}; choose from {sorted(_MODELS) + ['weak_conditional']}")
    return compare_to_model(h, model, **kw)


@main.command()
@click.option("--config", "config_ref", default=None,
              help="JSON config file, or the name of a bundled config (e.g. fig1_desk.json).")
@click.option("--n", type=int, default=None)
@click.option("--tau", type=float, default=None)
@click.option("--a", "a", type=float, default=None)
@click.option("--num-matrices", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--scaling", type=click.Choice(["raw", "bulk", "edge", "weak"]), default=None)
@click.option("--z-bins", "z_bins", default=None, help="start:stop:num (linear edges).")
@click.option("--t-bins", "t_bins", default=None, help="Comma list of edges; 'inf' allowed.")
@click.option("--model", default=None, help="finite, marginal, fn, limit or weak_conditional.")
@click.option("--workers", type=int, default=None, help=f"Process count (default: ${WORKERS_ENV} or 1).")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
              help="Histogram header path (JSON); the CSV body goes next to it.")
@click.option("--report", type=click.Path(dir_okay=False), default=None, help="Comparison report path (JSON).")
@click.option("--verify", is_flag=True, help="Repeat the run and require an identical digest.")
def experiment(config_ref, n, tau, a, num_matrices, seed, scaling, z_bins, t_bins, model, workers,
               output, report, verify):
    """Monte Carlo histogram of (z, t), optionally compared with a model."""
    d = _load_config(config_ref) if config_ref else {}
    inline = {"n": n, "tau": tau, "a": a, "num_matrices": num_matrices, "seed": seed, "scaling": scaling}
    for k, v in inline.items():
        if v is not None:
            d[k] = v
    if tau is not None:
        d.pop("a", None)
    if a is not None:
        d.pop("tau", None)
    if z_bins is not None:
        a_, b_, k_ = z_bins.split(":")
        d["z_bins"] = {"linspace": [float(a_), float(b_), int(k_)]}
    if t_bins is not None:
        d["t_bins"] = t_bins.split(",")
    d.setdefault("seed", 0)
    d.setdefault("t_bins", [0, "inf"])
    if model is not None:
        d["compare"] = {"model": model}
    try:
        cfg = ExperimentConfig.from_dict(d)
    except (TypeError, ValueError) as exc:
        raise click.UsageError(f"invalid experiment config: {exc}") from None
    workers = default_workers() if workers is None else workers
    if workers < 1:
        raise click.BadParameter("must be >= 1", param_hint="--workers")
    with _Guard():
        h = run_experiment(cfg, workers=workers, verify=verify)
    summary = {"sha256": h.digest(), "total_matrices": h.total_matrices,
               "total_observations": h.total_observations, "discards": h.discards,
               "z_out": h.z_out, "t_out": h.t_out}
    if output:
        save_histogram(h, output)
        summary["histogram"] = str(output)
    passed = True
    if "compare" in d:
        with _Guard():
            rep = _compare(h, d["compare"])
        summary["comparison"] = {k: getattr(rep, k) for k in
                                 ("model", "mode", "chi2", "dof", "p_value", "max_abs_z", "passed")}
        passed = rep.passed
        if report:
            Path(report).write_text(rep.to_json() + "\n")
    if "tail" in d:
        tl = d["tail"]
        with _Guard():
            slope = tail_slope(h, tl["t_lo"], tl["t_hi"], tl.get("z_lo"), tl.get("z_hi"))
        lo, hi = tl.get("range", [-math.inf, math.inf])
        ok = lo <= slope <= hi
        summary["tail"] = {"slope": slope, "range": [lo, hi], "passed": ok}
        passed = passed and ok
    click.echo(json.dumps(summary, indent=1))
    if not passed:
        sys.exit(EXIT_STAT)


@main.command()
@click.option("--quick", is_flag=True, help="Kernel identity and tau -> 0 reduction only.")
def selftest(quick):
    """Run the built-in consistency suites."""
    from ._backend import BACKEND
    from .selftest import run_suites

    click.echo(f"backend: {BACKEND}")
    results = run_suites(quick=quick)
    for r in results:
        click.echo(r.line())
    if not all(r.passed for r in results):
        click.echo("selftest FAILED", err=True)
        sys.exit(EXIT_NUMERIC)
    click.echo("selftest passed")


if __name__ == "__main__":  # pragma: no cover
    main()

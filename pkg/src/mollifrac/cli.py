"""Batch command-line front end.

Subcommands: constants | mollify | seminorm | verify | perturb | all.
Every run is driven by a JSON config (a file path or the name of a bundled
config), writes report.json (plus series.csv / plot.svg where applicable)
into --out, and exits 0 on PASS, 1 on FAIL, 2 on invalid input.
"""

from __future__ import annotations

import json
import math
import sys
import time
from importlib import resources
from pathlib import Path

import click
import numpy as np

from . import config as cfgmod
from .asymptotics import uniform_bound, verify_limit
from .constants import (constant_C, constant_C_monte_carlo, constant_D,
                        constant_D_monte_carlo, constant_D_quadrature)
from .errors import InvalidConfig, MollifracError
from .mollify import gradient_bound_check, mollify
from .perturbation import double_limit_verify
from .reporting import write_convergence_svg, write_report, write_series_csv
from .seminorm import energy_for

BUNDLED = ("step1d.json", "halfplane2d.json", "disc2d.json",
           "doublewell1d.json", "massless_kernel.json")


def _load_config(path: str) -> cfgmod.ExperimentConfig:
    p = Path(path)
    if p.exists():
        text = p.read_text()
    else:
        candidate = resources.files("mollifrac").joinpath("configs", path)
        if candidate.is_file():
            text = candidate.read_text()
        else:
            raise InvalidConfig("config", f"no such config file: {path}")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidConfig("config", f"invalid JSON: {exc}") from exc
    return cfgmod.from_dict(raw)


def _run_constants(cfg, out: Path) -> tuple[int, dict]:
    rows = []
    for n in cfg.dims:
        d_closed = constant_D(n)
        d_quad = constant_D_quadrature(n)
        d_mc = constant_D_monte_carlo(n, cfg.mc_samples, cfg.seed)
        c_closed = constant_C(n)
        c_mc = constant_C_monte_carlo(n, cfg.mc_samples, cfg.seed)
        rows.append({
            "dim": n,
            "D_closed": d_closed.value, "D_quadrature": d_quad.value,
            "D_mc": d_mc.value, "D_mc_std_error": d_mc.std_error,
            "C_closed": c_closed.value,
            "C_mc": c_mc.value, "C_mc_std_error": c_mc.std_error,
        })
        click.echo(f"N={n}:  D = {d_closed.value:.8f} "
                   f"(mc {d_mc.value:.6f} +- {d_mc.std_error:.2e})   "
                   f"C = {c_closed.value:.8f} "
                   f"(mc {c_mc.value:.6f} +- {c_mc.std_error:.2e})")
    return 0, {"constants": rows, "passed": True}


def _run_mollify(cfg, out: Path) -> tuple[int, dict]:
    field = cfgmod.build_field(cfg)
    dom = cfgmod.build_domain(cfg, field)
    kernel = cfgmod.build_kernel(cfg, field.dim)
    f = mollify(field, kernel, float(cfg.eps), dom.box)
    grids = np.meshgrid(*f.axes, indexing="ij")
    pts = np.column_stack([g.ravel() for g in grids])
    vals = f.values.reshape(pts.shape[0], -1)
    header = ",".join([f"x{k + 1}" for k in range(f.dim)]
                      + [f"v{j + 1}" for j in range(vals.shape[1])])
    lines = [header]
    for p, v in zip(pts, vals):
        lines.append(",".join(repr(float(x)) for x in (*p, *v)))
    (out / "grid.csv").write_text("\n".join(lines) + "\n")
    gb = gradient_bound_check(f)
    click.echo(f"wrote {out / 'grid.csv'} ({f.node_count} nodes); "
               f"gradient bound {'ok' if gb.ok else 'VIOLATED'} "
               f"({gb.max_combined:.4f} <= {gb.bound:.4f})")
    result = {"nodes": f.node_count, "eps": cfg.eps,
              "gradient_bound": {"max_combined": gb.max_combined,
                                 "bound": gb.bound, "ok": gb.ok},
              "passed": bool(gb.ok)}
    return (0 if gb.ok else 1), result


def _run_seminorm(cfg, out: Path) -> tuple[int, dict]:
    field = cfgmod.build_field(cfg)
    dom = cfgmod.build_domain(cfg, field)
    kernel = cfgmod.build_kernel(cfg, field.dim)
    params = cfgmod.build_energy_params(cfg)
    eps = float(cfg.eps)
    res = energy_for(field, kernel, eps, dom, float(cfg.q), params,
                     cfg.method)
    check = uniform_bound(field, kernel, float(cfg.q), eps,
                          energy_value=res.value)
    payload = {"value": res.value, "error_estimate": res.error_estimate,
               "method": res.method}
    click.echo(json.dumps(payload, sort_keys=True))
    result = dict(payload)
    result["value_over_abslog"] = res.value / abs(math.log(eps))
    result["uniform_bound"] = check.to_dict()
    result["passed"] = bool(check.passed)
    return (0 if check.passed else 1), result


def _run_verify(cfg, out: Path) -> tuple[int, dict]:
    field = cfgmod.build_field(cfg)
    dom = cfgmod.build_domain(cfg, field)
    kernel = cfgmod.build_kernel(cfg, field.dim)
    params = cfgmod.build_energy_params(cfg)
    schedule = cfgmod.build_schedule(cfg)
    report = verify_limit(field, kernel, float(cfg.q), dom, schedule,
                          float(cfg.tolerance), params, cfg.method,
                          cfg.functional)
    rows = report.series.to_rows()
    write_series_csv(out / "series.csv", rows)
    if cfg.plot:
        write_convergence_svg(
            out / "plot.svg", rows, report.predicted or None,
            title=f"{field.name} / {kernel.kind} / q={cfg.q}")
    gap = report.fit.relative_gap
    gap_text = "n/a (zero-mass kernel)" if report.predicted == 0.0 \
        else f"{gap:.3%}"
    click.echo(f"slope = {report.fit.slope:.6f}  predicted = "
               f"{report.predicted:.6f}  relative gap = {gap_text}  ->  "
               f"{'PASS' if report.passed else 'FAIL'}")
    return (0 if report.passed else 1), report.to_dict()


def _run_perturb(cfg, out: Path) -> tuple[int, dict]:
    field = cfgmod.build_field(cfg)
    dom = cfgmod.build_domain(cfg, field)
    kernel = cfgmod.build_kernel(cfg, field.dim)
    params = cfgmod.build_energy_params(cfg)
    schedule = cfgmod.build_schedule(cfg)
    potential = cfgmod.build_potential(cfg)
    report = double_limit_verify(
        field, kernel, potential, float(cfg.q), dom,
        [float(r) for r in cfg.rho_schedule], schedule.epsilons(),
        float(cfg.tolerance), params)
    click.echo(f"extrapolated = {report.extrapolated:.6f}  target = "
               f"{report.target:.6f}  ->  "
               f"{'PASS' if report.passed else 'FAIL'}")
    return (0 if report.passed else 1), report.to_dict()


_RUNNERS = {
    "constants": _run_constants,
    "mollify": _run_mollify,
    "seminorm": _run_seminorm,
    "verify": _run_verify,
    "perturb": _run_perturb,
}


def run_config(cfg: cfgmod.ExperimentConfig, out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    code, result = _RUNNERS[cfg.experiment](cfg, out)
    write_report(out / "report.json", cfg.to_dict(), result,
                 time.perf_counter() - t0)
    return code


def _common_options(fn):
    fn = click.option("--config", "config_path", required=True,
                      help="config file or bundled config name")(fn)
    fn = click.option("--out", "out_dir", default="out",
                      type=click.Path(path_type=Path),
                      help="output directory")(fn)
    fn = click.option("--threads", type=int, default=None,
                      help="override thread budget")(fn)
    fn = click.option("--seed", type=int, default=None,
                      help="override RNG seed")(fn)
    fn = click.option("--plot", is_flag=True, default=False,
                      help="emit plot.svg for sweep experiments")(fn)
    return fn


def _dispatch(expected: str | None, config_path: str, out_dir: Path,
              threads, seed, plot) -> None:
    try:
        cfg = _load_config(config_path)
        if expected is not None and cfg.experiment != expected:
            raise InvalidConfig(
                "experiment",
                f"config is '{cfg.experiment}', expected '{expected}'")
        if threads is not None:
            cfg.threads = threads
        if seed is not None:
            cfg.seed = seed
        if plot:
            cfg.plot = True
        code = run_config(cfg, out_dir)
    except InvalidConfig as exc:
        click.echo(f"invalid input: {exc}", err=True)
        sys.exit(2)
    except MollifracError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    sys.exit(code)


@click.group()
def main():
    """Numerical checks of jump-energy asymptotics for mollified fields."""


def _make_command(name: str, doc: str):
    @main.command(name=name, help=doc)
    @_common_options
    def _cmd(config_path, out_dir, threads, seed, plot, _name=name):
        _dispatch(_name, config_path, out_dir, threads, seed, plot)
    return _cmd


_make_command("constants", "Closed-form vs Monte Carlo dimensional constants.")
_make_command("mollify", "Sample a mollified catalog field onto grid.csv.")
_make_command("seminorm", "Single Gagliardo energy with envelope check.")
_make_command("verify", "eps-sweep, slope fit, limit comparison.")
_make_command("perturb", "Double-limit recovery-sequence verification.")


@main.command(name="run", help="Run any config, dispatching on its "
                               "'experiment' field.")
@_common_options
def _run_any(config_path, out_dir, threads, seed, plot):
    _dispatch(None, config_path, out_dir, threads, seed, plot)


@main.command(name="all", help="Run every bundled config into --out/<name>.")
@click.option("--out", "out_dir", default="out",
              type=click.Path(path_type=Path))
@click.option("--threads", type=int, default=None)
def _run_all(out_dir, threads):
    worst = 0
    for name in BUNDLED:
        click.echo(f"== {name}")
        try:
            cfg = _load_config(name)
            if threads is not None:
                cfg.threads = threads
            code = run_config(cfg, out_dir / Path(name).stem)
        except MollifracError as exc:
            click.echo(f"error: {exc}", err=True)
            code = 2
        worst = max(worst, code)
    sys.exit(worst)


if __name__ == "__main__":
    main()

"""Experiment configuration: parsing, validation, object construction.

Configs are plain JSON; :func:`from_dict` normalizes and validates every
field (raising :class:`InvalidConfig` with the offending field name) and
``to_dict`` round-trips the normalized form unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, asdict
from typing import Any

import numpy as np

from .asymptotics import GeometricSchedule
from .errors import InvalidConfig
from .fields import Domain, PiecewiseConstantField, catalog, default_domain
from .geometry import Box
from .kernels import Mollifier, kernel_from_spec
from .perturbation import Potential, double_well_scalar, quadratic_wells
from .seminorm import EnergyParams

_EXPERIMENTS = ("constants", "mollify", "seminorm", "verify", "perturb")


@dataclass
class ExperimentConfig:
    experiment: str
    field: dict | None = None
    kernel: dict | None = None
    q: float | None = None
    domain: dict | None = None
    schedule: dict | None = None
    rho_schedule: list | None = None
    potential: dict | None = None
    dims: list | None = None
    mc_samples: int = 1_000_000
    tolerance: float | None = None
    eps: float | None = None
    functional: str = "gagliardo"
    method: str = "auto"
    seed: int = 0
    threads: int = 1
    energy: dict = dc_field(default_factory=dict)
    plot: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def _require(cond: bool, name: str, msg: str):
    if not cond:
        raise InvalidConfig(name, msg)


def from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise InvalidConfig("<root>", "config must be a JSON object")
    known = set(ExperimentConfig.__dataclass_fields__)
    for key in raw:
        if key not in known:
            raise InvalidConfig(key, "unknown config field")
    cfg = ExperimentConfig(**{k: raw[k] for k in raw})

    _require(cfg.experiment in _EXPERIMENTS, "experiment",
             f"must be one of {_EXPERIMENTS}")
    _require(isinstance(cfg.seed, int) and cfg.seed >= 0, "seed",
             "must be a nonnegative integer")
    _require(isinstance(cfg.threads, int) and 1 <= cfg.threads <= 64,
             "threads", "must be an integer in [1, 64]")
    _require(cfg.method in ("auto", "oracle", "generic"), "method",
             "must be auto, oracle or generic")
    _require(cfg.functional in ("gagliardo", "relative"), "functional",
             "must be gagliardo or relative")

    if cfg.experiment == "constants":
        dims = cfg.dims or [1, 2, 3]
        _require(all(isinstance(n, int) and 1 <= n <= 6 for n in dims),
                 "dims", "dimensions must be integers in 1..6")
        cfg.dims = list(dims)
        _require(cfg.mc_samples >= 10_000, "mc_samples", "must be >= 1e4")
        return cfg

    _require(cfg.field is not None, "field", "required for this experiment")
    _require(isinstance(cfg.field, dict) and "name" in cfg.field, "field",
             "must be an object with a 'name'")
    if cfg.experiment in ("seminorm", "verify", "perturb"):
        _require(cfg.q is not None, "q", "required")
        _require(isinstance(cfg.q, (int, float)) and cfg.q > 1.0, "q",
                 "the Gagliardo energy requires q > 1")
    _require(cfg.kernel is not None, "kernel", "required for this experiment")
    _require(isinstance(cfg.kernel, dict) and "kind" in cfg.kernel, "kernel",
             "must be an object with a 'kind'")

    if cfg.experiment in ("mollify", "seminorm"):
        _require(cfg.eps is not None and 0.0 < float(cfg.eps) <= 1.0, "eps",
                 "required, in (0, 1]")
    if cfg.experiment in ("verify", "perturb"):
        _require(cfg.schedule is not None, "schedule", "required")
        sched = cfg.schedule
        _require(isinstance(sched, dict) and "eps_max" in sched
                 and "count" in sched
                 and ("eps_min" in sched or "ratio" in sched),
                 "schedule", "needs eps_max, count, and eps_min or ratio")
        _require(int(sched["count"]) >= 4, "schedule.count", "must be >= 4")
        _require(0.0 < float(sched["eps_max"]) <= 1.0 / np.e + 1e-12,
                 "schedule.eps_max", "sweeps require eps <= 1/e")
        _require(cfg.tolerance is not None and 0.0 < cfg.tolerance < 1.0,
                 "tolerance", "required, in (0, 1)")
    if cfg.experiment == "perturb":
        _require(cfg.rho_schedule is not None and len(cfg.rho_schedule) >= 3,
                 "rho_schedule", "need at least 3 rho values")
        _require(int(cfg.schedule["count"]) >= 6, "schedule.count",
                 "the double limit needs at least 6 eps values")
        _require(cfg.potential is not None, "potential", "required")
    return cfg


def build_field(cfg: ExperimentConfig) -> PiecewiseConstantField:
    params = cfg.field.get("params", {})
    return catalog(cfg.field["name"], **params)


def build_domain(cfg: ExperimentConfig,
                 field: PiecewiseConstantField) -> Domain:
    if cfg.domain is None:
        return default_domain(field)
    d = cfg.domain
    try:
        box = Box(tuple(float(p[0]) for p in d["box"]),
                  tuple(float(p[1]) for p in d["box"]))
        ambient = Box(tuple(float(p[0]) for p in d["ambient_box"]),
                      tuple(float(p[1]) for p in d["ambient_box"]))
        return Domain(int(d.get("dim", box.dim)), box, ambient)
    except (KeyError, ValueError, TypeError) as exc:
        raise InvalidConfig("domain", str(exc)) from exc


def build_kernel(cfg: ExperimentConfig, dim: int) -> Mollifier:
    params = cfg.kernel.get("params", {})
    try:
        return kernel_from_spec(cfg.kernel["kind"], dim, **params)
    except (ValueError, TypeError) as exc:
        raise InvalidConfig("kernel", str(exc)) from exc


def build_schedule(cfg: ExperimentConfig) -> GeometricSchedule:
    s = cfg.schedule
    try:
        if "eps_min" in s:
            return GeometricSchedule.from_bounds(
                float(s["eps_max"]), float(s["eps_min"]), int(s["count"]))
        return GeometricSchedule(float(s["eps_max"]), float(s["ratio"]),
                                 int(s["count"]))
    except ValueError as exc:
        raise InvalidConfig("schedule", str(exc)) from exc


def build_potential(cfg: ExperimentConfig) -> Potential:
    kind = cfg.potential.get("kind")
    params = cfg.potential.get("params", {})
    if kind == "double_well_scalar":
        return double_well_scalar()
    if kind == "quadratic_wells":
        try:
            return quadratic_wells(params["zeros"])
        except KeyError as exc:
            raise InvalidConfig("potential", "quadratic_wells needs zeros") \
                from exc
    raise InvalidConfig("potential",
                        f"unknown kind '{kind}' (double_well_scalar or "
                        "quadratic_wells)")


def build_energy_params(cfg: ExperimentConfig) -> EnergyParams:
    kwargs: dict[str, Any] = dict(cfg.energy)
    if "angular_half" in kwargs:
        kwargs["angular_half"] = tuple(kwargs["angular_half"])
    kwargs["threads"] = cfg.threads
    try:
        return EnergyParams(**kwargs)
    except TypeError as exc:
        raise InvalidConfig("energy", str(exc)) from exc

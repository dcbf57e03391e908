"""eps-sweeps, |ln eps| slope extraction, and limit verification.

The mollified Gagliardo energy diverges like A|ln eps| + B; sweeping a
geometric eps schedule and fitting the affine model in |ln eps| extracts A,
which the limit theorem pins to

    A = 2 |int eta|^q D_N int_{J_u cap Omega} |u+ - u-|^q dH^{N-1}.

Every sweep point can also be checked against the uniform envelope
(lhs normalized by omega_{N-1}|ln eps|, rhs assembled from exact field and
kernel norms), which holds for each eps individually, not just in the limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .constants import constant_D
from .errors import DegenerateFit
from .fields import Domain, PiecewiseConstantField
from .kernels import Mollifier, sphere_area
from .mollify import mollify
from .seminorm import (EnergyParams, SeminormResult, energy_for,
                       gagliardo_energy, relative_energy)


@dataclass(frozen=True)
class GeometricSchedule:
    """eps_i = eps_max * ratio^i for i = 0..count-1 (strictly decreasing)."""

    eps_max: float
    ratio: float
    count: int

    def __post_init__(self):
        if not 0.0 < self.ratio < 1.0:
            raise ValueError("ratio must lie in (0, 1)")
        if self.count < 1:
            raise ValueError("count must be positive")
        if self.eps_max <= 0.0:
            raise ValueError("eps_max must be positive")

    @classmethod
    def from_bounds(cls, eps_max: float, eps_min: float,
                    count: int) -> "GeometricSchedule":
        if count < 2 or not 0.0 < eps_min < eps_max:
            raise ValueError("need eps_min < eps_max and count >= 2")
        ratio = (eps_min / eps_max) ** (1.0 / (count - 1))
        return cls(eps_max, ratio, count)

    def epsilons(self) -> np.ndarray:
        return self.eps_max * self.ratio ** np.arange(self.count)


@dataclass
class SweepSeries:
    """(eps, value, error_estimate) triples from a geometric sweep."""

    entries: list[tuple[float, float, float]]
    schedule: GeometricSchedule
    functional_id: str

    def __post_init__(self):
        eps = np.array([e for e, _, _ in self.entries])
        vals = np.array([v for _, v, _ in self.entries])
        if len(self.entries) < 4:
            raise ValueError("a sweep needs at least 4 points for a fit")
        if not np.all(np.diff(eps) < 0):
            raise ValueError("eps must be strictly decreasing")
        if not np.all(np.isfinite(vals)) or np.any(vals < -1e-9):
            raise ValueError("sweep values must be finite and nonnegative")

    @property
    def epsilons(self) -> np.ndarray:
        return np.array([e for e, _, _ in self.entries])

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v, _ in self.entries])

    @property
    def errors(self) -> np.ndarray:
        return np.array([e for _, _, e in self.entries])

    def to_rows(self) -> list[dict]:
        return [{"epsilon": e, "value": v,
                 "value_over_abslog": v / abs(math.log(e)),
                 "error_estimate": err}
                for e, v, err in self.entries]


@dataclass(frozen=True)
class AsymptoticFit:
    """Weighted least squares of value = A|ln eps| + B."""

    slope: float
    intercept: float
    rms_residual: float
    slope_stderr: float
    predicted: float | None = None

    @property
    def relative_gap(self) -> float | None:
        if self.predicted is None:
            return None
        if self.predicted == 0.0:
            return math.inf if self.slope != 0.0 else 0.0
        return abs(self.slope - self.predicted) / abs(self.predicted)

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept,
                "rms_residual": self.rms_residual,
                "slope_stderr": self.slope_stderr,
                "predicted": self.predicted,
                "relative_gap": self.relative_gap}


def fit_log_slope(series: SweepSeries,
                  predicted: float | None = None) -> AsymptoticFit:
    """Fit A|ln eps| + B with weights 1/error_estimate^2 (unit weights when
    any estimate is zero)."""
    x = np.abs(np.log(series.epsilons))
    y = series.values
    if x.size < 2 or np.ptp(x) < 1e-12:
        raise DegenerateFit("all |ln eps| coincide")
    errs = series.errors
    if np.any(errs <= 0.0):
        w = np.ones_like(x)
    else:
        w = 1.0 / errs ** 2
    sw = np.sum(w)
    xbar = np.sum(w * x) / sw
    ybar = np.sum(w * y) / sw
    sxx = np.sum(w * (x - xbar) ** 2)
    if sxx <= 0.0:
        raise DegenerateFit("no spread in |ln eps|")
    slope = float(np.sum(w * (x - xbar) * (y - ybar)) / sxx)
    intercept = float(ybar - slope * xbar)
    resid = y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(resid ** 2)))
    dof = max(x.size - 2, 1)
    s2 = float(np.sum(w * resid ** 2) / dof)
    stderr = float(math.sqrt(s2 / sxx))
    return AsymptoticFit(slope=slope, intercept=intercept, rms_residual=rms,
                         slope_stderr=stderr, predicted=predicted)


def sweep(functional_id: str, field: PiecewiseConstantField, eta: Mollifier,
          q: float, omega: Domain, schedule: GeometricSchedule,
          params: EnergyParams | None = None,
          method: str = "auto") -> SweepSeries:
    """One energy evaluation per schedule point; mollification is redone at
    every eps.  functional_id: 'gagliardo' (energy over Omega) or
    'relative' (whole-space minus complement, on the ambient box)."""
    if schedule.eps_max > 1.0 / math.e + 1e-12:
        raise ValueError("schedule must stay inside (0, 1/e]")
    params = params or EnergyParams()
    entries = []
    for eps in schedule.epsilons():
        if functional_id == "gagliardo":
            res = energy_for(field, eta, eps, omega, q, params, method)
        elif functional_id == "relative":
            f = mollify(field, eta, eps, omega.ambient_box)
            res = relative_energy(f, omega, q, params)
        else:
            raise ValueError(f"unknown functional '{functional_id}'")
        entries.append((float(eps), res.value, res.error_estimate))
    return SweepSeries(entries=entries, schedule=schedule,
                       functional_id=functional_id)


@dataclass(frozen=True)
class UniformBoundCheck:
    """One evaluation of the |ln eps|-normalized energy envelope."""

    eps: float
    q: float
    lhs: float
    rhs: float
    terms: tuple[float, float, float]
    passed: bool

    def to_dict(self) -> dict:
        return {"eps": self.eps, "q": self.q, "lhs": self.lhs,
                "rhs": self.rhs, "terms": list(self.terms),
                "passed": self.passed}


def uniform_bound(field: PiecewiseConstantField, eta: Mollifier, q: float,
                  eps: float, omega: Domain | None = None,
                  energy_value: float | None = None,
                  params: EnergyParams | None = None) -> UniformBoundCheck:
    """Check E_q(u_eps, Omega) / (omega_{N-1}|ln eps|) against the explicit
    three-term envelope built from ||u||_L1, ||u||_Linf, ||Du||(R^N),
    ||eta||_L1 and ||eta||_W11.

    The right-hand side is valid for every eps in (0, 1), uniformly in eps
    only through its third (eps-independent) term.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("the envelope holds for eps in (0, 1)")
    if energy_value is None:
        if omega is None:
            raise ValueError("need a domain or a precomputed energy value")
        energy_value = energy_for(field, eta, eps, omega, q, params).value
    n = field.dim
    abslog = abs(math.log(eps))
    lhs = energy_value / (sphere_area(n) * abslog)
    m_inf = field.linf_norm * eta.w11_norm
    t1 = (2.0 ** q * field.l1_norm * field.linf_norm ** (q - 1.0)
          * eta.l1_norm ** q) / abslog
    t2 = ((3.0 * m_inf) ** (q - 1.0) * eta.l1_norm * field.total_variation
          / ((q - 1.0) * abslog))
    t3 = (3.0 * m_inf) ** (q - 1.0) * eta.l1_norm * field.total_variation
    rhs = t1 + t2 + t3
    return UniformBoundCheck(eps=eps, q=q, lhs=float(lhs), rhs=float(rhs),
                             terms=(float(t1), float(t2), float(t3)),
                             passed=bool(lhs <= rhs))


@dataclass
class VerifyReport:
    """verify_limit output: inputs, sweep, fit, envelope checks, verdict."""

    field_name: str
    kernel_kind: str
    q: float
    tol: float
    method: str
    kernel_mass: float
    dimension_constant: float
    jump_energy: float
    predicted: float
    series: SweepSeries
    fit: AsymptoticFit
    bound_checks: list[UniformBoundCheck] = dc_field(default_factory=list)
    passed: bool = False

    def to_dict(self) -> dict:
        return {
            "field": self.field_name, "kernel": self.kernel_kind,
            "q": self.q, "tol": self.tol, "method": self.method,
            "kernel_mass": self.kernel_mass,
            "dimension_constant": self.dimension_constant,
            "jump_energy": self.jump_energy,
            "predicted": self.predicted,
            "series": self.series.to_rows(),
            "fit": self.fit.to_dict(),
            "uniform_bound": [c.to_dict() for c in self.bound_checks],
            "passed": self.passed,
        }


def verify_limit(field: PiecewiseConstantField, eta: Mollifier, q: float,
                 omega: Domain, schedule: GeometricSchedule, tol: float,
                 params: EnergyParams | None = None, method: str = "auto",
                 functional_id: str = "gagliardo",
                 check_bound: bool = True) -> VerifyReport:
    """Sweep, fit, and compare the slope with 2|mass|^q D_N J_q(u, Omega).

    PASS means the fitted slope is within ``tol`` (relative) of the
    predicted limit; for zero-mass kernels (predicted = 0) it means the
    fitted |slope| does not exceed ``tol`` times the mass-one limit of the
    same field, the formula's natural scale.
    """
    if not 0.0 < tol < 1.0:
        raise ValueError("tol must lie in (0, 1)")
    field.assert_boundary_clear(omega.box)
    d_n = constant_D(field.dim).value
    j_q = field.jump_energy(omega.box, q)
    predicted = 2.0 * abs(eta.mass) ** q * d_n * j_q
    series = sweep(functional_id, field, eta, q, omega, schedule, params,
                   method)
    fit = fit_log_slope(series, predicted)
    checks = []
    if check_bound:
        for eps, value, _ in series.entries:
            checks.append(uniform_bound(field, eta, q, eps,
                                        energy_value=value))
    if predicted > 0.0:
        passed = fit.relative_gap is not None and fit.relative_gap <= tol
    else:
        scale = 2.0 * d_n * j_q
        passed = abs(fit.slope) <= tol * scale
    passed = bool(passed) and all(c.passed for c in checks)
    return VerifyReport(
        field_name=field.name, kernel_kind=eta.kind, q=q, tol=tol,
        method=method, kernel_mass=eta.mass, dimension_constant=d_n,
        jump_energy=j_q, predicted=predicted, series=series, fit=fit,
        bound_checks=checks, passed=passed)

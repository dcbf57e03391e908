"""Singular-perturbation energies and recovery sequences (A == 0 case).

E1 couples the |ln eps|-normalized Gagliardo energy on Omega with a
potential term (1/eps) int_Omega W(v,x) dx; E2 replaces the first term by
the relative whole-space energy.  The recovery sequence for a field u whose
values sit in the wells of W is its mollification at the composed scale
eps*rho; an optional bump correction restores the exact discrete mean of u
over Omega without disturbing the limit energies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from .errors import PhiMassNotOne
from .fields import Domain, PiecewiseConstantField
from .geometry import Box
from .grids import clipped_trapezoid_weights
from .kernels import Mollifier
from .mollify import SampledField, mollify
from .seminorm import EnergyParams, gagliardo_energy, relative_energy


@dataclass(frozen=True)
class Potential:
    """Nonnegative potential W(v) with declared zeros and a gradient bound
    C_D = sup{|grad W(b)| : |b| <= D} on balls."""

    kind: str
    wells: tuple[tuple[float, ...], ...]
    fn: Callable[[np.ndarray], np.ndarray]        # (..., d) -> (...)
    grad_fn: Callable[[np.ndarray], np.ndarray]   # (..., d) -> (..., d)
    lipschitz_on_ball: Callable[[float], float]

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return self.fn(np.asarray(v, dtype=float))


def double_well_scalar() -> Potential:
    """W(v) = (1 - |v|^2)^2, zeros on the unit sphere (v = +-1 for d = 1)."""

    def fn(v):
        return (1.0 - np.sum(v ** 2, axis=-1)) ** 2

    def grad_fn(v):
        return -4.0 * v * (1.0 - np.sum(v ** 2, axis=-1))[..., None]

    return Potential(
        kind="double_well_scalar", wells=((1.0,), (-1.0,)),
        fn=fn, grad_fn=grad_fn,
        lipschitz_on_ball=lambda D: 4.0 * D * (1.0 + D * D))


def quadratic_wells(zeros) -> Potential:
    """Smooth multi-well: W(v) = prod_k |v - z_k|^2 (C-infinity, vanishing
    exactly at the declared zeros; reduces to the double well for z = +-1)."""
    zs = tuple(tuple(np.atleast_1d(np.asarray(z, dtype=float))) for z in zeros)
    zarr = np.array(zs)  # (K, d)

    def fn(v):
        out = np.ones(v.shape[:-1])
        for z in zarr:
            out = out * np.sum((v - z) ** 2, axis=-1)
        return out

    def grad_fn(v):
        terms = [np.sum((v - z) ** 2, axis=-1) for z in zarr]
        out = np.zeros_like(v)
        for j, z in enumerate(zarr):
            prod = np.ones(v.shape[:-1])
            for k, t in enumerate(terms):
                if k != j:
                    prod = prod * t
            out += 2.0 * (v - z) * prod[..., None]
        return out

    def lip(D):
        radii = [D + float(np.linalg.norm(z)) for z in zarr]
        total = 0.0
        for j, rj in enumerate(radii):
            prod = 2.0 * rj
            for k, rk in enumerate(radii):
                if k != j:
                    prod *= rk * rk
            total += prod
        return total

    return Potential(kind="quadratic_wells", wells=zs, fn=fn,
                     grad_fn=grad_fn, lipschitz_on_ball=lip)


def tabulated_potential(fn, grad_fn, wells, lipschitz_on_ball) -> Potential:
    return Potential(kind="custom", wells=tuple(tuple(w) for w in wells),
                     fn=fn, grad_fn=grad_fn,
                     lipschitz_on_ball=lipschitz_on_ball)


# ---------------------------------------------------------------------------
# energies
# ---------------------------------------------------------------------------

def _omega_weights(f: SampledField, box: Box) -> np.ndarray:
    w = None
    for k, a in enumerate(f.axes):
        wk = clipped_trapezoid_weights(a, box.lo[k], box.hi[k])
        w = wk if w is None else np.multiply.outer(w, wk)
    return w


def potential_energy(W: Potential, f: SampledField, omega: Domain | Box,
                     eps: float) -> float:
    """(1/eps) int_Omega W(f(x)) dx on f's (graded) grid."""
    box = omega.box if isinstance(omega, Domain) else omega
    w = _omega_weights(f, box)
    return float(np.sum(w * W(f.values))) / eps


def E1(f: SampledField, W: Potential, q: float, omega: Domain | Box,
       eps: float, params: EnergyParams | None = None) -> float:
    """(1/|ln eps|) E_q(f, Omega) + (1/eps) int_Omega W(f)."""
    box = omega.box if isinstance(omega, Domain) else omega
    semi = gagliardo_energy(f, box, q, params).value
    return semi / abs(math.log(eps)) + potential_energy(W, f, box, eps)


def E2(f: SampledField, W: Potential, q: float, omega: Domain,
       eps: float, params: EnergyParams | None = None) -> float:
    """Relative-energy variant of E1 (field sampled on the ambient box)."""
    semi = relative_energy(f, omega, q, params).value
    return semi / abs(math.log(eps)) + potential_energy(W, f, omega.box, eps)


# ---------------------------------------------------------------------------
# recovery sequences
# ---------------------------------------------------------------------------

@dataclass
class RecoveryField:
    """Mollified admissible field u_{rho,eps} = (eta_rho)_eps * u.

    The two-scale convolution collapses to a single mollification at scale
    eps*rho.  With a correction, realized = u_{rho,eps} - phi * c where c is
    the discrete mean drift over Omega and phi has discrete mass one, so the
    corrected mean matches the mean of u exactly.
    """

    base: PiecewiseConstantField
    rho: float
    eps: float
    realized: SampledField
    correction: tuple[Callable, np.ndarray] | None = None
    mean_drift: np.ndarray | None = None


def recovery(field: PiecewiseConstantField, eta: Mollifier, rho: float,
             eps: float, target: Box) -> RecoveryField:
    if abs(eta.mass - 1.0) > 1e-9:
        raise ValueError("recovery kernels must have unit mass")
    realized = mollify(field, eta, eps * rho, target)
    # report the realized field at the outer scale for downstream energies
    return RecoveryField(base=field, rho=rho, eps=eps, realized=realized)


def default_bump(box: Box) -> Callable[[np.ndarray], np.ndarray]:
    """Product-of-bumps supported strictly inside the box (unnormalized)."""
    lo = np.asarray(box.lo)
    hi = np.asarray(box.hi)
    mid = 0.5 * (lo + hi)
    half = 0.4 * (hi - lo)

    def phi(pts: np.ndarray) -> np.ndarray:
        t = (np.atleast_2d(pts) - mid) / half
        out = np.ones(t.shape[0])
        for k in range(t.shape[1]):
            tk = np.clip(np.abs(t[:, k]), 0.0, 1.0 - 1e-12)
            vals = np.exp(-1.0 / (1.0 - tk ** 2))
            vals[np.abs(t[:, k]) >= 1.0] = 0.0
            out *= vals
        return out

    return phi


def mean_corrected_recovery(field: PiecewiseConstantField, eta: Mollifier,
                            rho: float, eps: float, omega: Domain | Box,
                            target: Box | None = None,
                            phi: Callable | None = None) -> RecoveryField:
    """Recovery field with the bump correction restoring the discrete mean.

    A user-supplied phi must already have unit discrete mass over Omega on
    the realized grid (PhiMassNotOne otherwise); by default a centered
    product bump is normalized on that same quadrature, which makes the
    mean constraint exact by construction.
    """
    box = omega.box if isinstance(omega, Domain) else omega
    target = target or box
    rec = recovery(field, eta, rho, eps, target)
    f = rec.realized
    w = _omega_weights(f, box)
    grids = np.meshgrid(*f.axes, indexing="ij")
    pts = np.column_stack([g.ravel() for g in grids])

    u_raw = field.region_values(pts).reshape(f.values.shape)
    mean_u = (w[..., None] * u_raw).reshape(-1, u_raw.shape[-1]).sum(axis=0)
    mean_f = (w[..., None] * f.values).reshape(-1, f.values.shape[-1]).sum(axis=0)
    c = mean_f - mean_u

    if phi is None:
        raw = default_bump(box)
        raw_vals = raw(pts).reshape(w.shape)
        mass = float(np.sum(w * raw_vals))
        phi_vals = raw_vals / mass
        phi_fn = lambda p: raw(p) / mass  # noqa: E731
    else:
        phi_vals = np.asarray(phi(pts), dtype=float).reshape(w.shape)
        mass = float(np.sum(w * phi_vals))
        if abs(mass - 1.0) > 1e-9:
            raise PhiMassNotOne(f"discrete mass of phi is {mass}, not 1")
        phi_fn = phi

    corrected = f.values - phi_vals[..., None] * c
    realized = SampledField(axes=f.axes, values=corrected, epsilon=f.epsilon,
                            box=f.box, source=f.source, kernel=f.kernel,
                            layer_resolved=f.layer_resolved)
    return RecoveryField(base=field, rho=rho, eps=eps, realized=realized,
                         correction=(phi_fn, c), mean_drift=c)


def mean_error(rec: RecoveryField, omega: Domain | Box) -> float:
    """| discrete mean of realized - discrete mean of u | over Omega."""
    box = omega.box if isinstance(omega, Domain) else omega
    f = rec.realized
    w = _omega_weights(f, box)
    grids = np.meshgrid(*f.axes, indexing="ij")
    pts = np.column_stack([g.ravel() for g in grids])
    u_raw = rec.base.region_values(pts).reshape(f.values.shape)
    delta = f.values - u_raw
    diff = (w[..., None] * delta).reshape(-1, delta.shape[-1]).sum(axis=0)
    return float(np.linalg.norm(diff))


# ---------------------------------------------------------------------------
# double-limit protocol
# ---------------------------------------------------------------------------

@dataclass
class DoubleLimitReport:
    """Per-rho slope/plateau table plus the rho -> 0 extrapolation."""

    rho_rows: list[dict]
    extrapolated: float
    rho_slope: float
    extrap_residual: float
    target: float
    tol: float
    passed: bool
    mean_error_max: float

    def to_dict(self) -> dict:
        return {"rho_rows": self.rho_rows,
                "extrapolated": self.extrapolated,
                "rho_slope": self.rho_slope,
                "extrap_residual": self.extrap_residual,
                "target": self.target, "tol": self.tol,
                "passed": self.passed,
                "mean_error_max": self.mean_error_max}


def double_limit_verify(field: PiecewiseConstantField, eta: Mollifier,
                        W: Potential, q: float, omega: Domain,
                        rho_schedule, eps_schedule,
                        tol: float,
                        params: EnergyParams | None = None) -> DoubleLimitReport:
    """Materialize lim_{rho->0} limsup_{eps->0} E1(u_{rho,eps}).

    For each rho: fit the |ln eps| slope of the Gagliardo term of the
    recovery sequence and take the max of the potential term over the eps
    schedule (its limsup proxy; the term is O(rho) uniformly in eps).  The
    per-rho totals are extrapolated linearly to rho = 0 and compared with
    2 D_N J_q(u, Omega).
    """
    from .asymptotics import GeometricSchedule, SweepSeries, fit_log_slope
    from .constants import constant_D

    rhos = sorted((float(r) for r in rho_schedule), reverse=True)
    epss = sorted((float(e) for e in eps_schedule), reverse=True)
    if len(rhos) < 3:
        raise ValueError("need at least 3 rho values")
    if len(epss) < 6:
        raise ValueError("need at least 6 eps values")
    params = params or EnergyParams()
    sched = GeometricSchedule.from_bounds(epss[0], epss[-1], len(epss))

    target = 2.0 * constant_D(field.dim).value * field.jump_energy(omega.box, q)
    rows = []
    mean_err_max = 0.0
    for rho in rhos:
        entries = []
        plateau = 0.0
        for eps in epss:
            rec = recovery(field, eta, rho, eps, omega.box)
            semi = gagliardo_energy(rec.realized, omega.box, q, params)
            pot = potential_energy(W, rec.realized, omega.box, eps)
            plateau = max(plateau, pot)
            entries.append((eps, semi.value, semi.error_estimate))
            crec = mean_corrected_recovery(field, eta, rho, eps, omega.box)
            mean_err_max = max(mean_err_max, mean_error(crec, omega.box))
        series = SweepSeries(entries, sched, "recovery_gagliardo")
        fit = fit_log_slope(series)
        rows.append({"rho": rho, "slope": fit.slope,
                     "slope_stderr": fit.slope_stderr,
                     "plateau": plateau,
                     "total": fit.slope + plateau})

    xs = np.array([r["rho"] for r in rows])
    ys = np.array([r["total"] for r in rows])
    coef = np.polyfit(xs, ys, 1)
    extrapolated = float(coef[1])
    resid = float(np.sqrt(np.mean((np.polyval(coef, xs) - ys) ** 2)))
    passed = abs(extrapolated - target) <= tol * abs(target)
    return DoubleLimitReport(
        rho_rows=rows, extrapolated=extrapolated, rho_slope=float(coef[0]),
        extrap_residual=resid, target=target, tol=tol, passed=passed,
        mean_error_max=mean_err_max)

"""Mollification of piecewise-constant fields on layer-resolving grids.

Because the field is piecewise constant, the convolution at a point is a
region-mass computation: each constant region contributes its value times
the kernel mass of its preimage under z -> x + eps*z.  Three evaluation
routes cover the geometry:

  (a) a single hyperplane face inside the stencil: exact half-space masses
      from the kernel's 1D marginal along the face normal;
  (b) purely radial kernel against a single circle/sphere: exact angular
      overlap reduces the mass to a 1D radial quadrature;
  (c) anything else: adaptive cut-cell quadrature on the stencil cube with
      geometric uniform-cell detection (exact region tagging, Gauss cells).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from itertools import product

import numpy as np

from .errors import DimensionMismatch, LayerUnresolved, ResolutionTooCoarse
from .fields import HyperplanePiece, PiecewiseConstantField, SpherePiece
from .geometry import Box
from .grids import graded_axis, trapezoid_weights
from .kernels import Mollifier

_GAUSS5_X, _GAUSS5_W = np.polynomial.legendre.leggauss(5)


@dataclass
class ResolutionPolicy:
    """Grid construction parameters for layer-resolving sampled fields."""

    coarse_h: float | None = None   # background spacing (default: width/24)
    fine_factor: float = 8.0        # layer spacing = eps / fine_factor
    growth: float = 1.5             # geometric transition ratio
    max_nodes: int = 4_000_000      # total grid-node budget
    cut_cell_depth: int = 8         # adaptive quadrature depth for route (c)


@dataclass
class SampledField:
    """Field values on a rectilinear (possibly graded) tensor grid.

    ``values`` has shape (n_1, ..., n_N, d).  ``epsilon`` is the
    mollification scale the grid resolves; ``source`` and ``kernel`` point
    back to the exact inputs when the field was built by :func:`mollify`.
    """

    axes: tuple[np.ndarray, ...]
    values: np.ndarray
    epsilon: float
    box: Box
    source: PiecewiseConstantField | None = None
    kernel: Mollifier | None = None
    layer_resolved: bool = dc_field(default=False)

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def codim(self) -> int:
        return self.values.shape[-1]

    @property
    def node_count(self) -> int:
        return int(np.prod([a.size for a in self.axes]))

    def linf(self) -> float:
        return float(np.max(np.linalg.norm(self.values, axis=-1)))

    def scaled(self, lam: float) -> "SampledField":
        return SampledField(self.axes, self.values * lam, self.epsilon,
                            self.box, self.source, self.kernel,
                            self.layer_resolved)

    def translated(self, shift) -> "SampledField":
        shift = np.asarray(shift, dtype=float)
        axes = tuple(a + shift[k] for k, a in enumerate(self.axes))
        return SampledField(axes, self.values, self.epsilon,
                            self.box.shift(shift), self.source, self.kernel,
                            self.layer_resolved)

    def max_gradient(self) -> float:
        """Max Frobenius norm of the central-difference gradient."""
        g2 = np.zeros(self.values.shape[:-1])
        for k in range(self.dim):
            if self.axes[k].size < 2:
                continue
            gk = np.gradient(self.values, self.axes[k], axis=k)
            g2 += np.sum(gk ** 2, axis=-1)
        return float(np.sqrt(np.max(g2)))


@dataclass(frozen=True)
class GradientBoundReport:
    """Discrete check of |u_eps| + eps*|grad u_eps| <= ||u||_inf ||eta||_W11."""

    max_value: float
    max_combined: float
    bound: float
    slack: float
    ok: bool


def _layer_intervals(field: PiecewiseConstantField, axis: int,
                     halfwidth: float) -> list[tuple[float, float]]:
    """Axis intervals where the mollified field varies along this axis.

    Straight faces vary along their normal axis (a band around the offset)
    and, near their extent ends, along tangential axes; curved pieces vary
    along every axis across their whole projection.
    """
    out = []
    for piece in field.pieces:
        if isinstance(piece, HyperplanePiece):
            if piece.axis == axis:
                out.append((piece.offset - halfwidth, piece.offset + halfwidth))
            else:
                lo, hi = piece.axis_interval(axis)
                out.append((lo - halfwidth, lo + halfwidth))
                out.append((hi - halfwidth, hi + halfwidth))
        else:
            lo, hi = piece.axis_interval(axis)
            out.append((lo - halfwidth, hi + halfwidth))
    return out


def _refinement_bands(field: PiecewiseConstantField, axis: int, eps: float,
                      support_radius: float, fine: float):
    w = (support_radius + 1.0) * eps + 2.0 * fine
    return [(lo, hi, fine) for lo, hi in _layer_intervals(field, axis, w)]


def build_axes(field: PiecewiseConstantField, eps: float,
               target: Box, kernel: Mollifier,
               policy: ResolutionPolicy) -> tuple[np.ndarray, ...]:
    fine = eps / policy.fine_factor
    axes = []
    for k in range(field.dim):
        lo, hi = target.lo[k], target.hi[k]
        coarse = policy.coarse_h or (hi - lo) / 24.0
        bands = _refinement_bands(field, k, eps, kernel.support_radius, fine)
        axes.append(graded_axis(lo, hi, coarse, bands, policy.growth))
    n_total = int(np.prod([a.size for a in axes]))
    if n_total > policy.max_nodes:
        raise ResolutionTooCoarse(
            f"layer-resolving grid needs {n_total} nodes "
            f"(> budget {policy.max_nodes})")
    return tuple(axes)


def check_layer_resolution(f: SampledField, tol_factor: float = 8.0) -> bool:
    """Spacing <= eps/tol_factor wherever the grid meets a layer band."""
    if f.source is None or f.kernel is None:
        return True
    eps = f.epsilon
    fine = eps / tol_factor
    w = (f.kernel.support_radius + 1.0) * eps
    for k, nodes in enumerate(f.axes):
        spacing = np.diff(nodes)
        mids = 0.5 * (nodes[:-1] + nodes[1:])
        need = np.zeros(mids.size, dtype=bool)
        for lo, hi in _layer_intervals(f.source, k, w):
            need |= (mids > lo) & (mids < hi)
        if np.any(spacing[need] > fine * (1.0 + 1e-9)):
            return False
    return True


# ---------------------------------------------------------------------------
# node evaluation routes
# ---------------------------------------------------------------------------

def _halfspace_values(piece: HyperplanePiece, s_over_eps: np.ndarray,
                      kernel: Mollifier) -> np.ndarray:
    """Route (a): exact convolution against a single hyperplane face.

    s_over_eps is the signed distance to the face divided by eps; the value
    is left*m((-s/eps, -inf side)) + right*(rest), via the marginal cdf.
    """
    marg = kernel.marginal(piece.normal)
    below = np.asarray(marg.cdf(-s_over_eps))
    above = marg.mass - below
    return (np.multiply.outer(below, piece.left_value)
            + np.multiply.outer(above, piece.right_value))


def _sphere_overlap_mass(kernel: Mollifier, dist_over_eps: float,
                         r_over_eps: float, dim: int) -> tuple[float, float]:
    """Route (b): (mass inside the sphere, total mass), radial kernels only.

    The angular measure of {omega : |x + eps*rho*omega - c| < r} is closed
    form (law of cosines); the mass reduces to a radial quadrature split at
    the tangency radii, where the angle has square-root behavior.
    """
    g = kernel._radial_profile
    rsup = kernel.support_radius
    d, r = dist_over_eps, r_over_eps
    full_angle = 2.0 * math.pi if dim == 2 else 4.0 * math.pi

    breaks = sorted({0.0, rsup} | {t for t in (abs(r - d), r + d)
                                   if 0.0 < t < rsup})
    inside = 0.0
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        # geometric sub-panels toward both ends temper the sqrt kinks
        edges = _graded_panel(a, b, 6)
        for pa, pb in zip(edges[:-1], edges[1:]):
            rho = 0.5 * (pb - pa) * (_GAUSS64_X + 1.0) + pa
            wq = 0.5 * (pb - pa) * _GAUSS64_W
            gv = g(rho)
            if dim == 2:
                vol = rho
            else:
                vol = rho ** 2
            ang = _overlap_angle(rho, d, r, dim)
            inside += float(np.sum(wq * gv * vol * ang))
            total += float(np.sum(wq * gv * vol)) * full_angle
    return inside, total


def _graded_panel(a: float, b: float, n: int) -> np.ndarray:
    ts = 0.5 * (1.0 - np.cos(np.linspace(0.0, math.pi, n + 1)))
    return a + (b - a) * ts


_GAUSS64_X, _GAUSS64_W = np.polynomial.legendre.leggauss(32)


def _overlap_angle(rho: np.ndarray, d: float, r: float, dim: int) -> np.ndarray:
    full = 2.0 * math.pi if dim == 2 else 4.0 * math.pi
    if d < 1e-14:
        return np.where(rho < r, full, 0.0)
    cosa = (d * d + rho ** 2 - r * r) / (2.0 * d * rho + 1e-300)
    cosa = np.clip(cosa, -1.0, 1.0)
    if dim == 2:
        return 2.0 * np.arccos(cosa)
    return 2.0 * math.pi * (1.0 - cosa)


def _gauss_boxes(kernel: Mollifier, lo: np.ndarray, hi: np.ndarray,
                 values: np.ndarray) -> np.ndarray:
    """sum over boxes of (Gauss-3 mass of eta over [lo_i, hi_i]) * value_i.

    lo/hi are (M, N) z-space box corners, values (M, d).
    """
    dim = lo.shape[1]
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    axes_nodes = [mid[:, k, None] + half[:, k, None] * _GAUSS5_X[None, :]
                  for k in range(dim)]
    total = np.zeros(values.shape[1])
    for combo in product(range(_GAUSS5_X.size), repeat=dim):
        pts = np.column_stack([axes_nodes[k][:, combo[k]]
                               for k in range(dim)])
        wgt = np.ones(lo.shape[0])
        for k in range(dim):
            wgt = wgt * (_GAUSS5_W[combo[k]] * half[:, k])
        dens = kernel.density(pts)
        total += (wgt * dens) @ values
    return total


def _split_plane_contribution(field, kernel, eps, x, lo, hi, axis,
                              z_split, piece) -> np.ndarray:
    """Exact cell split at an axis-aligned plane: two sub-boxes, one trace
    value each (z-space boxes (M, N); z_split per cell)."""
    s = np.clip(z_split, lo[:, axis], hi[:, axis])
    lo_a, hi_a = lo.copy(), hi.copy()
    hi_a[:, axis] = s
    lo_b, hi_b = lo.copy(), hi.copy()
    lo_b[:, axis] = s
    vals_a = np.tile(piece.left_value, (lo.shape[0], 1))
    vals_b = np.tile(piece.right_value, (lo.shape[0], 1))
    return (_gauss_boxes(kernel, lo_a, hi_a, vals_a)
            + _gauss_boxes(kernel, lo_b, hi_b, vals_b))


def _sphere_cell_columns(field: PiecewiseConstantField, kernel: Mollifier,
                         eps: float, x: np.ndarray, zc: np.ndarray,
                         h: float, piece: SpherePiece) -> np.ndarray:
    """Cell cut by a circle/sphere: per-column exact crossing.

    The cell splits into Gauss columns along the tangential axes; within
    each column the crossing along the dominant radial axis solves the
    sphere equation exactly, so the only residual error is the kernel
    quadrature itself.
    """
    dim = field.dim
    c = np.asarray(piece.center)
    p = x + eps * zc
    k = int(np.argmax(np.abs(p - c)))
    tangent_axes = [m for m in range(dim) if m != k]
    lo = zc - 0.5 * h
    hi = zc + 0.5 * h
    # Gauss nodes per tangential axis
    col_nodes = [0.5 * (lo[m] + hi[m]) + 0.5 * h * _GAUSS5_X
                 for m in tangent_axes]
    col_wgts = [0.5 * h * _GAUSS5_W for _ in tangent_axes]
    value = np.zeros(field.codim)
    grids = np.meshgrid(*col_nodes, indexing="ij") if tangent_axes else [()]
    if tangent_axes:
        cols = np.column_stack([g.ravel() for g in grids])
        wgts = np.ones(cols.shape[0])
        for i, wv in enumerate(col_wgts):
            wgts *= np.meshgrid(*col_wgts, indexing="ij")[i].ravel()
    else:
        cols = np.zeros((1, 0))
        wgts = np.ones(1)
    sign_k = 1.0 if p[k] >= c[k] else -1.0
    inner = piece.left_value
    outer = piece.right_value
    for col, wcol in zip(cols, wgts):
        zpt = zc.copy()
        for idx, m in enumerate(tangent_axes):
            zpt[m] = col[idx]
        perp = sum((x[m] + eps * zpt[m] - c[m]) ** 2
                   for m in range(dim) if m != k)
        disc = piece.radius ** 2 - perp
        seg = []
        if disc <= 0.0:
            seg.append((lo[k], hi[k], outer))
        else:
            root = math.sqrt(disc)
            s = (c[k] + sign_k * root - x[k]) / eps
            s = min(max(s, lo[k]), hi[k])
            if sign_k > 0:
                seg.append((lo[k], s, inner))
                seg.append((s, hi[k], outer))
            else:
                seg.append((lo[k], s, outer))
                seg.append((s, hi[k], inner))
        for a, b, val in seg:
            if b <= a:
                continue
            nodes = 0.5 * (a + b) + 0.5 * (b - a) * _GAUSS5_X
            w1 = 0.5 * (b - a) * _GAUSS5_W
            qpts = np.tile(zpt, (nodes.size, 1))
            qpts[:, k] = nodes
            dens = kernel.density(qpts)
            value += wcol * float(np.sum(w1 * dens)) * val
    return value


def _cut_cell_value(field: PiecewiseConstantField, kernel: Mollifier,
                    eps: float, x: np.ndarray, depth: int) -> np.ndarray:
    """Route (c): adaptive tensor quadrature of eta(z) * u(x + eps z).

    Cells provably inside one region (piece distance beyond the cell
    diagonal) integrate eta by Gauss against the exact region value.  Cells
    cut by a single axis-aligned face split exactly at the plane.  Cells
    cut by a sphere subdivide; their leaves split along the best axis at
    the circle crossing (curvature error O(h^2) per leaf).  Only cells
    meeting several pieces at the maximum depth fall back to a corner
    average.
    """
    dim = field.dim
    rsup = kernel.support_cube
    base = max(8, 2 * math.ceil(rsup / kernel.resolution_scale))
    h0 = 2.0 * rsup / base
    centers = (np.stack(np.meshgrid(
        *[(-rsup + h0 * (np.arange(base) + 0.5))] * dim, indexing="ij"),
        axis=-1).reshape(-1, dim))
    value = np.zeros(field.codim)
    h = h0
    corners = np.array(list(product((-0.5, 0.5), repeat=dim)))

    for level in range(depth + 1):
        if centers.shape[0] == 0:
            break
        pts = x[None, :] + eps * centers
        radius = eps * 0.5 * h * math.sqrt(dim)
        dists = np.stack([p.distance(pts) for p in field.pieces], axis=0)
        active = dists <= radius
        n_active = active.sum(axis=0)
        last = level == depth

        uniform = n_active == 0
        if np.any(uniform):
            ucells = centers[uniform]
            lo = ucells - 0.5 * h
            hi = ucells + 0.5 * h
            uvals = field.region_values(x[None, :] + eps * ucells)
            value += _gauss_boxes(kernel, lo, hi, uvals)

        handled = uniform.copy()
        for i, piece in enumerate(field.pieces):
            if not isinstance(piece, HyperplanePiece):
                continue
            mask = (~handled) & (n_active == 1) & active[i]
            if not np.any(mask):
                continue
            # the plane split is exact only where the face spans the cell
            clear = piece.tangential_clearance(pts[mask]) > radius
            sel = np.where(mask)[0][clear]
            if sel.size == 0:
                continue
            cells = centers[sel]
            lo = cells - 0.5 * h
            hi = cells + 0.5 * h
            z_split = np.full(sel.size,
                              (piece.offset - x[piece.axis]) / eps)
            value += _split_plane_contribution(field, kernel, eps, x, lo, hi,
                                               piece.axis, z_split, piece)
            handled[sel] = True

        for i, piece in enumerate(field.pieces):
            if not isinstance(piece, SpherePiece):
                continue
            # split once cells are flat against the circle's z-space radius
            if not (last or h <= 0.05 * piece.radius / eps):
                continue
            mask = (~handled) & (n_active == 1) & active[i]
            sel = np.where(mask)[0]
            if sel.size == 0:
                continue
            for j in sel:
                zc = centers[j]
                value += _sphere_cell_columns(field, kernel, eps, x, zc, h,
                                              piece)
                handled[j] = True

        if last:
            rest = centers[~handled]
            if rest.shape[0]:
                # corner-average fallback (multi-piece cells at max depth)
                eta_center = kernel.density(rest)
                probe = rest[:, None, :] + 0.45 * h * corners[None, :, :]
                uvals = field.region_values(
                    (x[None, None, :] + eps * probe).reshape(-1, dim))
                uvals = uvals.reshape(rest.shape[0], corners.shape[0], -1)
                value += (eta_center * h ** dim) @ uvals.mean(axis=1)
            break

        cut = centers[~handled]
        if cut.shape[0] == 0:
            break
        h = h / 2.0
        centers = (cut[:, None, :] + (corners * h)[None, :, :]).reshape(-1, dim)
    return value


def _classify_and_fill(field: PiecewiseConstantField, kernel: Mollifier,
                       eps: float, pts: np.ndarray,
                       policy: ResolutionPolicy) -> np.ndarray:
    n = pts.shape[0]
    rs = kernel.support_radius * eps
    if not field.pieces:
        return field.region_values(pts) * kernel.mass
    dists = np.stack([p.distance(pts) for p in field.pieces], axis=0)
    active = dists <= rs * (1.0 + 1e-12)
    n_active = active.sum(axis=0)

    values = np.zeros((n, field.codim))

    far = n_active == 0
    if np.any(far):
        values[far] = field.region_values(pts[far]) * kernel.mass

    # route (a): exactly one active piece, it is a hyperplane, and the point
    # projects well inside the face
    done = far.copy()
    for i, piece in enumerate(field.pieces):
        if not isinstance(piece, HyperplanePiece):
            continue
        mask = (~done) & (n_active == 1) & active[i]
        if not np.any(mask):
            continue
        clear = piece.tangential_clearance(pts[mask]) > rs
        sel = np.where(mask)[0][clear]
        if sel.size:
            s = pts[sel, piece.axis] - piece.offset
            values[sel] = _halfspace_values(piece, s / eps, kernel)
            done[sel] = True

    # route (b): radial kernel against a single sphere
    if kernel.is_radial:
        for i, piece in enumerate(field.pieces):
            if not isinstance(piece, SpherePiece):
                continue
            mask = (~done) & (n_active == 1) & active[i]
            idxs = np.where(mask)[0]
            c = np.asarray(piece.center)
            for j in idxs:
                d = float(np.linalg.norm(pts[j] - c))
                inner, total = _sphere_overlap_mass(
                    kernel, d / eps, piece.radius / eps, field.dim)
                # left_value is the inside trace (outward normal)
                values[j] = (piece.left_value * inner
                             + piece.right_value * (total - inner))
                done[j] = True

    # in 1D every configuration is exact: cut the stencil interval at the
    # jump offsets and sum region values against marginal cdf differences
    if field.dim == 1:
        rest = np.where(~done)[0]
        if rest.size:
            marg = kernel.marginal(np.array([1.0]))
            offsets = sorted(p.offset for p in field.pieces
                             if isinstance(p, HyperplanePiece))
            rsup = kernel.support_radius
            for j in rest:
                xj = pts[j, 0]
                cuts = [-rsup, rsup]
                cuts += [(p - xj) / eps for p in offsets
                         if abs(p - xj) < rsup * eps]
                cuts = sorted(cuts)
                acc = np.zeros(field.codim)
                for c0, c1 in zip(cuts[:-1], cuts[1:]):
                    if c1 <= c0:
                        continue
                    mid = xj + eps * 0.5 * (c0 + c1)
                    uval = field.region_values(np.array([[mid]]))[0]
                    acc += uval * (float(marg.cdf(c1)) - float(marg.cdf(c0)))
                values[j] = acc
                done[j] = True

    # route (c): everything else, one node at a time
    rest = np.where(~done)[0]
    for j in rest:
        values[j] = _cut_cell_value(field, kernel, eps, pts[j],
                                    policy.cut_cell_depth)
    return values


def mollify(field: PiecewiseConstantField, kernel: Mollifier, eps: float,
            target: Box, policy: ResolutionPolicy | None = None) -> SampledField:
    """u_eps = eta_eps * u sampled on a layer-resolving grid over ``target``."""
    if field.dim != kernel.dim or field.dim != target.dim:
        raise DimensionMismatch("field/kernel/target dimensions disagree")
    if not 0.0 < eps <= 1.0:
        raise ValueError("eps must lie in (0, 1]")
    policy = policy or ResolutionPolicy()
    axes = build_axes(field, eps, target, kernel, policy)
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([g.ravel() for g in grids])
    vals = _classify_and_fill(field, kernel, eps, pts, policy)
    shape = tuple(a.size for a in axes) + (field.codim,)
    out = SampledField(axes=axes, values=vals.reshape(shape), epsilon=eps,
                       box=target, source=field, kernel=kernel)
    out.layer_resolved = check_layer_resolution(out, policy.fine_factor)
    if not out.layer_resolved:
        raise LayerUnresolved("constructed grid misses the layer invariant")
    bound = field.linf_norm * kernel.l1_norm
    if out.linf() > bound * (1.0 + 1e-6) + 1e-12:
        raise AssertionError("mollified values exceed the L-inf mass bound")
    return out


def mollify_point(field: PiecewiseConstantField, kernel: Mollifier,
                  eps: float, x) -> np.ndarray:
    """Single-point convolution value (same routes as :func:`mollify`)."""
    pts = np.asarray(x, dtype=float).reshape(1, -1)
    if pts.shape[1] != field.dim:
        raise DimensionMismatch("point dimension mismatch")
    return _classify_and_fill(field, kernel, eps, pts, ResolutionPolicy())[0]


def gradient_bound_check(f: SampledField) -> GradientBoundReport:
    """Check max(|u_eps| + eps |grad u_eps|) against ||u||_inf ||eta||_W11.

    Central differences on a graded grid carry O(h) slack near spacing
    jumps; violations are flagged only beyond 5 percent.
    """
    if f.source is None or f.kernel is None:
        raise ValueError("field was not produced by mollify")
    combined = f.linf() + f.epsilon * f.max_gradient()
    bound = f.source.linf_norm * f.kernel.w11_norm
    return GradientBoundReport(
        max_value=f.linf(), max_combined=combined, bound=bound,
        slack=0.05, ok=combined <= bound * 1.05)


def field_l1_distance(f: SampledField, field: PiecewiseConstantField) -> float:
    """Discrete L1 distance between the sampled mollification and the raw
    field on the grid box (trapezoid weights on the graded grid)."""
    weights = None
    for a in f.axes:
        w = trapezoid_weights(a)
        weights = w if weights is None else np.multiply.outer(weights, w)
    grids = np.meshgrid(*f.axes, indexing="ij")
    pts = np.column_stack([g.ravel() for g in grids])
    raw = field.region_values(pts).reshape(f.values.shape)
    diff = np.linalg.norm(f.values - raw, axis=-1)
    return float(np.sum(weights * diff))

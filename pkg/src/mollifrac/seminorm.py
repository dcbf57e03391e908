"""Gagliardo W^{1/q,q} energies of sampled fields.

All operations return the q-th POWER of the seminorm — the double integral

    E_q(f, U) = int_U int_U |f(x)-f(y)|^q / |x-y|^{N+1} dy dx

— which is the quantity every limit statement normalizes by |ln eps|.

The generic evaluator uses the shift decomposition
E_q = int_z |z|^{-(N+1)} g(z) dz with g(z) = int |f(x+z)-f(x)|^q over the
admissible x set, sampled on a log-radial x angular grid; shells below the
innermost radius are covered by the eps-Lipschitz bound of mollified fields
and contribute only to the error estimate.  A scaled 1D layer-profile
oracle provides an independent high-accuracy route for single hyperplane
jumps, including closed-form far-field quadrants.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (DimensionMismatch, EpsilonTooLarge, LayerUnresolved,
                     MultipleJumpsInWindow, QClampError)
from .fields import Domain, HyperplanePiece, PiecewiseConstantField, SpherePiece
from .geometry import Box, BoxUnion
from .grids import tensor_interp, trapezoid_weights
from .kernels import Mollifier, sphere_area
from .mollify import SampledField

_GAUSS16_X, _GAUSS16_W = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class SeminormResult:
    value: float
    q: float
    domain: str
    method: str
    error_estimate: float

    def __post_init__(self):
        if self.value < -1e-12:
            raise ValueError("energy must be nonnegative")


@dataclass(frozen=True)
class EnergyParams:
    """Quadrature budget of the shift decomposition.

    64 log-spaced radii per decade and {2, 32, 128} directions in dimension
    {1, 2, 3}; the innermost shell radius is ``hmin_fraction * eps`` unless
    ``hmin_abs`` overrides it.
    """

    radial_per_decade: int = 64
    angular_half: tuple[int, int, int] = (1, 16, 64)
    hmin_fraction: float = 1e-3
    hmin_abs: float | None = None
    threads: int = 1
    flip_directions: bool = False

    def n_half(self, dim: int) -> int:
        return self.angular_half[dim - 1]


def _canonical_directions(dim: int, n_half: int, flip: bool) -> np.ndarray:
    """One representative per antipodal pair, canonicalized so that flipping
    every sign reproduces the identical set (exact +- symmetry)."""
    if dim == 1:
        dirs = np.array([[1.0]])
    elif dim == 2:
        th = math.pi * (np.arange(n_half) + 0.5) / n_half
        dirs = np.column_stack([np.cos(th), np.sin(th)])
    elif dim == 3:
        k = np.arange(n_half)
        z = (k + 0.5) / n_half
        golden = math.pi * (3.0 - math.sqrt(5.0))
        phi = golden * k
        rho = np.sqrt(1.0 - z ** 2)
        dirs = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    else:
        raise DimensionMismatch("directions exist for N in {1,2,3}")
    if flip:
        dirs = -dirs
    # canonical representative: last nonzero component positive
    for i in range(dirs.shape[0]):
        for c in dirs[i][::-1]:
            if abs(c) > 1e-14:
                if c < 0:
                    dirs[i] = -dirs[i]
                break
    return dirs


def _union_axis(nodes: np.ndarray, shift: float, lo: float,
                hi: float) -> np.ndarray | None:
    """Quadrature nodes for one axis of the x-integral of g(z): the grid
    nodes together with the grid shifted by -z, clipped to [lo, hi].

    The integrand |f(x+z)-f(x)|^q varies sharply both where x crosses a
    layer (resolved by the grid) and where x+z does (resolved by the
    shifted copy); merging the two keeps the trapezoid rule second order.
    """
    if hi <= lo:
        return None
    cand = np.concatenate([nodes, nodes - shift])
    cand = cand[(cand > lo) & (cand < hi)]
    merged = np.unique(np.concatenate([[lo], cand, [hi]]))
    keep = np.concatenate([[True],
                           np.diff(merged) > 1e-14 * max(1.0, hi - lo)])
    merged = merged[keep]
    if merged[-1] != hi:
        merged = np.concatenate([merged, [hi]])
    return merged if merged.size >= 2 else None


def _g_of_shift(f: SampledField, boxes: tuple[Box, ...], z: np.ndarray,
                q: float) -> float:
    """g(z): integral of |f(x+z)-f(x)|^q over x with x and x+z in the region.

    The admissible x set is a finite union of boxes (exact per-axis interval
    clipping — no staircase error); both field evaluations are multilinear
    interpolations on the union of the grid and its -z translate.
    """
    total = 0.0
    dim = f.dim
    for A in boxes:
        for B in boxes:
            lo = np.maximum(A.lo, np.asarray(B.lo) - z)
            hi = np.minimum(A.hi, np.asarray(B.hi) - z)
            if np.any(hi <= lo):
                continue
            qaxes = []
            w_axes = []
            ok = True
            for k in range(dim):
                nodes = _union_axis(f.axes[k], z[k], lo[k], hi[k])
                if nodes is None:
                    ok = False
                    break
                qaxes.append(nodes)
                w_axes.append(trapezoid_weights(nodes))
            if not ok:
                continue
            base = tensor_interp(f.values, f.axes, tuple(qaxes))
            shifted = tensor_interp(f.values, f.axes,
                                    tuple(a + z[k] for k, a in enumerate(qaxes)))
            diff = np.sqrt(np.sum((shifted - base) ** 2, axis=-1))
            integrand = diff ** q
            wgt = w_axes[0]
            for wk in w_axes[1:]:
                wgt = np.multiply.outer(wgt, wk)
            total += float(np.sum(wgt * integrand))
    return total


def _lipschitz_scale(f: SampledField) -> float:
    if f.source is not None and f.kernel is not None:
        return f.source.linf_norm * f.kernel.w11_norm / f.epsilon
    return f.max_gradient()


def _layer_volume_bound(f: SampledField, region_volume: float) -> float:
    if f.source is None or f.kernel is None:
        return region_volume
    eps = f.epsilon
    width = 2.0 * (f.kernel.support_radius + 2.0) * eps
    vol = sum(p.measure_total() * width for p in f.source.pieces)
    return min(region_volume, vol)


def gagliardo_energy(f: SampledField, omega: Domain | Box | BoxUnion,
                     q: float, params: EnergyParams | None = None,
                     extra_error: float = 0.0,
                     method_label: str = "shift_decomposition") -> SeminormResult:
    """Shift-decomposition evaluation of E_q(f, omega)."""
    if q <= 1.0:
        raise QClampError("Gagliardo energy requires q > 1")
    params = params or EnergyParams()
    if isinstance(omega, Domain):
        region = BoxUnion.of(omega.box)
    elif isinstance(omega, Box):
        region = BoxUnion.of(omega)
    else:
        region = omega
    if region.dim != f.dim:
        raise DimensionMismatch("field/domain dimension mismatch")
    for b in region.boxes:
        if not (np.all(np.asarray(b.lo) >= np.asarray(f.box.lo) - 1e-12)
                and np.all(np.asarray(b.hi) <= np.asarray(f.box.hi) + 1e-12)):
            raise ValueError("integration region exceeds the sampled grid")
    if f.source is not None and not f.layer_resolved:
        raise LayerUnresolved("sampled field does not resolve its layer")

    if float(np.ptp(f.values)) == 0.0:
        # constant fields have zero energy exactly
        return SeminormResult(0.0, q, _region_label(region), method_label,
                              extra_error)

    dim = f.dim
    hull = region.hull()
    r_max = hull.diameter
    h_min = params.hmin_abs if params.hmin_abs is not None \
        else params.hmin_fraction * f.epsilon
    if h_min <= 0 or h_min >= r_max:
        raise ValueError("invalid inner shell radius")

    dirs = _canonical_directions(dim, params.n_half(dim),
                                 params.flip_directions)
    w_dir = sphere_area(dim) / (2.0 * dirs.shape[0]) * 2.0  # pair weight

    dt = math.log(10.0) / params.radial_per_decade
    n_shell = int(math.ceil(math.log(r_max / h_min) / dt))
    t = math.log(h_min) + dt * (np.arange(n_shell) + 0.5)
    radii = np.exp(t)

    widths = hull.widths

    def per_direction(i: int) -> np.ndarray:
        omega_dir = dirs[i]
        # beyond this radius every per-axis overlap is empty
        with np.errstate(divide="ignore"):
            cap = np.min(np.where(np.abs(omega_dir) > 1e-14,
                                  widths / np.abs(omega_dir), np.inf))
        g = np.zeros(n_shell)
        for j, r in enumerate(radii):
            if r >= cap:
                break
            g[j] = _g_of_shift(f, region.boxes, r * omega_dir, q)
        return g

    if params.threads > 1:
        with ThreadPoolExecutor(max_workers=params.threads) as pool:
            g_all = list(pool.map(per_direction, range(dirs.shape[0])))
    else:
        g_all = [per_direction(i) for i in range(dirs.shape[0])]
    g_all = np.asarray(g_all)  # (n_dirs, n_shell)

    shell_w = dt * np.exp(-t)
    per_dir_vals = g_all @ shell_w
    value = w_dir * float(np.sum(per_dir_vals))

    # Richardson-style proxies: alternate shells (2*dt midpoint rule) and
    # alternate directions, both second-order on their own.
    odd = np.arange(n_shell) % 2 == 1
    value_coarse_r = w_dir * float(np.sum(g_all[:, odd] @ (2.0 * shell_w[odd])))
    err_radial = abs(value - value_coarse_r)
    if dirs.shape[0] > 1:
        half = np.arange(dirs.shape[0]) % 2 == 0
        value_coarse_a = 2.0 * w_dir * float(np.sum(per_dir_vals[half]))
        err_angular = abs(value - value_coarse_a)
    else:
        err_angular = 0.0

    lip = _lipschitz_scale(f)
    layer_vol = _layer_volume_bound(f, region.volume)
    err_small = (sphere_area(dim) * lip ** q * layer_vol
                 * h_min ** (q - 1.0) / (q - 1.0))

    return SeminormResult(
        value=value, q=q, domain=_region_label(region),
        method=method_label,
        error_estimate=err_small + err_radial + err_angular + extra_error)


def _region_label(region: BoxUnion) -> str:
    if len(region.boxes) == 1:
        b = region.boxes[0]
        return f"box{tuple(zip(b.lo, b.hi))}"
    return f"union[{len(region.boxes)} boxes]"


def relative_energy(f: SampledField, omega: Domain, q: float,
                    params: EnergyParams | None = None) -> SeminormResult:
    """E_q(f, R^N) - E_q(f, R^N minus closure(Omega)), truncated to the
    ambient box.

    The field must be sampled on the ambient box.  The discarded tail pairs
    one point inside the support with one beyond the ambient box, and is
    bounded analytically by ||f||_q^q * omega_{N-1} / margin; the bound goes
    into the error estimate.
    """
    params = params or EnergyParams()
    ambient = omega.ambient_box
    if not all(abs(a - b) < 1e-9 for a, b in zip(f.box.lo, ambient.lo)) or \
       not all(abs(a - b) < 1e-9 for a, b in zip(f.box.hi, ambient.hi)):
        raise ValueError("field must be sampled on the ambient box")

    # ||f||_q^q on the grid + distance from the (padded) support to the edge
    wgt = None
    for a in f.axes:
        w = trapezoid_weights(a)
        wgt = w if wgt is None else np.multiply.outer(wgt, w)
    fq = np.linalg.norm(f.values, axis=-1) ** q
    fq_mass = float(np.sum(wgt * fq))
    pad = (f.kernel.support_radius * f.epsilon) if f.kernel else 0.0
    margin = np.inf
    if f.source is not None:
        supp = f.source.support_box
        margin = min(
            min(s - a for s, a in zip(supp.lo, ambient.lo)),
            min(a - s for s, a in zip(supp.hi, ambient.hi))) - pad
    tail = 0.0 if not np.isfinite(margin) else \
        sphere_area(f.dim) * fq_mass / max(margin, 1e-12)

    whole = gagliardo_energy(f, Box(ambient.lo, ambient.hi), q, params)
    comp_boxes = omega.box.complement_within(ambient)
    comp = gagliardo_energy(f, BoxUnion(tuple(comp_boxes)), q, params)
    return SeminormResult(
        value=whole.value - comp.value, q=q,
        domain=f"relative({_region_label(BoxUnion.of(omega.box))})",
        method="shift_decomposition_relative",
        error_estimate=whole.error_estimate + comp.error_estimate + tail)


# ---------------------------------------------------------------------------
# 1D scaled-profile oracle
# ---------------------------------------------------------------------------

def _graded_subpanels(a: float, b: float, toward: str, levels: int = 36):
    """Panel edges geometrically refined toward one endpoint."""
    w = b - a
    fracs = 0.5 ** np.arange(levels, 0, -1)
    if toward == "left":
        edges = np.concatenate([[a], a + w * fracs, [b]])
    else:
        edges = np.concatenate([[a], b - w * fracs[::-1], [b]])
    return np.unique(edges)


def _panel_gauss(fn, edges: np.ndarray) -> float:
    total = 0.0
    for p, qq in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (p + qq)
        half = 0.5 * (qq - p)
        total += half * float(np.sum(_GAUSS16_W * fn(mid + half * _GAUSS16_X)))
    return total


def gagliardo_energy_1d_profile(eta: Mollifier, jump, eps: float,
                                interval: tuple[float, float], q: float,
                                w_min: float = 1e-9) -> SeminormResult:
    """High-accuracy oracle for a single 1D hyperplane jump at the origin.

    After scaling x -> x/eps the mollified step is Psi(s) = mass - C(-s)
    with C the marginal cdf, constant outside the kernel core [-R, R].  The
    scaled square (a, b)^2 with a = lo/eps, b = hi/eps splits into
    core x core (graded 2D quadrature via the difference variable),
    core x tail (1D quadrature against a closed-form kernel factor) and
    tail x tail (fully closed form — this block carries the |ln eps| mass).
    """
    if q <= 1.0:
        raise QClampError("profile oracle requires q > 1")
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < 0.0 < hi:
        raise ValueError("the jump (at 0) must lie inside the interval")
    jmag = float(np.linalg.norm(np.atleast_1d(jump)))
    if jmag == 0.0:
        return SeminormResult(0.0, q, f"interval({lo},{hi})",
                              "scaled_profile_1d", 0.0)
    marg = eta.marginal(np.array([1.0]))
    R = marg.support_radius
    a, b = lo / eps, hi / eps
    if a > -R or b < R:
        raise EpsilonTooLarge("kernel layer exits the domain at this eps")
    mass = marg.mass

    def psi(s):
        return mass - marg.cdf(-np.asarray(s))

    kinks = np.array([-R, 0.0, R])

    # core x core via w = s - t
    def g_of_w(w: float) -> float:
        s_lo, s_hi = max(-R, -R + w), R
        if s_hi <= s_lo:
            return 0.0
        brk = np.concatenate([kinks, kinks + w])
        brk = np.unique(np.clip(brk, s_lo, s_hi))
        edges = np.unique(np.concatenate([[s_lo], brk, [s_hi]]))

        def fn(s):
            return np.abs(psi(s) - psi(s - w)) ** q

        return _panel_gauss(fn, edges)

    n_dec = max(1, int(math.ceil(math.log10(2.0 * R / w_min))))
    w_edges = np.geomspace(w_min, 2.0 * R, 8 * n_dec + 1)
    cc = 0.0
    for p, qq in zip(w_edges[:-1], w_edges[1:]):
        mid = 0.5 * (p + qq)
        half = 0.5 * (qq - p)
        ws = mid + half * _GAUSS16_X
        vals = np.array([g_of_w(w) / w ** 2 for w in ws])
        cc += half * float(np.sum(_GAUSS16_W * vals))
    # analytic w < w_min leading term: g(w) ~ w^q * int |Psi'|^q
    psi_pow = marg.abs_pdf_power_integral(q)
    small_term = w_min ** (q - 1.0) / (q - 1.0) * psi_pow
    cc = 2.0 * (cc + small_term)

    # core x left tail (t in (a, -R)): Psi(t) = 0
    def f_left(s):
        return np.abs(psi(s)) ** q * (1.0 / (s + R) - 1.0 / (s - a))

    cl = 2.0 * _panel_gauss(f_left, _graded_subpanels(-R, R, "left"))

    # core x right tail (t in (R, b)): Psi(t) = mass
    def f_right(s):
        return np.abs(psi(s) - mass) ** q * (1.0 / (R - s) - 1.0 / (b - s))

    cr = 2.0 * _panel_gauss(f_right, _graded_subpanels(-R, R, "right"))

    # left tail x right tail: closed form
    lr = 2.0 * abs(mass) ** q * math.log(
        (R - a) * (b + R) / (2.0 * R * (b - a)))

    bracket = cc + cl + cr + lr
    value = jmag ** q * bracket
    # |lambda|^q-homogeneous by construction (exact jump scaling invariant)
    err = jmag ** q * (abs(small_term) * 0.5 + 1e-9 * abs(bracket))
    return SeminormResult(max(value, 0.0), q, f"interval({lo},{hi})",
                          "scaled_profile_1d", err)


def oracle_for_field(field: PiecewiseConstantField, omega: Domain | Box,
                     eta: Mollifier, eps: float, q: float) -> SeminormResult:
    """Profile-oracle energy of eta_eps * field over a 1D box domain.

    Requires exactly one jump inside the domain and all other jumps farther
    than the stencil radius from its closure, so the mollified field on the
    domain is exactly a single layer profile.
    """
    box = omega.box if isinstance(omega, Domain) else omega
    if field.dim != 1:
        raise DimensionMismatch("oracle is one-dimensional")
    inside = [p for p in field.pieces if box.lo[0] < p.offset < box.hi[0]]
    if len(inside) != 1:
        raise MultipleJumpsInWindow(
            f"expected one jump inside the domain, found {len(inside)}")
    piece = inside[0]
    rs = eta.support_radius * eps
    for p in field.pieces:
        if p is piece:
            continue
        gap = min(abs(p.offset - box.lo[0]), abs(p.offset - box.hi[0]))
        if box.lo[0] < p.offset < box.hi[0] or gap <= rs:
            raise MultipleJumpsInWindow(
                "another jump touches the mollified window")
    return gagliardo_energy_1d_profile(
        eta, piece.jump_vector, eps,
        (box.lo[0] - piece.offset, box.hi[0] - piece.offset), q)


# ---------------------------------------------------------------------------
# localized difference functional
# ---------------------------------------------------------------------------

def _localized_1d_side(gap_near: float, gap_far: float, eps: float) -> float:
    """(1/eps) * int_0^A log((a+m)/a) da with A = min(eps, gap_near) and
    m(a) = min(gap_far, eps - a): the one-sided straddling-pair integral of
    a 1D jump, truncated by the domain endpoints.  Closed form."""
    A = min(eps, gap_near)
    if A <= 0.0:
        return 0.0

    def F(x, c):  # antiderivative of log((a+c)/a)
        lhs = (x + c) * math.log(x + c) if x + c > 0 else 0.0
        rhs = x * math.log(x) if x > 0 else 0.0
        return lhs - rhs

    a_star = min(max(eps - gap_far, 0.0), A)
    total = 0.0
    if a_star > 0.0:
        c = gap_far
        total += (F(a_star, c) - c * 0.0) - F(0.0, c)
    if A > a_star:
        # m = eps - a: integrand log(eps/a)
        def G(x):
            return x * math.log(eps) - (x * math.log(x) - x if x > 0 else 0.0)

        total += G(A) - G(a_star)
    return total / eps


def _localized_hyperplane_2d(piece: HyperplanePiece, box: Box, q: float,
                             eps: float) -> float:
    """Deterministic quadrature of the straddling-pair integral around an
    axis-aligned line in a 2D box.

    For x at normal distance a from the line, the y-integral in polar
    coordinates is an arc-length profile (closed form, clipped by the
    tangential walls); the remaining (a, tangential) integral splits into a
    wall-free interior stretch and two end strips of width eps.
    """
    k, m = piece.axis, 1 - piece.axis
    c = piece.offset
    if min(c - box.lo[k], box.hi[k] - c) < eps:
        raise EpsilonTooLarge("ball radius reaches the wall behind the jump")
    lo_t = max(box.lo[m], piece.axis_interval(m)[0])
    hi_t = min(box.hi[m], piece.axis_interval(m)[1])
    ext = piece.axis_interval(m)
    if ext[0] > box.lo[m] + 1e-12 or ext[1] < box.hi[m] - 1e-12:
        raise NotImplementedError(
            "face must span the domain tangentially (catalog geometry)")
    big = hi_t - lo_t

    def gauss_nodes(edges):
        mids = 0.5 * (edges[:-1] + edges[1:])
        halves = 0.5 * (edges[1:] - edges[:-1])
        r = (mids[:, None] + halves[:, None] * _GAUSS16_X[None, :]).ravel()
        w = (halves[:, None] * _GAUSS16_W[None, :]).ravel()
        return r, w

    def h_trunc(a: float, d0, d1) -> np.ndarray:
        """int_a^eps arc(r) dr for one x; d0/d1 are tangential wall gaps,
        given as equal-length arrays (returns one value per pair)."""
        d0 = np.atleast_1d(np.asarray(d0, dtype=float))
        d1 = np.atleast_1d(np.asarray(d1, dtype=float))
        if a >= eps:
            return np.zeros(d0.size)
        r, w = gauss_nodes(_graded_subpanels(a, eps, "left", levels=20))
        th_a = np.arccos(np.clip(a / r, -1.0, 1.0))[None, :]
        up = np.arcsin(np.clip(d1[:, None] / r[None, :], 0.0, 1.0))
        dn = np.arcsin(np.clip(d0[:, None] / r[None, :], 0.0, 1.0))
        arc = np.minimum(th_a, up) + np.minimum(th_a, dn)
        return arc @ w

    a_nodes, a_w = gauss_nodes(_graded_subpanels(0.0, eps, "left", levels=20))
    # interior stretch: no tangential truncation
    interior = max(0.0, (hi_t - eps) - (lo_t + eps))
    h_free = np.array([float(h_trunc(a, big, big)[0]) for a in a_nodes])
    val = interior * float(a_w @ h_free)
    # end strips: tangential distance tau to the near wall in (0, eps)
    tau, tau_w = gauss_nodes(np.linspace(0.0, min(eps, big), 5))
    for low_end in (True, False):
        strip = np.zeros(a_nodes.size)
        for i, a in enumerate(a_nodes):
            d0 = tau if low_end else np.full_like(tau, big)
            d1 = np.full_like(tau, big) if low_end else tau
            strip[i] = float(tau_w @ h_trunc(a, d0, d1))
        val += float(a_w @ strip)

    # both orders (x left of the line, x right of it) see the same geometry
    return 2.0 * val / eps ** 2 * piece.jump_magnitude ** q


def _localized_sphere_mc(piece: SpherePiece, box: Box, q: float, eps: float,
                         samples: int, seed: int) -> tuple[float, float]:
    rng = np.random.Generator(np.random.Philox(key=seed))
    c = np.asarray(piece.center)
    r = piece.radius
    area_ann = math.pi * ((r + eps) ** 2 - max(r - eps, 0.0) ** 2)
    total = 0.0
    total_sq = 0.0
    done = 0
    chunk = 1 << 18
    while done < samples:
        m = min(chunk, samples - done)
        rad = np.sqrt(rng.uniform(max(r - eps, 0.0) ** 2, (r + eps) ** 2, m))
        ang = rng.uniform(0.0, 2.0 * math.pi, m)
        x = c + np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
        rho = rng.uniform(0.0, eps, m)
        th = rng.uniform(0.0, 2.0 * math.pi, m)
        y = x + np.column_stack([rho * np.cos(th), rho * np.sin(th)])
        in_box = ((x[:, 0] > box.lo[0]) & (x[:, 0] < box.hi[0])
                  & (x[:, 1] > box.lo[1]) & (x[:, 1] < box.hi[1])
                  & (y[:, 0] > box.lo[0]) & (y[:, 0] < box.hi[0])
                  & (y[:, 1] > box.lo[1]) & (y[:, 1] < box.hi[1]))
        straddle = ((np.linalg.norm(x - c, axis=1) - r)
                    * (np.linalg.norm(y - c, axis=1) - r)) < 0.0
        vals = (in_box & straddle).astype(float)
        total += float(np.sum(vals))
        total_sq += float(np.sum(vals * vals))
        done += m
    mean = total / samples
    var = max(0.0, total_sq / samples - mean * mean)
    scale = area_ann * eps * 2.0 * math.pi / eps ** 2 * piece.jump_magnitude ** q
    return scale * mean, scale * math.sqrt(var / samples)


def localized_functional(field: PiecewiseConstantField, omega: Domain | Box,
                         q: float, eps: float, mc_samples: int = 2_000_000,
                         seed: int = 0) -> float:
    """int_Omega int_{B_eps(x) cap Omega} eps^{-N} |u(y)-u(x)|^q / |y-x|.

    Takes the RAW piecewise-constant field.  Only pairs straddling a jump
    contribute, so for eps below half the jump separation the integral
    splits per piece: closed form in 1D, semi-analytic quadrature for
    axis-aligned 2D faces, seeded Monte Carlo for circles.
    """
    box = omega.box if isinstance(omega, Domain) else omega
    if box.dim != field.dim:
        raise DimensionMismatch("field/domain dimension mismatch")
    # every piece contributing inside Omega must be isolated there: pairs
    # straddling two different pieces need both within eps of the pair
    padded = box.pad(eps)
    for piece in field.pieces:
        pts = piece.sample_points(256)
        keep = np.all((pts > np.asarray(padded.lo) - 1e-12)
                      & (pts < np.asarray(padded.hi) + 1e-12), axis=1)
        pts = pts[keep]
        if pts.shape[0] == 0:
            continue
        for other in field.pieces:
            if other is piece:
                continue
            if float(other.distance(pts).min()) <= 2.0 * eps:
                raise EpsilonTooLarge(
                    f"eps={eps} too large: two jump pieces interact inside "
                    "the domain")
    total = 0.0
    for piece in field.pieces:
        if field.dim == 1:
            p = piece.offset
            if not box.lo[0] < p < box.hi[0]:
                continue
            jq = piece.jump_magnitude ** q
            total += jq * (_localized_1d_side(p - box.lo[0], box.hi[0] - p, eps)
                           + _localized_1d_side(box.hi[0] - p, p - box.lo[0], eps))
        elif isinstance(piece, HyperplanePiece):
            if piece.measure_in(box) == 0.0:
                continue
            total += _localized_hyperplane_2d(piece, box, q, eps)
        elif isinstance(piece, SpherePiece) and field.dim == 2:
            val, _ = _localized_sphere_mc(piece, box, q, eps, mc_samples, seed)
            total += val
        else:
            raise NotImplementedError(
                f"localized functional for {type(piece).__name__} in "
                f"dimension {field.dim}")
    return total


def energy_for(field: PiecewiseConstantField, eta: Mollifier, eps: float,
               omega: Domain | Box, q: float,
               params: EnergyParams | None = None,
               method: str = "auto") -> SeminormResult:
    """Mollify and evaluate E_q over Omega by the requested route.

    method: 'oracle' (1D single-jump profile), 'generic'
    (shift decomposition on a fresh layer-resolving grid), or 'auto'.
    """
    from .mollify import mollify

    box = omega.box if isinstance(omega, Domain) else omega
    if method == "auto":
        try:
            return oracle_for_field(field, box, eta, eps, q)
        except (MultipleJumpsInWindow, DimensionMismatch):
            method = "generic"
    if method == "oracle":
        return oracle_for_field(field, box, eta, eps, q)
    f = mollify(field, eta, eps, box)
    return gagliardo_energy(f, box, q, params)

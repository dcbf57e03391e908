"""Piecewise-constant test fields with exactly known jump geometry.

A field is constant on finitely many regions of R^N (N <= 3), vanishes
outside a compact support box, and carries an explicit list of jump pieces
(axis-aligned hyperplane faces, circles/spheres, 2D polylines) with exact
one-sided traces and exact H^{N-1} measures.  All jump-set bookkeeping
(energies, total variation, separations) is closed form; no quadrature
enters through the raw field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, OnJumpSet, UnknownCatalogEntry
from .geometry import Box

_JUMP_TOL = 1e-12


@dataclass(frozen=True)
class Domain:
    """Computational domain: the open box Omega inside a larger ambient box.

    The ambient box stands in for R^N when truncating whole-space integrals;
    fields must be supported strictly inside it.
    """

    dim: int
    box: Box
    ambient_box: Box

    def __post_init__(self):
        if self.box.dim != self.dim or self.ambient_box.dim != self.dim:
            raise DimensionMismatch("domain boxes do not match dim")
        if not self.ambient_box.contains_box(self.box, strict=True):
            raise ValueError("Omega box must sit strictly inside the ambient box")


class JumpPiece:
    """One rectifiable component of the jump set, with traces and normal."""

    left_value: np.ndarray   # trace on the (x - p) . nu < 0 side
    right_value: np.ndarray  # trace on the (x - p) . nu > 0 side

    @property
    def jump_vector(self) -> np.ndarray:
        return self.right_value - self.left_value

    @property
    def jump_magnitude(self) -> float:
        return float(np.linalg.norm(self.jump_vector))

    # subclasses implement:
    def measure_total(self) -> float:
        raise NotImplementedError

    def measure_in(self, box: Box) -> float:
        raise NotImplementedError

    def distance(self, points: np.ndarray) -> np.ndarray:
        """Euclidean distance from each point (row) to the piece."""
        raise NotImplementedError

    def axis_interval(self, axis: int) -> tuple[float, float]:
        """Projection of the piece onto a coordinate axis."""
        raise NotImplementedError

    def sample_points(self, n: int) -> np.ndarray:
        raise NotImplementedError


def _as_value(v) -> np.ndarray:
    a = np.atleast_1d(np.asarray(v, dtype=float))
    if a.ndim != 1:
        raise ValueError("trace values must be scalars or 1D vectors")
    return a


@dataclass(frozen=True)
class HyperplanePiece(JumpPiece):
    """Axis-aligned flat face {x_axis = offset} x extent.

    ``extent`` lists (lo, hi) for every axis other than ``axis`` in order;
    in 1D it is empty and the H^0 measure of the point is 1.  The normal is
    +e_axis, so ``left_value`` is the trace on the x_axis < offset side.
    """

    dim: int
    axis: int
    offset: float
    extent: tuple[tuple[float, float], ...]
    left_value: np.ndarray
    right_value: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "left_value", _as_value(self.left_value))
        object.__setattr__(self, "right_value", _as_value(self.right_value))
        if len(self.extent) != self.dim - 1:
            raise DimensionMismatch("extent must cover the tangential axes")
        if np.allclose(self.left_value, self.right_value, atol=_JUMP_TOL):
            raise ValueError("piece has no jump: traces coincide")

    @property
    def normal(self) -> np.ndarray:
        nu = np.zeros(self.dim)
        nu[self.axis] = 1.0
        return nu

    def _tangent_axes(self) -> list[int]:
        return [k for k in range(self.dim) if k != self.axis]

    def measure_total(self) -> float:
        if self.dim == 1:
            return 1.0
        return float(np.prod([hi - lo for lo, hi in self.extent]))

    def measure_in(self, box: Box) -> float:
        if box.dim != self.dim:
            raise DimensionMismatch("box dim does not match piece dim")
        if not (box.lo[self.axis] < self.offset < box.hi[self.axis]):
            return 0.0
        if self.dim == 1:
            return 1.0
        m = 1.0
        for (lo, hi), k in zip(self.extent, self._tangent_axes()):
            overlap = min(hi, box.hi[k]) - max(lo, box.lo[k])
            if overlap <= 0.0:
                return 0.0
            m *= overlap
        return m

    def distance(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d2 = (pts[:, self.axis] - self.offset) ** 2
        for (lo, hi), k in zip(self.extent, self._tangent_axes()):
            excess = np.maximum(0.0, np.maximum(lo - pts[:, k], pts[:, k] - hi))
            d2 = d2 + excess ** 2
        return np.sqrt(d2)

    def tangential_clearance(self, points: np.ndarray) -> np.ndarray:
        """Distance from each point's tangential coordinates to the extent edge.

        Positive where the point projects strictly inside the face; the
        half-space trace formula for mollification is exact only when this
        clearance exceeds the kernel stencil radius.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.dim == 1:
            return np.full(pts.shape[0], np.inf)
        c = np.full(pts.shape[0], np.inf)
        for (lo, hi), k in zip(self.extent, self._tangent_axes()):
            c = np.minimum(c, np.minimum(pts[:, k] - lo, hi - pts[:, k]))
        return c

    def axis_interval(self, axis: int) -> tuple[float, float]:
        if axis == self.axis:
            return (self.offset, self.offset)
        pos = self._tangent_axes().index(axis)
        return self.extent[pos]

    def sample_points(self, n: int) -> np.ndarray:
        if self.dim == 1:
            return np.array([[self.offset]])
        ts = np.linspace(0.0, 1.0, n + 2)[1:-1]
        axes = self._tangent_axes()
        grids = np.meshgrid(*[lo + (hi - lo) * ts for lo, hi in self.extent],
                            indexing="ij")
        pts = np.zeros((grids[0].size, self.dim))
        pts[:, self.axis] = self.offset
        for g, k in zip(grids, axes):
            pts[:, k] = g.ravel()
        return pts


@dataclass(frozen=True)
class SpherePiece(JumpPiece):
    """Circle (N=2) or sphere (N=3) with outward normal.

    ``left_value`` is the inside trace (the normal points outward).
    """

    dim: int
    center: tuple[float, ...]
    radius: float
    left_value: np.ndarray
    right_value: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "left_value", _as_value(self.left_value))
        object.__setattr__(self, "right_value", _as_value(self.right_value))
        if self.dim not in (2, 3):
            raise DimensionMismatch("sphere pieces exist in dimension 2 or 3")
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if np.allclose(self.left_value, self.right_value, atol=_JUMP_TOL):
            raise ValueError("piece has no jump: traces coincide")

    def measure_total(self) -> float:
        if self.dim == 2:
            return 2.0 * math.pi * self.radius
        return 4.0 * math.pi * self.radius ** 2

    def measure_in(self, box: Box) -> float:
        c = np.asarray(self.center)
        ball = Box(tuple(c - self.radius), tuple(c + self.radius))
        if box.contains_box(ball, strict=False):
            return self.measure_total()
        if box.intersect(ball) is None:
            return 0.0
        if self.dim == 3:
            raise NotImplementedError("partial sphere/box intersection in 3D")
        return self._arc_length_in(box)

    def _arc_length_in(self, box: Box) -> float:
        # Break the circle at every crossing with a box edge line, then keep
        # the arcs whose midpoints lie inside the box.
        cx, cy = self.center
        r = self.radius
        angles = [0.0]
        for coord, axis in ((box.lo[0], 0), (box.hi[0], 0),
                            (box.lo[1], 1), (box.hi[1], 1)):
            t = (coord - (cx if axis == 0 else cy)) / r
            if -1.0 < t < 1.0:
                a = math.acos(t)
                if axis == 0:
                    angles.extend([a, -a])
                else:
                    angles.extend([math.pi / 2 - a, math.pi / 2 + a])
        angles = sorted({(a % (2 * math.pi)) for a in angles})
        angles.append(angles[0] + 2 * math.pi)
        total = 0.0
        for a0, a1 in zip(angles[:-1], angles[1:]):
            mid = 0.5 * (a0 + a1)
            p = (cx + r * math.cos(mid), cy + r * math.sin(mid))
            if box.contains(p):
                total += (a1 - a0) * r
        return total

    def distance(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.abs(np.linalg.norm(pts - np.asarray(self.center), axis=1)
                      - self.radius)

    def axis_interval(self, axis: int) -> tuple[float, float]:
        return (self.center[axis] - self.radius, self.center[axis] + self.radius)

    def sample_points(self, n: int) -> np.ndarray:
        if self.dim == 2:
            th = np.linspace(0, 2 * math.pi, n, endpoint=False)
            return np.column_stack([self.center[0] + self.radius * np.cos(th),
                                    self.center[1] + self.radius * np.sin(th)])
        # coarse latitude/longitude sampling is enough for separation checks
        th = np.linspace(0.1, math.pi - 0.1, max(3, n // 8))
        ph = np.linspace(0, 2 * math.pi, 8, endpoint=False)
        T, P = np.meshgrid(th, ph, indexing="ij")
        return np.column_stack([
            self.center[0] + self.radius * np.sin(T).ravel() * np.cos(P).ravel(),
            self.center[1] + self.radius * np.sin(T).ravel() * np.sin(P).ravel(),
            self.center[2] + self.radius * np.cos(T).ravel(),
        ])


@dataclass(frozen=True)
class PolylinePiece(JumpPiece):
    """Chain of straight segments in 2D with a consistent left/right trace.

    The normal at a segment is the travel direction rotated +90 degrees, so
    ``left_value`` is the trace on the right-hand side of travel (where
    (x - p) . nu < 0).
    """

    dim: int
    vertices: tuple[tuple[float, float], ...]
    left_value: np.ndarray
    right_value: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "left_value", _as_value(self.left_value))
        object.__setattr__(self, "right_value", _as_value(self.right_value))
        if self.dim != 2:
            raise DimensionMismatch("polyline pieces are 2D only")
        if len(self.vertices) < 2:
            raise ValueError("polyline needs at least two vertices")
        if np.allclose(self.left_value, self.right_value, atol=_JUMP_TOL):
            raise ValueError("piece has no jump: traces coincide")

    def _segments(self):
        v = np.asarray(self.vertices, dtype=float)
        return v[:-1], v[1:]

    def measure_total(self) -> float:
        a, b = self._segments()
        return float(np.linalg.norm(b - a, axis=1).sum())

    def measure_in(self, box: Box) -> float:
        # Liang-Barsky clip of each segment against the box.
        a, b = self._segments()
        total = 0.0
        for p, q in zip(a, b):
            d = q - p
            t0, t1 = 0.0, 1.0
            ok = True
            for k in range(2):
                if abs(d[k]) < 1e-300:
                    if not (box.lo[k] <= p[k] <= box.hi[k]):
                        ok = False
                        break
                    continue
                ta = (box.lo[k] - p[k]) / d[k]
                tb = (box.hi[k] - p[k]) / d[k]
                if ta > tb:
                    ta, tb = tb, ta
                t0, t1 = max(t0, ta), min(t1, tb)
            if ok and t1 > t0:
                total += (t1 - t0) * float(np.linalg.norm(d))
        return total

    def distance(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        a, b = self._segments()
        best = np.full(pts.shape[0], np.inf)
        for p, q in zip(a, b):
            d = q - p
            L2 = float(d @ d)
            t = np.clip(((pts - p) @ d) / L2, 0.0, 1.0)
            proj = p + t[:, None] * d
            best = np.minimum(best, np.linalg.norm(pts - proj, axis=1))
        return best

    def axis_interval(self, axis: int) -> tuple[float, float]:
        v = np.asarray(self.vertices)
        return (float(v[:, axis].min()), float(v[:, axis].max()))

    def sample_points(self, n: int) -> np.ndarray:
        a, b = self._segments()
        ts = np.linspace(0.0, 1.0, max(2, n // len(a)))
        pts = [p + t * (q - p) for p, q in zip(a, b) for t in ts]
        return np.asarray(pts)


@dataclass(frozen=True)
class PiecewiseConstantField:
    """Compactly supported piecewise-constant field u: R^N -> R^d.

    ``region_map`` must accept an (M, N) array of points and return the
    (M, d) array of region values; it is the ground truth off the jump set
    and must be consistent with the per-piece traces (checked at build time).
    The exact norms are part of the construction because they enter the
    uniform energy bound: ``l1_norm`` = ||u||_L1, ``linf_norm`` = ||u||_Linf,
    ``total_variation`` = ||Du||(R^N) = sum |jump| * full piece measure.
    """

    dim: int
    codim: int
    pieces: tuple[JumpPiece, ...]
    region_map: Callable[[np.ndarray], np.ndarray]
    support_box: Box
    l1_norm: float
    linf_norm: float
    total_variation: float
    name: str = "custom"
    _skip_checks: bool = dc_field(default=False, repr=False)

    def __post_init__(self):
        if self.support_box.dim != self.dim:
            raise DimensionMismatch("support box dim mismatch")
        if not self._skip_checks:
            self._check_traces()

    def _check_traces(self):
        """Region map and stored traces must agree on both sides of each piece."""
        delta = 1e-7 * max(1.0, self.support_box.diameter)
        for piece in self.pieces:
            pts = piece.sample_points(3)
            nrm = self._normals_at(piece, pts)
            right = self.region_values(pts + delta * nrm)
            left = self.region_values(pts - delta * nrm)
            if not (np.allclose(right, piece.right_value[None, :], atol=1e-9)
                    and np.allclose(left, piece.left_value[None, :], atol=1e-9)):
                raise ValueError(
                    f"region_map disagrees with traces on piece {piece!r}")

    @staticmethod
    def _normals_at(piece: JumpPiece, pts: np.ndarray) -> np.ndarray:
        if isinstance(piece, HyperplanePiece):
            return np.tile(piece.normal, (pts.shape[0], 1))
        if isinstance(piece, SpherePiece):
            d = pts - np.asarray(piece.center)
            return d / np.linalg.norm(d, axis=1, keepdims=True)
        if isinstance(piece, PolylinePiece):
            a, b = piece._segments()
            # nearest-segment normal (direction rotated +90 deg)
            normals = np.zeros_like(pts)
            best = np.full(pts.shape[0], np.inf)
            for p, q in zip(a, b):
                d = q - p
                L2 = float(d @ d)
                t = np.clip(((pts - p) @ d) / L2, 0.0, 1.0)
                dist = np.linalg.norm(pts - (p + t[:, None] * d), axis=1)
                nu = np.array([-d[1], d[0]]) / math.sqrt(L2)
                closer = dist < best
                normals[closer] = nu
                best = np.minimum(best, dist)
            return normals
        raise TypeError(f"unknown piece type {type(piece)}")

    def region_values(self, points: np.ndarray) -> np.ndarray:
        """Raw region values at points, (M, N) -> (M, d); no jump-set guard.

        Points exactly on a jump get the side their region_map inequality
        assigns — a measure-zero, deterministic convention.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.dim:
            raise DimensionMismatch("points dim mismatch")
        vals = np.asarray(self.region_map(pts), dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        return vals

    def evaluate(self, x) -> np.ndarray:
        """Value of u at a single point strictly off the jump set."""
        x = np.asarray(x, dtype=float).reshape(1, -1)
        if x.shape[1] != self.dim:
            raise DimensionMismatch("point dim mismatch")
        for piece in self.pieces:
            if float(piece.distance(x)[0]) < _JUMP_TOL:
                raise OnJumpSet(f"point {x.ravel()} lies on a jump piece")
        return self.region_values(x)[0]

    def jump_energy(self, box: Box, q: float) -> float:
        """sum_pieces |u+ - u-|^q * H^{N-1}(piece inside box), exactly."""
        if box.dim != self.dim:
            raise DimensionMismatch("domain dim mismatch")
        if q <= 0:
            raise ValueError("q must be positive")
        return float(sum(p.jump_magnitude ** q * p.measure_in(box)
                         for p in self.pieces))

    def assert_boundary_clear(self, box: Box):
        """Check ||Du||(boundary of box) = 0: no piece carries measure on it."""
        for piece in self.pieces:
            if isinstance(piece, HyperplanePiece):
                k = piece.axis
                for face in (box.lo[k], box.hi[k]):
                    if abs(piece.offset - face) < _JUMP_TOL:
                        inner = Box(
                            tuple(v - 10 * _JUMP_TOL if i != k else v - 1.0
                                  for i, v in enumerate(box.lo)),
                            tuple(v + 10 * _JUMP_TOL if i != k else v + 1.0
                                  for i, v in enumerate(box.hi)))
                        if piece.measure_in(inner) > 0:
                            raise ValueError(
                                "jump piece lies on the domain boundary")
            # circles/polylines meet an axis-aligned boundary in measure zero
            # unless a polyline segment is collinear with a face:
            if isinstance(piece, PolylinePiece):
                a, b = piece._segments()
                for p, qq in zip(a, b):
                    for k in range(2):
                        if (abs(p[k] - qq[k]) < _JUMP_TOL and
                                (abs(p[k] - box.lo[k]) < _JUMP_TOL or
                                 abs(p[k] - box.hi[k]) < _JUMP_TOL)):
                            raise ValueError(
                                "polyline segment lies on the domain boundary")

    def min_piece_separation(self) -> float:
        """Lower estimate of the pairwise distance between jump pieces."""
        if len(self.pieces) < 2:
            return math.inf
        sep = math.inf
        samples = [p.sample_points(64) for p in self.pieces]
        for i, pi in enumerate(self.pieces):
            for j in range(i + 1, len(self.pieces)):
                sep = min(sep, float(pi.distance(samples[j]).min()))
                sep = min(sep, float(self.pieces[j].distance(samples[i]).min()))
        return sep


def jump_energy(field: PiecewiseConstantField, omega: Domain | Box, q: float) -> float:
    """Exact jump energy of ``field`` inside ``omega`` (see field method)."""
    box = omega.box if isinstance(omega, Domain) else omega
    return field.jump_energy(box, q)


def evaluate(field: PiecewiseConstantField, x) -> np.ndarray:
    return field.evaluate(x)


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def _step1d_box(height: float = 1.0) -> PiecewiseConstantField:
    h = float(height)
    val = np.array([h])

    def region_map(pts):
        x = pts[:, 0]
        return np.where((x > 0.0) & (x < 1.0), h, 0.0)[:, None]

    pieces = (
        HyperplanePiece(1, 0, 0.0, (), np.array([0.0]), val),
        HyperplanePiece(1, 0, 1.0, (), val, np.array([0.0])),
    )
    return PiecewiseConstantField(
        dim=1, codim=1, pieces=pieces, region_map=region_map,
        support_box=Box((0.0,), (1.0,)),
        l1_norm=abs(h), linf_norm=abs(h), total_variation=2 * abs(h),
        name="step1d_box")


def _two_jumps_1d(a: float = -1.0, b: float = 1.0) -> PiecewiseConstantField:
    a, b = float(a), float(b)

    def region_map(pts):
        x = pts[:, 0]
        out = np.zeros_like(x)
        out[(x > -1.0) & (x < 0.0)] = a
        out[(x > 0.0) & (x < 1.0)] = b
        return out[:, None]

    pieces = (
        HyperplanePiece(1, 0, -1.0, (), np.array([0.0]), np.array([a])),
        HyperplanePiece(1, 0, 0.0, (), np.array([a]), np.array([b])),
        HyperplanePiece(1, 0, 1.0, (), np.array([b]), np.array([0.0])),
    )
    return PiecewiseConstantField(
        dim=1, codim=1, pieces=pieces, region_map=region_map,
        support_box=Box((-1.0,), (1.0,)),
        l1_norm=abs(a) + abs(b), linf_norm=max(abs(a), abs(b)),
        total_variation=abs(a) + abs(b - a) + abs(b),
        name="two_jumps_1d")


def _vector_step(a=(1.0, 0.0), b=(-1.0, 0.0)) -> PiecewiseConstantField:
    va, vb = _as_value(a), _as_value(b)
    if va.shape != vb.shape:
        raise ValueError("vector_step values must share a dimension")
    d = va.size
    zero = np.zeros(d)

    def region_map(pts):
        x = pts[:, 0]
        out = np.zeros((x.size, d))
        out[(x > -1.0) & (x < 0.0)] = vb
        out[(x > 0.0) & (x < 1.0)] = va
        return out

    pieces = (
        HyperplanePiece(1, 0, -1.0, (), zero, vb),
        HyperplanePiece(1, 0, 0.0, (), vb, va),
        HyperplanePiece(1, 0, 1.0, (), va, zero),
    )
    na, nb = float(np.linalg.norm(va)), float(np.linalg.norm(vb))
    return PiecewiseConstantField(
        dim=1, codim=d, pieces=pieces, region_map=region_map,
        support_box=Box((-1.0,), (1.0,)),
        l1_norm=na + nb, linf_norm=max(na, nb),
        total_variation=na + float(np.linalg.norm(va - vb)) + nb,
        name="vector_step")


def _halfplane_in_square(height: float = 1.0) -> PiecewiseConstantField:
    """u = height on the rectangle (0,1) x (-1,1); with Omega = (-1/2,1/2)^2
    only the left face {0} x (-1,1) meets Omega, with H^1 measure 1, so
    jump_energy(Omega, q) = |height|^q.
    """
    h = float(height)
    val = np.array([h])
    zero = np.array([0.0])

    def region_map(pts):
        inside = ((pts[:, 0] > 0.0) & (pts[:, 0] < 1.0) &
                  (pts[:, 1] > -1.0) & (pts[:, 1] < 1.0))
        return np.where(inside, h, 0.0)[:, None]

    pieces = (
        HyperplanePiece(2, 0, 0.0, ((-1.0, 1.0),), zero, val),
        HyperplanePiece(2, 0, 1.0, ((-1.0, 1.0),), val, zero),
        HyperplanePiece(2, 1, -1.0, ((0.0, 1.0),), zero, val),
        HyperplanePiece(2, 1, 1.0, ((0.0, 1.0),), val, zero),
    )
    return PiecewiseConstantField(
        dim=2, codim=1, pieces=pieces, region_map=region_map,
        support_box=Box((0.0, -1.0), (1.0, 1.0)),
        l1_norm=2 * abs(h), linf_norm=abs(h), total_variation=6 * abs(h),
        name="halfplane_in_square")


def _disc_in_square(radius: float = 0.3, height: float = 1.0,
                    center=(0.5, 0.5)) -> PiecewiseConstantField:
    """u = height inside the disc; jump_energy(q) = |height|^q * 2*pi*radius
    for any box containing the full circle.
    """
    r, h = float(radius), float(height)
    c = np.asarray(center, dtype=float)

    def region_map(pts):
        inside = np.linalg.norm(pts - c, axis=1) < r
        return np.where(inside, h, 0.0)[:, None]

    piece = SpherePiece(2, tuple(c), r, np.array([h]), np.array([0.0]))
    return PiecewiseConstantField(
        dim=2, codim=1, pieces=(piece,), region_map=region_map,
        support_box=Box(tuple(c - r), tuple(c + r)),
        l1_norm=abs(h) * math.pi * r ** 2, linf_norm=abs(h),
        total_variation=abs(h) * 2 * math.pi * r,
        name="disc_in_square")


def box_indicator_field(box: Box, value) -> PiecewiseConstantField:
    """u = value inside an N-dimensional box (all faces are jump pieces).

    Not a catalog entry; used to build 3D smoke-test fields.
    """
    val = _as_value(value)
    zero = np.zeros_like(val)
    dim = box.dim
    lo = np.asarray(box.lo)
    hi = np.asarray(box.hi)

    def region_map(pts):
        inside = np.all((pts > lo) & (pts < hi), axis=1)
        return np.where(inside[:, None], val[None, :], zero[None, :])

    pieces = []
    for k in range(dim):
        extent = tuple((box.lo[i], box.hi[i]) for i in range(dim) if i != k)
        pieces.append(HyperplanePiece(dim, k, box.lo[k], extent, zero, val))
        pieces.append(HyperplanePiece(dim, k, box.hi[k], extent, val, zero))
    nv = float(np.linalg.norm(val))
    face_area = sum(p.measure_total() for p in pieces)
    return PiecewiseConstantField(
        dim=dim, codim=val.size, pieces=tuple(pieces), region_map=region_map,
        support_box=box,
        l1_norm=nv * box.volume, linf_norm=nv, total_variation=nv * face_area,
        name="box_indicator")


_CATALOG = {
    "step1d_box": _step1d_box,
    "two_jumps_1d": _two_jumps_1d,
    "vector_step": _vector_step,
    "halfplane_in_square": _halfplane_in_square,
    "disc_in_square": _disc_in_square,
}


def catalog(name: str, **params) -> PiecewiseConstantField:
    """Build a named test field with exact jump data.

    Known names: step1d_box, two_jumps_1d, vector_step, halfplane_in_square,
    disc_in_square.
    """
    try:
        builder = _CATALOG[name]
    except KeyError:
        raise UnknownCatalogEntry(
            f"no catalog entry '{name}'; known: {sorted(_CATALOG)}") from None
    return builder(**params)


def default_domain(field: PiecewiseConstantField) -> Domain:
    """Conventional Omega / ambient pair for each catalog family."""
    if field.name in ("step1d_box", "two_jumps_1d", "vector_step"):
        return Domain(1, Box((-0.5,), (0.5,)), Box((-2.5,), (2.5,)))
    if field.name == "halfplane_in_square":
        return Domain(2, Box((-0.5, -0.5), (0.5, 0.5)),
                      Box((-2.0, -2.0), (2.5, 2.0)))
    if field.name == "disc_in_square":
        return Domain(2, Box((0.0, 0.0), (1.0, 1.0)),
                      Box((-1.0, -1.0), (2.0, 2.0)))
    raise UnknownCatalogEntry(f"no default domain for field '{field.name}'")

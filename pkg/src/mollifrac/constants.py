"""Dimensional constants of the jump-energy limit formulas.

Two constants appear as jump-energy prefactors:

    D_N = integral over R^{N-1} of (1 + |v|^2)^(-(N+1)/2) dv
        = pi^{(N-1)/2} / Gamma((N+1)/2)          (Beta/Gamma identity)

    C_N = (1/N) * integral over S^{N-1} of |z_1| dH^{N-1}
        = (2/N) * pi^{(N-1)/2} / Gamma((N+1)/2)

Each closed form is validated against direct quadrature the first time a
dimension is requested; a seeded, block-deterministic importance-sampling
estimator provides an independent stochastic cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as sintegrate

from .errors import UnsupportedDimension
from .kernels import Marginal, Mollifier, sphere_area

MAX_DIM = 6
_MC_BLOCK = 1 << 19


@dataclass(frozen=True)
class DimensionalConstant:
    kind: str          # "D" or "C"
    dim: int
    value: float
    method: str        # closed_form | quadrature | monte_carlo
    std_error: float = 0.0

    def __post_init__(self):
        if self.value <= 0 and not (self.method == "monte_carlo"):
            raise ValueError("dimensional constants are positive")


def _check_dim(n: int):
    if not 1 <= n <= MAX_DIM:
        raise UnsupportedDimension(f"N={n} outside supported range 1..{MAX_DIM}")


def _d_closed(n: int) -> float:
    return math.pi ** ((n - 1) / 2.0) / math.gamma((n + 1) / 2.0)


def _c_closed(n: int) -> float:
    return 2.0 / n * math.pi ** ((n - 1) / 2.0) / math.gamma((n + 1) / 2.0)


def constant_D_quadrature(n: int) -> DimensionalConstant:
    """D_N by direct radial quadrature of the defining integral."""
    _check_dim(n)
    if n == 1:
        # integral over R^0: the single point carries unit mass
        return DimensionalConstant("D", 1, 1.0, "quadrature")
    k = n - 1
    val, _ = sintegrate.quad(
        lambda r: r ** (k - 1) * (1.0 + r * r) ** (-(n + 1) / 2.0),
        0.0, np.inf, limit=400)
    return DimensionalConstant("D", n, sphere_area(k) * val, "quadrature")


def constant_C_quadrature(n: int) -> DimensionalConstant:
    """C_N by latitude quadrature of the sphere integral."""
    _check_dim(n)
    if n == 1:
        # S^0 = {-1, +1} with counting measure
        return DimensionalConstant("C", 1, 2.0, "quadrature")
    val, _ = sintegrate.quad(
        lambda phi: abs(math.cos(phi)) * math.sin(phi) ** (n - 2),
        0.0, math.pi, limit=400, points=[math.pi / 2])
    return DimensionalConstant("C", n, sphere_area(n - 1) * val / n,
                               "quadrature")


_VALIDATED_D: set[int] = set()


def constant_D(n: int) -> DimensionalConstant:
    """Closed-form D_N, validated once per dimension against quadrature."""
    _check_dim(n)
    value = _d_closed(n)
    if n not in _VALIDATED_D:
        ref = constant_D_quadrature(n).value
        if abs(value - ref) > 1e-6 * abs(ref):
            raise AssertionError(
                f"D_{n} closed form {value} disagrees with quadrature {ref}")
        _VALIDATED_D.add(n)
    return DimensionalConstant("D", n, value, "closed_form")


def constant_C(n: int) -> DimensionalConstant:
    """Closed-form C_N (exact sphere integral; counting measure for N=1)."""
    _check_dim(n)
    return DimensionalConstant("C", n, _c_closed(n), "closed_form")


# ---------------------------------------------------------------------------
# Monte Carlo cross-checks
# ---------------------------------------------------------------------------

def _block_generator(seed: int, block: int) -> np.random.Generator:
    # Philox is counter-based: distinct counters give independent streams, so
    # the estimate is reproducible for a fixed (seed, samples, block size)
    # no matter how blocks are scheduled.
    return np.random.Generator(np.random.Philox(key=seed,
                                                counter=[0, 0, block, 0]))


def constant_D_monte_carlo(n: int, samples: int, seed: int) -> DimensionalConstant:
    """Importance-sampled D_N with a multivariate Cauchy proposal.

    The Cauchy tail (1+|v|^2)^(-N/2) is heavier than the integrand's
    (1+|v|^2)^(-(N+1)/2), so the weights C * (1+|v|^2)^(-1/2) are bounded
    and the estimator has finite, nonzero variance.
    """
    _check_dim(n)
    if n == 1:
        return DimensionalConstant("D", 1, 1.0, "monte_carlo", 0.0)
    if samples < 10_000:
        raise ValueError("need at least 1e4 samples")
    k = n - 1
    const = math.pi ** (n / 2.0) / math.gamma(n / 2.0)
    total = 0.0
    total_sq = 0.0
    done = 0
    block = 0
    while done < samples:
        m = min(_MC_BLOCK, samples - done)
        rng = _block_generator(seed, block)
        z = rng.standard_normal((m, k))
        denom = np.abs(rng.standard_normal(m))
        v = z / denom[:, None]
        w = const / np.sqrt(1.0 + np.einsum("ij,ij->i", v, v))
        total += float(np.sum(w))
        total_sq += float(np.sum(w * w))
        done += m
        block += 1
    mean = total / samples
    var = max(0.0, total_sq / samples - mean * mean)
    return DimensionalConstant("D", n, mean, "monte_carlo",
                               math.sqrt(var / samples))


def constant_C_monte_carlo(n: int, samples: int, seed: int) -> DimensionalConstant:
    """C_N by uniform sampling of S^{N-1} (exact counting sum for N=1)."""
    _check_dim(n)
    if n == 1:
        return DimensionalConstant("C", 1, 2.0, "monte_carlo", 0.0)
    if samples < 10_000:
        raise ValueError("need at least 1e4 samples")
    area = sphere_area(n)
    total = 0.0
    total_sq = 0.0
    done = 0
    block = 0
    while done < samples:
        m = min(_MC_BLOCK, samples - done)
        rng = _block_generator(seed, block)
        z = rng.standard_normal((m, n))
        f = np.abs(z[:, 0]) / np.linalg.norm(z, axis=1)
        total += float(np.sum(f))
        total_sq += float(np.sum(f * f))
        done += m
        block += 1
    mean = total / samples
    var = max(0.0, total_sq / samples - mean * mean)
    scale = area / n
    return DimensionalConstant("C", n, scale * mean, "monte_carlo",
                               scale * math.sqrt(var / samples))


# ---------------------------------------------------------------------------
# profile integral
# ---------------------------------------------------------------------------

def profile_integral(eta: Mollifier, nu, a: float, b: float) -> float:
    """Mass of eta between the hyperplanes {x.nu = a} and {x.nu = b}.

    Reduces the kernel to its 1D marginal along nu: the only way the kernel
    ever enters the layer asymptotics.  a and b may be +-inf.
    """
    marg: Marginal = eta.marginal(nu)
    return marg.integrate(a, b)

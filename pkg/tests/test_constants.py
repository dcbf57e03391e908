import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mollifrac import (constant_C, constant_C_monte_carlo, constant_D,
                       constant_D_monte_carlo, constant_D_quadrature,
                       gaussian_kernel, hat_kernel, profile_integral,
                       sphere_area)
from mollifrac.constants import constant_C_quadrature
from mollifrac.errors import UnsupportedDimension


class TestClosedForms:
    def test_d_small_dims(self):
        assert constant_D(1).value == pytest.approx(1.0)
        assert constant_D(2).value == pytest.approx(2.0)
        assert constant_D(3).value == pytest.approx(math.pi)
        assert constant_D(4).value == pytest.approx(4.0 * math.pi / 3.0)

    def test_c_small_dims(self):
        assert constant_C(1).value == pytest.approx(2.0)
        assert constant_C(2).value == pytest.approx(2.0)
        assert constant_C(3).value == pytest.approx(2.0 * math.pi / 3.0)

    @pytest.mark.parametrize("n", range(1, 7))
    def test_d_closed_vs_quadrature(self, n):
        closed = constant_D(n).value
        quad = constant_D_quadrature(n).value
        assert abs(closed - quad) <= 1e-6 * abs(quad)

    @pytest.mark.parametrize("n", range(1, 7))
    def test_c_closed_vs_quadrature(self, n):
        closed = constant_C(n).value
        quad = constant_C_quadrature(n).value
        assert closed == pytest.approx(quad, rel=1e-9)

    def test_unsupported_dimension(self):
        with pytest.raises(UnsupportedDimension):
            constant_D(7)
        with pytest.raises(UnsupportedDimension):
            constant_C(0)

    def test_sphere_area(self):
        assert sphere_area(1) == pytest.approx(2.0)
        assert sphere_area(2) == pytest.approx(2 * math.pi)
        assert sphere_area(3) == pytest.approx(4 * math.pi)


class TestMonteCarlo:
    def test_degenerate_dimension_one(self):
        mc = constant_D_monte_carlo(1, 10_000, 0)
        assert mc.value == 1.0 and mc.std_error == 0.0

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_brackets_closed_form(self, n):
        mc = constant_D_monte_carlo(n, 1_000_000, seed=11)
        assert mc.std_error > 0
        assert abs(mc.value - constant_D(n).value) <= 3.0 * mc.std_error

    def test_deterministic_for_fixed_seed(self):
        a = constant_D_monte_carlo(3, 200_000, seed=4)
        b = constant_D_monte_carlo(3, 200_000, seed=4)
        assert a.value == b.value and a.std_error == b.std_error
        c = constant_D_monte_carlo(3, 200_000, seed=5)
        assert c.value != a.value

    def test_bracketing_rate_over_seeds(self):
        # >= 99 of 100 seeded runs must land within 3 sigma
        hits = 0
        target = constant_D(2).value
        for seed in range(100):
            mc = constant_D_monte_carlo(2, 20_000, seed=seed)
            hits += abs(mc.value - target) <= 3.0 * mc.std_error
        assert hits >= 99

    def test_c_sphere_sampler(self):
        mc = constant_C_monte_carlo(3, 500_000, seed=2)
        assert abs(mc.value - constant_C(3).value) <= 3.0 * mc.std_error

    def test_minimum_sample_size(self):
        with pytest.raises(ValueError):
            constant_D_monte_carlo(2, 5000, 0)


class TestProfileIntegral:
    def test_full_mass(self, hat1d, gauss2d):
        assert profile_integral(hat1d, [1.0], -np.inf, np.inf) \
            == pytest.approx(1.0, abs=1e-12)
        assert profile_integral(gauss2d, [0.0, 1.0], -np.inf, np.inf) \
            == pytest.approx(1.0, abs=1e-9)

    def test_even_kernel_half_mass(self, gauss1d):
        assert profile_integral(gauss1d, [1.0], 0.0, np.inf) \
            == pytest.approx(0.5, abs=1e-9)

    def test_hat_closed_form(self, hat1d):
        assert profile_integral(hat1d, [1.0], 0.0, 0.5) \
            == pytest.approx(3.0 / 8.0, abs=1e-14)

    @given(a=st.floats(-1.2, 1.2), b=st.floats(-1.2, 1.2),
           c=st.floats(-1.2, 1.2))
    @settings(max_examples=60, deadline=None)
    def test_additivity(self, a, b, c, bump1d):
        a, b, c = sorted((a, b, c))
        lhs = (profile_integral(bump1d, [1.0], a, b)
               + profile_integral(bump1d, [1.0], b, c))
        rhs = profile_integral(bump1d, [1.0], a, c)
        assert lhs == pytest.approx(rhs, abs=1e-10)

    @pytest.mark.parametrize("dim", [2, 3])
    def test_rotation_invariance_radial(self, dim, rng):
        k = gaussian_kernel(dim=dim)
        base = None
        for _ in range(16):
            nu = rng.standard_normal(dim)
            nu /= np.linalg.norm(nu)
            val = profile_integral(k, nu, -0.3, 0.45)
            if base is None:
                base = val
            assert val == pytest.approx(base, abs=1e-8)

    def test_rejects_non_unit_direction(self, hat1d):
        with pytest.raises(ValueError):
            profile_integral(hat1d, [2.0], 0.0, 1.0)

import math

import numpy as np
import pytest

from mollifrac import (Box, GeometricSchedule, SweepSeries, bump_kernel,
                       catalog, default_domain, fit_log_slope, hat_kernel,
                       sweep, uniform_bound, verify_limit)
from mollifrac.errors import DegenerateFit
from mollifrac.fields import Domain, PiecewiseConstantField


def _series(values, eps, errs=None):
    errs = errs if errs is not None else [0.0] * len(values)
    sched = GeometricSchedule.from_bounds(eps[0], eps[-1], len(eps))
    return SweepSeries(list(zip(eps, values, errs)), sched, "synthetic")


class TestSchedule:
    def test_from_bounds(self):
        s = GeometricSchedule.from_bounds(0.1, 1e-4, 7)
        eps = s.epsilons()
        assert eps[0] == pytest.approx(0.1)
        assert eps[-1] == pytest.approx(1e-4)
        assert np.all(np.diff(np.log(eps)) < 0)
        ratios = eps[1:] / eps[:-1]
        assert np.allclose(ratios, ratios[0])

    def test_validation(self):
        with pytest.raises(ValueError):
            GeometricSchedule(0.1, 1.2, 5)
        with pytest.raises(ValueError):
            GeometricSchedule.from_bounds(1e-4, 0.1, 5)


class TestFit:
    def test_exact_affine(self):
        eps = GeometricSchedule.from_bounds(0.1, 1e-4, 9).epsilons()
        vals = [3.0 * abs(math.log(e)) + 5.0 for e in eps]
        fit = fit_log_slope(_series(vals, list(eps)))
        assert fit.slope == pytest.approx(3.0, abs=1e-12)
        assert fit.intercept == pytest.approx(5.0, abs=1e-12)
        assert fit.rms_residual < 1e-12

    def test_noisy_seeded(self):
        rng = np.random.default_rng(12345)
        eps = GeometricSchedule.from_bounds(0.1, 1e-4, 16).epsilons()
        vals = [3.0 * abs(math.log(e)) + 5.0 + rng.uniform(-0.01, 0.01)
                for e in eps]
        fit = fit_log_slope(_series(vals, list(eps)))
        assert 2.99 <= fit.slope <= 3.01

    def test_constant_series(self):
        eps = GeometricSchedule.from_bounds(0.1, 1e-3, 6).epsilons()
        fit = fit_log_slope(_series([7.0] * 6, list(eps)))
        assert fit.slope == pytest.approx(0.0, abs=1e-13)
        assert fit.intercept == pytest.approx(7.0)

    def test_degenerate(self):
        # equal abscissae can only be smuggled past the sweep validation
        series = SweepSeries.__new__(SweepSeries)
        series.entries = [(0.1, 1.0, 0.0)] * 4
        series.schedule = GeometricSchedule.from_bounds(0.1, 1e-3, 4)
        series.functional_id = "x"
        with pytest.raises(DegenerateFit):
            fit_log_slope(series)

    def test_weights_follow_error_estimates(self):
        eps = list(GeometricSchedule.from_bounds(0.1, 1e-4, 8).epsilons())
        vals = [2.0 * abs(math.log(e)) + 1.0 for e in eps]
        vals[0] += 5.0  # corrupt the first point
        errs = [1e-3] * 8
        errs[0] = 1e3   # and tell the fit to ignore it
        fit = fit_log_slope(_series(vals, eps, errs))
        assert fit.slope == pytest.approx(2.0, abs=1e-6)

    def test_stability_drop_largest_eps(self, step, step_domain, hat1d):
        sched = GeometricSchedule.from_bounds(10 ** -1.5, 1e-4, 10)
        series = sweep("gagliardo", step, hat1d, 2.0, step_domain, sched,
                       method="oracle")
        fit_all = fit_log_slope(series)
        trimmed = SweepSeries(series.entries[1:], series.schedule,
                              series.functional_id)
        fit_trim = fit_log_slope(trimmed)
        assert abs(fit_trim.slope - fit_all.slope) \
            <= 2.0 * max(fit_all.slope_stderr, fit_trim.slope_stderr)


class TestSweep:
    def test_requires_small_eps_max(self, step, step_domain, hat1d):
        with pytest.raises(ValueError):
            sweep("gagliardo", step, hat1d, 2.0, step_domain,
                  GeometricSchedule.from_bounds(0.5, 1e-3, 5))

    def test_values_increase_and_normalized_window(self, step, step_domain,
                                                   hat1d):
        sched = GeometricSchedule.from_bounds(1e-2, 1e-4, 9)
        series = sweep("gagliardo", step, hat1d, 2.0, step_domain, sched,
                       method="oracle")
        vals = series.values
        assert np.all(np.diff(vals) > 0)  # increasing as eps decreases
        ratios = vals / np.abs(np.log(series.epsilons))
        assert np.all((1.5 <= ratios) & (ratios <= 2.5))


class TestUniformBound:
    def test_zero_field(self, hat1d):
        const = PiecewiseConstantField(
            dim=1, codim=1, pieces=(),
            region_map=lambda p: np.zeros((p.shape[0], 1)),
            support_box=Box((-1.0,), (1.0,)), l1_norm=0.0, linf_norm=0.0,
            total_variation=0.0, name="zero")
        chk = uniform_bound(const, hat1d, 2.0, 1e-3, energy_value=0.0)
        assert chk.passed and chk.lhs == 0.0

    def test_box_indicator_hat(self, step, step_domain, hat1d):
        chk = uniform_bound(step, hat1d, 2.0, 1e-3, omega=step_domain)
        assert chk.passed
        assert chk.lhs > 0.0
        # third term dominates as eps -> 0
        assert chk.terms[2] == pytest.approx(chk.terms[1] * (2.0 - 1.0)
                                             * abs(math.log(1e-3)))

    def test_rejects_eps_outside_unit(self, step, hat1d):
        with pytest.raises(ValueError):
            uniform_bound(step, hat1d, 2.0, 1.5, energy_value=1.0)


@pytest.fixture(scope="module")
def sched():
    return GeometricSchedule.from_bounds(10 ** -1.5, 1e-3, 6)


class TestVerifyLimit:

    def test_pass_and_intermediates(self, step, step_domain, hat1d, sched):
        rep = verify_limit(step, hat1d, 2.0, step_domain, sched, 0.10,
                           method="oracle")
        assert rep.passed
        assert rep.predicted == pytest.approx(2.0)
        assert rep.jump_energy == pytest.approx(1.0)
        assert rep.dimension_constant == pytest.approx(1.0)
        assert len(rep.bound_checks) == 6
        assert all(c.passed for c in rep.bound_checks)

    @pytest.mark.parametrize("lam", [2.0, -1.0])
    def test_rescaling_invariance(self, lam, step_domain, hat1d, sched):
        base = verify_limit(catalog("step1d_box", height=1.0), hat1d, 2.0,
                            step_domain, sched, 0.10, method="oracle")
        scaled = verify_limit(catalog("step1d_box", height=lam), hat1d, 2.0,
                              step_domain, sched, 0.10, method="oracle")
        assert scaled.passed == base.passed
        assert scaled.fit.relative_gap == pytest.approx(
            base.fit.relative_gap, rel=1e-9)
        assert scaled.predicted == pytest.approx(
            abs(lam) ** 2 * base.predicted)

    def test_kernel_invariance_hat_vs_bump(self, step, step_domain, hat1d,
                                           sched):
        tol = 0.10
        rep_h = verify_limit(step, hat1d, 2.0, step_domain, sched, tol,
                             method="oracle")
        rep_b = verify_limit(step, bump_kernel(), 2.0, step_domain, sched,
                             tol, method="oracle")
        assert abs(rep_h.fit.slope - rep_b.fit.slope) <= 2.0 * tol * 2.0

    def test_report_serializes(self, step, step_domain, hat1d, sched):
        import json
        rep = verify_limit(step, hat1d, 2.0, step_domain, sched, 0.10,
                           method="oracle")
        text = json.dumps(rep.to_dict(), sort_keys=True)
        assert "predicted" in text


class TestRelativeEnergySlope:
    def test_relative_matches_omega_slope(self, step, step_domain, hat1d):
        # Corollary-style consistency: the whole-space-minus-complement
        # sweep and the Omega sweep extract the same limit (slope 2)
        sched_r = GeometricSchedule.from_bounds(10 ** -1.5, 1e-3, 6)
        rel = sweep("relative", step, hat1d, 2.0, step_domain, sched_r)
        om = sweep("gagliardo", step, hat1d, 2.0, step_domain, sched_r,
                   method="oracle")
        fit_rel = fit_log_slope(rel)
        fit_om = fit_log_slope(om)
        assert abs(fit_rel.slope - 2.0) <= 0.10 * 2.0
        assert abs(fit_om.slope - 2.0) <= 0.10 * 2.0
        assert abs(fit_rel.slope - fit_om.slope) <= 0.20 * 2.0


class TestDeterminism:
    def test_thread_count_invariance(self, halfplane, halfplane_domain,
                                     hat2d):
        from mollifrac import EnergyParams, mollify
        from mollifrac.seminorm import gagliardo_energy
        f = mollify(halfplane, hat2d, 0.05, halfplane_domain.box)
        v1 = gagliardo_energy(f, halfplane_domain.box, 2.0,
                              EnergyParams(threads=1)).value
        v4 = gagliardo_energy(f, halfplane_domain.box, 2.0,
                              EnergyParams(threads=4)).value
        assert v1 == v4  # bitwise: fixed-order reduction

    def test_sweep_constant_field_all_zero(self, hat1d):
        from mollifrac.fields import PiecewiseConstantField
        const = PiecewiseConstantField(
            dim=1, codim=1, pieces=(),
            region_map=lambda p: np.full((p.shape[0], 1), 2.0),
            support_box=Box((-1.0,), (1.0,)), l1_norm=4.0, linf_norm=2.0,
            total_variation=0.0, name="const")
        dom = Domain(1, Box((-0.5,), (0.5,)), Box((-2.0,), (2.0,)))
        series = sweep("gagliardo", const, hat1d, 2.0, dom,
                       GeometricSchedule.from_bounds(0.3, 1e-2, 4))
        assert np.all(series.values == 0.0)

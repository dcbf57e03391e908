"""Acceptance suite: one test per exit criterion, in order.

Each test prints a single PASS line when its criterion holds (run with -s
or read the -v test names); tolerances are pinned here and nowhere else.
"""

import json
import math
import time

import numpy as np
import pytest

from mollifrac import (Box, Domain, EnergyParams, GeometricSchedule,
                       box_indicator_field, bump_kernel, catalog,
                       constant_C, constant_C_monte_carlo, constant_D,
                       constant_D_quadrature, default_domain,
                       double_limit_verify, double_well_scalar,
                       gaussian_kernel, hat_kernel, localized_functional,
                       mollify, odd_bump_kernel, oracle_for_field,
                       profile_integral, verify_limit)
from mollifrac.seminorm import gagliardo_energy


SCHED_1D = GeometricSchedule.from_bounds(10 ** -1.5, 1e-4, 12)
SCHED_2D = GeometricSchedule.from_bounds(1e-1, 1e-3, 8)


def _report(criterion: str, detail: str):
    print(f"criterion {criterion}: PASS — {detail}")


@pytest.fixture(scope="module")
def c1_report():
    u = catalog("step1d_box", height=1.0)
    dom = default_domain(u)
    t0 = time.perf_counter()
    rep = verify_limit(u, hat_kernel(), 2.0, dom, SCHED_1D, tol=0.10,
                       method="oracle")
    rep.runtime = time.perf_counter() - t0
    return rep


@pytest.fixture(scope="module")
def c5_report():
    u = catalog("halfplane_in_square")
    dom = default_domain(u)
    t0 = time.perf_counter()
    rep = verify_limit(u, hat_kernel(dim=2), 2.0, dom, SCHED_2D, tol=0.15,
                       method="generic", params=EnergyParams(threads=4))
    rep.runtime = time.perf_counter() - t0
    return rep


def test_criterion_01_main_theorem_1d(c1_report):
    rep = c1_report
    assert rep.predicted == pytest.approx(2.0)
    assert rep.fit.relative_gap <= 0.10
    assert rep.passed
    assert rep.runtime < 60.0
    _report("1", f"1D slope {rep.fit.slope:.4f} vs 2.0 "
                 f"(gap {rep.fit.relative_gap:.2%}, {rep.runtime:.1f}s)")


def test_criterion_02_q_dependence():
    u = catalog("step1d_box", height=2.0)
    dom = default_domain(u)
    t0 = time.perf_counter()
    rep = verify_limit(u, hat_kernel(), 3.0, dom, SCHED_1D, tol=0.10,
                       method="oracle")
    runtime = time.perf_counter() - t0
    assert rep.predicted == pytest.approx(16.0)
    assert rep.fit.relative_gap <= 0.10
    assert rep.passed and runtime < 60.0
    _report("2", f"q=3 jump-2 slope {rep.fit.slope:.4f} vs 16.0 "
                 f"(gap {rep.fit.relative_gap:.2%})")


def test_criterion_03_kernel_invariance(c1_report):
    u = catalog("step1d_box", height=1.0)
    dom = default_domain(u)
    rep_g = verify_limit(u, gaussian_kernel(), 2.0, dom, SCHED_1D, tol=0.10,
                         method="oracle")
    a, b = c1_report.fit.slope, rep_g.fit.slope
    rel = abs(a - b) / (0.5 * (a + b))
    assert rel <= 0.20
    _report("3", f"hat {a:.4f} vs truncated-gaussian {b:.4f} "
                 f"(difference {rel:.2%} of mean)")


def test_criterion_04_zero_mass_kernel(c1_report):
    u = catalog("step1d_box", height=1.0)
    dom = default_domain(u)
    rep = verify_limit(u, odd_bump_kernel(), 2.0, dom, SCHED_1D, tol=0.05,
                       method="oracle")
    assert rep.predicted == 0.0
    assert abs(rep.fit.slope) <= 0.05 * c1_report.fit.slope
    assert rep.passed
    _report("4", f"zero-mass |slope| {abs(rep.fit.slope):.4f} "
                 f"<= 5% of {c1_report.fit.slope:.4f}")


def test_criterion_05_main_theorem_2d(c5_report):
    rep = c5_report
    assert rep.predicted == pytest.approx(4.0)
    assert rep.fit.relative_gap <= 0.15
    assert rep.passed
    assert rep.runtime < 600.0
    _report("5", f"2D slope {rep.fit.slope:.4f} vs 4.0 "
                 f"(gap {rep.fit.relative_gap:.2%}, {rep.runtime:.0f}s)")


def test_criterion_06_localized_functional():
    u = catalog("step1d_box")
    dom = default_domain(u)
    for q in (1.5, 2.0, 3.0):
        for eps in (0.4, 0.1, 0.01):
            val = localized_functional(u, dom.box, q, eps)
            assert val == pytest.approx(2.0, abs=1e-8)
    hp = catalog("halfplane_in_square")
    hp_dom = default_domain(hp)
    val2 = localized_functional(hp, hp_dom.box, 2.0, 0.01)
    assert val2 == pytest.approx(2.0, rel=0.03)
    _report("6", f"1D exactly 2.0 (tol 1e-8); 2D {val2:.4f} within 3%")


def test_criterion_07_uniform_bound_everywhere(c1_report, c5_report):
    u1 = catalog("step1d_box", height=1.0)
    dom1 = default_domain(u1)
    u2h = catalog("step1d_box", height=2.0)
    checks = list(c1_report.bound_checks) + list(c5_report.bound_checks)
    # criteria 2-4 evaluate the same way; re-run their envelope batches
    for rep_args in (
            (u2h, hat_kernel(), 3.0, dom1),
            (u1, gaussian_kernel(), 2.0, dom1),
            (u1, odd_bump_kernel(), 2.0, dom1)):
        rep = verify_limit(*rep_args[:3], rep_args[3], SCHED_1D, tol=0.99,
                           method="oracle")
        checks.extend(rep.bound_checks)
    assert len(checks) >= 12 * 4 + 8
    violations = [c for c in checks if not c.passed]
    assert not violations
    _report("7", f"envelope holds at all {len(checks)} sweep points "
                 "(zero violations)")


def test_criterion_08_constants():
    for n in range(1, 7):
        closed = constant_D(n).value
        quad = constant_D_quadrature(n).value
        assert abs(closed - quad) <= 1e-6 * abs(quad)
    mc2 = constant_C_monte_carlo(2, 10_000_000, seed=7)
    mc3 = constant_C_monte_carlo(3, 10_000_000, seed=7)
    assert abs(mc2.value - 2.0) <= 3.0 * mc2.std_error
    assert abs(mc3.value - 2.0 * math.pi / 3.0) <= 3.0 * mc3.std_error
    _report("8", f"D_1..6 closed=quadrature to 1e-6; C_2 mc "
                 f"{mc2.value:.5f}±{mc2.std_error:.1e}, C_3 mc "
                 f"{mc3.value:.5f}±{mc3.std_error:.1e} within 3σ")


def test_criterion_09_double_limit():
    u = catalog("two_jumps_1d", a=-1.0, b=1.0)
    dom = default_domain(u)
    rep = double_limit_verify(
        u, bump_kernel(), double_well_scalar(), 2.0, dom,
        rho_schedule=[0.2, 0.1, 0.05],
        eps_schedule=np.geomspace(10 ** -1.5, 1e-3, 8), tol=0.10)
    assert rep.target == pytest.approx(8.0)
    assert abs(rep.extrapolated - 8.0) <= 0.10 * 8.0
    plat = [r["plateau"] for r in rep.rho_rows]
    assert 1.5 <= plat[0] / plat[1] <= 2.5
    assert 1.5 <= plat[1] / plat[2] <= 2.5
    assert rep.mean_error_max <= 1e-12
    assert rep.passed
    _report("9", f"double limit {rep.extrapolated:.4f} vs 8.0; plateau "
                 f"ratios {plat[0]/plat[1]:.2f}, {plat[1]/plat[2]:.2f}; "
                 f"mean error {rep.mean_error_max:.1e}")


def test_criterion_10_oracle_equivalence():
    u = catalog("step1d_box")
    dom = default_domain(u)
    hat = hat_kernel()
    gaps = {}
    for eps in (1e-2, 1e-3):
        f = mollify(u, hat, eps, dom.box)
        gen = gagliardo_energy(f, dom.box, 2.0)
        orc = oracle_for_field(u, dom.box, hat, eps, 2.0)
        gaps[eps] = abs(gen.value - orc.value) / orc.value
        assert gaps[eps] <= 0.01
    _report("10", "generic vs oracle gaps "
                  + ", ".join(f"{e:g}: {g:.2e}" for e, g in gaps.items()))


def test_criterion_11_property_suite(tmp_path):
    u = catalog("step1d_box")
    dom = default_domain(u)
    hat = hat_kernel()
    # q-homogeneity at 1e-10
    f = mollify(u, hat, 0.02, dom.box)
    base = gagliardo_energy(f, dom.box, 2.0).value
    for lam in (2.0, -1.0):
        val = gagliardo_energy(f.scaled(lam), dom.box, 2.0).value
        assert val == pytest.approx(abs(lam) ** 2 * base, rel=1e-10)
    # translation invariance at 1e-10
    moved = gagliardo_energy(f.translated([3.5]), dom.box.shift([3.5]),
                             2.0).value
    assert moved == pytest.approx(base, rel=1e-10)
    # jump-energy additivity at 1e-12
    u2 = catalog("two_jumps_1d")
    omega = Box((-1.5,), (1.5,))
    parts = (u2.jump_energy(Box((-1.5,), (0.3,)), 2.0)
             + u2.jump_energy(Box((0.3,), (1.5,)), 2.0))
    assert parts == pytest.approx(u2.jump_energy(omega, 2.0), abs=1e-12)
    # profile-integral additivity at 1e-10
    g = gaussian_kernel()
    lhs = (profile_integral(g, [1.0], -0.8, 0.1)
           + profile_integral(g, [1.0], 0.1, 0.6))
    assert lhs == pytest.approx(profile_integral(g, [1.0], -0.8, 0.6),
                                abs=1e-10)
    # determinism: byte-identical reports modulo the meta field
    from click.testing import CliRunner
    from mollifrac.cli import main
    from mollifrac.reporting import strip_meta
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "experiment": "verify",
        "field": {"name": "step1d_box"},
        "kernel": {"kind": "hat_tensor"},
        "q": 2.0,
        "schedule": {"eps_max": 0.0316227766016838, "eps_min": 0.001,
                     "count": 6},
        "tolerance": 0.10, "method": "oracle", "seed": 3}))
    runner = CliRunner()
    for out in ("a", "b"):
        code = runner.invoke(main, ["verify", "--config", str(cfg),
                                    "--out", str(tmp_path / out)]).exit_code
        assert code == 0
    assert strip_meta(tmp_path / "a" / "report.json") \
        == strip_meta(tmp_path / "b" / "report.json")
    _report("11", "homogeneity, translation, additivity, determinism all "
                  "within pinned tolerances")


@pytest.mark.slow
def test_extra_3d_smoke():
    """Beyond the acceptance list: one 3D slope extraction at 20%.

    Budget parameters are cut far below the 1D/2D defaults (documented
    desk-scale limit for N=3); the 20% tolerance reflects that.
    """
    from mollifrac import ResolutionPolicy
    from mollifrac.asymptotics import SweepSeries, fit_log_slope

    u = box_indicator_field(Box((0.0, 0.0, 0.0), (1.0, 1.0, 1.0)), 1.0)
    omega = Box((-0.4, 0.2, 0.2), (0.4, 0.8, 0.8))
    # only the x1 = 0 face meets Omega: J_q = 0.6^2 = 0.36
    predicted = 2.0 * math.pi * 0.36
    sched = GeometricSchedule.from_bounds(10 ** -1.2, 10 ** -2.4, 6)
    params = EnergyParams(radial_per_decade=16, angular_half=(1, 16, 16),
                          hmin_fraction=0.03, threads=4)
    policy = ResolutionPolicy(coarse_h=0.1)
    entries = []
    for eps in sched.epsilons():
        f = mollify(u, hat_kernel(dim=3), eps, omega, policy)
        res = gagliardo_energy(f, omega, 2.0, params)
        entries.append((float(eps), res.value, res.error_estimate))
    fit = fit_log_slope(SweepSeries(entries, sched, "gagliardo"), predicted)
    assert fit.relative_gap <= 0.20
    _report("3D smoke", f"slope {fit.slope:.4f} vs {predicted:.4f} "
                        f"(gap {fit.relative_gap:.2%})")

import math

import numpy as np
import pytest

from mollifrac import (Box, EnergyParams, catalog, default_domain,
                       gagliardo_energy, gagliardo_energy_1d_profile,
                       hat_kernel, localized_functional, mollify,
                       oracle_for_field, relative_energy)
from mollifrac.errors import (EpsilonTooLarge, LayerUnresolved,
                              MultipleJumpsInWindow, QClampError)
from mollifrac.mollify import SampledField


def _linear_field(n=257):
    axes = (np.linspace(0.0, 1.0, n),)
    return SampledField(axes=axes, values=axes[0][:, None].copy(),
                        epsilon=1.0, box=Box((0.0,), (1.0,)))


class TestGagliardoBasics:
    def test_constant_field_zero(self):
        axes = (np.linspace(0.0, 1.0, 65),)
        f = SampledField(axes=axes, values=np.full((65, 1), 2.5),
                         epsilon=1.0, box=Box((0.0,), (1.0,)))
        res = gagliardo_energy(f, Box((0.0,), (1.0,)), 2.0,
                               EnergyParams(hmin_abs=1e-4))
        assert res.value == 0.0

    def test_linear_field_unit_energy(self):
        # |x-y|^2 / |x-y|^2 == 1 on the unit interval: the energy is exactly
        # the area of the unit square
        res = gagliardo_energy(_linear_field(), Box((0.0,), (1.0,)), 2.0,
                               EnergyParams(hmin_abs=1e-6))
        assert res.value == pytest.approx(1.0, rel=2e-3)

    def test_rejects_q_at_most_one(self):
        with pytest.raises(QClampError):
            gagliardo_energy(_linear_field(), Box((0.0,), (1.0,)), 1.0)

    def test_rejects_unresolved_layer(self, step, hat1d, step_domain):
        f = mollify(step, hat1d, 0.05, step_domain.box)
        bad = SampledField(axes=(f.axes[0][::4],), values=f.values[::4],
                           epsilon=f.epsilon, box=f.box, source=f.source,
                           kernel=f.kernel, layer_resolved=False)
        with pytest.raises(LayerUnresolved):
            gagliardo_energy(bad, step_domain.box, 2.0)


class TestProfileOracle:
    # expected values computed by brute force: u_eps(x) = Phi(x/eps) with
    # the hat-kernel cdf Phi, trapezoid quadrature of the double integral
    # (4000 log-spaced difference shells x 4000 nodes), agreeing with the
    # oracle to ~6e-6 relative
    FROZEN = {1.5: 11.015555, 2.0: 8.774609, 3.0: 7.489927}

    @pytest.mark.parametrize("q", sorted(FROZEN))
    def test_frozen_values(self, q, step, step_domain, hat1d):
        res = oracle_for_field(step, step_domain.box, hat1d, 0.01, q)
        assert res.value == pytest.approx(self.FROZEN[q], rel=5e-5)

    def test_zero_jump(self, hat1d):
        res = gagliardo_energy_1d_profile(hat1d, 0.0, 1e-3, (-0.5, 0.5), 2.0)
        assert res.value == 0.0

    def test_jump_homogeneity_exact(self, hat1d):
        base = gagliardo_energy_1d_profile(hat1d, 1.0, 1e-3, (-0.5, 0.5), 2.0)
        lam = gagliardo_energy_1d_profile(hat1d, -3.0, 1e-3, (-0.5, 0.5), 2.0)
        assert lam.value == pytest.approx(9.0 * base.value, rel=1e-12)

    def test_slope_window(self, step, step_domain, hat1d):
        res = oracle_for_field(step, step_domain.box, hat1d, 1e-3, 2.0)
        ratio = res.value / abs(math.log(1e-3))
        assert 2.0 * 0.85 <= ratio <= 2.0 * 1.15

    def test_multiple_jumps_rejected(self, pm_step, hat1d):
        with pytest.raises(MultipleJumpsInWindow):
            oracle_for_field(pm_step, Box((-1.5,), (1.5,)), hat1d, 1e-3, 2.0)

    def test_vector_jump_magnitude(self, hat1d):
        scalar = gagliardo_energy_1d_profile(hat1d, 2.0, 1e-2,
                                             (-0.5, 0.5), 2.0)
        vector = gagliardo_energy_1d_profile(hat1d, np.array([2.0, 0.0]),
                                             1e-2, (-0.5, 0.5), 2.0)
        assert vector.value == pytest.approx(scalar.value, rel=1e-14)


class TestOracleAgreement:
    def test_generic_matches_oracle(self, step, step_domain, hat1d):
        eps = 1e-2
        f = mollify(step, hat1d, eps, step_domain.box)
        gen = gagliardo_energy(f, step_domain.box, 2.0)
        orc = oracle_for_field(step, step_domain.box, hat1d, eps, 2.0)
        assert gen.value == pytest.approx(orc.value, rel=0.01)


class TestInvariances:
    @pytest.mark.parametrize("lam", [2.0, -1.0])
    def test_q_homogeneity(self, lam, step, step_domain, hat1d):
        f = mollify(step, hat1d, 0.02, step_domain.box)
        params = EnergyParams()
        base = gagliardo_energy(f, step_domain.box, 2.0, params).value
        scaled = gagliardo_energy(f.scaled(lam), step_domain.box, 2.0,
                                  params).value
        assert scaled == pytest.approx(abs(lam) ** 2 * base, rel=1e-10)

    def test_translation_invariance(self, step, hat1d):
        eps = 0.02
        box = Box((-0.5,), (0.5,))
        f = mollify(step, hat1d, eps, box)
        base = gagliardo_energy(f, box, 2.0).value
        shift = 7.25
        moved = f.translated([shift])
        shifted_box = box.shift([shift])
        val = gagliardo_energy(moved, shifted_box, 2.0).value
        assert val == pytest.approx(base, rel=1e-10)

    def test_direction_flip_is_exact(self, halfplane, halfplane_domain, hat2d):
        f = mollify(halfplane, hat2d, 0.05, halfplane_domain.box)
        a = gagliardo_energy(f, halfplane_domain.box, 2.0,
                             EnergyParams(flip_directions=False)).value
        b = gagliardo_energy(f, halfplane_domain.box, 2.0,
                             EnergyParams(flip_directions=True)).value
        assert a == b  # canonical +- pair representatives: bitwise equal

    def test_error_estimate_decreases_under_refinement(self, step,
                                                       step_domain, hat1d):
        f = mollify(step, hat1d, 0.02, step_domain.box)
        coarse = gagliardo_energy(f, step_domain.box, 2.0,
                                  EnergyParams(radial_per_decade=32,
                                               hmin_fraction=1e-2))
        fine = gagliardo_energy(f, step_domain.box, 2.0,
                                EnergyParams(radial_per_decade=64,
                                             hmin_fraction=5e-3))
        assert fine.error_estimate < coarse.error_estimate


class TestRelativeEnergy:
    def test_constant_zero(self, hat1d):
        from mollifrac.fields import Domain
        dom = Domain(1, Box((-0.5,), (0.5,)), Box((-2.0,), (2.0,)))
        axes = (np.linspace(-2.0, 2.0, 129),)
        f = SampledField(axes=axes, values=np.full((129, 1), 1.25),
                         epsilon=0.5, box=dom.ambient_box)
        res = relative_energy(f, dom, 2.0, EnergyParams(hmin_abs=1e-3))
        assert res.value == pytest.approx(0.0, abs=1e-12)

    def test_exceeds_omega_energy(self, step, step_domain, hat1d):
        # relative form adds the Omega x complement cross pairs twice
        eps = 0.02
        f_amb = mollify(step, hat1d, eps, step_domain.ambient_box)
        rel = relative_energy(f_amb, step_domain, 2.0)
        f_om = mollify(step, hat1d, eps, step_domain.box)
        om = gagliardo_energy(f_om, step_domain.box, 2.0)
        assert rel.value > om.value


class TestLocalized:
    @pytest.mark.parametrize("eps", [0.4, 0.1, 0.01])
    @pytest.mark.parametrize("q", [1.5, 2.0, 3.0])
    def test_1d_exact_two(self, eps, q, step, step_domain):
        val = localized_functional(step, step_domain.box, q, eps)
        assert val == pytest.approx(2.0, abs=1e-8)

    def test_1d_jump_height_scaling(self, step_domain):
        u = catalog("step1d_box", height=2.0)
        val = localized_functional(u, step_domain.box, 3.0, 0.1)
        assert val == pytest.approx(2.0 * 2.0 ** 3, abs=1e-8)

    def test_1d_truncated_interval(self):
        # jump at 0, domain (-0.05, 0.5), eps = 0.2 > left gap: the exact
        # value drops below 2 because left straddling pairs are clipped
        u = catalog("step1d_box")
        val = localized_functional(u, Box((-0.05,), (0.5,)), 2.0, 0.2)
        assert 0.0 < val < 2.0
        # with both gaps at least eps the value is exactly 2 again
        val_full = localized_functional(u, Box((-0.2,), (0.5,)), 2.0, 0.2)
        assert val_full == pytest.approx(2.0, abs=1e-8)

    def test_2d_halfplane(self, halfplane, halfplane_domain):
        val = localized_functional(halfplane, halfplane_domain.box, 2.0, 0.05)
        assert val == pytest.approx(2.0, rel=0.03)

    def test_2d_circle_mc(self):
        disc = catalog("disc_in_square")
        box = Box((0.0, 0.0), (1.0, 1.0))
        val = localized_functional(disc, box, 2.0, 0.02,
                                   mc_samples=1_000_000, seed=3)
        target = 2.0 * 2.0 * math.pi * 0.3
        assert val == pytest.approx(target, rel=0.02)

    def test_constant_field_zero(self):
        from mollifrac.fields import PiecewiseConstantField
        const = PiecewiseConstantField(
            dim=1, codim=1, pieces=(),
            region_map=lambda p: np.zeros((p.shape[0], 1)),
            support_box=Box((-1.0,), (1.0,)), l1_norm=0.0, linf_norm=0.0,
            total_variation=0.0, name="zero")
        assert localized_functional(const, Box((-0.5,), (0.5,)),
                                    2.0, 0.1) == 0.0

    def test_eps_too_large(self, pm_step):
        with pytest.raises(EpsilonTooLarge):
            localized_functional(pm_step, Box((-1.5,), (1.5,)), 2.0, 0.5)

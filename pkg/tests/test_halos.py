import math
import random

import numpy as np
import pytest

from gravsweep_core import (
    CosmologyParams,
    HaloModel,
    QuadConfig,
    ValidationError,
    baryon_infall_rate,
    collapsed_density,
    default_halo_model,
    expansion_rate,
    growth_factor,
    mass_function,
    mean_matter_density,
    ps_multiplicity,
    sigma_mass,
)


def wide_model(base):
    """Mass bounds wide enough that essentially all mass is collapsed."""
    return HaloModel(m8=base.m8, m_min=1e-12 * base.m8, m_max=1e12 * base.m8)


class TestModel:
    def test_default_m8_tracks_cosmology(self, lcdm):
        model = default_halo_model(lcdm)
        assert model.m8 == pytest.approx(6.0e14 * 0.3 / 0.7, rel=1e-14)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(delta_c=0.0),
            dict(sigma8=-1.0),
            dict(gamma=0.0),
            dict(gamma=1.0),
            dict(m_min=2.0, m_max=1.0),
            dict(m_min=0.0),
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValidationError):
            HaloModel(**kwargs)


class TestSigma:
    def test_normalization_point(self):
        model = HaloModel()
        assert sigma_mass(model, model.m8) == model.sigma8

    def test_sixteenfold_mass_halves_sigma(self):
        model = HaloModel(gamma=0.25)
        assert sigma_mass(model, 16.0 * model.m8) == pytest.approx(
            model.sigma8 / 2.0, rel=1e-14
        )

    def test_far_tail_still_positive(self):
        model = HaloModel()
        s = sigma_mass(model, 1e6 * model.m8)
        assert 0.0 < s < model.sigma8
        assert s == pytest.approx(model.sigma8 * 10 ** (-6 * model.gamma), rel=1e-12)

    def test_strictly_decreasing(self):
        model = HaloModel()
        masses = np.geomspace(model.m_min, model.m_max, 50)
        sig = sigma_mass(model, masses)
        assert np.all(np.diff(sig) < 0.0)

    def test_nonpositive_mass(self):
        with pytest.raises(ValidationError):
            sigma_mass(HaloModel(), 0.0)

    def test_nu_increases_with_mass_and_redshift(self, lcdm):
        model = default_halo_model(lcdm)

        def nu(m, z):
            return model.delta_c / (sigma_mass(model, m) * growth_factor(lcdm, z))

        masses = np.geomspace(1e8, 1e16, 9)
        nus = [nu(m, 3.0) for m in masses]
        assert all(b > a for a, b in zip(nus, nus[1:]))
        nus = [nu(1e12, z) for z in np.linspace(0.0, 20.0, 9)]
        assert all(b > a for a, b in zip(nus, nus[1:]))


class TestGrowthFactor:
    def test_normalized_today(self, lcdm):
        assert growth_factor(lcdm, 0.0) == 1.0

    def test_eds_closed_form(self, eds):
        for z in (0.5, 1.0, 3.0, 10.0):
            assert growth_factor(eds, z) == pytest.approx(1.0 / (1.0 + z), rel=1e-4)

    def test_flat_lcdm_against_trapezoid(self, lcdm):
        def heath(z):
            zs = np.linspace(z, 1.0e4, 2_000_001)
            integ = (1.0 + zs) / expansion_rate(lcdm, zs) ** 3
            tail = (1.0 + 1.0e4) ** -2.5 * (2.0 / 5.0) / lcdm.omegam**1.5
            return np.trapezoid(integ, zs) + tail

        oracle = expansion_rate(lcdm, 10.0) * heath(10.0) / heath(0.0)
        assert growth_factor(lcdm, 10.0) == pytest.approx(oracle, rel=1e-4)

    def test_decreasing_and_bounded(self, lcdm):
        zs = np.linspace(0.0, 20.0, 30)
        ds = [growth_factor(lcdm, float(z)) for z in zs]
        assert all(1.0 >= a > b > 0.0 for a, b in zip(ds, ds[1:]))


class TestMultiplicity:
    def test_peak_value(self):
        assert ps_multiplicity(1.0) == pytest.approx(
            math.sqrt(2.0 / math.pi) * math.exp(-0.5), rel=1e-14
        )
        assert ps_multiplicity(1.0) == pytest.approx(0.48394, rel=1e-4)

    def test_vanishes_at_origin(self):
        assert ps_multiplicity(1e-12) < 1e-11

    def test_peaks_at_unity(self):
        assert ps_multiplicity(1.0) > ps_multiplicity(0.9)
        assert ps_multiplicity(1.0) > ps_multiplicity(1.1)

    def test_all_mass_in_halos(self):
        # int f(nu) dnu/nu = 1 with the factor of 2 folded in
        nus = np.geomspace(1e-8, 40.0, 400001)
        total = np.trapezoid(ps_multiplicity(nus) / nus, nus)
        assert total == pytest.approx(1.0, rel=1e-6)

    def test_nonpositive_nu(self):
        with pytest.raises(ValidationError):
            ps_multiplicity(0.0)


class TestMassFunction:
    def test_positive_at_random_points(self, lcdm):
        model = default_halo_model(lcdm)
        rng = random.Random(5)
        for _ in range(100):
            m = 10 ** rng.uniform(math.log10(model.m_min), math.log10(model.m_max))
            z = rng.uniform(0.0, 20.0)
            assert mass_function(model, lcdm, m, z) >= 0.0

    def test_mass_outside_bounds(self, lcdm):
        model = default_halo_model(lcdm)
        with pytest.raises(ValidationError):
            mass_function(model, lcdm, model.m_max * 10.0, 0.0)

    def test_mass_fraction_normalization(self, lcdm):
        # Independent route: dense trapezoid over the mass function itself.
        model = wide_model(default_halo_model(lcdm))
        rho_m = mean_matter_density(lcdm)
        masses = np.geomspace(model.m_min, model.m_max, 4001)
        vals = [
            m * m / rho_m * mass_function(model, lcdm, m, 0.0) for m in masses
        ]
        assert np.trapezoid(vals, np.log(masses)) == pytest.approx(1.0, abs=0.01)

    def test_high_mass_tail_suppressed_at_high_z(self, lcdm):
        model = default_halo_model(lcdm)
        m = 10.0 * model.m8  # nu(z=0) > 1 here
        assert mass_function(model, lcdm, m, 5.0) < mass_function(model, lcdm, m, 0.0)


class TestCollapsedDensity:
    def test_wide_bounds_recover_all_matter(self, lcdm):
        model = wide_model(default_halo_model(lcdm))
        assert collapsed_density(model, lcdm, 0.0) == pytest.approx(
            mean_matter_density(lcdm), rel=0.02
        )

    def test_vanishes_at_very_high_z(self, lcdm):
        model = default_halo_model(lcdm)
        assert collapsed_density(model, lcdm, 1000.0) < 1e-10 * mean_matter_density(
            lcdm
        )

    def test_monotone_in_z(self, lcdm):
        model = default_halo_model(lcdm)
        vals = [collapsed_density(model, lcdm, float(z)) for z in np.linspace(0, 20, 21)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))
        assert all(0.0 <= v <= mean_matter_density(lcdm) for v in vals)


class TestInfall:
    def test_zero_baryons(self, lcdm):
        no_b = CosmologyParams(0.3, 0.0, 0.7, 0.7)
        model = default_halo_model(no_b)
        assert baryon_infall_rate(model, no_b, 5.0) == 0.0
        assert baryon_infall_rate(model, no_b, 0.0) == 0.0

    def test_nonnegative(self, lcdm):
        model = default_halo_model(lcdm)
        for z in (0.0, 0.5, 2.0, 10.0, 19.5):
            assert baryon_infall_rate(model, lcdm, z) >= 0.0

    def test_finite_difference_refinement(self, lcdm):
        # The 1e-3 central difference against a 10x finer one.
        model = default_halo_model(lcdm)
        cfg = QuadConfig(tol=1e-12)

        def fd(h):
            hi = collapsed_density(model, lcdm, 5.0 + h, cfg)
            lo = collapsed_density(model, lcdm, 5.0 - h, cfg)
            return (hi - lo) / (2.0 * h)

        assert fd(1e-3) == pytest.approx(fd(1e-4), rel=1e-4)

    def test_matches_manual_assembly(self, lcdm):
        # Rate equals (omegab/omegam) * drho/dz * dz/dt with the same stencil.
        from gravsweep_core import hubble
        from gravsweep_core.constants import GYR_S

        model = default_halo_model(lcdm)
        cfg = QuadConfig()
        z = 5.0
        hi = collapsed_density(model, lcdm, z + 1e-3, cfg)
        lo = collapsed_density(model, lcdm, z - 1e-3, cfg)
        expected = (
            (lcdm.omegab / lcdm.omegam)
            * ((hi - lo) / 2e-3)
            * (-(1.0 + z) * hubble(lcdm, z) * GYR_S)
        )
        assert baryon_infall_rate(model, lcdm, z, cfg) == max(expected, 0.0)

"""Stochastic gravitational-wave background from stellar collapse.

Each frequency of the observed spectrum is a source-sum integral over
redshift: the black-hole formation rate (CSFR times an IMF-derived count
factor) weighted by the redshifted single-source spectral energy.  The
frequency sweep has exactly the parameter-sweep structure, so the spectrum
is produced through run_sweep and inherits its bitwise worker-count
determinism.

The single-source spectrum is a stand-in: total energy epsilon * m * c^2,
Gaussian in frequency around an inverse-mass characteristic frequency.  A
single IMF-mean black-hole mass is used instead of a nested mass integral;
the spectral_energy seam allows a double integral later without API change.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import C_CGS, G_CGS, GYR_S, MPC_CM, MSUN_G
from .cosmology import critical_density, expansion_rate
from .errors import ValidationError
from .halos import _warn_if_not_converged
from .quadrature import QuadConfig, romberg
from .starform import csfr_at
from .sweep import Grid, run_sweep

__all__ = [
    "GwSourceModel",
    "GwSpectrum",
    "characteristic_frequency",
    "mean_bh_mass",
    "bh_formation_rate",
    "spectral_energy",
    "omega_gw",
    "spectrum_sweep",
]

# Dimensionless coefficient of nu_char = fq_coeff * c^3 / (G m); tuned so a
# 10 Msun remnant rings near 1.3 kHz (1.29e4 Hz at 1 Msun).
FQ_COEFF_DEFAULT = 1.29e4 * G_CGS * MSUN_G / C_CGS**3


@dataclass(frozen=True)
class GwSourceModel:
    """IMF, progenitor threshold, and single-source spectrum parameters.

    Masses in Msun.  imf_slope is the Salpeter exponent of phi(m) ~
    m^(-imf_slope) on [m_low, m_up]; stars above m_bh_min leave black
    holes.  epsilon is the fraction of m c^2 radiated; bandwidth_frac the
    Gaussian spectral width as a fraction of the characteristic frequency.
    """

    imf_slope: float = 2.35
    m_low: float = 0.1
    m_up: float = 125.0
    m_bh_min: float = 25.0
    epsilon: float = 1.0e-4
    fq_coeff: float = FQ_COEFF_DEFAULT
    bandwidth_frac: float = 0.3

    def __post_init__(self):
        if not (0.0 < self.m_low < self.m_bh_min < self.m_up):
            raise ValidationError(
                f"IMF masses require 0 < m_low < m_bh_min < m_up, got "
                f"({self.m_low}, {self.m_bh_min}, {self.m_up})"
            )
        if not (0.0 < self.epsilon < 1.0):
            raise ValidationError(f"epsilon={self.epsilon} outside (0, 1)")
        if not (self.fq_coeff > 0.0):
            raise ValidationError(f"fq_coeff={self.fq_coeff} must be > 0")
        if not (0.0 < self.bandwidth_frac < 1.0):
            raise ValidationError(
                f"bandwidth_frac={self.bandwidth_frac} outside (0, 1)"
            )


@dataclass(frozen=True)
class GwSpectrum:
    """Observed frequencies [Hz] and dimensionless energy-density spectrum."""

    nu_obs: np.ndarray
    omega_gw: np.ndarray


def _powerlaw_integral(lo, hi, p):
    """Closed form int_lo^hi x^p dx for lo, hi > 0."""
    if p == -1.0:
        return math.log(hi / lo)
    q = p + 1.0
    return (hi**q - lo**q) / q


def bh_count_factor(model):
    """Black holes formed per solar mass of stars: the IMF number fraction
    above m_bh_min over the IMF mass normalization [1/Msun]."""
    s = model.imf_slope
    number = _powerlaw_integral(model.m_bh_min, model.m_up, -s)
    mass = _powerlaw_integral(model.m_low, model.m_up, 1.0 - s)
    return number / mass


def mean_bh_mass(model):
    """IMF-mean progenitor mass above the black-hole threshold [Msun]."""
    s = model.imf_slope
    mass = _powerlaw_integral(model.m_bh_min, model.m_up, 1.0 - s)
    number = _powerlaw_integral(model.m_bh_min, model.m_up, -s)
    return mass / number


def characteristic_frequency(model, m_bh):
    """Characteristic emission frequency nu_char = fq_coeff c^3/(G m) [Hz];
    halves when the mass doubles."""
    if not (m_bh > 0.0):
        raise ValidationError(f"m_bh={m_bh} must be > 0")
    return model.fq_coeff * C_CGS**3 / (G_CGS * m_bh * MSUN_G)


def bh_formation_rate(model, table, z):
    """Comoving black-hole formation rate density [1/(Mpc^3 Gyr)].

    CSFR(z) times the IMF count factor; linear in the CSFR.
    """
    return csfr_at(table, z) * bh_count_factor(model)


def spectral_energy(model, nu_e, m_bh):
    """Single-source spectral energy dE/dnu [erg/Hz] at emitted frequency.

    Gaussian centered on the characteristic frequency with width
    bandwidth_frac * nu_char, normalized over (0, inf) so the emitted
    energy integrates to epsilon * m_bh * c^2 for any bandwidth.
    Accepts scalar or array nu_e.
    """
    if not (m_bh > 0.0):
        raise ValidationError(f"m_bh={m_bh} must be > 0")
    nu = np.asarray(nu_e, dtype=float)
    if np.ndim(nu_e) == 0 and not (float(nu) > 0.0):
        raise ValidationError(f"nu_e={nu_e} must be > 0")
    if np.ndim(nu_e) != 0 and nu.min() <= 0.0:
        raise ValidationError("nu_e must be > 0 everywhere")

    nu_c = characteristic_frequency(model, m_bh)
    width = model.bandwidth_frac * nu_c
    total = model.epsilon * m_bh * MSUN_G * C_CGS**2
    # Truncation at nu = 0 reweights the Gaussian normalization.
    positive_mass = 0.5 * (1.0 + math.erf(nu_c / (width * math.sqrt(2.0))))
    amplitude = total / (width * math.sqrt(2.0 * math.pi) * positive_mass)
    arg = (nu - nu_c) / width
    de_dnu = amplitude * np.exp(-0.5 * arg * arg)
    return float(de_dnu) if np.ndim(nu_e) == 0 else de_dnu


def omega_gw(model, table, params, nu_obs, cfg=QuadConfig()):
    """Dimensionless GW energy-density spectrum at one observed frequency.

    Omega(nu) = nu / (rho_c c^2 H0) * int R_bh(z) dE/dnu(nu (1+z), m_mean)
    / [(1+z) E(z)] dz over the CSFR table's redshift span, with everything
    in cgs.  The source rate is normalized out of the integrand and
    reapplied afterwards, so scaling the CSFR scales the result exactly
    linearly.
    """
    nu_obs = float(nu_obs)
    if not (nu_obs > 0.0 and math.isfinite(nu_obs)):
        raise ValidationError(f"nu_obs={nu_obs} must be positive and finite")

    csfr_scale = float(np.max(table.csfr))
    if csfr_scale == 0.0:
        return 0.0

    m_mean = mean_bh_mass(model)
    rate_cgs = bh_count_factor(model) / (MPC_CM**3 * GYR_S)  # per Msun of stars
    z_lo = float(table.z[-1])
    z_hi = float(table.z[0])

    def integrand(zs):
        rate = np.interp(zs, table.z[::-1], table.csfr[::-1]) / csfr_scale
        de = spectral_energy(model, nu_obs * (1.0 + zs), m_mean)
        return rate * de / ((1.0 + zs) * expansion_rate(params, zs))

    result = romberg(integrand, z_lo, z_hi, cfg, vectorized=True)
    _warn_if_not_converged(result, "GW background")
    prefactor = nu_obs / (critical_density(params) * C_CGS**2 * params.h0_s)
    return prefactor * rate_cgs * csfr_scale * result.value


def spectrum_sweep(model, table, params, nu_grid, workers=None, cfg=QuadConfig()):
    """Evaluate omega_gw over a frequency grid through run_sweep.

    Bitwise identical for every worker count, inherited from the sweep
    contract.
    """
    nus = np.asarray(nu_grid, dtype=float)
    if nus.size < 1:
        raise ValidationError("nu_grid must contain at least one frequency")
    if not np.isfinite(nus).all() or nus.min() <= 0.0:
        raise ValidationError("nu_grid must be positive and finite")

    def evaluator(nu):
        return omega_gw(model, table, params, nu, cfg)

    grid = Grid(values=nus, descending=False)
    return GwSpectrum(nu_obs=nus, omega_gw=run_sweep(grid, evaluator, workers))

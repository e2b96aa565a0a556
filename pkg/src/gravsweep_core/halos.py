"""Press-Schechter-like structure formation.

Variance of the density field sigma(M) (a normalized power law), linear
growth factor, halo mass function, collapsed mass density above a threshold,
and the baryon infall rate that feeds the star formation module.  All
comoving densities are in Msun/Mpc^3.
"""

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .constants import GYR_S, MPC_CM, MSUN_G
from .cosmology import critical_density, expansion_rate, hubble
from .errors import EvaluationError, QuadratureWarning, ValidationError
from .quadrature import QuadConfig, integrate_semi_infinite, romberg

__all__ = [
    "HaloModel",
    "default_halo_model",
    "mean_matter_density",
    "sigma_mass",
    "growth_factor",
    "ps_multiplicity",
    "mass_function",
    "collapsed_density",
    "baryon_infall_rate",
]

DELTA_C = 1.686  # spherical-collapse linear overdensity threshold

# Central-difference step for the infall rate's d(rho_halo)/dz
INFALL_DZ = 1e-3


@dataclass(frozen=True)
class HaloModel:
    """Parameters of the power-law variance model and the halo mass range.

    sigma(M) = sigma8 * (M / m8)^(-gamma): a stand-in for a transfer-function
    integral, normalized at the mass scale m8 of an 8 Mpc/h sphere.  Masses
    in Msun.
    """

    delta_c: float = DELTA_C
    sigma8: float = 0.9
    m8: float = 6.0e14
    gamma: float = 0.25
    m_min: float = 1.0e6
    m_max: float = 1.0e18

    def __post_init__(self):
        if not (self.delta_c > 0.0):
            raise ValidationError(f"delta_c={self.delta_c} must be > 0")
        if not (self.sigma8 > 0.0):
            raise ValidationError(f"sigma8={self.sigma8} must be > 0")
        if not (0.0 < self.gamma < 1.0):
            raise ValidationError(f"gamma={self.gamma} outside (0, 1)")
        if not (0.0 < self.m_min < self.m_max):
            raise ValidationError(
                f"mass bounds require 0 < m_min < m_max, got "
                f"[{self.m_min}, {self.m_max}]"
            )


def default_halo_model(params):
    """HaloModel with m8 tied to the cosmology: 6e14 * omegam / h Msun."""
    return HaloModel(m8=6.0e14 * params.omegam / params.h)


def mean_matter_density(params):
    """Comoving mean matter density today, omegam * rho_c, in Msun/Mpc^3."""
    return params.omegam * critical_density(params) * MPC_CM**3 / MSUN_G


def sigma_mass(model, mass):
    """RMS density fluctuation sigma(M) = sigma8 (M/m8)^(-gamma).

    Strictly decreasing in M.  Accepts scalar or array masses.
    """
    m = np.asarray(mass, dtype=float)
    if np.any(m <= 0.0):
        raise ValidationError(f"mass must be > 0, got {mass}")
    s = model.sigma8 * (m / model.m8) ** (-model.gamma)
    return float(s) if np.ndim(mass) == 0 else s


def _warn_if_not_converged(result, what):
    if not result.converged:
        warnings.warn(
            f"{what} quadrature did not converge "
            f"(error estimate {result.error_estimate:.3e})",
            QuadratureWarning,
            stacklevel=3,
        )


@lru_cache(maxsize=64)
def _growth_normalization(params, cfg):
    return _growth_integral(params, 0.0, cfg)


def _growth_integral(params, z, cfg):
    om, ok, ol = params.omegam, params.omegak, params.omegal

    def integrand(zs):
        zp = 1.0 + zs
        e2 = (om * zp**3 + ol) + ok * zp**2
        if e2.min() <= 0.0:
            bad = float(zp[e2 <= 0.0][0] - 1.0)
            raise EvaluationError(
                f"negative expansion-rate radicand at z={bad}", where=bad
            )
        return zp / e2**1.5

    result = integrate_semi_infinite(integrand, z, cfg, vectorized=True)
    _warn_if_not_converged(result, "growth factor")
    return result.value


def growth_factor(params, z, cfg=QuadConfig()):
    """Linear growth factor D(z), normalized to D(0) = 1.

    Heath integral form: D(z) proportional to E(z) int_z^inf (1+z')/E(z')^3 dz'.
    Decreasing in z; reduces to 1/(1+z) for the Einstein-de Sitter model.
    """
    z = float(z)
    if z < 0.0:
        raise ValidationError(f"redshift must be >= 0, got {z}")
    norm = _growth_normalization(params, cfg)
    return expansion_rate(params, z) * _growth_integral(params, z, cfg) / norm


def ps_multiplicity(nu):
    """Press-Schechter multiplicity f(nu) = sqrt(2/pi) nu exp(-nu^2 / 2).

    The all-mass-in-halos factor of 2 is folded in, so
    int_0^inf f(nu) dnu/nu = 1 exactly.  Peaks at nu = 1.
    """
    v = np.asarray(nu, dtype=float)
    if np.any(v <= 0.0):
        raise ValidationError(f"nu must be > 0, got {nu}")
    f = math.sqrt(2.0 / math.pi) * v * np.exp(-0.5 * v * v)
    return float(f) if np.ndim(nu) == 0 else f


def mass_function(model, params, mass, z, cfg=QuadConfig()):
    """Halo mass function dn/dM in halos/(Msun Mpc^3), comoving.

    dn/dM = (rho_m / M^2) f(nu) |dln(sigma)/dln(M)| with nu =
    delta_c / (sigma(M) D(z)); for the power-law sigma the logarithmic
    slope is gamma.
    """
    m = float(mass)
    if not (model.m_min <= m <= model.m_max):
        raise ValidationError(
            f"mass {m} outside model bounds [{model.m_min}, {model.m_max}]"
        )
    rho_m = mean_matter_density(params)
    d = growth_factor(params, z, cfg)
    nu = model.delta_c / (sigma_mass(model, m) * d)
    return rho_m / (m * m) * ps_multiplicity(nu) * model.gamma


def collapsed_density(model, params, z, cfg=QuadConfig()):
    """Comoving mass density in halos above m_min, in Msun/Mpc^3.

    int_{m_min}^{m_max} M (dn/dM) dM, integrated by Romberg in log-mass.
    Bounded above by the mean matter density; non-increasing in z.
    """
    rho_m = mean_matter_density(params)
    d = growth_factor(params, z, cfg)
    nu_scale = model.delta_c / (model.sigma8 * d)
    prefactor = math.sqrt(2.0 / math.pi) * model.gamma

    def integrand(lnm):
        # nu > 0 by construction, so the multiplicity is applied inline
        nu = nu_scale * (np.exp(lnm) / model.m8) ** model.gamma
        return prefactor * nu * np.exp(-0.5 * nu * nu)

    result = romberg(
        integrand, math.log(model.m_min), math.log(model.m_max), cfg, vectorized=True
    )
    _warn_if_not_converged(result, "collapsed density")
    return rho_m * result.value


def baryon_infall_rate(model, params, z, cfg=QuadConfig()):
    """Rate at which baryons fall into halos, in Msun/(Mpc^3 Gyr), comoving.

    (omegab/omegam) * d(rho_halo)/dt with the time derivative taken through
    dz/dt = -(1+z) H(z); d(rho_halo)/dz by central finite difference with
    step 1e-3 (one-sided at the z = 0 boundary).  Clamped at zero: only
    infall feeds star formation.
    """
    z = float(z)
    if z < 0.0:
        raise ValidationError(f"redshift must be >= 0, got {z}")
    if params.omegab == 0.0:
        return 0.0

    h = INFALL_DZ
    if z >= h:
        hi = collapsed_density(model, params, z + h, cfg)
        lo = collapsed_density(model, params, z - h, cfg)
        drho_dz = (hi - lo) / (2.0 * h)
    else:
        hi = collapsed_density(model, params, z + h, cfg)
        lo = collapsed_density(model, params, z, cfg)
        drho_dz = (hi - lo) / h

    dz_dt = -(1.0 + z) * hubble(params, z) * GYR_S  # per Gyr
    rate = (params.omegab / params.omegam) * drho_dz * dz_dt
    return max(rate, 0.0)

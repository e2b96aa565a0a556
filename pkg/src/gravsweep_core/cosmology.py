"""Background cosmology from four parameters.

A validated parameter set (total matter, baryons, dark energy, dimensionless
Hubble parameter) with derived curvature, plus the standard background
quantities built on it: expansion rate, scale factor, age, comoving
distance, and densities.  Radiation is omitted, so results above z of a few
hundred are approximate.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .constants import C_CGS, G_CGS, GYR_S, MPC_CM
from .errors import EvaluationError, QuadratureWarning, ValidationError
from .quadrature import QuadConfig, integrate_semi_infinite, romberg

__all__ = [
    "CosmologyParams",
    "expansion_rate",
    "hubble",
    "hubble_kms",
    "scale_factor",
    "age",
    "comoving_distance",
    "critical_density",
    "matter_density",
]

@dataclass(frozen=True)
class CosmologyParams:
    """Present-day density parameters and Hubble parameter.

    Parameters
    ----------
    omegam : float
        Total matter density in units of the critical density.
    omegab : float
        Baryonic matter density; must not exceed omegam.
    omegal : float
        Dark energy density.
    h : float
        Dimensionless Hubble parameter, H0 = 100 h km/s/Mpc.

    The curvature density omegak = 1 - omegam - omegal is derived on
    construction; it is not forced to zero.
    """

    omegam: float
    omegab: float
    omegal: float
    h: float
    omegak: float = field(init=False)

    def __post_init__(self):
        if not (0.0 < self.omegam <= 2.0):
            raise ValidationError(f"omegam={self.omegam} outside (0, 2]")
        if not (0.0 <= self.omegab <= self.omegam):
            raise ValidationError(
                f"omegab={self.omegab} outside [0, omegam={self.omegam}]"
            )
        if not (0.0 <= self.omegal <= 2.0):
            raise ValidationError(f"omegal={self.omegal} outside [0, 2]")
        if not (0.3 <= self.h <= 1.2):
            raise ValidationError(f"h={self.h} outside [0.3, 1.2]")
        object.__setattr__(self, "omegak", 1.0 - (self.omegam + self.omegal))

    @property
    def h0_kms_mpc(self):
        """H0 in km/s/Mpc."""
        return 100.0 * self.h

    @property
    def h0_s(self):
        """H0 in 1/s, using 1 Mpc = 3.086e24 cm."""
        return 100.0 * self.h * 1.0e5 / MPC_CM


def expansion_rate(params, z):
    """Dimensionless Friedmann expansion rate E(z) = H(z)/H0.

    E(z) = sqrt(omegam (1+z)^3 + omegak (1+z)^2 + omegal); E(0) = 1 by
    construction of omegak.  Accepts a scalar or an array of redshifts.

    Raises
    ------
    ValidationError
        For z < 0.
    EvaluationError
        If the radicand is non-positive (pathological open models at
        high z); the offending redshift is reported.
    """
    if np.ndim(z) == 0:
        zp = 1.0 + float(z)
        if zp < 1.0:
            raise ValidationError(f"redshift must be >= 0, got {z}")
        # Grouped so that at z = 0 the omegak closure cancels to exactly 1.
        rad = (params.omegam * zp**3 + params.omegal) + params.omegak * zp**2
        if rad <= 0.0:
            raise EvaluationError(
                f"negative expansion-rate radicand at z={float(z)}", where=float(z)
            )
        return math.sqrt(rad)

    zp = 1.0 + np.asarray(z, dtype=float)
    if zp.min() < 1.0:
        raise ValidationError(f"redshift must be >= 0, got {z}")
    rad = (params.omegam * zp**3 + params.omegal) + params.omegak * zp**2
    if rad.min() <= 0.0:
        bad = float(zp[rad <= 0.0][0] - 1.0)
        raise EvaluationError(
            f"negative expansion-rate radicand at z={bad}", where=bad
        )
    return np.sqrt(rad)


def hubble(params, z):
    """Hubble rate H(z) = H0 E(z) in 1/s."""
    return params.h0_s * expansion_rate(params, z)


def hubble_kms(params, z):
    """Hubble rate H(z) in km/s/Mpc; equals 100 h at z = 0."""
    return params.h0_kms_mpc * expansion_rate(params, z)


def scale_factor(z):
    """Scale factor a = 1/(1+z), normalized to 1 today."""
    zp = 1.0 + np.asarray(z, dtype=float)
    if np.any(zp < 1.0):
        raise ValidationError(f"redshift must be >= 0, got {z}")
    a = 1.0 / zp
    return float(a) if np.isscalar(z) or np.ndim(z) == 0 else a


def _warn_if_not_converged(result, what):
    if not result.converged:
        warnings.warn(
            f"{what} quadrature did not converge "
            f"(error estimate {result.error_estimate:.3e})",
            QuadratureWarning,
            stacklevel=3,
        )


def age(params, z=0.0, cfg=QuadConfig()):
    """Age of the Universe at redshift z, in Gyr.

    t(z) = int_z^inf dz' / [(1+z') H(z')], evaluated with the semi-infinite
    transform.  Positive and strictly decreasing in z.
    """
    z = float(z)
    if z < 0.0:
        raise ValidationError(f"redshift must be >= 0, got {z}")

    def integrand(zs):
        return 1.0 / ((1.0 + zs) * expansion_rate(params, zs))

    result = integrate_semi_infinite(integrand, z, cfg, vectorized=True)
    _warn_if_not_converged(result, "age")
    return result.value / params.h0_s / GYR_S


def comoving_distance(params, z, cfg=QuadConfig()):
    """Comoving distance to redshift z, in Mpc.

    d_C = (c/H0) int_0^z dz'/E(z'); zero at z = 0, increasing in z.
    """
    z = float(z)
    if z < 0.0:
        raise ValidationError(f"redshift must be >= 0, got {z}")
    if z == 0.0:
        return 0.0

    def integrand(zs):
        return 1.0 / expansion_rate(params, zs)

    result = romberg(integrand, 0.0, z, cfg, vectorized=True)
    _warn_if_not_converged(result, "comoving distance")
    return (C_CGS / params.h0_s) * result.value / MPC_CM


def critical_density(params):
    """Critical density today, rho_c = 3 H0^2 / (8 pi G), in g/cm^3."""
    return 3.0 * params.h0_s**2 / (8.0 * math.pi * G_CGS)


def matter_density(params):
    """Mean matter density today, omegam * rho_c, in g/cm^3."""
    return params.omegam * critical_density(params)

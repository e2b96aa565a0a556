"""This module 'gravsweep' drives the gravsweep computational core.

All numerics run in the core executable; this layer only marshals values
across the process boundary (floats travel as shortest round-trip decimals,
so they cross bit-exactly).

Functions:
  b = square(a)
  value = bound_romberg(f, a, b, tol=None)
  g = bound_sweep(np, zmax, evaluator="paper-example", workers=None)
  table = bound_cosmo(omegam, omegab, omegal, h, z=(0.0,))
  table = bound_csfr(omegam, omegab, omegal, h, np=2000, zmax=20.0, ...)
  table = bound_gwb(omegam, omegab, omegal, h, nu_min, nu_max, nu_points, ...)

Tables are dicts mapping column names to read-only double-precision arrays.
The core executable is found on PATH as 'gravsweep' or via the
GRAVSWEEP_BIN environment variable.
"""

from ._core import (
    BoundaryError,
    ContractError,
    bound_cosmo,
    bound_csfr,
    bound_gwb,
    bound_romberg,
    bound_sweep,
    core_executable,
    square,
)

__all__ = [
    "BoundaryError",
    "ContractError",
    "bound_cosmo",
    "bound_csfr",
    "bound_gwb",
    "bound_romberg",
    "bound_sweep",
    "core_executable",
    "square",
]

__version__ = "0.1.0"

"""Romberg quadrature, deterministic parallel sweeps, and a cosmological
pipeline from background expansion to the stellar gravitational-wave
background."""

from .constants import C_CGS, G_CGS, GYR_S, MPC_CM, MSUN_G
from .cosmology import (
    CosmologyParams,
    age,
    comoving_distance,
    critical_density,
    expansion_rate,
    hubble,
    hubble_kms,
    matter_density,
    scale_factor,
)
from .errors import (
    DeterminismError,
    EvaluationError,
    QuadratureWarning,
    ValidationError,
)
from .gwb import (
    GwSourceModel,
    GwSpectrum,
    bh_formation_rate,
    characteristic_frequency,
    mean_bh_mass,
    omega_gw,
    spectral_energy,
    spectrum_sweep,
)
from .halos import (
    HaloModel,
    baryon_infall_rate,
    collapsed_density,
    default_halo_model,
    growth_factor,
    mass_function,
    mean_matter_density,
    ps_multiplicity,
    sigma_mass,
)
from .quadrature import (
    QuadConfig,
    QuadResult,
    integrate_semi_infinite,
    rk4_integrate,
    romberg,
)
from .starform import CsfrTable, StarFormModel, csfr_at, evolve_csfr
from .sweep import (
    Grid,
    IndexRange,
    SweepReport,
    SweepSpec,
    benchmark_sweep,
    make_grid,
    partition,
    resolve_workers,
    run_sweep,
)

__version__ = "0.1.0"

"""Run configuration: defaults, config file, and flag merging.

Precedence, lowest to highest: built-in defaults, the GRAVSWEEP_WORKERS
environment variable (worker count only), a flat key = value config file,
explicit command-line flags.  The assembled values are handed to the domain
constructors, which do the actual validation.
"""

from dataclasses import dataclass, fields

from .cosmology import CosmologyParams
from .errors import ValidationError
from .gwb import GwSourceModel
from .halos import HaloModel
from .quadrature import QuadConfig
from .starform import StarFormModel
from .sweep import SweepSpec, resolve_workers

__all__ = ["RunConfig", "parse_config_file", "merge_config"]

_FLOAT_FIELDS = {
    "omega_m",
    "omega_b",
    "omega_l",
    "h",
    "zmax",
    "tol",
    "tau",
    "delta_c",
    "sigma8",
    "m8",
    "gamma",
    "m_min",
    "m_max",
    "imf_slope",
    "m_low",
    "m_up",
    "m_bh_min",
    "epsilon",
    "fq_coeff",
    "bandwidth_frac",
}
_INT_FIELDS = {"np", "workers", "max_levels"}
_STR_FIELDS = {"format", "out"}


@dataclass
class RunConfig:
    """Assembled run parameters; None means "use the module default"."""

    # cosmology
    omega_m: float = 0.3
    omega_b: float = 0.04
    omega_l: float = 0.7
    h: float = 0.7
    # sweep / grid
    np: int = 10000
    zmax: float = 20.0
    workers: int = None
    # quadrature
    tol: float = None
    max_levels: int = None
    # halo model
    delta_c: float = None
    sigma8: float = None
    m8: float = None
    gamma: float = None
    m_min: float = None
    m_max: float = None
    # star formation
    tau: float = None
    # gw source
    imf_slope: float = None
    m_low: float = None
    m_up: float = None
    m_bh_min: float = None
    epsilon: float = None
    fq_coeff: float = None
    bandwidth_frac: float = None
    # output
    format: str = "csv"
    out: str = None

    def cosmology(self):
        return CosmologyParams(
            omegam=self.omega_m, omegab=self.omega_b, omegal=self.omega_l, h=self.h
        )

    def quad_config(self, default_tol=None):
        kwargs = {}
        tol = self.tol if self.tol is not None else default_tol
        if tol is not None:
            kwargs["tol"] = tol
        if self.max_levels is not None:
            kwargs["max_levels"] = self.max_levels
        return QuadConfig(**kwargs)

    def sweep_spec(self):
        return SweepSpec(
            np=self.np, zmax=self.zmax, workers=resolve_workers(self.workers)
        )

    def halo_model(self, params):
        kwargs = {}
        for name in ("delta_c", "sigma8", "gamma", "m_min", "m_max"):
            value = getattr(self, name)
            if value is not None:
                kwargs[name] = value
        kwargs["m8"] = (
            self.m8 if self.m8 is not None else 6.0e14 * params.omegam / params.h
        )
        return HaloModel(**kwargs)

    def starform_model(self):
        kwargs = {"z_start": self.zmax, "np": self.np}
        if self.tau is not None:
            kwargs["tau"] = self.tau
        return StarFormModel(**kwargs)

    def gw_model(self):
        kwargs = {}
        for name in (
            "imf_slope",
            "m_low",
            "m_up",
            "m_bh_min",
            "epsilon",
            "fq_coeff",
            "bandwidth_frac",
        ):
            value = getattr(self, name)
            if value is not None:
                kwargs[name] = value
        return GwSourceModel(**kwargs)

    def echo(self):
        """Resolved key/value pairs for reproducibility blocks.

        The output path is omitted so the same computation writes the same
        bytes wherever it lands.
        """
        return {
            f.name: getattr(self, f.name)
            for f in fields(self)
            if f.name != "out" and getattr(self, f.name) is not None
        }


def _coerce(key, raw):
    try:
        if key in _FLOAT_FIELDS:
            return float(raw)
        if key in _INT_FIELDS:
            return int(raw)
    except ValueError:
        raise ValidationError(f"config value for {key!r} is not numeric: {raw!r}") from None
    if key in _STR_FIELDS:
        return raw
    raise ValidationError(f"unknown config key {key!r}")


def parse_config_file(path):
    """Read a flat key = value config file (UTF-8, '#' comments).

    Keys may use hyphens or underscores.  Returns a dict of coerced values.
    """
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ValidationError(
                    f"{path}:{lineno}: expected 'key = value', got {line.rstrip()!r}"
                )
            key, raw = text.split("=", 1)
            key = key.strip().replace("-", "_")
            values[key] = _coerce(key, raw.strip())
    return values


def merge_config(file_values=None, flag_values=None):
    """Overlay config-file values then explicitly-set flags on the defaults."""
    cfg = RunConfig()
    for source in (file_values or {}), (flag_values or {}):
        for key, value in source.items():
            if value is None:
                continue
            if not hasattr(cfg, key):
                raise ValidationError(f"unknown config key {key!r}")
            setattr(cfg, key, value)
    return cfg

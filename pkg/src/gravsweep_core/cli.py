"""gravsweep command-line interface.

Subcommands: cosmo (background-cosmology table), sweep (the reference
parameter sweep), csfr (star formation history), gwb (gravitational-wave
background spectrum), bench (serial vs parallel timing), square and romberg
(the binding-layer entry points, including the stdio callback protocol).

Numeric output uses the shortest round-trip decimal for each double, so a
fixed configuration produces byte-identical files on any platform.

Exit codes: 0 ok, 2 validation error, 3 numerical fault, 4 determinism
violation.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import cosmology, gwb, starform
from .config import merge_config, parse_config_file
from .errors import DeterminismError, EvaluationError, ValidationError
from .evaluators import EVALUATOR_NAMES, build_evaluator
from .quadrature import romberg
from .sweep import benchmark_sweep, make_grid, partition, resolve_workers, run_sweep

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_DETERMINISM = 4

_CONFIG_FLAGS = (
    "omega_m",
    "omega_b",
    "omega_l",
    "h",
    "np",
    "zmax",
    "workers",
    "tol",
    "max_levels",
    "delta_c",
    "sigma8",
    "m8",
    "gamma",
    "m_min",
    "m_max",
    "tau",
    "imf_slope",
    "m_low",
    "m_up",
    "m_bh_min",
    "epsilon",
    "fq_coeff",
    "bandwidth_frac",
    "format",
    "out",
)


def _fmt(x):
    """Shortest round-trip decimal rendering of a double."""
    return repr(float(x))


class _HostCallbackError(Exception):
    """The host side of the stdio callback protocol reported a failure."""


def _write_table(cfg, columns, rows, head_comments=(), foot_comments=(), extra=None):
    """Emit a table as CSV or JSON to cfg.out (or stdout)."""
    if cfg.format == "json":
        payload = {"config": cfg.echo(), "rows": rows, "columns": list(columns)}
        if extra:
            payload.update(extra)
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = [f"# {c}" for c in head_comments]
        lines.append(",".join(columns))
        lines.extend(",".join(_fmt(v) for v in row) for row in rows)
        lines.extend(f"# {c}" for c in foot_comments)
        text = "\n".join(lines) + "\n"

    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _echo_comments(cfg):
    return [f"{key} = {value}" for key, value in cfg.echo().items()]


def cmd_cosmo(cfg, args):
    params = cfg.cosmology()
    qcfg = cfg.quad_config()
    zs = [float(s) for s in args.z.split(",") if s.strip()]
    if not zs:
        raise ValidationError("--z must contain at least one redshift")
    rows = []
    for z in zs:
        rows.append(
            [
                z,
                cosmology.scale_factor(z),
                cosmology.expansion_rate(params, z),
                cosmology.hubble_kms(params, z),
                cosmology.age(params, z, qcfg),
                cosmology.comoving_distance(params, z, qcfg),
            ]
        )
    _write_table(cfg, ["z", "a", "E", "H_km_s_Mpc", "age_Gyr", "d_C_Mpc"], rows)
    return EXIT_OK


def cmd_sweep(cfg, args):
    grid = make_grid(cfg.sweep_spec())
    workers = resolve_workers(cfg.workers)
    if args.evaluator == "callback":
        return _sweep_callback(cfg, grid, workers)
    evaluator = build_evaluator(args.evaluator, cfg.tol)
    out = run_sweep(grid, evaluator, workers)
    rows = [[float(z), float(v)] for z, v in zip(grid.values, out)]
    _write_table(cfg, ["z", "f"], rows)
    return EXIT_OK


def cmd_csfr(cfg, args):
    params = cfg.cosmology()
    halo = cfg.halo_model(params)
    model = cfg.starform_model()
    table = starform.evolve_csfr(model, halo, params, cfg.quad_config())
    rows = [
        [float(z), float(rb), float(c)]
        for z, rb, c in zip(table.z, table.rho_b, table.csfr)
    ]
    residual = _conservation_residual(table)
    _write_table(
        cfg,
        ["z", "rho_b", "csfr"],
        rows,
        foot_comments=[f"conservation_max_rel_residual = {_fmt(residual)}"],
        extra={"summary": {"conservation_max_rel_residual": residual}},
    )
    return EXIT_OK


def _conservation_residual(table):
    fed = table.infall > 0.0
    if not np.any(fed):
        return 0.0
    resid = np.abs(table.stars + table.rho_b - table.infall)[fed]
    return float(np.max(resid / table.infall[fed]))


def cmd_gwb(cfg, args):
    if not (0.0 < args.nu_min <= args.nu_max):
        raise ValidationError(
            f"frequency range requires 0 < nu-min <= nu-max, got "
            f"[{args.nu_min}, {args.nu_max}]"
        )
    if args.nu_min == args.nu_max and args.nu_points != 1:
        raise ValidationError("nu-min == nu-max needs --nu-points 1")
    if args.nu_points < 1:
        raise ValidationError(f"nu-points must be >= 1, got {args.nu_points}")
    params = cfg.cosmology()
    halo = cfg.halo_model(params)
    model = cfg.starform_model()
    source = cfg.gw_model()
    qcfg = cfg.quad_config()
    table = starform.evolve_csfr(model, halo, params, qcfg)
    nus = np.geomspace(args.nu_min, args.nu_max, args.nu_points)
    spectrum = gwb.spectrum_sweep(
        source, table, params, nus, resolve_workers(cfg.workers), qcfg
    )
    rows = [
        [float(nu), float(om)] for nu, om in zip(spectrum.nu_obs, spectrum.omega_gw)
    ]
    _write_table(cfg, ["nu_hz", "omega_gw"], rows, head_comments=_echo_comments(cfg))
    return EXIT_OK


def cmd_bench(cfg, args):
    counts = [int(s) for s in args.worker_list.split(",") if s.strip()]
    if not counts:
        raise ValidationError("--worker-list must contain at least one count")
    grid = make_grid(cfg.sweep_spec())
    evaluator = build_evaluator(args.evaluator, cfg.tol)
    report = benchmark_sweep(grid, evaluator, counts)
    rows = [
        [float(w), float(t), float(s)]
        for w, t, s in zip(report.worker_counts, report.wall_times, report.speedups)
    ]
    _write_table(cfg, ["workers", "wall_time_s", "speedup"], rows)
    return EXIT_OK


def cmd_square(cfg, args):
    a = args.a
    if not math.isfinite(a):
        raise ValidationError(f"square needs a finite input, got {a}")
    sys.stdout.write(_fmt(a * a) + "\n")
    return EXIT_OK


_NAMED_INTEGRANDS = ("paper-example", "one", "square")


def _named_integrand(name, x):
    if name == "paper-example":
        def f(ks):
            s = x + ks
            return 1.0 / (s * s)
        return f
    if name == "one":
        return lambda ks: np.ones_like(ks)
    if name == "square":
        return lambda ks: ks * ks
    raise ValidationError(
        f"unknown integrand {name!r}; expected one of {', '.join(_NAMED_INTEGRANDS)}"
    )


def cmd_romberg(cfg, args):
    qcfg = cfg.quad_config(default_tol=None)
    if args.callback:
        return _romberg_callback(args.a, args.b, qcfg)
    f = _named_integrand(args.integrand, args.x)
    result = romberg(f, args.a, args.b, qcfg, vectorized=True)
    _emit_result(result)
    return EXIT_OK


def _emit_result(result):
    sys.stdout.write(
        "RESULT "
        + " ".join(
            (
                _fmt(result.value),
                _fmt(result.error_estimate),
                str(result.evaluations),
                "1" if result.converged else "0",
            )
        )
        + "\n"
    )
    sys.stdout.flush()


def _host_eval(xs):
    """One round of the stdio callback protocol: send abscissae, read values."""
    sys.stdout.write(
        "EVAL " + str(len(xs)) + " " + " ".join(_fmt(x) for x in xs) + "\n"
    )
    sys.stdout.flush()
    line = sys.stdin.readline()
    if not line:
        raise _HostCallbackError("host closed the callback stream")
    parts = line.split()
    if parts and parts[0] == "ERR":
        raise _HostCallbackError(line[4:].strip() or "host evaluator failed")
    if not parts or parts[0] != "VALS" or len(parts) != len(xs) + 1:
        raise _HostCallbackError(f"malformed callback reply: {line.strip()!r}")
    return np.array([float(p) for p in parts[1:]])


def _romberg_callback(a, b, qcfg):
    try:
        result = romberg(_host_eval, a, b, qcfg, vectorized=True)
    except (_HostCallbackError, EvaluationError) as exc:
        sys.stdout.write(f"ABORT {exc}\n")
        sys.stdout.flush()
        return EXIT_NUMERICAL
    _emit_result(result)
    return EXIT_OK


def _sweep_callback(cfg, grid, workers, chunk=512):
    if workers != 1:
        raise ValidationError(
            "callback evaluators are restricted to --workers 1; named built-in "
            "evaluators support full parallelism"
        )
    if not cfg.out:
        raise ValidationError("--evaluator callback requires --out PATH")
    values = grid.values
    out = np.empty(len(values))
    try:
        for rng in partition(len(values), max(1, len(values) // chunk)):
            out[rng.start : rng.end] = _host_eval(values[rng.start : rng.end])
    except (_HostCallbackError, EvaluationError) as exc:
        sys.stdout.write(f"ABORT {exc}\n")
        sys.stdout.flush()
        return EXIT_NUMERICAL
    rows = [[float(z), float(v)] for z, v in zip(values, out)]
    _write_table(cfg, ["z", "f"], rows)
    sys.stdout.write("DONE\n")
    sys.stdout.flush()
    return EXIT_OK


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("shared options")
    g.add_argument("--omega-m", dest="omega_m", type=float)
    g.add_argument("--omega-b", dest="omega_b", type=float)
    g.add_argument("--omega-l", dest="omega_l", type=float)
    g.add_argument("--h", dest="h", type=float)
    g.add_argument("--np", dest="np", type=int)
    g.add_argument("--zmax", dest="zmax", type=float)
    g.add_argument("--workers", dest="workers", type=int)
    g.add_argument("--tol", dest="tol", type=float)
    g.add_argument("--max-levels", dest="max_levels", type=int)
    g.add_argument("--config", dest="config")
    g.add_argument("--format", dest="format", choices=("csv", "json"))
    g.add_argument("--out", dest="out")

    model_flags = argparse.ArgumentParser(add_help=False)
    m = model_flags.add_argument_group("model options")
    m.add_argument("--tau", dest="tau", type=float)
    m.add_argument("--delta-c", dest="delta_c", type=float)
    m.add_argument("--sigma8", dest="sigma8", type=float)
    m.add_argument("--m8", dest="m8", type=float)
    m.add_argument("--gamma", dest="gamma", type=float)
    m.add_argument("--m-min", dest="m_min", type=float)
    m.add_argument("--m-max", dest="m_max", type=float)

    gw_flags = argparse.ArgumentParser(add_help=False)
    w = gw_flags.add_argument_group("source options")
    w.add_argument("--imf-slope", dest="imf_slope", type=float)
    w.add_argument("--m-low", dest="m_low", type=float)
    w.add_argument("--m-up", dest="m_up", type=float)
    w.add_argument("--m-bh-min", dest="m_bh_min", type=float)
    w.add_argument("--epsilon", dest="epsilon", type=float)
    w.add_argument("--fq-coeff", dest="fq_coeff", type=float)
    w.add_argument("--bandwidth-frac", dest="bandwidth_frac", type=float)

    parser = argparse.ArgumentParser(
        prog="gravsweep",
        description="Cosmology, star formation, and gravitational-wave "
        "background tables over deterministic parallel sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cosmo", parents=[common], help="background-cosmology table")
    p.add_argument("--z", default="0", help="comma-separated redshifts")
    p.set_defaults(func=cmd_cosmo)

    p = sub.add_parser("sweep", parents=[common], help="reference parameter sweep")
    p.add_argument(
        "--evaluator",
        default="paper-example",
        choices=EVALUATOR_NAMES + ("callback",),
    )
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser(
        "csfr", parents=[common, model_flags], help="cosmic star formation history"
    )
    p.set_defaults(func=cmd_csfr)

    p = sub.add_parser(
        "gwb",
        parents=[common, model_flags, gw_flags],
        help="gravitational-wave background spectrum",
    )
    p.add_argument("--nu-min", dest="nu_min", type=float, required=True)
    p.add_argument("--nu-max", dest="nu_max", type=float, required=True)
    p.add_argument("--nu-points", dest="nu_points", type=int, default=200)
    p.set_defaults(func=cmd_gwb)

    p = sub.add_parser("bench", parents=[common], help="serial vs parallel timing")
    p.add_argument("--worker-list", dest="worker_list", default="1,2,4")
    p.add_argument(
        "--evaluator", default="paper-example", choices=EVALUATOR_NAMES
    )
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("square", parents=[common], help="square a number (boundary smoke test)")
    p.add_argument("a", type=float)
    p.set_defaults(func=cmd_square)

    p = sub.add_parser(
        "romberg", parents=[common], help="integrate a named or host-callback integrand"
    )
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--x", type=float, default=0.0, help="paper-example outer value")
    p.add_argument("--integrand", default="paper-example")
    p.add_argument("--callback", action="store_true")
    p.set_defaults(func=cmd_romberg)

    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if not exc.code else EXIT_VALIDATION

    try:
        file_values = parse_config_file(args.config) if args.config else {}
        flag_values = {
            key: getattr(args, key) for key in _CONFIG_FLAGS if hasattr(args, key)
        }
        cfg = merge_config(file_values, flag_values)
        return args.func(cfg, args)
    except ValidationError as exc:
        print(f"gravsweep: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except EvaluationError as exc:
        print(f"gravsweep: numerical fault: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DeterminismError as exc:
        print(f"gravsweep: determinism violation: {exc}", file=sys.stderr)
        return EXIT_DETERMINISM


if __name__ == "__main__":
    sys.exit(main())

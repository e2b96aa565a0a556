"""Process-boundary plumbing for the gravsweep core.

Every operation here shells out to the core executable and parses its
output; no numerical logic lives on this side.  Host-supplied callables are
served to the core through its stdio callback protocol:

    core -> host:  EVAL <n> <x1> ... <xn>
    host -> core:  VALS <v1> ... <vn>   |   ERR <message>
    core -> host:  RESULT ... | DONE | ABORT <reason>

Host exceptions never crash the pipeline: they are reported to the core,
which aborts, and surface as BoundaryError with the original exception as
the cause.
"""

import json
import math
import os
import shutil
import subprocess
import tempfile

import numpy as np

BIN_ENV_VAR = "GRAVSWEEP_BIN"


class BoundaryError(RuntimeError):
    """A failure crossing the host/core boundary (including host callbacks)."""


class ContractError(ValueError):
    """A documented binding restriction was violated on the host side."""


def core_executable():
    """Path of the core executable (GRAVSWEEP_BIN overrides PATH lookup)."""
    override = os.environ.get(BIN_ENV_VAR)
    if override:
        if not (os.path.isfile(override) and os.access(override, os.X_OK)):
            raise BoundaryError(f"{BIN_ENV_VAR}={override!r} is not executable")
        return override
    found = shutil.which("gravsweep")
    if not found:
        raise BoundaryError(
            "gravsweep core executable not found on PATH "
            f"(install the core package or set {BIN_ENV_VAR})"
        )
    return found


def _fmt(x):
    return repr(float(x))


def _run(args):
    proc = subprocess.run(
        [core_executable(), *args], capture_output=True, text=True
    )
    if proc.returncode != 0:
        raise BoundaryError(
            f"core exited with {proc.returncode}: {proc.stderr.strip()}"
        )
    return proc.stdout


def _bound(values):
    """An owned, contiguous, read-only double buffer."""
    arr = np.ascontiguousarray(values, dtype=float)
    arr.flags.writeable = False
    return arr


def _table_from_json(stdout):
    payload = json.loads(stdout)
    columns = payload["columns"]
    rows = payload["rows"]
    data = np.asarray(rows, dtype=float).reshape(len(rows), len(columns))
    return {name: _bound(data[:, i]) for i, name in enumerate(columns)}


def square(a):
    """Square a in the core; the smoke test of the boundary."""
    a = float(a)
    if not math.isfinite(a):
        raise ContractError(f"square needs a finite input, got {a}")
    out = _run(["square", _fmt(a)])
    return float(out.strip())


class _CallbackPump:
    """Serve EVAL requests from a core subprocess with a host callable."""

    def __init__(self, args, f):
        self.args = args
        self.f = f

    def run(self):
        proc = subprocess.Popen(
            [core_executable(), *self.args],
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        host_failure = None
        final = None
        try:
            while True:
                line = proc.stdout.readline()
                if not line:
                    break
                parts = line.split()
                if parts and parts[0] == "EVAL":
                    n = int(parts[1])
                    xs = [float(p) for p in parts[2 : 2 + n]]
                    try:
                        vals = [float(self.f(x)) for x in xs]
                        reply = "VALS " + " ".join(_fmt(v) for v in vals) + "\n"
                    except Exception as exc:
                        host_failure = exc
                        reply = f"ERR {exc!r}\n"
                    try:
                        proc.stdin.write(reply)
                        proc.stdin.flush()
                    except BrokenPipeError:
                        break
                else:
                    final = line.strip()
                    break
            try:
                proc.stdin.close()
            except BrokenPipeError:
                pass
            returncode = proc.wait()
        finally:
            if proc.poll() is None:
                proc.kill()
                proc.wait()

        if final is None:
            raise BoundaryError(
                f"core ended without a result: {proc.stderr.read().strip()}"
            )
        status = final.split(None, 1)
        if status[0] == "ABORT":
            reason = status[1] if len(status) > 1 else "host evaluator failed"
            raise BoundaryError(f"integration aborted: {reason}") from host_failure
        if returncode != 0:
            raise BoundaryError(f"core exited with {returncode}")
        return final


def bound_romberg(f, a, b, tol=None):
    """Integrate a host callable with the core's Romberg integrator.

    Bitwise equal to the core evaluating the same mathematical function
    natively, because abscissae and values cross the boundary as exact
    round-trip decimals.
    """
    if not callable(f):
        raise ContractError("f must be callable")
    args = ["romberg", "--a", _fmt(a), "--b", _fmt(b), "--callback"]
    if tol is not None:
        args += ["--tol", _fmt(tol)]
    final = _CallbackPump(args, f).run()
    parts = final.split()
    if parts[0] != "RESULT":
        raise BoundaryError(f"unexpected core reply: {final!r}")
    return float(parts[1])


def bound_sweep(np_points, zmax, evaluator="paper-example", workers=None, tol=None):
    """Run a sweep in the core; returns the output buffer as a BoundArray.

    evaluator is either the name of a core built-in ("paper-example",
    "identity", "zero") with full parallelism, or a host callable, which is
    restricted to workers=1 (callbacks serialize on the host, and the
    determinism contract must not silently degrade).
    """
    base = ["sweep", "--np", str(int(np_points)), "--zmax", _fmt(zmax)]
    if tol is not None:
        base += ["--tol", _fmt(tol)]

    if callable(evaluator):
        if workers not in (None, 1):
            raise ContractError(
                "host-callable evaluators run with workers=1; use a named "
                "built-in evaluator for parallel sweeps"
            )
        with tempfile.TemporaryDirectory() as tmp:
            out_path = os.path.join(tmp, "sweep.json")
            args = base + [
                "--evaluator", "callback", "--workers", "1",
                "--format", "json", "--out", out_path,
            ]
            final = _CallbackPump(args, evaluator).run()
            if final != "DONE":
                raise BoundaryError(f"unexpected core reply: {final!r}")
            with open(out_path, encoding="utf-8") as fh:
                table = _table_from_json(fh.read())
        return table["f"]

    args = base + ["--evaluator", str(evaluator), "--format", "json"]
    if workers is not None:
        args += ["--workers", str(int(workers))]
    return _table_from_json(_run(args))["f"]


def _cosmo_args(omegam, omegab, omegal, h):
    return [
        "--omega-m", _fmt(omegam), "--omega-b", _fmt(omegab),
        "--omega-l", _fmt(omegal), "--h", _fmt(h),
    ]


def bound_cosmo(omegam, omegab, omegal, h, z=(0.0,)):
    """Background-cosmology table.

    Columns, in order: z, a, E, H_km_s_Mpc, age_Gyr, d_C_Mpc.
    """
    zlist = ",".join(_fmt(v) for v in z)
    out = _run(
        ["cosmo", *_cosmo_args(omegam, omegab, omegal, h), "--z", zlist,
         "--format", "json"]
    )
    return _table_from_json(out)


def bound_csfr(omegam, omegab, omegal, h, np_points=2000, zmax=20.0, tau=None):
    """Star formation history table.  Columns: z, rho_b, csfr."""
    args = [
        "csfr", *_cosmo_args(omegam, omegab, omegal, h),
        "--np", str(int(np_points)), "--zmax", _fmt(zmax), "--format", "json",
    ]
    if tau is not None:
        args += ["--tau", _fmt(tau)]
    return _table_from_json(_run(args))


def bound_gwb(
    omegam, omegab, omegal, h, nu_min, nu_max, nu_points,
    np_points=2000, zmax=20.0,
):
    """Gravitational-wave background spectrum.  Columns: nu_hz, omega_gw."""
    args = [
        "gwb", *_cosmo_args(omegam, omegab, omegal, h),
        "--np", str(int(np_points)), "--zmax", _fmt(zmax),
        "--nu-min", _fmt(nu_min), "--nu-max", _fmt(nu_max),
        "--nu-points", str(int(nu_points)), "--format", "json",
    ]
    return _table_from_json(_run(args))

"""Scalar integration primitives.

Romberg quadrature on finite intervals, a semi-infinite transform, and a
fixed-step classical RK4 integrator.  All routines are pure functions of
their inputs and safe to call concurrently.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, ValidationError

__all__ = [
    "QuadConfig",
    "QuadResult",
    "romberg",
    "integrate_semi_infinite",
    "rk4_integrate",
]


@dataclass(frozen=True)
class QuadConfig:
    """Convergence target and tableau depth bound for Romberg integration.

    tol is a relative target with an absolute floor: convergence is declared
    when the diagonal update falls below tol * max(1, |value|), so integrals
    near zero are not asked for impossible relative precision.
    """

    tol: float = 1e-8
    max_levels: int = 20

    def __post_init__(self):
        if not (self.tol > 0.0):
            raise ValidationError(f"tol must be > 0, got {self.tol}")
        if not (2 <= self.max_levels <= 30):
            raise ValidationError(
                f"max_levels must be in [2, 30], got {self.max_levels}"
            )


@dataclass(frozen=True)
class QuadResult:
    """Value, error estimate, and cost of a quadrature call.

    error_estimate is the last diagonal difference of the Romberg tableau;
    converged is False when max_levels was exhausted first (the value is
    still the best available estimate).
    """

    value: float
    error_estimate: float
    evaluations: int
    converged: bool = True


def _batched(f):
    """Wrap a scalar integrand so it accepts an abscissa array."""

    def wrapped(xs):
        return np.fromiter((f(float(x)) for x in xs), dtype=float, count=len(xs))

    return wrapped


def _sample(fv, xs):
    """Evaluate a batched integrand, rejecting non-finite samples."""
    with np.errstate(all="ignore"):
        ys = np.asarray(fv(xs), dtype=float)
    if not np.isfinite(ys).all():
        _raise_nonfinite(xs, ys)
    return ys


def _raise_nonfinite(xs, ys):
    bad = int(np.flatnonzero(~np.isfinite(ys))[0])
    raise EvaluationError(
        f"integrand returned a non-finite value at x={float(xs[bad])!r}",
        where=float(xs[bad]),
    )


def _sample_sum(fv, xs):
    """Sum of a batched integrand; non-finite samples are reported by
    abscissa.  A finite sum implies every sample was finite, so the
    per-element scan runs only on the failure path."""
    with np.errstate(all="ignore"):
        ys = np.asarray(fv(xs), dtype=float)
    total = float(np.sum(ys))
    if not math.isfinite(total):
        if not np.isfinite(ys).all():
            _raise_nonfinite(xs, ys)
    return total


def romberg(f, a, b, cfg=QuadConfig(), vectorized=False):
    """Integrate f over [a, b] by trapezoid refinement plus Richardson
    extrapolation, R(j,k) = R(j,k-1) + (R(j,k-1) - R(j-1,k-1)) / (4^k - 1).

    Parameters
    ----------
    f : callable
        Integrand.  Takes a float; with vectorized=True it must instead
        accept and return 1-d numpy arrays (used by internal callers to
        avoid per-point Python overhead).
    a, b : float
        Integration bounds, a < b.
    cfg : QuadConfig
        Convergence tolerance and maximum tableau depth.

    Returns
    -------
    QuadResult
        Diagonal tableau entry at the first level whose update passes the
        convergence test; flagged non-converged if max_levels is reached.
        Note the usual Romberg caveat: an integrand whose support is
        entirely missed by the first few trapezoid levels can satisfy the
        convergence test prematurely.

    Raises
    ------
    ValidationError
        If a >= b or the bounds are not finite.
    EvaluationError
        If the integrand returns a non-finite value (the abscissa is
        reported).
    """
    a = float(a)
    b = float(b)
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValidationError(f"integration bounds must be finite, got [{a}, {b}]")
    if a >= b:
        raise ValidationError(f"invalid interval: a={a} must be < b={b}")

    fv = f if vectorized else _batched(f)

    h = b - a
    ends = _sample(fv, np.array([a, b]))
    evaluations = 2
    prev_row = [0.5 * h * (float(ends[0]) + float(ends[1]))]

    for j in range(1, cfg.max_levels):
        n_new = 2 ** (j - 1)
        h *= 0.5
        xs = a + (2.0 * np.arange(1, n_new + 1) - 1.0) * h
        total = _sample_sum(fv, xs)
        evaluations += n_new

        row = [0.5 * prev_row[0] + h * total]
        for k in range(1, j + 1):
            row.append(row[k - 1] + (row[k - 1] - prev_row[k - 1]) / (4.0**k - 1.0))

        diff = abs(row[j] - prev_row[j - 1])
        if diff <= cfg.tol * max(1.0, abs(row[j])):
            return QuadResult(float(row[j]), float(diff), evaluations, converged=True)
        prev_row = row

    return QuadResult(float(prev_row[-1]), float(diff), evaluations, converged=False)


def integrate_semi_infinite(f, a, cfg=QuadConfig(), vectorized=False):
    """Integrate f over [a, inf) via the substitution u = 1/(1 + k - a).

    The substitution maps the tail onto the finite interval (0, 1]; the
    u = 0 endpoint is defined as 0, which presumes f decays fast enough
    that the transformed integrand f(k(u)) / u^2 vanishes there.  Borderline
    ~1/k^2 decay makes that endpoint value a jump and degrades convergence;
    the non-convergence flag on the result reports it.
    """
    a = float(a)
    if not np.isfinite(a):
        raise ValidationError(f"lower bound must be finite, got {a}")

    if vectorized:

        def transformed(us):
            if float(us[0]) != 0.0:  # interior batch, abscissae ascending
                return f(a + (1.0 - us) / us) / (us * us)
            out = np.zeros_like(us)
            pos = us > 0.0
            u = us[pos]
            out[pos] = f(a + (1.0 - u) / u) / (u * u)
            return out

    else:

        def transformed_scalar(u):
            if u == 0.0:
                return 0.0
            return f(a + (1.0 - u) / u) / (u * u)

        transformed = _batched(transformed_scalar)

    return romberg(transformed, 0.0, 1.0, cfg, vectorized=True)


def rk4_integrate(deriv, t0, t1, state0, steps):
    """Advance state0 from t0 to t1 with `steps` uniform classical RK4 steps.

    deriv(t, state) must return the state rate with the same shape as
    state0; scalar states are accepted and returned as floats.  t1 < t0 is
    allowed (negative step).  Deterministic for fixed inputs.
    """
    if steps < 1:
        raise ValidationError(f"steps must be >= 1, got {steps}")
    scalar = np.isscalar(state0) or np.ndim(state0) == 0
    y = np.atleast_1d(np.asarray(state0, dtype=float)).copy()
    t0 = float(t0)
    t1 = float(t1)
    h = (t1 - t0) / steps

    def rate(t, state):
        arg = float(state[0]) if scalar else state
        k = np.atleast_1d(np.asarray(deriv(t, arg), dtype=float))
        if not np.isfinite(k).all():
            raise EvaluationError(
                f"derivative returned a non-finite value at t={t!r}", where=t
            )
        return k

    for i in range(steps):
        t = t0 + i * h
        k1 = rate(t, y)
        k2 = rate(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = rate(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = rate(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    return float(y[0]) if scalar else y

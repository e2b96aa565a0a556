"""Named sweep evaluators for the CLI and the binding layer.

"paper-example" is the framework's reference workload: for each grid value
x, integrate (x + k)^-2 over k in [5, 20] (closed form 1/(x+5) - 1/(x+20)).
"impure-demo" deliberately violates the purity contract so the determinism
check can be exercised end to end.
"""

import os

from .errors import ValidationError
from .quadrature import QuadConfig, romberg

__all__ = ["build_evaluator", "paper_example_closed_form", "EVALUATOR_NAMES"]

PAPER_EXAMPLE_TOL = 1e-10


def paper_example_closed_form(x):
    """Closed form of the paper-example integral, for oracles."""
    return 1.0 / (x + 5.0) - 1.0 / (x + 20.0)


def _paper_example(tol):
    cfg = QuadConfig(tol=tol)

    def evaluate(x):
        def integrand(ks):
            s = x + ks
            return 1.0 / (s * s)

        return romberg(integrand, 5.0, 20.0, cfg, vectorized=True).value

    return evaluate


def _impure_demo(x):
    # Returns the process id: differs between serial and forked execution,
    # so benchmark_sweep's bitwise comparison must fail.
    return float(os.getpid())


def _fault_demo(x):
    # Fails on the low end of the default grid: exercises the
    # abort-with-index error path.
    if x < 1.0:
        raise RuntimeError("fault-demo evaluator tripped")
    return x


EVALUATOR_NAMES = ("paper-example", "identity", "zero", "impure-demo", "fault-demo")


def build_evaluator(name, tol=None):
    """Resolve a named evaluator to a callable float -> float."""
    if name == "paper-example":
        return _paper_example(PAPER_EXAMPLE_TOL if tol is None else tol)
    if name == "identity":
        return lambda x: x
    if name == "zero":
        return lambda x: 0.0
    if name == "impure-demo":
        return _impure_demo
    if name == "fault-demo":
        return _fault_demo
    raise ValidationError(
        f"unknown evaluator {name!r}; expected one of {', '.join(EVALUATOR_NAMES)}"
    )

"""Q-operator numerics for the hyperbolic Calogero-Moser system."""

import json

from ._core import (
    ConfigError,
    ConvergenceError,
    DomainError,
    Error,
    PoleError,
    __version__,
    a1_oracle,
    cosh_fourier_gamma,
    difference_eq_residual,
    dominant_asymptotics,
    eigenvalue_mu,
    extended_hypergeom,
    hc_coefficients,
    kernel_K,
    log_gamma,
    qz_kernel,
    truncation_radius,
    weight_W,
)
from ._core import _run_json


def _setting(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ",".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def run(experiment, **settings):
    """Run one experiment and return the report as a dict.

    Keyword names follow the CLI flags with dashes as underscores,
    e.g. run("int-eq", N=2, lam=1.0, xi_list=[0, 0.3]).
    """
    keys = {}
    for name, value in settings.items():
        key = "lambda" if name == "lam" else name.replace("_", "-")
        keys[key] = _setting(value)
    return json.loads(_run_json(experiment, keys))

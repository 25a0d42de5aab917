"""Distribution of indefinite non-central complex Gaussian quadratic forms.

The quadratic form ``Q = v^H A v`` is approximated by a confluent form ``Q_m``
whose PDF and CDF are finite exponential-polynomial mixtures with exactly
computed coefficients. ``m`` trades accuracy (closed-form MSE) against size.
"""

__version__ = "0.1.0"

from .confluent import build_pole_zero, mse, normalized_mse, select_m
from .distribution import ClosedFormDistribution
from .errors import *  # noqa: F401,F403
from .kernels import BACKEND
from .mrc import MrcScenario, ber, build_channel, outage, qam_weights
from .reduction import QuadraticForm, SpectralForm, reduce
from .residues import rationalize, residues_closed_form, residues_recursive

__all__ = [
    "BACKEND",
    "ClosedFormDistribution",
    "MrcScenario",
    "QuadraticForm",
    "SpectralForm",
    "ber",
    "build_channel",
    "build_pole_zero",
    "mse",
    "normalized_mse",
    "outage",
    "qam_weights",
    "rationalize",
    "reduce",
    "residues_closed_form",
    "residues_recursive",
    "select_m",
]

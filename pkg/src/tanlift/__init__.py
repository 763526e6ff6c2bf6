"""Numerical verification of homogeneous lifts of a Riemannian metric to the
slit tangent bundle, their K-structures, twin metrics and connections."""

__version__ = "0.1.0"

from .base import MetricSpec, base_point, christoffel, curvature, metric_at, ricci_scalar
from .bundle import FrameTensor, FrameVector, Idx, TangentPoint, h, local_frame, v
from .connections import ConnectionCoeffs, koszul_levi_civita
from .errors import (
    ChartError,
    DegeneracyError,
    DomainError,
    ModelError,
    SlitBundleError,
    UsageError,
)
from .jets import Jet2, eval_jet, lift_vars
from .structures import J, JT, Q, QT, KStructure
from .verify import SuiteConfig, VerificationReport, run_suite

__all__ = [
    "__version__",
    "MetricSpec", "base_point", "christoffel", "curvature", "metric_at", "ricci_scalar",
    "FrameTensor", "FrameVector", "Idx", "TangentPoint", "h", "v", "local_frame",
    "ConnectionCoeffs", "koszul_levi_civita",
    "ChartError", "DegeneracyError", "DomainError", "ModelError", "SlitBundleError", "UsageError",
    "Jet2", "eval_jet", "lift_vars",
    "J", "JT", "Q", "QT", "KStructure",
    "SuiteConfig", "VerificationReport", "run_suite",
]

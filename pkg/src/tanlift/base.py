"""The base Riemannian manifold (M, g) in a single chart.

Curvature sign convention::

    K_jih^s = d_j Gamma^s_ih - d_i Gamma^s_jh + Gamma^m_ih Gamma^s_jm - Gamma^m_jh Gamma^s_im

i.e. ``K_jih^s`` are the components of ``R(d_j, d_i) d_h``.  With it the unit
sphere satisfies ``K_jih^s = g_ih delta_j^s - g_jh delta_i^s`` and the Ricci
tensor is the contraction ``R_ih = K_sih^s``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _kernels, expr, jets
from .errors import ChartError, ModelError

FAMILIES = ("euclidean", "constant_curvature", "custom")


@dataclass(frozen=True)
class MetricSpec:
    """Base metric: a built-in family or custom component expressions.

    ``components`` holds an ``n x n`` symmetric table of expressions in
    ``x1..xn`` (custom family only).  ``chart_box`` optionally restricts the
    admissible chart to ``|x_k| <= chart_box``.
    """

    dim: int
    family: str = "euclidean"
    c: float = 0.0
    components: Optional[tuple] = None
    chart_box: Optional[float] = None

    def __post_init__(self):
        if self.dim < 2:
            raise ModelError("dim must be >= 2")
        if self.family not in FAMILIES:
            raise ModelError(f"unknown metric family {self.family!r}")
        if self.family == "custom":
            comps = self.components
            if comps is None or len(comps) != self.dim or any(
                len(row) != self.dim for row in comps
            ):
                raise ModelError("custom metric needs an n x n table of expressions")
            object.__setattr__(
                self, "components", tuple(tuple(str(e) for e in row) for row in comps)
            )
            for row in self.components:
                for e in row:
                    expr.parse(e, self.dim)

    @classmethod
    def euclidean(cls, dim: int) -> "MetricSpec":
        return cls(dim, "euclidean")

    @classmethod
    def constant_curvature(cls, dim: int, c: float) -> "MetricSpec":
        return cls(dim, "constant_curvature", float(c))

    @classmethod
    def custom(cls, components: Sequence[Sequence[str]], chart_box=None) -> "MetricSpec":
        return cls(len(components), "custom", 0.0, tuple(map(tuple, components)), chart_box)

    @property
    def label(self) -> str:
        if self.family == "constant_curvature":
            return f"constant_curvature({self.c:g})"
        return self.family

    @property
    def sectional_curvature(self) -> Optional[float]:
        """Known constant sectional curvature, or None for custom metrics."""
        if self.family == "euclidean":
            return 0.0
        if self.family == "constant_curvature":
            return self.c
        return None

    def with_dim(self, dim: int) -> "MetricSpec":
        if self.family == "custom":
            if dim != self.dim:
                raise ModelError("custom metric has a fixed dimension")
            return self
        return MetricSpec(dim, self.family, self.c, None, self.chart_box)

    def sample_box(self) -> float:
        """Half-width of a box of x safely inside the chart."""
        box = 1.0 if self.chart_box is None else min(1.0, 0.9 * self.chart_box)
        if self.family == "constant_curvature" and self.c < 0:
            box = min(box, float(np.sqrt(0.5 / (-self.c * self.dim))))
        return box

    def check_admissible(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ChartError(f"expected a point of dimension {self.dim}, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ChartError("non-finite coordinates")
        if self.chart_box is not None and np.any(np.abs(x) > self.chart_box):
            raise ChartError(f"x outside chart box |x_k| <= {self.chart_box}")
        if self.family == "constant_curvature" and 1.0 + self.c * float(x @ x) <= 0.0:
            raise ChartError("conformal chart requires 1 + c|x|^2 > 0")
        return x

    def metric_jet(self, x: jets.Jet2) -> jets.Jet2:
        """Components g_ij as a jet in whatever variables ``x`` carries."""
        n = self.dim
        if self.family == "euclidean":
            return jets.constant(np.eye(n), x.nvars, order=x.order)
        if self.family == "constant_curvature":
            r2 = (x * x).sum()
            conf = 4.0 / (1.0 + self.c * r2) ** 2
            return conf * np.eye(n)
        rows = [[expr.evaluate(e, x) for e in row] for row in self.components]
        flat = [
            e if isinstance(e, jets.Jet2) else jets.constant(e, x.nvars, x.order)
            for row in rows
            for e in row
        ]
        return jets.stack(flat).reshape(n, n)


@dataclass
class BasePoint:
    """All base-manifold data at one chart point (see module docstring)."""

    x: np.ndarray
    g: np.ndarray
    ginv: np.ndarray
    dg: np.ndarray
    d2g: np.ndarray
    gamma: np.ndarray
    dgamma: np.ndarray
    K: np.ndarray


def _check_metric(g: np.ndarray) -> np.ndarray:
    if not np.allclose(g, g.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(g).max())):
        raise ModelError("metric components are not symmetric")
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise ModelError("metric is not positive definite") from None
    ginv = np.linalg.inv(g)
    return ginv


def base_point(spec: MetricSpec, x) -> BasePoint:
    x = spec.check_admissible(x)
    return base_point_from_jet(x, spec.metric_jet(jets.lift_vars(x)))


def base_point_from_jet(x: np.ndarray, gj: jets.Jet2) -> BasePoint:
    """Base data from a second-order jet of g_ij in the variables x."""
    g = gj.value
    ginv = _check_metric(g)
    dg = np.ascontiguousarray(gj.grad)
    d2g = np.ascontiguousarray(gj.hess)
    gamma = _kernels.christoffel(ginv, dg)
    dgamma = _kernels.christoffel_derivative(ginv, dg, d2g)
    K = _kernels.curvature(gamma, dgamma)
    return BasePoint(x, g, ginv, dg, d2g, gamma, dgamma, K)


def metric_at(spec: MetricSpec, x):
    """Return ``(g_ij, g^ij)`` at ``x``."""
    x = spec.check_admissible(x)
    g = spec.metric_jet(jets.lift_vars(x)).value
    return g, _check_metric(g)


def christoffel(spec: MetricSpec, x) -> np.ndarray:
    """Gamma^k_ij as ``gamma[k, i, j]``."""
    x = spec.check_admissible(x)
    gj = spec.metric_jet(jets.lift_vars(x))
    ginv = _check_metric(gj.value)
    return _kernels.christoffel(ginv, np.ascontiguousarray(gj.grad))


def curvature(spec: MetricSpec, x) -> np.ndarray:
    """K_jih^s as ``K[j, i, h, s]``."""
    return base_point(spec, x).K


def ricci_scalar(spec: MetricSpec, x):
    bp = base_point(spec, x)
    ricci = np.einsum("sihs->ih", bp.K)
    return ricci, float(np.einsum("ij,ij->", bp.ginv, ricci))


def model_curvature(g: np.ndarray, c: float) -> np.ndarray:
    """c (g_ih delta_j^s - g_jh delta_i^s) laid out as ``[j, i, h, s]``."""
    d = np.eye(g.shape[0])
    return c * (np.einsum("ih,js->jihs", g, d) - np.einsum("jh,is->jihs", g, d))


def constant_curvature_defect(spec: MetricSpec, x, c: float) -> float:
    bp = base_point(spec, x)
    return float(np.abs(bp.K - model_curvature(bp.g, c)).max())


def lower_index(spec: MetricSpec, x, y) -> np.ndarray:
    """y_i = g_ij(x) y^j."""
    g, _ = metric_at(spec, x)
    return g @ np.asarray(y, dtype=float)


def random_quadratic_metric(dim: int, rng: np.random.Generator, box: float = 0.5) -> MetricSpec:
    """``I`` plus a small symmetric linear+quadratic perturbation.

    Coefficients are scaled so that the perturbation stays diagonally dominant
    on ``|x_k| <= box``.
    """
    n = dim
    budget = 0.3 / (n * (n + n * n) * max(box, box * box))
    lin = rng.uniform(-1, 1, size=(n, n, n)) * budget
    quad = rng.uniform(-1, 1, size=(n, n, n, n)) * budget
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            a, b = min(i, j), max(i, j)
            terms = ["1" if i == j else "0"]
            for k in range(n):
                terms.append(f"({float(lin[a, b, k])!r})*x{k + 1}")
                for m in range(n):
                    terms.append(f"({float(quad[a, b, k, m])!r})*x{k + 1}*x{m + 1}")
            row.append(" + ".join(terms))
        rows.append(row)
    return MetricSpec.custom(rows, chart_box=box)

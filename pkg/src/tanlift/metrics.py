"""Metric lifts to the slit tangent bundle, their twins and 2-forms.

All lifted tensors are produced as *fields*: callables ``field(lf)`` taking a
:class:`~tanlift.bundle.LocalFrame` and returning the ``2n x 2n`` frame
components as a jet, so oracles can differentiate them along the frame.

Factor convention: ``g2(X_i, X_jbar) = 2 g_ij`` and
``gtilde2(X_i, X_jbar) = (2/||y||) g_ij``.  Two-form components are the values
``omega(X_A, X_B)``; a display ``f g_ij dx^i ^ dy^j`` is read with the
half-normalized wedge, giving ``omega(X_i, X_jbar) = f g_ij / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import _kernels, jets
from .base import MetricSpec
from .bundle import FrameTensor, LocalFrame, homothety, local_frame
from .errors import DegeneracyError
from .structures import JT, QT, KStructure, twin_field


@dataclass
class FrameMetric:
    HH: np.ndarray
    HV: np.ndarray
    VH: np.ndarray
    VV: np.ndarray

    @classmethod
    def from_matrix(cls, M: np.ndarray) -> "FrameMetric":
        n = M.shape[0] // 2
        return cls(M[:n, :n].copy(), M[:n, n:].copy(), M[n:, :n].copy(), M[n:, n:].copy())

    @property
    def matrix(self) -> np.ndarray:
        return np.block([[self.HH, self.HV], [self.VH, self.VV]])

    def max_diff(self, other: "FrameMetric") -> float:
        return float(np.abs(self.matrix - other.matrix).max())


@dataclass
class FrameTwoForm:
    matrix: np.ndarray

    def antisymmetry_defect(self) -> float:
        return float(np.abs(self.matrix + self.matrix.T).max())


def _off_diagonal(block: jets.Jet2, n: int) -> jets.Jet2:
    zero = jets.constant(np.zeros((n, n)), block.nvars, order=1)
    top = jets.concatenate([zero, block], axis=1)
    bottom = jets.concatenate([block.T, zero], axis=1)
    return jets.concatenate([top, bottom], axis=0)


def _diagonal(hh: jets.Jet2, vv: jets.Jet2, n: int) -> jets.Jet2:
    zero = jets.constant(np.zeros((n, n)), hh.nvars, order=1)
    top = jets.concatenate([hh, zero], axis=1)
    bottom = jets.concatenate([zero, vv], axis=1)
    return jets.concatenate([top, bottom], axis=0)


# -- fields ------------------------------------------------------------------------

def g2_field(lf: LocalFrame) -> jets.Jet2:
    return _off_diagonal(2.0 * lf.g.truncate(), lf.n)


def gtilde2_field(lf: LocalFrame) -> jets.Jet2:
    return _off_diagonal(lf.g.truncate() * (2.0 / lf.norm.truncate()), lf.n)


def hJ_field(lf: LocalFrame) -> jets.Jet2:
    g = lf.g.truncate()
    return _diagonal(-2.0 * g, g * (2.0 / (lf.norm.truncate() ** 2)), lf.n)


def hQ_field(lf: LocalFrame) -> jets.Jet2:
    g = lf.g.truncate()
    return _diagonal(2.0 * g, g * (2.0 / (lf.norm.truncate() ** 2)), lf.n)


def liouville_field(lf: LocalFrame) -> jets.Jet2:
    """The 2-form g_ij dx^i ^ dy^j with unit components g_ij on (X_i, X_jbar)."""
    n = lf.n
    g = lf.g.truncate()
    zero = jets.constant(np.zeros((n, n)), g.nvars, order=1)
    top = jets.concatenate([zero, g], axis=1)
    bottom = jets.concatenate([-g, zero], axis=1)
    return jets.concatenate([top, bottom], axis=0)


FIELDS = {
    "g2": g2_field,
    "gtilde2": gtilde2_field,
    "hJ": hJ_field,
    "hQ": hQ_field,
}

# (twin metric, structure it is paired with for Omega)
OMEGA_PAIRS = {"hJ": (hJ_field, QT), "hQ": (hQ_field, JT)}


def omega_field(which: str) -> Callable:
    """Omega(X, Y) = h(K X, Y) for the pair named by ``which``."""
    h, K = OMEGA_PAIRS[which]
    f = twin_field(h, K)
    f.__name__ = f"omega_{which}"
    return f


def omega_display_field(which: str) -> Callable:
    """Closed form (4/||y||) g_ij dx^i ^ dy^j (hJ) or (4/||y||) g_ij dy^i ^ dx^j (hQ)."""
    sign = 1.0 if which == "hJ" else -1.0
    if which not in OMEGA_PAIRS:
        raise KeyError(which)

    def field(lf: LocalFrame) -> jets.Jet2:
        # half-normalized wedge: 4/||y|| -> 2/||y|| per component
        return liouville_field(lf) * (sign * 2.0 / lf.norm.truncate())

    field.__name__ = f"omega_display_{which}"
    return field


# -- pointwise API -----------------------------------------------------------------

def _at(field: Callable, spec: MetricSpec, u) -> FrameMetric:
    return FrameMetric.from_matrix(field(local_frame(spec, u)).value)


def g2_at(spec: MetricSpec, u) -> FrameMetric:
    return _at(g2_field, spec, u)


def gtilde2_at(spec: MetricSpec, u) -> FrameMetric:
    return _at(gtilde2_field, spec, u)


def twin_hJ_at(spec: MetricSpec, u) -> FrameMetric:
    return _at(hJ_field, spec, u)


def twin_hQ_at(spec: MetricSpec, u) -> FrameMetric:
    return _at(hQ_field, spec, u)


def generic_twin_at(spec: MetricSpec, u, K: KStructure, G: Callable = gtilde2_field) -> FrameMetric:
    return _at(twin_field(G, K), spec, u)


def omega_at(spec: MetricSpec, u, which: str) -> FrameTwoForm:
    return FrameTwoForm(omega_field(which)(local_frame(spec, u)).value)


def omega_display_at(spec: MetricSpec, u, which: str) -> FrameTwoForm:
    return FrameTwoForm(omega_display_field(which)(local_frame(spec, u)).value)


def pullback_homothety(spec: MetricSpec, u, t: float, field: Callable) -> FrameMetric:
    """Frame components at u of h_t^* G, G given as a field producer."""
    lf = local_frame(spec, u)
    lt = local_frame(spec, homothety(u, t))
    return FrameMetric.from_matrix(pullback_from_frames(lf, lt, t, field))


def pullback_from_frames(lf: LocalFrame, lt: LocalFrame, t: float, field: Callable) -> np.ndarray:
    """Frame matrix of h_t^* G at lf's point, ``lt`` being the frame at h_t(u)."""
    n = lf.n
    Et = lt.E.value
    Einv = np.linalg.inv(Et)
    coord = Einv.T @ field(lt).value @ Einv
    jac = np.diag(np.r_[np.ones(n), np.full(n, t)])
    pulled = jac.T @ coord @ jac
    E = lf.E.value
    return E.T @ pulled @ E


def nondegenerate(M: np.ndarray, rtol: float = 1e-12) -> bool:
    s = np.linalg.svd(M, compute_uv=False)
    return bool(s[-1] > rtol * s[0])


# -- exterior derivative -----------------------------------------------------------

def exterior_from_frame(lf: LocalFrame, field: Callable) -> np.ndarray:
    om = field(lf)
    return _kernels.exterior2(
        np.ascontiguousarray(om.value),
        np.ascontiguousarray(lf.derivative(om)),
        np.ascontiguousarray(lf.brackets()),
    )


def exterior_derivative_2form(spec: MetricSpec, u, field: Callable) -> FrameTensor:
    """d omega(X_A, X_B, X_C), alternating-sum convention without 1/3."""
    return FrameTensor(exterior_from_frame(local_frame(spec, u), field), ("down",) * 3)


def wedge_1_2(alpha: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """(alpha ^ omega)(A, B, C) in the same convention as the exterior derivative."""
    return (
        np.einsum("A,BC->ABC", alpha, omega)
        - np.einsum("B,AC->ABC", alpha, omega)
        + np.einsum("C,AB->ABC", alpha, omega)
    )


@dataclass
class ProportionalityFit:
    kappa: Optional[float]
    residual: float
    inconclusive: bool
    max_domega: float


def proportionality_check_dOmega(
    spec: MetricSpec,
    u,
    which: str = "hJ",
    indices: Optional[Sequence[int]] = None,
    floor: float = 1e-12,
) -> ProportionalityFit:
    """Fit d Omega = kappa (d||y|| / ||y||) ^ Omega by least squares.

    ``indices`` restricts the comparison to a subset of frame positions.
    """
    lf = local_frame(spec, u)
    field = omega_field(which)
    dom = exterior_from_frame(lf, field)
    # d||y|| on the frame: X_i ||y|| = 0, X_ibar ||y|| = y_i / ||y||
    dnorm = lf.derivative(lf.norm)
    basis = wedge_1_2(dnorm / lf.r, field(lf).value)
    if indices is not None:
        ix = np.ix_(indices, indices, indices)
        dom, basis = dom[ix], basis[ix]
    a, b = basis.ravel(), dom.ravel()
    denom = float(a @ a)
    max_dom = float(np.abs(b).max()) if b.size else 0.0
    if denom <= floor**2:
        return ProportionalityFit(None, max_dom, True, max_dom)
    kappa = float(a @ b) / denom
    return ProportionalityFit(kappa, float(np.abs(b - kappa * a).max()), False, max_dom)


def require_nondegenerate(M: np.ndarray, what: str) -> None:
    if not nondegenerate(M):
        raise DegeneracyError(f"{what} is degenerate at this point")

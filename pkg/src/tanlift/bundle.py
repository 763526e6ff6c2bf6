"""The slit tangent bundle TM \\ {0} in induced coordinates (x, y).

Adapted frame::

    X_h    = d/dx^h - N^m_h d/dy^m,     N^m_h = y^a Gamma^m_ah(x)
    X_hbar = d/dy^h

Frame positions are 0-based: horizontal ``X_k`` sits at ``k`` and vertical
``X_kbar`` at ``n + k``.  Use :class:`Idx` (``h(k)`` / ``v(k)``) wherever a
single adapted index is passed around.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from . import _kernels, jets
from .base import BasePoint, MetricSpec, base_point, base_point_from_jet
from .errors import DomainError, SlitBundleError


@dataclass(frozen=True)
class Idx:
    """One adapted-frame index: ``X_k`` (bar=False) or ``X_kbar`` (bar=True)."""

    k: int
    bar: bool = False

    def pos(self, n: int) -> int:
        if not 0 <= self.k < n:
            raise IndexError(f"frame index {self.k} out of range for n={n}")
        return self.k + n if self.bar else self.k

    @classmethod
    def from_pos(cls, p: int, n: int) -> "Idx":
        return cls(p - n, True) if p >= n else cls(p, False)

    def __str__(self) -> str:
        return f"X_{self.k + 1}{'bar' if self.bar else ''}"


def h(k: int) -> Idx:
    return Idx(k, False)


def v(k: int) -> Idx:
    return Idx(k, True)


def _pos(A, n: int) -> int:
    return A.pos(n) if isinstance(A, Idx) else int(A)


@dataclass(frozen=True)
class TangentPoint:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float).reshape(-1)
        y = np.array(self.y, dtype=float).reshape(-1)
        if x.shape != y.shape:
            raise ValueError("x and y must have the same length")
        if not np.any(y):
            raise SlitBundleError("y = 0 is not on the slit tangent bundle")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def z(self) -> np.ndarray:
        return np.concatenate([self.x, self.y])


@dataclass
class FrameVector:
    """Coefficients on the horizontal (``h``) and vertical (``v``) frame."""

    h: np.ndarray
    v: np.ndarray

    @classmethod
    def from_array(cls, arr) -> "FrameVector":
        arr = np.asarray(arr, dtype=float)
        n = arr.size // 2
        return cls(arr[:n].copy(), arr[n:].copy())

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.h, self.v])


@dataclass
class FrameTensor:
    """Components over adapted indices; ``variance`` is "up"/"down" per slot."""

    components: np.ndarray
    variance: Tuple[str, ...]

    def __post_init__(self):
        if self.components.ndim != len(self.variance):
            raise ValueError("rank does not match variance")
        d = self.components.shape[0]
        if any(s != d for s in self.components.shape) or d % 2:
            raise ValueError("components must span 2n adapted indices per slot")

    @property
    def rank(self) -> int:
        return len(self.variance)


def as_point(u) -> TangentPoint:
    if isinstance(u, TangentPoint):
        return u
    x, y = u
    return TangentPoint(x, y)


def homothety(u, t: float) -> TangentPoint:
    """h_t(x, y) = (x, t y)."""
    if not t > 0:
        raise DomainError("homothety", "t must be positive")
    u = as_point(u)
    return TangentPoint(u.x, t * u.y)


# -- pointwise quantities ------------------------------------------------------

def norm_y(spec: MetricSpec, u) -> float:
    u = as_point(u)
    g = spec.metric_jet(jets.lift_vars(spec.check_admissible(u.x))).value
    return float(np.sqrt(u.y @ g @ u.y))


def nonlinear_connection(spec: MetricSpec, u) -> np.ndarray:
    """N[m, j] = y^a Gamma^m_aj."""
    from .base import christoffel

    u = as_point(u)
    return np.einsum("a,maj->mj", u.y, christoffel(spec, u.x))


def _frame_matrix(N: np.ndarray) -> np.ndarray:
    n = N.shape[0]
    E = np.eye(2 * n)
    E[n:, :n] = -N
    return E


def frame_to_coords(spec: MetricSpec, u, V: FrameVector) -> np.ndarray:
    """Components on (d/dx, d/dy) of a frame vector."""
    return _frame_matrix(nonlinear_connection(spec, u)) @ V.as_array()


def coords_to_frame(spec: MetricSpec, u, w) -> FrameVector:
    N = nonlinear_connection(spec, u)
    n = N.shape[0]
    w = np.asarray(w, dtype=float)
    # inverse of [[I, 0], [-N, I]] is [[I, 0], [N, I]]
    return FrameVector(w[:n].copy(), w[n:] + N @ w[:n])


# -- jet-level local picture -----------------------------------------------------

@dataclass
class LocalFrame:
    """Everything at one point of TM, as jets over the 2n coordinates (x, y).

    ``E`` holds the coordinate components of the adapted frame, column A being
    X_A; its gradient is what the generic Lie brackets differentiate.
    """

    spec: MetricSpec
    u: TangentPoint
    base: BasePoint
    x: jets.Jet2
    y: jets.Jet2
    g: jets.Jet2
    gamma: jets.Jet2
    N: jets.Jet2
    norm: jets.Jet2
    E: jets.Jet2
    _brackets: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.u.n

    @property
    def r(self) -> float:
        return float(self.norm.value)

    @property
    def y_lower(self) -> np.ndarray:
        return self.base.g @ self.u.y

    def to_frame(self, w: np.ndarray) -> np.ndarray:
        """Coordinate components (leading axis) to frame components."""
        return np.linalg.solve(self.E.value, w.reshape(2 * self.n, -1)).reshape(w.shape)

    def derivative(self, f: jets.Jet2) -> np.ndarray:
        """X_C f for every C, appended as a trailing axis."""
        return np.einsum("...m,mC->...C", f.grad, self.E.value)

    def brackets(self) -> np.ndarray:
        """c[D, A, B] with [X_A, X_B] = c^D_AB X_D, from coordinates."""
        if self._brackets is None:
            Ev = np.ascontiguousarray(self.E.value)
            Eg = np.ascontiguousarray(self.E.grad)
            coord = _kernels.coord_brackets(Ev, Eg, Ev, Eg)
            self._brackets = self.to_frame(coord)
        return self._brackets


def local_frame(spec: MetricSpec, u) -> LocalFrame:
    u = as_point(u)
    n = u.n
    if n != spec.dim:
        raise ValueError(f"point has dimension {n}, metric has {spec.dim}")
    x0 = spec.check_admissible(u.x)
    z = jets.lift_vars(u.z)
    x, y = z[:n], z[n:]
    g = spec.metric_jet(x)
    # g depends on x only, so its x-block is the base jet
    bp = base_point_from_jet(x0, jets.Jet2(g.value, g.grad[..., :n], g.hess[..., :n, :n]))
    dg = jets.stack([g.partial(l) for l in range(n)], axis=-1)  # [i, j, l]
    ginv = jets.inv(g).truncate()
    first = 0.5 * (dg.transpose(1, 2, 0) + dg.transpose(1, 0, 2) - dg.transpose(2, 0, 1))
    gamma = jets.einsum("km,mij->kij", ginv, first)  # first[m, i, j]
    N = jets.einsum("a,maj->mj", y, gamma)
    norm = jets.sqrt(jets.einsum("i,i->", y, jets.einsum("ij,j->i", g, y)))
    top = jets.constant(np.hstack([np.eye(n), np.zeros((n, n))]), 2 * n, order=1)
    bottom = jets.concatenate([-N, jets.constant(np.eye(n), 2 * n, order=1)], axis=1)
    E = jets.concatenate([top, bottom], axis=0)
    return LocalFrame(spec, u, bp, x, y, g, gamma, N, norm, E)


def frame_derivative(spec: MetricSpec, u, f: Callable, A) -> float:
    """X_A f for a scalar function ``f(x, y)`` written in jet arithmetic."""
    lf = local_frame(spec, u)
    val = f(lf.x, lf.y)
    if not isinstance(val, jets.Jet2):
        return 0.0
    return float(lf.derivative(val)[_pos(A, lf.n)])


def lie_bracket_closed(spec: MetricSpec, u, A, B) -> FrameVector:
    """[X_A, X_B] from the closed-form bracket relations of the adapted frame."""
    u = as_point(u)
    n = u.n
    a, b = _pos(A, n), _pos(B, n)
    bp = base_point(spec, u.x)
    out = FrameVector(np.zeros(n), np.zeros(n))
    if a < n and b < n:
        # [X_i, X_j] = y^a K_jia^m X_mbar
        out.v = np.einsum("a,am->m", u.y, bp.K[b, a])
    elif a < n <= b:
        # [X_i, X_jbar] = Gamma^m_ji X_mbar
        out.v = bp.gamma[:, b - n, a].copy()
    elif b < n <= a:
        out.v = -bp.gamma[:, a - n, b]
    return out


def lie_bracket_generic(spec: MetricSpec, u, A, B) -> FrameVector:
    """[X_A, X_B] by differentiating the frame's coordinate components."""
    lf = local_frame(spec, u)
    c = lf.brackets()
    return FrameVector.from_array(c[:, _pos(A, lf.n), _pos(B, lf.n)])


def closed_brackets(bp: BasePoint, y: np.ndarray) -> np.ndarray:
    """All closed-form brackets as c[D, A, B]."""
    n = y.size
    c = np.zeros((2 * n, 2 * n, 2 * n))
    c[n:, :n, :n] = np.einsum("a,jiam->mij", y, bp.K)
    c[n:, :n, n:] = np.einsum("mji->mij", bp.gamma)
    c[n:, n:, :n] = -np.einsum("mij->mij", bp.gamma)
    return c

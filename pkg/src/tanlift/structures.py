"""K-structures on the slit tangent bundle and their integrability.

A structure is stored as the frame matrix ``k[D, A]`` with ``K X_A = k^D_A X_D``.
For the 0-homogeneous structures the entries are the functions ``±||y||`` and
``1/||y||``, so the matrices are built as jets; the Nijenhuis oracle needs
their derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Tuple

import numpy as np

from . import _kernels, jets
from .base import MetricSpec
from .bundle import FrameTensor, FrameVector, LocalFrame, TangentPoint, local_frame

# (epsilon, sigma) -> name of the compatible pair
CLASSIFICATION = {
    (1, 1): "almost product",
    (1, -1): "almost para-Hermitian",
    (-1, 1): "almost Hermitian",
    (-1, -1): "almost anti-Hermitian",
}


@dataclass(frozen=True)
class KStructure:
    """One of the four structures; ``homogeneous`` marks the rescaled ones."""

    kind: str
    epsilon: int
    homogeneous: bool

    def field(self, lf: LocalFrame) -> jets.Jet2:
        n = lf.n
        m = 2 * n
        one = jets.constant(1.0, m, order=1)
        if self.homogeneous:
            down, up = lf.norm.truncate(), 1.0 / lf.norm.truncate()
        else:
            down, up = one, one
        if self.epsilon == -1:
            down = -down
        eye = np.eye(n)
        zero = jets.constant(np.zeros((n, n)), m, order=1)
        top = jets.concatenate([zero, up * eye], axis=1)
        bottom = jets.concatenate([down * eye, zero], axis=1)
        return jets.concatenate([top, bottom], axis=0)

    def __str__(self) -> str:
        return self.kind


J = KStructure("J", -1, False)
Q = KStructure("Q", 1, False)
JT = KStructure("Jtilde", -1, True)
QT = KStructure("Qtilde", 1, True)
STRUCTURES = {s.kind: s for s in (J, Q, JT, QT)}


@dataclass(frozen=True)
class CompatibilityClass:
    epsilon: int
    sigma: int

    @property
    def name(self) -> str:
        return CLASSIFICATION[(self.epsilon, self.sigma)]


def apply(spec: MetricSpec, u, K: KStructure, V: FrameVector) -> FrameVector:
    lf = local_frame(spec, u)
    return FrameVector.from_array(K.field(lf).value @ V.as_array())


def square_defect(spec: MetricSpec, u, K: KStructure) -> float:
    """max |K o K - epsilon I| in the adapted frame."""
    k = K.field(local_frame(spec, u)).value
    return float(np.abs(k @ k - K.epsilon * np.eye(k.shape[0])).max())


def twin_field(G: Callable, K: KStructure) -> Callable:
    """Producer of the twin h(X, Y) = G(KX, Y)."""

    def field(lf: LocalFrame) -> jets.Jet2:
        return jets.einsum("DA,DB->AB", K.field(lf), G(lf))

    field.__name__ = f"twin_{getattr(G, '__name__', 'G')}_{K.kind}"
    return field


def sigma_defects(G: np.ndarray, k: np.ndarray) -> Tuple[float, float]:
    transformed = k.T @ G @ k
    return float(np.abs(transformed - G).max()), float(np.abs(transformed + G).max())


def metric_compatibility_sigma(spec: MetricSpec, u, K: KStructure, G: Callable):
    """(defect for sigma=+1, defect for sigma=-1) of G(KA, KB) = sigma G(A, B)."""
    lf = local_frame(spec, u)
    return sigma_defects(G(lf).value, K.field(lf).value)


def classify(spec: MetricSpec, u, K: KStructure, G: Callable, tol: float):
    """The CompatibilityClass realized by (G, K) at u, or None."""
    plus, minus = metric_compatibility_sigma(spec, u, K, G)
    if plus <= tol:
        return CompatibilityClass(K.epsilon, 1)
    if minus <= tol:
        return CompatibilityClass(K.epsilon, -1)
    return None


def twin_symmetry_defect(spec: MetricSpec, u, K: KStructure, G: Callable, sigma: int) -> float:
    """max |h(A, B) - eps*sigma h(B, A)| for the twin of (G, K)."""
    hmat = twin_field(G, K)(local_frame(spec, u)).value
    return float(np.abs(hmat - K.epsilon * sigma * hmat.T).max())


# -- Nijenhuis -------------------------------------------------------------------

def nijenhuis_from_frame(lf: LocalFrame, K: KStructure) -> np.ndarray:
    """N[D, A, B] by brackets of the vector fields K X_A in coordinates."""
    E = lf.E
    k = K.field(lf)
    KX = jets.einsum("mD,DA->mA", E, k)
    Ev, Eg = np.ascontiguousarray(E.value), np.ascontiguousarray(E.grad)
    Kv, Kg = np.ascontiguousarray(KX.value), np.ascontiguousarray(KX.grad)
    b_kk = _kernels.coord_brackets(Kv, Kg, Kv, Kg)
    b_kx = _kernels.coord_brackets(Kv, Kg, Ev, Eg)
    b_xk = _kernels.coord_brackets(Ev, Eg, Kv, Kg)
    b_xx = _kernels.coord_brackets(Ev, Eg, Ev, Eg)
    Kc = Ev @ k.value @ np.linalg.inv(Ev)
    coord = (
        b_kk
        - np.einsum("km,mab->kab", Kc, b_kx + b_xk)
        + K.epsilon * b_xx
    )
    return lf.to_frame(coord)


def nijenhuis_generic(spec: MetricSpec, u, K: KStructure) -> FrameTensor:
    return FrameTensor(nijenhuis_from_frame(local_frame(spec, u), K), ("up", "down", "down"))


def nijenhuis_jtilde_components(lf: LocalFrame) -> np.ndarray:
    n = lf.n
    y = lf.u.y
    yl = lf.y_lower
    r2 = lf.r**2
    d = np.eye(n)
    # T[i, j, s] = y_i d_j^s - y_j d_i^s - y^a K_jia^s
    T = (
        np.einsum("i,js->ijs", yl, d)
        - np.einsum("j,is->ijs", yl, d)
        - np.einsum("a,jias->ijs", y, lf.base.K)
    )
    N = np.zeros((2 * n, 2 * n, 2 * n))
    N[n:, :n, :n] = np.einsum("ijs->sij", T)
    N[:n, :n, n:] = np.einsum("ijs->sij", T) / r2
    N[:n, n:, :n] = -np.einsum("jis->sij", T) / r2
    N[n:, n:, n:] = -np.einsum("ijs->sij", T) / r2
    return N


def nijenhuis_Jtilde_closed(spec: MetricSpec, u) -> FrameTensor:
    return FrameTensor(
        nijenhuis_jtilde_components(local_frame(spec, u)), ("up", "down", "down")
    )


def integrability_defect(spec: MetricSpec, points: Iterable, K: KStructure) -> float:
    points = list(points)
    if not points:
        raise ValueError("integrability_defect needs at least one point")
    return max(
        float(np.abs(nijenhuis_generic(spec, u, K).components).max()) for u in points
    )


def pullback_structure(spec: MetricSpec, u, t: float, K: KStructure) -> np.ndarray:
    """Frame matrix at u of h_t^* K (compare with K's own frame matrix at u)."""
    from .bundle import homothety

    lf = local_frame(spec, u)
    lt = local_frame(spec, homothety(u, t))
    n = lf.n
    Kc = lt.E.value @ K.field(lt).value @ np.linalg.inv(lt.E.value)
    jac = np.diag(np.r_[np.ones(n), np.full(n, t)])
    pulled = np.linalg.inv(jac) @ Kc @ jac
    return np.linalg.solve(lf.E.value, pulled @ lf.E.value)

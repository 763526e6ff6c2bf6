"""Tensor-assembly kernels.

Every kernel exists twice: an explicit-loop version compiled with
``numba.njit`` and a pure-numpy ``einsum`` version.  The loop versions are
used when numba is importable and ``TANLIFT_NUMBA`` is not set to ``0``;
:func:`use_backend` switches at runtime (tests run both).

Index conventions
-----------------
dg[i, j, l]        = d_l g_ij
d2g[i, j, l, m]    = d_l d_m g_ij
gamma[k, i, j]     = Gamma^k_ij
dgamma[l, k, i, j] = d_l Gamma^k_ij
K[j, i, h, s]      = K_jih^s
frame tensors: dT[..., C] = X_C applied to the component T[...]
brackets c[D, A, B]: [X_A, X_B] = c^D_AB X_D
"""

from __future__ import annotations

import os
from contextlib import contextmanager

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def _env_wants_numba() -> bool:
    flag = os.environ.get("TANLIFT_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "no", "off")


# -- numpy --------------------------------------------------------------------

def christoffel_np(ginv, dg):
    first = 0.5 * (
        np.einsum("jmi->mij", dg) + np.einsum("imj->mij", dg) - np.einsum("ijm->mij", dg)
    )
    return np.einsum("km,mij->kij", ginv, first)


def christoffel_derivative_np(ginv, dg, d2g):
    first = 0.5 * (
        np.einsum("jmi->mij", dg) + np.einsum("imj->mij", dg) - np.einsum("ijm->mij", dg)
    )
    dfirst = 0.5 * (
        np.einsum("jmil->lmij", d2g)
        + np.einsum("imjl->lmij", d2g)
        - np.einsum("ijml->lmij", d2g)
    )
    dginv = -np.einsum("ka,abl,bm->lkm", ginv, dg, ginv, optimize=True)
    return np.einsum("lkm,mij->lkij", dginv, first) + np.einsum("km,lmij->lkij", ginv, dfirst)


def curvature_np(gamma, dgamma):
    return (
        np.einsum("jsih->jihs", dgamma)
        - np.einsum("isjh->jihs", dgamma)
        + np.einsum("mih,sjm->jihs", gamma, gamma)
        - np.einsum("mjh,sim->jihs", gamma, gamma)
    )


def koszul_rhs_np(G, dG, c):
    return (
        np.einsum("BAC->ABC", dG)
        + np.einsum("CAB->ABC", dG)
        - np.einsum("CBA->ABC", dG)
        + np.einsum("DCB,DA->ABC", c, G)
        - np.einsum("DCA,DB->ABC", c, G)
        - np.einsum("DBA,DC->ABC", c, G)
    )


def coord_brackets_np(V, dV, W, dW):
    return np.einsum("mp,kqm->kpq", V, dW) - np.einsum("mq,kpm->kpq", W, dV)


def exterior2_np(omega, domega, c):
    return (
        np.einsum("BCA->ABC", domega)
        - np.einsum("ACB->ABC", domega)
        + domega
        - np.einsum("DAB,DC->ABC", c, omega)
        + np.einsum("DAC,DB->ABC", c, omega)
        - np.einsum("DBC,DA->ABC", c, omega)
    )


# -- loops (compiled when numba is available) ---------------------------------

def christoffel_loop(ginv, dg):
    n = ginv.shape[0]
    out = np.zeros((n, n, n))
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                s = 0.0
                for m in range(n):
                    s += ginv[k, m] * (dg[j, m, i] + dg[i, m, j] - dg[i, j, m])
                out[k, i, j] = 0.5 * s
                out[k, j, i] = 0.5 * s
    return out


def christoffel_derivative_loop(ginv, dg, d2g):
    n = ginv.shape[0]
    first = np.zeros((n, n, n))
    for m in range(n):
        for i in range(n):
            for j in range(n):
                first[m, i, j] = 0.5 * (dg[j, m, i] + dg[i, m, j] - dg[i, j, m])
    tmp = np.zeros((n, n, n))
    for l in range(n):
        for k in range(n):
            for b in range(n):
                s = 0.0
                for a in range(n):
                    s += ginv[k, a] * dg[a, b, l]
                tmp[l, k, b] = s
    dginv = np.zeros((n, n, n))
    for l in range(n):
        for k in range(n):
            for m in range(n):
                s = 0.0
                for b in range(n):
                    s += tmp[l, k, b] * ginv[b, m]
                dginv[l, k, m] = -s
    out = np.zeros((n, n, n, n))
    for l in range(n):
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    s = 0.0
                    for m in range(n):
                        dfirst = 0.5 * (d2g[j, m, i, l] + d2g[i, m, j, l] - d2g[i, j, m, l])
                        s += dginv[l, k, m] * first[m, i, j] + ginv[k, m] * dfirst
                    out[l, k, i, j] = s
    return out


def curvature_loop(gamma, dgamma):
    n = gamma.shape[0]
    out = np.zeros((n, n, n, n))
    for j in range(n):
        for i in range(n):
            for h in range(n):
                for s in range(n):
                    acc = dgamma[j, s, i, h] - dgamma[i, s, j, h]
                    for m in range(n):
                        acc += gamma[m, i, h] * gamma[s, j, m] - gamma[m, j, h] * gamma[s, i, m]
                    out[j, i, h, s] = acc
    return out


def koszul_rhs_loop(G, dG, c):
    d = G.shape[0]
    out = np.zeros((d, d, d))
    for A in range(d):
        for B in range(d):
            for C in range(d):
                acc = dG[B, A, C] + dG[C, A, B] - dG[C, B, A]
                for D in range(d):
                    acc += c[D, C, B] * G[D, A] - c[D, C, A] * G[D, B] - c[D, B, A] * G[D, C]
                out[A, B, C] = acc
    return out


def coord_brackets_loop(V, dV, W, dW):
    d, P = V.shape
    Q = W.shape[1]
    out = np.zeros((d, P, Q))
    for k in range(d):
        for p in range(P):
            for q in range(Q):
                acc = 0.0
                for m in range(d):
                    acc += V[m, p] * dW[k, q, m] - W[m, q] * dV[k, p, m]
                out[k, p, q] = acc
    return out


def exterior2_loop(omega, domega, c):
    d = omega.shape[0]
    out = np.zeros((d, d, d))
    for A in range(d):
        for B in range(d):
            for C in range(d):
                acc = domega[B, C, A] - domega[A, C, B] + domega[A, B, C]
                for D in range(d):
                    acc += (
                        -c[D, A, B] * omega[D, C]
                        + c[D, A, C] * omega[D, B]
                        - c[D, B, C] * omega[D, A]
                    )
                out[A, B, C] = acc
    return out


_NAMES = (
    "christoffel",
    "christoffel_derivative",
    "curvature",
    "koszul_rhs",
    "coord_brackets",
    "exterior2",
)

NUMPY_KERNELS = {name: globals()[f"{name}_np"] for name in _NAMES}

if HAVE_NUMBA:
    NUMBA_KERNELS = {
        name: numba.njit(cache=True)(globals()[f"{name}_loop"]) for name in _NAMES
    }
else:  # pragma: no cover
    NUMBA_KERNELS = {}

_active: dict = {}
BACKEND = ""


def use_backend(name: str) -> None:
    """Select ``"numba"`` or ``"numpy"`` for all kernels."""
    global BACKEND
    if name == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba is not available")
        _active.update(NUMBA_KERNELS)
    elif name == "numpy":
        _active.update(NUMPY_KERNELS)
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = name


@contextmanager
def backend(name: str):
    prev = BACKEND
    use_backend(name)
    try:
        yield
    finally:
        use_backend(prev)


use_backend("numba" if HAVE_NUMBA and _env_wants_numba() else "numpy")


def christoffel(ginv, dg):
    return _active["christoffel"](ginv, dg)


def christoffel_derivative(ginv, dg, d2g):
    return _active["christoffel_derivative"](ginv, dg, d2g)


def curvature(gamma, dgamma):
    return _active["curvature"](gamma, dgamma)


def koszul_rhs(G, dG, c):
    return _active["koszul_rhs"](G, dG, c)


def coord_brackets(V, dV, W, dW):
    return _active["coord_brackets"](V, dV, W, dW)


def exterior2(omega, domega, c):
    return _active["exterior2"](omega, domega, c)

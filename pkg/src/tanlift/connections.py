"""Levi-Civita connections of the lifted metrics in the adapted frame.

``gamma[A, B, C]`` means ``nabla_{X_C} X_B = gamma^A_BC X_A``.  The Koszul
solve is the reference; the stated closed forms are compared against it item
by item.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import _kernels
from .base import MetricSpec
from .bundle import LocalFrame, local_frame
from .errors import DegeneracyError
from .structures import KStructure


@dataclass
class ConnectionCoeffs:
    gamma: np.ndarray
    uncovered: List[str] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.gamma.shape[0] // 2


# -- Koszul oracle ------------------------------------------------------------------

def koszul_from_frame(lf: LocalFrame, G: Callable) -> np.ndarray:
    Gj = G(lf)
    Gv = np.ascontiguousarray(Gj.value)
    s = np.linalg.svd(Gv, compute_uv=False)
    if not s[-1] > 1e-12 * s[0]:
        raise DegeneracyError("metric Gram matrix is singular; Koszul solve impossible")
    rhs = _kernels.koszul_rhs(
        Gv, np.ascontiguousarray(lf.derivative(Gj)), np.ascontiguousarray(lf.brackets())
    )
    d = Gv.shape[0]
    return np.linalg.solve(2.0 * Gv, rhs.reshape(d, d * d)).reshape(d, d, d)


def koszul_levi_civita(spec: MetricSpec, u, G: Callable) -> ConnectionCoeffs:
    return ConnectionCoeffs(koszul_from_frame(local_frame(spec, u), G))


# -- residuals ----------------------------------------------------------------------

def torsion_tensor(gamma: np.ndarray, c: np.ndarray) -> np.ndarray:
    """T[A, B, C]: components of T(X_C, X_B)."""
    return gamma - np.swapaxes(gamma, 1, 2) - np.swapaxes(c, 1, 2)


def torsion_relations(lf: LocalFrame, gamma: np.ndarray) -> Dict[str, float]:
    """Residuals of the six torsion symmetry relations in block form."""
    n = lf.n
    H, V = slice(0, n), slice(n, 2 * n)
    Gb = gamma
    y, K, Gam = lf.u.y, lf.base.K, lf.base.gamma

    def sw(a):  # [h, j, i] -> [h, i, j]
        return np.swapaxes(a, 1, 2)

    res = {
        "(1)": Gb[H, H, H] - sw(Gb[H, H, H]),
        "(2)": Gb[V, H, H] - sw(Gb[V, H, H]) - np.einsum("a,jiah->hji", y, K),
        "(3)": Gb[H, V, H] - sw(Gb[H, H, V]),
        "(4)": Gb[V, V, H] - sw(Gb[V, H, V]) - Gam,
        "(5)": Gb[H, V, V] - sw(Gb[H, V, V]),
        "(6)": Gb[V, V, V] - sw(Gb[V, V, V]),
    }
    return {k: float(np.abs(v).max()) for k, v in res.items()}


def torsion_defect(spec: MetricSpec, u, C: ConnectionCoeffs) -> float:
    lf = local_frame(spec, u)
    return float(np.abs(torsion_tensor(C.gamma, lf.brackets())).max())


def compatibility_tensor(lf: LocalFrame, gamma: np.ndarray, G: Callable) -> np.ndarray:
    """R[A, B, C] = X_C G(A, B) - G(nabla_C X_A, X_B) - G(X_A, nabla_C X_B)."""
    Gj = G(lf)
    Gv = Gj.value
    return (
        lf.derivative(Gj)
        - np.einsum("DAC,DB->ABC", gamma, Gv)
        - np.einsum("DBC,AD->ABC", gamma, Gv)
    )


# (A-block, B-block, C-block) of each compatibility slice
COMPATIBILITY_SLICES = {
    "3.5": ("h", "h", "h"),
    "3.6": ("h", "v", "h"),
    "3.7": ("v", "v", "h"),
    "3.8": ("h", "h", "v"),
    "3.9": ("h", "v", "v"),
    "3.10": ("v", "v", "v"),
}


def compatibility_slices(lf: LocalFrame, gamma: np.ndarray, G: Callable) -> Dict[str, float]:
    R = compatibility_tensor(lf, gamma, G)
    n = lf.n
    blk = {"h": slice(0, n), "v": slice(n, 2 * n)}
    return {
        eq: float(np.abs(R[blk[a], blk[b], blk[c]]).max())
        for eq, (a, b, c) in COMPATIBILITY_SLICES.items()
    }


def metric_compatibility_defect(spec: MetricSpec, u, C: ConnectionCoeffs, G: Callable) -> float:
    lf = local_frame(spec, u)
    return float(np.abs(compatibility_tensor(lf, C.gamma, G)).max())


def parallel_tensor(lf: LocalFrame, gamma: np.ndarray, K: KStructure) -> np.ndarray:
    """P[E, B, C]: components of (nabla_{X_C} K) X_B."""
    k = K.field(lf)
    kv = k.value
    return (
        lf.derivative(k)
        + np.einsum("DB,EDC->EBC", kv, gamma)
        - np.einsum("ED,DBC->EBC", kv, gamma)
    )


def parallel_structure_defect(spec: MetricSpec, u, C: ConnectionCoeffs, K: KStructure) -> float:
    lf = local_frame(spec, u)
    return float(np.abs(parallel_tensor(lf, C.gamma, K)).max())


# -- stated closed forms ------------------------------------------------------------

@dataclass
class Item:
    """One stated relation: the block of gamma it fills and its values [h, j, i].

    ``variants`` holds alternative readings of an ambiguous stated expression
    (other placements of the curvature slots); they only feed the best-match
    search.
    """

    label: str
    upper: str  # "h" or "v"
    lower_b: str  # index j (the differentiated field)
    lower_c: str  # index i (the direction)
    values: np.ndarray
    reading: str = "as stated"
    variants: Dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def block(self) -> Tuple[str, str, str]:
        return (self.upper, self.lower_b, self.lower_c)

    @property
    def slot(self) -> str:
        return slot_name(*self.block)


def slot_name(a: str, b: str, c: str) -> str:
    def bar(s, name):
        return name + ("bar" if s == "v" else "")

    return f"Gamma^{bar(a, 'h')}_{bar(b, 'j')}{bar(c, 'i')}"


def _blk(s: str, n: int) -> slice:
    return slice(0, n) if s == "h" else slice(n, 2 * n)


def block_of(gamma: np.ndarray, blk: Tuple[str, str, str]) -> np.ndarray:
    n = gamma.shape[-1] // 2
    return gamma[..., _blk(blk[0], n), _blk(blk[1], n), _blk(blk[2], n)]


_CURV_SLOTS = ["".join(p) for p in itertools.permutations("aji")]


def _curvature_readings(coef: float, y: np.ndarray, K: np.ndarray) -> Dict[str, np.ndarray]:
    """coef * y^a K_{...}^h for every placement of (a, j, i) in the lower slots."""
    return {
        f"y^a K_{slots}^h": coef * np.einsum(f"a,{slots}h->hji", y, K) for slots in _CURV_SLOTS
    }


def _curv_item(label, blk, coef, y, K, slots) -> Item:
    variants = _curvature_readings(coef, y, K)
    reading = f"y^a K_{slots}^h"
    return Item(label, *blk, variants[reading], reading, variants)


def _pieces(lf: LocalFrame):
    n = lf.n
    return n, lf.u.y, lf.y_lower, lf.r**2, lf.base.g, lf.base.gamma, lf.base.K, np.eye(n)


def lemma4_items(lf: LocalFrame) -> List[Item]:
    n, y, yl, r2, g, Gam, K, d = _pieces(lf)
    c = 1.0 / (2.0 * r2)
    return [
        Item("(1)", "h", "h", "h", Gam.copy()),
        # stated with one lower curvature slot missing; the free index i is put third
        _curv_item("(2)", ("v", "h", "h"), 1.0, y, K, "aji"),
        Item("(3)", "h", "v", "h", c * (np.einsum("ij,h->hji", g, y) - np.einsum("ih,j->hji", d, yl))),
        Item("(4)", "h", "h", "v", c * (np.einsum("ij,h->hji", g, y) - np.einsum("jh,i->hji", d, yl))),
        Item("(5)", "v", "v", "h", Gam.copy()),
        Item("(6)", "v", "h", "v", np.zeros((n, n, n))),
        Item("(7)", "h", "h", "v", np.zeros((n, n, n))),
        Item("(8)", "v", "v", "v", -c * (np.einsum("ih,j->hji", d, yl) + np.einsum("jh,i->hji", d, yl))),
    ]


def _twin_items(lf: LocalFrame, sign34: float) -> List[Item]:
    n, y, yl, r2, g, Gam, K, d = _pieces(lf)
    c = sign34 / (2.0 * r2)
    item8 = (
        np.einsum("ji,h->hji", g, y) - np.einsum("jh,i->hji", d, yl) - np.einsum("ih,j->hji", d, yl)
    ) / r2
    return [
        Item("(1)", "h", "h", "h", Gam.copy()),
        _curv_item("(2)", ("v", "h", "h"), 0.5, y, K, "jia"),
        _curv_item("(3)", ("h", "v", "h"), c, y, K, "aji"),
        # the barred curvature slot K_{aj ibar} is undefined; read as K_{aji}
        _curv_item("(4)", ("h", "v", "v"), c, y, K, "aji"),
        Item("(5)", "v", "v", "h", Gam.copy()),
        Item("(6)", "v", "v", "v", np.zeros((n, n, n))),
        Item("(7)", "h", "v", "v", np.zeros((n, n, n))),
        Item("(8)", "v", "v", "v", item8),
    ]


def lemma19_items(lf: LocalFrame) -> List[Item]:
    return _twin_items(lf, -1.0)


def lemma24_items(lf: LocalFrame) -> List[Item]:
    return _twin_items(lf, +1.0)


LEMMA_ITEMS = {"lemma4": lemma4_items, "lemma19": lemma19_items, "lemma24": lemma24_items}


def assemble(items: List[Item], n: int) -> ConnectionCoeffs:
    """Fill gamma from the items; a later item overwrites an earlier one on a shared slot."""
    gamma = np.zeros((2 * n, 2 * n, 2 * n))
    seen = set()
    for it in items:
        gamma[_blk(it.upper, n), _blk(it.lower_b, n), _blk(it.lower_c, n)] = it.values
        seen.add(it.block)
    uncovered = [slot_name(*b) for b in itertools.product("hv", repeat=3) if b not in seen]
    return ConnectionCoeffs(gamma, uncovered)


def lemma4_closed_form(spec: MetricSpec, u) -> ConnectionCoeffs:
    lf = local_frame(spec, u)
    return assemble(lemma4_items(lf), lf.n)


def lemma19_closed_form(spec: MetricSpec, u) -> ConnectionCoeffs:
    lf = local_frame(spec, u)
    return assemble(lemma19_items(lf), lf.n)


def lemma24_closed_form(spec: MetricSpec, u) -> ConnectionCoeffs:
    lf = local_frame(spec, u)
    return assemble(lemma24_items(lf), lf.n)


# -- item comparison -------------------------------------------------------------------

_PERMS = list(itertools.permutations(range(3)))
_BLOCKS = list(itertools.product("hv", repeat=3))
_SCALES = (1.0, -1.0, 0.5, -0.5, 2.0, -2.0)


@dataclass
class ItemMatch:
    """Per-item outcome.  ``best_*`` is filled only for items that do not match."""

    label: str
    slot: str
    defect: float
    matches: bool
    best_slot: Optional[str] = None
    best_reading: Optional[str] = None
    best_perm: Optional[str] = None
    best_scale: Optional[float] = None
    best_defect: Optional[float] = None

    def describe_best(self) -> str:
        if self.best_slot is None:
            return ""
        return (
            f"best match: {self.best_slot}[h,j,i] = {self.best_scale:+g} * "
            f"({self.best_reading})[{self.best_perm}], defect {self.best_defect:.3e}"
        )


def _search(refs, variants, stated_block, uncovered, tol):
    best = None
    for blk in _BLOCKS:
        ref = block_of(refs, blk)
        for reading, vals in variants.items():
            for p in _PERMS:
                cand = np.transpose(vals, (0,) + tuple(q + 1 for q in p))
                for s in _SCALES:
                    d = float(np.abs(ref - s * cand).max())
                    key = (
                        0.0 if d <= tol else d,
                        blk == stated_block,
                        blk not in uncovered,
                        p != (0, 1, 2),
                        abs(s) != 1.0,
                        s < 0,
                        reading != "as stated",
                    )
                    if best is None or key < best[0]:
                        best = (key, blk, reading, p, s, d)
    _, blk, reading, p, s, d = best
    return slot_name(*blk), reading, "".join("hji"[q] for q in p), s, d


def item_table(lfs: List[LocalFrame], gammas: List[np.ndarray], builder: Callable, tol: float):
    """Compare stated items with reference connections at several points.

    Returns one :class:`ItemMatch` per stated item.  For a mismatching item the
    best-matching block / curvature reading / index permutation / unit scale is
    searched across all sampled points jointly.
    """
    per_point = [builder(lf) for lf in lfs]
    refs = np.stack(gammas)
    first = per_point[0]
    covered = {it.block for it in first}
    uncovered = [b for b in _BLOCKS if b not in covered]
    rows = []
    for k, it in enumerate(first):
        vals = np.stack([pp[k].values for pp in per_point])
        defect = float(np.abs(block_of(refs, it.block) - vals).max())
        row = ItemMatch(it.label, it.slot, defect, defect <= tol)
        if not row.matches:
            variants = {"as stated": vals}
            for name in it.variants:
                if name != it.reading:
                    variants[name] = np.stack([pp[k].variants[name] for pp in per_point])
            (row.best_slot, row.best_reading, row.best_perm, row.best_scale,
             row.best_defect) = _search(refs, variants, it.block, uncovered, tol)
            if row.best_reading == "as stated":
                row.best_reading = it.reading
        rows.append(row)
    return rows

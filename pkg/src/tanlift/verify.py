"""Theorem-suite driver: seeded sampling, per-check records, reports.

Every check is a function of a :class:`_Context` (one base metric, one
dimension, one shared point sample) returning a :class:`CheckRecord`.  Records
are produced in registry order, so a report depends only on the config.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from . import base as B
from . import bundle as TB
from . import connections as C
from . import metrics as M
from . import structures as S
from .errors import ModelError, UsageError

DEFAULT_TOL = {"algebraic": 1e-12, "derivative": 1e-8, "homogeneity": 1e-10}
DEFAULT_DIMS = (2, 3, 4)
VERDICTS = ("pass", "fail", "expected-nonzero-confirmed", "finding")

NONZERO_NIJENHUIS = 0.1  # |N| at the probe when the curvature hypothesis fails
NONZERO_DOMEGA = 1e-3
HOMOTHETY_T = (0.5, 2.0, 7.3)
STATED_KAPPA = -4.0
METRIC_NAMES = ("euclidean", "constant_curvature", "custom", "random_quadratic")


# -- configuration ---------------------------------------------------------------------

@dataclass
class SuiteConfig:
    metric: str = "euclidean"
    c: float = 1.0
    components: Optional[List[List[str]]] = None
    chart_box: Optional[float] = None
    dims: List[int] = field(default_factory=lambda: list(DEFAULT_DIMS))
    points: int = 50
    seed: int = 0
    tol: Dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOL))
    checks: Optional[List[str]] = None

    def validate(self) -> "SuiteConfig":
        if self.metric not in METRIC_NAMES:
            raise UsageError(f"unknown metric {self.metric!r}; choose from {', '.join(METRIC_NAMES)}")
        if not isinstance(self.dims, (list, tuple)) or not self.dims:
            raise UsageError("dims must be a non-empty list")
        self.dims = [_as_int(d, "dims entry") for d in self.dims]
        if any(d < 2 for d in self.dims):
            raise UsageError("dims must all be >= 2")
        if self.metric == "custom":
            if not self.components:
                raise UsageError("metric 'custom' needs components (config file)")
            n = len(self.components)
            if self.dims == list(DEFAULT_DIMS):
                self.dims = [n]
            if any(d != n for d in self.dims):
                raise UsageError(f"custom metric is {n}-dimensional; dims must be [{n}]")
        self.points = _as_int(self.points, "points")
        if self.points < 1:
            raise UsageError("points must be >= 1")
        self.seed = _as_int(self.seed, "seed")
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must be in [0, 2^64)")
        if not isinstance(self.c, (int, float)) or isinstance(self.c, bool) or not np.isfinite(self.c):
            raise UsageError("c must be a finite number")
        self.c = float(self.c)
        if self.chart_box is not None and not (
            isinstance(self.chart_box, (int, float)) and self.chart_box > 0
        ):
            raise UsageError("chart_box must be a positive number")
        if not isinstance(self.tol, dict):
            raise UsageError("tol must be a mapping class -> eps")
        for k, v in self.tol.items():
            if k not in DEFAULT_TOL:
                raise UsageError(f"unknown tolerance class {k!r}; choose from {', '.join(DEFAULT_TOL)}")
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not (v > 0 and np.isfinite(v)):
                raise UsageError(f"tolerance {k} must be a positive number")
        self.tol = {**DEFAULT_TOL, **{k: float(v) for k, v in self.tol.items()}}
        if self.checks is not None:
            if not isinstance(self.checks, (list, tuple)) or not self.checks:
                raise UsageError("checks must be a non-empty list of check ids")
            unknown = [c for c in self.checks if c not in CHECK_IDS]
            if unknown:
                raise UsageError(f"unknown check id(s): {', '.join(map(str, unknown))}")
            self.checks = list(self.checks)
        try:
            for n in self.dims:
                self.spec(n)
        except (ModelError, ValueError) as exc:
            raise UsageError(f"invalid metric parameters: {exc}") from None
        return self

    def spec(self, n: int) -> B.MetricSpec:
        if self.metric == "euclidean":
            return B.MetricSpec(n, "euclidean", chart_box=self.chart_box)
        if self.metric == "constant_curvature":
            return B.MetricSpec(n, "constant_curvature", float(self.c), chart_box=self.chart_box)
        if self.metric == "custom":
            return B.MetricSpec.custom(self.components, chart_box=self.chart_box)
        rng = np.random.default_rng(np.random.SeedSequence([self.seed, n, 1]))
        return B.random_quadratic_metric(n, rng, box=self.chart_box or 0.5)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "metric": self.metric,
            "c": self.c,
            "components": self.components,
            "chart_box": self.chart_box,
            "dims": list(self.dims),
            "points": self.points,
            "seed": self.seed,
            "tol": {k: self.tol[k] for k in DEFAULT_TOL},
            "checks": self.checks,
        }


def _as_int(v, what: str) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
        raise UsageError(f"{what} must be an integer, got {v!r}")
    return int(v)


CONFIG_KEYS = {"metric", "c", "components", "chart_box", "dims", "points", "seed", "tol", "checks"}


def config_from_mapping(data: Dict[str, Any]) -> SuiteConfig:
    """Build a config from a parsed config file; unknown keys are rejected."""
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    unknown = sorted(set(data) - CONFIG_KEYS)
    if unknown:
        raise UsageError(f"unknown config key(s): {', '.join(unknown)}")
    cfg = SuiteConfig()
    for k, v in data.items():
        if k == "tol":
            if not isinstance(v, dict):
                raise UsageError("tol must be a mapping class -> eps")
            v = {**DEFAULT_TOL, **v}
        setattr(cfg, k, v)
    return cfg


def load_config(path: str) -> SuiteConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    return config_from_mapping(data)


# -- sampling ------------------------------------------------------------------------

def sample_points(spec: B.MetricSpec, count: int, seed: int) -> List[TB.TangentPoint]:
    """x uniform in the safe box, y in [-2, 2]^n with ||y|| >= 0.1."""
    n = spec.dim
    rng = np.random.default_rng(np.random.SeedSequence([seed, n]))
    box = spec.sample_box()
    out = []
    while len(out) < count:
        x = rng.uniform(-box, box, n)
        y = rng.uniform(-2.0, 2.0, n)
        g, _ = B.metric_at(spec, x)
        if float(np.sqrt(y @ g @ y)) < 0.1:
            continue
        out.append(TB.TangentPoint(x, y))
    return out


# -- records -------------------------------------------------------------------------

@dataclass
class CheckRecord:
    id: str
    anchor: str
    metric: str
    n: int
    points: int
    max_defect: float
    tolerance: float
    tol_class: str
    verdict: str
    informational: bool = False
    witness: Optional[Dict[str, Any]] = None
    detail: Dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


@dataclass
class VerificationReport:
    config: Dict[str, Any]
    records: List[CheckRecord]
    version: str = __version__
    wall_time: Optional[float] = None

    @property
    def findings(self) -> List[CheckRecord]:
        return [r for r in self.records if r.verdict == "finding"]

    @property
    def failed(self) -> bool:
        return any(r.verdict == "fail" for r in self.records)

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def traceability(self) -> Dict[str, List[str]]:
        matrix: Dict[str, List[str]] = {}
        for r in self.records:
            ids = matrix.setdefault(r.anchor, [])
            if r.id not in ids:
                ids.append(r.id)
        return matrix

    def summary(self) -> Dict[str, int]:
        return {v: sum(r.verdict == v for r in self.records) for v in VERDICTS}

    def to_machine(self) -> str:
        """Deterministic JSON document; wall time is deliberately left out."""
        doc = {
            "schema": "tanlift-report/1",
            "artifact_version": self.version,
            "config": self.config,
            "summary": self.summary(),
            "records": [r.as_dict() for r in self.records],
            "findings": [
                {"id": r.id, "anchor": r.anchor, "metric": r.metric, "n": r.n,
                 "max_defect": r.max_defect, "detail": r.detail}
                for r in self.findings
            ],
            "traceability": self.traceability(),
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"

    def to_text(self) -> str:
        cols = ("check", "anchor", "metric", "n", "pts", "max defect", "tol", "verdict")
        rows = [
            (r.id, r.anchor, r.metric, str(r.n), str(r.points), f"{r.max_defect:.3e}",
             f"{r.tolerance:.0e}", r.verdict + (" (informational)" if r.informational else ""))
            for r in self.records
        ]
        widths = [max(len(c), *(len(row[i]) for row in rows)) if rows else len(c)
                  for i, c in enumerate(cols)]
        line = "  ".join(c.ljust(w) for c, w in zip(cols, widths))
        out = [f"tanlift {self.version}  seed={self.config['seed']}  metric={self.config['metric']}",
               "", line, "-" * len(line)]
        out += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in rows]
        out += ["", "Findings (stated results that disagree with the oracle; do not fail the run)"]
        if self.findings:
            for r in self.findings:
                out.append(f"  {r.id} [{r.anchor}] {r.metric} n={r.n}: {r.detail.get('summary', '')}")
        else:
            out.append("  none")
        fails = [r for r in self.records if r.verdict == "fail"]
        out += ["", "Failures"]
        if fails:
            for r in fails:
                out.append(f"  {r.id} [{r.anchor}] {r.metric} n={r.n}: max defect "
                           f"{r.max_defect:.3e} > {r.tolerance:.0e}. {r.detail.get('summary', '')}")
        else:
            out.append("  none")
        out += ["", "Traceability"]
        for anchor, ids in self.traceability().items():
            out.append(f"  {anchor}: {', '.join(ids)}")
        s = self.summary()
        out += ["", "Summary: " + ", ".join(f"{v}={s[v]}" for v in VERDICTS)]
        if self.wall_time is not None:
            out.append(f"Wall time: {self.wall_time:.2f} s")
        return "\n".join(out) + "\n"


# -- per-dimension context -------------------------------------------------------------

class _Context:
    def __init__(self, spec: B.MetricSpec, metric: str, points: List[TB.TangentPoint], tol):
        self.spec = spec
        self.metric = metric
        self.points = points
        self.tol = tol
        self.n = spec.dim
        self._lf: Dict[int, TB.LocalFrame] = {}
        self._conn: Dict[Tuple[str, int], np.ndarray] = {}
        self.tables: Dict[str, List[C.ItemMatch]] = {}

    def lf(self, i: int) -> TB.LocalFrame:
        if i not in self._lf:
            self._lf[i] = TB.local_frame(self.spec, self.points[i])
        return self._lf[i]

    def frames(self) -> List[TB.LocalFrame]:
        return [self.lf(i) for i in range(len(self.points))]

    def koszul(self, name: str, i: int) -> np.ndarray:
        key = (name, i)
        if key not in self._conn:
            self._conn[key] = C.koszul_from_frame(self.lf(i), M.FIELDS[name])
        return self._conn[key]

    def probe(self, y=None) -> TB.TangentPoint:
        y = np.ones(self.n) if y is None else y
        return TB.TangentPoint(np.zeros(self.n), y)

    def record(self, check: "Check", defect: float, verdict: str, witness=None,
               detail=None, tol_class: Optional[str] = None, informational=False,
               points: Optional[int] = None) -> CheckRecord:
        tc = tol_class or check.tol_class
        return CheckRecord(
            check.id, check.anchor, self.metric, self.n,
            len(self.points) if points is None else points,
            float(defect), float(self.tol[tc]), tc, verdict, informational,
            witness, detail or {},
        )


def _labels(index: Sequence[int], shape: Sequence[int], n: int) -> List[str]:
    return [str(TB.Idx.from_pos(int(p), n)) if s == 2 * n else str(int(p) + 1)
            for p, s in zip(index, shape)]


def _witness(u: TB.TangentPoint, index=None, shape=None, **extra) -> Dict[str, Any]:
    w: Dict[str, Any] = {"x": [float(v) for v in u.x], "y": [float(v) for v in u.y]}
    if index is not None:
        w["index"] = [int(i) for i in index]
        w["labels"] = _labels(index, shape, u.n)
    w.update(extra)
    return w


class _Worst:
    """Running max of |array| over points, remembering where it happened."""

    def __init__(self):
        self.value = -1.0
        self.witness: Optional[Dict[str, Any]] = None

    def update(self, arr: np.ndarray, u: TB.TangentPoint, **extra) -> None:
        arr = np.asarray(arr, dtype=float)
        if arr.size == 0:
            return
        a = np.abs(arr)
        k = int(np.argmax(a))
        v = float(a.flat[k])
        if not np.isfinite(v):
            v = float("inf")
        if v > self.value:
            idx = np.unravel_index(k, arr.shape) if arr.ndim else ()
            self.value = v
            self.witness = _witness(u, idx, arr.shape, **extra)


def _zero_verdict(defect: float, tol: float) -> str:
    return "pass" if defect <= tol else "fail"


# -- check registry -------------------------------------------------------------------

@dataclass(frozen=True)
class Check:
    id: str
    anchor: str
    tol_class: str
    run: Callable[["Check", _Context], CheckRecord]


# frame brackets ---------------------------------------------------------------------------

def _lemma1(ck: Check, ctx: _Context) -> CheckRecord:
    n = ctx.n
    worst = _Worst()
    alt = {"Gamma^m_ji X_m (horizontal)": _Worst(), "-Gamma^m_ji X_mbar": _Worst()}
    for i, u in enumerate(ctx.points):
        lf = ctx.lf(i)
        generic = lf.brackets()
        closed = TB.closed_brackets(lf.base, u.y)
        worst.update(closed - generic, u)
        horiz = closed.copy()
        horiz[n:, :n, n:], horiz[n:, n:, :n] = 0.0, 0.0
        horiz[:n, :n, n:] = closed[n:, :n, n:]
        horiz[:n, n:, :n] = closed[n:, n:, :n]
        alt["Gamma^m_ji X_m (horizontal)"].update(horiz - generic, u)
        flipped = closed.copy()
        flipped[n:, :n, n:] *= -1.0
        flipped[n:, n:, :n] *= -1.0
        alt["-Gamma^m_ji X_mbar"].update(flipped - generic, u)
    tol = ctx.tol[ck.tol_class]
    detail: Dict[str, Any] = {"reading": "[X_i, X_jbar] = Gamma^m_ji X_mbar"}
    verdict = _zero_verdict(worst.value, tol)
    if verdict == "fail":
        hits = [k for k, w in alt.items() if w.value <= tol]
        if hits:
            verdict = "finding"
            detail["summary"] = f"mixed bracket matches {hits[0]} instead"
    return ctx.record(ck, worst.value, verdict, worst.witness, detail)


# homogeneity / unit sphere ----------------------------------------------------------

def _thm2(ck: Check, ctx: _Context) -> CheckRecord:
    worst = _Worst()
    per: Dict[str, float] = {}
    for i, u in enumerate(ctx.points):
        lf = ctx.lf(i)
        for t in HOMOTHETY_T:
            lt = TB.local_frame(ctx.spec, TB.homothety(u, t))
            for name in ("gtilde2", "hJ", "hQ", "g2"):
                field_ = M.FIELDS[name]
                pulled = M.pullback_from_frames(lf, lt, t, field_)
                factor = t if name == "g2" else 1.0
                diff = pulled - factor * field_(lf).value
                worst.update(diff, u, field=name, t=t)
                per[name] = max(per.get(name, 0.0), float(np.abs(diff).max()))
    detail = {
        "per_field_max": per,
        "g2_scaling": "pullback of g2 compared with t * g2 (not homogeneous of degree 0)",
    }
    return ctx.record(ck, worst.value, _zero_verdict(worst.value, ctx.tol[ck.tol_class]),
                      worst.witness, detail)


def _thm3(ck: Check, ctx: _Context) -> CheckRecord:
    worst = _Worst()
    for u in ctx.points:
        r = TB.norm_y(ctx.spec, u)
        v = TB.TangentPoint(u.x, u.y / r)
        lf = TB.local_frame(ctx.spec, v)
        worst.update(M.g2_field(lf).value - M.gtilde2_field(lf).value, v)
    return ctx.record(ck, worst.value, _zero_verdict(worst.value, ctx.tol[ck.tol_class]),
                      worst.witness, {"points": "y rescaled to ||y|| = 1"})


# connection of gtilde2 ----------------------------------------------------------------

def _eq3_4(ck: Check, ctx: _Context) -> CheckRecord:
    per: Dict[str, float] = {}
    best, wit = -1.0, None
    for i, u in enumerate(ctx.points):
        rel = C.torsion_relations(ctx.lf(i), ctx.koszul("gtilde2", i))
        for k, v in rel.items():
            per[k] = max(per.get(k, 0.0), v)
            if v > best:
                best, wit = v, _witness(u, relation=k)
    return ctx.record(ck, best, _zero_verdict(best, ctx.tol[ck.tol_class]), wit,
                      {"per_relation": per, "connection": "Koszul solve for gtilde2"})


def _compat_slice(eq: str):
    def run(ck: Check, ctx: _Context) -> CheckRecord:
        best, wit = -1.0, None
        for i, u in enumerate(ctx.points):
            v = C.compatibility_slices(ctx.lf(i), ctx.koszul("gtilde2", i), M.gtilde2_field)[eq]
            if v > best:
                best, wit = v, _witness(u)
        a, b, c = C.COMPATIBILITY_SLICES[eq]
        return ctx.record(ck, best, _zero_verdict(best, ctx.tol[ck.tol_class]), wit,
                          {"slice": f"(A, B, C) blocks = ({a}, {b}, {c})"})

    return run


def _oracle(metric: str):
    def run(ck: Check, ctx: _Context) -> CheckRecord:
        worst = _Worst()
        tors = comp = 0.0
        for i, u in enumerate(ctx.points):
            lf, gam = ctx.lf(i), ctx.koszul(metric, i)
            T = C.torsion_tensor(gam, lf.brackets())
            R = C.compatibility_tensor(lf, gam, M.FIELDS[metric])
            tors = max(tors, float(np.abs(T).max()))
            comp = max(comp, float(np.abs(R).max()))
            worst.update(T, u, residual="torsion")
            worst.update(R, u, residual="compatibility")
        builder = C.LEMMA_ITEMS[ANCHOR_LEMMA[metric]]
        uncovered = C.assemble(builder(ctx.lf(0)), ctx.n).uncovered
        detail = {"torsion": tors, "compatibility": comp, "slots_not_stated": uncovered}
        return ctx.record(ck, worst.value, _zero_verdict(worst.value, ctx.tol[ck.tol_class]),
                          worst.witness, detail)

    return run


ANCHOR_LEMMA = {"gtilde2": "lemma4", "hJ": "lemma19", "hQ": "lemma24"}


def _items(metric: str, label: str):
    def run(ck: Check, ctx: _Context) -> CheckRecord:
        lemma = ANCHOR_LEMMA[metric]
        if lemma not in ctx.tables:
            gams = [ctx.koszul(metric, i) for i in range(len(ctx.points))]
            ctx.tables[lemma] = C.item_table(ctx.frames(), gams, C.LEMMA_ITEMS[lemma],
                                             ctx.tol[ck.tol_class])
        row = next(r for r in ctx.tables[lemma] if r.label == label)
        detail: Dict[str, Any] = {"slot": row.slot}
        if row.matches:
            verdict = "pass"
        else:
            verdict = "finding"
            detail.update(
                best_slot=row.best_slot, best_reading=row.best_reading,
                best_permutation=row.best_perm, best_scale=row.best_scale,
                best_defect=row.best_defect,
                summary=f"stated {row.slot} off by {row.defect:.3e}; {row.describe_best()}",
            )
        return ctx.record(ck, row.defect, verdict, None, detail)

    return run


# compatibility classes -----------------------------------------------------------------

def _class_check(G: str, K: S.KStructure, sigma: int, display: Optional[str] = None):
    def run(ck: Check, ctx: _Context) -> CheckRecord:
        worst = _Worst()
        sym = disp = 0.0
        field_ = M.FIELDS[G]
        for i, u in enumerate(ctx.points):
            lf = ctx.lf(i)
            Gv, k = field_(lf).value, K.field(lf).value
            d = k.T @ Gv @ k - sigma * Gv
            worst.update(d, u, identity="G(KA, KB) - sigma G(A, B)")
            h = S.twin_field(field_, K)(lf).value
            s = h - K.epsilon * sigma * h.T
            sym = max(sym, float(np.abs(s).max()))
            worst.update(s, u, identity="h(A, B) - eps sigma h(B, A)")
            if display is not None:
                e = M.omega_field(display)(lf).value - M.omega_display_field(display)(lf).value
                disp = max(disp, float(np.abs(e).max()))
                worst.update(e, u, identity="Omega definition - displayed form")
        cls = S.CompatibilityClass(K.epsilon, sigma)
        detail: Dict[str, Any] = {"pair": f"({G}, {K.kind})", "epsilon": K.epsilon,
                                  "sigma": sigma, "class": cls.name, "twin_symmetry": sym}
        if display is not None:
            detail["omega_display"] = disp
        return ctx.record(ck, worst.value, _zero_verdict(worst.value, ctx.tol[ck.tol_class]),
                          worst.witness, detail)

    return run


def _twin_formula(K: S.KStructure, closed: str):
    def run(ck: Check, ctx: _Context) -> CheckRecord:
        worst = _Worst()
        for i, u in enumerate(ctx.points):
            lf = ctx.lf(i)
            worst.update(S.twin_field(M.gtilde2_field, K)(lf).value - M.FIELDS[closed](lf).value, u)
        return ctx.record(ck, worst.value, _zero_verdict(worst.value, ctx.tol[ck.tol_class]),
                          worst.witness, {"twin": f"gtilde2(K X, Y), K = {K.kind}"})

    return run


# Nijenhuis ----------------------------------------------------------------------------

def _prop6(ck: Check, ctx: _Context) -> CheckRecord:
    worst = _Worst()
    for i, u in enumerate(ctx.points):
        lf = ctx.lf(i)
        worst.update(S.nijenhuis_jtilde_components(lf) - S.nijenhuis_from_frame(lf, S.JT), u)
    tol = ctx.tol[ck.tol_class]
    verdict = "pass" if worst.value <= tol else "finding"
    detail = {"comparison": "closed form vs brackets of the fields K X_A"}
    if verdict == "finding":
        detail["summary"] = "closed-form Nijenhuis tensor differs from the bracket oracle"
    return ctx.record(ck, worst.value, verdict, worst.witness, detail)


def _curvature_matches(ctx: _Context, c: float) -> bool:
    known = ctx.spec.sectional_curvature
    if known is not None:
        return known == c
    tol = ctx.tol["derivative"]
    return all(B.constant_curvature_defect(ctx.spec, u.x, c) <= tol for u in ctx.points)


def _integrability(K: S.KStructure, c: float, what: str):
    """Zero Nijenhuis tensor exactly when the base has sectional curvature c."""

    def run(ck: Check, ctx: _Context) -> CheckRecord:
        expect_zero = _curvature_matches(ctx, c)
        worst = _Worst()
        for i, u in enumerate(ctx.points):
            worst.update(S.nijenhuis_from_frame(ctx.lf(i), K), u)
        informational = ctx.n < 3
        detail: Dict[str, Any] = {"structure": K.kind, "claim": what,
                                  "curvature_hypothesis_holds": expect_zero}
        if informational:
            detail["note"] = "n = 2: curvature-constancy argument needs n >= 3"
        if expect_zero:
            return ctx.record(ck, worst.value, _zero_verdict(worst.value, ctx.tol[ck.tol_class]),
                              worst.witness, detail, informational=informational)
        y = np.zeros(ctx.n)
        y[-1] = 1.0
        probe = ctx.probe(y)
        pw = _Worst()
        pw.update(S.nijenhuis_from_frame(TB.local_frame(ctx.spec, probe), K), probe)
        detail["probe_defect"] = pw.value
        detail["sample_defect"] = worst.value
        detail["threshold"] = NONZERO_NIJENHUIS
        ok = pw.value >= NONZERO_NIJENHUIS
        detail["summary"] = ("nonintegrable as expected" if ok
                             else "Nijenhuis tensor too small to confirm non-integrability")
        return ctx.record(ck, pw.value, "expected-nonzero-confirmed" if ok else "fail",
                          pw.witness, detail, informational=informational, points=1)

    return run


# base curvature ------------------------------------------------------------------------

def _einstein(c: float):
    def run(ck: Check, ctx: _Context) -> CheckRecord:
        n = ctx.n
        applies = _curvature_matches(ctx, c)
        known = ctx.spec.sectional_curvature
        target = c if applies else known
        worst = _Worst()
        scal = 0.0
        for u in ctx.points:
            ricci, S_ = B.ricci_scalar(ctx.spec, u.x)
            if target is None:
                worst.update(ricci - ricci.T, u, residual="Ricci symmetry")
                continue
            g, _ = B.metric_at(ctx.spec, u.x)
            worst.update(ricci - (n - 1) * target * g, u, residual="R_ij - (n-1)c g_ij")
            e = S_ - n * (n - 1) * target
            scal = max(scal, abs(e))
            worst.update(np.array([e]), u, residual="S - n(n-1)c")
        if target is None:
            detail = {"applies": False, "summary": "no constant-curvature hypothesis; Ricci symmetry checked"}
        else:
            detail = {"applies": applies, "c": target, "scalar_defect": scal,
                      "expected_scalar": n * (n - 1) * target}
        return ctx.record(ck, worst.value, _zero_verdict(worst.value, ctx.tol[ck.tol_class]),
                          worst.witness, detail)

    return run


# closedness of Omega -------------------------------------------------------------------

def _liouville(ck: Check, ctx: _Context) -> CheckRecord:
    worst = _Worst()
    for i, u in enumerate(ctx.points):
        worst.update(M.exterior_from_frame(ctx.lf(i), M.liouville_field), u)
    return ctx.record(ck, worst.value, _zero_verdict(worst.value, ctx.tol[ck.tol_class]),
                      worst.witness, {"form": "g_ij dx^i ^ dy^j (adapted coframe)"})


def _not_closed(which: str):
    def run(ck: Check, ctx: _Context) -> CheckRecord:
        probe = ctx.probe()
        w = _Worst()
        w.update(M.exterior_from_frame(TB.local_frame(ctx.spec, probe), M.omega_field(which)), probe)
        ok = w.value > NONZERO_DOMEGA
        detail = {"form": f"Omega of {which}", "threshold": NONZERO_DOMEGA,
                  "summary": "d Omega != 0 at the probe" if ok else "d Omega vanishes at the probe"}
        return ctx.record(ck, w.value, "expected-nonzero-confirmed" if ok else "fail",
                          w.witness, detail, points=1)

    return run


def _kappa(which: str, stated: Optional[float]):
    def run(ck: Check, ctx: _Context) -> CheckRecord:
        kappas, resid, wit = [], -1.0, None
        for u in ctx.points:
            fit = M.proportionality_check_dOmega(ctx.spec, u, which)
            if fit.inconclusive:
                continue
            kappas.append(fit.kappa)
            if fit.residual > resid:
                resid, wit = fit.residual, _witness(u)
        tol = ctx.tol[ck.tol_class]
        if not kappas:
            return ctx.record(ck, 0.0, "fail", None, {"summary": "fit inconclusive everywhere"})
        k_lo, k_hi = min(kappas), max(kappas)
        kappa = float(np.mean(kappas))
        detail: Dict[str, Any] = {"kappa": kappa, "kappa_spread": k_hi - k_lo,
                                  "fit_residual": resid, "stated_kappa": stated}
        if resid > tol or k_hi - k_lo > tol:
            detail["summary"] = "d Omega is not proportional to (d||y||/||y||) ^ Omega"
            return ctx.record(ck, max(resid, k_hi - k_lo), "fail", wit, detail)
        if stated is not None and abs(kappa - stated) > tol:
            detail["summary"] = (f"fitted kappa = {kappa:.12g}, stated coefficient "
                                 f"{stated:g}; residual {resid:.2e}")
            return ctx.record(ck, resid, "finding", wit, detail)
        return ctx.record(ck, resid, "pass", wit, detail)

    return run


# parallel structures ------------------------------------------------------------------

def _parallel(metric: str, K: S.KStructure):
    def run(ck: Check, ctx: _Context) -> CheckRecord:
        worst = _Worst()
        nij = lift = 0.0
        for i, u in enumerate(ctx.points):
            lf, gam = ctx.lf(i), ctx.koszul(metric, i)
            worst.update(C.parallel_tensor(lf, gam, K), u)
            nij = max(nij, float(np.abs(S.nijenhuis_from_frame(lf, K)).max()))
            lift = max(lift, float(np.abs(C.compatibility_tensor(lf, gam, M.gtilde2_field)).max()))
        detail: Dict[str, Any] = {
            "connection": f"Levi-Civita of {metric}", "structure": K.kind,
            "nijenhuis_max": nij, "gtilde2_compatibility_max": lift,
        }
        tol = ctx.tol[ck.tol_class]
        verdict = _zero_verdict(worst.value, tol)
        if verdict == "fail":
            why = [f"nabla {K.kind} != 0"]
            if nij > tol:
                why.append(f"N_{K.kind} != 0 (max {nij:.3e}), which no torsion-free "
                           f"connection with nabla {K.kind} = 0 allows")
            if lift > tol:
                why.append(f"the connection does not preserve gtilde2 (max {lift:.3e})")
            detail["summary"] = "; ".join(why)
        return ctx.record(ck, worst.value, verdict, worst.witness, detail)

    return run


def _build_registry() -> List[Check]:
    ck: List[Check] = [
        Check("lemma1", "Lemma 1", "derivative", _lemma1),
        Check("thm2", "Thm 2", "homogeneity", _thm2),
        Check("thm3", "Thm 3", "algebraic", _thm3),
        Check("eq3_4", "Eq. 3.4", "derivative", _eq3_4),
    ]
    for eq in C.COMPATIBILITY_SLICES:
        ck.append(Check("eq" + eq.replace(".", "_"), f"Eq. {eq}", "derivative", _compat_slice(eq)))
    ck.append(Check("lemma4", "Lemma 4 (oracle)", "derivative", _oracle("gtilde2")))
    for k in range(1, 9):
        ck.append(Check(f"lemma4_{k}", f"Lemma 4 ({k})", "derivative", _items("gtilde2", f"({k})")))
    ck += [
        Check("thm5", "Thm 5", "algebraic", _class_check("gtilde2", S.JT, -1)),
        Check("prop6", "Prop. 6", "derivative", _prop6),
        Check("thm7", "Thm 7 / Cor. 8", "derivative",
              _integrability(S.JT, 1.0, "N_Jtilde = 0 iff curvature 1")),
        Check("eq4_3", "Eq. 4.3", "derivative", _einstein(1.0)),
        Check("thm11", "Thm 11", "algebraic", _class_check("gtilde2", S.QT, +1)),
        Check("thm12", "Thm 12", "derivative",
              _integrability(S.QT, -1.0, "N_Qtilde = 0 iff curvature -1")),
        Check("thm13", "Thm 13", "derivative", _einstein(-1.0)),
        Check("lemma15", "Lemma 15", "algebraic", _twin_formula(S.JT, "hJ")),
        Check("thm16", "Thm 16", "algebraic", _class_check("hJ", S.QT, -1, display="hJ")),
        Check("thm17", "Thm 17", "derivative", _not_closed("hJ")),
        Check("thm17_closed", "Thm 17 (proof)", "derivative", _liouville),
        Check("thm17_kappa", "Thm 17 (proof)", "derivative", _kappa("hJ", STATED_KAPPA)),
        Check("thm18", "Thm 18", "derivative",
              _integrability(S.QT, -1.0, "(hJ, Qtilde) para-Hermitian iff curvature -1")),
        Check("lemma19", "Lemma 19 (oracle)", "derivative", _oracle("hJ")),
    ]
    for k in range(1, 9):
        ck.append(Check(f"lemma19_{k}", f"Lemma 19 ({k})", "derivative", _items("hJ", f"({k})")))
    ck += [
        Check("thm20", "Thm 20", "derivative", _parallel("hJ", S.JT)),
        Check("hq_formula", "Sec. 6 h_Qtilde formula", "algebraic", _twin_formula(S.QT, "hQ")),
        Check("thm21", "Thm 21", "algebraic", _class_check("hQ", S.JT, +1, display="hQ")),
        Check("thm22", "Thm 22", "derivative", _not_closed("hQ")),
        Check("thm22_kappa", "Thm 22", "derivative", _kappa("hQ", None)),
        Check("thm23", "Thm 23", "derivative",
              _integrability(S.JT, 1.0, "(hQ, Jtilde) Hermitian iff curvature 1")),
        Check("lemma24", "Lemma 24 (oracle)", "derivative", _oracle("hQ")),
    ]
    for k in range(1, 9):
        ck.append(Check(f"lemma24_{k}", f"Lemma 24 ({k})", "derivative", _items("hQ", f"({k})")))
    ck.append(Check("thm25", "Thm 25", "derivative", _parallel("hQ", S.QT)))
    return ck


REGISTRY: List[Check] = _build_registry()
CHECK_IDS = [c.id for c in REGISTRY]


def run_suite(config: SuiteConfig, timer: Optional[Callable[[], float]] = None) -> VerificationReport:
    """Run the selected checks for every dimension, in registry order."""
    config.validate()
    selected = [c for c in REGISTRY if config.checks is None or c.id in config.checks]
    t0 = timer() if timer else None
    records: List[CheckRecord] = []
    for n in config.dims:
        spec = config.spec(n)
        ctx = _Context(spec, spec.label, sample_points(spec, config.points, config.seed), config.tol)
        for check in selected:
            records.append(check.run(check, ctx))
    report = VerificationReport(config.as_dict(), records)
    if timer:
        report.wall_time = timer() - t0
    return report

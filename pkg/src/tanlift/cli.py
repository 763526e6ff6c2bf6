"""Command line: ``tanlift verify`` and ``tanlift dump``."""

from __future__ import annotations

import argparse
import sys
import time
from typing import Callable, Dict, List, Optional

import numpy as np

from . import base as B
from . import bundle as TB
from . import connections as C
from . import metrics as M
from . import structures as S
from .errors import ChartError, DegeneracyError, DomainError, ModelError, SlitBundleError, UsageError
from .verify import DEFAULT_TOL, METRIC_NAMES, SuiteConfig, load_config, run_suite


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> List[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.split(",")], dtype=float)
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _tol_item(text: str):
    cls, sep, eps = text.partition("=")
    if not sep:
        raise UsageError(f"--tol expects CLASS=EPS, got {text!r}")
    try:
        return cls.strip(), float(eps)
    except ValueError:
        raise UsageError(f"--tol value {eps!r} is not a number") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tanlift", description="Verify lifted-metric geometry numerically.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    v = sub.add_parser("verify", help="run the theorem suite")
    v.add_argument("--config", help="JSON file mirroring the suite configuration")
    v.add_argument("--metric", choices=METRIC_NAMES)
    v.add_argument("--c", type=float, help="curvature for constant_curvature")
    v.add_argument("--dim", help="dimension or comma-separated list")
    v.add_argument("--points", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--tol", action="append", default=[], metavar="CLASS=EPS",
                   help=f"override a tolerance class ({', '.join(DEFAULT_TOL)})")
    v.add_argument("--checks", help="comma-separated check ids (default: all)")
    v.add_argument("--format", choices=("text", "machine"), default="text")
    v.add_argument("--out", help="write the report here instead of stdout")

    d = sub.add_parser("dump", help="print lifted tensors at one point")
    d.add_argument("--what", required=True, help=", ".join(DUMP_IDS))
    d.add_argument("--x", required=True)
    d.add_argument("--y", required=True)
    d.add_argument("--metric", choices=("euclidean", "constant_curvature"), default="euclidean")
    d.add_argument("--c", type=float, default=1.0)
    return p


def _config_from_args(args) -> SuiteConfig:
    cfg = load_config(args.config) if args.config else SuiteConfig()
    if args.metric is not None:
        cfg.metric = args.metric
    if args.c is not None:
        cfg.c = args.c
    if args.dim is not None:
        cfg.dims = _int_list(args.dim)
    if args.points is not None:
        cfg.points = args.points
    if args.seed is not None:
        cfg.seed = args.seed
    for cls, eps in map(_tol_item, args.tol):
        cfg.tol = {**cfg.tol, cls: eps}
    if args.checks is not None:
        cfg.checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    return cfg


def _verify(args) -> int:
    cfg = _config_from_args(args)
    report = run_suite(cfg, timer=time.perf_counter)
    text = report.to_machine() if args.format == "machine" else report.to_text()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return report.exit_code


# -- dump -------------------------------------------------------------------------

def _fmt(v: float) -> str:
    v = 0.0 if v == 0 else float(v)
    return f"{v:.12g}"


def _matrix(name: str, a: np.ndarray) -> List[str]:
    out = [f"{name} ="]
    for row in np.atleast_2d(a):
        out.append("  [" + ", ".join(_fmt(v) for v in row) + "]")
    return out


def _frame_matrix(name: str, a: np.ndarray) -> List[str]:
    n = a.shape[0] // 2
    out = []
    for blk, (r, c) in {"HH": (0, 0), "HV": (0, n), "VH": (n, 0), "VV": (n, n)}.items():
        out += _matrix(f"{name}[{blk}]", a[r:r + n, c:c + n])
    return out


def _nonzero(name: str, a: np.ndarray, n: int, frame: bool, fmt: Callable) -> List[str]:
    out = []
    for idx in zip(*np.nonzero(np.abs(a) > 1e-14)):
        labels = [str(TB.Idx.from_pos(int(i), n))[2:] if frame else str(int(i) + 1) for i in idx]
        out.append(f"  {fmt(*labels)} = {_fmt(a[idx])}")
    return [f"{name} (nonzero entries):"] + (out or ["  none"])


def _conn(metric: str):
    def render(spec, u):
        gam = C.koszul_levi_civita(spec, u, M.FIELDS[metric]).gamma
        return _nonzero(f"Gamma({metric}) [nabla_(X_C) X_B = Gamma^A_BC X_A]", gam, u.n, True,
                        lambda a, b, c: f"Gamma^{{{a}}}_{{{b},{c}}}")
    return render


def _nij(K):
    def render(spec, u):
        N = S.nijenhuis_generic(spec, u, K).components
        return _nonzero(f"N_{K.kind} [N(X_A, X_B) = N^D_AB X_D]", N, u.n, True,
                        lambda d, a, b: f"N^{{{d}}}(X_{a}, X_{b})")
    return render


def _field(name: str, producer: Callable):
    def render(spec, u):
        return _frame_matrix(name, producer(TB.local_frame(spec, u)).value)
    return render


DUMP: Dict[str, Callable] = {
    "g": lambda spec, u: _matrix("g_ij", B.metric_at(spec, u.x)[0]),
    "Gamma": lambda spec, u: _nonzero("Gamma^k_ij", B.christoffel(spec, u.x), u.n, False,
                                      lambda k, i, j: f"Gamma^{{{k}}}_{{{i},{j}}}"),
    "K": lambda spec, u: _nonzero("K_jih^s", B.curvature(spec, u.x), u.n, False,
                                  lambda j, i, h, s: f"K_{{{j},{i},{h}}}^{{{s}}}"),
    "N": lambda spec, u: _matrix("N^m_j", TB.nonlinear_connection(spec, u)),
    "g2": _field("g2", M.g2_field),
    "gtilde2": _field("gtilde2", M.gtilde2_field),
    "hJ": _field("hJ", M.hJ_field),
    "hQ": _field("hQ", M.hQ_field),
    "Omega": lambda spec, u: (_field("Omega(hJ, Qtilde)", M.omega_field("hJ"))(spec, u)
                              + _field("Omega(hQ, Jtilde)", M.omega_field("hQ"))(spec, u)),
    "NJ": _nij(S.JT),
    "NQ": _nij(S.QT),
    "conn_gtilde2": _conn("gtilde2"),
    "conn_hJ": _conn("hJ"),
    "conn_hQ": _conn("hQ"),
}
DUMP_IDS = list(DUMP)


def dump_tensors(spec: B.MetricSpec, u: TB.TangentPoint, what: str) -> str:
    if what not in DUMP:
        raise UsageError(f"unknown tensor {what!r}; choose from {', '.join(DUMP_IDS)}")
    head = (f"# {what} at x=({', '.join(_fmt(v) for v in u.x)}) "
            f"y=({', '.join(_fmt(v) for v in u.y)}) metric={spec.label} n={u.n}")
    return "\n".join([head] + DUMP[what](spec, u)) + "\n"


def _dump(args) -> int:
    x, y = _float_list(args.x), _float_list(args.y)
    if x.size != y.size:
        raise UsageError("--x and --y must have the same length")
    if x.size < 2:
        raise UsageError("dimension must be >= 2")
    spec = B.MetricSpec(x.size, args.metric, args.c if args.metric == "constant_curvature" else 0.0)
    sys.stdout.write(dump_tensors(spec, TB.TangentPoint(x, y), args.what))
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "verify":
            return _verify(args)
        if args.command == "dump":
            return _dump(args)
        raise UsageError("expected a command: verify or dump")
    except (UsageError, ChartError, SlitBundleError, ModelError, DomainError, DegeneracyError) as exc:
        print(f"tanlift: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Safe evaluation of metric-component expressions over ``x1..xn``.

Only arithmetic, numeric literals, the coordinates, ``pi``/``e`` and the jet
primitives (``sqrt``, ``exp``, ``log``, ``sin``, ``cos``) are accepted.
"""

from __future__ import annotations

import ast
import math
import operator
import re
from functools import lru_cache

from . import jets

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_FUNCS = {
    "sqrt": jets.sqrt,
    "exp": jets.exp,
    "log": jets.log,
    "sin": jets.sin,
    "cos": jets.cos,
}
_CONSTS = {"pi": math.pi, "e": math.e}
_COORD = re.compile(r"x([1-9][0-9]*)$")


class ExpressionError(ValueError):
    pass


@lru_cache(maxsize=512)
def parse(source: str, dim: int) -> ast.Expression:
    try:
        tree = ast.parse(source.strip(), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {source!r}: {exc.msg}") from None
    for node in ast.walk(tree):
        if isinstance(node, ast.Name):
            m = _COORD.match(node.id)
            if m:
                if not 1 <= int(m.group(1)) <= dim:
                    raise ExpressionError(f"{node.id} out of range for dim={dim}")
            elif node.id not in _FUNCS and node.id not in _CONSTS:
                raise ExpressionError(f"unknown name {node.id!r} in {source!r}")
        elif isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS:
                raise ExpressionError(f"unsupported call in {source!r}")
            if len(node.args) != 1 or node.keywords:
                raise ExpressionError(f"functions take one argument: {source!r}")
        elif isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float)) or isinstance(node.value, bool):
                raise ExpressionError(f"bad literal {node.value!r}")
        elif isinstance(node, (ast.BinOp, ast.UnaryOp)):
            op = type(node.op)
            if op not in _BINOPS and op not in _UNARY:
                raise ExpressionError(f"unsupported operator in {source!r}")
        elif not isinstance(
            node, (ast.Expression, ast.Load, ast.operator, ast.unaryop)
        ):
            raise ExpressionError(f"unsupported syntax {type(node).__name__} in {source!r}")
    return tree


def evaluate(source: str, x):
    """Evaluate ``source`` with ``x`` a length-n jet (or plain vector)."""
    tree = parse(source, len(x))

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant):
            return float(node.value)
        if isinstance(node, ast.Name):
            if node.id in _CONSTS:
                return _CONSTS[node.id]
            return x[int(node.id[1:]) - 1]
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp):
            return _UNARY[type(node.op)](ev(node.operand))
        if isinstance(node, ast.Call):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ExpressionError(f"unsupported node {type(node).__name__}")

    return ev(tree)

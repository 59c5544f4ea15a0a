"""Small arithmetic expression grammar for fields given as strings.

Supported: numbers, ``pi``, ``e``, ``i`` (imaginary unit), the variables
``t1 .. tn`` (``t`` is an alias of ``t1`` when ``n = 1``), ``+ - * / **``, unary minus,
``exp sin cos abs sqrt floor`` and the indicator ``ind(cond)`` where
``cond`` is a comparison chain (``ind(0 <= t1 < 1)``) or several chains joined
with ``and`` / ``or``.  ``floor`` provides piecewise-by-integer-part
constructs.  Anything else is rejected at parse time.
"""

from __future__ import annotations

import ast
import math

import numpy as np

from .core import Domain, Field, QuadSpec

FUNCS = {"exp": np.exp, "sin": np.sin, "cos": np.cos, "abs": np.abs, "sqrt": np.sqrt,
         "floor": np.floor}
CONSTS = {"pi": math.pi, "e": math.e, "i": 1j}
_CMP = {ast.Lt: np.less, ast.LtE: np.less_equal, ast.Gt: np.greater,
        ast.GtE: np.greater_equal}
_BIN = {ast.Add: np.add, ast.Sub: np.subtract, ast.Mult: np.multiply, ast.Div: np.divide,
        ast.Pow: np.power}


class ExpressionError(ValueError):
    """Raised for expressions outside the grammar."""


def _err(node, msg):
    col = getattr(node, "col_offset", None)
    where = f" at column {col + 1}" if col is not None else ""
    raise ExpressionError(f"{msg}{where}")


def _compile(node, n):
    if isinstance(node, ast.Expression):
        return _compile(node.body, n)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            _err(node, "only numeric literals are allowed")
        v = float(node.value)
        return lambda t: v
    if isinstance(node, ast.Name):
        name = node.id
        if name in CONSTS:
            v = CONSTS[name]
            return lambda t: v
        if name == "t" and n == 1:
            return lambda t: t[:, 0]
        if name.startswith("t") and name[1:].isdigit():
            j = int(name[1:])
            if not 1 <= j <= n:
                _err(node, f"variable {name} out of range for dimension {n}")
            return lambda t: t[:, j - 1]
        _err(node, f"unknown name {name!r}")
    if isinstance(node, ast.BinOp):
        op = _BIN.get(type(node.op))
        if op is None:
            _err(node, "unsupported operator")
        a, b = _compile(node.left, n), _compile(node.right, n)
        return lambda t: op(a(t), b(t))
    if isinstance(node, ast.UnaryOp):
        a = _compile(node.operand, n)
        if isinstance(node.op, ast.USub):
            return lambda t: -a(t)
        if isinstance(node.op, ast.UAdd):
            return a
        _err(node, "unsupported unary operator")
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.keywords or len(node.args) != 1:
            _err(node, "functions take exactly one positional argument")
        fname = node.func.id
        if fname == "ind":
            c = _condition(node.args[0], n)
            return lambda t: np.where(c(t), 1.0, 0.0)
        f = FUNCS.get(fname)
        if f is None:
            _err(node, f"unknown function {fname!r}")
        a = _compile(node.args[0], n)
        return lambda t: f(a(t))
    if isinstance(node, ast.Compare):
        _err(node, "comparisons are only allowed inside ind(...)")
    _err(node, f"unsupported syntax {type(node).__name__}")


def _condition(node, n):
    if isinstance(node, ast.BoolOp):
        parts = [_condition(v, n) for v in node.values]
        if isinstance(node.op, ast.And):
            return lambda t: np.logical_and.reduce([p(t) for p in parts])
        return lambda t: np.logical_or.reduce([p(t) for p in parts])
    if isinstance(node, ast.Compare):
        terms = [_compile(node.left, n)] + [_compile(c, n) for c in node.comparators]
        ops = []
        for o in node.ops:
            f = _CMP.get(type(o))
            if f is None:
                _err(node, "only < <= > >= comparisons are allowed")
            ops.append(f)

        def cond(t):
            vals = [np.real(v(t)) for v in terms]
            out = True
            for f, a, b in zip(ops, vals[:-1], vals[1:]):
                out = np.logical_and(out, f(a, b))
            return out

        return cond
    _err(node, "ind(...) needs a comparison")


def parse_expression(src: str, n: int = 1):
    """Compile ``src`` to a vectorised ``f(t)`` with ``t`` of shape (N, n)."""
    if not isinstance(src, str) or not src.strip():
        raise ExpressionError("empty expression")
    try:
        tree = ast.parse(src.strip(), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"syntax error at column {exc.offset}: {exc.msg}") from None
    f = _compile(tree, n)

    def fn(t):
        t = np.asarray(t, dtype=float)
        v = f(t)
        return np.broadcast_to(np.asarray(v), (t.shape[0],))

    return fn


def expression_field(src: str, n: int = 1, domain: Domain | None = None, resolution: float = 0.5,
                     order: int = 8) -> Field:
    """Scalar :class:`Field` from an expression string."""
    f = parse_expression(src, n)
    domain = domain if domain is not None else Domain.full(n)
    if domain.n != n:
        raise ValueError("domain dimension differs from the expression dimension")
    return Field(lambda t, x: f(t), domain, quad=QuadSpec(resolution, order),
                 name=src)


__all__ = ["ExpressionError", "parse_expression", "expression_field"]

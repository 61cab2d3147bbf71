"""Safe arithmetic expressions compiled to jet-aware callables.

Only numbers, named variables, ``+ - * / **``, unary minus and a fixed set
of elementary functions are accepted::

    f = compile_expression("sin(2*pi*x1) * x3 + t", ("x1", "x2", "x3", "t"))
    f(x1, x2, x3, t)
"""

from __future__ import annotations

import ast
import math
import operator

from . import jet
from .errors import ContractViolation

FUNCTIONS = {
    "sin": jet.sin, "cos": jet.cos, "tan": jet.tan, "exp": jet.exp, "log": jet.log,
    "sqrt": jet.sqrt, "tanh": jet.tanh, "sinh": jet.sinh, "cosh": jet.cosh,
    "arctan": jet.arctan,
}
CONSTANTS = {"pi": math.pi, "e": math.e}
BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
          ast.Div: operator.truediv, ast.Pow: operator.pow}


def _build(node, names):
    if isinstance(node, ast.Expression):
        return _build(node.body, names)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        c = float(node.value)
        return lambda env: c
    if isinstance(node, ast.Name):
        if node.id in names:
            key = node.id
            return lambda env: env[key]
        if node.id in CONSTANTS:
            c = CONSTANTS[node.id]
            return lambda env: c
        raise ContractViolation(f"unknown name {node.id!r} in expression")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _build(node.operand, names)
        if isinstance(node.op, ast.USub):
            return lambda env: -inner(env)
        return inner
    if isinstance(node, ast.BinOp) and type(node.op) in BINOPS:
        op = BINOPS[type(node.op)]
        left, right = _build(node.left, names), _build(node.right, names)
        return lambda env: op(left(env), right(env))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) \
            and node.func.id in FUNCTIONS and len(node.args) == 1 and not node.keywords:
        fn = FUNCTIONS[node.func.id]
        arg = _build(node.args[0], names)
        return lambda env: fn(arg(env))
    raise ContractViolation(f"unsupported expression element: {ast.dump(node)[:60]}")


def compile_expression(src, names):
    """Compile ``src`` into ``f(*values)`` over the variables ``names``."""
    try:
        tree = ast.parse(str(src).strip(), mode="eval")
    except SyntaxError as exc:
        raise ContractViolation(f"cannot parse expression {src!r}: {exc.msg}") from None
    body = _build(tree, set(names))
    names = tuple(names)

    def f(*values):
        return body(dict(zip(names, values)))
    f.source = src
    return f


def evaluate_number(src):
    """Evaluate a constant expression such as ``2*pi/3``."""
    value = compile_expression(src, ())()
    value = float(value)
    if not math.isfinite(value):
        raise ContractViolation(f"expression {src!r} is not finite")
    return value

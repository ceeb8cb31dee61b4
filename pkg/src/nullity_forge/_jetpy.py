"""Pure-Python tape interpreter: value, gradient and Hessian of one expression.

Mirrors ``_jetcore.pyx`` instruction for instruction; used when the compiled
extension is unavailable and as the reference side of the kernel benchmark.
"""

import math

import numpy as np

from .expr import (OP_ADD, OP_CONST, OP_COS, OP_COSH, OP_DIV, OP_EXP, OP_MUL, OP_NEG,
                   OP_POW, OP_SIN, OP_SINH, OP_SQRT, OP_SUB, OP_TANH, OP_VAR)


def _chain(u, f0, f1, f2):
    return (f0, f1 * u[1], f1 * u[2], f2 * u[1] * u[2] + f1 * u[3])


def _mul(u, v):
    return (u[0] * v[0], u[1] * v[0] + u[0] * v[1], u[2] * v[0] + u[0] * v[2],
            u[3] * v[0] + u[1] * v[2] + u[2] * v[1] + u[0] * v[3])


def _run(ops, args, consts, point, a, b):
    """Run the tape with seeds on coordinates ``a`` and ``b``.

    Returns ``(jet, -1)`` on success or ``(None, instruction_index)`` on a domain error.
    """
    stack = []
    push, pop = stack.append, stack.pop
    for i in range(len(ops)):
        op = ops[i]
        if op == OP_CONST:
            push((consts[args[i]], 0.0, 0.0, 0.0))
        elif op == OP_VAR:
            k = args[i]
            push((point[k], 1.0 if k == a else 0.0, 1.0 if k == b else 0.0, 0.0))
        elif op == OP_NEG:
            u = pop()
            push((-u[0], -u[1], -u[2], -u[3]))
        elif op <= OP_POW:
            v = pop()
            u = pop()
            if op == OP_ADD:
                push((u[0] + v[0], u[1] + v[1], u[2] + v[2], u[3] + v[3]))
            elif op == OP_SUB:
                push((u[0] - v[0], u[1] - v[1], u[2] - v[2], u[3] - v[3]))
            elif op == OP_MUL:
                push(_mul(u, v))
            elif op == OP_DIV:
                x = v[0]
                if x == 0.0:
                    return None, i
                push(_mul(u, _chain(v, 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))))
            else:
                x = u[0]
                if v[1] == 0.0 and v[2] == 0.0 and v[3] == 0.0:
                    c = v[0]
                    if c == 0.0:
                        push((1.0, 0.0, 0.0, 0.0))
                        continue
                    if (x < 0.0 and c != math.floor(c)) or (x == 0.0 and c < 2.0 and c != 1.0):
                        return None, i
                    f1 = c * x ** (c - 1.0)
                    f2 = 0.0 if c == 1.0 else c * (c - 1.0) * x ** (c - 2.0)
                    push(_chain(u, x ** c, f1, f2))
                else:
                    if x <= 0.0:
                        return None, i
                    lg = _chain(u, math.log(x), 1.0 / x, -1.0 / (x * x))
                    w = _mul(v, lg)
                    e = math.exp(w[0])
                    push(_chain(w, e, e, e))
        else:
            u = pop()
            x = u[0]
            if op == OP_SIN:
                s, c = math.sin(x), math.cos(x)
                push(_chain(u, s, c, -s))
            elif op == OP_COS:
                s, c = math.sin(x), math.cos(x)
                push(_chain(u, c, -s, -c))
            elif op == OP_EXP:
                e = math.exp(x)
                push(_chain(u, e, e, e))
            elif op == OP_SINH:
                s, c = math.sinh(x), math.cosh(x)
                push(_chain(u, s, c, s))
            elif op == OP_COSH:
                s, c = math.sinh(x), math.cosh(x)
                push(_chain(u, c, s, c))
            elif op == OP_TANH:
                t = math.tanh(x)
                s2 = 1.0 - t * t
                push(_chain(u, t, s2, -2.0 * t * s2))
            elif op == OP_SQRT:
                if x <= 0.0:
                    return None, i
                r = math.sqrt(x)
                push(_chain(u, r, 0.5 / r, -0.25 / (r * x)))
            else:
                raise ValueError(f"bad opcode {op}")
    return stack[-1], -1


def hessian(ops, args, consts, point, depth):
    """Return ``(status, value, grad, hess)``; ``status`` is -1 or the failing instruction."""
    ops = [int(o) for o in ops]
    args = [int(o) for o in args]
    consts = [float(c) for c in consts]
    point = [float(p) for p in point]
    n = len(point)
    grad = np.zeros(n)
    hess = np.zeros((n, n))
    value = 0.0
    for a in range(n):
        for b in range(a, n):
            jet, status = _run(ops, args, consts, point, a, b)
            if jet is None:
                return status, 0.0, grad, hess
            value = jet[0]
            if a == b:
                grad[a] = jet[1]
            hess[a, b] = hess[b, a] = jet[3]
    if n == 0:
        jet, status = _run(ops, args, consts, point, -1, -1)
        if jet is None:
            return status, 0.0, grad, hess
        value = jet[0]
    return -1, value, grad, hess

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tape interpreter: value, gradient and Hessian of one expression."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, exp, sinh, cosh, tanh, sqrt, log, pow, floor

cnp.import_array()

cdef enum:
    OP_CONST = 0
    OP_VAR = 1
    OP_NEG = 2
    OP_ADD = 3
    OP_SUB = 4
    OP_MUL = 5
    OP_DIV = 6
    OP_POW = 7
    OP_SIN = 8
    OP_COS = 9
    OP_EXP = 10
    OP_SINH = 11
    OP_COSH = 12
    OP_TANH = 13
    OP_SQRT = 14


cdef inline void chain(double* u, double f0, double f1, double f2) nogil:
    cdef double da = u[1], db = u[2]
    u[3] = f2 * da * db + f1 * u[3]
    u[0] = f0
    u[1] = f1 * da
    u[2] = f1 * db


cdef inline void mul_into(double* u, const double* v) nogil:
    cdef double u0 = u[0], u1 = u[1], u2 = u[2], u3 = u[3]
    u[0] = u0 * v[0]
    u[1] = u1 * v[0] + u0 * v[1]
    u[2] = u2 * v[0] + u0 * v[2]
    u[3] = u3 * v[0] + u1 * v[2] + u2 * v[1] + u0 * v[3]


cdef int run(const int[:] ops, const int[:] args, const double[:] consts,
             const double[:] point, int a, int b, double* stack) nogil:
    """Run the tape, leaving the result jet in ``stack[0:4]``; return -1 or failing index."""
    cdef Py_ssize_t i, m = ops.shape[0]
    cdef int sp = 0, op, k
    cdef double x, c, f1, f2, e, r, s, t
    cdef double* u
    cdef double* v
    for i in range(m):
        op = ops[i]
        if op == OP_CONST:
            u = stack + 4 * sp
            u[0] = consts[args[i]]
            u[1] = 0.0
            u[2] = 0.0
            u[3] = 0.0
            sp += 1
        elif op == OP_VAR:
            k = args[i]
            u = stack + 4 * sp
            u[0] = point[k]
            u[1] = 1.0 if k == a else 0.0
            u[2] = 1.0 if k == b else 0.0
            u[3] = 0.0
            sp += 1
        elif op == OP_NEG:
            u = stack + 4 * (sp - 1)
            u[0] = -u[0]
            u[1] = -u[1]
            u[2] = -u[2]
            u[3] = -u[3]
        elif op <= OP_POW:
            sp -= 1
            v = stack + 4 * sp
            u = stack + 4 * (sp - 1)
            if op == OP_ADD:
                u[0] += v[0]
                u[1] += v[1]
                u[2] += v[2]
                u[3] += v[3]
            elif op == OP_SUB:
                u[0] -= v[0]
                u[1] -= v[1]
                u[2] -= v[2]
                u[3] -= v[3]
            elif op == OP_MUL:
                mul_into(u, v)
            elif op == OP_DIV:
                x = v[0]
                if x == 0.0:
                    return <int>i
                chain(v, 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
                mul_into(u, v)
            else:
                x = u[0]
                if v[1] == 0.0 and v[2] == 0.0 and v[3] == 0.0:
                    c = v[0]
                    if c == 0.0:
                        u[0] = 1.0
                        u[1] = 0.0
                        u[2] = 0.0
                        u[3] = 0.0
                        continue
                    if (x < 0.0 and c != floor(c)) or (x == 0.0 and c < 2.0 and c != 1.0):
                        return <int>i
                    f1 = c * pow(x, c - 1.0)
                    f2 = 0.0 if c == 1.0 else c * (c - 1.0) * pow(x, c - 2.0)
                    chain(u, pow(x, c), f1, f2)
                else:
                    if x <= 0.0:
                        return <int>i
                    chain(u, log(x), 1.0 / x, -1.0 / (x * x))
                    mul_into(u, v)
                    e = exp(u[0])
                    chain(u, e, e, e)
        else:
            u = stack + 4 * (sp - 1)
            x = u[0]
            if op == OP_SIN:
                s = sin(x)
                c = cos(x)
                chain(u, s, c, -s)
            elif op == OP_COS:
                s = sin(x)
                c = cos(x)
                chain(u, c, -s, -c)
            elif op == OP_EXP:
                e = exp(x)
                chain(u, e, e, e)
            elif op == OP_SINH:
                s = sinh(x)
                c = cosh(x)
                chain(u, s, c, s)
            elif op == OP_COSH:
                s = sinh(x)
                c = cosh(x)
                chain(u, c, s, c)
            elif op == OP_TANH:
                t = tanh(x)
                s = 1.0 - t * t
                chain(u, t, s, -2.0 * t * s)
            elif op == OP_SQRT:
                if x <= 0.0:
                    return <int>i
                r = sqrt(x)
                chain(u, r, 0.5 / r, -0.25 / (r * x))
    return -1


def hessian(ops, args, consts, point, int depth):
    """Return ``(status, value, grad, hess)``; ``status`` is -1 or the failing instruction."""
    cdef const int[:] o = np.ascontiguousarray(ops, dtype=np.int32)
    cdef const int[:] g = np.ascontiguousarray(args, dtype=np.int32)
    cdef const double[:] cs = np.ascontiguousarray(consts, dtype=np.float64)
    cdef const double[:] p = np.ascontiguousarray(point, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] grad = np.zeros(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] hess = np.zeros((n, n))
    cdef double[::1] stack = np.empty(4 * (depth + 1))
    cdef int a, b, status
    cdef double value = 0.0
    if n == 0:
        status = run(o, g, cs, p, -1, -1, &stack[0])
        if status >= 0:
            return status, 0.0, grad, hess
        return -1, stack[0], grad, hess
    for a in range(n):
        for b in range(a, n):
            status = run(o, g, cs, p, a, b, &stack[0])
            if status >= 0:
                return status, 0.0, grad, hess
            value = stack[0]
            if a == b:
                grad[a] = stack[1]
            hess[a, b] = stack[3]
            hess[b, a] = stack[3]
    return -1, value, grad, hess

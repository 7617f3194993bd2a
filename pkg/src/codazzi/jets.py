"""Batched truncated jets of tensor fields.

A jet of order r stores, for each point, the value and every partial
derivative up to order r. ``parts[k]`` has shape (P, n, ..., n, *tensor)
with k derivative axes directly after the point axis.
"""

from __future__ import annotations

from itertools import combinations, combinations_with_replacement, permutations, product

import numpy as np

from .expr import compile_exprs, derivative

_POINT = "Z"
_DERIV = "ABCDEFGH"


class Jet:
    __slots__ = ("parts", "n")

    def __init__(self, parts, n):
        self.parts = list(parts)
        self.n = n

    @property
    def order(self):
        return len(self.parts) - 1

    @property
    def value(self):
        return self.parts[0]

    @property
    def points(self):
        return self.parts[0].shape[0]

    @property
    def tshape(self):
        return self.parts[0].shape[1:]

    def truncate(self, order):
        return Jet(self.parts[: order + 1], self.n)

    def _binary(self, other, fn):
        r = min(self.order, other.order)
        return Jet([fn(a, b) for a, b in zip(self.parts[: r + 1], other.parts[: r + 1])], self.n)

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __neg__(self):
        return Jet([-p for p in self.parts], self.n)

    def scale(self, c):
        return Jet([c * p for p in self.parts], self.n)

    def grad(self):
        """Jet of one lower order whose first tensor slot is the new derivative slot."""
        if self.order < 1:
            raise ValueError("jet has no derivatives left")
        return Jet(self.parts[1:], self.n)

    def transpose(self, perm):
        out = []
        for k, p in enumerate(self.parts):
            lead = 1 + k
            out.append(np.transpose(p, tuple(range(lead)) + tuple(lead + q for q in perm)))
        return Jet(out, self.n)

    def map_tensor(self, fn):
        """Apply a linear map to the tensor axes of every part."""
        out = []
        for k, p in enumerate(self.parts):
            lead = p.shape[: 1 + k]
            flat = p.reshape((-1,) + p.shape[1 + k:])
            res = fn(flat)
            out.append(res.reshape(lead + res.shape[1:]))
        return Jet(out, self.n)

    @staticmethod
    def constant(values, n, order):
        values = np.asarray(values, dtype=float)
        parts = [values]
        for k in range(1, order + 1):
            parts.append(np.zeros((values.shape[0],) + (n,) * k + values.shape[1:]))
        return Jet(parts, n)


def jeinsum(spec, *operands, order=None):
    """Einsum over tensor axes with the Leibniz rule over derivative axes.

    Operands may be Jets or plain arrays; plain arrays are point-independent
    constants and carry no point axis.
    """
    ins, out = spec.split("->")
    subs = ins.split(",")
    if len(subs) != len(operands):
        raise ValueError("subscript count does not match operands")
    jets = [i for i, op in enumerate(operands) if isinstance(op, Jet)]
    if not jets:
        raise ValueError("at least one operand must be a Jet")
    n = operands[jets[0]].n
    r = min(operands[i].order for i in jets)
    if order is not None:
        r = min(r, order)
    parts = []
    for k in range(r + 1):
        total = None
        dl = _DERIV[:k]
        for assign in product(jets, repeat=k):
            terms = []
            arrays = []
            for i, op in enumerate(operands):
                if isinstance(op, Jet):
                    letters = "".join(dl[j] for j in range(k) if assign[j] == i)
                    terms.append(_POINT + letters + subs[i])
                    arrays.append(op.parts[len(letters)])
                else:
                    terms.append(subs[i])
                    arrays.append(op)
            res = np.einsum(",".join(terms) + "->" + _POINT + dl + out, *arrays)
            total = res if total is None else total + res
        parts.append(total)
    return Jet(parts, n)


def inverse(g: Jet) -> Jet:
    """Jet of the matrix inverse, from differentiating H g = I."""
    H0 = np.linalg.inv(g.parts[0])
    parts = [H0]
    for k in range(1, g.order + 1):
        dl = _DERIV[:k]
        acc = np.zeros_like(g.parts[k])
        for size in range(k):
            for T in combinations(range(k), size):
                rest = [j for j in range(k) if j not in T]
                tl = "".join(dl[j] for j in T)
                rl = "".join(dl[j] for j in rest)
                acc += np.einsum(
                    f"Z{tl}ij,Z{rl}jk,Zkl->Z{dl}il", parts[size], g.parts[k - size], H0)
        parts.append(-acc)
    return Jet(parts, g.n)


def scalar_function(f: Jet, fn_derivs) -> Jet:
    """Compose a scalar jet (order <= 3) with a univariate function.

    ``fn_derivs(x)`` returns the list [f(x), f'(x), f''(x), f'''(x)].
    """
    if f.tshape != ():
        raise ValueError("scalar jets only")
    r = f.order
    if r > 3:
        raise ValueError("composition implemented up to order 3")
    x = f.parts[0]
    d = fn_derivs(x)
    parts = [d[0]]
    if r >= 1:
        f1 = f.parts[1]
        parts.append(d[1][:, None] * f1)
    if r >= 2:
        f2 = f.parts[2]
        parts.append(d[2][:, None, None] * np.einsum("Za,Zb->Zab", f1, f1) + d[1][:, None, None] * f2)
    if r >= 3:
        f3 = f.parts[3]
        sym = (np.einsum("Zab,Zc->Zabc", f2, f1) + np.einsum("Zac,Zb->Zabc", f2, f1)
               + np.einsum("Zbc,Za->Zabc", f2, f1))
        parts.append(d[3][:, None, None, None] * np.einsum("Za,Zb,Zc->Zabc", f1, f1, f1)
                     + d[2][:, None, None, None] * sym + d[1][:, None, None, None] * f3)
    return Jet(parts, f.n)


class FieldJetEvaluator:
    """Compiles every partial derivative of an Expr array up to a given order."""

    def __init__(self, exprs, n, order):
        exprs = np.asarray(exprs, dtype=object)
        self.tshape = exprs.shape
        self.n = n
        self.order = order
        flat = list(exprs.reshape(-1))
        self.multi = [list(combinations_with_replacement(range(n), k)) for k in range(order + 1)]
        roots = []
        for k in range(order + 1):
            for idx in self.multi[k]:
                roots.extend(derivative(e, idx) for e in flat)
        self._count = len(flat)
        self._compiled = compile_exprs(roots, n)

    def __call__(self, points) -> Jet:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        P = pts.shape[0]
        vals = self._compiled(pts)
        m = self._count
        parts = []
        pos = 0
        for k in range(self.order + 1):
            part = np.zeros((P,) + (self.n,) * k + (m,))
            for idx in self.multi[k]:
                block = vals[pos:pos + m].T
                pos += m
                for perm in set(permutations(idx)):
                    part[(slice(None),) + perm] = block
            parts.append(part.reshape((P,) + (self.n,) * k + self.tshape))
        return Jet(parts, self.n)

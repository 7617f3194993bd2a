"""Pointwise multilinear algebra on a single tangent space.

Slots are tagged "co" (covariant) or "contra" (contravariant). Endomorphisms
are ordinary matrices acting on column vectors: (A X)^i = A[i, j] X^j.
Functions prefixed with ``batch_`` accept arbitrary leading batch axes.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import _kernels

CO = "co"
CONTRA = "contra"


class TensorError(ValueError):
    pass


class NotPositiveDefiniteError(TensorError):
    pass


def _check_signature(signature):
    signature = tuple(signature)
    for s in signature:
        if s not in (CO, CONTRA):
            raise TensorError(f"slot kind must be 'co' or 'contra', got {s!r}")
    return signature


@dataclass(frozen=True)
class PointTensor:
    components: np.ndarray
    signature: tuple

    def __post_init__(self):
        comps = np.array(self.components, dtype=float)
        sig = _check_signature(self.signature)
        if comps.ndim != len(sig):
            raise TensorError(f"{comps.ndim} axes but signature has {len(sig)} slots")
        if comps.ndim and len(set(comps.shape)) != 1:
            raise TensorError(f"all slots must have the same dimension, got shape {comps.shape}")
        comps.setflags(write=False)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "signature", sig)

    @property
    def rank(self):
        return len(self.signature)

    @property
    def dim(self):
        return self.components.shape[0] if self.rank else None

    def __add__(self, other):
        _same_kind(self, other)
        return PointTensor(self.components + other.components, self.signature)

    def __sub__(self, other):
        _same_kind(self, other)
        return PointTensor(self.components - other.components, self.signature)

    def __mul__(self, c):
        return PointTensor(self.components * float(c), self.signature)

    __rmul__ = __mul__

    def __neg__(self):
        return PointTensor(-self.components, self.signature)

    @staticmethod
    def covariant(components):
        arr = np.asarray(components, dtype=float)
        return PointTensor(arr, (CO,) * arr.ndim)

    @staticmethod
    def vector(components):
        return PointTensor(np.asarray(components, dtype=float), (CONTRA,))


def _same_kind(s, t):
    if s.signature != t.signature or s.components.shape != t.components.shape:
        raise TensorError("tensors differ in shape or signature")


def _spd_inverse(g):
    g = np.asarray(g, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise TensorError("metric must be a square matrix")
    try:
        return np.linalg.inv(g)
    except np.linalg.LinAlgError:
        raise TensorError("metric is singular") from None


def contract(t: PointTensor, slot_a: int, slot_b: int, metric=None) -> PointTensor:
    """Metric trace over two slots; ``metric`` is g and is needed when variances match."""
    k = t.rank
    if not (0 <= slot_a < k and 0 <= slot_b < k):
        raise TensorError("slot out of range")
    if slot_a == slot_b:
        raise TensorError("contraction slots must be distinct")
    arr = t.components
    sa, sb = t.signature[slot_a], t.signature[slot_b]
    if sa == sb:
        if metric is None:
            raise TensorError("contracting two slots of the same variance needs a metric")
        m = _spd_inverse(metric) if sa == CO else np.asarray(metric, dtype=float)
        arr = np.tensordot(arr, m, axes=([slot_a, slot_b], [0, 1]))
    else:
        arr = np.trace(arr, axis1=slot_a, axis2=slot_b)
    sig = tuple(s for i, s in enumerate(t.signature) if i not in (slot_a, slot_b))
    return PointTensor(arr, sig)


def batch_inner(s, t, signature, g, ginv):
    """Full metric pairing over every slot, batched over leading axes of g."""
    k = len(signature)
    lead = g.ndim - 2
    letters = "abcdefghijklm"
    upper = "nopqrstuvwxyz"
    batch = "ABCDEFGH"[:lead]
    ops = [batch + letters[:k], batch + upper[:k]]
    arrays = [s, t]
    for i, kind in enumerate(signature):
        ops.append(batch + letters[i] + upper[i])
        arrays.append(ginv if kind == CO else g)
    return np.einsum(",".join(ops) + "->" + batch, *arrays)


def inner_product(g, s: PointTensor, t: PointTensor) -> float:
    _same_kind(s, t)
    g = np.asarray(g, dtype=float)
    return float(batch_inner(s.components, t.components, s.signature, g, _spd_inverse(g)))


def flat(g, X):
    return np.asarray(g, dtype=float) @ np.asarray(X, dtype=float)


def sharp(g, alpha):
    return np.linalg.solve(np.asarray(g, dtype=float), np.asarray(alpha, dtype=float))


def musical(g, obj: PointTensor) -> PointTensor:
    """Lower a vector or raise a 1-form."""
    if obj.rank != 1:
        raise TensorError("musical isomorphisms act on vectors and 1-forms")
    _spd_inverse(g)
    if obj.signature == (CONTRA,):
        return PointTensor(flat(g, obj.components), (CO,))
    return PointTensor(sharp(g, obj.components), (CONTRA,))


@dataclass(frozen=True)
class Frame:
    """Rows are g-orthonormal vectors in coordinate components."""

    vectors: np.ndarray
    metric: np.ndarray

    @property
    def dim(self):
        return self.vectors.shape[0]

    def coframe(self):
        # rows are the dual 1-forms e^i = g(e_i, .)
        return self.vectors @ self.metric

    def orthonormality_error(self):
        return float(np.abs(self.vectors @ self.metric @ self.vectors.T - np.eye(self.dim)).max())


def gram_schmidt(g, start=None) -> Frame:
    """Orthonormalize the coordinate basis (or the rows of ``start``) in index order."""
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    basis = np.eye(n) if start is None else np.array(start, dtype=float)
    scale = max(1.0, float(np.abs(g).max()))
    rows = []
    for i in range(n):
        v = basis[i].copy()
        for _ in range(2):
            for e in rows:
                v = v - (e @ g @ v) * e
        nrm2 = float(v @ g @ v)
        if not nrm2 > 1e-14 * scale:
            raise NotPositiveDefiniteError(f"metric is not positive definite (pivot {nrm2:.3g} at index {i})")
        rows.append(v / np.sqrt(nrm2))
    return Frame(np.array(rows), g.copy())


def batch_gram_schmidt(g):
    """Batched version over the leading axis; returns (P, n, n) frames with rows e_i."""
    g = np.asarray(g, dtype=float)
    P, n, _ = g.shape
    frames = np.zeros((P, n, n))
    for i in range(n):
        v = np.zeros((P, n))
        v[:, i] = 1.0
        for _ in range(2):
            for j in range(i):
                e = frames[:, j]
                coef = np.einsum("pa,pab,pb->p", e, g, v)
                v = v - coef[:, None] * e
        nrm2 = np.einsum("pa,pab,pb->p", v, g, v)
        if np.any(~(nrm2 > 0.0)):
            raise NotPositiveDefiniteError("metric is not positive definite at some point")
        frames[:, i] = v / np.sqrt(nrm2)[:, None]
    return frames


def batch_derivation(A, s, signature):
    """Action of endomorphisms A on tensors s as a derivation.

    A and s share their leading batch axes; A has two trailing axes and s one
    trailing axis per slot.
    """
    k = len(signature)
    lead = A.ndim - 2
    batch = "ABCDEFGH"[:lead]
    letters = "abcdefghij"[:k]
    out = np.zeros(s.shape)
    for slot, kind in enumerate(signature):
        src = letters[:slot] + "z" + letters[slot + 1:]
        if kind == CO:
            spec = f"{batch}z{letters[slot]},{batch}{src}->{batch}{letters}"
            out -= np.einsum(spec, A, s)
        else:
            spec = f"{batch}{letters[slot]}z,{batch}{src}->{batch}{letters}"
            out += np.einsum(spec, A, s)
    return out


def so_action(A, s: PointTensor, g=None) -> PointTensor:
    """Derivation action of a g-skew endomorphism; skewness is checked when g is given."""
    A = np.asarray(A, dtype=float)
    if g is not None:
        low = np.asarray(g, dtype=float) @ A
        if np.abs(low + low.T).max() > 1e-9 * max(1.0, np.abs(low).max()):
            raise TensorError("endomorphism is not skew-symmetric with respect to g")
    if s.rank == 0:
        return PointTensor(np.zeros(()), ())
    return PointTensor(batch_derivation(A, s.components, s.signature), s.signature)


def lambda2_pairs(n):
    return list(combinations(range(n), 2))


def lambda2_endomorphisms(frame: Frame):
    """Skew endomorphisms of e_i ^ e_j (i < j): e_i -> e_j and e_j -> -e_i."""
    e = frame.vectors
    co = frame.coframe()
    mats = []
    for i, j in lambda2_pairs(frame.dim):
        mats.append(np.outer(e[j], co[i]) - np.outer(e[i], co[j]))
    return np.array(mats).reshape(-1, frame.dim, frame.dim)


def _fix_sign(V):
    V = V.copy()
    for a in range(V.shape[1]):
        col = V[:, a]
        big = np.abs(col) > 1e-10 * max(np.abs(col).max(), 1e-300)
        if big.any() and col[np.argmax(big)] < 0:
            V[:, a] = -col
    return V


def _order_eigenpairs(w, Vt):
    order = np.argsort(w, kind="stable")
    return w[order], _fix_sign(Vt[order].T)


def jacobi_eigen(S, tol=1e-15, backend=None):
    """Eigenvalues ascending and orthonormal eigenvectors as columns."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise TensorError("matrix must be square")
    scale = max(1.0, float(np.abs(S).max())) if S.size else 1.0
    if S.size and np.abs(S - S.T).max() > 1e-10 * scale:
        raise TensorError("matrix is not symmetric")
    S = 0.5 * (S + S.T)
    if S.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0))
    if backend == "numpy" or _kernels.jacobi_numba is None:
        w, Vt, _ = _kernels.jacobi_numpy(S, tol)
    else:
        w, Vt, _ = _kernels.jacobi_numba(S, tol)
    return _order_eigenpairs(w, Vt)

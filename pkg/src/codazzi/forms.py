"""Differential forms, codifferentials, Laplacians and rough Laplacians.

Forms are stored by strictly increasing index tuples and evaluated as full
antisymmetric covariant tensors, so omega(e_1, e_2) = omega[(0, 1)]. The
exterior derivative carries no factorials:
    d omega(X_0..X_k) = sum_i (-1)^i (X_i omega)(X_0, .., X_i omitted, .., X_k).
All pointwise operators act on jets from the geometry module and return jets.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from . import expr as ex
from .curvature import weitzenbock
from .expr import ZERO, differentiate
from .geometry import PointGeometry
from .jets import Jet, jeinsum
from .structure import StatStructure, TensorField, _obj_array, _sum, as_kind, christoffel
from .tensor import CO, CONTRA, batch_derivation, batch_gram_schmidt, batch_inner

_SLOTS = "cdefghij"


def _perm_sign(p):
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


@dataclass(frozen=True)
class FormField:
    n: int
    degree: int
    coeffs: dict

    def __post_init__(self):
        if not 0 <= self.degree <= self.n:
            raise ValueError(f"degree {self.degree} outside [0, {self.n}]")
        clean = {}
        for idx, e in self.coeffs.items():
            idx = tuple(idx)
            if len(idx) != self.degree or any(a >= b for a, b in zip(idx, idx[1:])):
                raise ValueError(f"index tuple {idx} is not strictly increasing of length {self.degree}")
            if idx and not (0 <= idx[0] and idx[-1] < self.n):
                raise ValueError("form index out of range")
            e = ex.as_expr(e)
            if e is not ZERO:
                clean[idx] = e
        object.__setattr__(self, "coeffs", clean)

    @staticmethod
    def function(n, f):
        return FormField(n, 0, {(): f})

    @staticmethod
    def parse(n, degree, texts: dict, coords):
        return FormField(n, degree, {k: ex.parse(v, coords) for k, v in texts.items()})

    def component(self, idx):
        return self.coeffs.get(tuple(idx), ZERO)

    def full(self) -> np.ndarray:
        out = _obj_array((self.n,) * self.degree)
        if self.degree == 0:
            out[()] = self.component(())
            return out
        for idx, e in self.coeffs.items():
            for p in permutations(range(self.degree)):
                target = tuple(idx[i] for i in p)
                out[target] = e if _perm_sign(p) > 0 else -e
        return out

    def tensor_field(self) -> TensorField:
        return TensorField(self.full(), (CO,) * self.degree)

    def jet(self, points, order):
        return self.tensor_field().jet(points, order)

    def __add__(self, other):
        if (self.n, self.degree) != (other.n, other.degree):
            raise ValueError("forms differ in dimension or degree")
        keys = set(self.coeffs) | set(other.coeffs)
        return FormField(self.n, self.degree, {k: self.component(k) + other.component(k) for k in keys})

    def scale(self, c):
        c = ex.as_expr(c)
        return FormField(self.n, self.degree, {k: c * e for k, e in self.coeffs.items()})

    def wedge(self, other):
        k, m = self.degree, other.degree
        if k + m > self.n:
            return FormField(self.n, k + m, {})
        out = {}
        for a, ea in self.coeffs.items():
            for b, eb in other.coeffs.items():
                merged = a + b
                if len(set(merged)) < len(merged):
                    continue
                order = sorted(range(len(merged)), key=lambda i: merged[i])
                key = tuple(merged[i] for i in order)
                term = ea * eb
                out[key] = out.get(key, ZERO) + (term if _perm_sign(order) > 0 else -term)
        return FormField(self.n, k + m, out)


def d(omega: FormField) -> FormField:
    """Exterior derivative, assembled symbolically."""
    k = omega.degree
    if k >= omega.n:
        raise ValueError("d of a top-degree form leaves the exterior algebra")
    out = {}
    for idx in combinations(range(omega.n), k + 1):
        terms = []
        for j, a in enumerate(idx):
            rest = idx[:j] + idx[j + 1:]
            c = omega.component(rest)
            if c is ZERO:
                continue
            dc = differentiate(c, a)
            terms.append(dc if j % 2 == 0 else -dc)
        out[idx] = _sum(terms)
    return FormField(omega.n, k + 1, out)


def exact(n, f) -> FormField:
    return d(FormField.function(n, ex.as_expr(f)))


# -- jet operators -------------------------------------------------------------------

def _alt_from_derivative(D: Jet, k):
    """sum_j (-1)^j D[i_j, i_0..(i_j omitted)..i_k] from a jet whose first slot is the derivative."""
    out = None
    for j in range(k + 1):
        perm = list(range(1, j + 1)) + [0] + list(range(j + 1, k + 1))
        term = D.transpose(perm)
        if j % 2:
            term = -term
        out = term if out is None else out + term
    return out


def d_jet(w: Jet, k) -> Jet:
    return _alt_from_derivative(w.grad(), k)


def d_connection_jet(geo: PointGeometry, w: Jet, k, kind) -> Jet:
    return _alt_from_derivative(geo.cov(w, (CO,) * k, kind), k)


def codiff_jet(geo: PointGeometry, w: Jet, k, kind="hat") -> Jet:
    """delta^kind omega = -tr_g (kind-derivative of omega)(., ., ...)."""
    if k < 1:
        raise ValueError("codifferential of a 0-form is not defined")
    L = _SLOTS[:k - 1]
    Dw = geo.cov(w, (CO,) * k, kind)
    return -jeinsum(f"ab,ab{L}->{L}", geo.ginv, Dw)


def interior_jet(X: Jet, w: Jet, k) -> Jet:
    if k == 0:
        return Jet([np.zeros(p.shape) for p in w.parts], w.n)
    L = _SLOTS[:k - 1]
    return jeinsum(f"a,a{L}->{L}", X, w)


def lie_cartan_jet(geo, X: Jet, w: Jet, k) -> Jet:
    """L_X = iota_X d + d iota_X."""
    out = None
    if k < geo.n:
        out = interior_jet(X, d_jet(w, k), k + 1)
    if k > 0:
        term = d_jet(interior_jet(X, w, k), k - 1)
        out = term if out is None else out + term
    return out


def derivation_matrix_S(geo, X: Jet, kind="nabla"):
    """Matrix of S_X: Y -> nabla_Y X, i.e. A[c, b] = (nabla_b X)^c."""
    return np.swapaxes(geo.cov(X, (CONTRA,), kind).value, 1, 2)


def K_matrix(geo, X):
    """Matrix of K_X for a vector value X[z, a]: A[c, b] = X^a K[a, b, c]."""
    return np.einsum("za,zabc->zcb", X, geo.K.value)


def lie_connection_values(geo, X: Jet, w: Jet, signature):
    """L_X s = nabla_X s - S_X s, values only."""
    Dw = geo.cov(w, signature, "nabla").value
    nabla_X = np.einsum("za,za...->z...", X.value, Dw)
    return nabla_X - batch_derivation(derivation_matrix_S(geo, X), w.value, signature)


def laplacian_jets(geo: PointGeometry, w: Jet, k):
    """(Delta omega, Delta^nabla omega) with Delta = delta d + d delta and Delta^nabla built from delta^bar."""
    out = {}
    for name, kind in (("hat", "hat"), ("nabla", "bar")):
        acc = None
        if k < geo.n:
            acc = codiff_jet(geo, d_jet(w, k), k + 1, kind)
        if k > 0:
            term = d_jet(codiff_jet(geo, w, k, kind), k - 1)
            acc = term if acc is None else acc + term
        out[name] = acc
    return out["hat"], out["nabla"]


def hessian(s: StatStructure, f, kind="hat") -> TensorField:
    """Hess^kind f(X, Y) = X(df(Y)) - df(nabla_X Y), assembled symbolically."""
    f = ex.as_expr(f)
    gam = christoffel(s, kind).components
    n = s.n
    df = [differentiate(f, c) for c in range(n)]
    H = _obj_array((n, n))
    for a in range(n):
        for b in range(n):
            terms = [differentiate(df[b], a)]
            terms += [-(gam[a, b, c] * df[c]) for c in range(n) if gam[a, b, c] is not ZERO and df[c] is not ZERO]
            H[a, b] = _sum(terms)
    return TensorField(H, (CO, CO))


def hessian_jet(geo, f: Jet, kind="hat") -> Jet:
    return geo.cov(f.grad(), (CO,), kind)


def rough_laplacian_jet(geo: PointGeometry, s: Jet, signature, variant="nabla") -> Jet:
    """Rough Laplacians as jets.

    variant "nabla":    -tr_g nablabar(nabla s) + nabla_E s
    variant "weighted": -tr_g nablabar(nabla s)
    variant "bar":      -tr_g nabla(nablabar s) - nablabar_E s   (the conjugate one)
    """
    signature = tuple(signature)
    inner, outer = ("bar", "nabla") if variant == "bar" else ("nabla", "bar")
    L = _SLOTS[:len(signature)]
    Ds = geo.cov(s, signature, inner)
    DDs = geo.cov(Ds, (CO,) + signature, outer)
    out = -jeinsum(f"ab,ab{L}->{L}", geo.ginv, DDs)
    if variant == "nabla":
        out = out + jeinsum(f"a,a{L}->{L}", geo.E, Ds)
    elif variant == "bar":
        out = out - jeinsum(f"a,a{L}->{L}", geo.E, Ds)
    elif variant != "weighted":
        raise ValueError("variant must be nabla, weighted or bar")
    return out


def rough_laplacian_frame(geo: PointGeometry, s: Jet, signature) -> np.ndarray:
    """-sum_i nablabar_{e_i}(nabla_{e_i} s) with an orthonormal frame whose hatnabla vanishes at each point."""
    signature = tuple(signature)
    n = geo.n
    L = _SLOTS[:len(signature)]
    F0 = batch_gram_schmidt(geo.g.value)
    F1 = -np.einsum("zabc,zib->zaic", geo.gamma("hat").value, F0)
    frame = Jet([F0, F1], n)
    Ds = geo.cov(s, signature, "nabla")
    Y = jeinsum(f"ia,a{L}->i{L}", frame, Ds, order=1)
    out = 0.0
    for i in range(n):
        Yi = Jet([p[(slice(None),) * (1 + r) + (i,)] for r, p in enumerate(Y.parts)], n)
        DY = geo.cov(Yi, signature, "bar").value
        out = out - np.einsum(f"za,za{L}->z{L}", F0[:, i], DY)
    return out


def norm2(geo, a, b, signature):
    return batch_inner(a, b, tuple(signature), geo.g.value, geo.ginv.value)


def norm2_jet(geo, s: Jet, signature) -> Jet:
    k = len(signature)
    L = "abcdef"[:k]
    U = "mnopqr"[:k]
    ops = [L, U] + [L[i] + U[i] for i in range(k)]
    mets = [geo.ginv if v == CO else geo.g for v in signature]
    return jeinsum(",".join(ops) + "->", s, s, *mets)


def function_laplacians(geo, f: Jet):
    """(Delta f, Delta^nabla f) values for a scalar jet of order >= 2."""
    df = f.grad()
    return codiff_jet(geo, df, 1, "hat").value, codiff_jet(geo, df, 1, "bar").value


# -- public pointwise wrappers ---------------------------------------------------------

def _setup(s, points, omega, order):
    geo = s.geometry(points) if not isinstance(points, PointGeometry) else points
    return geo, omega.jet(geo.points, order)


def codifferential(s: StatStructure, omega: FormField, kind="hat", points=None):
    if omega.degree < 1:
        raise ValueError("codifferential of a 0-form is not defined")
    geo, w = _setup(s, points, omega, 1)
    return codiff_jet(geo, w, omega.degree, as_kind(kind).value).value


def interior_E(s: StatStructure, omega: FormField, points):
    geo, w = _setup(s, points, omega, 0)
    return interior_jet(geo.E, w, omega.degree).value


def lie_E(s: StatStructure, omega: FormField, points, route="cartan"):
    geo, w = _setup(s, points, omega, 1)
    if route == "cartan":
        return lie_cartan_jet(geo, geo.E, w, omega.degree).value
    if route == "connection":
        return lie_connection_values(geo, geo.E, w, (CO,) * omega.degree)
    raise ValueError("route must be 'cartan' or 'connection'")


def laplacians(s: StatStructure, omega: FormField, points):
    geo, w = _setup(s, points, omega, 2)
    lap, lapn = laplacian_jets(geo, w, omega.degree)
    return lap.value, lapn.value


def rough_laplacian(s: StatStructure, fld, points, variant="nabla"):
    """Rough Laplacian of a TensorField or FormField at points; "weighted" needs an equiaffine weight."""
    if variant == "weighted" and s.phi is None:
        raise ValueError("the weighted rough Laplacian needs phi")
    tf = fld.tensor_field() if isinstance(fld, FormField) else fld
    geo = s.geometry(points) if not isinstance(points, PointGeometry) else points
    return rough_laplacian_jet(geo, tf.jet(geo.points, 2), tf.signature, variant).value

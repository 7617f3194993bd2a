"""Numeric jets of every derived object of a structure at a batch of points.

Index layouts (point axis first, omitted here):
  gamma[a, b, c] = Gamma^c_ab        K[a, b, c] = K^c_ab = (K_a e_b)^c
  R[a, b, c, d] = (R(e_a, e_b) e_c)^d    Ric[b, c] = R[a, b, c, a]
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .jets import Jet, inverse, jeinsum
from .structure import ConnectionKind, StatStructure, as_kind
from .tensor import CO, CONTRA

_SLOT_LETTERS = "bcdefghijklm"


def covariant(jet: Jet, signature, gamma: Jet) -> Jet:
    """Covariant derivative of a tensor jet; the new covariant slot comes first."""
    k = len(signature)
    letters = _SLOT_LETTERS[:k]
    out = jet.grad()
    for slot, var in enumerate(signature):
        src = letters[:slot] + "z" + letters[slot + 1:]
        if var == CO:
            term = jeinsum(f"a{letters[slot]}z,{src}->a{letters}", gamma, jet)
            out = out - term
        else:
            term = jeinsum(f"az{letters[slot]},{src}->a{letters}", gamma, jet)
            out = out + term
    return out


def curvature_from_gamma(gamma: Jet) -> Jet:
    dgam = gamma.grad()
    lin = dgam - dgam.transpose((1, 0, 2, 3))
    quad = jeinsum("bce,aed->abcd", gamma, gamma) - jeinsum("ace,bed->abcd", gamma, gamma)
    return lin + quad


class PointGeometry:
    def __init__(self, structure: StatStructure, points):
        self.structure = structure
        self.points = np.atleast_2d(np.asarray(points, dtype=float))
        self.n = structure.n
        self._gamma = {}
        self._riemann = {}

    @property
    def P(self):
        return self.points.shape[0]

    @cached_property
    def g(self) -> Jet:
        return self.structure.metric_field.jet(self.points, 3)

    @cached_property
    def ginv(self) -> Jet:
        return inverse(self.g)

    @cached_property
    def C(self) -> Jet:
        return self.structure.cubic_field.jet(self.points, 2)

    @cached_property
    def phi(self) -> Jet:
        return self.structure.phi_field.jet(self.points, 2)

    @cached_property
    def K(self) -> Jet:
        return jeinsum("cl,abl->abc", self.ginv, self.C)

    @cached_property
    def gamma_hat(self) -> Jet:
        dg = self.g.grad()
        koszul = dg + dg.transpose((1, 0, 2)) - dg.transpose((1, 2, 0))
        # koszul[a, b, l] = d_a g_bl + d_b g_al - d_l g_ab
        return jeinsum("cl,abl->abc", self.ginv, koszul.truncate(2)).scale(0.5)

    def gamma(self, kind="hat") -> Jet:
        kind = as_kind(kind)
        if kind not in self._gamma:
            if kind is ConnectionKind.HAT:
                self._gamma[kind] = self.gamma_hat
            elif kind is ConnectionKind.NABLA:
                self._gamma[kind] = self.gamma_hat + self.K
            else:
                self._gamma[kind] = self.gamma_hat - self.K
        return self._gamma[kind]

    def cov(self, jet: Jet, signature, kind="hat") -> Jet:
        return covariant(jet, signature, self.gamma(kind))

    def riemann(self, kind="nabla") -> Jet:
        kind = as_kind(kind)
        if kind not in self._riemann:
            self._riemann[kind] = curvature_from_gamma(self.gamma(kind))
        return self._riemann[kind]

    def ricci(self, kind="nabla") -> Jet:
        return self.riemann(kind).map_tensor(lambda r: np.einsum("zabca->zbc", r))

    def scalar(self, kind="nabla") -> np.ndarray:
        return np.einsum("zbc,zbc->z", self.ginv.value, self.ricci(kind).value)

    def lowered(self, R: np.ndarray) -> np.ndarray:
        """g(T(e_a, e_b) e_c, e_d) from a (1,3) array."""
        return np.einsum("zabce,zed->zabcd", R, self.g.value)

    def curvature_like(self, T: np.ndarray) -> np.ndarray:
        """calR[u, z, x, y] = 1/2 (g(T(x,y)z, u) - g(T(x,y)u, z))."""
        low = self.lowered(T)
        return 0.5 * (np.einsum("zxyab->zbaxy", low) - np.einsum("zxyab->zabxy", low))

    @cached_property
    def tau(self) -> Jet:
        return self.K.map_tensor(lambda k: np.einsum("zxbb->zx", k))

    @cached_property
    def E(self) -> Jet:
        return jeinsum("ab,abc->c", self.ginv, self.K)

    @cached_property
    def dtau(self) -> Jet:
        dt = self.tau.grad()
        return dt - dt.transpose((1, 0))

    @cached_property
    def E_flat(self) -> Jet:
        return jeinsum("ab,b->a", self.g, self.E)

    @cached_property
    def half_log_det_grad(self) -> np.ndarray:
        # d_i log sqrt(det g) = 1/2 tr(g^-1 d_i g)
        return 0.5 * np.einsum("zab,ziba->zi", self.ginv.value, self.g.parts[1])

    def K_norm2(self):
        # |K|^2 = g^{aa'} g^{bb'} g_{cc'} K^c_ab K^c'_a'b'
        K = self.K.value
        gi = self.ginv.value
        g = self.g.value
        return np.einsum("zabc,zdef,zad,zbe,zcf->z", K, K, gi, gi, g)

    def E_norm2(self):
        E = self.E.value
        return np.einsum("za,zb,zab->z", E, E, self.g.value)

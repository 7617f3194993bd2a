"""Quadrature of integral formulas on flat tori and over the unit circle bundle."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .forms import function_laplacians, hessian_jet
from .geometry import PointGeometry
from .jets import Jet
from .report import Check, SuiteReport
from .structure import StatStructure, StructureError, TensorField, check_periodic, validate
from .tensor import CO, CONTRA, batch_gram_schmidt

INTEGRAL_TOL = 1e-4
ROS_TOL = 1e-5


@dataclass(frozen=True)
class TorusGrid:
    periods: tuple
    sizes: tuple

    @property
    def n(self):
        return len(self.periods)

    @property
    def spacing(self):
        return tuple(L / N for L, N in zip(self.periods, self.sizes))

    @property
    def cell_volume(self):
        return math.prod(self.spacing)

    @property
    def count(self):
        return math.prod(self.sizes)

    def points(self):
        """Nodes in row-major order: the last coordinate varies fastest."""
        axes = [np.arange(N) * h for N, h in zip(self.sizes, self.spacing)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=1)


def torus_grid(s: StatStructure, N) -> TorusGrid:
    """Grid on the fundamental domain after checking that every coefficient is periodic."""
    check_periodic(s)
    sizes = (N,) * s.n if isinstance(N, int) else tuple(N)
    if len(sizes) != s.n or min(sizes) < 2:
        raise ValueError("one resolution >= 2 per coordinate expected")
    return TorusGrid(tuple(float(L) for L in s.periods), sizes)


def require_parallel_volume(s: StatStructure):
    """Raise unless nabla has a parallel volume form: trace-free or tau = d log phi."""
    rep = validate(s)
    if not rep.ok:
        raise StructureError("structure failed validation: " + "; ".join(v.detail for v in rep.violations))
    if not (rep.trace_free or rep.equiaffine):
        raise StructureError("structure is neither trace-free nor equiaffine (tau != d log phi)")
    return rep


def volume_density(geo: PointGeometry, weighted=True) -> np.ndarray:
    """sqrt(det g), times phi when the structure carries an equiaffine weight."""
    dens = np.sqrt(np.linalg.det(geo.g.value))
    if weighted and geo.structure.phi is not None:
        dens = dens * geo.phi.value
    return dens


class TorusQuadrature:
    """Equal-weight node sums on a periodic grid, spectrally accurate for smooth integrands."""

    def __init__(self, s: StatStructure, N):
        self.structure = s
        self.grid = torus_grid(s, N)
        self.geo = PointGeometry(s, self.grid.points())

    def density(self, weighted=True):
        return volume_density(self.geo, weighted)

    def integrate(self, values, weighted=True) -> float:
        values = np.asarray(values, dtype=float)
        return float(np.sum(values * self.density(weighted)) * self.grid.cell_volume)

    def scale(self, values, weighted=True) -> float:
        return self.integrate(np.abs(values), weighted)

    def sample(self, fld):
        """Scalar Expr / text or a TensorField evaluated at the nodes."""
        if isinstance(fld, TensorField):
            return fld.evaluate_batch(self.geo.points)
        e = ex.parse(fld, self.structure.coords) if isinstance(fld, str) else ex.as_expr(fld)
        return TensorField(np.array(e, dtype=object), ()).evaluate_batch(self.geo.points)

    def jet(self, fld: TensorField, order):
        return fld.jet(self.geo.points, order)

    # -- unit circle bundle -----------------------------------------------------------

    def fiber_vectors(self, n_theta):
        """U[z, t, a] = cos(theta_t) e_1 + sin(theta_t) e_2 in the Gram-Schmidt frame at node z."""
        if self.structure.n != 2:
            raise ValueError("unit-bundle integrals are implemented for n = 2")
        theta = 2 * math.pi * np.arange(n_theta) / n_theta
        frame = batch_gram_schmidt(self.geo.g.value)
        return np.cos(theta)[None, :, None] * frame[:, None, 0] + np.sin(theta)[None, :, None] * frame[:, None, 1]

    def integrate_bundle(self, tensor, n_theta, weighted=False):
        """Integral over UM of tensor(U, ..., U) for a covariant tensor tensor[z, a, b, ...]."""
        U = self.fiber_vectors(n_theta)
        if tensor.ndim == 1:
            vals = np.repeat(tensor[:, None], n_theta, axis=1)
        else:
            vals = np.einsum("z...a,zta->zt...", tensor, U)
            while vals.ndim > 2:
                vals = np.einsum("zt...a,zta->zt...", vals, U)
        fiber = vals.sum(axis=1) * (2 * math.pi / n_theta)
        return self.integrate(fiber, weighted), self.integrate(np.abs(fiber), weighted)


def quad_torus(s: StatStructure, integrand, N, weighted=False) -> float:
    """Integral of a scalar Expr, text, or callable(PointGeometry) over the torus against nu_g (or phi nu_g)."""
    q = TorusQuadrature(s, N)
    values = integrand(q.geo) if callable(integrand) else q.sample(integrand)
    return q.integrate(values, weighted)


def _record(rep: SuiteReport, id, anchor, lhs, rhs, tol, note=""):
    """Integral identity residual |L - R| / (1 + max(|L|, |R|))."""
    if math.isfinite(lhs) and math.isfinite(rhs):
        residual = abs(lhs - rhs) / (1.0 + max(abs(lhs), abs(rhs)))
    else:
        residual = math.inf
    note = note or f"lhs {lhs:.6e}, rhs {rhs:.6e}"
    rep.checks.append(Check(id, anchor, residual, rep._tol(tol), rep.points, note))


# -- integral Ricci formula ---------------------------------------------------------------

def _vector_jet(q: TorusQuadrature, X):
    if isinstance(X, (list, tuple)):
        comps = np.array([ex.parse(t, q.structure.coords) if isinstance(t, str) else ex.as_expr(t) for t in X],
                         dtype=object)
        X = TensorField(comps, (CONTRA,))
    if X.signature != (CONTRA,):
        raise ValueError("a vector field is required")
    return X.jet(q.geo.points, 1)


def integral_ric_check(s: StatStructure, X, N=64, Y=None, tol=INTEGRAL_TOL) -> SuiteReport:
    """Integral Ricci formula for nabla-parallel volumes, plus the n = 2 determinant form."""
    require_parallel_volume(s)
    q = TorusQuadrature(s, N)
    geo = q.geo
    Xj = _vector_jet(q, X)
    Yj = _vector_jet(q, Y) if Y is not None else Xj
    SX = np.swapaxes(geo.cov(Xj, (CONTRA,), "nabla").value, 1, 2)
    SY = np.swapaxes(geo.cov(Yj, (CONTRA,), "nabla").value, 1, 2)
    ric = np.einsum("zb,zc,zbc->z", Xj.value, Yj.value, geo.ricci("nabla").value)
    trace_prod = np.einsum("zaa->z", SY) * np.einsum("zaa->z", SX)
    tr_comp = np.einsum("zab,zba->z", SY, SX)
    rep = SuiteReport("integral", points=q.grid.count)
    lhs = q.integrate(ric)
    rhs = q.integrate(trace_prod) - q.integrate(tr_comp)
    _record(rep, "basic", "integral Ricci formula with tr S_Y tr S_X", lhs, rhs, tol)
    if s.n == 2 and Y is None:
        det = q.integrate(np.linalg.det(SX))
        _record(rep, "det_S", "n=2: int Ric(X,X) = 2 int det S_X", lhs, 2 * det, tol)
    return rep


# -- unit-bundle integrals ----------------------------------------------------------------

def _require_surface(s):
    if s.n != 2:
        raise ValueError("unit-bundle integrals are implemented for n = 2")


def _ros_record(rep, id, anchor, value, scale, tol):
    """A vanishing integral, measured against the integral of the absolute fiber integrand."""
    residual = abs(value) / (1.0 + scale) if math.isfinite(value) else math.inf
    rep.checks.append(Check(id, anchor, residual, rep._tol(tol), rep.points, f"integral {value:.3e}, scale {scale:.3e}"))


def ros_integrals(s: StatStructure, field: TensorField = None, N=64, n_theta=64, tol=ROS_TOL) -> SuiteReport:
    """Ros integral formulas for a covariant field (default: the cubic form) and for K."""
    _require_surface(s)
    q = TorusQuadrature(s, N)
    geo = q.geo
    fld = field if field is not None else s.cubic_field
    if any(v != CO for v in fld.signature) or fld.rank < 1:
        raise ValueError("Ros formulas take a covariant tensor field of rank >= 1")
    rep = SuiteReport("ros", points=q.grid.count)
    Ds = geo.cov(q.jet(fld, 1), fld.signature, "hat").value
    value, scale = q.integrate_bundle(Ds, n_theta)
    _ros_record(rep, "RosI", "int_UM (hat nabla s)(U,...,U) = 0", value, scale, tol)
    trace = np.einsum("zab...,zab->z...", Ds, geo.ginv.value)
    value, scale = q.integrate_bundle(trace, n_theta)
    _ros_record(rep, "RosII", "int_UM tr_g (hat nabla s)(., ., U, ...) = 0", value, scale, tol)
    DK = geo.cov(geo.K, (CO, CO, CONTRA), "hat").value
    div = np.einsum("zabca->zbc", DK)
    value, scale = q.integrate_bundle(div, n_theta)
    _ros_record(rep, "RosII'", "int_UM (div K)(U, U) = 0 for the (1,2) field K", value, scale, tol)
    return rep


def um_ricci_check(s: StatStructure, N=64, n_theta=64, tol=INTEGRAL_TOL) -> SuiteReport:
    """Unit-bundle integrals of Ric, conjugate Ric, and the Levi-Civita Ricci corrected by K."""
    _require_surface(s)
    q = TorusQuadrature(s, N)
    geo = q.geo
    rep = SuiteReport("um_ricci", points=q.grid.count)
    K = geo.K.value
    ric, _ = q.integrate_bundle(geo.ricci("nabla").value, n_theta)
    ric_bar, _ = q.integrate_bundle(geo.ricci("bar").value, n_theta)
    ric_hat, _ = q.integrate_bundle(geo.ricci("hat").value, n_theta)
    # g(K_U, K_U) = tr(K_U K_U) and tau(K(U, U)) as quadratic forms in U
    KK = np.einsum("zacd,zbdc->zab", K, K)
    tauK = np.einsum("zabc,zc->zab", K, geo.tau.value)
    kk, _ = q.integrate_bundle(KK, n_theta)
    tk, _ = q.integrate_bundle(tauK, n_theta)
    _record(rep, "UM_Ric_oRic", "int_UM Ric(U,U) = int_UM Ric-bar(U,U)", ric, ric_bar, tol)
    _record(rep, "UM_Ric_hat", "int_UM Ric = int_UM Ric-hat - g(K_U,K_U) + tau(K(U,U))", ric, ric_hat - kk + tk, tol)
    return rep


def nabla2g_um_check(s: StatStructure, N=64, n_theta=64, tol=INTEGRAL_TOL) -> SuiteReport:
    """int_UM nabla^2 g(U,U,U,U) = 6 int_UM |K(U,U)|^2."""
    _require_surface(s)
    q = TorusQuadrature(s, N)
    geo = q.geo
    g = Jet(geo.g.parts[:3], geo.n)
    D2g = geo.cov(geo.cov(g, (CO, CO), "nabla"), (CO, CO, CO), "nabla").value
    K = geo.K.value
    Kl = np.einsum("zabe,zec->zabc", K, geo.g.value)
    # |K(U,U)|^2 = K^c_ab K_de_c U^a U^b U^d U^e
    quartic = np.einsum("zabc,zdec->zabde", K, Kl)
    lhs, _ = q.integrate_bundle(D2g, n_theta)
    rhs, _ = q.integrate_bundle(quartic, n_theta)
    rep = SuiteReport("nabla2g", points=q.grid.count)
    _record(rep, "nabla2g_UM", "int_UM nabla^2 g(U,U,U,U) = 6 int_UM |K(U,U)|^2", lhs, 6 * rhs, tol)
    return rep


# -- Lichnerowicz ---------------------------------------------------------------------------

def ricci_lower_bound(geo: PointGeometry) -> float:
    """Largest k with Ric >= k g at every node: min generalized eigenvalue of sym(Ric) against g."""
    ric = geo.ricci("nabla").value
    sym = 0.5 * (ric + np.swapaxes(ric, 1, 2))
    L = np.linalg.cholesky(geo.g.value)
    Linv = np.linalg.inv(L)
    M = np.einsum("zab,zbc,zdc->zad", Linv, sym, Linv)
    return float(np.linalg.eigvalsh(M)[:, 0].min())


def lichnerowicz_integral(s: StatStructure, f="sin(u)*cos(v)", N=64, tol=INTEGRAL_TOL) -> SuiteReport:
    """int Ric(df#, df#) nu = int |Delta^nabla f|^2 nu - int |Hess^bar f|^2 nu."""
    require_parallel_volume(s)
    q = TorusQuadrature(s, N)
    geo = q.geo
    fexpr = ex.parse(f, s.coords) if isinstance(f, str) else ex.as_expr(f)
    fj = TensorField(np.array(fexpr, dtype=object), ()).jet(geo.points, 3)
    grad = np.einsum("zab,zb->za", geo.ginv.value, fj.parts[1])
    ric = np.einsum("za,zb,zab->z", grad, grad, geo.ricci("nabla").value)
    _, lap_nabla = function_laplacians(geo, fj)
    H = hessian_jet(geo, fj, "bar").value
    hess2 = np.einsum("zab,zcd,zac,zbd->z", H, H, geo.ginv.value, geo.ginv.value)
    rep = SuiteReport("lichnerowicz", points=q.grid.count)
    _record(rep, "nabla_formula_Lichnerowicz", "int Ric(df#,df#) nu = int |Delta^nabla f|^2 nu - int |Hess^bar f|^2 nu",
            q.integrate(ric), q.integrate(lap_nabla ** 2) - q.integrate(hess2), tol)
    return rep

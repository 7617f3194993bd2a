"""Curvature of the three connections and the identities relating them.

Layouts follow the geometry module: R[x, y, c, d] = (R(e_x, e_y) e_c)^d and
the lowered curvature-like tensor calR[u, z, x, y].
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .geometry import PointGeometry
from .report import FIRST_ORDER_TOL, SECOND_ORDER_TOL, Check, SuiteReport
from .structure import (StatStructure, TensorField, _memo, _obj_array, _sum, as_kind,
                        christoffel)
from .expr import ZERO, differentiate
from .tensor import (CO, CONTRA, PointTensor, TensorError, batch_derivation, batch_gram_schmidt, gram_schmidt,
                     jacobi_eigen, lambda2_endomorphisms, lambda2_pairs)

CURVATURE_SIG = (CO, CO, CO, CONTRA)
LAMBDA2_TOL = 1e-10


class DegeneratePlaneError(ValueError):
    pass


# -- symbolic route ------------------------------------------------------------

def riemann(s: StatStructure, kind="nabla") -> TensorField:
    """Curvature (1,3) field assembled symbolically from the connection coefficients."""
    kind = as_kind(kind)

    def build():
        n = s.n
        gam = christoffel(s, kind).components
        R = _obj_array((n,) * 4)
        for a, b in product(range(n), repeat=2):
            if a >= b:
                continue
            for c, d in product(range(n), repeat=2):
                terms = [differentiate(gam[b, c, d], a), -differentiate(gam[a, c, d], b)]
                for e in range(n):
                    if gam[b, c, e] is not ZERO and gam[a, e, d] is not ZERO:
                        terms.append(gam[b, c, e] * gam[a, e, d])
                    if gam[a, c, e] is not ZERO and gam[b, e, d] is not ZERO:
                        terms.append(-(gam[a, c, e] * gam[b, e, d]))
                R[a, b, c, d] = _sum(terms)
                R[b, a, c, d] = -R[a, b, c, d]
        return R
    return TensorField(_memo(s, ("riemann", kind.value), build), CURVATURE_SIG)


# -- pointwise building blocks ---------------------------------------------------

def commutator_KK(K):
    """[K_x, K_y] in curvature layout: out[x, y, c, d]."""
    return np.einsum("zyce,zxed->zxycd", K, K) - np.einsum("zxce,zyed->zxycd", K, K)


def cyclic(F):
    """Cyclic sum over the first three slots (after the point axis)."""
    return F + np.einsum("zxyu...->zuxy...", F) + np.einsum("zyux...->zuxy...", F)


def lambda2_metric_matrix(g, frame_vectors):
    """Gram matrix of e_i ^ e_j in the Lambda^2 convention used here (orthonormal frame gives I)."""
    pairs = lambda2_pairs(g.shape[0])
    G = frame_vectors @ g @ frame_vectors.T
    M = np.zeros((len(pairs), len(pairs)))
    for p, (i, j) in enumerate(pairs):
        for q, (k, l) in enumerate(pairs):
            M[p, q] = G[i, k] * G[j, l] - G[i, l] * G[j, k]
    return M


@dataclass(frozen=True)
class CurvatureBundle:
    point: np.ndarray
    R: PointTensor
    R_bar: PointTensor
    R_hat: PointTensor
    Ric: PointTensor
    Ric_bar: PointTensor
    Ric_hat: PointTensor
    rho: float
    rho_bar: float
    rho_hat: float
    curvature_like: np.ndarray  # from 1/2 (R + R_bar)


def curvature_bundle(s: StatStructure, point) -> CurvatureBundle:
    geo = PointGeometry(s, np.asarray(point, dtype=float)[None, :])
    Rs = {k: geo.riemann(k).value[0] for k in ("nabla", "bar", "hat")}
    Rc = {k: geo.ricci(k).value[0] for k in Rs}
    rho = {k: float(geo.scalar(k)[0]) for k in Rs}
    half = 0.5 * (geo.riemann("nabla").value + geo.riemann("bar").value)
    return CurvatureBundle(
        np.asarray(point, dtype=float),
        PointTensor(Rs["nabla"], CURVATURE_SIG), PointTensor(Rs["bar"], CURVATURE_SIG),
        PointTensor(Rs["hat"], CURVATURE_SIG),
        PointTensor.covariant(Rc["nabla"]), PointTensor.covariant(Rc["bar"]), PointTensor.covariant(Rc["hat"]),
        rho["nabla"], rho["bar"], rho["hat"], geo.curvature_like(half)[0])


def _plane(g, X, Y):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    den = (X @ g @ X) * (Y @ g @ Y) - (X @ g @ Y) ** 2
    scale = max(1.0, float(X @ g @ X) * float(Y @ g @ Y))
    if not den > 1e-14 * scale:
        raise DegeneratePlaneError("vectors span a degenerate plane")
    return X, Y, den


def sectional_from_tensor(calR, g, X, Y):
    X, Y, den = _plane(g, X, Y)
    return float(np.einsum("uzxy,u,z,x,y->", calR, X, Y, X, Y) / den)


def sectional_nabla(s: StatStructure, point, X, Y, normalization="half") -> float:
    """Sectional curvature of the plane X ^ Y.

    ``normalization="half"`` uses the curvature-like tensor of (R + R_bar)/2,
    the sectional nabla-curvature; ``"sum"`` uses R + R_bar unhalved.
    """
    geo = PointGeometry(s, np.asarray(point, dtype=float)[None, :])
    T = geo.riemann("nabla").value + geo.riemann("bar").value
    if normalization == "half":
        T = 0.5 * T
    elif normalization != "sum":
        raise ValueError("normalization must be 'half' or 'sum'")
    return sectional_from_tensor(geo.curvature_like(T)[0], geo.g.value[0], X, Y)


@dataclass(frozen=True)
class CurvatureOperator:
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, in the e_i ^ e_j (i < j) basis
    pairs: list
    frame: object
    nonnegative: bool
    positive: bool
    normalization: str

    def endomorphisms(self):
        """Skew endomorphisms Theta_alpha of the eigenvectors, one per column."""
        basis = lambda2_endomorphisms(self.frame)
        return np.einsum("pa,pij->aij", self.eigenvectors, basis)


def operator_from_tensor(calT, frame, normalization="sum") -> CurvatureOperator:
    e = frame.vectors
    n = e.shape[0]
    pairs = lambda2_pairs(n)
    F = np.einsum("uzxy,iu,jz,kx,ly->ijkl", calT, e, e, e, e)
    M = np.array([[F[i, j, k, l] for (k, l) in pairs] for (i, j) in pairs]).reshape(len(pairs), len(pairs))
    M = 0.5 * (M + M.T)
    w, V = jacobi_eigen(M) if M.size else (np.zeros(0), np.zeros((0, 0)))
    scale = float(np.abs(M).max()) if M.size else 0.0
    lo = float(w[0]) if w.size else 0.0
    return CurvatureOperator(M, w, V, pairs, frame, lo >= -LAMBDA2_TOL * scale,
                             lo > LAMBDA2_TOL * scale if w.size else False, normalization)


def curvature_operator(s: StatStructure, point, normalization="sum") -> CurvatureOperator:
    """Curvature operator on Lambda^2 in the orthonormal basis e_i ^ e_j of the Gram-Schmidt frame.

    ``"sum"`` uses T = R + R_bar; ``"half"`` uses (R + R_bar)/2.
    """
    geo = PointGeometry(s, np.asarray(point, dtype=float)[None, :])
    T = geo.riemann("nabla").value + geo.riemann("bar").value
    if normalization == "half":
        T = 0.5 * T
    elif normalization != "sum":
        raise ValueError("normalization must be 'half' or 'sum'")
    frame = gram_schmidt(geo.g.value[0])
    return operator_from_tensor(geo.curvature_like(T)[0], frame, normalization)


# -- Weitzenbock operator ----------------------------------------------------------

def _letters(k):
    return "bcdefghi"[:k]


def curvature_derivation(T, s, signature):
    """D[a, x, ...] = (T(e_a, e_x) . s)[...], T acting as a derivation; batched over axis 0."""
    k = len(signature)
    L = _letters(k)
    out = np.zeros((T.shape[0], T.shape[1], T.shape[1]) + s.shape[1:])
    for slot, var in enumerate(signature):
        src = L[:slot] + "w" + L[slot + 1:]
        if var == CO:
            out -= np.einsum(f"zax{L[slot]}w,z{src}->zax{L}", T, s)
        else:
            out += np.einsum(f"zaxw{L[slot]},z{src}->zax{L}", T, s)
    return out


def weitzenbock(T, s, signature, ginv):
    """(W^T s)(X_1..X_k) = sum_i sum_j (T(e_j, X_i) s)(X_1, .., e_j, .., X_k), batched."""
    signature = tuple(signature)
    if any(v != CO for v in signature):
        raise TensorError("the Weitzenbock operator acts on covariant tensors")
    k = len(signature)
    if k == 0:
        return np.zeros(s.shape)
    D = curvature_derivation(T, s, signature)
    L = _letters(k)
    out = np.zeros(s.shape)
    for i in range(k):
        src = L[:i] + "w" + L[i + 1:]
        out += np.einsum(f"zaw,za{L[i]}{src}->z{L}", ginv, D)
    return out


def weitzenbock_frame(T, s, signature, frame_rows):
    """Same operator with the trace taken over an explicit orthonormal frame (single point)."""
    k = len(signature)
    if k == 0:
        return np.zeros(s.shape)
    D = curvature_derivation(T[None], s[None], signature)[0]
    L = _letters(k)
    out = np.zeros(s.shape)
    for i in range(k):
        src = L[:i] + "w" + L[i + 1:]
        out += np.einsum(f"ja,jw,a{L[i]}{src}->{L}", frame_rows, frame_rows, D)
    return out


def weitzenbock_apply(T: PointTensor, s: PointTensor, g) -> PointTensor:
    if tuple(T.signature) != CURVATURE_SIG:
        raise TensorError("T must be a (1,3) tensor in curvature layout")
    ginv = np.linalg.inv(np.asarray(g, dtype=float))
    out = weitzenbock(T.components[None], s.components[None], s.signature, ginv[None])[0]
    return PointTensor(out, s.signature)


def _inner_co(a, b, ginv):
    k = a.ndim - 1
    L = _letters(k)
    U = "BCDEFGHI"[:k]
    ops = [f"z{L}", f"z{U}"] + [f"z{L[i]}{U[i]}" for i in range(k)]
    return np.einsum(",".join(ops) + "->z", a, b, *([ginv] * k))


def weitzenbock_spectral_identity(s: StatStructure, point, tensors, tol=FIRST_ORDER_TOL) -> SuiteReport:
    """<W^T s, s> against sum_alpha lambda_alpha |Theta_alpha s|^2 with T = R + R_bar."""
    geo = PointGeometry(s, np.asarray(point, dtype=float)[None, :])
    T = geo.riemann("nabla").value + geo.riemann("bar").value
    g = geo.g.value
    ginv = geo.ginv.value
    op = operator_from_tensor(geo.curvature_like(T)[0], gram_schmidt(g[0]))
    thetas = op.endomorphisms()
    rep = SuiteReport("weitzenbock_spectral", points=1)
    lhs_all, rhs_all = [], []
    for arr in tensors:
        arr = np.asarray(arr, dtype=float)
        sig = (CO,) * arr.ndim
        W = weitzenbock(T, arr[None], sig, ginv)
        lhs = float(_inner_co(W, arr[None], ginv)[0])
        rhs = 0.0
        for lam, th in zip(op.eigenvalues, thetas):
            ts = batch_derivation(th, arr, sig)
            rhs += lam * float(_inner_co(ts[None], ts[None], ginv)[0])
        lhs_all.append(lhs)
        rhs_all.append(rhs)
    worst = max((abs(a - b) / (1 + abs(a)) for a, b in zip(lhs_all, rhs_all)), default=0.0)
    rep.checks.append(Check("weitzenbock_eigen_lemma", "<W^T s,s> = sum lambda_a |Theta_a s|^2",
                            worst, tol, 1))
    return rep


# -- suites -------------------------------------------------------------------------

def _geo(s, points):
    return points if isinstance(points, PointGeometry) else PointGeometry(s, points)


def nabla_hat_K(geo):
    return geo.cov(geo.K, (CO, CO, CONTRA), "hat")


def identity_suite_connection(s: StatStructure, points, tol=None, symbolic=False) -> SuiteReport:
    geo = _geo(s, points)
    rep = SuiteReport("connection", points=geo.P, tol_override=tol)
    g = geo.g.value
    R, Rb, Rh = (geo.riemann(k).value for k in ("nabla", "bar", "hat"))
    DK = nabla_hat_K(geo).value
    alt = DK - np.swapaxes(DK, 1, 2)
    comm = commutator_KK(geo.K.value)
    lowR, lowRb = geo.lowered(R), geo.lowered(Rb)

    rep.compare("R_and_oR", "g(R(X,Y)Z,W) = -g(Rbar(X,Y)W,Z)", lowR, -np.swapaxes(lowRb, 3, 4))
    rep.compare("from_Nomizu_Sasaki", "R = Rhat + (hatnabla_X K)_Y - (hatnabla_Y K)_X + [K_X,K_Y]",
                R, Rh + alt + comm)
    rep.compare("R+oR", "R + Rbar = 2 Rhat + 2 [K_X,K_Y]", R + Rb, 2 * Rh + 2 * comm)
    rep.compare("R-oR", "R - Rbar = 2 ((hatnabla_X K)_Y - (hatnabla_Y K)_X)", R - Rb, 2 * alt)
    sym = 0.5 * (lowR + np.swapaxes(lowR, 3, 4))
    rep.compare("symmetric_part", "sym_{Z,W} g(R(X,Y)Z,W) = 1/2 g((R-Rbar)(X,Y)Z,W)", sym,
                0.5 * geo.lowered(R - Rb))

    dg = geo.g.parts[1]
    gam, gamb = geo.gamma("nabla").value, geo.gamma("bar").value
    rep.compare("duality", "X g(Y,Z) = g(nabla_X Y,Z) + g(Y, nablabar_X Z)", dg,
                np.einsum("zxyc,zcw->zxyw", gam, g) + np.einsum("zyc,zxwc->zxyw", g, gamb))
    C = geo.C.value
    rep.compare("nabla_g", "nabla g = -2C", geo.cov(geo.g, (CO, CO), "nabla").value, -2 * C)
    rep.compare("onabla_g", "nablabar g = 2C", geo.cov(geo.g, (CO, CO), "bar").value, 2 * C)
    rep.compare("hat_metric", "hatnabla g = 0", geo.cov(geo.g, (CO, CO), "hat").value, 0 * C)
    rep.compare("hat_mean", "hatnabla = (nabla + nablabar)/2", geo.gamma("hat").value, 0.5 * (gam + gamb))
    for name, T in (("R", R), ("oR", Rb), ("hR", Rh)):
        rep.compare(f"bianchi_{name}", "cyclic_{X,Y,Z} T(X,Y)Z = 0", cyclic(T), 0 * T)
        rep.compare(f"skew_{name}", "T(X,Y) = -T(Y,X)", T, -np.swapaxes(T, 1, 2))

    calR = geo.curvature_like(0.5 * (R + Rb))
    tight = 1e-10
    rep.compare("curvature_like_skew_first", "calR(U,Z,X,Y) = -calR(Z,U,X,Y)", calR, -np.swapaxes(calR, 1, 2), tight)
    rep.compare("curvature_like_skew_second", "calR(U,Z,X,Y) = -calR(U,Z,Y,X)", calR, -np.swapaxes(calR, 3, 4), tight)
    rep.compare("curvature_like_pair", "calR(U,Z,X,Y) = calR(X,Y,U,Z)", calR,
                np.einsum("zxyuw->zuwxy", calR), tight)
    rep.compare("curvature_like_bianchi", "cyclic_{Z,X,Y} calR(U,Z,X,Y) = 0",
                np.einsum("zxywu->zuxyw", cyclic(np.einsum("zuxyw->zxywu", calR))), 0 * calR, tight)

    if symbolic:
        for kind, T in (("nabla", R), ("bar", Rb), ("hat", Rh)):
            sym_val = riemann(s, kind).evaluate_batch(geo.points)
            rep.compare(f"riemann_symbolic_{kind}", "symbolic curvature = jet curvature", sym_val, T)
    return rep


def conjugate_symmetry_probe(s: StatStructure, points):
    """(max|R - Rbar|, max asymmetry of hatnabla K): both vanish together."""
    geo = _geo(s, points)
    R, Rb = geo.riemann("nabla").value, geo.riemann("bar").value
    DK = nabla_hat_K(geo).value
    return float(np.abs(R - Rb).max()), float(np.abs(DK - np.swapaxes(DK, 1, 2)).max())


def ricci_suite(s: StatStructure, points, tol=None) -> SuiteReport:
    geo = _geo(s, points)
    rep = SuiteReport("ricci", points=geo.P, tol_override=tol)
    g, gi, K = geo.g.value, geo.ginv.value, geo.K.value
    Ric, Ricb, Rich = (geo.ricci(k).value for k in ("nabla", "bar", "hat"))
    tau = geo.tau.value
    DK = nabla_hat_K(geo).value
    div_K = np.einsum("zayba->zyb", DK)
    Dtau = geo.cov(geo.tau, (CO,), "hat").value
    tauK = np.einsum("zybc,zc->zyb", K, tau)
    KK = np.einsum("zybc,zwcb->zyw", K, K)
    rep.compare("Ricci_tensor", "Ric = Rhat_ic + div^hatnabla K - hatnabla tau + tau(K(Y,Z)) - g(K_Y,K_Z)",
                Ric, Rich + div_K - Dtau + tauK - KK)
    rep.compare("Ric+oRic", "Ric + Ricbar = 2 Rhat_ic - 2 g(K_Y,K_Z) + 2 tau(K(Y,Z))",
                Ric + Ricb, 2 * Rich - 2 * KK + 2 * tauK)
    rep.compare("symetria_Ric", "Ric(Y,Z) - Ric(Z,Y) = -dtau(Y,Z)", Ric - np.swapaxes(Ric, 1, 2), -geo.dtau.value)
    rho, rhob, rhoh = geo.scalar("nabla"), geo.scalar("bar"), geo.scalar("hat")
    K2, E2 = geo.K_norm2(), geo.E_norm2()
    rep.compare("scalar_curvatures", "rho = rhobar", rho, rhob)
    rep.compare("theorema_egregium", "rhohat = rho + |K|^2 - |E|^2", rhoh, rho + K2 - E2)
    lowR = geo.lowered(geo.riemann("nabla").value)
    rep.compare("ricci_for_both", "Ricbar(Y,W) = -tr_g g(R(.,Y).,W)", Ricb, -np.einsum("zab,zaybw->zyw", gi, lowR))
    frames = batch_gram_schmidt(g)
    frame_trace = -np.einsum("zja,zjb,zaybw->zyw", frames, frames, lowR)
    rep.compare("ricci_frame_independence", "coordinate trace = orthonormal-frame trace", Ricb, frame_trace, 1e-10)
    if float(np.abs(tau).max()) <= 1e-10:
        # the gap |K|^2 - |E|^2 is a sum of squares only when E = 0
        rep.bound("egregium_gap_nonnegative", "rhohat - rho >= 0, equality iff K = 0", -(rhoh - rho))
        rep.compare("egregium_gap_equals_K2", "rhohat - rho = |K|^2 (trace-free)", rhoh - rho, K2)
    return rep


def metric_weitzenbock_check(s: StatStructure, points, tol=None) -> SuiteReport:
    geo = _geo(s, points)
    rep = SuiteReport("metric", points=geo.P, tol_override=tol)
    g, gi, K = geo.g.value, geo.ginv.value, geo.K.value
    Dg = geo.cov(geo.g, (CO, CO), "nabla")
    D2g = geo.cov(Dg, (CO, CO, CO), "nabla").value
    Dg = Dg.value
    tr = np.einsum("zab,zabxy->zxy", gi, D2g)
    pair = np.einsum("zxab,zycd,zac,zbd->zxy", Dg, Dg, gi, gi)
    Dtau = geo.cov(geo.tau, (CO,), "nabla").value
    Ric, Ricb = geo.ricci("nabla").value, geo.ricci("bar").value
    rep.compare("tr_gnabla_g^2", "tr_g nabla^2 g(X,Y) - g(nabla_X g,nabla_Y g) + 2 nabla tau(X,Y) = -Ric + Ricbar",
                tr - pair + 2 * Dtau, -Ric + Ricb, SECOND_ORDER_TOL)
    Wg = weitzenbock(geo.riemann("nabla").value, g, (CO, CO), gi)
    RicT, RicbT = np.swapaxes(Ric, 1, 2), np.swapaxes(Ricb, 1, 2)
    rep.compare("weitzenbock_metric", "W^R g = Ricbar + Ricbar^T - Ric - Ric^T", Wg, Ricb + RicbT - Ric - RicT)
    rep.compare("weitzenbock_metric_trace", "2 tr nabla^2 g - 2 g(nabla g,nabla g) + 2 nabla tau + 2 nabla tau^T = W^R g",
                2 * tr - 2 * pair + 2 * Dtau + 2 * np.swapaxes(Dtau, 1, 2), Wg, SECOND_ORDER_TOL)
    rep.compare("g(K,K)", "g(nabla_X g, nabla_X g) = 4 g(K_X,K_X)", np.einsum("zxx->zx", pair),
                4 * np.einsum("zxbc,zxcb->zx", K, K))
    if float(np.abs(geo.tau.value).max()) <= 1e-10:
        full = np.einsum("zab,zcd,zabcd->z", gi, gi, D2g)
        norm = np.einsum("zab,zab->z", gi, pair)
        rep.compare("sum_nabla2g", "sum_ij nabla^2 g(e_i,e_i,e_j,e_j) = g(nabla g,nabla g)", full, norm, SECOND_ORDER_TOL)
    return rep


def second_bianchi_check(s: StatStructure, points, tol=None, variant="derivation") -> SuiteReport:
    """Cyclic identity for hatnabla(R + Rbar) against the K_U (Rbar - R) term.

    ``variant="derivation"`` lets K_U act on all four slots of Rbar - R;
    ``"commutator"`` only on the endomorphism part.
    """
    geo = _geo(s, points)
    rep = SuiteReport("bianchi", points=geo.P, tol_override=tol)
    Rj, Rbj = geo.riemann("nabla"), geo.riemann("bar")
    S = Rj + Rbj
    DS = geo.cov(S, CURVATURE_SIG, "hat").value
    lhs = cyclic(DS)
    diff = Rbj.value - Rj.value
    K = geo.K.value
    A = np.swapaxes(K, 2, 3)  # A[z, u, d, c] = K[z, u, c, d], the matrix of K_u
    P, n = geo.P, geo.n
    KD = np.zeros((P, n) + diff.shape[1:])
    for u in range(n):
        KD[:, u] = _derive(A[:, u], diff, variant)
    rhs = cyclic(KD)
    rep.compare("second_bianchi", "cyclic_{U,X,Y} (hatnabla_U (R+Rbar))(X,Y) = cyclic (K_U (Rbar-R))(X,Y)",
                lhs, rhs, SECOND_ORDER_TOL)
    if float(np.abs(diff).max()) <= 1e-10 * (1 + float(np.abs(Rj.value).max())):
        DR = geo.cov(Rj, CURVATURE_SIG, "hat").value
        rep.compare("second_bianchi_hat_R", "R = Rbar implies cyclic hatnabla_U R = 0", cyclic(DR), 0 * DR,
                    SECOND_ORDER_TOL)
    return rep


def _derive(A, T, variant):
    """K_U acting on a batch of (1,3) tensors T[z, x, y, c, d]."""
    if variant == "derivation":
        return batch_derivation(A, T, CURVATURE_SIG)
    # commutator [K_U, T(X,Y)] on the endomorphism slots only
    return np.einsum("zde,zxyce->zxycd", A, T) - np.einsum("zec,zxyed->zxycd", A, T)


def scaled_family_check(s: StatStructure, t, points, tol=None) -> SuiteReport:
    """Curvature of hatnabla + (1+t)K against R + t(2+t)[K_X, K_Y] (valid when R = Rbar)."""
    geo = _geo(s, points)
    scaled = PointGeometry(s.scaled(1.0 + t), geo.points)
    rep = SuiteReport(f"scaled_family_t={t:g}", points=geo.P, tol_override=tol)
    R = geo.riemann("nabla").value
    comm = commutator_KK(geo.K.value)
    rep.compare("scaled_curvature", "Rtilde = R + t(2+t)[K_X,K_Y]", scaled.riemann("nabla").value,
                R + t * (2 + t) * comm)
    return rep


SUITES = {
    "connection": identity_suite_connection,
    "ricci": ricci_suite,
    "metric": metric_weitzenbock_check,
    "bianchi": second_bianchi_check,
}

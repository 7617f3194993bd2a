"""Pointwise verification suites for forms, Laplacians and vector fields."""

from __future__ import annotations

import numpy as np

from . import samples
from .curvature import weitzenbock
from .forms import (K_matrix, codiff_jet, d_connection_jet, d_jet, derivation_matrix_S, function_laplacians,
                    hessian_jet, interior_jet, laplacian_jets, lie_cartan_jet, lie_connection_values, norm2,
                    norm2_jet, rough_laplacian_frame, rough_laplacian_jet)
from .geometry import PointGeometry
from .jets import jeinsum
from .report import SECOND_ORDER_TOL, SuiteReport
from .structure import StatStructure, TensorField
from .tensor import CO, CONTRA, batch_derivation

FORM_TOL = 1e-9
TIGHT = 1e-10


def _geo(s, points):
    return points if isinstance(points, PointGeometry) else PointGeometry(s, points)


def _degrees(n):
    return range(0, min(n, 3) + 1)


def _trace_free(geo):
    return float(np.abs(geo.tau.value).max()) <= 1e-10


def _dtau_closed(geo):
    return float(np.abs(geo.dtau.value).max()) <= 1e-10


def delta_nabla_squared_defect(geo, w, k):
    """sum_i omega(e_i, hatnabla_{e_i} E, ...): what delta^nabla delta^nabla leaves when dtau != 0."""
    DE = geo.cov(geo.E, (CONTRA,), "hat").value
    return np.einsum("zab,zac...,zbc->z...", geo.ginv.value, w.value, DE)


def forms_suite(s: StatStructure, points, tol=None, seed=42) -> SuiteReport:
    geo = _geo(s, points)
    rep = SuiteReport("forms", points=geo.P, tol_override=tol)
    rng = np.random.default_rng(seed)
    n = geo.n
    for k in _degrees(n):
        omega = samples.random_form(rng, n, k)
        w = omega.jet(geo.points, 3 if k >= 1 else 2)
        tag = f"[k={k}]"
        if k < n:
            dw = d_jet(w, k)
            for kind in ("nabla", "bar", "hat"):
                rep.compare(f"d_connection_{kind}{tag}", "d omega via connection = coordinate d omega",
                            d_connection_jet(geo, w, k, kind).value, dw.value, TIGHT)
            if k + 1 < n:
                rep.compare(f"d_squared{tag}", "d d omega = 0", d_jet(dw, k + 1).value, 0 * d_jet(dw, k + 1).value, 1e-12)
        E = geo.E
        if k >= 1:
            hat = codiff_jet(geo, w, k, "hat")
            nab = codiff_jet(geo, w, k, "nabla")
            bar = codiff_jet(geo, w, k, "bar")
            iE = interior_jet(E, w, k)
            rep.compare(f"relation_codifferentials_nabla{tag}", "delta = delta^nabla - iota_E", hat.value,
                        nab.value - iE.value, FORM_TOL)
            rep.compare(f"relation_codifferentials_bar{tag}", "delta = delta^nablabar + iota_E", hat.value,
                        bar.value + iE.value, FORM_TOL)
            KW = _K_derivations(geo, w.value, k)
            lhs = np.einsum("zab,zab...->z...", geo.ginv.value, KW)
            rep.compare(f"lemma_about_K{tag}", "sum_i (K_{e_i} omega)(e_i, ...) = -iota_E omega", lhs, -iE.value, TIGHT)
            if k >= 2:
                DDn = codiff_jet(geo, nab, k - 1, "nabla").value
                defect = delta_nabla_squared_defect(geo, w, k)
                anchor = "delta^nabla delta^nabla = 0"
                if _dtau_closed(geo):
                    rep.compare(f"delta_nabla_squared{tag}", anchor, DDn, 0 * DDn, FORM_TOL)
                else:
                    rep.compare(f"delta_nabla_squared{tag}", anchor, DDn, 0 * DDn, FORM_TOL,
                                note="fails whenever dtau != 0")
                rep.compare(f"delta_nabla_squared_defect{tag}",
                            "delta^nabla delta^nabla omega = sum_i omega(e_i, hatnabla_{e_i} E, ...)", DDn, defect,
                            FORM_TOL)
                iE_delta = interior_jet(E, hat, k - 1).value
                delta_iE = codiff_jet(geo, iE, k - 1, "hat").value
                rep.compare(f"iota_delta_anticommutator{tag}", "iota_E delta + delta iota_E = sum_i omega(e_i, hatnabla_{e_i} E, ...)",
                            iE_delta + delta_iE, defect, FORM_TOL)
                _long_proof(rep, geo, w, k, tag)
        lie_c = lie_cartan_jet(geo, E, w, k).value
        lie_n = lie_connection_values(geo, E, w, (CO,) * k)
        rep.compare(f"lie_E_routes{tag}", "L_E = nabla_E - S_E (Cartan iota_E d + d iota_E)", lie_n, lie_c, FORM_TOL)
        lap, lapn = laplacian_jets(geo, w, k)
        rep.compare(f"relation_laplacians{tag}", "Delta^nabla = Delta - L_E", lapn.value, lap.value - lie_c, FORM_TOL)
    return rep


def _K_derivations(geo, w, k):
    """KW[a, ...] = (K_{e_a} omega)(...), K_{e_a} acting as a derivation."""
    n = geo.n
    A = np.swapaxes(geo.K.value, 2, 3)  # A[z, a, c, b] = K[z, a, b, c]
    out = np.zeros((geo.P, n) + w.shape[1:])
    for a in range(n):
        out[:, a] = batch_derivation(A[:, a], w, (CO,) * k)
    return out


def _long_proof(rep, geo, w, k, tag):
    """sum_j alpha(e_j, X_1, .., K_{e_j} X_l, .., X_m) = 0 for a (m+1)-form alpha, m = k - 1."""
    m = k - 1
    letters = "cdefgh"[:m]
    K = geo.K.value
    for l in range(m):
        src = letters[:l] + "w" + letters[l + 1:]
        val = np.einsum(f"zab,za{src},zb{letters[l]}w->z{letters}", geo.ginv.value, w.value, K)
        rep.compare(f"in_the_long_proof_l{l + 1}{tag}", "sum_j alpha(e_j, .., K_{e_j} X_l, ..) = 0", val, 0 * val, TIGHT)


def _theorem_terms(geo, w, sig):
    """Everything the Bochner-Weitzenbock identities need for one tensor (values)."""
    gi = geo.ginv.value
    R, Rb = geo.riemann("nabla").value, geo.riemann("bar").value
    Dw = geo.cov(w, sig, "nabla").value
    Dbw = geo.cov(w, sig, "bar").value
    E = geo.E.value
    SE = derivation_matrix_S(geo, geo.E)
    SbE = -derivation_matrix_S(geo, geo.E, "bar")  # matrix of Sbar_{Ebar}, Ebar = -E
    KE = K_matrix(geo, E)
    t = {
        "rough": rough_laplacian_jet(geo, w, sig, "nabla").value,
        "rough_weighted": rough_laplacian_jet(geo, w, sig, "weighted").value,
        "rough_bar": rough_laplacian_jet(geo, w, sig, "bar").value,
        "S_E": batch_derivation(SE, w.value, sig),
        "Sbar_Ebar": batch_derivation(SbE, w.value, sig),
        "K_E": batch_derivation(KE, w.value, sig),
        "nabla_E": np.einsum("za,za...->z...", E, Dw),
        "nablabar_E": np.einsum("za,za...->z...", E, Dbw),
        "Dw": Dw,
        "Dbw": Dbw,
    }
    if all(v == CO for v in sig):
        t["W_R"] = weitzenbock(R, w.value, sig, gi)
        t["W_Rbar"] = weitzenbock(Rb, w.value, sig, gi)
    return t


def bochner_weitzenbock_suite(s: StatStructure, points, tol=None, seed=42, tensor_signatures=None) -> SuiteReport:
    geo = _geo(s, points)
    rep = SuiteReport("bw", points=geo.P, tol_override=tol)
    rng = np.random.default_rng(seed)
    n = geo.n
    TOL = SECOND_ORDER_TOL
    trace_free = _trace_free(geo)
    for k in _degrees(n):
        omega = samples.random_form(rng, n, k)
        w = omega.jet(geo.points, 2)
        sig = (CO,) * k
        tag = f"[k={k}]"
        t = _theorem_terms(geo, w, sig)
        lap, lapn = (j.value for j in laplacian_jets(geo, w, k))
        lie = lie_cartan_jet(geo, geo.E, w, k).value
        WR, WRb = t["W_R"], t["W_Rbar"]
        rep.compare(f"main_theorem_i{tag}", "Delta = nabla*nabla + W^R + S_E", lap, t["rough"] + WR + t["S_E"], TOL)
        rep.compare(f"main_theorem_i_lie{tag}", "Delta = nabla*nabla + W^R + nabla_E - L_E", lap,
                    t["rough"] + WR + t["nabla_E"] - lie, TOL)
        rep.compare(f"main_theorem_i_prime{tag}", "Delta^nabla = nabla*nabla + W^R + 2 S_E - nabla_E", lapn,
                    t["rough"] + WR + 2 * t["S_E"] - t["nabla_E"], TOL)
        if s.phi is not None:
            rep.compare(f"main_theorem_ii{tag}", "Delta^nabla = nabla^{*nu} nabla + W^R + 2 S_E", lapn,
                        t["rough_weighted"] + WR + 2 * t["S_E"], TOL)
        if trace_free:
            rep.compare(f"main_theorem_iii{tag}", "Delta = nabla*nabla + W^R (trace-free)", lap, t["rough"] + WR, TOL)
        rep.compare(f"i_for_onabla{tag}", "Delta = nablabar*nablabar + W^Rbar + Sbar_Ebar", lap,
                    t["rough_bar"] + WRb + t["Sbar_Ebar"], TOL)
        rep.compare(f"i_for_onabla_K{tag}", "Delta = nablabar*nablabar + W^Rbar - S_E + 2 K_E", lap,
                    t["rough_bar"] + WRb - t["S_E"] + 2 * t["K_E"], TOL)
        rep.compare(f"rough_frame_route{tag}", "nabla*nabla s = -sum_i nablabar_{e_i}(nabla_{e_i} s)", t["rough"],
                    rough_laplacian_frame(geo, w, sig), TOL)
        rep.compare(f"relation{tag}", "nabla*nabla = nabla^{*nu} nabla + nabla_E", t["rough"],
                    t["rough_weighted"] + t["nabla_E"], FORM_TOL)
        if k == 1:
            Ricb = geo.ricci("bar").value
            sharp = np.einsum("zab,zb->za", geo.ginv.value, w.value)
            rep.compare("Weitzenbock_for_1-forms", "W^R omega(X) = Ricbar(X, omega#)", WR,
                        np.einsum("zxa,za->zx", Ricb, sharp), FORM_TOL)
        _norm_formulas(rep, geo, w, sig, t, tag, forms=(lap, lapn, WR + WRb))
    signatures = tensor_signatures or [(CO, CO), (CONTRA, CO), (CO, CONTRA, CO)][: 2 if n > 2 else 3]
    for sig in signatures:
        fld = samples.random_tensor_field(rng, n, sig)
        w = fld.jet(geo.points, 2)
        _norm_formulas(rep, geo, w, sig, _theorem_terms(geo, w, sig), "[" + ",".join(sig) + "]")
    w = geo.g.truncate(2)
    _norm_formulas(rep, geo, w, (CO, CO), _theorem_terms(geo, w, (CO, CO)), "[g]")
    return rep


def _norm_formulas(rep, geo, w, sig, t, tag, forms=None):
    TOL = SECOND_ORDER_TOL
    f = norm2_jet(geo, w, sig)
    lap_f, lapn_f = function_laplacians(geo, f)
    val = w.value
    inner = lambda a, b: norm2(geo, a, b, sig)
    dn = norm2(geo, t["Dw"], t["Dw"], (CO,) + tuple(sig))
    dbn = norm2(geo, t["Dbw"], t["Dbw"], (CO,) + tuple(sig))
    base = inner(t["rough"], val) + inner(t["rough_bar"], val) - dn - dbn
    rep.compare(f"Delta_s_2{tag}", "Delta|s|^2 = g(nabla*nabla s,s) + g(nablabar*nablabar s,s) - |nabla s|^2 - |nablabar s|^2",
                lap_f, base, TOL)
    rep.compare(f"Delta_nabla_s_2{tag}", "Delta^nabla|s|^2 = (same) - g(nabla_E s,s) - g(nablabar_E s,s)", lapn_f,
                base - inner(t["nabla_E"], val) - inner(t["nablabar_E"], val), TOL)
    if forms is not None:
        lap, lapn, Wsum = forms
        common = -inner(Wsum, val) - dn - dbn
        rep.compare(f"Bochner_Weitzenbock_formula_for_s^2{tag}",
                    "Delta|w|^2 = 2g(Delta w,w) - g(W^{R+Rbar}w,w) - |nabla w|^2 - |nablabar w|^2 - 2g(K_E w,w)",
                    lap_f, 2 * inner(lap, val) + common - 2 * inner(t["K_E"], val), TOL)
        rep.compare(f"Bochner_Weitzenbock_for_s^2_Delta_nabla{tag}",
                    "Delta^nabla|w|^2 = 2g(Delta^nabla w,w) - g(W^{R+Rbar}w,w) - |nabla w|^2 - |nablabar w|^2 - 2g(S_E w,w)",
                    lapn_f, 2 * inner(lapn, val) + common - 2 * inner(t["S_E"], val), TOL)


def vector_field_suite(s: StatStructure, points, tol=None, seed=42) -> SuiteReport:
    geo = _geo(s, points)
    rep = SuiteReport("vector", points=geo.P, tol_override=tol)
    rng = np.random.default_rng(seed)
    n = geo.n
    g, gi = geo.g, geo.ginv
    TOL = SECOND_ORDER_TOL
    trace_free = _trace_free(geo)
    tau = geo.tau.value

    # gradient field X = (df)^#, phi = g(X, X)
    f = samples.random_function(rng, n)
    fj = TensorField(np.array(f, dtype=object), ()).jet(geo.points, 3)
    df = fj.grad()
    X = jeinsum("ab,b->a", gi, df)
    phi = jeinsum("a,a->", X, df)
    lap_phi, _ = function_laplacians(geo, phi)
    DhX = geo.cov(X, (CONTRA,), "hat")
    div_g = DhX.map_tensor(lambda a: np.einsum("zaa->z", a))
    X_div = np.einsum("za,za->z", X.value, div_g.grad().value)
    lhs = lap_phi + 2 * X_div
    Xv = X.value
    ric = {k: np.einsum("zab,za,zb->z", geo.ricci(k).value, Xv, Xv) for k in ("nabla", "bar", "hat")}
    pair = lambda A: norm2(geo, A, A, (CO, CONTRA))
    Dh, Dn, Db = DhX.value, geo.cov(X, (CONTRA,), "nabla").value, geo.cov(X, (CONTRA,), "bar").value
    KX = K_matrix(geo, Xv)
    gKK = np.einsum("zab,zba->z", KX, KX)
    rep.compare("Bochner_hnabla", "Delta phi + 2X(div^{nu_g} X) = -2 Ric_hat(X,X) - 2g(hatnabla X, hatnabla X)",
                lhs, -2 * ric["hat"] - 2 * pair(Dh), TOL)
    if trace_free:
        rep.compare("Bochner_nabla_onabla", "Delta phi + 2X(div X) = -Ric(X,X) - Ricbar(X,X) - g(nabla X,nabla X) - g(nablabar X,nablabar X)",
                    lhs, -ric["nabla"] - ric["bar"] - pair(Dn) - pair(Db), TOL)
        rep.compare("Bochner_hnabla_K", "Delta phi + 2X(div X) = -Ric(X,X) - Ricbar(X,X) - 2g(hatnabla X,hatnabla X) - 2g(K_X,K_X)",
                    lhs, -ric["nabla"] - ric["bar"] - 2 * pair(Dh) - 2 * gKK, TOL)

    # functions and Hessians
    f_lap, f_lapn = function_laplacians(geo, fj)
    H = {k: hessian_jet(geo, fj, k).value for k in ("nabla", "bar", "hat")}
    dfv = df.value
    rep.compare("hessian_K", "Hess^nabla f = Hess^hatnabla f - df(K(.,.))", H["nabla"],
                H["hat"] - np.einsum("zabc,zc->zab", geo.K.value, dfv), TIGHT)
    for k, Hk in H.items():
        rep.compare(f"hessian_symmetric_{k}", "Hess f(X,Y) = Hess f(Y,X)", Hk, np.swapaxes(Hk, 1, 2), TIGHT)
    grad = X
    div_n_grad = geo.cov(grad, (CONTRA,), "nabla").value
    rep.compare("Delta_nabla_f", "Delta^nabla f = -div^nabla grad f", f_lapn, -np.einsum("zaa->z", div_n_grad), FORM_TOL)
    rep.compare("BW_for_functions", "Delta f = -tr_g Hess^nabla f - df(E)", f_lap,
                -np.einsum("zab,zab->z", gi.value, H["nabla"]) - np.einsum("za,za->z", dfv, geo.E.value), FORM_TOL)
    Hb2 = norm2(geo, H["bar"], H["bar"], (CO, CO))
    rep.bound("Schwarz_inequality", "n|Hess^nablabar f|^2 >= |Delta^nabla f|^2", f_lapn ** 2 - n * Hb2, TIGHT)

    # a generic (non-gradient) field
    Y = samples.random_vector_field(rng, n).jet(geo.points, 2)
    Yv = Y.value
    Yflat = jeinsum("ab,b->a", g, Y)
    DnY = geo.cov(Y, (CONTRA,), "nabla")
    M = np.einsum("zuc,zcv->zuv", DnY.value, g.value)
    rep.compare("closed_iff_S_symmetric", "g(V,S_X U) - g(U,S_X V) = dX^flat(U,V)", M - np.swapaxes(M, 1, 2),
                d_jet(Yflat, 1).value, TIGHT)
    trS = np.einsum("zaa->z", DnY.value)
    dY = codiff_jet(geo, Yflat, 1, "hat").value
    rep.compare("divX", "-tr S_X = delta X^flat - iota_E X^flat", -trS, dY - np.einsum("za,za->z", tau, Yv), FORM_TOL)
    rep.compare("divX_bar", "-tr S_X = delta^nablabar X^flat", -trS, codiff_jet(geo, Yflat, 1, "bar").value, FORM_TOL)
    DbYflat = geo.cov(Yflat, (CO,), "bar").value
    rep.compare("nablaX=0_onablaX=0", "g(nabla X,nabla X) = g(nablabar X^flat, nablabar X^flat)",
                norm2(geo, DnY.value, DnY.value, (CO, CONTRA)), norm2(geo, DbYflat, DbYflat, (CO, CO)), TIGHT)
    trSh = np.einsum("zaa->z", geo.cov(Y, (CONTRA,), "hat").value)
    rep.compare("trSXoSX", "tr S_X = tr hatS_X + tau(X)", trS, trSh + np.einsum("za,za->z", tau, Yv), TIGHT)
    div_nu = np.einsum("zaa->z", Y.parts[1]) + np.einsum("za,za->z", Yv, geo.half_log_det_grad)
    rep.compare("divergences", "div^nabla X = div^{nu_g} X + tau(X)", trS, div_nu + np.einsum("za,za->z", tau, Yv), TIGHT)
    DhY = geo.cov(Y, (CONTRA,), "hat").value
    DbY = geo.cov(Y, (CONTRA,), "bar").value
    KY = K_matrix(geo, Yv)
    gKY = np.einsum("zab,zba->z", KY, KY)
    rep.compare("g(nabla,onabla)", "g(nabla X, nablabar X) = g(hatnabla X,hatnabla X) - g(K_X,K_X)",
                norm2(geo, DnY.value, DbY, (CO, CONTRA)), pair(DhY) - gKY, TIGHT)
    rep.compare("g(nabla,nabla)+g(onabla,onabla)", "sum = 2(g(hatnabla X,hatnabla X) + g(K_X,K_X))",
                pair(DnY.value) + pair(DbY), 2 * (pair(DhY) + gKY), TIGHT)

    # trace and divergence identities for every connection
    S = samples.random_tensor_field(rng, n, (CONTRA, CO)).jet(geo.points, 1)
    Z = samples.random_vector_field(rng, n).jet(geo.points, 2)
    Zv = Z.value
    trS_jet = S.map_tensor(lambda a: np.einsum("zaa->z", a))
    for kind in ("hat", "nabla", "bar"):
        DS = geo.cov(S, (CONTRA, CO), kind).value
        rep.compare(f"X_trS_{kind}", "X tr S = tr nabla_X S", np.einsum("za,za->z", Zv, trS_jet.grad().value),
                    np.einsum("za,zacc->z", Zv, DS), TIGHT)
        DY = geo.cov(Y, (CONTRA,), kind)
        DZ = geo.cov(Z, (CONTRA,), kind)
        nablaZY = jeinsum("a,ac->c", Z, DY)
        div_nZY = np.einsum("zaa->z", geo.cov(nablaZY, (CONTRA,), kind).value)
        divY = DY.map_tensor(lambda a: np.einsum("zaa->z", a))
        SY = np.swapaxes(DY.value, 1, 2)
        SZ = np.swapaxes(DZ.value, 1, 2)
        rhs = (np.einsum("zab,za,zb->z", geo.ricci(kind).value, Zv, Yv) + np.einsum("za,za->z", Zv, divY.grad().value)
               + np.einsum("zcb,zbc->z", SY, SZ))
        rep.compare(f"lematRic_{kind}", "div(nabla_X Y) = Ric(X,Y) + X(div Y) + tr(S_Y o S_X)", div_nZY, rhs, FORM_TOL)
    return rep


SUITES = {
    "forms": forms_suite,
    "bw": bochner_weitzenbock_suite,
    "vector": vector_field_suite,
}

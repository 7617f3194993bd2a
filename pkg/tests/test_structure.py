from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codazzi import expr as ex
from codazzi import samples
from codazzi.structure import (StructureError, StructureFormatError, S_field, TensorField, christoffel,
                               covariant_derivative, load, load_file, sample_points, tensors_EK, validate,
                               vector_field)
from codazzi.tensor import CO, CONTRA

STRUCTURES = Path(__file__).resolve().parent.parent / "structures"
seeds = st.integers(min_value=0, max_value=10_000)

HEADER = "dim 2\ncoords u v\n"


def test_load_trivial_file():
    s = load_file(STRUCTURES / "trivial.sgs")
    assert s.name == "trivial" and s.is_periodic
    assert s.periods == pytest.approx((2 * np.pi, 2 * np.pi))
    K, E, tau = tensors_EK(s)
    assert all(e is ex.ZERO for e in K.components.ravel())


def test_load_constant_cubic_is_trace_free():
    s = load_file(STRUCTURES / "constK.sgs")
    rep = validate(s)
    assert rep.ok and rep.trace_free and rep.ricci_symmetric
    assert s.C[1, 0, 1] is s.C[1, 1, 0]
    assert ex.evaluate(s.C[2 - 1, 1, 0], [0, 0]) == -0.3


@pytest.mark.parametrize("text, message", [
    (HEADER + "g 2 2 = 1\n", "missing diagonal"),
    (HEADER + "g 1 1 = 1\ng 1 1 = 2\ng 2 2 = 1\n", "duplicate"),
    (HEADER + "g 1 1 = 1\ng 2 2 = 1\nC 1 1 3 = 1\n", "outside"),
    (HEADER + "g 1 1 = 1\ng 2 2 = 1\nfoo 1\n", "unknown key"),
    (HEADER + "g 1 1 = 1\ng 2 2 = (1\n", "line 4"),
    ("coords u v\n", "dim must come first"),
    (HEADER + "period u -1\ng 1 1 = 1\ng 2 2 = 1\n", "positive"),
])
def test_load_errors(text, message):
    with pytest.raises(StructureFormatError, match=message):
        load(text)


def test_dumps_round_trip():
    for s in (samples.random_structure(2), samples.exponential_equiaffine(), samples.constant_C(0.3, 0.1)):
        back = load(s.dumps(), s.name)
        pts = sample_points(s, 5, seed=3)
        for a, b in ((s.metric_field, back.metric_field), (s.cubic_field, back.cubic_field),
                     (s.phi_field, back.phi_field)):
            assert np.array_equal(a.evaluate_batch(pts), b.evaluate_batch(pts))
        assert back.periods == s.periods


def test_christoffel_examples():
    assert all(e is ex.ZERO for e in christoffel(samples.trivial(), "hat").components.ravel())
    gam = christoffel(samples.polar_metric(), "hat")
    p = [1.7, 0.2]
    vals = gam.evaluate(p).components
    assert vals[1, 1, 0] == pytest.approx(-1.7, abs=1e-15)
    assert vals[0, 1, 1] == pytest.approx(1 / 1.7, abs=1e-15)
    s = samples.constant_C(0.3, 0.1)
    G = christoffel(s, "nabla").evaluate([0.1, 0.2]).components
    C = s.cubic_field.evaluate([0.1, 0.2]).components
    assert np.allclose(G, C, atol=0)


def test_polar_christoffel_against_geodesic_finite_difference():
    # straight line x = (1, t) in Cartesian coordinates expressed in polar coordinates is a geodesic
    s = samples.polar_metric()
    gam = christoffel(s, "hat")

    def polar(t):
        return np.array([np.hypot(1.0, t), np.arctan2(t, 1.0)])

    t, h = 0.4, 1e-4
    x0, xp, xm = polar(t), polar(t + h), polar(t - h)
    vel = (xp - xm) / (2 * h)
    acc = (xp - 2 * x0 + xm) / h ** 2
    G = gam.evaluate(x0).components
    residual = acc + np.einsum("abc,a,b->c", G, vel, vel)
    assert np.abs(residual).max() < 1e-6


def test_nabla_and_bar_average_to_levi_civita():
    s = samples.random_structure(7)
    pts = sample_points(s, 6, seed=1)
    hat, nab, bar = (christoffel(s, k).evaluate_batch(pts) for k in ("hat", "nabla", "bar"))
    assert np.abs(hat - 0.5 * (nab + bar)).max() < 1e-14
    assert np.abs(hat - np.swapaxes(hat, 1, 2)).max() < 1e-14


def test_EK_examples():
    s = samples.constant_C()
    K, E, tau = tensors_EK(s)
    assert np.abs(E.evaluate([0.3, 0.4]).components).max() == 0.0
    s = samples.single_cubic(0.8)
    K, E, tau = tensors_EK(s)
    assert np.allclose(E.evaluate([0, 0]).components, [0.8, 0])
    assert np.allclose(tau.evaluate([0, 0]).components, [0.8, 0])


def test_S_field_examples():
    s = samples.trivial()
    X = vector_field(s, ["1", "0"])
    assert np.abs(S_field(s, X).evaluate([0.2, 0.3]).components).max() == 0.0
    with pytest.raises(ValueError):
        S_field(s, TensorField(np.array([ex.ONE, ex.ZERO], dtype=object), (CO,)))


def test_validate_examples():
    assert validate(samples.trivial()).ok
    nonspd = load_file(STRUCTURES / "nonspd.sgs")
    rep = validate(nonspd)
    assert not rep.ok and all(v.point[0] <= 0 for v in rep.violations if v.check == "spd")
    rep = validate(samples.single_cubic(ex.var(1)))
    assert rep.ok and not rep.ricci_symmetric
    rep = validate(samples.exponential_equiaffine())
    assert rep.ok and rep.equiaffine and not rep.trace_free


def test_validate_rejects_inconsistent_weight():
    s = samples.single_cubic(1.0).with_cubic({(0, 0, 0): ex.ONE}, phi=ex.exp(2 * ex.var(0)))
    rep = validate(s)
    assert not rep.ok and not rep.equiaffine
    assert any(v.check == "equiaffine" for v in rep.violations)


def test_structure_construction_errors():
    with pytest.raises(StructureError):
        samples.StatStructure(2, ("u", "v"), {(0, 0): ex.ONE}, {})
    with pytest.raises(StructureError):
        samples.StatStructure(2, ("u", "v"), {(0, 0): ex.ONE, (1, 1): ex.var(2)}, {})


def test_periodicity_check():
    from codazzi.structure import check_periodic
    assert check_periodic(samples.random_structure(1)) < 1e-12
    with pytest.raises(StructureError):
        check_periodic(load_file(STRUCTURES / "aperiodic.sgs"))
    with pytest.raises(StructureError):
        check_periodic(samples.sphere_chart())


@settings(max_examples=12, deadline=None)
@given(seeds)
def test_covariant_derivatives_of_metric(seed):
    s = samples.random_structure(seed)
    pts = sample_points(s, 3, seed=seed)
    C = s.cubic_field.evaluate_batch(pts)
    for kind, sign in (("hat", 0.0), ("nabla", -2.0), ("bar", 2.0)):
        Dg = covariant_derivative(s, kind, s.metric_field).evaluate_batch(pts)
        assert np.abs(Dg - sign * C).max() <= 1e-10


@settings(max_examples=12, deadline=None)
@given(seeds)
def test_duality_of_connections(seed):
    s = samples.random_structure(seed)
    rng = np.random.default_rng(seed)
    Y = samples.random_vector_field(rng, 2)
    Z = samples.random_vector_field(rng, 2)
    pts = sample_points(s, 3, seed=seed)
    geo = s.geometry(pts)
    g = geo.g.value
    Yj, Zj = Y.jet(pts, 1), Z.jet(pts, 1)
    d_gYZ = (np.einsum("zxab,za,zb->zx", geo.g.parts[1], Yj.value, Zj.value)
             + np.einsum("zab,zxa,zb->zx", g, Yj.parts[1], Zj.value)
             + np.einsum("zab,za,zxb->zx", g, Yj.value, Zj.parts[1]))
    DY = geo.cov(Yj, (CONTRA,), "nabla").value
    DZ = geo.cov(Zj, (CONTRA,), "bar").value
    rhs = np.einsum("zab,zxa,zb->zx", g, DY, Zj.value) + np.einsum("zab,za,zxb->zx", g, Yj.value, DZ)
    assert np.abs(d_gYZ - rhs).max() <= 1e-10 * (1 + np.abs(d_gYZ).max())


@settings(max_examples=12, deadline=None)
@given(seeds)
def test_K_is_self_adjoint_and_E_dual_to_tau(seed):
    s = samples.random_structure(seed, n=3 if seed % 2 else 2)
    pts = sample_points(s, 3, seed=seed)
    geo = s.geometry(pts)
    assert validate(s, pts).residuals["K_self_adjoint"] <= 1e-12
    assert np.abs(geo.E_flat.value - geo.tau.value).max() <= 1e-12


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_trace_of_S_and_divergences(seed):
    s = samples.random_structure(seed)
    rng = np.random.default_rng(seed)
    X = samples.random_vector_field(rng, 2)
    pts = sample_points(s, 4, seed=seed)
    geo = s.geometry(pts)
    Xv = X.evaluate_batch(pts)
    trS = np.einsum("zaa->z", S_field(s, X, "nabla").evaluate_batch(pts))
    trS_hat = np.einsum("zaa->z", S_field(s, X, "hat").evaluate_batch(pts))
    tau = np.einsum("za,za->z", geo.tau.value, Xv)
    assert np.abs(trS - trS_hat - tau).max() <= 1e-10 * (1 + np.abs(trS).max())
    # div^{nu_g} X = (1/sqrt det g) d_i (sqrt det g X^i), built symbolically
    root = ex.sqrt(s.det_g)
    div = sum(ex.differentiate(root * X.components[i], i) for i in range(2)) / root
    div_vals = TensorField(np.array(div, dtype=object), ()).evaluate_batch(pts)
    assert np.abs(trS - div_vals - tau).max() <= 1e-10 * (1 + np.abs(trS).max())

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codazzi import curvature as cv
from codazzi import expr as ex
from codazzi import samples
from codazzi.structure import sample_points
from codazzi.tensor import CO, CONTRA, PointTensor, TensorError, gram_schmidt

seeds = st.integers(min_value=0, max_value=10_000)
E1, E2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])


def _pts(s, count=4, seed=0):
    return sample_points(s, count, seed)


def test_trivial_curvatures_vanish():
    s = samples.trivial()
    b = cv.curvature_bundle(s, [0.3, 0.4])
    for T in (b.R, b.R_bar, b.R_hat):
        assert np.abs(T.components).max() == 0.0
    assert cv.sectional_nabla(s, [0, 0], E1, E2) == 0.0
    assert np.abs(cv.curvature_operator(s, [0, 0]).matrix).max() == 0.0
    for suite in cv.SUITES.values():
        rep = suite(s, _pts(s))
        assert rep.passed and rep.worst() == 0.0


def test_constant_cubic_oracles():
    s = samples.constant_C(0.3, 0.0)
    for p in _pts(s, 5):
        b = cv.curvature_bundle(s, p)
        assert b.rho == pytest.approx(-0.36, abs=1e-14)
        assert b.rho_hat == pytest.approx(0.0, abs=1e-14)
        lowR = np.einsum("abcd,de->abce", b.R.components, np.eye(2))
        assert lowR[0, 1, 1, 0] == pytest.approx(-0.18, abs=1e-14)
        assert cv.sectional_nabla(s, p, E1, E2) == pytest.approx(-0.18, abs=1e-14)
        assert cv.sectional_nabla(s, p, [1.0, 2.0], [-0.5, 0.3]) == pytest.approx(-0.18, abs=1e-14)
        assert cv.sectional_nabla(s, p, E1, E2, normalization="sum") == pytest.approx(-0.36, abs=1e-14)
        op = cv.curvature_operator(s, p)
        assert op.eigenvalues == pytest.approx([-0.36], abs=1e-14)
        assert not op.nonnegative
    geo = s.geometry(_pts(s))
    assert np.allclose(geo.K_norm2(), 0.36) and np.allclose(geo.E_norm2(), 0.0)


def test_constant_cubic_general_b():
    a, b = 0.2, 0.25
    s = samples.constant_C(a, b)
    assert cv.sectional_nabla(s, [0.1, 0.7], E1, E2) == pytest.approx(-2 * (a * a + b * b), abs=1e-14)


def test_sphere_curvature():
    s = samples.sphere_chart()
    for p in sample_points(s, 4, 0, samples.SPHERE_BOX):
        assert cv.sectional_nabla(s, p, E1, E2) == pytest.approx(1.0, abs=1e-12)
        op = cv.curvature_operator(s, p)
        assert op.positive and op.eigenvalues == pytest.approx([2.0], abs=1e-12)


def test_degenerate_plane():
    with pytest.raises(cv.DegeneratePlaneError):
        cv.sectional_nabla(samples.trivial(), [0, 0], E1, 2 * E1)
    with pytest.raises(ValueError):
        cv.sectional_nabla(samples.trivial(), [0, 0], E1, E2, normalization="quarter")


def test_equivalence_probe_on_constant_cubic():
    d_R, d_K = cv.conjugate_symmetry_probe(samples.constant_C(), _pts(samples.constant_C()))
    assert d_R < 1e-14 and d_K < 1e-14
    d_R, d_K = cv.conjugate_symmetry_probe(samples.single_cubic(ex.var(1)), _pts(samples.trivial()))
    assert d_R > 1e-3 and d_K > 1e-3


def test_weitzenbock_examples():
    s = samples.constant_C()
    b = cv.curvature_bundle(s, [0.2, 0.1])
    du = PointTensor.covariant([1.0, 0.0])
    W = cv.weitzenbock_apply(b.R, du, np.eye(2))
    assert np.allclose(W.components, [-0.18, 0.0], atol=1e-14)
    zeroT = PointTensor(np.zeros((2,) * 4), cv.CURVATURE_SIG)
    assert np.abs(cv.weitzenbock_apply(zeroT, du, np.eye(2)).components).max() == 0.0
    assert cv.weitzenbock_apply(b.R, PointTensor.covariant(2.0), np.eye(2)).components == 0.0
    with pytest.raises(TensorError):
        cv.weitzenbock_apply(b.R, PointTensor.vector([1.0, 0.0]), np.eye(2))


def test_weitzenbock_frame_independence():
    s = samples.random_structure(11, n=3)
    p = _pts(s, 1)[0]
    geo = s.geometry(p[None])
    T = geo.riemann("nabla").value[0]
    g = geo.g.value[0]
    rng = np.random.default_rng(0)
    arr = rng.standard_normal((3, 3))
    coordinate = cv.weitzenbock(T[None], arr[None], (CO, CO), geo.ginv.value)[0]
    other = gram_schmidt(g, start=rng.standard_normal((3, 3))).vectors
    assert np.allclose(cv.weitzenbock_frame(T, arr, (CO, CO), other), coordinate, atol=1e-12)


def test_weitzenbock_spectral_identity_examples():
    rng = np.random.default_rng(2)
    rep = cv.weitzenbock_spectral_identity(samples.constant_C(), [0.0, 0.0], [np.array([1.0, 0.0])])
    assert rep.passed
    rep = cv.weitzenbock_spectral_identity(samples.trivial(), [0.0, 0.0], [np.array([1.0, 0.0])])
    assert rep.worst() == 0.0
    for seed in range(3):
        s = samples.random_structure(seed, n=3)
        tensors = [rng.standard_normal((3,) * k) for k in (1, 2, 3) for _ in range(7)]
        rep = cv.weitzenbock_spectral_identity(s, _pts(s, 1, seed)[0], tensors)
        assert rep.passed, rep.checks


def test_second_bianchi_is_non_vacuous_in_three_dimensions():
    s = samples.random_structure(4, n=3)
    geo = s.geometry(_pts(s))
    assert float(np.abs(geo.dtau.value).max()) > 1e-3
    DS = geo.cov(geo.riemann("nabla") + geo.riemann("bar"), cv.CURVATURE_SIG, "hat").value
    assert float(np.abs(cv.cyclic(DS)).max()) > 1e-2
    for variant in ("derivation", "commutator"):
        assert cv.second_bianchi_check(s, geo, variant=variant).passed


def test_second_bianchi_with_equal_curvatures():
    rep = cv.second_bianchi_check(samples.constant_C(), _pts(samples.constant_C()))
    assert [c.id for c in rep.checks] == ["second_bianchi", "second_bianchi_hat_R"] and rep.passed


def test_metric_sum_fixture_value():
    s = samples.constant_C()
    rep = cv.metric_weitzenbock_check(s, _pts(s))
    assert rep.passed and "sum_nabla2g" in [c.id for c in rep.checks]
    geo = s.geometry(_pts(s))
    Dg = geo.cov(geo.g, (CO, CO), "nabla").value
    assert np.allclose(np.einsum("zabc,zabc->z", Dg, Dg), 1.44)


def test_egregium_gap_is_not_signed_without_trace_free():
    s = samples.single_cubic(2.0).with_cubic({(0, 0, 0): ex.const(2.0), (0, 1, 1): ex.ONE})
    geo = s.geometry(_pts(s, 1))
    assert (geo.K_norm2() - geo.E_norm2())[0] == pytest.approx(-2.0)
    rep = cv.ricci_suite(s, geo)
    assert rep.passed and "egregium_gap_nonnegative" not in [c.id for c in rep.checks]


def test_ricci_asymmetry_example():
    rep = cv.ricci_suite(samples.single_cubic(ex.var(1)), _pts(samples.trivial()))
    assert rep.passed
    assert samples.single_cubic(ex.var(1)).geometry(_pts(samples.trivial())).dtau.value[:, 0, 1] == pytest.approx(-1.0)


def test_symbolic_riemann_route():
    s = samples.random_structure(5)
    rep = cv.identity_suite_connection(s, _pts(s, 3), symbolic=True)
    assert rep.passed and any(c.id.startswith("riemann_symbolic") for c in rep.checks)


@pytest.mark.parametrize("t", [0.5, -1.0, 1.0])
def test_scaled_family(t):
    s = samples.constant_C(0.3, 0.1)
    assert cv.scaled_family_check(s, t, _pts(s)).passed


def test_scaled_sectional_curvature_is_pointwise_constant():
    a, b, amp = 0.3, 0.1, 0.5
    s = samples.scaled_constant_C(a, b, amp)
    values = []
    for p in _pts(s, 6, 3):
        phi = 1 + amp * np.sin(p[0])
        expected = -2 * phi ** 2 * (a * a + b * b)
        for X, Y in ((E1, E2), ([1.0, 1.0], [0.3, -2.0])):
            k = cv.sectional_nabla(s, p, X, Y)
            assert abs(k - expected) <= 1e-8 * (1 + abs(expected))
        values.append(expected)
    assert np.ptp(values) > 1e-2


@settings(max_examples=8, deadline=None)
@given(seeds, st.sampled_from([2, 3]))
def test_identity_suites_on_random_structures(seed, n):
    s = samples.random_structure(seed, n)
    geo = s.geometry(_pts(s, 3, seed))
    for suite in cv.SUITES.values():
        rep = suite(s, geo)
        assert rep.passed, [c for c in rep.checks if not c.passed]


@settings(max_examples=8, deadline=None)
@given(seeds)
def test_trace_free_suites_include_gap_checks(seed):
    s = samples.random_trace_free(seed)
    geo = s.geometry(_pts(s, 3, seed))
    rep = cv.ricci_suite(s, geo)
    assert rep.passed and "egregium_gap_equals_K2" in [c.id for c in rep.checks]
    assert cv.metric_weitzenbock_check(s, geo).passed


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_curvature_like_tensor_symmetries(seed):
    s = samples.random_structure(seed, 3)
    geo = s.geometry(_pts(s, 2, seed))
    T = 0.5 * (geo.riemann("nabla").value + geo.riemann("bar").value)
    calR = geo.curvature_like(T)
    scale = 1 + np.abs(calR).max()
    assert np.abs(calR + np.swapaxes(calR, 1, 2)).max() <= 1e-10 * scale
    assert np.abs(calR + np.swapaxes(calR, 3, 4)).max() <= 1e-10 * scale
    assert np.abs(calR - np.einsum("zabcd->zcdab", calR)).max() <= 1e-10 * scale
    bianchi = calR + np.einsum("zacdb->zabcd", calR) + np.einsum("zadbc->zabcd", calR)
    assert np.abs(bianchi).max() <= 1e-10 * scale

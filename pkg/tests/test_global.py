import math

import numpy as np
import pytest

from codazzi import expr as ex
from codazzi import forms as fm
from codazzi import hodge, samples, torus
from codazzi.forms import FormField
from codazzi.structure import StructureError

FOUR_PI2 = 4 * math.pi ** 2


def _note_value(check, key):
    words = check.note.replace(",", "").split()
    return float(words[words.index(key) + 1])


# -- quadrature -----------------------------------------------------------------------

def test_quadrature_closed_forms():
    s = samples.trivial()
    assert torus.quad_torus(s, "1", 32) == pytest.approx(FOUR_PI2, abs=1e-12)
    assert abs(torus.quad_torus(s, "sin(u)", 32)) <= 1e-12
    assert torus.quad_torus(s, "sin(u)^2", 32) == pytest.approx(2 * math.pi ** 2, abs=1e-10)


def test_quadrature_of_exact_top_form_vanishes():
    s = samples.random_structure(3)
    rng = np.random.default_rng(0)
    trig = [samples.random_trig(rng, 2) for _ in range(2)]
    eta = FormField(2, 1, {(0,): trig[0], (1,): trig[1] * ex.sin(ex.var(0))})
    deta = fm.d(eta)
    # d eta = c du^dv, integrated against the coordinate measure
    val = torus.quad_torus(s, lambda geo: deta.tensor_field().evaluate_batch(geo.points)[:, 0, 1]
                           / np.sqrt(np.linalg.det(geo.g.value)), 48)
    assert abs(val) <= 1e-10


def test_quadrature_rejects_aperiodic():
    with pytest.raises(StructureError):
        torus.quad_torus(samples.single_cubic(ex.var(0)), "1", 8)


def test_weighted_density_uses_phi():
    s = samples.random_equiaffine(2)
    q = torus.TorusQuadrature(s, 16)
    ratio = q.density(True) / q.density(False)
    assert np.allclose(ratio, q.sample(s.phi))


# -- integral formulas ------------------------------------------------------------------

def test_basic_trivial_is_classical():
    rep = torus.integral_ric_check(samples.trivial(), ["sin(v) + cos(u)*sin(v)", "cos(u)"], 32)
    assert rep.passed and all(c.residual <= 1e-6 for c in rep.checks)


@pytest.mark.parametrize("make", [lambda: samples.constant_C(0.3, 0.0), lambda: samples.random_trace_free(4),
                                  lambda: samples.random_equiaffine(5)])
def test_integral_formulas_on_parallel_volumes(make):
    s = make()
    for rep in (torus.integral_ric_check(s, ["sin(v)", "0"] if s.name == "constK" else ["sin(v)", "cos(u)"], 48),
                torus.ros_integrals(s, N=48, n_theta=32), torus.um_ricci_check(s, 48, 32),
                torus.nabla2g_um_check(s, 48, 32), torus.lichnerowicz_integral(s, N=48)):
        assert rep.passed, [(c.id, c.residual) for c in rep.checks]


def test_basic_needs_parallel_volume():
    s = samples.random_structure(5)
    with pytest.raises(StructureError):
        torus.integral_ric_check(s, ["sin(v)", "cos(u)"], 16)
    with pytest.raises(StructureError):
        torus.lichnerowicz_integral(s, N=16)
    assert torus.ros_integrals(s, N=32, n_theta=16).passed
    assert torus.um_ricci_check(s, 32, 16).passed


def test_nabla2g_constant_cubic_value():
    rep = torus.nabla2g_um_check(samples.constant_C(0.3, 0.0), 16, 32)
    # |K(U, U)|^2 = 0.09 on every unit vector
    oracle = 6 * 0.09 * 2 * math.pi * FOUR_PI2
    c = rep.checks[0]
    assert c.passed
    assert _note_value(c, "lhs") == pytest.approx(oracle, rel=1e-6)


def test_ros_constant_field_vanishes_identically():
    s = samples.trivial()
    comps = np.empty((2, 2), dtype=object)
    comps[:] = [[ex.ONE, ex.const(2.0)], [ex.const(2.0), ex.ZERO]]
    from codazzi.structure import TensorField
    from codazzi.tensor import CO
    rep = torus.ros_integrals(s, TensorField(comps, (CO, CO)), N=8, n_theta=8)
    assert rep.checks[0].residual == 0.0 and rep.checks[1].residual == 0.0


def test_unit_bundle_needs_surface():
    with pytest.raises(ValueError):
        torus.um_ricci_check(samples.random_trace_free(1, n=3), 4, 4)


def test_ricci_lower_bound_constant_cubic():
    q = torus.TorusQuadrature(samples.constant_C(0.3, 0.0), 8)
    assert torus.ricci_lower_bound(q.geo) == pytest.approx(-0.18, abs=1e-14)


# -- discrete complex -------------------------------------------------------------------

def test_complex_shapes_and_masses():
    cx = hodge.build_complex(samples.trivial(), 8)
    assert cx.d0.shape == (128, 64) and cx.d1.shape == (64, 128)
    assert np.abs(cx.d1 @ cx.d0).max() <= 1e-14
    assert np.allclose(cx.masses[0], FOUR_PI2 / 64 * np.eye(64), rtol=0, atol=1e-15)
    for M in cx.masses:
        assert np.allclose(M, M.T) and np.linalg.eigvalsh(M).min() > 0


@pytest.mark.parametrize("make", [lambda: samples.constant_C(0.3, 0.1), lambda: samples.random_equiaffine(6)])
def test_adjointness(make):
    cx = hodge.build_complex(make(), 10)
    rng = np.random.default_rng(1)
    for k in (1, 2):
        a, b = rng.standard_normal(cx.sizes[k - 1]), rng.standard_normal(cx.sizes[k])
        lhs = cx.inner(k, cx.d(k - 1) @ a, b)
        rhs = cx.inner(k - 1, a, cx.codifferential(k) @ b)
        assert abs(lhs - rhs) <= 1e-12 * (1 + abs(lhs))


def test_flat_fourier_symbol():
    cx = hodge.build_complex(samples.trivial(), 12)
    h = 2 * math.pi / 12
    w = hodge.spectrum(cx, 0)
    assert np.abs(w - hodge.fourier_symbol(12, 12, h, h)).max() <= 1e-10
    assert w[0] == pytest.approx(0.0, abs=1e-10)
    assert np.allclose(w[1:5], w[1], rtol=1e-10) and w[1] == pytest.approx(1.0, rel=0.05)


def test_flat_one_forms_two_zero_modes():
    cx = hodge.build_complex(samples.trivial(), 12)
    w = hodge.spectrum(cx, 1, 3)
    assert abs(w[0]) <= 1e-10 and abs(w[1]) <= 1e-10 and w[2] > 0.5


@pytest.mark.parametrize("make", [samples.trivial, lambda: samples.constant_C(0.3, 0.0),
                                  lambda: samples.random_trace_free(7), lambda: samples.random_equiaffine(8)])
def test_harmonic_dimensions_match_betti(make):
    cx = hodge.build_complex(make(), 12)
    rep = hodge.hodge_suite(cx)
    assert rep.passed, [(c.id, c.note) for c in rep.checks if not c.passed]
    dims = tuple(hodge.harmonic_dimension(cx, k).dimension for k in range(3))
    assert dims == hodge.TORUS_BETTI


def test_weight_is_used_for_equiaffine():
    s = samples.random_equiaffine(8)
    assert hodge.build_complex(s, 6).weighted
    with pytest.raises(StructureError):
        hodge.build_complex(samples.random_structure(8), 6)
    with pytest.raises(StructureError):
        hodge.build_complex(samples.single_cubic(ex.var(0)), 6)


def test_codifferential_first_order_consistency():
    s = samples.random_equiaffine(4)
    omega = FormField.parse(2, 1, {(0,): "sin(u+v)", (1,): "cos(2*u)"}, ("u", "v"))
    coarse = hodge.codifferential_consistency(s, omega, 16)
    fine = hodge.codifferential_consistency(s, omega, 32)
    assert 1.7 <= coarse / fine <= 2.3


def test_jacobi_and_lapack_agree():
    cx = hodge.build_complex(samples.random_trace_free(2), 8)
    a = hodge.spectrum(cx, 1, method="jacobi")
    b = hodge.spectrum(cx, 1, method="lapack")
    assert np.abs(a - b).max() <= 1e-9 * max(1.0, np.abs(b).max())


def test_spectrum_size_limit_and_csv():
    cx = hodge.build_complex(samples.trivial(), 4)
    text = hodge.spectrum_csv(cx, [0, 2], count=3)
    lines = text.strip().splitlines()
    assert lines[0] == "degree,index,eigenvalue" and len(lines) == 7
    assert lines[1].startswith("0,0,")
    big = hodge.build_complex(samples.trivial(), 46)
    with pytest.raises(hodge.SpectrumSizeError):
        hodge.spectrum(big, 1)


def test_lichnerowicz_check_constant_cubic():
    rep = hodge.lichnerowicz_check(samples.constant_C(0.3, 0.0), N=12, quad_N=32)
    assert rep.passed
    c = [c for c in rep.checks if c.id == "lichnerowicz_inequality"][0]
    assert _note_value(c, "k") == pytest.approx(-0.18, abs=1e-12)
    assert _note_value(c, "lambda_1") > 0.9
    rep = hodge.lichnerowicz_check(samples.trivial(), N=12, quad_N=16)
    assert rep.passed

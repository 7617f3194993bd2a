import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codazzi import expr as ex
from codazzi.expr import ExprDomainError, ExprSyntaxError, UnknownIdentifierError, parse

from conftest import random_expr

UV = ("u", "v")


def test_parse_precedence_and_shape():
    e = parse("1 + 0.2*sin(u)", UV)
    assert e.kind == "add"
    one, prod = e.args
    assert one.is_const and one.value == 1.0
    assert prod.kind == "mul" and prod.args[1].kind == "sin"
    neg = parse("-u^2", ("u",))
    assert neg.kind == "neg" and neg.args[0].kind == "pow"
    assert ex.evaluate(neg, [3.0]) == -9.0


def test_power_is_right_associative():
    assert ex.evaluate(parse("2^3^2", UV), [0, 0]) == 2.0 ** 9


def test_unknown_identifier_reports_name_and_offset():
    with pytest.raises(UnknownIdentifierError) as info:
        parse("sin(w)", UV)
    assert info.value.name == "w"
    assert info.value.offset == 4


@pytest.mark.parametrize("text", ["1 +", "(u", "sin u", "u v", "2**3", ""])
def test_syntax_errors(text):
    with pytest.raises(ExprSyntaxError):
        parse(text, UV)


def test_pi_constant():
    assert ex.evaluate(parse("pi", UV), []) == 3.141592653589793


def test_derivative_examples():
    d = ex.differentiate(parse("u*v + sin(u)", UV), 0)
    p = [0.7, -1.3]
    assert ex.evaluate(d, p) == pytest.approx(p[1] + math.cos(p[0]), abs=1e-15)
    assert ex.differentiate(parse("u^2", UV), 1) is ex.ZERO
    d3 = ex.derivative(parse("sin(u)", UV), (0, 0, 0))
    assert ex.evaluate(d3, [0.4, 0]) == pytest.approx(-math.cos(0.4), abs=1e-15)


def test_evaluation_examples_and_domain_errors():
    assert ex.evaluate(parse("1 + 0.2*sin(u)", ("u",)), [0.0]) == 1.0
    with pytest.raises(ExprDomainError):
        ex.evaluate(parse("u/v", UV), [1.0, 0.0])
    with pytest.raises(ExprDomainError):
        ex.evaluate(parse("log(u)", UV), [-1.0, 0.0])
    with pytest.raises(ExprDomainError):
        ex.evaluate(parse("sqrt(u)", UV), [-1.0, 0.0])


def test_light_simplification():
    u = ex.var(0)
    assert u * ex.ONE is u
    assert u * ex.ZERO is ex.ZERO
    assert u + ex.ZERO is u
    assert u ** ex.ONE is u
    assert (ex.const(2) * ex.const(3)).value == 6.0


def test_hash_consing_shares_nodes():
    assert parse("sin(u) + v", UV) is parse("sin(u)+v", UV)


def test_compiled_batch_matches_scalar_evaluation(rng):
    exprs = [random_expr(rng) for _ in range(20)]
    pts = rng.uniform(-2, 2, size=(7, 2))
    batch = ex.compile_exprs(exprs, 2)(pts)
    for i, e in enumerate(exprs):
        for j, p in enumerate(pts):
            assert batch[i, j] == pytest.approx(ex.evaluate(e, p), rel=1e-13, abs=1e-13)


def test_pickle_round_trip():
    import pickle
    e = parse("exp(sin(u)) / (2 + cos(v))", UV)
    assert pickle.loads(pickle.dumps(e)) is e


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_print_parse_round_trip(seed):
    rng = np.random.default_rng(seed)
    e = random_expr(rng)
    back = parse(ex.to_text(e, UV), UV)
    for p in rng.uniform(-3, 3, size=(4, 2)):
        assert ex.evaluate(back, p) == ex.evaluate(e, p)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_derivative_against_central_difference(seed):
    rng = np.random.default_rng(seed)
    e = random_expr(rng)
    p = rng.uniform(-2, 2, size=2)
    h = 1e-4
    for i in range(2):
        step = np.zeros(2)
        step[i] = h
        fd = (ex.evaluate(e, p + step) - ex.evaluate(e, p - step)) / (2 * h)
        exact = ex.evaluate(ex.differentiate(e, i), p)
        assert abs(exact - fd) <= 1e-6 * (1 + abs(exact))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_mixed_partials_commute(seed):
    rng = np.random.default_rng(seed)
    e = random_expr(rng, depth=3)
    p = rng.uniform(-2, 2, size=2)
    a = ex.evaluate(ex.differentiate(ex.differentiate(e, 0), 1), p)
    b = ex.evaluate(ex.differentiate(ex.differentiate(e, 1), 0), p)
    assert abs(a - b) <= 1e-12 * (1 + abs(a))

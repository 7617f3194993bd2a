"""Fixture structures and seeded random generators for tests and the CLI."""

from __future__ import annotations

import math
from itertools import combinations, combinations_with_replacement, product

import numpy as np

from . import expr as ex
from .expr import ZERO, const, var
from .forms import FormField
from .structure import StatStructure, TensorField, _obj_array, _sum
from .tensor import CONTRA

TWO_PI = 2 * math.pi
UV = ("u", "v")
COORDS = ("u", "v", "w", "x", "y", "z")


def _coords(n):
    return COORDS[:n]


def _torus(n):
    return (TWO_PI,) * n


# -- fixtures -------------------------------------------------------------------------

def trivial(n=2, periodic=True) -> StatStructure:
    metric = {(i, i): ex.ONE for i in range(n)}
    return StatStructure(n, _coords(n), metric, {}, _torus(n) if periodic else None, name="trivial")


def constant_C(a=0.3, b=0.0) -> StatStructure:
    """Flat torus with the constant trace-free cubic form C111 = a, C122 = -a, C112 = b, C222 = -b."""
    cubic = {(0, 0, 0): const(a), (0, 1, 1): const(-a), (0, 0, 1): const(b), (1, 1, 1): const(-b)}
    return StatStructure(2, UV, {(0, 0): ex.ONE, (1, 1): ex.ONE}, cubic, _torus(2), name="constK")


def scaled_constant_C(a=0.3, b=0.0, amplitude=0.5) -> StatStructure:
    """Constant-C structure with the cubic form multiplied by 1 + amplitude*sin(u)."""
    base = constant_C(a, b)
    return base.scaled(1 + amplitude * ex.sin(var(0)), name="scaled_constK")


def sphere_chart() -> StatStructure:
    """Round unit sphere in polar angle / longitude, valid for 0 < u < pi."""
    metric = {(0, 0): ex.ONE, (1, 1): ex.sin(var(0)) ** 2}
    return StatStructure(2, UV, metric, {}, name="sphere")


SPHERE_BOX = [(0.4, 2.7), (-1.0, 1.0)]


def polar_metric() -> StatStructure:
    return StatStructure(2, UV, {(0, 0): ex.ONE, (1, 1): var(0) ** 2}, {}, name="polar")


POLAR_BOX = [(0.5, 2.0), (-1.0, 1.0)]


def single_cubic(value, periodic=False) -> StatStructure:
    """Flat metric with only C111 = value (an Expr or number)."""
    return StatStructure(2, UV, {(0, 0): ex.ONE, (1, 1): ex.ONE}, {(0, 0, 0): ex.as_expr(value)},
                         _torus(2) if periodic else None, name="single_cubic")


def exponential_equiaffine() -> StatStructure:
    """phi = exp(u) with C111 = 1, so tau = du = d log phi."""
    return StatStructure(2, UV, {(0, 0): ex.ONE, (1, 1): ex.ONE}, {(0, 0, 0): ex.ONE},
                         phi=ex.exp(var(0)), name="exp_equiaffine")


# -- random generators ------------------------------------------------------------------

def random_trig(rng, n, amplitude=1.0, terms=3, max_wave=2) -> ex.Expr:
    """Periodic trigonometric polynomial with sup norm at most ``amplitude``."""
    weights = rng.random(terms) + 0.1
    weights *= amplitude / weights.sum()
    acc = ZERO
    for w in weights:
        k = rng.integers(-max_wave, max_wave + 1, size=n)
        if not k.any():
            k[rng.integers(n)] = 1
        phase = float(rng.uniform(0, TWO_PI))
        arg = const(phase)
        for i, ki in enumerate(k):
            if ki:
                arg = arg + const(float(ki)) * var(i)
        acc = acc + const(float(w)) * ex.cos(arg)
    return acc


def random_metric(rng, n, perturbation=0.2):
    """g = delta + perturbation * trig, diagonally dominant so SPD everywhere."""
    metric = {}
    off = perturbation / max(n - 1, 1)
    for i in range(n):
        metric[(i, i)] = ex.ONE + random_trig(rng, n, perturbation)
        for j in range(i + 1, n):
            metric[(i, j)] = random_trig(rng, n, off * 0.999)
    return metric


def random_cubic(rng, n, amplitude=0.5):
    return {idx: random_trig(rng, n, amplitude) for idx in combinations_with_replacement(range(n), 3)}


def random_structure(seed, n=2, flat=False, perturbation=0.2, amplitude=0.5, name=None) -> StatStructure:
    rng = np.random.default_rng(seed)
    metric = {(i, i): ex.ONE for i in range(n)} if flat else random_metric(rng, n, perturbation)
    cubic = random_cubic(rng, n, amplitude)
    return StatStructure(n, _coords(n), metric, cubic, _torus(n), name=name or f"random_{seed}")


def _trace_part(s: StatStructure, one_form):
    """Cubic form (t_i g_jk + t_j g_ik + t_k g_ij)/(n+2) from a 1-form t of Exprs."""
    n = s.n
    g = s.g
    out = {}
    for i, j, k in combinations_with_replacement(range(n), 3):
        out[(i, j, k)] = (one_form[i] * g[j, k] + one_form[j] * g[i, k] + one_form[k] * g[i, j]) / float(n + 2)
    return out


def trace_free_projection(s: StatStructure, name=None) -> StatStructure:
    """Remove the trace part of C so that tr_g K = 0 identically."""
    n = s.n
    tau = [_sum(s.ginv[a, b] * s.C[a, b, i] for a in range(n) for b in range(n) if s.C[a, b, i] is not ZERO)
           for i in range(n)]
    trace = _trace_part(s, tau)
    cubic = {idx: s.C[idx] - trace[idx] for idx in trace}
    return s.with_cubic(cubic, name or s.name + "_tf", phi=None)


def random_trace_free(seed, n=2, flat=False, name=None) -> StatStructure:
    return trace_free_projection(random_structure(seed, n, flat), name or f"random_tf_{seed}")


def random_equiaffine(seed, n=2, flat=False, name=None) -> StatStructure:
    """Trace-free part plus the trace part of d psi; then tau = d psi and phi = exp(psi)."""
    rng = np.random.default_rng(seed + 10_000)
    base = random_trace_free(seed, n, flat)
    psi = random_trig(rng, n, 0.4)
    dpsi = [ex.differentiate(psi, i) for i in range(n)]
    trace = _trace_part(base, dpsi)
    cubic = {idx: base.C[idx] + trace[idx] for idx in trace}
    return base.with_cubic(cubic, name or f"random_eq_{seed}", phi=ex.exp(psi))


def random_coefficient(rng, n, amplitude=1.0) -> ex.Expr:
    """Polynomial times trig coefficient of bounded depth."""
    poly = const(float(rng.uniform(-1, 1)))
    for i in range(n):
        c = float(rng.uniform(-0.5, 0.5))
        if abs(c) > 0.05:
            poly = poly + const(c) * var(i)
    return const(amplitude) * poly * random_trig(rng, n, 1.0, terms=2)


def random_form(rng, n, degree) -> FormField:
    return FormField(n, degree, {idx: random_coefficient(rng, n) for idx in combinations(range(n), degree)})


def random_function(rng, n) -> ex.Expr:
    return random_coefficient(rng, n) + random_trig(rng, n, 0.5)


def random_vector_field(rng, n) -> TensorField:
    comps = np.empty(n, dtype=object)
    comps[:] = [random_coefficient(rng, n) for _ in range(n)]
    return TensorField(comps, (CONTRA,))


def random_tensor_field(rng, n, signature) -> TensorField:
    comps = _obj_array((n,) * len(signature))
    for idx in product(range(n), repeat=len(signature)):
        comps[idx] = random_coefficient(rng, n)
    return TensorField(comps, tuple(signature))


def battery(count=100, n=2, start=0):
    """Randomized periodic structures used by the identity battery."""
    return [random_structure(start + i, n) for i in range(count)]

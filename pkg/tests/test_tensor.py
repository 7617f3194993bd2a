import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codazzi import _kernels
from codazzi.tensor import (CO, CONTRA, NotPositiveDefiniteError, PointTensor, TensorError, batch_gram_schmidt,
                            contract, gram_schmidt, inner_product, jacobi_eigen, lambda2_endomorphisms, musical,
                            so_action)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_spd(rng, n):
    A = rng.standard_normal((n, n))
    return A @ A.T + n * np.eye(n)


def random_skew(rng, g):
    n = g.shape[0]
    B = rng.standard_normal((n, n))
    return np.linalg.solve(g, B - B.T)


def test_contract_identity_and_metric_trace():
    assert contract(PointTensor(np.eye(3), (CONTRA, CO)), 0, 1).components == 3.0
    g = random_spd(np.random.default_rng(0), 3)
    assert contract(PointTensor.covariant(g), 0, 1, g).components == pytest.approx(3.0, abs=1e-12)


def test_contract_errors():
    t = PointTensor.covariant(np.eye(2))
    with pytest.raises(TensorError):
        contract(t, 0, 1)
    with pytest.raises(TensorError):
        contract(t, 0, 2, np.eye(2))
    with pytest.raises(TensorError):
        contract(t, 0, 0, np.eye(2))


def test_trace_of_K_for_single_cubic_component():
    c = 0.7
    K = np.zeros((2, 2, 2))
    K[0, 0, 0] = c
    E = contract(PointTensor(K, (CO, CO, CONTRA)), 0, 1, np.eye(2))
    assert np.allclose(E.components, [c, 0.0])
    assert inner_product(np.eye(2), E, E) == pytest.approx(c * c)


def test_norm_of_constant_cubic_form():
    a = 0.3
    C = np.zeros((2, 2, 2))
    for idx, val in {(0, 0, 0): a, (0, 1, 1): -a, (1, 0, 1): -a, (1, 1, 0): -a}.items():
        C[idx] = val
    K = PointTensor(C, (CO, CO, CONTRA))
    assert inner_product(np.eye(2), K, K) == pytest.approx(0.36, abs=1e-15)
    zero = PointTensor(np.zeros((2, 2)), (CO, CO))
    assert inner_product(np.eye(2), zero, zero) == 0.0


def test_musical_examples():
    X = PointTensor.vector([1.0, 0.0])
    assert np.array_equal(musical(np.eye(2), X).components, [1.0, 0.0])
    assert np.array_equal(musical(np.diag([2.0, 1.0]), X).components, [2.0, 0.0])
    with pytest.raises(TensorError):
        musical(np.zeros((2, 2)), X)


def test_gram_schmidt_examples():
    assert np.array_equal(gram_schmidt(np.eye(3)).vectors, np.eye(3))
    assert np.allclose(gram_schmidt(np.diag([4.0, 1.0])).vectors, [[0.5, 0.0], [0.0, 1.0]])
    with pytest.raises(NotPositiveDefiniteError):
        gram_schmidt(np.diag([1.0, -1.0]))


def test_so_action_kills_metric_and_rotates_du():
    rng = np.random.default_rng(3)
    g = random_spd(rng, 3)
    A = random_skew(rng, g)
    assert np.abs(so_action(A, PointTensor.covariant(g), g).components).max() < 1e-12
    # generator e_1 -> e_2, e_2 -> -e_1; covariant action (A.w)(X) = -w(AX)
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    du = PointTensor.covariant([1.0, 0.0])
    assert np.allclose(so_action(J, du, np.eye(2)).components, [0.0, 1.0])
    with pytest.raises(TensorError):
        so_action(np.eye(2), du, np.eye(2))


def test_wedge_generators_annihilate_only_zero_forms():
    # brute force: the map omega -> (A_alpha . omega)_alpha is injective on k-forms, 0 < k < n
    from itertools import combinations
    for n in (2, 3):
        frame = gram_schmidt(np.eye(n))
        gens = lambda2_endomorphisms(frame)
        for k in range(1, n):
            basis = []
            for idx in combinations(range(n), k):
                w = np.zeros((n,) * k)
                from itertools import permutations
                for perm in permutations(range(k)):
                    sign = np.linalg.det(np.eye(k)[list(perm)])
                    w[tuple(idx[p] for p in perm)] = sign
                basis.append(w)
            columns = [np.concatenate([so_action(A, PointTensor.covariant(w)).components.ravel() for A in gens])
                       for w in basis]
            assert np.linalg.matrix_rank(np.array(columns).T) == len(basis)


def test_jacobi_examples():
    w, V = jacobi_eigen(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(w, [1, 2, 3])
    w, V = jacobi_eigen(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(w, [-1, 1])
    assert np.all(V[np.argmax(np.abs(V) > 1e-10, axis=0), range(2)] > 0)
    with pytest.raises(TensorError):
        jacobi_eigen(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_jacobi_backends_agree():
    rng = np.random.default_rng(5)
    B = rng.standard_normal((40, 40))
    S = B + B.T
    w1, V1 = jacobi_eigen(S, backend="numpy")
    w2, V2 = jacobi_eigen(S)
    assert np.allclose(w1, w2, atol=1e-11)
    assert np.allclose(np.abs(V1.T @ V2), np.eye(40), atol=1e-8)
    assert _kernels.BACKEND in ("numba", "numpy")


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(min_value=1, max_value=12))
def test_jacobi_reconstruction(seed, n):
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((n, n))
    S = B + B.T
    w, V = jacobi_eigen(S)
    norm = max(1.0, np.abs(S).max())
    assert np.all(np.diff(w) >= -1e-12)
    assert np.abs(V @ np.diag(w) @ V.T - S).max() <= 1e-9 * norm
    assert np.abs(V.T @ V - np.eye(n)).max() <= 1e-10


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(min_value=1, max_value=5))
def test_gram_schmidt_orthonormal(seed, n):
    g = random_spd(np.random.default_rng(seed), n)
    F = gram_schmidt(g)
    assert np.abs(F.vectors @ g @ F.vectors.T - np.eye(n)).max() <= 1e-12
    assert np.allclose(batch_gram_schmidt(g[None])[0], F.vectors, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(min_value=1, max_value=4))
def test_musical_round_trip_and_frame_trace(seed, n):
    rng = np.random.default_rng(seed)
    g = random_spd(rng, n)
    X = PointTensor.vector(rng.standard_normal(n))
    assert np.allclose(musical(g, musical(g, X)).components, X.components, atol=1e-12)
    s = PointTensor.covariant(rng.standard_normal((n, n)))
    coord = float(contract(s, 0, 1, g).components)
    e = gram_schmidt(g).vectors
    frame = float(sum(e[i] @ s.components @ e[i] for i in range(n)))
    assert abs(coord - frame) <= 1e-10 * (1 + abs(coord))


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(min_value=2, max_value=4), st.integers(min_value=1, max_value=3))
def test_inner_product_and_skew_action(seed, n, rank):
    rng = np.random.default_rng(seed)
    g = random_spd(rng, n)
    sig = tuple(rng.choice([CO, CONTRA], size=rank))
    s = PointTensor(rng.standard_normal((n,) * rank), sig)
    t = PointTensor(rng.standard_normal((n,) * rank), sig)
    assert inner_product(g, s, t) == pytest.approx(inner_product(g, t, s), rel=1e-12, abs=1e-12)
    assert inner_product(g, s, s) > 0
    A = random_skew(rng, g)
    lhs = inner_product(g, so_action(A, s, g), t) + inner_product(g, s, so_action(A, t, g))
    assert abs(lhs) <= 1e-10 * (1 + np.abs(A).max() * np.abs(s.components).max() * np.abs(t.components).max() * 100)


def test_pure_numpy_flag_selects_fallback():
    import os
    import subprocess
    import sys
    env = dict(os.environ, CODAZZI_PURE_NUMPY="1")
    code = "from codazzi import _kernels, hodge; print(_kernels.BACKEND, _kernels.jacobi_numba, hodge.JACOBI_AUTO_LIMIT)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    assert out.split() == ["numpy", "None", "200"]

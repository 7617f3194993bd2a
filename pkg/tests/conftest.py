import numpy as np
import pytest

from codazzi import expr as ex

COORDS = ("u", "v")


def random_expr(rng, depth=4, n=2):
    """Random Expr that is smooth and finite on all of R^n."""
    if depth == 0 or rng.random() < 0.2:
        if rng.random() < 0.6:
            return ex.var(int(rng.integers(n)))
        return ex.const(round(float(rng.uniform(-2, 2)), 3))
    choice = rng.integers(9)
    a = random_expr(rng, depth - 1, n)
    if choice == 0:
        return ex.sin(a)
    if choice == 1:
        return ex.cos(a)
    if choice == 2:
        return ex.exp(ex.sin(a))
    if choice == 3:
        return ex.log(ex.const(2.0) + ex.cos(a))
    if choice == 4:
        return ex.sqrt(ex.const(1.0) + a * a)
    b = random_expr(rng, depth - 1, n)
    if choice == 5:
        return a + b
    if choice == 6:
        return a - b
    if choice == 7:
        return a * b
    return a / (ex.const(2.0) + ex.sin(b))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)

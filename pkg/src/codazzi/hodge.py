"""Discrete de Rham complex on a periodic 2D grid with the phi-weighted adjoint codifferential.

Nodes are numbered p = a * N2 + b for u = a h1, v = b h2. A 1-form stores
(omega_1, omega_2) at each node in two consecutive blocks, a 2-form stores
the single coefficient of du ^ dv. d is the forward difference, so d1 d0 = 0
exactly and the kernel of d0 is the constants.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .forms import FormField, codiff_jet
from .geometry import PointGeometry
from .report import Check, SuiteReport
from .structure import StatStructure, StructureError, validate
from .tensor import jacobi_eigen
from .torus import TorusGrid, ricci_lower_bound, torus_grid

MAX_UNKNOWNS = 4096
ZERO_TOL = 1e-6
GAP_RATIO = 10.0
# above this size LAPACK replaces the Jacobi kernel under method="auto"
JACOBI_AUTO_LIMIT = 300 if _kernels.BACKEND == "numba" else 200


class SpectrumSizeError(ValueError):
    pass


def _shift(N):
    """Cyclic forward shift: (S f)[a] = f[a + 1]."""
    return np.roll(np.eye(N), 1, axis=1)


def difference_matrices(N1, N2, h1, h2):
    """Forward differences along u and v on the row-major node ordering."""
    D1 = (_shift(N1) - np.eye(N1)) / h1
    D2 = (_shift(N2) - np.eye(N2)) / h2
    return np.kron(D1, np.eye(N2)), np.kron(np.eye(N1), D2)


@dataclass
class DiscreteComplex:
    grid: TorusGrid
    d0: np.ndarray
    d1: np.ndarray
    masses: list
    structure_name: str = ""
    weighted: bool = False
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def sizes(self):
        return (self.d0.shape[1], self.d0.shape[0], self.d1.shape[0])

    def d(self, k):
        return (self.d0, self.d1)[k]

    def codifferential(self, k):
        """delta_k = M_{k-1}^{-1} d_{k-1}^T M_k, the exact adjoint of d for the weighted products."""
        if k not in (1, 2):
            raise ValueError("codifferential acts on 1- and 2-forms")
        key = ("delta", k)
        if key not in self._cache:
            M_prev, M_k = self.masses[k - 1], self.masses[k]
            self._cache[key] = np.linalg.solve(M_prev, self.d(k - 1).T @ M_k)
        return self._cache[key]

    def stiffness(self, k):
        """Symmetric A with Delta_k = M_k^{-1} A: d_k^T M_{k+1} d_k + M_k d_{k-1} M_{k-1}^{-1} d_{k-1}^T M_k."""
        A = np.zeros((self.sizes[k],) * 2)
        if k < 2:
            A += self.d(k).T @ self.masses[k + 1] @ self.d(k)
        if k > 0:
            Md = self.masses[k] @ self.d(k - 1)
            A += Md @ np.linalg.solve(self.masses[k - 1], Md.T)
        return 0.5 * (A + A.T)

    def laplacian(self, k):
        """Discrete Delta^nabla on k-forms: delta_{k+1} d_k + d_{k-1} delta_k."""
        return np.linalg.solve(self.masses[k], self.stiffness(k))

    def symmetrized(self, k):
        """L^{-1} A L^{-T} with M_k = L L^T; same spectrum as Delta_k."""
        L = np.linalg.cholesky(self.masses[k])
        X = np.linalg.solve(L, self.stiffness(k))
        S = np.linalg.solve(L, X.T)
        return 0.5 * (S + S.T)

    def inner(self, k, a, b):
        return float(a @ self.masses[k] @ b)


def _node_geometry(s: StatStructure, grid: TorusGrid):
    return PointGeometry(s, grid.points())


def build_complex(s: StatStructure, N, weighted=None) -> DiscreteComplex:
    """Assemble d0, d1 and the mass matrices M0, M1, M2 of the pointwise g-products times sqrt(det g) phi."""
    if s.n != 2:
        raise ValueError("the discrete complex is implemented for n = 2")
    grid = torus_grid(s, N)
    rep = validate(s)
    if not rep.ok:
        raise StructureError("structure failed validation: " + "; ".join(v.detail for v in rep.violations))
    if weighted is None:
        weighted = s.phi is not None
    if weighted and not rep.equiaffine:
        raise StructureError("phi weighting needs tau = d log phi")
    if not weighted and not rep.trace_free:
        raise StructureError("a non-trace-free structure needs an equiaffine weight phi")
    N1, N2 = grid.sizes
    h1, h2 = grid.spacing
    P = N1 * N2
    geo = _node_geometry(s, grid)
    g = geo.g.value
    ginv = geo.ginv.value
    det = np.linalg.det(g)
    w = np.sqrt(det) * grid.cell_volume
    if weighted:
        w = w * geo.phi.value
    Du, Dv = difference_matrices(N1, N2, h1, h2)
    d0 = np.vstack([Du, Dv])
    d1 = np.hstack([-Dv, Du])
    M0 = np.diag(w)
    M1 = np.zeros((2 * P, 2 * P))
    idx = np.arange(P)
    for i in range(2):
        for j in range(2):
            M1[i * P + idx, j * P + idx] = w * ginv[:, i, j]
    M2 = np.diag(w / det)
    return DiscreteComplex(grid, d0, d1, [M0, M1, M2], s.name, weighted)


def spectrum(cx: DiscreteComplex, k, count=None, method="auto") -> np.ndarray:
    """Ascending eigenvalues of the symmetrized Delta_k; the Jacobi kernel or LAPACK."""
    size = cx.sizes[k]
    if size > MAX_UNKNOWNS:
        raise SpectrumSizeError(f"{size} unknowns exceed the dense limit {MAX_UNKNOWNS}")
    if method == "auto":
        method = "jacobi" if size <= JACOBI_AUTO_LIMIT else "lapack"
    key = ("spectrum", k, method)
    if key not in cx._cache:
        S = cx.symmetrized(k)
        if method == "jacobi":
            w, _ = jacobi_eigen(S)
        elif method == "lapack":
            w = np.linalg.eigvalsh(S)
        else:
            raise ValueError("method must be auto, jacobi or lapack")
        cx._cache[key] = np.sort(w)
    w = cx._cache[key]
    return w[:count] if count is not None else w


@dataclass
class HarmonicCount:
    degree: int
    dimension: int
    first_nonzero: float
    gap_ratio: float
    conclusive: bool


def harmonic_dimension(cx: DiscreteComplex, k, tol=ZERO_TOL, method="auto") -> HarmonicCount:
    """Eigenvalues below tol times the first clearly nonzero eigenvalue, with a gap sanity flag."""
    w = spectrum(cx, k, method=method)
    scale = max(float(np.abs(w).max()), 1e-300)
    clear = w[w > math.sqrt(np.finfo(float).eps) * scale]
    first = float(clear[0]) if clear.size else math.inf
    dim = int(np.sum(w < tol * first))
    largest_zero = float(np.abs(w[:dim]).max()) if dim else 0.0
    above = w[dim] if dim < w.size else math.inf
    gap = above / largest_zero if largest_zero > 0 else math.inf
    return HarmonicCount(k, dim, first, gap, bool(gap >= GAP_RATIO))


TORUS_BETTI = (1, 2, 1)


def hodge_suite(cx: DiscreteComplex, seed=0, method="auto") -> SuiteReport:
    """Exact structural checks and harmonic dimensions against the Betti numbers of T^2."""
    rep = SuiteReport("hodge", points=cx.grid.count)
    rng = np.random.default_rng(seed)
    dd = cx.d1 @ cx.d0
    rep.checks.append(Check("d1_d0", "d^2 = 0", float(np.abs(dd).max()), 1e-12, rep.points))
    for k in (1, 2):
        a = rng.standard_normal(cx.sizes[k - 1])
        b = rng.standard_normal(cx.sizes[k])
        lhs = cx.inner(k, cx.d(k - 1) @ a, b)
        rhs = cx.inner(k - 1, a, cx.codifferential(k) @ b)
        scale = 1.0 + abs(lhs) + abs(rhs)
        rep.checks.append(Check(f"adjoint_{k}", "<d a, b> = <a, delta b>", abs(lhs - rhs) / scale, 1e-12, rep.points))
    for k, betti in enumerate(TORUS_BETTI):
        w = spectrum(cx, k, method=method)
        scale = max(1.0, float(np.abs(w).max()))
        rep.checks.append(Check(f"nonnegative_{k}", "Delta^nabla spectrum >= 0", max(0.0, -float(w[0]) / scale),
                                1e-9, rep.points))
        hc = harmonic_dimension(cx, k, method=method)
        note = f"dimension {hc.dimension}, betti {betti}, gap ratio {hc.gap_ratio:.3g}"
        ok = hc.dimension == betti and hc.conclusive
        rep.checks.append(Check(f"harmonic_{k}", "dim of harmonic k-forms = b_k", 0.0 if ok else math.inf,
                                0.0, rep.points, note))
    return rep


def fourier_symbol(N1, N2, h1, h2):
    """Eigenvalues of the flat forward-difference 0-form Laplacian, ascending."""
    k1 = np.arange(N1)
    k2 = np.arange(N2)
    s1 = (2 - 2 * np.cos(2 * np.pi * k1 / N1)) / h1 ** 2
    s2 = (2 - 2 * np.cos(2 * np.pi * k2 / N2)) / h2 ** 2
    return np.sort((s1[:, None] + s2[None, :]).reshape(-1))


def sampled_one_form(omega: FormField, grid: TorusGrid):
    vals = omega.tensor_field().evaluate_batch(grid.points())
    return np.concatenate([vals[:, 0], vals[:, 1]])


def codifferential_consistency(s: StatStructure, omega: FormField, N, weighted=None):
    """Max nodal error between the discrete delta_1 and the symbolic conjugate codifferential."""
    cx = build_complex(s, N, weighted)
    discrete = cx.codifferential(1) @ sampled_one_form(omega, cx.grid)
    geo = _node_geometry(s, cx.grid)
    exact = codiff_jet(geo, omega.jet(geo.points, 1), 1, "bar").value
    return float(np.abs(discrete - exact).max())


def lichnerowicz_check(s: StatStructure, N=24, cx: DiscreteComplex = None, f="sin(u)*cos(v)", quad_N=64,
                       method="auto") -> SuiteReport:
    """Integral Lichnerowicz identity by quadrature and lambda_1 >= n k / (n - 1) for the discrete lambda_1."""
    from .torus import lichnerowicz_integral, TorusQuadrature
    rep = lichnerowicz_integral(s, f, quad_N)
    rep.name = "lichnerowicz"
    cx = cx or build_complex(s, N)
    k_bound = ricci_lower_bound(TorusQuadrature(s, quad_N).geo)
    hc = harmonic_dimension(cx, 0, method=method)
    n = s.n
    violation = n / (n - 1) * k_bound - hc.first_nonzero
    rep.checks.append(Check("lichnerowicz_inequality", "lambda_1 >= n k / (n - 1) when Ric >= k g",
                            max(violation, 0.0), 1e-6, rep.points,
                            f"lambda_1 {hc.first_nonzero:.6g}, k {k_bound:.6g}"))
    return rep


def spectrum_csv(cx: DiscreteComplex, degrees, count=None, method="auto") -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["degree", "index", "eigenvalue"])
    for k in degrees:
        for i, lam in enumerate(spectrum(cx, k, count, method)):
            writer.writerow([k, i, repr(float(lam))])
    return buf.getvalue()

"""Statistical structures on a coordinate chart.

A structure is given by a metric g and a totally symmetric cubic form C; the
difference tensor K is obtained by raising the last index of C, and the two
conjugate connections are the Levi-Civita connection shifted by +K and -K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import permutations, product
from pathlib import Path

import numpy as np

from . import expr as ex
from .expr import Expr, ZERO, ONE, differentiate
from .jets import FieldJetEvaluator
from .tensor import CO, CONTRA, PointTensor, _check_signature


class ConnectionKind(str, Enum):
    HAT = "hat"
    NABLA = "nabla"
    BAR = "bar"


def as_kind(kind) -> ConnectionKind:
    try:
        return ConnectionKind(kind.value if isinstance(kind, ConnectionKind) else kind)
    except ValueError:
        raise ValueError(f"unknown connection kind {kind!r}; expected hat, nabla or bar") from None


class StructureFormatError(ValueError):
    def __init__(self, message, line=None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line


class StructureError(ValueError):
    pass


def _obj_array(shape):
    arr = np.empty(shape, dtype=object)
    arr.fill(ZERO)
    return arr


@dataclass(frozen=True)
class TensorField:
    components: np.ndarray
    signature: tuple
    _evaluators: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        comps = np.array(self.components, dtype=object)
        sig = _check_signature(self.signature)
        if comps.ndim != len(sig):
            raise ValueError("component array rank does not match signature")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "signature", sig)

    @property
    def rank(self):
        return len(self.signature)

    @property
    def dim(self):
        return self.components.shape[0] if self.rank else None

    def jet(self, points, order=0):
        n = np.atleast_2d(points).shape[1]
        key = (order, n)
        ev = self._evaluators.get(key)
        if ev is None:
            ev = FieldJetEvaluator(self.components, n, order)
            self._evaluators[key] = ev
        return ev(points)

    def evaluate_batch(self, points):
        return self.jet(points, 0).value

    def evaluate(self, point) -> PointTensor:
        return PointTensor(self.evaluate_batch(np.asarray(point, dtype=float)[None, :])[0], self.signature)

    def map(self, fn):
        flat = [fn(e) for e in self.components.reshape(-1)]
        out = np.empty(len(flat), dtype=object)
        out[:] = flat
        return TensorField(out.reshape(self.components.shape), self.signature)


def _det(m, rows, cols, memo):
    key = (rows, cols)
    if key in memo:
        return memo[key]
    if len(rows) == 1:
        val = m[rows[0], cols[0]]
    else:
        val = ZERO
        r0 = rows[0]
        for j, c in enumerate(cols):
            if m[r0, c] is ZERO:
                continue
            minor = _det(m, rows[1:], cols[:j] + cols[j + 1:], memo)
            term = m[r0, c] * minor
            val = val + term if j % 2 == 0 else val - term
    memo[key] = val
    return val


def symbolic_inverse(m):
    """Adjugate over determinant; returns (inverse, determinant) as Expr arrays."""
    n = m.shape[0]
    memo = {}
    idx = tuple(range(n))
    det = _det(m, idx, idx, memo)
    inv = _obj_array((n, n))
    for i in range(n):
        for j in range(n):
            rows = tuple(r for r in idx if r != j)
            cols = tuple(c for c in idx if c != i)
            cof = _det(m, rows, cols, memo) if n > 1 else ONE
            if (i + j) % 2:
                cof = -cof
            inv[i, j] = cof / det
    return inv, det


@dataclass(frozen=True)
class StatStructure:
    n: int
    coords: tuple
    metric: dict
    cubic: dict
    periods: tuple = None
    phi: Expr = None
    name: str = "structure"

    def __post_init__(self):
        n = self.n
        coords = tuple(ex.check_coords(self.coords))
        if len(coords) != n:
            raise StructureError(f"expected {n} coordinate names, got {len(coords)}")
        metric = {}
        for (i, j), e in self.metric.items():
            key = (min(i, j), max(i, j))
            if not (0 <= key[0] and key[1] < n):
                raise StructureError("metric index out of range")
            metric[key] = e
        for i in range(n):
            if (i, i) not in metric:
                raise StructureError(f"missing diagonal metric entry g {i + 1} {i + 1}")
        cubic = {}
        for idx, e in self.cubic.items():
            key = tuple(sorted(idx))
            if len(key) != 3 or key[0] < 0 or key[2] >= n:
                raise StructureError("cubic form index out of range")
            if e is not ZERO:
                cubic[key] = e
        for e in list(metric.values()) + list(cubic.values()) + ([self.phi] if self.phi is not None else []):
            bad = [v for v in ex.free_vars(e) if v >= n]
            if bad:
                raise StructureError("expression references a coordinate outside the chart")
        periods = tuple(self.periods) if self.periods is not None else (None,) * n
        if len(periods) != n:
            raise StructureError("one period entry per coordinate expected")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "metric", metric)
        object.__setattr__(self, "cubic", cubic)
        object.__setattr__(self, "periods", periods)

    # -- symbolic components ------------------------------------------------

    @cached_property
    def g(self):
        m = _obj_array((self.n, self.n))
        for (i, j), e in self.metric.items():
            m[i, j] = e
            m[j, i] = e
        return m

    @cached_property
    def C(self):
        c = _obj_array((self.n,) * 3)
        for idx, e in self.cubic.items():
            for perm in set(permutations(idx)):
                c[perm] = e
        return c

    @cached_property
    def _inverse_and_det(self):
        return symbolic_inverse(self.g)

    @property
    def ginv(self):
        return self._inverse_and_det[0]

    @property
    def det_g(self):
        return self._inverse_and_det[1]

    @property
    def is_periodic(self):
        return all(p is not None for p in self.periods)

    @cached_property
    def metric_field(self):
        return TensorField(self.g, (CO, CO))

    @cached_property
    def inverse_metric_field(self):
        return TensorField(self.ginv, (CONTRA, CONTRA))

    @cached_property
    def cubic_field(self):
        return TensorField(self.C, (CO, CO, CO))

    @cached_property
    def phi_field(self):
        return TensorField(np.array(self.phi if self.phi is not None else ONE, dtype=object), ())

    def geometry(self, points):
        from .geometry import PointGeometry
        return PointGeometry(self, points)

    # -- derived structures -------------------------------------------------

    def with_cubic(self, cubic, name=None, phi="keep"):
        return StatStructure(self.n, self.coords, dict(self.metric), cubic, self.periods,
                             self.phi if phi == "keep" else phi, name or self.name)

    def scaled(self, factor, name=None):
        """Same metric, cubic form multiplied by a scalar Expr or number."""
        f = ex.as_expr(factor)
        return self.with_cubic({k: f * e for k, e in self.cubic.items()}, name, phi=None)

    def dumps(self) -> str:
        lines = [f"dim {self.n}", "coords " + " ".join(self.coords)]
        for i, p in enumerate(self.periods):
            if p is not None:
                lines.append(f"period {self.coords[i]} {p!r}")
        for (i, j), e in sorted(self.metric.items()):
            lines.append(f"g {i + 1} {j + 1} = {ex.to_text(e, self.coords)}")
        for (i, j, k), e in sorted(self.cubic.items()):
            lines.append(f"C {i + 1} {j + 1} {k + 1} = {ex.to_text(e, self.coords)}")
        if self.phi is not None:
            lines.append(f"phi = {ex.to_text(self.phi, self.coords)}")
        return "\n".join(lines) + "\n"


# -- file format ---------------------------------------------------------------

def _strip_comment(line):
    pos = line.find("#")
    return line if pos < 0 else line[:pos]


def load(text: str, name: str = "structure") -> StatStructure:
    n = None
    coords = None
    periods = None
    metric = {}
    cubic = {}
    phi = None

    def parse_expr(src, lineno):
        try:
            return ex.parse(src, coords)
        except ex.ExprSyntaxError as exc:
            raise StructureFormatError(str(exc), lineno) from None

    def parse_indices(tokens, count, lineno):
        if len(tokens) != count:
            raise StructureFormatError(f"expected {count} indices", lineno)
        try:
            idx = tuple(int(t) for t in tokens)
        except ValueError:
            raise StructureFormatError("indices must be integers", lineno) from None
        for i in idx:
            if not 1 <= i <= n:
                raise StructureFormatError(f"index {i} outside [1, {n}]", lineno)
        return tuple(sorted(i - 1 for i in idx))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "dim":
            if n is not None:
                raise StructureFormatError("duplicate dim", lineno)
            try:
                n = int(rest)
            except ValueError:
                raise StructureFormatError("dim must be an integer", lineno) from None
            if not 1 <= n <= 6:
                raise StructureFormatError("dim must be between 1 and 6", lineno)
            periods = [None] * n
            continue
        if n is None:
            raise StructureFormatError("dim must come first", lineno)
        if key == "coords":
            if coords is not None:
                raise StructureFormatError("duplicate coords", lineno)
            names = rest.split()
            if len(names) != n:
                raise StructureFormatError(f"expected {n} coordinate names", lineno)
            try:
                coords = ex.check_coords(names)
            except ValueError as exc:
                raise StructureFormatError(str(exc), lineno) from None
            continue
        if coords is None:
            raise StructureFormatError("coords must precede component lines", lineno)
        if key == "period":
            parts = rest.split(None, 1)
            if len(parts) != 2 or parts[0] not in coords:
                raise StructureFormatError("period needs a coordinate name and a length", lineno)
            i = coords.index(parts[0])
            if periods[i] is not None:
                raise StructureFormatError(f"duplicate period for {parts[0]}", lineno)
            try:
                length = ex.evaluate(parse_expr(parts[1], lineno), [0.0] * n)
            except ex.ExprDomainError as exc:
                raise StructureFormatError(str(exc), lineno) from None
            if ex.free_vars(parse_expr(parts[1], lineno)) or not length > 0:
                raise StructureFormatError("period must be a positive constant", lineno)
            periods[i] = length
        elif key in ("g", "C"):
            lhs, eq, rhs = rest.partition("=")
            if not eq:
                raise StructureFormatError("missing '='", lineno)
            idx = parse_indices(lhs.split(), 2 if key == "g" else 3, lineno)
            table = metric if key == "g" else cubic
            if idx in table:
                raise StructureFormatError(f"duplicate entry {key} {' '.join(str(i + 1) for i in idx)}", lineno)
            table[idx] = parse_expr(rhs, lineno)
        elif key.startswith("phi"):
            lhs, eq, rhs = line.partition("=")
            if lhs.strip() != "phi" or not eq:
                raise StructureFormatError("expected 'phi = EXPR'", lineno)
            if phi is not None:
                raise StructureFormatError("duplicate phi", lineno)
            phi = parse_expr(rhs, lineno)
        else:
            raise StructureFormatError(f"unknown key {key!r}", lineno)

    if n is None:
        raise StructureFormatError("missing dim")
    if coords is None:
        raise StructureFormatError("missing coords")
    for i in range(n):
        if (i, i) not in metric:
            raise StructureFormatError(f"missing diagonal metric entry g {i + 1} {i + 1}")
    return StatStructure(n, tuple(coords), metric, cubic, tuple(periods), phi, name)


def load_file(path) -> StatStructure:
    path = Path(path)
    return load(path.read_text(encoding="utf-8"), name=path.stem)


# -- symbolic derived fields -------------------------------------------------------

def _sum(terms):
    acc = ZERO
    for t in terms:
        acc = acc + t
    return acc


def _memo(s, key, build):
    cache = s.__dict__.setdefault("_symbolic_cache", {})
    if key not in cache:
        cache[key] = build()
    return cache[key]


def difference_tensor(s: StatStructure) -> np.ndarray:
    """K[i, j, k] = K^k_ij = g^{kl} C_ijl."""
    def build():
        n = s.n
        K = _obj_array((n,) * 3)
        for i, j, k in product(range(n), repeat=3):
            if i <= j:
                K[i, j, k] = _sum(s.ginv[k, l] * s.C[i, j, l] for l in range(n) if s.C[i, j, l] is not ZERO)
                K[j, i, k] = K[i, j, k]
        return K
    return _memo(s, "K", build)


def christoffel(s: StatStructure, kind="hat") -> TensorField:
    """Gamma[i, j, k] = Gamma^k_ij of the chosen connection."""
    kind = as_kind(kind)

    def build():
        n = s.n
        g, ginv = s.g, s.ginv
        dg = [[[differentiate(g[j, l], i) for l in range(n)] for j in range(n)] for i in range(n)]
        hat = _obj_array((n,) * 3)
        for i, j in product(range(n), repeat=2):
            if i > j:
                continue
            for k in range(n):
                acc = _sum(ginv[k, l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]) for l in range(n))
                hat[i, j, k] = acc * 0.5
                hat[j, i, k] = hat[i, j, k]
        if kind is ConnectionKind.HAT:
            return hat
        K = difference_tensor(s)
        sign = 1.0 if kind is ConnectionKind.NABLA else -1.0
        out = _obj_array((n,) * 3)
        for idx in product(range(n), repeat=3):
            out[idx] = hat[idx] + sign * K[idx] if sign > 0 else hat[idx] - K[idx]
        return out
    return TensorField(_memo(s, ("gamma", kind.value), build), (CO, CO, CONTRA))


def covariant_derivative(s: StatStructure, kind, fld: TensorField) -> TensorField:
    """New covariant slot first: out[a, ...] = (nabla_a field)[...]."""
    gamma = christoffel(s, kind).components
    n = s.n
    comps = fld.components
    sig = fld.signature
    out = _obj_array((n,) + comps.shape)
    for a in range(n):
        for idx in product(range(n), repeat=len(sig)):
            terms = [differentiate(comps[idx], a)]
            for slot, var in enumerate(sig):
                for c in range(n):
                    moved = idx[:slot] + (c,) + idx[slot + 1:]
                    if comps[moved] is ZERO:
                        continue
                    if var == CO:
                        coef = gamma[a, idx[slot], c]
                        if coef is not ZERO:
                            terms.append(-(coef * comps[moved]))
                    else:
                        coef = gamma[a, c, idx[slot]]
                        if coef is not ZERO:
                            terms.append(coef * comps[moved])
            out[(a,) + idx] = _sum(terms)
    return TensorField(out, (CO,) + sig)


def tensors_EK(s: StatStructure):
    """Return (K, E, tau) with tau(X) = tr K_X and E the g-dual vector of tau."""
    K = difference_tensor(s)
    n = s.n
    E = _obj_array((n,))
    tau = _obj_array((n,))
    for k in range(n):
        E[k] = _sum(s.ginv[i, j] * K[i, j, k] for i in range(n) for j in range(n) if K[i, j, k] is not ZERO)
        tau[k] = _sum(K[k, j, j] for j in range(n))
    return (TensorField(K, (CO, CO, CONTRA)), TensorField(E, (CONTRA,)), TensorField(tau, (CO,)))


def S_field(s: StatStructure, X: TensorField, kind="nabla") -> TensorField:
    """S_X Y = nabla_Y X as a matrix: components[k, j] = nabla_j X^k."""
    if X.signature != (CONTRA,):
        raise ValueError("S_X needs a vector field")
    nabla_x = covariant_derivative(s, kind, X).components
    return TensorField(nabla_x.T.copy(), (CONTRA, CO))


def vector_field(s: StatStructure, texts) -> TensorField:
    comps = np.array([ex.parse(t, s.coords) if isinstance(t, str) else ex.as_expr(t) for t in texts], dtype=object)
    return TensorField(comps, (CONTRA,))


# -- sampling and validation -------------------------------------------------------

def default_box(s: StatStructure):
    return [(0.0, p) if p is not None else (-1.0, 1.0) for p in s.periods]


def sample_points(s: StatStructure, count=25, seed=42, box=None):
    rng = np.random.default_rng(seed)
    box = box or default_box(s)
    lo = np.array([b[0] for b in box], dtype=float)
    hi = np.array([b[1] for b in box], dtype=float)
    return lo + (hi - lo) * rng.random((count, s.n))


@dataclass
class Violation:
    check: str
    point: tuple
    detail: str


@dataclass
class ValidationReport:
    structure: str
    points: int
    violations: list
    trace_free: bool
    ricci_symmetric: bool
    equiaffine: bool
    residuals: dict

    @property
    def ok(self):
        return not self.violations


def validate(s: StatStructure, points=None, tol=1e-10) -> ValidationReport:
    """Pointwise sanity checks; mathematical failures are returned, not raised."""
    pts = sample_points(s) if points is None else np.atleast_2d(np.asarray(points, dtype=float))
    violations = []
    residuals = {}
    good = []
    g_vals = None
    try:
        g_vals = s.metric_field.evaluate_batch(pts)
    except ex.ExprDomainError:
        g_vals = None
    for p_i, p in enumerate(pts):
        try:
            gp = g_vals[p_i] if g_vals is not None else s.metric_field.evaluate(p).components
        except ex.ExprDomainError as exc:
            violations.append(Violation("domain", tuple(p), str(exc)))
            continue
        det = float(np.linalg.det(gp))
        evals = np.linalg.eigvalsh(0.5 * (gp + gp.T))
        if det <= 1e-12 or evals[0] <= 0.0:
            violations.append(Violation("spd", tuple(p), f"metric not positive definite (min eigenvalue {evals[0]:.6g}, det {det:.6g})"))
            continue
        good.append(p)
    trace_free = ricci_symmetric = True
    equiaffine = s.phi is not None
    if good:
        from .geometry import PointGeometry
        try:
            geo = PointGeometry(s, np.array(good))
            low = np.einsum("zabe,zec->zabc", geo.K.value[:, :, :, :], geo.g.value)
            residuals["K_self_adjoint"] = float(np.abs(low - np.swapaxes(low, 2, 3)).max())
            tau = geo.tau.value
            residuals["trace"] = float(np.abs(tau).max())
            trace_free = residuals["trace"] <= tol
            dtau = geo.dtau.value
            residuals["dtau"] = float(np.abs(dtau).max())
            ricci_symmetric = residuals["dtau"] <= tol
            if residuals["K_self_adjoint"] > tol:
                violations.append(Violation("self_adjoint", tuple(good[0]), "K_X is not g-self-adjoint"))
            if s.phi is not None:
                phi = geo.phi
                if np.any(phi.value <= 0):
                    bad = int(np.argmax(phi.value <= 0))
                    violations.append(Violation("phi_positive", tuple(good[bad]), "phi must be positive"))
                    equiaffine = False
                else:
                    dlog = phi.parts[1] / phi.value[:, None]
                    err = np.abs(dlog - tau).max(axis=1)
                    residuals["equiaffine"] = float(err.max())
                    if residuals["equiaffine"] > 1e-8:
                        bad = int(np.argmax(err))
                        violations.append(Violation("equiaffine", tuple(good[bad]), f"tau differs from d log phi by {err[bad]:.3g}"))
                        equiaffine = False
        except ex.ExprDomainError as exc:
            violations.append(Violation("domain", (), str(exc)))
    return ValidationReport(s.name, len(pts), violations, trace_free, ricci_symmetric, equiaffine, residuals)


def check_periodic(s: StatStructure, samples=20, seed=7, tol=1e-9):
    """Max deviation |f(u) - f(u + L_i e_i)| over all coefficients; raises if not periodic."""
    if not s.is_periodic:
        raise StructureError("structure has no period for every coordinate")
    pts = sample_points(s, samples, seed)
    fields = [s.metric_field, s.cubic_field, s.phi_field]
    worst = 0.0
    for i, L in enumerate(s.periods):
        shifted = pts.copy()
        shifted[:, i] += L
        for f in fields:
            a = f.evaluate_batch(pts)
            b = f.evaluate_batch(shifted)
            worst = max(worst, float(np.abs(a - b).max()) if a.size else 0.0)
    if worst > tol:
        raise StructureError(f"coefficients are not periodic (deviation {worst:.3g})")
    return worst

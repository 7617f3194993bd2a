"""Hot numeric kernels with a numba path and a pure numpy path.

Set CODAZZI_PURE_NUMPY=1 before import to force the numpy path. The numba
path is also skipped silently when numba is not importable.
"""

import os

import numpy as np

FORCE_NUMPY = os.environ.get("CODAZZI_PURE_NUMPY", "").strip().lower() not in ("", "0", "false", "no")

try:
    if FORCE_NUMPY:
        raise ImportError
    import numba
except ImportError:
    numba = None

BACKEND = "numba" if numba is not None else "numpy"


def _cyclic_jacobi(A0, tol, max_sweeps):
    # threshold cyclic Jacobi; rows of Vt are the eigenvectors
    n = A0.shape[0]
    A = A0.copy()
    Vt = np.eye(n)
    sweeps = 0
    for sweep in range(max_sweeps):
        sweeps = sweep
        off = 0.0
        nrm = 0.0
        for i in range(n):
            nrm += A[i, i] * A[i, i]
            for j in range(i + 1, n):
                off += A[i, j] * A[i, j]
        if off <= tol * tol * (nrm + off):
            break
        thresh = 0.2 * np.sqrt(off) / (n * n) if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0 or abs(apq) <= thresh:
                    continue
                app = A[p, p]
                aqq = A[q, q]
                if sweep > 3 and abs(apq) < 1e-18 * abs(app) and abs(apq) < 1e-18 * abs(aqq):
                    A[p, q] = 0.0
                    A[q, p] = 0.0
                    continue
                theta = (aqq - app) / (2.0 * apq)
                sign = 1.0 if theta >= 0.0 else -1.0
                t = sign / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk - s * aqk
                    A[q, k] = s * apk + c * aqk
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = 0.0
                A[q, p] = 0.0
                for k in range(n):
                    if k != p and k != q:
                        A[k, p] = A[p, k]
                        A[k, q] = A[q, k]
                for k in range(n):
                    vpk = Vt[p, k]
                    vqk = Vt[q, k]
                    Vt[p, k] = c * vpk - s * vqk
                    Vt[q, k] = s * vpk + c * vqk
    evals = np.empty(n)
    for i in range(n):
        evals[i] = A[i, i]
    return evals, Vt, sweeps


def _round_robin_pairs(n):
    # tournament schedule: every pair appears once per sweep, pairs within a round are disjoint
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _parallel_jacobi(A0, tol, max_sweeps):
    # disjoint rotations applied together as one orthogonal similarity per round
    n = A0.shape[0]
    A = np.array(A0, dtype=float)
    V = np.eye(n)
    rounds = _round_robin_pairs(n)
    sweeps = 0
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps):
        sweeps = sweep
        off = float(np.sum(A[iu] ** 2))
        nrm = float(np.sum(np.diag(A) ** 2))
        if off <= tol * tol * (nrm + off):
            break
        for p, q in rounds:
            if p.size == 0:
                continue
            apq = A[p, q]
            active = apq != 0.0
            if not np.any(active):
                continue
            p = p[active]
            q = q[active]
            apq = apq[active]
            theta = (A[q, q] - A[p, p]) / (2.0 * apq)
            sign = np.where(theta >= 0.0, 1.0, -1.0)
            t = sign / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            rp = A[p, :].copy()
            rq = A[q, :].copy()
            A[p, :] = c[:, None] * rp - s[:, None] * rq
            A[q, :] = s[:, None] * rp + c[:, None] * rq
            cp = A[:, p].copy()
            cq = A[:, q].copy()
            A[:, p] = cp * c - cq * s
            A[:, q] = cp * s + cq * c
            A[p, q] = 0.0
            A[q, p] = 0.0
            vp = V[:, p].copy()
            vq = V[:, q].copy()
            V[:, p] = vp * c - vq * s
            V[:, q] = vp * s + vq * c
    return np.diag(A).copy(), V.T.copy(), sweeps


def jacobi_numpy(A, tol=1e-15, max_sweeps=80):
    return _parallel_jacobi(np.ascontiguousarray(A, dtype=float), tol, max_sweeps)


if numba is not None:
    _cyclic_jacobi_jit = numba.njit(cache=True)(_cyclic_jacobi)

    def jacobi_numba(A, tol=1e-15, max_sweeps=80):
        return _cyclic_jacobi_jit(np.ascontiguousarray(A, dtype=float), tol, max_sweeps)

    jacobi_raw = jacobi_numba
else:
    jacobi_numba = None
    jacobi_raw = jacobi_numpy

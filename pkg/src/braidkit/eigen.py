"""Dense eigensolver for general complex matrices.

Eigenvalues come from balancing, Householder reduction to upper Hessenberg form
and single-shift QR iteration with Wilkinson shifts.  Eigenvectors are obtained
afterwards by inverse iteration against the original (unbalanced) matrix.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .errors import ConvergenceError

__all__ = [
    "EigenPair",
    "balance",
    "hessenberg",
    "hessenberg_eigenvalues",
    "eigenvalues",
    "inverse_iteration",
    "eig_general",
    "MAX_DIM",
]

MAX_DIM = 2000
_EPS = np.finfo(float).eps


@dataclass
class EigenPair:
    """One eigenvalue with a unit-norm right eigenvector.

    ``defective`` marks a vector that is (numerically) parallel to the vector of
    another eigenvalue in the same cluster, i.e. the matrix lacks a full
    eigenbasis there.
    """

    eigenvalue: complex
    eigenvector: np.ndarray
    residual: float
    defective: bool = False


def balance(a: np.ndarray, radix: float = 2.0) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal similarity ``D^-1 A D`` that equalizes row and column norms.

    Powers of ``radix`` are used so that the scaling introduces no rounding.
    Returns the balanced matrix and the diagonal of ``D``.
    """
    b = np.array(a, dtype=complex, copy=True)
    n = b.shape[0]
    d = np.ones(n)
    sq = radix * radix
    converged = False
    while not converged:
        converged = True
        for i in range(n):
            mag_col = np.abs(b[:, i])
            mag_row = np.abs(b[i, :])
            c = mag_col[:i].sum() + mag_col[i + 1:].sum()
            r = mag_row[:i].sum() + mag_row[i + 1:].sum()
            if c == 0.0 or r == 0.0:
                continue
            g = r / radix
            f = 1.0
            s = c + r
            while c < g:
                f *= radix
                c *= sq
            g = r * radix
            while c >= g:
                f /= radix
                c /= sq
            if (c + r) / f < 0.95 * s:
                converged = False
                d[i] *= f
                b[:, i] *= f
                b[i, :] /= f
    return b, d


def hessenberg(a: np.ndarray) -> np.ndarray:
    """Upper Hessenberg matrix unitarily similar to ``a`` (Householder reflections)."""
    h = np.array(a, dtype=complex, copy=True)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k]
        tail = np.linalg.norm(x[1:])
        if tail == 0.0:
            continue
        norm_x = np.hypot(abs(x[0]), tail)
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * norm_x
        v /= np.linalg.norm(v)
        h[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v.conj())
        h[k + 2:, k] = 0.0
    return h


def _eig2(a, b, c, d):
    """Eigenvalues of [[a, b], [c, d]] without cancellation in the smaller one."""
    mean = 0.5 * (a + d)
    disc = np.sqrt((0.5 * (a - d)) ** 2 + b * c)
    big = mean + disc if abs(mean + disc) >= abs(mean - disc) else mean - disc
    if big == 0:
        return mean, mean
    det = a * d - b * c
    # det/big is accurate only when det itself did not cancel
    small = det / big
    if abs(det) < 1e-8 * (abs(a * d) + abs(b * c)):
        small = 2.0 * mean - big
    return big, small


def _givens(x: complex, y: complex):
    """(c, s) with c real such that [[c, s], [-conj(s), c]] @ [x, y] = [r, 0]."""
    if y == 0:
        return 1.0, 0.0
    if x == 0:
        return 0.0, 1.0
    ax = abs(x)
    r = np.hypot(ax, abs(y))
    # real divisions keep subnormal inputs from overflowing
    phase = complex(x.real / ax, x.imag / ax)
    yc = np.conj(y)
    return ax / r, phase * complex(yc.real / r, yc.imag / r)


def hessenberg_eigenvalues(h: np.ndarray, max_iter_factor: int = 30) -> np.ndarray:
    """Eigenvalues of an upper Hessenberg matrix by shifted QR iteration.

    Raises :class:`ConvergenceError` (with the eigenvalues found so far in
    ``partial``) after ``max_iter_factor * n`` iterations without convergence.
    """
    h = np.array(h, dtype=complex, copy=True)
    n = h.shape[0]
    out = np.empty(n, dtype=complex)
    if n == 0:
        return out
    hi = n - 1
    total = 0
    since_deflation = 0
    budget = max_iter_factor * n
    while hi >= 0:
        # find the start of the trailing unreduced block
        lo = hi
        while lo > 0:
            scale = abs(h[lo, lo]) + abs(h[lo - 1, lo - 1])
            if scale == 0.0:
                scale = np.abs(h[max(lo - 2, 0): hi + 1, max(lo - 2, 0): hi + 1]).max()
            if abs(h[lo, lo - 1]) <= _EPS * scale:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            out[hi] = h[hi, hi]
            hi -= 1
            since_deflation = 0
            continue
        if lo == hi - 1:
            out[hi - 1], out[hi] = _eig2(h[lo, lo], h[lo, hi], h[hi, lo], h[hi, hi])
            hi -= 2
            since_deflation = 0
            continue
        if total >= budget:
            raise ConvergenceError(
                f"QR iteration did not converge after {total} iterations",
                partial=out[hi + 1:].copy(),
            )
        total += 1
        since_deflation += 1
        if since_deflation % 10 == 0:
            # exceptional shift to break cycles
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1]) * np.exp(1j * since_deflation)
        else:
            e1, e2 = _eig2(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
            mu = e1 if abs(e1 - h[hi, hi]) <= abs(e2 - h[hi, hi]) else e2
        _qr_step(h, lo, hi, mu)
    return out


def _qr_step(h: np.ndarray, lo: int, hi: int, mu: complex) -> None:
    """One explicit shifted QR step ``RQ + mu`` on the window ``h[lo:hi+1, lo:hi+1]``."""
    idx = np.arange(lo, hi + 1)
    h[idx, idx] -= mu
    rotations = []
    for i in range(lo, hi):
        c, s = _givens(h[i, i], h[i + 1, i])
        rotations.append((c, s))
        top = h[i, i:hi + 1].copy()
        bot = h[i + 1, i:hi + 1]
        h[i, i:hi + 1] = c * top + s * bot
        h[i + 1, i:hi + 1] = -np.conj(s) * top + c * bot
        h[i + 1, i] = 0.0
    for i, (c, s) in zip(range(lo, hi), rotations):
        rows = slice(lo, min(i + 2, hi) + 1)
        left = h[rows, i].copy()
        right = h[rows, i + 1]
        h[rows, i] = c * left + np.conj(s) * right
        h[rows, i + 1] = -s * left + c * right
    h[idx, idx] += mu


def eigenvalues(a: np.ndarray, max_iter_factor: int = 30) -> np.ndarray:
    """All eigenvalues of a general complex matrix (balance, Hessenberg, QR)."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if a.shape[0] > MAX_DIM:
        raise ValueError(f"dense eigensolver is capped at dimension {MAX_DIM}, got {a.shape[0]}")
    b, _ = balance(a)
    return hessenberg_eigenvalues(hessenberg(b), max_iter_factor)


def inverse_iteration(a: np.ndarray, lam: complex, start: np.ndarray, steps: int = 3,
                      norm_a: float | None = None) -> np.ndarray:
    """Unit eigenvector estimate for ``lam`` by a few steps of inverse iteration."""
    n = a.shape[0]
    if norm_a is None:
        norm_a = np.linalg.norm(a, 1)
    # nudge off the exact eigenvalue so the factorization stays finite
    delta = max(norm_a, 1e-300) * _EPS * 10
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(a - (lam + delta) * np.eye(n), check_finite=False)
    # an exactly singular shift gets the usual tiny-pivot replacement
    zero = np.flatnonzero(lu.diagonal() == 0)
    lu[zero, zero] = _EPS * max(norm_a, 1e-300)
    lu = (lu, piv)
    x = start / np.linalg.norm(start)
    for _ in range(steps):
        y = lu_solve(lu, x, check_finite=False)
        ny = np.linalg.norm(y)
        if not np.isfinite(ny) or ny == 0.0:
            break
        x = y / ny
    # fix the global phase so the largest component is real positive
    j = int(np.argmax(np.abs(x)))
    return x * (abs(x[j]) / x[j])


def eig_general(matrix, cluster_tol: float = 1e-8, seed: int = 0) -> list[EigenPair]:
    """Complete eigendecomposition of a general complex matrix.

    ``matrix`` may be an ndarray or any object with a ``matrix`` attribute
    (e.g. :class:`braidkit.spectra.RealSpaceMatrix`).  Eigenvalues closer than
    ``cluster_tol * ||M||`` form a cluster; within a cluster inverse iteration
    starts from vectors orthogonal to those already found, and a result that is
    still parallel to an earlier one is flagged ``defective``.
    """
    a = np.asarray(getattr(matrix, "matrix", matrix), dtype=complex)
    lams = eigenvalues(a)
    n = a.shape[0]
    norm_a = np.linalg.norm(a, 1)
    rng = np.random.default_rng(seed)
    pairs: list[EigenPair] = []
    tol = cluster_tol * max(norm_a, 1e-300)
    for i, lam in enumerate(lams):
        cluster = [p for p in pairs if abs(p.eigenvalue - lam) <= tol]
        start = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        for p in cluster:
            start -= (p.eigenvector.conj() @ start) * p.eigenvector
        if np.linalg.norm(start) < 1e-12:
            start = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v = inverse_iteration(a, lam, start, norm_a=norm_a)
        defective = False
        for p in cluster:
            if abs(p.eigenvector.conj() @ v) > 1.0 - 1e-6:
                defective = True
                p.defective = True
        residual = float(np.linalg.norm(a @ v - lam * v))
        pairs.append(EigenPair(complex(lam), v, residual, defective))
    return pairs

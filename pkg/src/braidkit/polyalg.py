"""Complex polynomial roots and modulus-sorted root bookkeeping.

Single polynomials are solved with the package's own companion-matrix QR
(``eigen.hessenberg_eigenvalues``).  No Newton polish is applied: the
balanced companion QR is already backward stable, and polishing single
members of a root cluster breaks that.  Grid sweeps that need thousands of
small polynomials use :func:`roots_batch`, which hands stacked companion
matrices to LAPACK.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eigen import balance, hessenberg_eigenvalues

__all__ = [
    "ComplexPolynomial",
    "RootSet",
    "roots",
    "count_by_modulus",
    "roots_batch",
    "count_inside_batch",
]

_EPS = np.finfo(float).eps
TIE_TOL = 1e-9


class ComplexPolynomial:
    """``sum_j coeffs[j] * beta**j`` with ascending coefficients.

    Leading coefficients that vanish (relative to the largest one) are trimmed
    and recorded: ``nominal_degree - degree`` roots have escaped to infinity.
    """

    def __init__(self, coeffs, nominal_degree: int | None = None, trim_tol: float = 4 * _EPS):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).copy()
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        self.raw = c
        self.nominal_degree = len(c) - 1 if nominal_degree is None else int(nominal_degree)
        scale = np.abs(c).max()
        top = len(c) - 1
        while top > 0 and abs(c[top]) <= trim_tol * scale:
            top -= 1
        self.coeffs = c[: top + 1]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def degree_drop(self) -> int:
        """Number of roots lost to infinity because leading coefficients vanished."""
        return self.nominal_degree - self.degree

    @property
    def leading(self) -> complex:
        """Coefficient of ``beta**nominal_degree`` (zero when the degree dropped)."""
        return complex(self.raw[self.nominal_degree]) if self.nominal_degree < len(self.raw) else 0j

    @property
    def trailing(self) -> complex:
        return complex(self.raw[0])

    @property
    def scale(self) -> float:
        return float(np.abs(self.coeffs).max())

    def __call__(self, beta):
        beta = np.asarray(beta, dtype=complex)
        acc = np.zeros_like(beta)
        for c in self.coeffs[::-1]:
            acc = acc * beta + c
        return acc

    def derivative(self, beta):
        beta = np.asarray(beta, dtype=complex)
        d = self.coeffs[1:] * np.arange(1, len(self.coeffs))
        acc = np.zeros_like(beta)
        for c in d[::-1]:
            acc = acc * beta + c
        return acc

    def __repr__(self) -> str:
        return f"ComplexPolynomial({self.coeffs.tolist()!r}, degree={self.degree})"


@dataclass
class RootSet:
    """Roots sorted by ascending modulus.

    ``tie_groups`` lists ``(start, stop)`` index ranges (stop exclusive) of
    consecutive roots whose moduli agree within ``tie_tol`` (relative).
    ``degree_drop`` roots of the nominal polynomial sit at infinity and are not
    listed.
    """

    roots: np.ndarray
    moduli: np.ndarray
    residuals: np.ndarray
    tie_groups: list = field(default_factory=list)
    degree_drop: int = 0

    def __len__(self) -> int:
        return len(self.roots)


def _companion(c: np.ndarray) -> np.ndarray:
    """Frobenius companion matrix of the monic version of ``c`` (already upper Hessenberg)."""
    d = len(c) - 1
    comp = np.zeros((d, d), dtype=complex)
    comp[0, :] = -c[-2::-1] / c[-1]
    comp[np.arange(1, d), np.arange(d - 1)] = 1.0
    return comp


def _tie_groups(moduli: np.ndarray, tie_tol: float) -> list:
    groups = []
    start = 0
    for i in range(1, len(moduli) + 1):
        if i == len(moduli) or moduli[i] - moduli[i - 1] > tie_tol * max(moduli[i], 1e-300):
            if i - start > 1:
                groups.append((start, i))
            start = i
    return groups


def roots(p: ComplexPolynomial, tie_tol: float = TIE_TOL) -> RootSet:
    """All roots of ``p`` with multiplicity, sorted by modulus.

    Exact zero low-order coefficients give exact roots at ``beta = 0``.
    """
    if not isinstance(p, ComplexPolynomial):
        p = ComplexPolynomial(p)
    if p.degree < 1:
        raise ValueError("constant polynomial has no roots")
    c = p.coeffs
    zeros_at_origin = int(np.argmax(c != 0))
    reduced = c[zeros_at_origin:]
    found = np.zeros(zeros_at_origin, dtype=complex)
    if len(reduced) > 1:
        comp, _ = balance(_companion(reduced))
        # a diagonal similarity keeps the Hessenberg zero pattern
        z = hessenberg_eigenvalues(comp)
        found = np.concatenate([found, z])
    order = np.argsort(np.abs(found), kind="stable")
    found = found[order]
    moduli = np.abs(found)
    return RootSet(found, moduli, np.abs(p(found)), _tie_groups(moduli, tie_tol), p.degree_drop)


def count_by_modulus(rs: RootSet, radius: float = 1.0, tol: float = 1e-9) -> tuple[int, int, int]:
    """``(inside, on, outside)`` counts against ``|beta| = radius`` with a tolerance band.

    Roots lost to infinity through a degree drop count as outside.
    """
    mod = np.asarray(rs.moduli)
    on = np.abs(mod - radius) <= tol
    inside = int(np.count_nonzero((mod < radius) & ~on))
    outside = int(np.count_nonzero((mod > radius) & ~on)) + int(rs.degree_drop)
    return inside, int(np.count_nonzero(on)), outside


def _effective_span(row: np.ndarray) -> tuple[int, int]:
    nz = np.flatnonzero(np.abs(row) > 4 * _EPS * np.abs(row).max())
    return int(nz[0]), int(nz[-1])


def roots_batch(coeffs: np.ndarray) -> list[np.ndarray]:
    """Roots of many polynomials (rows of ascending coefficients) at once.

    Rows are grouped by their effective lowest and highest nonzero power and
    each group is solved as one stack of companion matrices.  Returns one
    unsorted array of finite roots per row.
    """
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=complex))
    out: list = [None] * len(coeffs)
    spans: dict = {}
    for i, row in enumerate(coeffs):
        if not np.any(row):
            raise ValueError(f"row {i} is identically zero")
        spans.setdefault(_effective_span(row), []).append(i)
    for (lo, hi), rows in spans.items():
        idx = np.array(rows)
        block = coeffs[idx, lo: hi + 1]
        d = hi - lo
        if d == 0:
            found = np.zeros((len(idx), 0), dtype=complex)
        else:
            comp = np.zeros((len(idx), d, d), dtype=complex)
            comp[:, 0, :] = -block[:, -2::-1] / block[:, -1:]
            comp[:, np.arange(1, d), np.arange(d - 1)] = 1.0
            found = np.linalg.eigvals(comp)
        zeros = np.zeros((len(idx), lo), dtype=complex)
        full = np.concatenate([zeros, found], axis=1)
        for r, i in enumerate(idx):
            out[i] = full[r]
    return out


def count_inside_batch(coeffs: np.ndarray, radius: float = 1.0, tol: float = 1e-9):
    """Per-row ``(inside, on)`` counts for :func:`roots_batch`; returns two int arrays."""
    found = roots_batch(coeffs)
    inside = np.empty(len(found), dtype=int)
    on = np.empty(len(found), dtype=int)
    for i, z in enumerate(found):
        mod = np.abs(z)
        near = np.abs(mod - radius) <= tol
        on[i] = np.count_nonzero(near)
        inside[i] = np.count_nonzero((mod < radius) & ~near)
    return inside, on

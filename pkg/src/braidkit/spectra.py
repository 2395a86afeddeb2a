"""Band strands, finite-chain spectra, skin-effect localization and GBZ diagnostics."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from math import comb
from typing import Optional

import numpy as np

from .braid import Axis, winding_ref
from .eigen import MAX_DIM, EigenPair, eig_general
from .errors import DomainError, EPOnGridError, ReferenceOnSpectrumError
from .model import ModelSpec, bloch_eigenvalues, char_polynomial, track_bands, with_param
from .polyalg import RootSet, count_by_modulus, roots, roots_batch

__all__ = [
    "StrandSet",
    "RealSpaceMatrix",
    "LocalizationStats",
    "State",
    "pbc_strands",
    "real_space_matrix",
    "eig_general",
    "EigenPair",
    "localization",
    "obc_states",
    "left_fraction",
    "left_fraction_grid",
    "beta_solutions",
    "n_inside",
    "beta_outside_map",
    "nhse_count",
    "nhse_state_count",
    "gbz_residual",
    "nhse_direction",
    "localization_check",
    "strands_to_csv",
    "states_to_csv",
    "bloch_multiset",
    "LocalizationCheck",
]

TZM_TOL = 1e-6


@dataclass
class StrandSet:
    """Two continuously tracked energy strands on the grid ``k``."""

    k: np.ndarray
    e1: np.ndarray
    e2: np.ndarray


@dataclass
class RealSpaceMatrix:
    """Hamiltonian of a finite chain; node ``2j - 1`` is A and ``2j`` is B of cell ``j``."""

    matrix: np.ndarray
    bc: str
    n_cells: int

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass
class LocalizationStats:
    center_of_mass: float
    side: str
    ipr: float


@dataclass
class State:
    """An eigenpair of a finite chain together with its localization statistics."""

    pair: EigenPair
    stats: LocalizationStats

    @property
    def energy(self) -> complex:
        return self.pair.eigenvalue


def pbc_strands(model: ModelSpec, K: int = 256) -> StrandSet:
    """Tracked band strands on ``K`` momenta in ``[0, 2*pi)``.

    Raises :class:`EPOnGridError` if the two eigenvalues coincide at a grid
    momentum (squared splitting below ``1e-10 * scale**2``).
    """
    if K < 64:
        raise ValueError("K must be at least 64")
    k = np.linspace(0.0, 2 * np.pi, K, endpoint=False)
    e1, e2 = track_bands(model, k)
    # squared gap: near an EP the computed splitting grows like sqrt(rounding)
    gap2 = np.abs(e1 - e2) ** 2
    i = int(np.argmin(gap2))
    if gap2[i] < 1e-10 * max(model.scale, 1e-300) ** 2:
        raise EPOnGridError(f"eigenvalues coincide at k = {k[i]:.12g}", k=float(k[i]))
    return StrandSet(k, e1, e2)


def real_space_matrix(model: ModelSpec, n_cells: int, bc: str = "OBC") -> RealSpaceMatrix:
    """Dense ``2N x 2N`` chain Hamiltonian.

    A coefficient at exponent ``p`` of ``h_ab`` couples A of cell ``j`` to B of
    cell ``j + p``.  PBC wraps ``j + p`` cyclically; OBC drops every bond whose
    target cell falls outside the chain.
    """
    bc = bc.upper()
    if bc not in ("OBC", "PBC"):
        raise ValueError(f"bc must be OBC or PBC, got {bc!r}")
    need = model.nominal_degree + 1
    if n_cells < need:
        raise DomainError(f"chain of {n_cells} cells is too short; need at least {need}")
    if 2 * n_cells > MAX_DIM:
        raise DomainError(f"2N = {2 * n_cells} exceeds the dense solver cap {MAX_DIM}")
    ab, ba = model.offdiagonal()
    d1, d2 = model.diagonal
    mat = np.zeros((2 * n_cells, 2 * n_cells), dtype=complex)
    cells = np.arange(n_cells)
    mat[2 * cells, 2 * cells] = d1
    mat[2 * cells + 1, 2 * cells + 1] = d2
    for poly, row_off, col_off in ((ab, 0, 1), (ba, 1, 0)):
        for p, c in poly.terms():
            target = cells + p
            if bc == "PBC":
                keep = np.ones(n_cells, dtype=bool)
                target = target % n_cells
            else:
                keep = (target >= 0) & (target < n_cells)
            np.add.at(mat, (2 * cells[keep] + row_off, 2 * target[keep] + col_off), c)
    return RealSpaceMatrix(mat, bc, n_cells)


def localization(pair, n_nodes: Optional[int] = None) -> LocalizationStats:
    """Center of mass (1-based node index), side and inverse participation ratio."""
    psi = np.asarray(getattr(pair, "eigenvector", pair), dtype=complex)
    dens = np.abs(psi) ** 2
    total = dens.sum()
    if total == 0:
        raise ValueError("eigenvector is zero")
    x = np.arange(1, len(psi) + 1)
    com = float((x * dens).sum() / total)
    nodes = len(psi) if n_nodes is None else n_nodes
    side = "left" if com < (nodes + 1) / 2 else "right"
    ipr = float((dens ** 2).sum() / total ** 2)
    return LocalizationStats(com, side, ipr)


def obc_states(model: ModelSpec, n_cells: int, bc: str = "OBC") -> list[State]:
    """All eigenstates of the finite chain, sorted by ``|E|`` then ``Arg E``."""
    pairs = eig_general(real_space_matrix(model, n_cells, bc))
    pairs.sort(key=lambda p: (round(abs(p.eigenvalue), 12), np.angle(p.eigenvalue)))
    return [State(p, localization(p)) for p in pairs]


def _cells_from_nodes(n_nodes: int) -> int:
    if n_nodes % 2:
        raise ValueError("the chain has two nodes per cell; n_nodes must be even")
    return n_nodes // 2


def left_fraction(model: ModelSpec, n_nodes: int = 40) -> float:
    """Fraction of open-chain eigenstates whose center of mass is in the left half."""
    states = obc_states(model, _cells_from_nodes(n_nodes))
    return sum(s.stats.side == "left" for s in states) / len(states)


def left_fraction_grid(template: ModelSpec, axis1: Axis, axis2: Axis, n_nodes: int = 40) -> np.ndarray:
    """``f_L`` over a two-parameter grid; ``out[i, j]`` at ``(axis1[i], axis2[j])``."""
    out = np.empty((axis1.num, axis2.num))
    for i, a in enumerate(axis1.values):
        base = with_param(template, axis1.path, a)
        for j, b in enumerate(axis2.values):
            out[i, j] = left_fraction(with_param(base, axis2.path, b), n_nodes)
    return out


def beta_solutions(model: ModelSpec, e: complex) -> RootSet:
    """Modulus-sorted roots ``beta_a(E)`` of ``det(H(beta) - E) = 0``."""
    return roots(char_polynomial(model, e))


def n_inside(model: ModelSpec, e: complex, tol: float = 1e-9) -> int:
    """Number of ``beta_a(E)`` strictly inside the unit circle."""
    return count_by_modulus(beta_solutions(model, e), 1.0, tol)[0]


def beta_outside_map(model: ModelSpec, e_grid) -> np.ndarray:
    """Count of ``beta_a(E)`` with ``|beta| > 1`` for every energy of ``e_grid``.

    Roots lost through a degree drop are counted as outside.
    """
    e_grid = np.asarray(e_grid, dtype=complex)
    flat = e_grid.ravel()
    width = model.nominal_degree + 1
    coeffs = np.array([char_polynomial(model, e).raw[:width] for e in flat])
    found = roots_batch(coeffs)
    out = np.array([model.nominal_degree - np.count_nonzero(np.abs(z) <= 1.0) for z in found])
    return out.reshape(e_grid.shape)


def nhse_count(xi_r: int, m: int, n: int, side: str) -> int:
    """Independent skin states on a semi-infinite chain for reference winding ``xi_r``.

    Right-localized: ``C(n + |xi_r|, n + 1)`` when ``xi_r < 0``; left-localized:
    ``C(m + xi_r, m + 1)`` when ``xi_r > 0``; zero otherwise.
    """
    if side == "right":
        return comb(n + abs(xi_r), n + 1) if xi_r < 0 else 0
    if side == "left":
        return comb(m + xi_r, m + 1) if xi_r > 0 else 0
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def nhse_state_count(model: ModelSpec, e: complex, side: str) -> int:
    xi_r = winding_ref(model, e)
    return nhse_count(xi_r, model.pole_order, model.nominal_degree - model.pole_order, side)


def gbz_residual(model: ModelSpec, e: complex) -> float:
    """``| |beta_P| - |beta_{P+1}| |`` for modulus-sorted roots (``P`` = pole order).

    Zero identifies ``E`` on the generalized Brillouin zone.  A root lost to
    infinity counts with infinite modulus.
    """
    rs = beta_solutions(model, e)
    p = model.pole_order
    if model.nominal_degree < p + 1 or p < 1:
        raise DomainError("the characteristic polynomial has too few roots for a GBZ test")
    moduli = list(rs.moduli) + [np.inf] * rs.degree_drop
    return float(abs(moduli[p] - moduli[p - 1]))


def nhse_direction(model: ModelSpec, e: complex) -> Optional[str]:
    """``"left"`` if ``xi_r(E) > 0``, ``"right"`` if negative, ``None`` when zero."""
    xi_r = winding_ref(model, e)
    return "left" if xi_r > 0 else "right" if xi_r < 0 else None


@dataclass
class LocalizationCheck:
    """Comparison of open-chain localization against the ``xi_r(E)`` prediction."""

    zero_modes: list
    matched: int
    mismatched: list
    unpredicted: list


def localization_check(model: ModelSpec, n_nodes: int = 40, tzm_tol: float = TZM_TOL) -> LocalizationCheck:
    """Check every non-zero-mode state's side against ``sign(xi_r(E))``.

    States with ``|E| < tzm_tol`` are set aside as zero modes.  States with
    ``xi_r(E) = 0`` (or an energy on the periodic spectrum) carry no prediction
    and are listed in ``unpredicted``.
    """
    zero, mism, unpred = [], [], []
    matched = 0
    for s in obc_states(model, _cells_from_nodes(n_nodes)):
        if abs(s.energy) < tzm_tol:
            zero.append(s)
            continue
        try:
            expected = nhse_direction(model, s.energy)
        except ReferenceOnSpectrumError:
            expected = None
        if expected is None:
            unpred.append(s)
        elif expected == s.stats.side:
            matched += 1
        else:
            mism.append(s)
    return LocalizationCheck(zero, matched, mism, unpred)


def _write(rows, header) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def strands_to_csv(strands: StrandSet) -> str:
    """Columns ``k, band, re_E, im_E``; band 1 rows first."""
    rows = []
    for band, e in ((1, strands.e1), (2, strands.e2)):
        rows += [[repr(float(k)), band, repr(float(z.real)), repr(float(z.imag))]
                 for k, z in zip(strands.k, e)]
    return _write(rows, ["k", "band", "re_E", "im_E"])


def states_to_csv(states: list) -> str:
    """Columns ``index, re_E, im_E, center_of_mass, ipr, side``."""
    rows = [[i, repr(float(s.energy.real)), repr(float(s.energy.imag)),
             repr(s.stats.center_of_mass), repr(s.stats.ipr), s.stats.side]
            for i, s in enumerate(states, start=1)]
    return _write(rows, ["index", "re_E", "im_E", "center_of_mass", "ipr", "side"])


def bloch_multiset(model: ModelSpec, n_cells: int) -> np.ndarray:
    """``E_pm(2 pi j / N)`` for ``j = 0..N-1``: the exact periodic-chain spectrum."""
    k = 2 * np.pi * np.arange(n_cells) / n_cells
    e_minus, e_plus = bloch_eigenvalues(model, k)
    return np.concatenate([e_minus, e_plus])

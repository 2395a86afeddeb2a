"""Circuit Laplacians in k-space and real space, Green's-function reconstruction, stability."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import SingularLaplacianError
from ..model import bloch_eigenvalues
from .netlist import build_netlist
from .params import CircuitParams

__all__ = [
    "laplacian_k",
    "laplacian_real",
    "correspondence_error",
    "GreensResult",
    "greens_reconstruct",
    "StabilityReport",
    "stability_check",
]

COND_LIMIT = 1e12


def _branch(l: float, esr: float, omega: float) -> complex:
    return 1.0 / (1j * omega * l + esr)


def laplacian_k(params: CircuitParams, omega: float, k: float) -> np.ndarray:
    """2x2 Bloch Laplacian ``J(k)``.

    At the resonance of ideal elements the diagonal vanishes and
    ``J(k) = -i omega H(k)`` with couplings ``(c0, +-c_m, +-c_n)``.
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    p = params
    iw = 1j * omega
    g0 = 0.0 if math.isinf(p.r0) else 1.0 / p.r0
    lam = p.inic_leak
    em = np.exp(-1j * p.m * k)
    en = np.exp(1j * p.n * k)
    j = np.empty((2, 2), dtype=complex)
    j[0, 0] = iw * (p.c0 + p.c_n + lam * p.c_m) + _branch(p.l_a, p.esr, omega) + g0
    j[1, 1] = iw * (p.c0 + p.c_m + lam * p.c_n) + _branch(p.l_b, p.esr, omega) + g0
    j[0, 1] = -iw * (p.c0 + p.signed_cm * em + lam * p.signed_cn / en)
    j[1, 0] = -iw * (p.c0 + p.signed_cn * en + lam * p.signed_cm / em)
    return j


def laplacian_real(params: CircuitParams, omega: float, n_cells: int, bc: str = "PBC") -> np.ndarray:
    """``2N x 2N`` admittance matrix assembled from the chain's netlist."""
    return build_netlist(params, n_cells, bc).laplacian(omega)


def correspondence_error(params: CircuitParams, k_samples: int = 256) -> float:
    """Max relative deviation between ``eig J(k; w_r)`` and ``-i w_r E(k)`` of the realized model.

    Uses the A-sublattice resonance ``w_r = 1/sqrt(l_a (c0 + c_n))``.
    """
    omega = params.omega_a
    model = params.to_model()
    worst = 0.0
    for k in np.linspace(0.0, 2 * np.pi, k_samples, endpoint=False):
        got = np.linalg.eigvals(laplacian_k(params, omega, k))
        e_minus, e_plus = bloch_eigenvalues(model, k)
        want = -1j * omega * np.array([e_minus, e_plus])
        scale = max(np.abs(want).max(), 1e-300)
        # pair up the two eigenvalues in whichever order fits
        d = min(np.abs(got - want).max(), np.abs(got[::-1] - want).max())
        worst = max(worst, d / scale)
    return float(worst)


@dataclass
class GreensResult:
    """Laplacian rebuilt from unit-current responses and its Frobenius error."""

    matrix: np.ndarray
    error: float
    condition: float


def greens_reconstruct(params: CircuitParams, omega: float, n_cells: int, bc: str = "PBC") -> GreensResult:
    """Inject unit current at each node, collect the voltage responses and invert.

    Raises :class:`SingularLaplacianError` when ``cond(J) > 1e12``.
    """
    j = laplacian_real(params, omega, n_cells, bc)
    cond = float(np.linalg.cond(j))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularLaplacianError(f"resonant singularity (cond = {cond:.3g}); add r0")
    green = np.linalg.solve(j, np.eye(j.shape[0]))
    rebuilt = np.linalg.inv(green)
    error = float(np.linalg.norm(rebuilt - j) / np.linalg.norm(j))
    return GreensResult(rebuilt, error, cond)


@dataclass
class StabilityReport:
    """``spectrum = i * eig(J)``; stable when no element has a negative imaginary part."""

    min_imag: float
    stable: bool
    spectrum: np.ndarray


def stability_check(params: CircuitParams, omega: float, n_cells: int, bc: str = "PBC") -> StabilityReport:
    """Map the admittance eigenvalues to ``i * eig(J)`` and test ``Im >= -1e-9 * scale``.

    At resonance ``i J = omega H + i / r0``, so grounding resistors shift the
    whole spectrum up by ``1 / r0``.
    """
    spectrum = 1j * np.linalg.eigvals(laplacian_real(params, omega, n_cells, bc))
    scale = max(float(np.abs(spectrum).max()), 1e-300)
    min_imag = float(spectrum.imag.min())
    return StabilityReport(min_imag, min_imag >= -1e-9 * scale, spectrum)

"""Braiding index, reference windings, braid words, knot names and phase diagrams.

The braiding index is computed two independent ways: as the phase winding of
``det(H - Tr H / 2)`` around the Brillouin zone, and by the argument principle
as (zeros of the characteristic polynomial inside ``|beta| = 1``) minus (pole
order at ``beta = 0``).
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, EPOnGridError, PhaseBoundaryError, ReferenceOnSpectrumError
from .model import (
    ModelSpec,
    UnidirectionalCouplings,
    bloch_eigenvalues,
    char_polynomial,
    track_bands,
    traceless_det,
    with_param,
)
from .polyalg import count_by_modulus, count_inside_batch, roots

__all__ = [
    "BraidReport",
    "AnalyticZeros",
    "Axis",
    "PhaseDiagram",
    "winding",
    "braiding_index_integral",
    "braiding_index_roots",
    "winding_ref",
    "analytic_zeros",
    "braid_word",
    "reduce_word",
    "format_word",
    "knot_name",
    "braid_report",
    "phase_diagram",
]

TOUCH_TOL = 1e-10
ROUND_GUARD = 0.05
UNIT_TOL = 1e-9


@dataclass
class BraidReport:
    """Braiding index by both methods plus the braid word and knot type."""

    xi_integral: Optional[int]
    xi_roots: int
    on_boundary: bool
    braid_word: list
    knot_name: str
    residual: float = 0.0

    @property
    def agreement(self) -> bool:
        return self.xi_integral is not None and self.xi_integral == self.xi_roots

    @property
    def reduced_word(self) -> list:
        return reduce_word(self.braid_word)

    def to_dict(self) -> dict:
        return {
            "xi_integral": self.xi_integral,
            "xi_roots": self.xi_roots,
            "agreement": self.agreement,
            "on_boundary": self.on_boundary,
            "braid_word": format_word(self.braid_word),
            "reduced_word": format_word(self.reduced_word),
            "knot_name": self.knot_name,
            "residual": self.residual,
        }


def winding(func: Callable[[np.ndarray], np.ndarray], samples: int = 256, floor: float = 0.0,
            max_refinements: int = 4, on_zero: type = PhaseBoundaryError) -> tuple[int, float]:
    """Winding number of ``func(k)`` around the origin for ``k`` in ``[0, 2*pi]``.

    Phase increments larger than pi/2 between neighbouring samples are resolved
    by recursive local subdivision.  If ``|func|`` drops below ``floor`` at any
    sample, ``on_zero`` is raised.  Returns ``(winding, residual)`` where the
    residual is the distance of the accumulated phase / 2pi from an integer.
    """
    if samples < 8:
        raise ValueError("need at least 8 samples")
    n = samples
    for _ in range(max_refinements + 1):
        k = np.linspace(0.0, 2 * np.pi, n + 1)
        vals = np.asarray(func(k), dtype=complex)
        _check_floor(vals, k, floor, on_zero)
        steps = np.angle(vals[1:] / vals[:-1])
        total = float(steps.sum())
        for i in np.flatnonzero(np.abs(steps) > np.pi / 2):
            total += _refine(func, k[i], k[i + 1], vals[i], vals[i + 1], floor, on_zero, 0) - steps[i]
        turns = total / (2 * np.pi)
        residual = abs(turns - round(turns))
        if residual < ROUND_GUARD:
            return int(round(turns)), residual
        n *= 2
    raise DomainError(f"winding did not settle to an integer (residual {residual:.3f})")


def _check_floor(vals, k, floor, on_zero):
    mags = np.abs(vals)
    i = int(np.argmin(mags))
    if mags[i] <= floor:
        raise on_zero(f"gap function vanishes near k = {k[i]:.12g}")


def _refine(func, k0, k1, v0, v1, floor, on_zero, depth) -> float:
    """Phase change of ``func`` over ``[k0, k1]`` with steps kept below pi/2."""
    step = float(np.angle(v1 / v0))
    if abs(step) <= np.pi / 2 or depth >= 30:
        return step
    k = np.linspace(k0, k1, 9)
    vals = np.asarray(func(k), dtype=complex)
    _check_floor(vals, k, floor, on_zero)
    return sum(_refine(func, k[j], k[j + 1], vals[j], vals[j + 1], floor, on_zero, depth + 1)
               for j in range(8))


def _det_scale(model: ModelSpec) -> float:
    return max(model.scale, 1e-300) ** 2


def braiding_index_integral(model: ModelSpec, samples: int = 256) -> tuple[int, float]:
    """Braiding index from the phase winding of ``det H~(k)``; returns ``(xi, residual)``.

    Raises :class:`PhaseBoundaryError` when ``|det H~| < 1e-10 * scale**2`` on
    the sampled grid (bands touch: phase boundary or exceptional point).
    """
    if samples < 64:
        raise ValueError("samples must be at least 64")
    return winding(lambda k: traceless_det(model, np.exp(1j * k)), samples,
                   floor=TOUCH_TOL * _det_scale(model))


def braiding_index_roots(model: ModelSpec, tol: float = UNIT_TOL) -> tuple[int, bool]:
    """Braiding index by the argument principle; returns ``(xi, on_boundary)``.

    Zeros of the characteristic polynomial at ``E = Tr H / 2`` inside the unit
    circle minus the pole order.  ``on_boundary`` is set when any zero lies
    within ``tol`` of the unit circle.
    """
    d1, d2 = model.diagonal
    poly = char_polynomial(model, 0.5 * (d1 + d2))
    if poly.degree < 1:
        # constant gap function: no zeros anywhere
        return -model.pole_order, False
    inside, on, _ = count_by_modulus(roots(poly), 1.0, tol)
    return inside - model.pole_order, on > 0


def winding_ref(model: ModelSpec, e_ref: complex, samples: int = 256) -> int:
    """Winding ``xi_r(E)`` of ``det(H(k) - E)`` around the origin.

    Raises :class:`ReferenceOnSpectrumError` if ``E`` lies on the periodic spectrum.
    """
    e_ref = complex(e_ref)
    d1, d2 = model.diagonal
    ab, ba = model.offdiagonal()

    def det(k):
        beta = np.exp(1j * k)
        return (d1 - e_ref) * (d2 - e_ref) - ab(beta) * ba(beta)

    floor = TOUCH_TOL * (max(model.scale, 1e-300) + abs(e_ref)) ** 2
    xi, _ = winding(det, samples, floor=floor, on_zero=ReferenceOnSpectrumError)
    return xi


@dataclass
class AnalyticZeros:
    """Closed-form zeros of ``det H~(beta)`` for the unidirectional model.

    ``beta1`` solves ``c_ab0 * beta**m + c_ab_neg_m = 0`` and ``beta2`` solves
    ``c_ab0 + c_ba_n * beta**n = 0``.  A family whose coupling vanishes is empty
    and named in ``omitted``.
    """

    beta1: np.ndarray
    beta2: np.ndarray
    omitted: list = field(default_factory=list)


def analytic_zeros(model: ModelSpec) -> AnalyticZeros:
    c = model.couplings
    if model.variant != "H1" or not isinstance(c, UnidirectionalCouplings) or model.onsite.c_z != 0:
        raise DomainError("closed-form zeros exist only for the unidirectional model without mass term")
    if c.c_ab0 == 0:
        raise DomainError("closed-form zeros need c_ab0 != 0")
    omitted = []
    if c.c_ab_neg_m != 0:
        ratio = -c.c_ab_neg_m / c.c_ab0
        f = np.arange(c.m)
        beta1 = abs(ratio) ** (1.0 / c.m) * np.exp(1j * (np.angle(ratio) + 2 * np.pi * f) / c.m)
    else:
        beta1 = np.zeros(0, dtype=complex)
        omitted.append("beta1")
    if c.c_ba_n != 0:
        ratio = -c.c_ab0 / c.c_ba_n
        g = np.arange(c.n)
        beta2 = abs(ratio) ** (1.0 / c.n) * np.exp(1j * (np.angle(ratio) + 2 * np.pi * g) / c.n)
    else:
        beta2 = np.zeros(0, dtype=complex)
        omitted.append("beta2")
    return AnalyticZeros(beta1, beta2, omitted)


def braid_word(model: ModelSpec, samples: int = 512) -> list:
    """Signed generator exponents (+1 / -1), one per strand crossing, in k order.

    Strands cross in the projection where ``Re E1 = Re E2``.  The sign is
    ``-sign(Im(E1 - E2) * d/dk Re(E1 - E2))``, so a counter-clockwise exchange
    gives +1 and the exponent sum equals the braiding index.
    """
    # a crossing exactly at the seam k = 0 would be lost, so start the closed
    # loop a fraction of a step later (a cyclic shift conjugates the word)
    start = 0.0
    for frac in (0.0, 0.5, 0.25, 0.75):
        start = frac * 2 * np.pi / samples
        g0 = np.subtract(*bloch_eigenvalues(model, start))
        if abs(g0.real) > 1e-9 * abs(g0):
            break
    k = start + np.linspace(0.0, 2 * np.pi, samples + 1)
    e1, e2 = track_bands(model, k)
    gap = e1 - e2
    mags = np.abs(gap) ** 2
    i = int(np.argmin(mags))
    if mags[i] < TOUCH_TOL * max(model.scale, 1e-300) ** 2:
        raise EPOnGridError(f"strands coincide at k = {k[i]:.12g}", k=float(k[i]))
    re = gap.real.copy()
    # an exact zero on a sample is nudged so each crossing is counted once
    re[re == 0.0] = np.finfo(float).tiny
    word = []
    for j in np.flatnonzero(re[:-1] * re[1:] < 0):
        t = re[j] / (re[j] - re[j + 1])
        im = gap.imag[j] + t * (gap.imag[j + 1] - gap.imag[j])
        slope = re[j + 1] - re[j]
        word.append(-int(np.sign(im * slope)))
    return word


def reduce_word(word: list) -> list:
    """Cyclic free reduction: cancel adjacent inverse pairs, including across the ends."""
    out: list = []
    for g in word:
        if out and out[-1] == -g:
            out.pop()
        else:
            out.append(g)
    while len(out) > 1 and out[0] == -out[-1]:
        out = out[1:-1]
    return out


def format_word(word: list) -> str:
    """``[1, -1]`` -> ``"s1 s1^-1"``."""
    return " ".join("s1" if g > 0 else "s1^-1" for g in word)


def knot_name(xi: int) -> str:
    """Knot or link type of the closed two-strand braid ``s1**xi``.

    Only ``|xi| <= 3`` is named; larger values give ``"other(|xi|)"``.  Two-band
    braids cannot produce knots of unknotting number above one, so e.g. the
    cinquefoil is never reported.
    """
    names = {0: "unlink", 1: "unknot", 2: "Hopf link", 3: "trefoil"}
    return names.get(abs(int(xi)), f"other({abs(int(xi))})")


def braid_report(model: ModelSpec, samples: int = 512, strict: bool = True) -> BraidReport:
    """Both indices, the braid word and the knot name.

    With ``strict`` a model on a phase boundary raises :class:`PhaseBoundaryError`;
    otherwise the report is returned with ``on_boundary`` set and no integral.
    """
    xi_r, on = braiding_index_roots(model)
    if on:
        if strict:
            raise PhaseBoundaryError("on phase boundary: a gap zero lies on |beta| = 1")
        return BraidReport(None, xi_r, True, [], knot_name(xi_r))
    xi_i, residual = braiding_index_integral(model, max(samples, 64))
    word = braid_word(model, samples)
    return BraidReport(xi_i, xi_r, False, word, knot_name(xi_i), residual)


@dataclass
class Axis:
    """A swept scalar parameter: ``num`` evenly spaced values over ``[start, stop]``."""

    path: str
    start: float
    stop: float
    num: int

    def __post_init__(self):
        if self.num < 1:
            raise ValueError("axis resolution must be at least 1")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.num)


@dataclass
class PhaseDiagram:
    """``xi[i, j]`` at ``(axis1.values[i], axis2.values[j])`` with a boundary mask."""

    axis1: Axis
    axis2: Axis
    xi: np.ndarray
    boundary: np.ndarray

    def attained(self) -> set:
        return set(int(v) for v in np.unique(self.xi[~self.boundary]))

    def rows(self):
        for i, a in enumerate(self.axis1.values):
            for j, b in enumerate(self.axis2.values):
                yield float(a), float(b), int(self.xi[i, j]), int(self.boundary[i, j])

    def to_csv(self, fh=None) -> str:
        """CSV with columns ``axis1, axis2, xi, boundary_flag`` (axis1 slowest)."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["axis1", "axis2", "xi", "boundary_flag"])
        for a, b, x, flag in self.rows():
            writer.writerow([repr(a), repr(b), x, flag])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text

    def to_json(self) -> str:
        return json.dumps({
            "axis1": vars(self.axis1), "axis2": vars(self.axis2),
            "xi": self.xi.tolist(), "boundary_flag": self.boundary.astype(int).tolist(),
        })


def _worker_count(workers: Optional[int]) -> int:
    if workers is None:
        env = os.environ.get("BRAIDKIT_THREADS")
        workers = int(env) if env and env.isdigit() else 1
    return max(1, workers)


def phase_diagram(template: ModelSpec, axis1: Axis, axis2: Axis, tol: float = UNIT_TOL,
                  workers: Optional[int] = None) -> PhaseDiagram:
    """Argument-principle braiding index on a two-parameter grid.

    Cells are independent; with ``workers > 1`` (or ``BRAIDKIT_THREADS``) rows of
    the grid are solved concurrently and merged by index.
    """
    if axis1.path == axis2.path:
        raise ValueError("phase-diagram axes must be distinct parameters")
    v1, v2 = axis1.values, axis2.values
    width = template.nominal_degree + 1
    pole = template.pole_order

    def solve_row(i):
        base = with_param(template, axis1.path, v1[i])
        coeffs = np.empty((len(v2), width), dtype=complex)
        for j, b in enumerate(v2):
            model = with_param(base, axis2.path, b)
            d1, d2 = model.diagonal
            coeffs[j] = char_polynomial(model, 0.5 * (d1 + d2)).raw[:width]
        inside, on = count_inside_batch(coeffs, 1.0, tol)
        return inside - pole, on > 0

    n_workers = _worker_count(workers)
    if n_workers > 1:
        with ThreadPoolExecutor(n_workers) as pool:
            results = list(pool.map(solve_row, range(len(v1))))
    else:
        results = [solve_row(i) for i in range(len(v1))]
    xi = np.array([r[0] for r in results], dtype=int).reshape(len(v1), len(v2))
    boundary = np.array([r[1] for r in results], dtype=bool).reshape(len(v1), len(v2))
    return PhaseDiagram(axis1, axis2, xi, boundary)

"""Exceptional points on phase boundaries and Type-1 / Type-2 transition classification.

For the unidirectional model with ``n = 1`` the boundaries are the four lines

========  ==========================  ==================================
line      condition                   gap zeros at real k
========  ==========================  ==================================
``AB``    ``c_ba_n = -c_ab0``         ``k = 0``
``EF``    ``c_ba_n = +c_ab0``         ``k = pi``
``PQ``    ``c_ab_neg_m = -c_ab0``     ``k = 2 pi j / m``
``RS``    ``c_ab_neg_m = +c_ab0``     ``k = (2 j + 1) pi / m``
========  ==========================  ==================================

AB/EF crossings are Type-1 (one EP), PQ/RS crossings are Type-2 (``m`` EPs).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .braid import braiding_index_roots
from .errors import DomainError
from .model import ModelSpec, char_polynomial, traceless_det, with_param
from .polyalg import roots

__all__ = [
    "EPList",
    "Transition",
    "LINES",
    "gap_zeros_real_k",
    "is_defective",
    "line_model",
    "ep_list",
    "classify_transition",
    "bisect_transition",
    "table2_generate",
    "table_to_csv",
]

# line name -> (parameter, sign relative to c_ab0, transition type)
LINES = {
    "AB": ("c_ba_n", -1.0, "Type1"),
    "EF": ("c_ba_n", +1.0, "Type1"),
    "PQ": ("c_ab_neg_m", -1.0, "Type2"),
    "RS": ("c_ab_neg_m", +1.0, "Type2"),
}


@dataclass
class EPList:
    """Gap-closing momenta in ``(-pi, pi]`` for one boundary."""

    k: np.ndarray
    transition_type: Optional[str]
    boundary: str

    @property
    def count(self) -> int:
        return len(self.k)


@dataclass
class Transition:
    """Result of classifying a braiding-index jump."""

    transition_type: str
    xi_before: int
    xi_after: int
    eps: EPList
    consistent: bool


def _normalize(k: float) -> float:
    k = float(np.angle(np.exp(1j * k)))
    return np.pi if k <= -np.pi + 1e-12 else k


def _polish(model: ModelSpec, k: float, steps: int = 4) -> float:
    """Gauss-Newton on ``|det H~(e^{ik})|^2`` over real ``k``."""
    ab, ba = model.offdiagonal()
    for _ in range(steps):
        beta = np.exp(1j * k)
        f = complex(traceless_det(model, beta))
        df = complex(-(ab.derivative(beta) * ba(beta) + ab(beta) * ba.derivative(beta)) * 1j * beta)
        if df == 0:
            break
        nk = k - (np.conj(df) * f).real / abs(df) ** 2
        if abs(traceless_det(model, np.exp(1j * nk))) >= abs(f):
            break
        k = nk
    return k


def gap_zeros_real_k(model: ModelSpec, tol: float = 1e-9) -> np.ndarray:
    """Real momenta in ``(-pi, pi]`` where ``det H~(k) = 0``, sorted ascending.

    Unit-modulus roots (``| |beta| - 1 | < tol``) of the characteristic
    polynomial at ``E = Tr H / 2`` are mapped to ``k = Arg beta`` and polished.
    Off-boundary models give an empty array.
    """
    d1, d2 = model.diagonal
    rs = roots(char_polynomial(model, 0.5 * (d1 + d2)))
    ks: list = []
    for beta in rs.roots[np.abs(rs.moduli - 1.0) < tol]:
        k = _normalize(_polish(model, float(np.angle(beta))))
        if all(abs(np.angle(np.exp(1j * (k - other)))) > 1e-8 for other in ks):
            ks.append(k)
    return np.array(sorted(ks))


def is_defective(model: ModelSpec, k: float, tol: float = 1e-9) -> bool:
    """True when ``H~(k)`` is a nonzero nilpotent 2x2 matrix (an exceptional point)."""
    beta = np.exp(1j * k)
    ab, ba = model.offdiagonal()
    d1, d2 = model.diagonal
    half = 0.5 * (d1 - d2)
    ht = np.array([[half, ab(beta)], [ba(beta), -half]], dtype=complex)
    norm = np.linalg.norm(ht)
    scale = max(model.scale, 1e-300)
    return bool(norm > tol * scale and np.linalg.norm(ht @ ht) < tol * scale ** 2)


def line_model(m: int, line: str, other: float = 0.5, c_ab0: float = 1.0) -> ModelSpec:
    """Unidirectional model (``n = 1``) sitting on a named boundary line.

    The coupling not fixed by the line is set to ``other`` (keep it off ``+-c_ab0``).
    """
    try:
        param, sign, _ = LINES[line]
    except KeyError:
        raise ValueError(f"unknown line {line!r}; expected one of {sorted(LINES)}") from None
    if abs(abs(other) - abs(c_ab0)) < 1e-6:
        raise ValueError("the free coupling would put the model on a second boundary")
    base = ModelSpec.h1(c_ab0, other, other, m, 1)
    return with_param(base, param, sign * c_ab0)


def ep_list(m: int, line: str, other: float = 0.5) -> EPList:
    return EPList(gap_zeros_real_k(line_model(m, line, other)), LINES[line][2], line)


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def classify_transition(template: ModelSpec, param: str, value: float, eps: float = 1e-3) -> Transition:
    """Classify the braiding-index jump where ``param`` crosses ``value``.

    ``xi`` is evaluated at ``value - eps`` and ``value + eps``.  Strictly
    opposite signs give Type2; equal nonzero signs give Type1.  When one side
    has ``xi = 0`` the EP count decides (one EP: Type1, several: Type2).
    ``consistent`` reports whether the EP count matches the type (1 for Type1,
    more than one for Type2).
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    xi_lo, on_lo = braiding_index_roots(with_param(template, param, value - eps))
    xi_hi, on_hi = braiding_index_roots(with_param(template, param, value + eps))
    if on_lo or on_hi:
        raise DomainError("an offset point lies on a boundary; reduce eps")
    if xi_lo == xi_hi:
        raise DomainError(f"not a transition: xi = {xi_lo} on both sides")
    boundary_model = with_param(template, param, value)
    ks = gap_zeros_real_k(boundary_model)
    count = len(ks)
    s_lo, s_hi = _sign(xi_lo), _sign(xi_hi)
    if s_lo * s_hi < 0:
        kind = "Type2"
    elif s_lo * s_hi > 0:
        kind = "Type1"
    else:
        kind = "Type1" if count == 1 else "Type2"
    consistent = (count == 1) if kind == "Type1" else (count > 1)
    return Transition(kind, xi_lo, xi_hi, EPList(ks, kind, f"{param}={value:g}"), consistent)


def bisect_transition(template: ModelSpec, param: str, lo: float, hi: float, tol: float = 1e-10,
                      max_steps: int = 200) -> float:
    """Parameter value where ``xi`` changes between ``lo`` and ``hi`` (bisection).

    Useful for variants without closed-form boundaries.  Points flagged as on a
    boundary are treated as belonging to the ``hi`` side.
    """
    def xi(v):
        return braiding_index_roots(with_param(template, param, v))[0]

    x_lo, x_hi = xi(lo), xi(hi)
    if x_lo == x_hi:
        raise DomainError(f"not a transition: xi = {x_lo} at both ends")
    for _ in range(max_steps):
        if abs(hi - lo) <= tol:
            break
        mid = 0.5 * (lo + hi)
        if xi(mid) == x_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def table2_generate(m_values, other: float = 0.5) -> list:
    """Rows ``(m, line, transition_type, k values)`` for every line and order."""
    rows = []
    for m in m_values:
        if not 2 <= int(m) <= 12:
            raise ValueError("orders must lie in 2..12")
        for line in LINES:
            ep = ep_list(int(m), line, other)
            rows.append((int(m), line, ep.transition_type, ep.k))
    return rows


def table_to_csv(rows) -> str:
    """Columns ``m, boundary, type, count, k_values`` (k values space separated)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["m", "boundary", "type", "count", "k_values"])
    for m, line, kind, ks in rows:
        writer.writerow([m, line, kind, len(ks), " ".join(repr(float(k)) for k in ks)])
    return buf.getvalue()

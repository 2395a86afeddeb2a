"""Two-band Bloch and surrogate Hamiltonians with long-range non-reciprocal coupling.

Every variant is stored as a pair of Laurent polynomials in ``beta = exp(ik)``:
``h_ab(beta)`` (row A, column B) and ``h_ba(beta)`` (row B, column A), plus a
traceless diagonal ``(-c_i + c_z, c_i - c_z)``.  A coefficient at exponent ``p``
of ``h_ab`` couples site A of cell ``j`` to site B of cell ``j + p``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .errors import DomainError
from .polyalg import ComplexPolynomial

__all__ = [
    "UnidirectionalCouplings",
    "BidirectionalCouplings",
    "OnsiteParams",
    "ModelSpec",
    "LaurentPoly",
    "bloch_hamiltonian",
    "surrogate_hamiltonian",
    "bloch_eigenvalues",
    "char_polynomial",
    "track_bands",
    "traceless_det",
    "mirrored",
    "with_param",
    "get_param",
    "model_from_dict",
    "model_to_dict",
    "load_model",
]

VARIANTS = ("H1", "H2", "H3")


def _c(x) -> complex:
    """Coerce a scalar or an ``[re, im]`` pair to ``complex``."""
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValueError(f"complex numbers are encoded as [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    return complex(x)


@dataclass(frozen=True)
class UnidirectionalCouplings:
    """Intra-cell ``c_ab0``, A <- B ``m`` cells to the left, B <- A ``n`` cells to the right.

    ``c_ab0 = 0`` is accepted (the decoupled limit); analyses that divide by it
    raise :class:`~braidkit.errors.DomainError` instead.
    """

    c_ab0: complex
    c_ab_neg_m: complex
    c_ba_n: complex
    m: int
    n: int

    def __post_init__(self):
        for name in ("c_ab0", "c_ab_neg_m", "c_ba_n"):
            value = _c(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if int(self.m) != self.m or int(self.n) != self.n or self.m < 1 or self.n < 1:
            raise ValueError(f"coupling ranges must be positive integers, got m={self.m}, n={self.n}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n", int(self.n))


@dataclass(frozen=True)
class BidirectionalCouplings:
    """Couplings of the bidirectional model.

    ``ab_left[a - 1]`` multiplies ``beta**-a`` (a = 1..m_AB) and ``ab_right[b]``
    multiplies ``beta**b`` (b = 0..n_AB) in the A-B element; likewise for B-A.
    """

    ab_left: tuple
    ab_right: tuple
    ba_left: tuple
    ba_right: tuple

    def __post_init__(self):
        for name in ("ab_left", "ab_right", "ba_left", "ba_right"):
            values = tuple(_c(v) for v in getattr(self, name))
            if not all(np.isfinite(v) for v in values):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, values)
        if not self.ab_right or not self.ba_right:
            raise ValueError("ab_right and ba_right must include the beta**0 coefficient")
        if not any(self.ab_left + self.ab_right):
            raise ValueError("the A-B element has no nonzero coupling")
        if not any(self.ba_left + self.ba_right):
            raise ValueError("the B-A element has no nonzero coupling")

    @property
    def m_ab(self) -> int:
        return len(self.ab_left)

    @property
    def n_ab(self) -> int:
        return len(self.ab_right) - 1

    @property
    def m_ba(self) -> int:
        return len(self.ba_left)

    @property
    def n_ba(self) -> int:
        return len(self.ba_right) - 1


@dataclass(frozen=True)
class OnsiteParams:
    """On-site potential ``c_i`` (enters as diag(-c_i, c_i)) and sigma_z mass ``c_z``."""

    c_i: float = 0.0
    c_z: float = 0.0

    def __post_init__(self):
        for name in ("c_i", "c_z"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class LaurentPoly:
    """``sum_j coeffs[j] * beta**(low + j)``."""

    low: int
    coeffs: np.ndarray

    @property
    def high(self) -> int:
        return self.low + len(self.coeffs) - 1

    def __call__(self, beta):
        beta = np.asarray(beta, dtype=complex)
        # Horner in beta, then the negative-power shift
        acc = np.zeros_like(beta)
        for c in self.coeffs[::-1]:
            acc = acc * beta + c
        return acc * beta ** float(self.low) if self.low else acc

    def derivative(self, beta):
        beta = np.asarray(beta, dtype=complex)
        exps = np.arange(self.low, self.high + 1)
        out = np.zeros_like(beta)
        for e, c in zip(exps, self.coeffs):
            if e != 0 and c != 0:
                out = out + c * e * beta ** float(e - 1)
        return out

    def terms(self):
        """Nonzero ``(exponent, coefficient)`` pairs."""
        return [(self.low + j, c) for j, c in enumerate(self.coeffs) if c != 0]


@dataclass(frozen=True)
class ModelSpec:
    """A member of the H1 / H2 / H3 family.

    H1 carries no on-site potential (``c_i = 0``) but may carry the sigma_z mass
    ``c_z`` used in the chiral-symmetry-breaking study.
    """

    variant: str
    couplings: Union[UnidirectionalCouplings, BidirectionalCouplings]
    onsite: OnsiteParams = field(default_factory=OnsiteParams)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.variant == "H3":
            if not isinstance(self.couplings, BidirectionalCouplings):
                raise ValueError("H3 needs BidirectionalCouplings")
        elif not isinstance(self.couplings, UnidirectionalCouplings):
            raise ValueError(f"{self.variant} needs UnidirectionalCouplings")
        if self.variant == "H1" and self.onsite.c_i != 0:
            raise ValueError("H1 has no on-site potential; use variant H2 for c_i != 0")

    # -- constructors -------------------------------------------------
    @classmethod
    def h1(cls, c_ab0, c_ab_neg_m, c_ba_n, m: int, n: int, c_z: float = 0.0) -> "ModelSpec":
        return cls("H1", UnidirectionalCouplings(c_ab0, c_ab_neg_m, c_ba_n, m, n), OnsiteParams(0.0, c_z))

    @classmethod
    def h2(cls, c_ab0, c_ab_neg_m, c_ba_n, m: int, n: int, c_i: float, c_z: float = 0.0) -> "ModelSpec":
        return cls("H2", UnidirectionalCouplings(c_ab0, c_ab_neg_m, c_ba_n, m, n), OnsiteParams(c_i, c_z))

    @classmethod
    def h3(cls, ab_left: Sequence, ab_right: Sequence, ba_left: Sequence, ba_right: Sequence,
           c_i: float = 0.0, c_z: float = 0.0) -> "ModelSpec":
        return cls("H3", BidirectionalCouplings(tuple(ab_left), tuple(ab_right), tuple(ba_left), tuple(ba_right)),
                   OnsiteParams(c_i, c_z))

    # -- structure ----------------------------------------------------
    def offdiagonal(self) -> tuple[LaurentPoly, LaurentPoly]:
        """Laurent polynomials ``(h_ab, h_ba)``."""
        c = self.couplings
        if isinstance(c, UnidirectionalCouplings):
            ab = np.zeros(c.m + 1, dtype=complex)
            ab[0] = c.c_ab_neg_m
            ab[c.m] += c.c_ab0
            ba = np.zeros(c.n + 1, dtype=complex)
            ba[0] = c.c_ab0
            ba[c.n] += c.c_ba_n
            return LaurentPoly(-c.m, ab), LaurentPoly(0, ba)
        ab = np.array(c.ab_left[::-1] + c.ab_right, dtype=complex)
        ba = np.array(c.ba_left[::-1] + c.ba_right, dtype=complex)
        return LaurentPoly(-c.m_ab, ab), LaurentPoly(-c.m_ba, ba)

    @property
    def diagonal(self) -> tuple[float, float]:
        mass = self.onsite.c_z - self.onsite.c_i
        return mass, -mass

    @property
    def pole_order(self) -> int:
        """Largest negative power of beta in ``h_ab * h_ba`` (nominal, from the declared ranges)."""
        ab, ba = self.offdiagonal()
        return -min(ab.low + ba.low, 0)

    @property
    def nominal_degree(self) -> int:
        """Degree of the characteristic polynomial in beta (``m + n`` for H1/H2)."""
        ab, ba = self.offdiagonal()
        return max(ab.high + ba.high, 0) + self.pole_order

    @property
    def m_total(self) -> int:
        """Left range: ``m`` for H1/H2, ``m_AB + m_BA`` for H3."""
        c = self.couplings
        return c.m if isinstance(c, UnidirectionalCouplings) else c.m_ab + c.m_ba

    @property
    def n_total(self) -> int:
        """Right range: ``n`` for H1/H2, ``n_AB + n_BA`` for H3."""
        c = self.couplings
        return c.n if isinstance(c, UnidirectionalCouplings) else c.n_ab + c.n_ba

    @property
    def scale(self) -> float:
        """Sum of coupling magnitudes; the natural energy unit for thresholds."""
        ab, ba = self.offdiagonal()
        return float(np.abs(ab.coeffs).sum() + np.abs(ba.coeffs).sum()
                     + abs(self.onsite.c_i) + abs(self.onsite.c_z))


def bloch_hamiltonian(model: ModelSpec, k) -> np.ndarray:
    """H(k); scalar ``k`` gives a 2x2 array, an array of ``K`` momenta gives ``(K, 2, 2)``."""
    return _hamiltonian(model, np.exp(1j * np.asarray(k, dtype=float)))


def surrogate_hamiltonian(model: ModelSpec, beta) -> np.ndarray:
    """H(beta) for complex ``beta``, the analytic continuation of H(k)."""
    beta = np.asarray(beta, dtype=complex)
    if np.any(beta == 0):
        raise DomainError("beta = 0 is a pole of the surrogate Hamiltonian")
    return _hamiltonian(model, beta)


def _hamiltonian(model: ModelSpec, beta: np.ndarray) -> np.ndarray:
    ab, ba = model.offdiagonal()
    d1, d2 = model.diagonal
    out = np.empty(beta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = d1
    out[..., 1, 1] = d2
    out[..., 0, 1] = ab(beta)
    out[..., 1, 0] = ba(beta)
    return out


def _principal_sqrt(z):
    """sqrt with Arg in (-pi/2, pi/2], independent of the sign of a zero imaginary part."""
    w = np.sqrt(np.asarray(z, dtype=complex))
    flip = (w.real == 0) & (w.imag < 0)
    return np.where(flip, -w, w)


def _eig_from_beta(model: ModelSpec, beta):
    ab, ba = model.offdiagonal()
    d1, d2 = model.diagonal
    half_tr = 0.5 * (d1 + d2)
    disc = (0.5 * (d1 - d2)) ** 2 + ab(beta) * ba(beta)
    root = _principal_sqrt(disc)
    return half_tr - root, half_tr + root


def bloch_eigenvalues(model: ModelSpec, k):
    """Closed-form ``(E_minus, E_plus)``; ``E_plus`` is the principal square-root branch."""
    e_minus, e_plus = _eig_from_beta(model, np.exp(1j * np.asarray(k, dtype=float)))
    if np.ndim(e_plus) == 0:
        return complex(e_minus), complex(e_plus)
    return e_minus, e_plus


def traceless_det(model: ModelSpec, beta):
    """det of ``H(beta) - Tr H(beta)/2``."""
    ab, ba = model.offdiagonal()
    d1, d2 = model.diagonal
    half_gap = 0.5 * (d1 - d2)
    return -(half_gap ** 2) - ab(beta) * ba(beta)


def char_polynomial(model: ModelSpec, e: complex) -> ComplexPolynomial:
    """Coefficients (ascending in beta) of ``beta**P * (h_ab h_ba - (d1 - E)(d2 - E))``.

    ``P`` is the model's pole order, so the zero set is that of ``det(H(beta) - E)``.
    """
    ab, ba = model.offdiagonal()
    d1, d2 = model.diagonal
    e = complex(e)
    prod = np.convolve(ab.coeffs, ba.coeffs)
    low = ab.low + ba.low
    shift = model.pole_order
    size = max(model.nominal_degree + 1, len(prod) + low + shift)
    coeffs = np.zeros(size, dtype=complex)
    coeffs[low + shift: low + shift + len(prod)] += prod
    coeffs[shift] -= (d1 - e) * (d2 - e)
    if not np.any(coeffs):
        raise DomainError("identically singular: det(H(beta) - E) vanishes for every beta")
    return ComplexPolynomial(coeffs, nominal_degree=model.nominal_degree)


def track_bands(model: ModelSpec, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalue strands along ``k`` by nearest-neighbour continuation.

    Strand 1 starts on the principal branch ``E_plus`` at ``k[0]``.
    """
    e_minus, e_plus = bloch_eigenvalues(model, np.atleast_1d(k))
    e1 = np.empty_like(e_plus)
    e2 = np.empty_like(e_plus)
    e1[0], e2[0] = e_plus[0], e_minus[0]
    for i in range(1, len(e_plus)):
        a, b = e_plus[i], e_minus[i]
        keep = abs(a - e1[i - 1]) + abs(b - e2[i - 1])
        swap = abs(b - e1[i - 1]) + abs(a - e2[i - 1])
        if swap < keep:
            a, b = b, a
        e1[i], e2[i] = a, b
    return e1, e2


def mirrored(model: ModelSpec) -> ModelSpec:
    """The spatially inverted chain (node order reversed, A and B exchanged)."""
    c = model.couplings
    o = model.onsite
    if isinstance(c, UnidirectionalCouplings):
        flipped = UnidirectionalCouplings(c.c_ab0, c.c_ba_n, c.c_ab_neg_m, c.n, c.m)
        return ModelSpec(model.variant, flipped, OnsiteParams(-o.c_i, -o.c_z))
    # exponent p of h_ba becomes exponent -p of the new h_ab, and vice versa
    flipped = BidirectionalCouplings(
        ab_left=c.ba_right[1:], ab_right=(c.ba_right[0],) + c.ba_left,
        ba_left=c.ab_right[1:], ba_right=(c.ab_right[0],) + c.ab_left,
    )
    return ModelSpec("H3", flipped, OnsiteParams(-o.c_i, -o.c_z))


_INDEXED = re.compile(r"^(ab|ba)\[(-?\d+)\]$")


def get_param(model: ModelSpec, path: str) -> complex:
    """Read a scalar parameter: ``c_ab0``, ``c_ab_neg_m``, ``c_ba_n``, ``c_i``, ``c_z``, ``ab[p]``, ``ba[p]``."""
    if path in ("c_i", "c_z"):
        return getattr(model.onsite, path)
    c = model.couplings
    if isinstance(c, UnidirectionalCouplings) and path in ("c_ab0", "c_ab_neg_m", "c_ba_n"):
        return getattr(c, path)
    match = _INDEXED.match(path)
    if match and isinstance(c, BidirectionalCouplings):
        side, p = match.group(1), int(match.group(2))
        left, right = (c.ab_left, c.ab_right) if side == "ab" else (c.ba_left, c.ba_right)
        if p < 0 and -p <= len(left):
            return left[-p - 1]
        if 0 <= p < len(right):
            return right[p]
    raise KeyError(f"unknown parameter {path!r} for variant {model.variant}")


def with_param(model: ModelSpec, path: str, value) -> ModelSpec:
    """Copy of ``model`` with one scalar parameter replaced (see :func:`get_param`)."""
    get_param(model, path)  # validates the path
    if path in ("c_i", "c_z"):
        return replace(model, onsite=replace(model.onsite, **{path: float(np.real(value))}))
    c = model.couplings
    if isinstance(c, UnidirectionalCouplings):
        return replace(model, couplings=replace(c, **{path: value}))
    side, p = _INDEXED.match(path).group(1), int(_INDEXED.match(path).group(2))
    if p < 0:
        name = f"{side}_left"
        values = list(getattr(c, name))
        values[-p - 1] = value
    else:
        name = f"{side}_right"
        values = list(getattr(c, name))
        values[p] = value
    return replace(model, couplings=replace(c, **{name: tuple(values)}))


def _enc(z: complex):
    z = complex(z)
    return [z.real, z.imag]


def model_to_dict(model: ModelSpec) -> dict:
    out = {"variant": model.variant, "c_i": model.onsite.c_i, "c_z": model.onsite.c_z}
    c = model.couplings
    if isinstance(c, UnidirectionalCouplings):
        out.update(m=c.m, n=c.n, c_ab0=_enc(c.c_ab0), c_ab_neg_m=_enc(c.c_ab_neg_m), c_ba_n=_enc(c.c_ba_n))
    else:
        out.update({name: [_enc(v) for v in getattr(c, name)]
                    for name in ("ab_left", "ab_right", "ba_left", "ba_right")})
    return out


def model_from_dict(data: dict) -> ModelSpec:
    """Build a model from the JSON schema documented in the README."""
    variant = data.get("variant", "H1")
    onsite = OnsiteParams(float(data.get("c_i", 0.0)), float(data.get("c_z", 0.0)))
    if variant == "H3":
        couplings = BidirectionalCouplings(*(tuple(data.get(name, ())) for name in
                                             ("ab_left", "ab_right", "ba_left", "ba_right")))
    else:
        try:
            couplings = UnidirectionalCouplings(data["c_ab0"], data["c_ab_neg_m"], data["c_ba_n"],
                                                data["m"], data["n"])
        except KeyError as exc:
            raise ValueError(f"model JSON is missing field {exc.args[0]!r}") from None
    return ModelSpec(variant, couplings, onsite)


def load_model(path: Union[str, Path]) -> ModelSpec:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))

"""Component values of the RLC realization and their synthesis from a model."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from ..errors import NotRepresentableError
from ..model import ModelSpec, UnidirectionalCouplings

__all__ = [
    "CircuitParams",
    "synthesize",
    "TABLE_I",
    "table_i_params",
    "table_i_model",
    "DEFAULT_FREQUENCY",
    "ESR_PRESETS",
]

DEFAULT_FREQUENCY = 200e3
ESR_PRESETS = {"ideal": 0.0, "low": 0.1, "measured": 0.5}


@dataclass(frozen=True)
class CircuitParams:
    """Capacitances (F), inductances (H) and resistances (ohm) of the chain.

    ``c_m`` couples the B node ``m`` cells to the left into an A node and
    ``c_n`` couples the A node ``n`` cells to the right into a B node; both are
    magnitudes, with ``m_sign`` / ``n_sign`` selecting an inverting INIC for
    negative couplings.  ``inic_leak`` is the reverse/forward capacitance ratio
    of a non-ideal INIC (0 is perfectly unidirectional, 1 a plain capacitor).
    """

    c0: float
    c_m: float
    c_n: float
    l_a: float
    l_b: float
    r0: float = 20.0
    esr: float = 0.0
    inic_leak: float = 0.0
    m: int = 2
    n: int = 1
    m_sign: int = 1
    n_sign: int = 1
    ra: float = 1e3
    ca: float = 10e-12

    def __post_init__(self):
        for name in ("c0", "c_m", "c_n", "l_a", "l_b", "r0"):
            v = float(getattr(self, name))
            if not v > 0:
                raise ValueError(f"{name} must be positive, got {v}")
            object.__setattr__(self, name, v)
        if not self.esr >= 0 or not 0 <= self.inic_leak <= 1:
            raise ValueError("esr must be >= 0 and inic_leak in [0, 1]")
        if self.m < 1 or self.n < 1:
            raise ValueError("coupling ranges must be positive")
        if self.m_sign not in (1, -1) or self.n_sign not in (1, -1):
            raise ValueError("polarities must be +1 or -1")

    @property
    def signed_cm(self) -> float:
        return self.m_sign * self.c_m

    @property
    def signed_cn(self) -> float:
        return self.n_sign * self.c_n

    @property
    def omega_a(self) -> float:
        """Resonance of the A sublattice, ``1 / sqrt(l_a (c0 + c_n))``."""
        return 1.0 / math.sqrt(self.l_a * (self.c0 + self.c_n))

    @property
    def omega_b(self) -> float:
        return 1.0 / math.sqrt(self.l_b * (self.c0 + self.c_m))

    @property
    def omega_r(self) -> float:
        """Drive frequency; the mean of the two sublattice resonances when detuned."""
        return 0.5 * (self.omega_a + self.omega_b)

    @property
    def detuned(self) -> bool:
        """True when ``l_a (c0 + c_n)`` and ``l_b (c0 + c_m)`` differ by more than 1e-6 relative."""
        a = self.l_a * (self.c0 + self.c_n)
        b = self.l_b * (self.c0 + self.c_m)
        return abs(a - b) > 1e-6 * max(a, b)

    def to_model(self) -> ModelSpec:
        """The unidirectional model realized at resonance (couplings in farads)."""
        return ModelSpec.h1(self.c0, self.signed_cm, self.signed_cn, self.m, self.n)

    def to_dict(self) -> dict:
        out = asdict(self)
        out = {"C_AB0": out.pop("c0"), "C_ABm": out.pop("c_m"), "C_ABn": out.pop("c_n"),
               "L_a": out.pop("l_a"), "L_b": out.pop("l_b"), **out}
        if math.isinf(out["r0"]):
            out["r0"] = "inf"
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "CircuitParams":
        d = dict(data)
        renames = {"C_AB0": "c0", "C_ABm": "c_m", "C_ABn": "c_n", "L_a": "l_a", "L_b": "l_b"}
        for old, new in renames.items():
            if old in d:
                d[new] = d.pop(old)
        if "r0" in d:
            d["r0"] = float(d["r0"])
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def with_(self, **changes) -> "CircuitParams":
        return replace(self, **changes)


def _real_coupling(value: complex, name: str) -> float:
    value = complex(value)
    if value.imag != 0:
        raise NotRepresentableError(f"not circuit-representable: {name} = {value} is complex")
    if value.real == 0:
        raise NotRepresentableError(f"not circuit-representable: {name} is zero")
    return value.real


def synthesize(model: ModelSpec, c0_phys: float, f_target="auto", r0: float = 20.0,
               esr: float = 0.0) -> CircuitParams:
    """Component values realizing a unidirectional model at ``f_target`` (Hz).

    The couplings are scaled so that ``c_ab0`` becomes ``c0_phys``; negative
    long-range couplings use the inverting INIC.  The inductors are chosen so
    that both sublattices resonate at ``f_target`` (``"auto"`` = 200 kHz).
    """
    c = model.couplings
    if not isinstance(c, UnidirectionalCouplings) or model.onsite.c_i or model.onsite.c_z:
        raise NotRepresentableError("only the unidirectional model without on-site terms maps onto the circuit")
    if not c0_phys > 0:
        raise ValueError("c0_phys must be positive")
    c0 = _real_coupling(c.c_ab0, "c_ab0")
    if c0 < 0:
        raise NotRepresentableError("not circuit-representable: c_ab0 must be positive (plain capacitor)")
    cm = _real_coupling(c.c_ab_neg_m, "c_ab_neg_m") / c0 * c0_phys
    cn = _real_coupling(c.c_ba_n, "c_ba_n") / c0 * c0_phys
    f = DEFAULT_FREQUENCY if f_target == "auto" else float(f_target)
    if not f > 0:
        raise ValueError("f_target must be positive")
    w2 = (2 * math.pi * f) ** 2
    return CircuitParams(
        c0=c0_phys, c_m=abs(cm), c_n=abs(cn),
        l_a=1.0 / (w2 * (c0_phys + abs(cn))), l_b=1.0 / (w2 * (c0_phys + abs(cm))),
        r0=r0, esr=esr, m=c.m, n=c.n,
        m_sign=1 if cm > 0 else -1, n_sign=1 if cn > 0 else -1,
    )


# Phase -> (C_AB0, C_ABm, C_ABn, L_a, L_b) as printed, for m = 2, n = 1
TABLE_I = {
    1: (4.7e-9, 0.94e-9, 2e-9, 94.52e-6, 112.28e-6),
    2: (4.7e-9, 0.94e-9, 20e-9, 25.64e-6, 112.28e-6),
    3: (4.7e-9, 20e-9, 2e-9, 94.52e-6, 25.64e-6),
    4: (4.7e-9, 20e-9, 20e-9, 25.64e-6, 25.64e-6),
}


def table_i_params(phase: int, r0: float = 20.0, esr: float = 0.0) -> CircuitParams:
    """Printed component values of one of the four braiding phases."""
    c0, cm, cn, la, lb = TABLE_I[phase]
    return CircuitParams(c0, cm, cn, la, lb, r0=r0, esr=esr, m=2, n=1)


def table_i_model(phase: int) -> ModelSpec:
    """Dimensionless model (couplings in nF) of a braiding phase."""
    c0, cm, cn, _, _ = TABLE_I[phase]
    return ModelSpec.h1(c0 * 1e9, cm * 1e9, cn * 1e9, 2, 1)

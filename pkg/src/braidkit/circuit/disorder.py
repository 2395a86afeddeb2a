"""Component-tolerance sampling for models and circuits."""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Union

import numpy as np

from ..model import BidirectionalCouplings, ModelSpec, OnsiteParams, UnidirectionalCouplings
from .params import CircuitParams

__all__ = ["disorder_sample"]

_CIRCUIT_FIELDS = ("c0", "c_m", "c_n", "l_a", "l_b", "r0", "esr")


def disorder_sample(obj: Union[ModelSpec, CircuitParams], tolerance_pct: float, seed: int):
    """Copy of ``obj`` with every coupling or component scaled by an independent
    factor drawn uniformly from ``[1 - t, 1 + t]``, ``t = tolerance_pct / 100``.

    The draw depends only on ``seed``.  Infinite or zero values (``r0 = inf``,
    ``esr = 0``, absent couplings) stay as they are.
    """
    if not 0 <= tolerance_pct < 50:
        raise ValueError("tolerance_pct must lie in [0, 50)")
    t = tolerance_pct / 100.0
    rng = np.random.default_rng(seed)

    def factors(size):
        return rng.uniform(1 - t, 1 + t, size)

    if isinstance(obj, CircuitParams):
        f = factors(len(_CIRCUIT_FIELDS))
        changes = {}
        for name, x in zip(_CIRCUIT_FIELDS, f):
            v = getattr(obj, name)
            if math.isfinite(v) and v != 0:
                changes[name] = v * x
        return replace(obj, **changes)
    if not isinstance(obj, ModelSpec):
        raise TypeError(f"cannot perturb {type(obj).__name__}")
    c = obj.couplings
    if isinstance(c, UnidirectionalCouplings):
        f = factors(3)
        couplings = replace(c, c_ab0=c.c_ab0 * f[0], c_ab_neg_m=c.c_ab_neg_m * f[1], c_ba_n=c.c_ba_n * f[2])
    else:
        names = ("ab_left", "ab_right", "ba_left", "ba_right")
        sizes = [len(getattr(c, name)) for name in names]
        f = factors(sum(sizes))
        parts = {}
        start = 0
        for name, size in zip(names, sizes):
            parts[name] = tuple(v * x for v, x in zip(getattr(c, name), f[start:start + size]))
            start += size
        couplings = BidirectionalCouplings(**parts)
    g = factors(2)
    onsite = OnsiteParams(obj.onsite.c_i * g[0], obj.onsite.c_z * g[1])
    return ModelSpec(obj.variant, couplings, onsite)

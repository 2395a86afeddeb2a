"""Effective capacitances of the current-inversion negative impedance converter."""

from __future__ import annotations

import math

__all__ = ["inic_effective", "inic_halves", "lowpass_3db"]


def inic_effective(c1: float, c2: float, direction: str = "forward") -> float:
    """Capacitance seen through an INIC built from ``c1`` (converted) and ``c2`` (parallel).

    Forward coupling is ``c1 + c2``; reverse coupling is ``c2 - c1``, which can
    be zero or negative.
    """
    if c1 < 0 or c2 < 0:
        raise ValueError("capacitances must be non-negative")
    if direction == "forward":
        return c1 + c2
    if direction == "reverse":
        return c2 - c1
    raise ValueError(f"direction must be 'forward' or 'reverse', got {direction!r}")


def inic_halves(c: float, leak: float = 0.0) -> tuple[float, float]:
    """``(c1, c2)`` giving forward ``c`` and reverse ``leak * c``."""
    return 0.5 * c * (1.0 - leak), 0.5 * c * (1.0 + leak)


def lowpass_3db(r: float, c: float) -> float:
    """Corner frequency ``1 / (2 pi R C)`` of an RC low-pass filter, in Hz."""
    if not (r > 0 and c > 0):
        raise ValueError("R and C must be positive")
    return 1.0 / (2 * math.pi * r * c)

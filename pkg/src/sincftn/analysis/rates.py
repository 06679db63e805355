"""Symbol rates and capacity limits for OTDM/NOTDM sinc sequences."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..framing import n_extra_channels

MODES = ("otdm", "notdm")


def n_channels(n_lines: int, mode: str = "notdm") -> int:
    """Branch count per period: ``N`` for OTDM, ``N + floor(N/4)`` for NOTDM."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return n_lines + (n_extra_channels(n_lines) if mode == "notdm" else 0)


@dataclass(frozen=True)
class RateInput:
    n_lines: int
    line_spacing: float
    mode: str = "otdm"
    bits_per_symbol: int = 1

    def __post_init__(self) -> None:
        if self.n_lines < 1:
            raise ValueError("n_lines must be >= 1")
        if self.bits_per_symbol < 1:
            raise ValueError("bits_per_symbol must be >= 1")
        if not self.line_spacing > 0:
            raise ValueError("line_spacing must be positive")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class Rates:
    symbol_rate: float
    data_rate: float


def symbol_rate(inp: RateInput) -> Rates:
    rs = n_channels(inp.n_lines, inp.mode) * inp.line_spacing
    return Rates(rs, inp.bits_per_symbol * rs)


def rate_gain(n_lines: int) -> Fraction:
    """Exact NOTDM/OTDM symbol-rate ratio minus one."""
    return Fraction(n_channels(n_lines, "notdm"), n_channels(n_lines, "otdm")) - 1


def _check_powers(p_s: float, p_n: float, p_isi: float = 0.0) -> None:
    if p_s < 0:
        raise ValueError("signal power must be >= 0")
    if not p_n > 0:
        raise ValueError("noise power must be > 0")
    if p_isi < 0:
        raise ValueError("ISI power must be >= 0")


def shannon_capacity(p_s: float, p_n: float, n_lines: int, line_spacing: float) -> float:
    """``N*df*log2(1 + P_S/P_N)`` in bit/s."""
    _check_powers(p_s, p_n)
    return n_lines * line_spacing * float(np.log2(1.0 + p_s / p_n))


def distinguishable_signals(p_s: float, p_n: float, n_lines: int) -> float:
    """Sphere-packing count ``((P_S+P_N)/P_N) ** (N + floor(N/4))``."""
    _check_powers(p_s, p_n)
    return ((p_s + p_n) / p_n) ** n_channels(n_lines, "notdm")


def capacity_from_M(m: float, line_spacing: float) -> float:
    if m < 1:
        raise ValueError("M must be >= 1")
    return line_spacing * float(np.log2(m))


@dataclass(frozen=True)
class CapacityInput:
    p_s: float
    p_n: float
    p_isi: float
    n_lines: int
    line_spacing: float

    def __post_init__(self) -> None:
        _check_powers(self.p_s, self.p_n, self.p_isi)


def notdm_capacity(inp: CapacityInput) -> float:
    """Capacity with ISI treated as extra noise power."""
    if np.isinf(inp.p_isi):
        return 0.0
    sinr = inp.p_s / (inp.p_n + inp.p_isi)
    return n_channels(inp.n_lines, "notdm") * inp.line_spacing * float(np.log2(1.0 + sinr))

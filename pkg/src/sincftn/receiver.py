"""Coherent correlation receiver and 2-PAM decision mapping.

Branch ``i`` multiplies the received frame by its reference sequence
(the unmodulated sequence with the branch delay), optionally filters the
product, and integrates it over each frame slot. Outputs are scaled by the
noiseless single-branch response, so an isolated symbol reads as +-1.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .framing import FrameLayout, FrameWaveform, MuxConfig, SymbolFrame, _branch_bank
from .signal_core import SampledWaveform, SequenceSpec, TimeGrid, sample_sequence

RESPONSES = ("identity", "ideal_lowpass")


@dataclass(frozen=True)
class ReceiverConfig:
    """Receiver settings.

    Parameters
    ----------
    response
        ``"identity"`` (integrate and dump) or ``"ideal_lowpass"``.
    cutoff
        Low-pass cutoff in Hz, required for ``"ideal_lowpass"``.
    window_length
        Integration window in seconds; ``None`` means one period ``1/df``.
    epsilon
        Half-width of the uncertainty interval around the threshold, as a
        fraction of the nominal amplitude.
    """

    response: str = "identity"
    cutoff: float | None = None
    window_length: float | None = None
    epsilon: float = 0.0

    def __post_init__(self) -> None:
        if self.response not in RESPONSES:
            raise ValueError(f"response must be one of {RESPONSES}, got {self.response!r}")
        if self.response == "ideal_lowpass" and not (self.cutoff and self.cutoff > 0):
            raise ValueError("ideal_lowpass needs a positive cutoff")
        if self.window_length is not None and not self.window_length > 0:
            raise ValueError("window_length must be positive")
        if not (0.0 <= self.epsilon < 1.0):
            raise ValueError("epsilon must lie in [0, 1)")


@dataclass(frozen=True)
class DecisionResult:
    value: float
    symbol: int
    certain: bool


@dataclass(frozen=True, eq=False)
class Demodulated:
    """Decided symbols, certainty flags and raw correlator outputs."""

    frame: SymbolFrame
    certain: NDArray[np.bool_]
    values: NDArray[np.float64]


def reference_waveform(spec: SequenceSpec, mux: MuxConfig, branch: int, grid: TimeGrid) -> SampledWaveform:
    """Unmodulated sequence delayed to branch ``branch``."""
    if not 0 <= branch < mux.n_branches:
        raise IndexError(f"branch {branch} out of range")
    return sample_sequence(spec, grid, mux.delays[branch])


def _window_samples(layout: FrameLayout, cfg: ReceiverConfig) -> int:
    length = layout.spec.period if cfg.window_length is None else cfg.window_length
    n = int(round(length / layout.dt))
    if n < 1:
        raise ValueError("integration window shorter than one sample")
    if n > layout.n_samples:
        raise ValueError("integration window exceeds the frame duration")
    return n


def _filter(products: NDArray[np.float64], layout: FrameLayout, cfg: ReceiverConfig):
    if cfg.response == "identity":
        return products
    spectrum = np.fft.rfft(products, axis=-1)
    freqs = np.fft.rfftfreq(products.shape[-1], layout.dt)
    spectrum[..., freqs > cfg.cutoff] = 0.0
    return np.fft.irfft(spectrum, n=products.shape[-1], axis=-1)


def _window_sums(x: NDArray[np.float64], layout: FrameLayout, n_win: int) -> NDArray[np.float64]:
    # periodic trapezoid over [start, start + n_win) for every slot
    s = layout.samples_per_period
    starts = layout.slot_offset + np.arange(layout.n_symbols) * s + (s - n_win) // 2
    starts %= layout.n_samples
    doubled = np.concatenate([x, x], axis=-1)
    cs = np.concatenate([np.zeros(x.shape[:-1] + (1,)), np.cumsum(doubled, axis=-1)], axis=-1)
    return (cs[..., starts + n_win] - cs[..., starts]) * layout.dt


@functools.lru_cache(maxsize=32)
def _norms(layout: FrameLayout, cfg: ReceiverConfig) -> NDArray[np.float64]:
    # noiseless single-branch response with every symbol = +1
    bank = _branch_bank(layout, 0.0)
    sums = _window_sums(_filter(bank * bank, layout, cfg), layout, _window_samples(layout, cfg))
    return sums[:, 0]


def _check_layout(rx: FrameWaveform, spec: SequenceSpec, mux: MuxConfig) -> FrameLayout:
    layout = rx.layout
    if layout.spec != spec or layout.mux != mux:
        raise ValueError("received frame layout does not match spec/mux")
    if not np.isclose(rx.waveform.start_time, 0.0, atol=1e-3 * layout.dt):
        raise ValueError("received frame must start at t = 0")
    return layout


def correlator_outputs(
    rx: FrameWaveform, spec: SequenceSpec, mux: MuxConfig, cfg: ReceiverConfig = ReceiverConfig()
) -> NDArray[np.float64]:
    """Normalised correlator values for every (branch, symbol)."""
    layout = _check_layout(rx, spec, mux)
    n_win = _window_samples(layout, cfg)
    bank = _branch_bank(layout, 0.0)
    products = _filter(bank * rx.samples, layout, cfg)
    return _window_sums(products, layout, n_win) / _norms(layout, cfg)[:, None]


def correlate_symbol(
    rx: FrameWaveform,
    spec: SequenceSpec,
    mux: MuxConfig,
    cfg: ReceiverConfig,
    branch: int,
    m: int,
) -> float:
    """Normalised correlator output of branch ``branch`` for symbol ``m``."""
    layout = _check_layout(rx, spec, mux)
    if not 0 <= branch < mux.n_branches:
        raise IndexError(f"branch {branch} out of range")
    if not 0 <= m < layout.n_symbols:
        raise IndexError(f"symbol {m} not in frame")
    n_win = _window_samples(layout, cfg)
    ref = _branch_bank(layout, 0.0)[branch]
    product = _filter(ref * rx.samples, layout, cfg)
    s = layout.samples_per_period
    start = layout.slot_offset + m * s + (s - n_win) // 2
    idx = (start + np.arange(n_win)) % layout.n_samples
    return float(product[idx].sum() * layout.dt / _norms(layout, cfg)[branch])


def decide_2pam(value: float, cfg: ReceiverConfig = ReceiverConfig()) -> DecisionResult:
    """Threshold at zero (ties go to +1); flag values inside ``+-epsilon``."""
    if not np.isfinite(value):
        raise ValueError("correlator value must be finite")
    symbol = 1 if value >= 0 else -1
    return DecisionResult(float(value), symbol, bool(abs(value) > cfg.epsilon or cfg.epsilon == 0))


def demodulate_frame(
    rx: FrameWaveform, spec: SequenceSpec, mux: MuxConfig, cfg: ReceiverConfig = ReceiverConfig()
) -> Demodulated:
    """Correlate and decide every branch and symbol of ``rx``."""
    values = correlator_outputs(rx, spec, mux, cfg)
    symbols = np.where(values >= 0, 1, -1).astype(np.int8)
    certain = np.abs(values) > cfg.epsilon if cfg.epsilon > 0 else np.ones(values.shape, bool)
    return Demodulated(SymbolFrame(symbols), certain, values)

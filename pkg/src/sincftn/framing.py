"""OTDM/NOTDM framing of sinc sequence branches.

Each branch carries the sequence delayed by ``i * tau / (N*df)``. Symbols
are applied with a rectangular gate one repetition period long. All
branches share the same gate windows ("frame slots"): slot ``m`` spans one
period placed so that every branch peak ``m/df + delay_i`` falls inside it,
with the cluster of peaks centred in the slot. Because every branch holds a
constant symbol across a slot, integrating over that slot sees complete
periods of every branch product, which keeps OTDM exactly orthogonal.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .signal_core import (
    DEFAULT_SAMPLES_PER_PERIOD,
    SampledWaveform,
    SequenceSpec,
    TimeGrid,
    sequence_value_fourier,
)

_FIT_TOL = 1e-9


def n_extra_channels(n_lines: int) -> int:
    """Additional branches that fit at ``tau = 0.8``: ``floor(N/4)``."""
    if n_lines < 1:
        raise ValueError("n_lines must be >= 1")
    return n_lines // 4


def max_branches(n_lines: int, tau: float) -> int:
    """Largest branch count whose peaks fit within one period."""
    return int(math.floor(n_lines / tau + _FIT_TOL))


@dataclass(frozen=True)
class MuxConfig:
    """TDM geometry.

    ``delays[i] = i * tau * base_slot`` with ``base_slot = 1/(N*df)``.
    """

    tau: float
    n_branches: int
    base_slot: float
    delays: tuple[float, ...]

    def __post_init__(self) -> None:
        if not (0.0 < self.tau <= 1.0):
            raise ValueError(f"tau must lie in (0, 1], got {self.tau!r}")
        if int(self.n_branches) != self.n_branches or self.n_branches < 1:
            raise ValueError("n_branches must be a positive integer")
        if len(self.delays) != self.n_branches:
            raise ValueError("need one delay per branch")

    @property
    def span(self) -> float:
        """Time from the first to the last branch peak."""
        return self.delays[-1] - self.delays[0]


def make_mux(spec: SequenceSpec, tau: float, n_branches: int | None = None) -> MuxConfig:
    """Branch delays for acceleration factor ``tau``.

    ``n_branches`` defaults to the most branches that fit in one period,
    which is ``N`` at ``tau = 1`` and ``N + floor(N/4)`` at ``tau = 0.8``.
    """
    tau = float(tau)
    if not (0.0 < tau <= 1.0):
        raise ValueError(f"tau must lie in (0, 1], got {tau!r}")
    if n_branches is None:
        n_branches = max_branches(spec.n_lines, tau)
    if n_branches < 1:
        raise ValueError("n_branches must be >= 1")
    if n_branches * tau > spec.n_lines * (1 + _FIT_TOL):
        raise ValueError(
            f"branch overflow: {n_branches} branches at tau={tau} need "
            f"{n_branches * tau * spec.slot:.4g} s > period {spec.period:.4g} s"
        )
    base = spec.slot
    delays = tuple(i * tau * base for i in range(n_branches))
    return MuxConfig(tau, int(n_branches), base, delays)


def otdm_mux(spec: SequenceSpec) -> MuxConfig:
    return make_mux(spec, 1.0, spec.n_lines)


@dataclass(frozen=True, eq=False)
class SymbolFrame:
    """2-PAM symbols ``symbols[i, m]`` for branch ``i``, slot ``m``."""

    symbols: NDArray[np.int8] = field(repr=False)

    def __post_init__(self) -> None:
        s = np.asarray(self.symbols)
        if s.ndim != 2 or s.size == 0:
            raise ValueError("symbols must be a non-empty 2-D array (branches, symbols)")
        if not np.all((s == 1) | (s == -1)):
            raise ValueError("symbols must be exactly -1 or +1")
        s = s.astype(np.int8)
        s.setflags(write=False)
        object.__setattr__(self, "symbols", s)

    @property
    def n_branches(self) -> int:
        return self.symbols.shape[0]

    @property
    def n_symbols_per_branch(self) -> int:
        return self.symbols.shape[1]

    @classmethod
    def random(cls, n_branches: int, n_symbols: int, rng: np.random.Generator) -> "SymbolFrame":
        bits = rng.integers(0, 2, size=(n_branches, n_symbols), dtype=np.int8)
        return cls(1 - 2 * bits)

    @classmethod
    def constant(cls, n_branches: int, n_symbols: int, value: int = 1) -> "SymbolFrame":
        return cls(np.full((n_branches, n_symbols), value, dtype=np.int8))


@dataclass(frozen=True)
class FrameLayout:
    """Geometry of a cyclic frame of ``n_symbols`` slots."""

    spec: SequenceSpec
    mux: MuxConfig
    n_symbols: int
    samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD

    def __post_init__(self) -> None:
        if self.n_symbols < 1:
            raise ValueError("frame needs at least one symbol per branch")
        if self.samples_per_period < 2 * self.spec.n_lines:
            raise ValueError(
                f"samples_per_period must be >= 2N = {2 * self.spec.n_lines}"
            )
        if self.spec.n_lines % 2 == 0 and self.n_symbols % 2:
            # even-N sequences are antiperiodic over 1/df
            raise ValueError("even N needs an even number of symbols per frame")

    @property
    def dt(self) -> float:
        return self.spec.period / self.samples_per_period

    @property
    def n_samples(self) -> int:
        return self.n_symbols * self.samples_per_period

    @property
    def duration(self) -> float:
        return self.n_symbols * self.spec.period

    @property
    def slot_offset(self) -> int:
        """Start of slot 0 in samples, relative to ``t = 0``."""
        centre = 0.5 * self.mux.span / self.dt
        return int(round(centre - 0.5 * self.samples_per_period))

    @property
    def slot_start_time(self) -> float:
        return self.slot_offset * self.dt

    def grid(self, t0: float = 0.0) -> TimeGrid:
        return TimeGrid(t0, self.dt, self.n_samples)

    def slot_index(self, times: ArrayLike) -> NDArray[np.intp]:
        """Cyclic slot index of each time instant."""
        u = (np.asarray(times, dtype=np.float64) / self.dt) - self.slot_offset
        u = np.round(u, 6)
        return np.floor(u / self.samples_per_period).astype(np.intp) % self.n_symbols

    def peak_time(self, branch: int, m: int) -> float:
        return m * self.spec.period + self.mux.delays[branch]


@dataclass(frozen=True, eq=False)
class FrameWaveform:
    """A transmitted (or received) frame and the layout that produced it."""

    waveform: SampledWaveform
    layout: FrameLayout

    def __post_init__(self) -> None:
        if len(self.waveform) != self.layout.n_samples:
            raise ValueError("waveform length must equal n_symbols * samples_per_period")

    @property
    def samples(self) -> NDArray[np.float64]:
        return self.waveform.samples

    def with_samples(self, samples: ArrayLike) -> "FrameWaveform":
        return FrameWaveform(self.waveform.with_samples(samples), self.layout)


@functools.lru_cache(maxsize=32)
def _branch_bank(layout: FrameLayout, t0: float) -> NDArray[np.float64]:
    # unmodulated delayed sequences, one row per branch
    t = layout.grid(t0).times
    bank = np.stack([sequence_value_fourier(layout.spec, t - d) for d in layout.mux.delays])
    bank.setflags(write=False)
    return bank


@functools.lru_cache(maxsize=32)
def _slot_indices(layout: FrameLayout, t0: float) -> NDArray[np.intp]:
    idx = layout.slot_index(layout.grid(t0).times)
    idx.setflags(write=False)
    return idx


def _check_symbols(symbols: ArrayLike) -> NDArray[np.int8]:
    s = np.asarray(symbols)
    if s.ndim != 1 or s.size == 0:
        raise ValueError("symbols must be a non-empty 1-D sequence")
    if not np.all((s == 1) | (s == -1)):
        raise ValueError("symbols must be exactly -1 or +1")
    return s.astype(np.int8)


def modulate_branch(
    spec: SequenceSpec,
    mux: MuxConfig,
    branch: int,
    symbols: ArrayLike,
    grid: TimeGrid | None = None,
    samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD,
) -> SampledWaveform:
    """Gate branch ``branch`` of the sequence with cyclic 2-PAM ``symbols``.

    If ``grid`` is omitted the frame grid starting at ``t = 0`` is used.
    """
    if not 0 <= branch < mux.n_branches:
        raise IndexError(f"branch {branch} out of range")
    s = _check_symbols(symbols)
    layout = FrameLayout(spec, mux, s.size, samples_per_period)
    if grid is None:
        grid = layout.grid()
    t = grid.times
    base = sequence_value_fourier(spec, t - mux.delays[branch])
    return SampledWaveform(grid.sample_rate, grid.t0, s[layout.slot_index(t)] * base)


def multiplex(
    spec: SequenceSpec,
    mux: MuxConfig,
    frame: SymbolFrame,
    grid: TimeGrid | None = None,
    samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD,
) -> FrameWaveform:
    """Sum of all modulated branches over one cyclic frame."""
    if frame.n_branches != mux.n_branches:
        raise ValueError(
            f"frame has {frame.n_branches} branches, mux expects {mux.n_branches}"
        )
    layout = FrameLayout(spec, mux, frame.n_symbols_per_branch, samples_per_period)
    if grid is None:
        grid = layout.grid()
    if grid.n_samples != layout.n_samples or not np.isclose(grid.dt, layout.dt, rtol=1e-12):
        raise ValueError("grid does not match the frame layout")
    bank = _branch_bank(layout, float(grid.t0))
    slots = _slot_indices(layout, float(grid.t0))
    gates = frame.symbols[:, slots].astype(np.float64)
    y = np.einsum("ij,ij->j", gates, bank)
    return FrameWaveform(SampledWaveform(grid.sample_rate, grid.t0, y), layout)

"""Sinc pulses and Nyquist sinc pulse sequences.

A sinc pulse sequence with ``N`` comb lines spaced ``line_spacing`` apart is
the periodic waveform ``sin(N*pi*df*t) / (N*sin(pi*df*t))``. It is evaluated
here through its cosine series, which has no singular points; the closed
form is kept as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

DEFAULT_SAMPLES_PER_PERIOD = 64


class SamplingError(ValueError):
    """Raised when a time grid is too coarse for the sequence it carries."""


def _require_finite(name: str, value) -> None:
    if not np.all(np.isfinite(value)):
        raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class SequenceSpec:
    """Parameters of a sinc pulse sequence.

    Parameters
    ----------
    n_lines
        Number of comb lines ``N`` (at least 2).
    line_spacing
        Comb line spacing, equal to the pulse repetition rate (Hz).
    """

    n_lines: int
    line_spacing: float

    def __post_init__(self) -> None:
        if int(self.n_lines) != self.n_lines or self.n_lines < 2:
            raise ValueError(f"n_lines must be an integer >= 2, got {self.n_lines!r}")
        if not np.isfinite(self.line_spacing) or self.line_spacing <= 0:
            raise ValueError(f"line_spacing must be positive, got {self.line_spacing!r}")
        object.__setattr__(self, "n_lines", int(self.n_lines))
        object.__setattr__(self, "line_spacing", float(self.line_spacing))

    @property
    def bandwidth(self) -> float:
        """Total bandwidth ``N * df`` (Hz)."""
        return self.n_lines * self.line_spacing

    @property
    def period(self) -> float:
        """Pulse repetition period ``1/df`` (s)."""
        return 1.0 / self.line_spacing

    @property
    def slot(self) -> float:
        """Orthogonal branch spacing ``1/(N*df)`` (s)."""
        return 1.0 / self.bandwidth


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling instants ``t0 + k*dt`` for ``k = 0..n_samples-1``."""

    t0: float
    dt: float
    n_samples: int

    def __post_init__(self) -> None:
        _require_finite("t0", self.t0)
        if not np.isfinite(self.dt) or self.dt <= 0:
            raise ValueError("dt must be positive")
        if int(self.n_samples) != self.n_samples or self.n_samples < 2:
            raise ValueError("n_samples must be an integer >= 2")
        object.__setattr__(self, "n_samples", int(self.n_samples))

    @classmethod
    def over_periods(
        cls,
        spec: SequenceSpec,
        n_periods: int,
        samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD,
        t0: float = 0.0,
        endpoint: bool = False,
    ) -> "TimeGrid":
        """Grid covering ``n_periods`` repetition periods starting at ``t0``."""
        n = n_periods * samples_per_period + (1 if endpoint else 0)
        return cls(t0, spec.period / samples_per_period, n)

    @property
    def sample_rate(self) -> float:
        return 1.0 / self.dt

    @property
    def times(self) -> NDArray[np.float64]:
        return self.t0 + np.arange(self.n_samples) * self.dt


@dataclass(frozen=True, eq=False)
class SampledWaveform:
    """Uniformly sampled real waveform.

    ``samples[k]`` is the value at ``start_time + k / sample_rate``.
    """

    sample_rate: float
    start_time: float
    samples: NDArray[np.float64] = field(repr=False)

    def __post_init__(self) -> None:
        if not np.isfinite(self.sample_rate) or self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        _require_finite("start_time", self.start_time)
        samples = np.array(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        _require_finite("samples", samples)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate

    @property
    def times(self) -> NDArray[np.float64]:
        return self.start_time + np.arange(self.samples.size) * self.dt

    @property
    def end_time(self) -> float:
        return self.start_time + (self.samples.size - 1) * self.dt

    def with_samples(self, samples: ArrayLike) -> "SampledWaveform":
        """Same time axis, new sample values."""
        return SampledWaveform(self.sample_rate, self.start_time, samples)


def sinc_pulse(t: ArrayLike, bandwidth: float, center: float = 0.0):
    """Unit-peak sinc pulse ``sin(pi*B*(t-c)) / (pi*B*(t-c))``."""
    _require_finite("t", t)
    _require_finite("center", center)
    if not np.isfinite(bandwidth) or bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    return np.sinc(bandwidth * (np.asarray(t, dtype=np.float64) - center))


def sequence_value_fourier(spec: SequenceSpec, t: ArrayLike):
    """Sinc sequence evaluated as a cosine series (canonical evaluator).

    Odd ``N`` uses integer harmonics of ``df`` plus a DC term; even ``N``
    uses half-integer harmonics, so the waveform flips sign every period.
    """
    t = np.asarray(t, dtype=np.float64)
    n = spec.n_lines
    phase = 2.0 * np.pi * spec.line_spacing * t
    if n % 2:
        acc = np.full_like(t, 1.0 / n)
        for k in range(1, (n - 1) // 2 + 1):
            acc = acc + (2.0 / n) * np.cos(k * phase)
    else:
        acc = np.zeros_like(t)
        for k in range(1, n // 2 + 1):
            acc = acc + (2.0 / n) * np.cos((k - 0.5) * phase)
    return acc if acc.ndim else float(acc)


def sequence_value_closed(spec: SequenceSpec, t: ArrayLike):
    """Sinc sequence from the Dirichlet-kernel closed form.

    The argument is reduced to ``df*t = k + r`` with ``|r| <= 1/2`` before
    evaluation so the ratio stays well conditioned near period boundaries.
    At ``r = 0`` the analytic limit ``(-1)**(k*(N-1))`` is returned.
    """
    t = np.asarray(t, dtype=np.float64)
    n = spec.n_lines
    x = spec.line_spacing * t
    k = np.round(x)
    r = x - k
    sign = np.where((k * (n - 1)) % 2 == 0, 1.0, -1.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.sin(n * np.pi * r) / (n * np.sin(np.pi * r))
    out = sign * np.where(r == 0.0, 1.0, ratio)
    return out if out.ndim else float(out)


def sample_sequence(spec: SequenceSpec, grid: TimeGrid, delay: float = 0.0) -> SampledWaveform:
    """Sample the sequence delayed by ``delay`` on ``grid``."""
    _require_finite("delay", delay)
    if grid.dt > spec.slot * (1 + 1e-12):
        raise SamplingError(
            f"grid step {grid.dt:.3e} s exceeds 1/(N*df) = {spec.slot:.3e} s"
        )
    values = sequence_value_fourier(spec, grid.times - delay)
    return SampledWaveform(grid.sample_rate, grid.t0, values)


def _window_samples(w: SampledWaveform, t_start: float, t_end: float):
    """Times and values of ``w`` on ``[t_start, t_end]``, endpoints interpolated."""
    tol = 1e-9 * w.dt
    if t_start < w.start_time - tol or t_end > w.end_time + tol:
        raise ValueError("integration window is not covered by the waveform")
    pos = (np.array([t_start, t_end]) - w.start_time) / w.dt
    # snap endpoints sitting on the grid up to rounding
    snapped = np.round(pos)
    pos = np.where(np.abs(pos - snapped) < 1e-6, snapped, pos)
    lo, hi = int(np.ceil(pos[0])), int(np.floor(pos[1]))
    idx = np.arange(lo, hi + 1)
    t = list(w.start_time + idx * w.dt)
    v = list(w.samples[lo : hi + 1])
    if pos[0] < lo:
        t.insert(0, t_start)
        v.insert(0, np.interp(pos[0], np.arange(w.samples.size), w.samples))
    if pos[1] > hi:
        t.append(t_end)
        v.append(np.interp(pos[1], np.arange(w.samples.size), w.samples))
    return np.asarray(t), np.asarray(v)


def inner_product(a: SampledWaveform, b: SampledWaveform, window: tuple[float, float]) -> float:
    """Trapezoidal approximation of the integral of ``a*b`` over ``window``."""
    if not np.isclose(a.sample_rate, b.sample_rate, rtol=1e-12, atol=0.0):
        raise ValueError("waveforms have different sample rates")
    offset = (b.start_time - a.start_time) * a.sample_rate
    if abs(offset - round(offset)) > 1e-6:
        raise ValueError("waveforms are sampled on different grids")
    t_start, t_end = window
    if not t_end > t_start:
        raise ValueError("window must have positive length")
    ta, va = _window_samples(a, t_start, t_end)
    tb, vb = _window_samples(b, t_start, t_end)
    if ta.size != tb.size:
        raise ValueError("waveforms are sampled on different grids")
    return float(np.trapezoid(va * vb, ta))

"""Additive white Gaussian noise calibrated to Eb/N0."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .framing import FrameWaveform


@dataclass(frozen=True)
class ChannelConfig:
    ebn0_db: float
    seed: int = 0
    enabled: bool = True

    def __post_init__(self) -> None:
        if not np.isfinite(self.ebn0_db):
            raise ValueError("ebn0_db must be finite")


def point_seed(master_seed: int, *keys: int) -> np.random.SeedSequence:
    """Independent seed stream for one sweep point."""
    return np.random.SeedSequence([int(master_seed), *map(int, keys)])


def measure_bit_energy(w: FrameWaveform) -> float:
    """Frame energy divided by the number of bits it carries."""
    n_bits = w.layout.mux.n_branches * w.layout.n_symbols
    if n_bits == 0 or len(w.waveform) == 0:
        raise ValueError("empty frame")
    # cyclic frame: the trapezoid rule reduces to a plain sum
    energy = float(np.dot(w.samples, w.samples)) * w.waveform.dt
    return energy / n_bits


def noise_sigma(eb: float, ebn0_db: float, sample_rate: float) -> float:
    """Per-sample noise standard deviation for ``N0/2`` two-sided PSD."""
    n0 = eb / 10.0 ** (ebn0_db / 10.0)
    return float(np.sqrt(0.5 * n0 * sample_rate))


def add_awgn(
    w: FrameWaveform,
    cfg: ChannelConfig,
    rng: np.random.Generator | None = None,
    eb: float | None = None,
) -> FrameWaveform:
    """Add white Gaussian noise with per-sample variance ``(N0/2) * fs``.

    ``N0`` follows from the measured bit energy of ``w`` (or ``eb`` when
    given) and ``cfg.ebn0_db``. Without ``rng`` a generator seeded from
    ``cfg.seed`` is used, so identical inputs give identical output.
    """
    if not cfg.enabled:
        return w
    if eb is None:
        eb = measure_bit_energy(w)
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    sigma = noise_sigma(eb, cfg.ebn0_db, w.waveform.sample_rate)
    noise = rng.standard_normal(len(w.waveform)) * sigma
    return w.with_samples(w.samples + noise)

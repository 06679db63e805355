"""Theoretical and Monte Carlo bit error rates, and empirical ISI power."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc
from statsmodels.stats.proportion import proportion_confint

from ..channel import ChannelConfig, add_awgn, measure_bit_energy, point_seed
from ..framing import MuxConfig, SymbolFrame, multiplex
from ..receiver import ReceiverConfig, correlator_outputs
from ..signal_core import DEFAULT_SAMPLES_PER_PERIOD, SequenceSpec

CONFIDENCE = 0.99
DEFAULT_SYMBOLS_PER_FRAME = 256
REFERENCE_N_SYMBOLS = 2**18


def q_function(x):
    """Gaussian tail probability ``P(Z > x)``."""
    return 0.5 * erfc(np.asarray(x, dtype=np.float64) / math.sqrt(2.0))


@dataclass(frozen=True)
class TheoreticalBer:
    """BER forms evaluated for one ``dmin^2`` and ``Eb/N0``.

    ``literal`` applies Q to ``dmin^2 * Eb/N0`` directly; ``sqrt_form`` to
    its square root (the usual minimum-distance form); ``baseline`` is
    antipodal signalling with a matched filter, ``Q(sqrt(2 Eb/N0))``.
    """

    literal: float
    sqrt_form: float
    baseline: float


def ber_theoretical(dmin_squared: float, ebn0_linear: float) -> TheoreticalBer:
    if dmin_squared < 0 or ebn0_linear < 0:
        raise ValueError("inputs must be nonnegative")
    arg = dmin_squared * ebn0_linear
    if math.isinf(ebn0_linear) and dmin_squared == 0:
        arg = 0.0
    return TheoreticalBer(
        literal=float(q_function(arg)),
        sqrt_form=float(q_function(math.sqrt(arg))),
        baseline=float(q_function(math.sqrt(2.0 * ebn0_linear))),
    )


def ber_baseline(ebn0_db):
    """Antipodal matched-filter BER at ``ebn0_db`` (vectorised)."""
    return q_function(np.sqrt(2.0 * 10.0 ** (np.asarray(ebn0_db, dtype=np.float64) / 10.0)))


def wilson_interval(n_errors: int, n_bits: int, confidence: float = CONFIDENCE) -> tuple[float, float]:
    """Two-sided Wilson score interval; one-sided upper bound at zero errors."""
    if n_bits <= 0:
        raise ValueError("n_bits must be positive")
    if n_errors == 0:
        # rule of three, generalised to the requested confidence
        return 0.0, min(1.0, -math.log(1.0 - confidence) / n_bits)
    lo, hi = proportion_confint(n_errors, n_bits, alpha=1.0 - confidence, method="wilson")
    return float(lo), float(hi)


@dataclass(frozen=True)
class BerPoint:
    ebn0_db: float
    ber: float
    n_errors: int
    n_bits: int
    ci_low: float
    ci_high: float


@dataclass(frozen=True)
class BerCurve:
    points: tuple[BerPoint, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(sorted(self.points, key=lambda p: p.ebn0_db)))

    def __iter__(self):
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def ebn0_db(self) -> np.ndarray:
        return np.array([p.ebn0_db for p in self.points])

    @property
    def ber(self) -> np.ndarray:
        return np.array([p.ber for p in self.points])


def _frame_count(n_symbols: int, n_branches: int, symbols_per_frame: int) -> int:
    return max(1, math.ceil(n_symbols / (n_branches * symbols_per_frame)))


def _check_frame_size(symbols_per_frame: int) -> None:
    if symbols_per_frame < 3:
        raise ValueError("symbols_per_frame must be >= 3 (edge symbols are discarded)")


def simulate_point(
    spec: SequenceSpec,
    mux: MuxConfig,
    rx_cfg: ReceiverConfig,
    ebn0_db: float,
    n_symbols: int,
    seed: np.random.SeedSequence,
    symbols_per_frame: int = DEFAULT_SYMBOLS_PER_FRAME,
    samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD,
    noise: bool = True,
) -> BerPoint:
    """BER at one Eb/N0, reproducible from ``seed`` alone."""
    _check_frame_size(symbols_per_frame)
    sym_seed, noise_seed = seed.spawn(2)
    sym_rng = np.random.default_rng(sym_seed)
    noise_rng = np.random.default_rng(noise_seed)
    channel = ChannelConfig(ebn0_db, enabled=noise)

    n_errors = n_bits = 0
    for _ in range(_frame_count(n_symbols, mux.n_branches, symbols_per_frame)):
        frame = SymbolFrame.random(mux.n_branches, symbols_per_frame, sym_rng)
        tx = multiplex(spec, mux, frame, samples_per_period=samples_per_period)
        rx = add_awgn(tx, channel, noise_rng, eb=measure_bit_energy(tx))
        values = correlator_outputs(rx, spec, mux, rx_cfg)[:, 1:-1]
        decided = np.where(values >= 0, 1, -1)
        n_errors += int(np.count_nonzero(decided != frame.symbols[:, 1:-1]))
        n_bits += values.size
    lo, hi = wilson_interval(n_errors, n_bits)
    return BerPoint(float(ebn0_db), n_errors / n_bits, n_errors, n_bits, lo, hi)


def ber_monte_carlo(
    spec: SequenceSpec,
    mux: MuxConfig,
    rx_cfg: ReceiverConfig,
    ebn0_db: list[float],
    n_symbols: int,
    master_seed: int,
    *,
    stream: int = 0,
    symbols_per_frame: int = DEFAULT_SYMBOLS_PER_FRAME,
    samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD,
    noise: bool = True,
    threads: int = 1,
) -> BerCurve:
    """Monte Carlo BER curve.

    Each point ``k`` draws symbols and noise from streams seeded by
    ``(master_seed, stream, k)``, so results do not depend on ``threads``
    or on evaluation order. ``n_symbols`` counts transmitted symbols over
    all branches; the first and last symbol of every branch in every frame
    are not counted.
    """
    if len(ebn0_db) == 0:
        raise ValueError("empty Eb/N0 list")
    _check_frame_size(symbols_per_frame)

    def run(k: int) -> BerPoint:
        return simulate_point(
            spec, mux, rx_cfg, ebn0_db[k], n_symbols, point_seed(master_seed, stream, k),
            symbols_per_frame, samples_per_period, noise,
        )

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        points = list(pool.map(run, range(len(ebn0_db))))
    return BerCurve(tuple(points))


@dataclass(frozen=True)
class IsiEstimate:
    """Empirical ISI power and its standard error (normalised units)."""

    power: float
    stderr: float
    n_samples: int

    def __float__(self) -> float:
        return self.power


def estimate_isi_power(
    spec: SequenceSpec,
    mux: MuxConfig,
    cfg: ReceiverConfig,
    n_symbols: int,
    seed: int = 0,
    symbols_per_frame: int = DEFAULT_SYMBOLS_PER_FRAME,
    samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD,
) -> IsiEstimate:
    """Variance of noiseless correlator error over interior symbols."""
    if n_symbols < 1000:
        raise ValueError("n_symbols must be >= 1000")
    _check_frame_size(symbols_per_frame)
    rng = np.random.default_rng(point_seed(seed, 0))
    errors = []
    for _ in range(_frame_count(n_symbols, mux.n_branches, symbols_per_frame)):
        frame = SymbolFrame.random(mux.n_branches, symbols_per_frame, rng)
        tx = multiplex(spec, mux, frame, samples_per_period=samples_per_period)
        values = correlator_outputs(tx, spec, mux, cfg)
        errors.append((values - frame.symbols)[:, 1:-1].ravel())
    err = np.concatenate(errors)
    power = float(np.var(err))
    # standard error of the variance estimate
    stderr = float(np.std((err - err.mean()) ** 2) / math.sqrt(err.size))
    return IsiEstimate(power, stderr, int(err.size))


def ebn0_at_ber(curve: BerCurve, target: float) -> float | None:
    """Lowest Eb/N0 at which the curve reaches ``target``.

    Linear interpolation of ``log10(BER)`` between the two points that first
    bracket the target. ``None`` when the curve never gets there.
    """
    pts = [p for p in curve.points]
    for a, b in zip(pts, pts[1:]):
        if a.ber <= target:
            return a.ebn0_db
        if b.ber <= target:
            if b.ber == 0:
                return b.ebn0_db
            la, lb, lt = math.log10(a.ber), math.log10(b.ber), math.log10(target)
            return a.ebn0_db + (lt - la) / (lb - la) * (b.ebn0_db - a.ebn0_db)
    if pts and pts[-1].ber <= target:
        return pts[-1].ebn0_db
    return None

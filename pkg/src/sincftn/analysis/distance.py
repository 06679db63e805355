"""Exhaustive minimum Euclidean distance search over difference sequences."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ..framing import FrameLayout, MuxConfig, _branch_bank, _slot_indices
from ..signal_core import DEFAULT_SAMPLES_PER_PERIOD, SequenceSpec

MAX_SEARCH_LENGTH = 12
_CHUNK = 1 << 16
_TIE_TOL = 1e-9

INTEGRATION_SPAN = "full cyclic frame; d^2 = integral |dS|^2 dt / (2 Eb), Eb = single-symbol energy"


@dataclass(frozen=True)
class DminResult:
    dmin_squared: float
    argmin: tuple[int, ...]
    tau: float
    n_lines: int
    length: int
    n_branches: int
    integration_span: str = INTEGRATION_SPAN

    @property
    def positions(self) -> list[tuple[int, int]]:
        """(branch, symbol) of each nonzero entry of the minimising difference."""
        return [position(k, self.n_branches) for k, e in enumerate(self.argmin) if e]


def position(k: int, n_branches: int) -> tuple[int, int]:
    """Search index ``k`` -> (branch, symbol), filled slot by slot."""
    return k % n_branches, k // n_branches


def search_layout(spec: SequenceSpec, mux: MuxConfig, length: int, samples_per_period: int) -> FrameLayout:
    """Smallest valid cyclic frame holding ``length`` symbol positions."""
    m = max(1, math.ceil(length / mux.n_branches))
    if spec.n_lines % 2 == 0 and m % 2:
        m += 1
    return FrameLayout(spec, mux, m, samples_per_period)


def position_basis(layout: FrameLayout, length: int) -> NDArray[np.float64]:
    """Waveform of a unit symbol at each search position (rows)."""
    bank = _branch_bank(layout, 0.0)
    slots = _slot_indices(layout, 0.0)
    rows = []
    for k in range(length):
        i, m = position(k, layout.mux.n_branches)
        rows.append(np.where(slots == m, bank[i], 0.0))
    return np.array(rows)


def difference_alphabet(length: int) -> NDArray[np.int8]:
    """All nonzero sequences over {-2, 0, +2}, lexicographic in (-2, 0, 2)."""
    digits = np.indices((3,) * length, dtype=np.int8).reshape(length, -1).T
    e = (2 * (digits - 1)).astype(np.int8)
    return e[np.any(e != 0, axis=1)]


def min_distance(
    spec: SequenceSpec,
    mux: MuxConfig,
    length: int,
    samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD,
) -> DminResult:
    """Minimum normalised squared distance between distinct transmit frames.

    Every nonzero difference sequence over {-2, 0, +2} on the first
    ``length`` symbol positions is tried. The squared distance of a
    difference ``e`` is ``e^T G e / (2 Eb)`` where ``G`` is the Gram matrix
    of the per-position waveforms. Ties keep the first sequence found.
    """
    if length < 1:
        raise ValueError("search length must be >= 1")
    if length > MAX_SEARCH_LENGTH:
        raise ValueError(
            f"search length {length} exceeds the exhaustive limit of {MAX_SEARCH_LENGTH}"
        )
    layout = search_layout(spec, mux, length, samples_per_period)
    basis = position_basis(layout, length)
    gram = basis @ basis.T * layout.dt
    eb = float(gram[0, 0])
    diffs = difference_alphabet(length)

    d2 = np.empty(len(diffs))
    for start in range(0, len(diffs), _CHUNK):
        e = diffs[start : start + _CHUNK].astype(np.float64)
        d2[start : start + _CHUNK] = np.sum((e @ gram) * e, axis=1) / (2.0 * eb)
    best = float(d2.min())
    # near-ties differ only by rounding; keep the first in enumeration order
    best_idx = int(np.flatnonzero(d2 <= best + _TIE_TOL * max(1.0, abs(best)))[0])
    return DminResult(
        dmin_squared=max(float(d2[best_idx]), 0.0),
        argmin=tuple(int(v) for v in diffs[best_idx]),
        tau=mux.tau,
        n_lines=spec.n_lines,
        length=length,
        n_branches=mux.n_branches,
    )

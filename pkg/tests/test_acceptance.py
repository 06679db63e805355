"""Acceptance gate: one test group per criterion, summarised at the end of the run."""

import json
import math
import os
from fractions import Fraction

import numpy as np
import pytest

from oracles import naive_dmin
from sincftn import (
    ReceiverConfig,
    SequenceSpec,
    SymbolFrame,
    TimeGrid,
    demodulate_frame,
    inner_product,
    make_mux,
    multiplex,
    otdm_mux,
    sample_sequence,
    sequence_value_closed,
    sequence_value_fourier,
)
from sincftn.analysis import (
    CapacityInput,
    RateInput,
    ber_baseline,
    ber_monte_carlo,
    capacity_from_M,
    distinguishable_signals,
    ebn0_at_ber,
    min_distance,
    notdm_capacity,
    rate_gain,
    symbol_rate,
)
from sincftn.analysis.ber import BerCurve
from sincftn.cli import main
from sincftn.cli.main import read_ber_csv

DF = 10e9
RX = ReceiverConfig()


# 1 -------------------------------------------------------------------------

@pytest.mark.criterion("1 rate gain, exact")
@pytest.mark.parametrize("n, gain", [(4, Fraction(1, 4)), (8, Fraction(1, 4)), (12, Fraction(1, 4)),
                                     (5, Fraction(1, 5)), (6, Fraction(1, 6))])
def test_rate_gain_exact(n, gain, note):
    r_otdm = symbol_rate(RateInput(n, DF, "otdm")).symbol_rate
    r_notdm = symbol_rate(RateInput(n, DF, "notdm")).symbol_rate
    measured = Fraction(r_notdm) / Fraction(r_otdm) - 1
    assert measured == gain
    assert rate_gain(n) == gain
    note(f"N={n}: {measured}")


# 2 -------------------------------------------------------------------------

@pytest.mark.criterion("2 orthogonality, 1e-6 / series vs closed form, 1e-9")
@pytest.mark.parametrize("n", range(2, 13))
def test_orthogonality(n):
    spec = SequenceSpec(n, DF)
    # two periods so every shifted copy is sampled over a full window
    grid = TimeGrid.over_periods(spec, 2, samples_per_period=64 * n)
    window = (0.0, spec.period)
    ref = sample_sequence(spec, grid)
    auto = inner_product(ref, ref, window) / spec.period * n
    assert abs(auto - 1.0) < 1e-6
    for k in range(1, n):
        shifted = sample_sequence(spec, grid, delay=k * spec.slot)
        cross = inner_product(ref, shifted, window) / spec.period * n
        assert abs(cross) < 1e-6, k


@pytest.mark.criterion("2 orthogonality, 1e-6 / series vs closed form, 1e-9")
@pytest.mark.parametrize("n", range(2, 13))
def test_series_closed_agree(n):
    spec = SequenceSpec(n, DF)
    t = np.random.default_rng(1000 + n).uniform(-5 * spec.period, 5 * spec.period, 1000)
    err = np.abs(sequence_value_fourier(spec, t) - sequence_value_closed(spec, t))
    assert err.max() < 1e-9


# 3 -------------------------------------------------------------------------

@pytest.fixture(scope="module")
def otdm_curve():
    spec = SequenceSpec(4, DF)
    return ber_monte_carlo(spec, otdm_mux(spec), RX, [3.0, 5.0, 7.0], 100_000, 2024)


@pytest.mark.criterion("3 OTDM BER inside 99% Wilson CI")
@pytest.mark.parametrize("k", range(3))
def test_otdm_ber_theory(otdm_curve, k, note):
    p = otdm_curve.points[k]
    theory = ber_baseline(p.ebn0_db)
    note(f"{p.ebn0_db:g} dB: {p.ber:.3e} in [{p.ci_low:.3e}, {p.ci_high:.3e}], theory {theory:.3e}")
    assert p.ci_low <= theory <= p.ci_high


# 4 -------------------------------------------------------------------------

@pytest.fixture(scope="module")
def preset_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("preset")
    code = main(["ber-sweep", "--preset", "paper", "--output", str(out),
                 "--threads", str(os.cpu_count() or 1)])
    assert code == 0
    curves = read_ber_csv(out / "ber_curve.csv")
    return BerCurve(tuple(curves["otdm"])), BerCurve(tuple(curves["notdm"]))


@pytest.mark.criterion("4a NOTDM BER >= OTDM BER at every point")
def test_notdm_ordering(preset_run, note):
    otdm, notdm = preset_run
    assert len(otdm.points) == len(notdm.points) == 15
    assert np.array_equal(otdm.ebn0_db, notdm.ebn0_db)
    assert min(p.n_bits for p in otdm.points) >= 2**18 * 254 // 256 - 4
    worst = int(np.argmin(notdm.ber - otdm.ber))
    note(f"smallest gap {notdm.ber[worst] - otdm.ber[worst]:.3e} at {otdm.ebn0_db[worst]:g} dB")
    assert np.all(notdm.ber >= otdm.ber)


@pytest.mark.criterion("4b NOTDM penalty at BER 1e-3 positive")
def test_penalty_at_1e3(preset_run, note):
    otdm, notdm = preset_run
    e_otdm = ebn0_at_ber(otdm, 1e-3)
    e_notdm = ebn0_at_ber(notdm, 1e-3)
    fmt = lambda e: "not reached" if e is None else f"{e:.2f} dB"
    note(f"OTDM {fmt(e_otdm)}, NOTDM {fmt(e_notdm)}, NOTDM floor {notdm.ber.min():.3e}")
    assert e_otdm is not None and e_notdm is not None
    assert e_notdm - e_otdm > 0


@pytest.mark.criterion("4c NOTDM penalty 6 +/- 2 dB at lowest resolved BER")
def test_penalty_lowest_resolved(preset_run, note):
    otdm, notdm = preset_run
    resolved = [c.ber[c.ber > 0].min() for c in (otdm, notdm)]
    target = max(resolved)
    e_otdm, e_notdm = ebn0_at_ber(otdm, target), ebn0_at_ber(notdm, target)
    assert e_otdm is not None and e_notdm is not None
    penalty = e_notdm - e_otdm
    note(f"BER {target:.3e}: penalty {penalty:.2f} dB")
    assert abs(penalty - 6.0) <= 2.0


# 5 -------------------------------------------------------------------------

@pytest.mark.criterion("5 noiseless OTDM round trip, zero errors")
@pytest.mark.parametrize("n", [4, 5, 8])
def test_noiseless_round_trip(n):
    spec = SequenceSpec(n, DF)
    mux = make_mux(spec, 1.0)
    assert mux.n_branches == n
    m = 10_000 // n
    frame = SymbolFrame.random(n, m, np.random.default_rng(n))
    assert frame.symbols.size == 10_000
    rx = demodulate_frame(multiplex(spec, mux, frame), spec, mux, RX)
    assert np.count_nonzero(rx.frame.symbols != frame.symbols) == 0


# 6 -------------------------------------------------------------------------

@pytest.mark.criterion("6 d_min brute force equivalence")
@pytest.mark.parametrize("tau", [1.0, 0.9, 0.8])
@pytest.mark.parametrize("length", range(1, 7))
def test_dmin_matches_oracle(tau, length):
    spec = SequenceSpec(4, DF)
    mux = make_mux(spec, tau)
    res = min_distance(spec, mux, length)
    ref, argmins = naive_dmin(spec, mux, length)
    assert res.dmin_squared == pytest.approx(ref, abs=1e-12)
    assert res.argmin in argmins


@pytest.mark.criterion("6 d_min brute force equivalence")
def test_dmin_tau_one_single_symbol():
    spec = SequenceSpec(4, DF)
    res = min_distance(spec, make_mux(spec, 1.0), 6)
    assert sum(1 for v in res.argmin if v) == 1


@pytest.mark.criterion("6 d_min brute force equivalence")
def test_dmin_non_increasing(note):
    spec = SequenceSpec(4, DF)
    d = [min_distance(spec, make_mux(spec, tau), 6).dmin_squared for tau in (1.0, 0.9, 0.8)]
    note("d_min^2 = " + ", ".join(f"{v:.4f}" for v in d))
    assert all(b <= a + 1e-12 for a, b in zip(d, d[1:]))


# 7 -------------------------------------------------------------------------

@pytest.mark.criterion("7 capacity identities, 1e-12 relative")
def test_capacity_identities():
    rng = np.random.default_rng(77)
    for _ in range(100):
        p_s = float(rng.uniform(0.0, 100.0))
        p_n = float(rng.uniform(1e-3, 10.0))
        n = int(rng.integers(2, 33))
        df = float(rng.uniform(1e6, 1e11))
        expected = (n + n // 4) * df * math.log2(1 + p_s / p_n)
        composed = capacity_from_M(distinguishable_signals(p_s, p_n, n), df)
        with_isi = notdm_capacity(CapacityInput(p_s, p_n, 0.0, n, df))
        for got in (composed, with_isi):
            assert got == pytest.approx(expected, rel=1e-12, abs=0.0 if expected else 1e-300)


# 8 -------------------------------------------------------------------------

@pytest.mark.criterion("8 ber-sweep byte identical across reruns and workers")
def test_determinism(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "channel": {"ebn0_db": [0.0, 4.0, 8.0], "master_seed": 8},
        "run": {"n_symbols": 20_000},
    }))
    blobs = []
    for name, threads in [("a", 1), ("b", 1), ("c", 4)]:
        out = tmp_path / name
        assert main(["ber-sweep", "--config", str(cfg), "--output", str(out),
                     "--threads", str(threads)]) == 0
        blobs.append(((out / "ber_curve.csv").read_bytes(), (out / "manifest.json").read_bytes()))
    assert blobs[0] == blobs[1] == blobs[2]

import numpy as np
import pytest

from sincftn import SymbolFrame, multiplex
from sincftn.channel import ChannelConfig, add_awgn, measure_bit_energy, noise_sigma, point_seed
from sincftn.framing import FrameLayout, FrameWaveform
from sincftn.receiver import ReceiverConfig, correlator_outputs
from sincftn.signal_core import SampledWaveform


@pytest.fixture
def big_zero_frame(spec4, otdm4):
    layout = FrameLayout(spec4, otdm4, 15626)
    grid = layout.grid()
    return FrameWaveform(SampledWaveform(grid.sample_rate, 0.0, np.zeros(layout.n_samples)), layout)


class TestBitEnergy:
    def test_zero(self, spec4, otdm4):
        tx = multiplex(spec4, otdm4, SymbolFrame.constant(4, 2))
        assert measure_bit_energy(tx.with_samples(np.zeros(len(tx.waveform)))) == 0.0

    def test_quadratic(self, spec4, notdm4, rng):
        tx = multiplex(spec4, notdm4, SymbolFrame.random(5, 8, rng))
        assert measure_bit_energy(tx.with_samples(2 * tx.samples)) == pytest.approx(4 * measure_bit_energy(tx), rel=1e-14)

    def test_otdm_all_plus_one_period(self, spec4, otdm4):
        # constant symbols: branch cross terms integrate to zero over a period,
        # so each bit carries the single-sequence energy T/N
        tx = multiplex(spec4, otdm4, SymbolFrame.constant(4, 2))
        t = tx.waveform.times
        energy = np.trapezoid(np.append(tx.samples, tx.samples[0]) ** 2, np.append(t, t[-1] + tx.waveform.dt))
        assert measure_bit_energy(tx) == pytest.approx(energy / 8, rel=1e-12)
        assert measure_bit_energy(tx) == pytest.approx(spec4.period / 4, rel=1e-9)


class TestAwgn:
    def test_disabled(self, spec4, otdm4):
        tx = multiplex(spec4, otdm4, SymbolFrame.constant(4, 2))
        assert add_awgn(tx, ChannelConfig(5.0, enabled=False)) is tx

    def test_seed_determinism(self, spec4, otdm4):
        tx = multiplex(spec4, otdm4, SymbolFrame.constant(4, 2))
        a = add_awgn(tx, ChannelConfig(5.0, seed=7))
        b = add_awgn(tx, ChannelConfig(5.0, seed=7))
        c = add_awgn(tx, ChannelConfig(5.0, seed=8))
        np.testing.assert_array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, c.samples)

    def test_nonfinite_ebn0(self):
        with pytest.raises(ValueError):
            ChannelConfig(float("inf"))

    def test_point_seeds_independent(self):
        a = np.random.default_rng(point_seed(1, 0, 0)).random(4)
        b = np.random.default_rng(point_seed(1, 0, 1)).random(4)
        assert not np.array_equal(a, b)
        np.testing.assert_array_equal(a, np.random.default_rng(point_seed(1, 0, 0)).random(4))


class TestNoiseStatistics:
    EB = 1e-11
    EBN0_DB = 3.0

    def noise(self, frame):
        cfg = ChannelConfig(self.EBN0_DB, seed=2024)
        return add_awgn(frame, cfg, eb=self.EB).samples

    def sigma(self, frame):
        return noise_sigma(self.EB, self.EBN0_DB, frame.waveform.sample_rate)

    def test_variance(self, big_zero_frame):
        n = self.noise(big_zero_frame)
        assert n.var() == pytest.approx(self.sigma(big_zero_frame) ** 2, rel=0.01)

    def test_zero_mean(self, big_zero_frame):
        n = self.noise(big_zero_frame)
        assert abs(n.mean()) < 4 * self.sigma(big_zero_frame) / np.sqrt(n.size)

    def test_white(self, big_zero_frame):
        n = self.noise(big_zero_frame)
        r0 = np.dot(n, n)
        for lag in (1, 2, 5, 16):
            assert abs(np.dot(n[:-lag], n[lag:])) < 0.01 * r0

    def test_correlator_variance_matches_continuous_model(self, big_zero_frame, spec4, otdm4):
        rx = big_zero_frame.with_samples(self.noise(big_zero_frame))
        out = correlator_outputs(rx, spec4, otdm4, ReceiverConfig())
        n0 = self.EB / 10 ** (self.EBN0_DB / 10)
        # (N0/2) * integral f^2 over 1/df, divided by (T/N)^2
        expected = (n0 / 2) * spec4.n_lines * spec4.line_spacing
        assert out.var() == pytest.approx(expected, rel=0.05)

"""Faster-than-Nyquist transmission by non-orthogonal TDM of sinc sequences."""

from .channel import ChannelConfig, add_awgn, measure_bit_energy
from .framing import (
    FrameLayout,
    FrameWaveform,
    MuxConfig,
    SymbolFrame,
    make_mux,
    modulate_branch,
    multiplex,
    n_extra_channels,
    otdm_mux,
)
from .receiver import (
    DecisionResult,
    ReceiverConfig,
    correlate_symbol,
    decide_2pam,
    demodulate_frame,
    reference_waveform,
)
from .signal_core import (
    SampledWaveform,
    SequenceSpec,
    TimeGrid,
    inner_product,
    sample_sequence,
    sequence_value_closed,
    sequence_value_fourier,
    sinc_pulse,
)

__version__ = "0.1.0"

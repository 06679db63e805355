from .ber import (
    BerCurve,
    BerPoint,
    IsiEstimate,
    TheoreticalBer,
    ber_baseline,
    ber_monte_carlo,
    ber_theoretical,
    ebn0_at_ber,
    estimate_isi_power,
    q_function,
    wilson_interval,
)
from .distance import MAX_SEARCH_LENGTH, DminResult, min_distance
from .rates import (
    CapacityInput,
    RateInput,
    Rates,
    capacity_from_M,
    distinguishable_signals,
    n_channels,
    notdm_capacity,
    rate_gain,
    shannon_capacity,
    symbol_rate,
)

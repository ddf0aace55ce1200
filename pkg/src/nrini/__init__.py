"""Inter-numerology interference metrics for 5G NR CP-OFDM coexistence."""

__version__ = "0.1.0"

from .analytic import (  # noqa: E402
    InterferencePair,
    MseCurve,
    ToneAllocation,
    mse_curve,
    mse_multi_tone,
    mse_rb_average,
    mse_single_tone,
    mse_single_tone_exact,
    mse_single_tone_literal,
    rejection_db,
    scale_invariance_residual,
)
from .dirichlet import dirichlet_power  # noqa: E402
from .guardband import (  # noqa: E402
    GuardBandRequirement,
    HorizonExceededError,
    guard_band_vs_interferer_curve,
    min_guard_band,
)
from .numerology import (  # noqa: E402
    FrequencyOffset,
    NumerologyError,
    NumerologyParams,
    numerology_params,
    offset_from_subcarriers,
    offset_to_khz,
)
from .scenario import ScenarioPlan, ServiceSpec, plan_scenario  # noqa: E402
from .waveform import (  # noqa: E402
    SampleBuffer,
    SymbolStream,
    demodulate,
    simulate_mse,
    simulate_sweep,
    synthesize,
)

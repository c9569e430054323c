"""Sub-Nyquist cognitive radar: subband selection, constant-power multiband
waveforms, delay-estimation bounds and a Monte Carlo estimator harness."""

__version__ = "0.1.0"

from .spectrum import (
    FrequencyGrid,
    RadarEnvironmentMap,
    Subband,
    SubbandPlan,
    band_power,
    read_rem_csv,
    rms_bandwidth_bandpass,
    rms_bandwidth_lowpass,
    total_power,
    write_rem_csv,
)
from .bandselect import (
    InfeasibleSelection,
    SelectionConstraints,
    SelectionResult,
    select_bands,
    select_bands_greedy,
    select_bands_oracle,
)
from .waveform import (
    PowerConservationError,
    WaveformSpec,
    allocate_power,
    channel_pulse,
    gaussian_shape,
    snap_plan,
    snr_summary,
    synthesize_cognitive,
    synthesize_flat_fullband,
    synthesize_fullband,
)
from .bounds import (
    check_prop1,
    corollary3_min_beta,
    crlb_cognitive,
    crlb_conventional,
    ezb_cognitive,
    ezb_conventional,
    operating_model,
    bound_report,
    prior_variance,
    snr_threshold,
)
from .montecarlo import (
    McConfig,
    cognitive_scenario,
    conventional_scenario,
    ml_delay_estimate,
    run_sweep,
)
from .design import RadarPair, build_pair, matched_gaussian_pair

"""Greedy beam-codebook refinement for rotating phased-array receivers.

The library shrinks an exponentially large quantized steering-vector
codebook down to a handful of entries that keep the received power within
gamma dB of the per-orientation maximum on a training set of orientations,
then evaluates the result on held-out orientations against a hierarchical
beam-search baseline.
"""

from .arraymodel import (
    ArrayConfig,
    Codebook,
    SteeringVector,
    codebook_size,
    decode,
    element_positions,
    enumerate_codebook,
    flat_from_steering,
    steering_from_flat,
    validate_codeword,
)
from .beamsel import (
    NEG_INF_DB,
    brute_force_max,
    mrc_weights,
    nearest_amp_index,
    nearest_phase_index,
    phase_quantization_bound_db,
    power_from_weights,
    quantize_weights,
    quantized_mrc,
    received_power,
)
from .channel import (
    ChannelRealization,
    ChannelScenario,
    apply_noise_floor,
    default_scenario,
    load_dataset,
    load_scenario,
    sample_orientations,
    save_dataset,
    save_scenario,
    synth_channel,
    with_obstacle,
)
from .errors import (
    BeamrefineError,
    BudgetExceededError,
    DegenerateChannelError,
    InvalidArgumentError,
    InvalidCodewordError,
    SchemaError,
)
from .evaluate import (
    GapReport,
    PairedComparison,
    cdf_at,
    compare_hier,
    emit_cdf,
    emit_report,
    load_report,
    make_obstructed_holdout,
    validate,
)
from .hierarchy import HierCodebook, build_hier, hier_search, sector_centers
from .kernels import backend_name
from .refine import (
    PRNG_NAME,
    RefinementResult,
    TrainingSample,
    TrainingSet,
    argmax_coverage,
    coverage_check,
    prune,
    refine,
)

__version__ = "0.1.0"

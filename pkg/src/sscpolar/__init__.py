"""Polar codes with pruned successive-cancellation decoding and exact
latency modeling under a limited number of processing elements."""

from .channel import (
    LLR_CAP,
    SCALING_EXPONENT,
    BmsChannel,
    ChannelKind,
    MinusRule,
    bhattacharyya,
    capacity,
    channel_from_capacity,
    make_channel,
    sample_llrs,
    z_minus,
    z_plus,
)
from .codec import (
    encode,
    encode_message,
    f_kernel,
    g_kernel,
    monte_carlo_fer,
    polar_transform,
    sc_decode,
    sc_decode_batch,
    sc_ssc_agreement,
    ssc_decode,
    ssc_decode_batch,
)
from .construct import (
    NodeForcing,
    PolarCode,
    PolarizationStats,
    build_code,
    code_from_frozen,
    code_from_text,
    code_to_text,
    cube_interval,
    h2_inv,
    iter_leaf_reliabilities,
    leaf_reliabilities,
    load_code,
    midzone_interval,
    rate_forcing,
    save_code,
    unpolarized_fraction,
)
from .experiments import (
    SlopeFit,
    SweepRecord,
    fit_slope,
    realize_policy,
    run_parallelism_sweep,
    run_policy_sweep,
    run_serial_sweep,
    write_csv,
)
from .latency import (
    LatencyReport,
    NodeKind,
    SscNode,
    SscTree,
    build_ssc_tree,
    decoding_weight,
    iter_pruned_nodes,
    latency_report,
    latency_upper_bound,
    matched_parallelism,
    min_p_within_factor,
    scan_edge_profile,
    sc_latency_closed_form,
    sc_latency_tree,
    serial_latency_estimate,
    ssc_latency,
)

__version__ = "0.1.0"

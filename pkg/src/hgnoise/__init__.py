"""Noise detection for third-order hypergraph states.

Simulates the tailoring and two-copy measurement protocol at the level of
classical distributions over Z_2^n and decodes the dephasing distribution p
from the measured law mu = p * p.
"""

__version__ = "0.1.0"

from .decoder import (
    CoeffTable,
    bias_bound,
    d_table,
    decode_series,
    fwht,
    series_coefficients,
    solve_exact,
    solve_exact_subspace,
)
from .distribution import Distribution
from .estimators import ConvolutionPowers, ExactDecoder, SeriesDecoder
from .hypergraph import (
    BoolPoly,
    Hypergraph,
    build_k4,
    build_union_jack,
    directional_derivative,
    evaluate,
    higher_derivative,
    neighborhood,
    poly_from_graph,
    vertex_degree,
)
from .noise import PauliChannel, PauliTerm, compose, preset_local, tail_bound, truncate_by_weight
from .pec import PecPlan, bias_bound_downstream, overhead, pec_approx, pec_exact
from .sampler import (
    SampleBatch,
    convolution_power_exact,
    convolve,
    hamming_histogram,
    l1,
    l2,
    sample_powers,
    sample_size_bound,
    support_propagation_check,
)
from .tailoring import dominant_support, overlap_sq, tailored_distribution

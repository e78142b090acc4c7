"""Oblivious algorithms for Max DICUT and Max 2-AND.

An oblivious algorithm puts each vertex into the cut independently, with a
probability that depends only on the vertex's bias (outweight over total
incident weight). This package computes exact worst-case ratios of step
selection functions with a factor-revealing LP, certifies them in rational
arithmetic, and builds the graphs that bound what any such algorithm can do.
"""

from .errors import (
    CertificateInvalid,
    DicutError,
    IterationLimit,
    LimitExceeded,
    ParseError,
    SingularBasis,
    SolverError,
    ZeroWeightGraph,
)
from .graph import (
    WeightedDigraph,
    biases,
    brute_force_opt,
    cut_weight,
    disjoint_union,
    expand_to_unweighted,
    expected_cut_weight,
    invert,
    replicate,
)
from .ratio_lp import RatioCertificate, approximation_ratio, build_lp, certify, extract_witness, solve
from .selection import (
    StepFunction,
    antisymmetrize,
    enumerate_family,
    evaluate,
    is_antisymmetric,
    make_clamped_linear_discretized,
    make_f_delta,
    make_greedy_threshold,
    make_paper_0483,
    make_uniform,
    named_function,
)
from .twoand import TwoAndInstance, reduce_to_dicut

__version__ = "0.1.0"

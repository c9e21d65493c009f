"""Prime-distribution laboratory.

Exact segmented-sieve ground truth (counts, Chebyshev sums, tuples, reduced
residues) checked against the analytic predictions: exponential/Poisson gap
laws, singular series and their averages, Gaussian window moments, explicit
formula reconstructions from zeta zeros, and Maier-type irregularities.
"""

from .gaps import (
    CramerReport,
    CramerSample,
    Histogram,
    cramer_simulate,
    gap_histogram,
    poisson_normal_check,
    poisson_pmf,
    window_count_distribution,
)
from .maier import (
    ArithSequence,
    FactoredModulus,
    build_modulus_dyadic_half,
    build_modulus_interval,
    coprime_count,
    coprime_excess,
    coprime_excess_sign_scan,
    coprime_zeta_identity,
    inclusion_exclusion_vs_mertens,
    maier_matrix,
    ones_sequence,
    primes_sequence,
    reduced_residue_moment,
    residue_gap_distribution,
    sequence_multiples,
    sequence_progression,
    sequence_summatory,
    two_squares_sequence,
    zeta_restricted,
)
from .moments import (
    MomentReport,
    distinct_tuple_sum,
    distinct_tuple_sum_centered,
    lambda_tuple_sum,
    moment_decomposition,
    psi_window_moment,
    psi_window_variance,
    surjection_count,
    tuple_count,
    tuple_count_prediction,
)
from .sieve import (
    PrimeSegment,
    SummatorySnapshot,
    is_prime,
    iter_segments,
    log_integral,
    primes_upto,
    reduced_residues,
    sieve_range,
    summatory,
    summatory_many,
    two_squares_indicator,
    von_mangoldt,
)
from .singular import (
    B_CONSTANT,
    SingularValue,
    TupleSet,
    admissible_residue_count,
    centered_singular_series,
    local_factor,
    occupied_residues,
    pair_dirichlet_series,
    pair_sum_expansion,
    singular_series,
    singular_series_mod,
    tuple_set_average,
)
from .zerogen import generate_zeros, hardy_z, write_zeros_file
from .zeros import (
    ZeroTable,
    chebyshev_bias_sim,
    cosine_sum_moment,
    load_zeros,
    psi_explicit,
    window_variance_zeros,
    zero_count_check,
)
from .zetafn import zeta

__version__ = "0.1.0"

"""Inner-product-free polynomial iterations for matrices whose spectra live
on unions of disjoint real intervals: shifted solves, matrix functions, and
adaptive spectrum estimation, built on two-interval orthogonal polynomials
in closed form and multi-band exterior Green's functions."""

from .bands import BandSystem
from .specfun import (
    EllipticModulus,
    ThetaSeriesConfig,
    ThetaTruncationError,
    complete_K,
    incomplete_F,
    jacobi_sn_cn_dn,
    theta1,
    theta1_deriv,
    theta4,
    theta4_deriv,
)
from .polynomials import (
    AkhiezerParams,
    GuardBandError,
    OnBandError,
    RecurrencePair,
    StieltjesSequence,
    backfill_cauchy,
    build_params,
    cauchy_integral,
    eval_pn,
    recurrence_coeffs,
    stieltjes,
    stieltjes_sequence,
    u_of_x,
)
from .stieltjes_proc import (
    WeightSpec,
    cauchy_by_quadrature,
    coeffs_by_stieltjes,
    stieltjes_by_quadrature,
)
from .greens import GreensEvaluator, build_greens, level_curve, nu, re_g
from .sources import ClosedFormSource, DiscretizedSource, default_source
from .linops import (
    LinearOperator,
    bvp_system,
    dense_eig,
    dense_solve,
    gen_perturbed,
    gen_uniform_diag,
    read_matrix_market,
)
from .iterate import (
    IterationReport,
    QuadratureRule,
    akhiezer_inverse,
    akhiezer_solve,
    chebyshev_classical_solve,
    chebyshev_modified_solve,
    matfun_apply,
    matfun_pole_residue,
    quadrature_circles,
)
from .adapt import (
    AdaptConfig,
    adapt_bisection,
    adapt_one_at_a_time,
    adapt_rayleigh,
    growth_rate,
    symmetric_simple_adapt,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptConfig",
    "AkhiezerParams",
    "BandSystem",
    "ClosedFormSource",
    "DiscretizedSource",
    "EllipticModulus",
    "GreensEvaluator",
    "GuardBandError",
    "IterationReport",
    "LinearOperator",
    "OnBandError",
    "QuadratureRule",
    "RecurrencePair",
    "StieltjesSequence",
    "ThetaSeriesConfig",
    "ThetaTruncationError",
    "WeightSpec",
    "adapt_bisection",
    "adapt_one_at_a_time",
    "adapt_rayleigh",
    "akhiezer_inverse",
    "akhiezer_solve",
    "backfill_cauchy",
    "build_greens",
    "build_params",
    "bvp_system",
    "cauchy_by_quadrature",
    "cauchy_integral",
    "chebyshev_classical_solve",
    "chebyshev_modified_solve",
    "coeffs_by_stieltjes",
    "complete_K",
    "default_source",
    "dense_eig",
    "dense_solve",
    "eval_pn",
    "gen_perturbed",
    "gen_uniform_diag",
    "growth_rate",
    "incomplete_F",
    "jacobi_sn_cn_dn",
    "level_curve",
    "matfun_apply",
    "matfun_pole_residue",
    "nu",
    "quadrature_circles",
    "re_g",
    "read_matrix_market",
    "recurrence_coeffs",
    "stieltjes",
    "stieltjes_by_quadrature",
    "stieltjes_sequence",
    "symmetric_simple_adapt",
    "theta1",
    "theta1_deriv",
    "theta4",
    "theta4_deriv",
    "u_of_x",
]

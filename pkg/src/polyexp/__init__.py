"""Polynomial-exponential decomposition of truncated multivariate moment sequences.

A sequence ``sigma_alpha = sum_i sum_beta omega_{i,beta} alpha!/(alpha-beta)! xi_i^(alpha-beta)``
is decomposed into its frequencies ``xi_i`` and polynomial weights
``omega_i`` through biorthogonal bases of the quotient algebra, the
multiplication matrices and their joint eigenstructure.
"""
from .algebra import GRLEX, MomentSequence, MonomialOrder, Poly, inner_product, pairing, star_shift
from .applications import (
    GridSpec,
    PolyLogModel,
    Spike,
    decompose_from_grid,
    fourier_coefficients,
    macaulay_binomial,
    prony_univariate,
    sparse_interpolate,
    spikes_from_fourier,
)
from .decompose import (
    DecomposeConfig,
    DecompositionReport,
    choose_separating_form,
    decompose,
    decompose_multiple,
    decompose_simple,
    mult_matrices,
)
from .errors import (
    InsufficientMoments,
    NumericalFailure,
    ParseError,
    PolyExpError,
    PreconditionViolation,
)
from .hankel import build_hankel, flat_extension_check, numeric_rank
from .orthobasis import border_basis, compute_orthobasis
from .polexp import PolExpModel, PolExpTerm, canonicalize, model_rank, mu_dimension, synth_full, synth_moments

__version__ = "0.1.0"

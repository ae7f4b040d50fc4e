"""Front-ends that reduce classical recovery problems to a moment decomposition.

* :func:`prony_univariate` -- sums ``sum_i w_i xi_i^a`` from ``2r`` samples.
* :func:`decompose_from_grid` -- exponential polynomials ``sum_i g_i(x) e^{f_i . x}``
  sampled on a regular grid.
* :func:`sparse_interpolate` -- sparse polynomials (optionally with ``log``
  factors) evaluated at the powers of a base point ``lambda``.
* :func:`spikes_from_fourier` -- Dirac spikes (and their derivatives) from
  low-frequency Fourier coefficients.

In every case the samples are interpreted as moments ``sigma_alpha`` and the
weight polynomials ``omega(y)`` of the decomposition are converted to the
polynomial factor ``a(t)`` in

    sigma_alpha = sum_i a_i(alpha) xi_i^alpha,
    a_i(t) = sum_beta omega_{i,beta} beta! xi_i^(-beta) b_beta(t),

where ``b_beta`` is the Macaulay binomial polynomial.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .algebra import MomentSequence, Poly, _parse_index, _parse_complex, _parse_nvars, as_index, index_factorial
from .decompose import DecomposeConfig, DecompositionReport, decompose, decompose_simple, check_coverage
from .errors import (
    CollidingFrequencies,
    NonIntegerExponent,
    OffCircle,
    ParseError,
    PreconditionViolation,
    RankDeficient,
    ZeroFrequency,
)
from .hankel import numeric_rank
from .orthobasis import compute_orthobasis
from .polexp import PolExpModel, canonicalize

EXPONENT_GAP = 0.05
EXPONENT_RTOL = 1e-6
CIRCLE_TOL = 1e-6
ZERO_FREQ_TOL = 1e-12
GRID_NOTE = (
    "recovery is modulo functions vanishing at every grid point; "
    "g_i and f_i are determined by the samples only up to that class"
)


# ---------------------------------------------------------------------------
# Macaulay binomials and weight conversion
# ---------------------------------------------------------------------------

def macaulay_binomial(alpha) -> Poly:
    """``b_alpha(y) = prod_i y_i (y_i - 1) ... (y_i - alpha_i + 1) / alpha_i!``."""
    alpha = as_index(alpha)
    n = len(alpha)
    out = Poly.constant(n, 1.0, drop_tol=0.0)
    for i, a in enumerate(alpha):
        yi = Poly.monomial(tuple(1 if k == i else 0 for k in range(n)), drop_tol=0.0)
        for j in range(a):
            out = out * (yi - j)
        out = out / math.factorial(a)
    return out


def weight_to_sample_poly(weight: Poly, xi) -> Poly:
    """Polynomial ``a(t)`` with ``sigma_alpha = a(alpha) xi^alpha`` for one term."""
    xi = np.asarray(xi, dtype=complex)
    out = Poly.zero(weight.nvars).with_drop_tol(0.0)
    for beta, c in weight.items():
        scale = c * index_factorial(beta) / complex(np.prod(xi ** np.array(beta)))
        out = out + scale * macaulay_binomial(beta)
    return out


def _check_nonzero_xi(xi):
    xi = np.asarray(xi, dtype=complex)
    for z in xi:
        if abs(z) <= ZERO_FREQ_TOL:
            raise ZeroFrequency(f"frequency component {z!r} is zero")


# ---------------------------------------------------------------------------
# value tables
# ---------------------------------------------------------------------------

def values_from_dict(doc) -> tuple[int, dict]:
    """Parse ``{"nvars": n, "values": [{"gamma": [...], "re": .., "im": ..}]}``."""
    nvars = _parse_nvars(doc)
    items = doc.get("values")
    if not isinstance(items, list):
        raise ParseError("'values' must be a list")
    out: dict = {}
    for item in items:
        gamma = _parse_index(item, "gamma", nvars)
        if gamma in out:
            raise ParseError(f"duplicate grid index {list(gamma)}")
        out[gamma] = _parse_complex(item)
    return nvars, out


def values_from_csv(text: str) -> tuple[int, dict]:
    """Parse a real-valued grid table with header ``gamma_1,...,gamma_n,value``."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError("empty CSV input") from None
    n = len(header) - 1
    if n < 1 or header[-1] != "value" or header[:-1] != [f"gamma_{i + 1}" for i in range(n)]:
        raise ParseError("CSV header must be gamma_1,...,gamma_n,value")
    out: dict = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != n + 1:
            raise ParseError(f"line {lineno}: expected {n + 1} fields")
        try:
            gamma = tuple(int(c) for c in row[:-1])
            value = float(row[-1])
        except ValueError:
            raise ParseError(f"line {lineno}: malformed number") from None
        if any(g < 0 for g in gamma) or not math.isfinite(value):
            raise ParseError(f"line {lineno}: invalid entry")
        if gamma in out:
            raise ParseError(f"line {lineno}: duplicate grid index {list(gamma)}")
        out[gamma] = complex(value)
    return n, out


def _as_sequence(values: Mapping, nvars: int | None = None) -> MomentSequence:
    if not values:
        raise PreconditionViolation("no values given")
    if nvars is None:
        nvars = len(next(iter(values)))
    return MomentSequence(nvars, dict(values))


# ---------------------------------------------------------------------------
# univariate Prony
# ---------------------------------------------------------------------------

def prony_univariate(samples: Sequence, r: int, config: DecomposeConfig | None = None) -> PolExpModel:
    """Recover ``h(a) = sum_{i<r} w_i xi_i^a`` from the samples ``h(0..2r-1)``.

    The first ``2r`` samples define the pencil ``(H_1, H_0)`` of ``r x r``
    Hankel matrices; the roots and weights are read from the eigenvectors of
    the multiplication operator in the biorthogonal basis of ``H_0``.

    Raises
    ------
    RankDeficient
        If ``H_0`` has numeric rank below ``r``; retry with a smaller ``r``.
    """
    config = config or DecomposeConfig()
    samples = np.asarray(samples, dtype=complex).reshape(-1)
    r = int(r)
    if r < 1:
        raise PreconditionViolation("r must be at least 1")
    if samples.size < 2 * r:
        raise PreconditionViolation(f"need at least {2 * r} samples, got {samples.size}")
    h = samples[: 2 * r]
    H0 = np.array([[h[i + j] for j in range(r)] for i in range(r)])
    rank = numeric_rank(H0, config.rank_tol)
    if rank < r:
        raise RankDeficient(rank)
    sigma = MomentSequence(1, {(k,): v for k, v in enumerate(h)})
    basis = compute_orthobasis(sigma, config.order, config.pivot_tol)
    if basis.rank != r:
        raise RankDeficient(basis.rank)
    check_coverage(sigma, basis, "pencil")
    model = decompose_simple(sigma, basis, np.ones(1), config=config)
    return canonicalize(model, config.merge_tol, drop_tol=0.0)


# ---------------------------------------------------------------------------
# grid samples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Regular grid ``x = alpha / T`` (componentwise) with ``|alpha| <= max_degree``."""

    nvars: int
    steps: tuple
    max_degree: int | None = None

    def __post_init__(self):
        steps = tuple(float(t) for t in np.broadcast_to(np.asarray(self.steps, dtype=float), (self.nvars,)))
        if any(not (t > 0) or not math.isfinite(t) for t in steps):
            raise PreconditionViolation("grid steps must be positive")
        if self.max_degree is not None and self.max_degree < 1:
            raise PreconditionViolation("max_degree must be at least 1")
        object.__setattr__(self, "steps", steps)


@dataclass(frozen=True)
class GridResult:
    terms: list                 # (f_i, g_i) pairs
    report: DecompositionReport
    note: str = GRID_NOTE


def decompose_from_grid(values: Mapping, grid: GridSpec, config: DecomposeConfig | None = None) -> GridResult:
    """Recover ``h(x) = sum_i g_i(x) exp(f_i . x)`` from ``h(alpha / T)``.

    ``values`` maps grid indices ``alpha`` to ``h(alpha / T)``.  Frequencies
    are ``f_ij = T_j log(xi_ij)`` (principal branch) and the weight of each
    term is converted through Macaulay binomials and the substitution
    ``t = T x``.

    Raises
    ------
    ZeroFrequency
        If some recovered ``xi_ij`` is zero.
    """
    config = config or DecomposeConfig()
    values = {tuple(a): v for a, v in values.items()}
    if grid.max_degree is not None:
        values = {a: v for a, v in values.items() if sum(a) <= grid.max_degree}
    sigma = _as_sequence(values, grid.nvars)
    report = decompose(sigma, config)
    T = np.array(grid.steps)
    terms = []
    for term in report.model.terms:
        _check_nonzero_xi(term.xi)
        f = T * np.log(term.xi)
        a = weight_to_sample_poly(term.weight, term.xi)
        g = Poly(grid.nvars, {b: c * float(np.prod(T ** np.array(b))) for b, c in a.items()}, drop_tol=0.0)
        terms.append((f, g))
    return GridResult(terms, report)


def evaluate_grid_terms(terms, x) -> complex:
    """``sum_i g_i(x) exp(f_i . x)`` at a point ``x``."""
    x = np.asarray(x, dtype=float)
    return complex(sum(g(x) * np.exp(np.dot(f, x)) for f, g in terms))


# ---------------------------------------------------------------------------
# sparse (poly)log interpolation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolyLogModel:
    """``sum h_{alpha,beta} x^alpha log^beta(x)`` as ``(alpha, beta, coeff)`` triples."""

    nvars: int
    terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        seen = set()
        for alpha, beta, _ in self.terms:
            key = (tuple(alpha), tuple(beta))
            if key in seen:
                raise PreconditionViolation(f"duplicate (alpha, beta) pair {key}")
            seen.add(key)

    def __call__(self, x) -> complex:
        x = np.asarray(x, dtype=complex)
        logs = np.log(x)
        return complex(sum(
            c * np.prod(x ** np.array(a)) * np.prod(logs ** np.array(b)) for a, b, c in self.terms
        ))

    def to_dict(self) -> dict:
        return {
            "nvars": self.nvars,
            "terms": [
                {"alpha": list(a), "beta": list(b), "re": float(c.real), "im": float(c.imag)}
                for a, b, c in self.terms
            ],
        }


def sparse_interpolate(values: Mapping, lam, max_degree_hint: int | None = None,
                       config: DecomposeConfig | None = None, refine: bool = True) -> PolyLogModel:
    """Sparse polynomial (or polylog) interpolation from values at powers of ``lam``.

    ``values[gamma]`` must be ``h(lam_1^gamma_1, ..., lam_n^gamma_n)``.  Each
    recovered frequency is ``lam^alpha`` for an integer exponent ``alpha``
    and each weight encodes the ``log`` factors attached to ``x^alpha``.

    Parameters
    ----------
    values : mapping
        Grid index -> value, on a downward-closed index set.
    lam : sequence of float
        Base point; entries must avoid 0 and 1.
    max_degree_hint : int, optional
        Only values with ``|gamma| <= max_degree_hint`` are used.
    refine : bool
        Re-solve the coefficients by least squares on all samples once the
        exponents are known exactly.

    Raises
    ------
    NonIntegerExponent
        If a frequency is not (close to) an integer power of ``lam``.
    CollidingFrequencies
        If two terms share the same exponent.
    """
    config = config or DecomposeConfig()
    lam = np.asarray(lam, dtype=complex).reshape(-1)
    n = lam.size
    if np.any(np.abs(lam) == 0) or np.any(np.abs(lam - 1) == 0):
        raise PreconditionViolation("lambda entries must avoid 0 and 1")
    values = {tuple(a): complex(v) for a, v in values.items()}
    if max_degree_hint is not None:
        values = {a: v for a, v in values.items() if sum(a) <= max_degree_hint}
    sigma = _as_sequence(values, n)
    model = decompose(sigma, config).model
    log_lam = np.log(lam)
    found = []
    # eigenvalue errors scale with the largest eigenvalue, not with each one
    spread = np.max(np.abs(model.points), axis=0) if model.terms else np.ones(n)
    for term in model.terms:
        _check_nonzero_xi(term.xi)
        alpha = []
        for j in range(n):
            z = term.xi[j]
            e = np.log(z) / log_lam[j]
            k = int(round(e.real))
            gap = abs(e - k)
            if k < 0 or gap > EXPONENT_GAP or abs(lam[j] ** k - z) > EXPONENT_RTOL * spread[j]:
                raise NonIntegerExponent(complex(z), k, float(gap))
            alpha.append(k)
        found.append((tuple(alpha), term))
    exps = [a for a, _ in found]
    if len(set(exps)) != len(exps):
        raise CollidingFrequencies(f"two recovered terms share an exponent: {exps}")
    triples = []
    for alpha, term in found:
        xi = lam ** np.array(alpha)
        a = weight_to_sample_poly(term.weight, xi)
        for beta, c in a.items():
            triples.append((alpha, beta, c / complex(np.prod(log_lam ** np.array(beta)))))
    if refine and triples:
        triples = _refine(sigma, lam, triples, config)
    triples.sort(key=lambda t: (sum(t[0]), tuple(-v for v in t[0]), sum(t[1]), tuple(-v for v in t[1])))
    return PolyLogModel(n, tuple(triples))


def _refine(sigma: MomentSequence, lam, triples, config) -> list:
    """Least-squares coefficients for fixed exponents and log patterns."""
    log_lam = np.log(lam)
    gammas = sorted(sigma.support)
    G = np.array(gammas, dtype=float)
    cols = []
    for alpha, beta, _ in triples:
        xi = lam ** np.array(alpha)
        col = np.prod(xi[None, :] ** G, axis=1) * np.prod((G * log_lam[None, :]) ** np.array(beta), axis=1)
        cols.append(col)
    A = np.array(cols).T
    rhs = np.array([sigma[g] for g in gammas])
    # rows scaled to unit max so that large powers do not swamp small ones
    row_scale = np.maximum(np.max(np.abs(A), axis=1), np.abs(rhs))
    row_scale[row_scale == 0] = 1.0
    As = A / row_scale[:, None]
    col_scale = np.linalg.norm(As, axis=0)
    col_scale[col_scale == 0] = 1.0
    x, *_ = np.linalg.lstsq(As / col_scale[None, :], rhs / row_scale, rcond=None)
    x = x / col_scale
    return [(a, b, complex(c)) for (a, b, _), c in zip(triples, x) if c != 0]


def evaluate_polylog(model: PolyLogModel, lam, gammas) -> dict:
    lam = np.asarray(lam, dtype=complex)
    return {tuple(g): model(lam ** np.array(g)) for g in gammas}


# ---------------------------------------------------------------------------
# Fourier coefficients -> spikes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Spike:
    """A point mass (and derivatives) at ``position``.

    ``weights`` maps a derivative multi-index to its amplitude; the index
    ``(0, ..., 0)`` is the mass itself.
    """

    position: np.ndarray
    weights: dict

    @property
    def weight(self) -> complex:
        return self.weights.get(tuple([0] * len(self.position)), 0j)

    @property
    def derivative_orders(self) -> list:
        return sorted(self.weights)


def fourier_coefficients(spikes, periods, gammas) -> dict:
    """Forward model: ``sigma_gamma`` of ``sum_k sum_a w_{k,a} d^a delta_{x_k}``.

    Uses ``sigma_gamma = (1 / prod T) * integral mu(x) exp(-2 pi i gamma . x / T) dx``.
    """
    T = np.asarray(periods, dtype=float)
    out = {}
    for g in gammas:
        g = np.array(g, dtype=float)
        total = 0j
        for s in spikes:
            phase = np.exp(-2j * np.pi * np.sum(g * np.asarray(s.position) / T))
            for a, w in s.weights.items():
                total += w * np.prod((2j * np.pi * g / T) ** np.array(a)) * phase
        out[tuple(int(v) for v in g)] = total / float(np.prod(T))
    return out


def spikes_from_fourier(coeffs: Mapping, periods, config: DecomposeConfig | None = None,
                        circle_tol: float = CIRCLE_TOL) -> list:
    """Recover spikes from Fourier coefficients on a downward-closed index set.

    Each frequency ``xi_j = exp(-2 pi i x_j / T_j)`` gives the position
    ``x_j = -T_j arg(xi_j) / (2 pi)`` in ``[-T_j/2, T_j/2)``; polynomial
    weights give derivatives of Dirac masses.

    Raises
    ------
    OffCircle
        If some ``|xi_j|`` differs from 1 by more than ``circle_tol``.
    """
    config = config or DecomposeConfig()
    coeffs = {tuple(a): complex(v) for a, v in coeffs.items()}
    sigma = _as_sequence(coeffs)
    n = sigma.nvars
    T = np.broadcast_to(np.asarray(periods, dtype=float), (n,)).copy()
    if np.any(T <= 0):
        raise PreconditionViolation("periods must be positive")
    report = decompose(sigma, config)
    vol = float(np.prod(T))
    spikes = []
    for term in report.model.terms:
        gap = float(np.max(np.abs(np.abs(term.xi) - 1.0)))
        if gap > circle_tol:
            raise OffCircle(gap)
        x = -T * np.angle(term.xi) / (2 * np.pi)
        x = np.mod(x + T / 2, T) - T / 2
        a = weight_to_sample_poly(term.weight, term.xi)
        weights = {}
        for alpha, c in a.items():
            weights[alpha] = c * vol / complex(np.prod((2j * np.pi / T) ** np.array(alpha)))
        spikes.append(Spike(x, weights))
    spikes.sort(key=lambda s: tuple(s.position))
    return spikes

"""Truncated Hankel (moment) matrices and their structured factorizations."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .algebra import (
    GRLEX,
    MomentSequence,
    Poly,
    divisor_closure,
    index_add,
    index_factorial,
    monomials_up_to,
    unit,
)
from .errors import OutOfSupport, PreconditionViolation
from .numlin import svd_values
from .polexp import PolExpModel

RANK_TOL = 1e-10


def _as_polys(basis: Sequence, nvars: int) -> list[Poly]:
    out = []
    for b in basis:
        if isinstance(b, Poly):
            if b.nvars != nvars:
                raise PreconditionViolation("basis polynomial has the wrong number of variables")
            out.append(b)
        else:
            out.append(Poly.monomial(tuple(b)))
    return out


@dataclass(frozen=True)
class TruncatedHankel:
    """Matrix ``(<sigma | b_j b'_i>)_{i,j}`` with rows indexed by ``B'``."""

    rows: tuple
    cols: tuple
    matrix: np.ndarray

    def __post_init__(self):
        if self.matrix.shape != (len(self.rows), len(self.cols)):
            raise PreconditionViolation("matrix shape does not match the bases")
        self.matrix.setflags(write=False)

    @property
    def shape(self):
        return self.matrix.shape


def build_hankel(sigma: MomentSequence, B: Sequence, Bp: Sequence) -> TruncatedHankel:
    """Truncated Hankel matrix with entry ``(i, j) = <sigma | B[j] Bp[i]>``.

    ``B`` and ``Bp`` hold polynomials or exponent tuples (monomials).

    Raises
    ------
    OutOfSupport
        If some product ``B[j] Bp[i]`` has a monomial outside the support.
    """
    cols = _as_polys(B, sigma.nvars)
    rows = _as_polys(Bp, sigma.nvars)
    H = np.zeros((len(rows), len(cols)), dtype=complex)
    col_terms = [list(b.items()) for b in cols]
    for i, bp in enumerate(rows):
        row_terms = list(bp.items())
        for j, terms in enumerate(col_terms):
            total = 0j
            for a, c in row_terms:
                for b, d in terms:
                    gamma = index_add(a, b)
                    value = sigma.get(gamma)
                    if value is None:
                        raise OutOfSupport(gamma, f"moment {gamma} needed for entry ({i}, {j}) is missing")
                    total += c * d * value
            H[i, j] = total
    return TruncatedHankel(tuple(rows), tuple(cols), H)


def build_shifted(sigma: MomentSequence, g: Poly, B: Sequence, Bp: Sequence) -> TruncatedHankel:
    """Matrix of ``g * sigma`` on ``(B, Bp)``: entry ``<sigma | g B[j] Bp[i]>``."""
    cols = _as_polys(B, sigma.nvars)
    shifted = build_hankel(sigma, [g * b for b in cols], Bp)
    return TruncatedHankel(shifted.rows, tuple(cols), np.array(shifted.matrix))


def monomial_hankel(sigma: MomentSequence, deg: int, deg_rows: int | None = None) -> np.ndarray:
    """Moment matrix on all monomials of degree ``<= deg`` (rows ``<= deg_rows``)."""
    cols = monomials_up_to(sigma.nvars, deg)
    rows = cols if deg_rows is None else monomials_up_to(sigma.nvars, deg_rows)
    return np.array(build_hankel(sigma, cols, rows).matrix)


def numeric_rank(matrix, tol_rel: float = RANK_TOL) -> int:
    """Number of singular values above ``tol_rel * s_max`` (0 for a zero matrix)."""
    s = svd_values(matrix)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol_rel * s[0]))


@dataclass(frozen=True)
class FlatExtensionResult:
    flat: bool
    rank_inner: int
    rank_outer: int


def _in_span(p: Poly, V: list[Poly]) -> bool:
    for v in V:
        if p == v:
            return True
    mons = sorted({a for q in V + [p] for a, _ in q.items()})
    A = np.array([q.vector(mons) for q in V]).T
    x = np.linalg.lstsq(A, p.vector(mons), rcond=None)[0]
    return bool(np.linalg.norm(A @ x - p.vector(mons)) <= 1e-10 * max(1.0, np.linalg.norm(p.vector(mons))))


def _check_extension(U: list[Poly], V: list[Poly], name: str, nvars: int):
    for u in U:
        if not _in_span(u, V):
            raise PreconditionViolation(f"{name}: {u!r} is not in the larger basis")
        for i in range(nvars):
            xu = Poly.monomial(unit(nvars, i)) * u
            if not _in_span(xu, V):
                raise PreconditionViolation(f"{name}: border element {xu!r} is not in the larger basis")


def flat_extension_check(sigma: MomentSequence, U, V, Up, Vp, tol: float = RANK_TOL) -> FlatExtensionResult:
    """Compare the ranks of ``H^{U,U'}`` and ``H^{V,V'}``.

    The extension is flat when both ranks agree, in which case the truncated
    sequence has a unique extension of the same rank.
    """
    n = sigma.nvars
    U, V, Up, Vp = (_as_polys(x, n) for x in (U, V, Up, Vp))
    one = Poly.constant(n, 1.0)
    if not any(u == one for u in U):
        raise PreconditionViolation("U must contain the constant 1")
    _check_extension(U, V, "U+ within V", n)
    _check_extension(Up, Vp, "U'+ within V'", n)
    inner = numeric_rank(build_hankel(sigma, U, Up).matrix, tol)
    outer = numeric_rank(build_hankel(sigma, V, Vp).matrix, tol)
    return FlatExtensionResult(inner == outer, inner, outer)


# ---------------------------------------------------------------------------
# Vandermonde / Wronskian factorizations
# ---------------------------------------------------------------------------

def vandermonde_matrix(basis: Sequence, points) -> np.ndarray:
    """Matrix ``(b_i(xi_j))`` of shape ``|basis| x |points|``."""
    points = np.atleast_2d(np.asarray(points, dtype=complex))
    polys = _as_polys(basis, points.shape[1])
    return np.array([[b(x) for x in points] for b in polys], dtype=complex).reshape(len(polys), len(points))


def gamma_set(weight: Poly) -> list[tuple]:
    """Divisor closure of the support of ``weight``, in graded order."""
    return GRLEX.sort(divisor_closure(a for a, _ in weight.items()))


def wronskian_matrix(basis: Sequence, gammas: Sequence[Sequence], points) -> np.ndarray:
    """Columns ``d^gamma(b_i)(xi_k) / gamma!`` for each point and each gamma of its set."""
    points = np.atleast_2d(np.asarray(points, dtype=complex))
    polys = _as_polys(basis, points.shape[1])
    cols = []
    for xi, gam in zip(points, gammas):
        for g in gam:
            f = 1.0 / index_factorial(g)
            cols.append([b.derivative(g)(xi) * f for b in polys])
    return np.array(cols, dtype=complex).T.reshape(len(polys), len(cols))


def weight_block(weight: Poly, gammas: Sequence) -> np.ndarray:
    """Block ``((g_i + g_j)! omega_{g_i+g_j})`` for one term."""
    s = len(gammas)
    D = np.zeros((s, s), dtype=complex)
    for i, gi in enumerate(gammas):
        for j, gj in enumerate(gammas):
            g = index_add(gi, gj)
            D[i, j] = index_factorial(g) * weight.coeff(g)
    return D


def weight_block_diagonal(model: PolExpModel):
    """Block-diagonal weight matrix of ``model`` and the exponent sets used."""
    gammas = [gamma_set(t.weight) for t in model.terms]
    blocks = [weight_block(t.weight, g) for t, g in zip(model.terms, gammas)]
    if not blocks:
        return np.zeros((0, 0), dtype=complex), gammas
    return scipy.linalg.block_diag(*blocks).astype(complex), gammas


def vandermonde_residual(model: PolExpModel, sigma: MomentSequence, B, Bp) -> float:
    """Frobenius norm of ``H^{B,B'} - W_{B'} Delta W_B^t``.

    For constant weights the Wronskians reduce to Vandermonde matrices and
    ``Delta`` to the diagonal of the weights.
    """
    H = build_hankel(sigma, B, Bp).matrix
    if len(model.terms) == 0:
        return float(np.linalg.norm(H))
    if model.is_simple():
        Vb = vandermonde_matrix(B, model.points)
        Vbp = vandermonde_matrix(Bp, model.points)
        D = np.diag(model.constant_weights())
        approx = Vbp @ D @ Vb.T
    else:
        Delta, gammas = weight_block_diagonal(model)
        Wb = wronskian_matrix(B, gammas, model.points)
        Wbp = wronskian_matrix(Bp, gammas, model.points)
        approx = Wbp @ Delta @ Wb.T
    return float(np.linalg.norm(H - approx))

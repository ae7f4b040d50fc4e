"""Polynomial-exponential models and forward moment synthesis.

A model is a finite sum ``sum_i omega_i(y) exp(xi_i . y)``.  Its moment
sequence is

    sigma_alpha = sum_i sum_{beta << alpha} omega_{i,beta} alpha!/(alpha-beta)! xi_i^(alpha-beta).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .algebra import (
    DROP_TOL,
    MomentSequence,
    Poly,
    PreconditionViolation,
    _parse_nvars,
    falling_ratio,
    is_downward_closed,
    monomials_up_to,
)
from .errors import ParseError, ZeroPolynomial

MERGE_TOL = 1e-7
MU_RANK_TOL = 1e-10


@dataclass(frozen=True)
class PolExpTerm:
    """One term ``omega(y) exp(xi . y)``."""

    xi: np.ndarray
    weight: Poly

    def __post_init__(self):
        xi = np.array(self.xi, dtype=complex).reshape(-1)
        xi.setflags(write=False)
        object.__setattr__(self, "xi", xi)
        if not isinstance(self.weight, Poly):
            object.__setattr__(self, "weight", Poly.constant(xi.size, self.weight))
        if self.weight.nvars != xi.size:
            raise PreconditionViolation("weight and frequency dimensions differ")
        if self.weight.is_zero():
            raise ZeroPolynomial("a term weight must not be zero")

    @property
    def nvars(self) -> int:
        return self.xi.size

    def is_constant(self) -> bool:
        return self.weight.degree() == 0


@dataclass(frozen=True)
class PolExpModel:
    nvars: int
    terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        terms = tuple(self.terms)
        for t in terms:
            if t.nvars != self.nvars:
                raise PreconditionViolation("term dimension does not match nvars")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_points(cls, xis, weights) -> "PolExpModel":
        """Model with constant weights ``weights[i]`` at ``xis[i]``."""
        xis = np.atleast_2d(np.asarray(xis, dtype=complex))
        n = xis.shape[1]
        return cls(n, tuple(PolExpTerm(x, Poly.constant(n, w)) for x, w in zip(xis, weights)))

    def __len__(self):
        return len(self.terms)

    @property
    def points(self) -> np.ndarray:
        return np.array([t.xi for t in self.terms], dtype=complex).reshape(len(self.terms), self.nvars)

    def constant_weights(self) -> np.ndarray:
        return np.array([t.weight.coeff((0,) * self.nvars) for t in self.terms], dtype=complex)

    def is_simple(self) -> bool:
        return all(t.is_constant() for t in self.terms)

    def to_dict(self) -> dict:
        return {
            "nvars": self.nvars,
            "terms": [
                {
                    "xi": [[float(z.real), float(z.imag)] for z in t.xi],
                    "weight": t.weight.to_list(),
                }
                for t in self.terms
            ],
        }

    @classmethod
    def from_dict(cls, doc) -> "PolExpModel":
        nvars = _parse_nvars(doc)
        items = doc.get("terms")
        if not isinstance(items, list):
            raise ParseError("'terms' must be a list")
        terms = []
        for item in items:
            if not isinstance(item, dict):
                raise ParseError("each term must be an object")
            xi = item.get("xi")
            if not isinstance(xi, list) or len(xi) != nvars:
                raise ParseError(f"'xi' must list {nvars} [re, im] pairs")
            coords = []
            for pair in xi:
                if (
                    not isinstance(pair, list)
                    or len(pair) != 2
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)
                    or not all(math.isfinite(v) for v in pair)
                ):
                    raise ParseError(f"bad frequency coordinate {pair!r}")
                coords.append(complex(pair[0], pair[1]))
            weight = item.get("weight")
            if not isinstance(weight, list):
                raise ParseError("'weight' must be a list")
            w = Poly.from_list(nvars, weight)
            if w.is_zero():
                raise ParseError("term with zero weight")
            terms.append(PolExpTerm(np.array(coords), w))
        return cls(nvars, tuple(terms))


# ---------------------------------------------------------------------------

def synth_moments(model: PolExpModel, support: Iterable) -> MomentSequence:
    """Moments of ``model`` on a downward-closed ``support``."""
    support = [tuple(int(a) for a in alpha) for alpha in support]
    if not is_downward_closed(support):
        raise PreconditionViolation("support is not downward-closed")
    if not support:
        raise PreconditionViolation("support is empty")
    exps = np.array(support, dtype=int).reshape(len(support), model.nvars)
    values = np.zeros(len(support), dtype=complex)
    for term in model.terms:
        for beta, c in term.weight.items():
            beta_arr = np.array(beta)
            mask = np.all(exps >= beta_arr, axis=1)
            if not mask.any():
                continue
            sub = exps[mask]
            ratio = np.array([falling_ratio(a, beta) for a in sub], dtype=float)
            powers = np.prod(term.xi[None, :] ** (sub - beta_arr), axis=1)
            values[mask] += c * ratio * powers
    return MomentSequence(model.nvars, dict(zip(support, values)))


def synth_full(model: PolExpModel, deg: int) -> MomentSequence:
    """Moments of ``model`` on all exponents of degree at most ``deg``."""
    return synth_moments(model, monomials_up_to(model.nvars, deg))


def mu_dimension(omega: Poly, tol_rel: float = MU_RANK_TOL) -> int:
    """Dimension of the span of ``omega`` and all its partial derivatives.

    Computed as the rank of the coefficient matrix of ``omega(y + t)`` viewed
    as a bilinear form in the monomials of ``y`` and ``t``.
    """
    if omega.is_zero():
        raise ZeroPolynomial("mu is undefined for the zero polynomial")
    n = omega.nvars
    d = omega.degree()
    mons = monomials_up_to(n, d)
    pos = {a: i for i, a in enumerate(mons)}
    theta = np.zeros((len(mons), len(mons)), dtype=complex)
    for gamma, c in omega.items():
        for alpha in mons:
            if all(a <= g for a, g in zip(alpha, gamma)):
                beta = tuple(g - a for g, a in zip(gamma, alpha))
                binom = math.prod(math.comb(g, a) for g, a in zip(gamma, alpha))
                theta[pos[alpha], pos[beta]] += c * binom
    s = np.linalg.svd(theta, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol_rel * s[0]))


def model_rank(model: PolExpModel, tol_rel: float = MU_RANK_TOL) -> int:
    """``sum_i mu(omega_i)``: the rank of the Hankel operator of the model."""
    return sum(mu_dimension(t.weight, tol_rel) for t in model.terms)


def _term_key(xi: np.ndarray):
    return (float(np.linalg.norm(xi)),) + tuple(
        v for z in xi for v in (float(z.real), float(z.imag))
    )


def canonicalize(model: PolExpModel, merge_tol: float = MERGE_TOL,
                 drop_tol: float = DROP_TOL) -> PolExpModel:
    """Merge nearby frequencies, drop zero weights and sort the terms.

    Terms whose frequencies differ by less than ``merge_tol`` in the max norm
    are merged (single linkage) and their weights summed; the merged
    frequency is the one of the first term in the input.  Terms are then
    sorted by ``|xi|`` and by the real and imaginary parts of the
    coordinates.
    """
    groups: list[list[PolExpTerm]] = []
    for term in model.terms:
        hits = [g for g in groups if any(np.max(np.abs(term.xi - u.xi)) < merge_tol for u in g)]
        if not hits:
            groups.append([term])
            continue
        merged = hits[0]
        merged.append(term)
        for g in hits[1:]:
            merged.extend(g)
            groups.remove(g)
    out = []
    for g in groups:
        weight = Poly.zero(model.nvars)
        for t in g:
            weight = weight + t.weight
        weight = weight.with_drop_tol(drop_tol)
        if not weight.is_zero():
            out.append(PolExpTerm(g[0].xi, weight))
    out.sort(key=lambda t: _term_key(t.xi))
    return PolExpModel(model.nvars, tuple(out))


def shift_model(model: PolExpModel, p: Poly) -> PolExpModel:
    """The model of ``p * sigma``: each weight becomes ``p(xi + d)(omega)``."""
    if p.nvars != model.nvars:
        raise PreconditionViolation("polynomial and model dimensions differ")
    terms = []
    for t in model.terms:
        q = p.shift(t.xi)
        w = Poly.zero(model.nvars)
        for beta, c in q.items():
            w = w + c * t.weight.derivative(beta)
        if not w.is_zero():
            terms.append(PolExpTerm(t.xi, w))
    return PolExpModel(model.nvars, tuple(terms))


def rescale_model(model: PolExpModel, c) -> PolExpModel:
    """Model of the sequence ``sigma_alpha c^(-alpha)``.

    Frequencies become ``xi / c`` and weight coefficients
    ``omega_beta c^(-beta)``.
    """
    c = np.asarray(c, dtype=complex)
    terms = []
    for t in model.terms:
        w = Poly(model.nvars, {b: v / complex(np.prod(c ** np.array(b))) for b, v in t.weight.items()}, 0.0)
        terms.append(PolExpTerm(t.xi / c, w))
    return PolExpModel(model.nvars, tuple(terms))


def match_terms(a: PolExpModel, b: PolExpModel) -> list[tuple[int, int]]:
    """Pair up the terms of two models by nearest frequency (greedy).

    Used to compare a recovered model with a reference one independently of
    term order.  Returns ``(index_in_a, index_in_b)`` pairs.
    """
    pa, pb = a.points, b.points
    pairs = []
    if len(pa) == 0 or len(pb) == 0:
        return pairs
    dist = np.max(np.abs(pa[:, None, :] - pb[None, :, :]), axis=2)
    used_a, used_b = set(), set()
    for flat in np.argsort(dist, axis=None, kind="stable"):
        i, j = np.unravel_index(flat, dist.shape)
        if i in used_a or j in used_b:
            continue
        pairs.append((int(i), int(j)))
        used_a.add(i)
        used_b.add(j)
    return sorted(pairs)

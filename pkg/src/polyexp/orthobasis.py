"""Incremental biorthogonal bases of the quotient algebra of a moment sequence.

Starting from the constant monomial, candidate monomials ``x^alpha`` are
projected against the polynomials found so far::

    p_alpha = x^alpha - sum_i <x^alpha, q_i>_sigma p_i

and then paired with monomials ``x^alpha'`` (scanned in the monomial order)
until a nonzero pairing is found.  The pair ``(alpha, alpha')`` then extends
the bases ``b`` and ``b'`` and a dual polynomial ``q_alpha`` is formed so
that ``<p_i, q_j>_sigma = delta_ij``.  A candidate without a nonzero pairing
is a border relation: ``p_alpha`` lies in the kernel of the Hankel operator.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    GRLEX,
    MomentSequence,
    MonomialOrder,
    Poly,
    border as monomial_border,
    index_add,
    zero_index,
)

PIVOT_TOL = 1e-8


@dataclass(frozen=True)
class OrthoBasisResult:
    """Bases of the quotient algebra and the kernel relations.

    Attributes
    ----------
    b, b_prime : list of tuple
        Monomial exponents of the bases ``B = x^b`` and ``B' = x^b'``.
    p_polys, q_polys : list of Poly
        Biorthogonal families: ``<p_i, q_j>_sigma = delta_ij``.  ``p_i`` is
        ``x^{b_i}`` plus earlier ``b`` monomials, ``q_i`` is supported on
        ``b'``.
    d_exponents : list of tuple
        Candidates found to be in the kernel.
    border : dict
        ``alpha -> p_alpha`` for ``alpha`` in ``d_exponents``.
    consumed_degree : int
        Largest total degree of a moment read by the algorithm.
    pivots : list of complex
        The pairing ``<x^alpha', p_alpha>`` accepted at each step.
    """

    nvars: int
    b: list
    b_prime: list
    p_polys: list
    q_polys: list
    d_exponents: list
    border: dict
    consumed_degree: int
    order: MonomialOrder = GRLEX
    pivot_tol: float = PIVOT_TOL
    pivots: list = field(default_factory=list)
    exponents: list = field(default_factory=list)
    P: np.ndarray | None = None
    Q: np.ndarray | None = None

    @property
    def rank(self) -> int:
        return len(self.b)

    def border_plus(self) -> list:
        """``b`` together with its border (the exponents of ``B+``)."""
        return self.b + self.order.sort(monomial_border(self.b, self.nvars))

    def border_plus_prime(self) -> list:
        return self.b_prime + self.order.sort(monomial_border(self.b_prime, self.nvars))


class _Workspace:
    """Dense bookkeeping over the support, with moment-read tracking."""

    def __init__(self, sigma: MomentSequence, order: MonomialOrder):
        self.sigma = sigma
        self.mons = order.sort(sigma.support)
        self.idx = {a: i for i, a in enumerate(self.mons)}
        self.N = len(self.mons)
        self.rows: dict = {}
        self.consumed = -1

    def row(self, gamma) -> np.ndarray:
        """``sigma_{gamma + m_j}`` for every support monomial ``m_j`` (nan outside)."""
        r = self.rows.get(gamma)
        if r is None:
            r = np.full(self.N, np.nan + 0j)
            for j, m in enumerate(self.mons):
                v = self.sigma.get(index_add(gamma, m))
                if v is not None:
                    r[j] = v
            self.rows[gamma] = r
        return r

    def touch(self, gamma, struct):
        deg = sum(gamma) + max(sum(self.mons[j]) for j in struct)
        if deg > self.consumed:
            self.consumed = deg

    def pair_monomial(self, gamma, vec, struct):
        """``<x^gamma, v>_sigma``; ``None`` if a needed moment is missing."""
        r = self.row(gamma)[struct]
        if np.isnan(r.real).any():
            return None, 0.0
        self.touch(gamma, struct)
        v = vec[struct]
        return complex(r @ v), float(np.abs(r) @ np.abs(v))

    def pair(self, u, su, v, sv) -> complex:
        total = 0j
        for i in su:
            if u[i] != 0:
                val, _ = self.pair_monomial(self.mons[i], v, sv)
                if val is None:
                    raise RuntimeError("pairing outside the support")
                total += u[i] * val
        return total


def next_candidates(b, d, s, b_prime, support, order: MonomialOrder = GRLEX) -> list:
    """Border monomials of ``b`` still to be examined.

    Returns the exponents of the border of ``b`` that lie in ``s``, are not
    in ``d`` and satisfy ``alpha + b' within support``, sorted by ``order``.
    """
    if not b:
        return []
    nvars = len(next(iter(b)))
    s = set(s)
    d = set(d)
    support = set(support)
    out = []
    for alpha in monomial_border(b, nvars):
        if alpha in s and alpha not in d and all(index_add(alpha, bp) in support for bp in b_prime):
            out.append(alpha)
    return order.sort(out)


def compute_orthobasis(sigma: MomentSequence, order: MonomialOrder = GRLEX,
                       pivot_tol: float = PIVOT_TOL, reorthogonalize: bool = True) -> OrthoBasisResult:
    """Biorthogonal bases ``p``, ``q`` of the algebra of ``sigma``.

    Parameters
    ----------
    sigma : MomentSequence
    order : MonomialOrder
        Order used for candidates and for the pivot scan.
    pivot_tol : float
        A pairing ``<x^alpha', p_alpha>`` counts as nonzero when its modulus
        exceeds ``pivot_tol`` times ``sum_beta |p_beta| |sigma_{alpha'+beta}|``,
        the size of the terms that were summed.
    reorthogonalize : bool
        Run a second projection pass on every new ``p`` and ``q``.

    Notes
    -----
    For the zero sequence the constant 1 is already in the kernel: the bases
    are empty and the only relation is ``p_0 = 1``.
    """
    n = sigma.nvars
    ws = _Workspace(sigma, order)
    support = sigma.support
    N = ws.N

    b, bp, d = [], [], []
    P, Q = [], []          # dense coefficient vectors
    sb, sbp = [], []       # structural supports (indices of b and b')
    pivots = []
    recorded = {}
    s = set(support)
    s_prime = list(ws.mons)

    def unit_vec(j):
        e = np.zeros(N, dtype=complex)
        e[j] = 1.0
        return e

    def project_p(alpha):
        ia = ws.idx[alpha]
        v = unit_vec(ia)
        struct = sb + [ia]
        for k in range(len(P)):
            c, _ = ws.pair_monomial(alpha, Q[k], sbp)
            v = v - c * P[k]
        if reorthogonalize:
            for k in range(len(P)):
                c = ws.pair(v, struct, Q[k], sbp)
                v = v - c * P[k]
        return v, struct

    cands = [zero_index(n)] if zero_index(n) in support else []
    while cands:
        for alpha in cands:
            v, struct = project_p(alpha)
            found = None
            for ap in s_prime:
                val, size = ws.pair_monomial(ap, v, struct)
                if val is None:
                    continue
                if abs(val) > pivot_tol * size:
                    found = (ap, val)
                    break
            if found is None:
                d.append(alpha)
                recorded[alpha] = v
                continue
            ap, val = found
            jp = ws.idx[ap]
            w = unit_vec(jp)
            wstruct = sbp + [jp]
            for k in range(len(P)):
                c, _ = ws.pair_monomial(ap, P[k], sb)
                w = w - c * Q[k]
            if reorthogonalize:
                for k in range(len(P)):
                    c = ws.pair(P[k], sb, w, wstruct)
                    w = w - c * Q[k]
            norm = ws.pair(v, struct, w, wstruct)
            w = w / norm
            b.append(alpha)
            bp.append(ap)
            sb.append(ws.idx[alpha])
            sbp.append(jp)
            P.append(v)
            Q.append(w)
            pivots.append(val)
            s.discard(alpha)
            s_prime.remove(ap)
        cands = next_candidates(b, d, s, bp, support, order)

    border = {}
    for alpha in d:
        if all(index_add(alpha, x) in support for x in bp):
            v, _ = project_p(alpha)
        else:
            v = recorded[alpha]
        border[alpha] = Poly(n, {ws.mons[j]: v[j] for j in np.flatnonzero(v)}, drop_tol=0.0)

    p_polys = [Poly(n, {ws.mons[j]: v[j] for j in np.flatnonzero(v)}, drop_tol=0.0) for v in P]
    q_polys = [Poly(n, {ws.mons[j]: w[j] for j in np.flatnonzero(w)}, drop_tol=0.0) for w in Q]
    Pm = np.array(P).T if P else np.zeros((N, 0), dtype=complex)
    Qm = np.array(Q).T if Q else np.zeros((N, 0), dtype=complex)
    return OrthoBasisResult(
        nvars=n,
        b=b,
        b_prime=bp,
        p_polys=p_polys,
        q_polys=q_polys,
        d_exponents=d,
        border=border,
        consumed_degree=ws.consumed,
        order=order,
        pivot_tol=pivot_tol,
        pivots=pivots,
        exponents=ws.mons,
        P=Pm,
        Q=Qm,
    )


def border_basis(result: OrthoBasisResult) -> list:
    """Kernel relations ``p_alpha`` for ``alpha`` in ``d``, in discovery order."""
    return [result.border[a] for a in result.d_exponents]

"""Frequencies and weights from the multiplication operators of the algebra.

Given the biorthogonal bases ``p``, ``q`` of :mod:`polyexp.orthobasis`, the
operator of multiplication by ``x_k`` has the matrix

    M_k[i, j] = <sigma | x_k p_j q_i>

in the ``p`` basis.  Its eigenstructure carries the frequencies; the weights
follow from pairings of ``sigma`` with eigenvectors (simple roots) or with
spectral idempotents (multiple roots).
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .algebra import (
    GRLEX,
    MomentSequence,
    MonomialOrder,
    Poly,
    index_add,
    index_factorial,
    monomials_up_to,
    unit,
)
from .errors import (
    DegenerateEigenvector,
    InsufficientMoments,
    NoSeparatingForm,
    PreconditionViolation,
    SingularClusterGram,
    SingularMatrix,
)
from .numlin import EPS, eig, eig_condition, invariant_subspace, solve
from .orthobasis import PIVOT_TOL, OrthoBasisResult, compute_orthobasis
from .polexp import MERGE_TOL, MU_RANK_TOL, PolExpModel, PolExpTerm, canonicalize, mu_dimension, synth_moments

CLUSTER_TOL = 1e-6
WEIGHT_TOL = 1e-10
# eigenvalues with condition number kappa are trusted to about
# COND_FACTOR * eps * kappa * ||M||; this lets the split of a defective
# eigenvalue be recognized as one cluster
COND_FACTOR = 1e6
MAX_COND_RADIUS = 1e-2


def default_seed() -> int:
    env = os.environ.get("POLYEXP_SEED")
    if env is None or env.strip() == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise PreconditionViolation(f"POLYEXP_SEED must be an integer, got {env!r}") from None


@dataclass(frozen=True)
class DecomposeConfig:
    """Tolerances and options for :func:`decompose`.

    ``coverage`` selects the moment-coverage guard run before the eigen
    step: ``"flat"`` requires ``B+ . B'+`` inside the support (the flat
    extension can be checked on the data), ``"pencil"`` only requires
    ``B+ . B'`` (all shifted matrices are known) and ``"auto"`` uses
    ``"pencil"`` in one variable and ``"flat"`` otherwise.
    """

    pivot_tol: float = PIVOT_TOL
    rank_tol: float = MU_RANK_TOL
    cluster_tol: float = CLUSTER_TOL
    merge_tol: float = MERGE_TOL
    sep_tol: float = CLUSTER_TOL
    weight_tol: float = WEIGHT_TOL
    seed: int = 0
    order: MonomialOrder = GRLEX
    coverage: str = "auto"
    max_tries: int = 8
    method: str = "auto"

    def __post_init__(self):
        for name in ("pivot_tol", "rank_tol", "cluster_tol", "merge_tol", "sep_tol", "weight_tol"):
            if not getattr(self, name) > 0:
                raise PreconditionViolation(f"{name} must be positive")
        if self.coverage not in ("auto", "flat", "pencil"):
            raise PreconditionViolation(f"unknown coverage mode {self.coverage!r}")
        if self.method not in ("auto", "simple", "multiple"):
            raise PreconditionViolation(f"unknown method {self.method!r}")
        if isinstance(self.order, str):
            object.__setattr__(self, "order", MonomialOrder(self.order))


@dataclass(frozen=True)
class DecompositionReport:
    model: PolExpModel
    rank: int
    separating_form: np.ndarray
    mult_matrices: list
    eigen_condition: float
    moment_residual: float
    multiplicity_profile: list
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def cpx(z):
            return [float(np.real(z)), float(np.imag(z))]

        return {
            "rank": int(self.rank),
            "model": self.model.to_dict(),
            "separating_form": [cpx(v) for v in self.separating_form],
            "mult_matrices": [[[cpx(v) for v in row] for row in M] for M in self.mult_matrices],
            "eigen_condition": float(self.eigen_condition),
            "moment_residual": float(self.moment_residual),
            "multiplicity_profile": [int(m) for m in self.multiplicity_profile],
            "diagnostics": _jsonable(self.diagnostics),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

def _sub_basis(basis: OrthoBasisResult):
    """Coefficient matrices of ``p`` over ``b`` and ``q`` over ``b'`` (r x r)."""
    pos = {a: i for i, a in enumerate(basis.exponents)}
    Pb = basis.P[[pos[a] for a in basis.b], :]
    Qb = basis.Q[[pos[a] for a in basis.b_prime], :]
    return Pb, Qb


def _shifted_block(sigma: MomentSequence, shift, rows, cols) -> np.ndarray:
    H = np.empty((len(rows), len(cols)), dtype=complex)
    for i, bp in enumerate(rows):
        for j, b in enumerate(cols):
            gamma = index_add(index_add(bp, b), shift)
            v = sigma.get(gamma)
            if v is None:
                raise InsufficientMoments(f"moment {gamma} is needed but not given", gamma)
            H[i, j] = v
    return H


def mult_matrices(sigma: MomentSequence, basis: OrthoBasisResult) -> list:
    """Matrices ``M_k[i, j] = <sigma | x_k p_j q_i>`` for ``k = 1..n``.

    Raises
    ------
    InsufficientMoments
        If some ``x_k x^b x^b'`` falls outside the support.
    """
    n = sigma.nvars
    if basis.rank == 0:
        return [np.zeros((0, 0), dtype=complex) for _ in range(n)]
    Pb, Qb = _sub_basis(basis)
    out = []
    for k in range(n):
        Hk = _shifted_block(sigma, unit(n, k), basis.b_prime, basis.b)
        out.append(Qb.T @ Hk @ Pb)
    return out


def _pairing_vectors(sigma: MomentSequence, basis: OrthoBasisResult):
    """``<sigma|p_j>``, ``<sigma|q_j>`` and ``<sigma|x_k p_j>``."""
    n = sigma.nvars
    Pb, Qb = _sub_basis(basis)
    mom_b = np.array([sigma[a] for a in basis.b], dtype=complex)
    mom_bp = np.array([sigma[a] for a in basis.b_prime], dtype=complex)
    sp = mom_b @ Pb
    sq = mom_bp @ Qb
    sx = []
    for k in range(n):
        row = []
        for a in basis.b:
            g = index_add(a, unit(n, k))
            v = sigma.get(g)
            if v is None:
                raise InsufficientMoments(f"moment {g} is needed but not given", g)
            row.append(v)
        sx.append(np.array(row, dtype=complex) @ Pb)
    return sp, sq, sx


def commutation_error(mats) -> float:
    """Largest ``||M_i M_j - M_j M_i||_F / (||M_i|| ||M_j||)`` over pairs."""
    worst = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            denom = np.linalg.norm(mats[i]) * np.linalg.norm(mats[j])
            if denom == 0:
                continue
            err = np.linalg.norm(mats[i] @ mats[j] - mats[j] @ mats[i]) / denom
            worst = max(worst, float(err))
    return worst


def combine(mats, l) -> np.ndarray:
    return sum(c * M for c, M in zip(l, mats))


# ---------------------------------------------------------------------------
# spectral clustering and separating forms
# ---------------------------------------------------------------------------

def balancing_scale(mats) -> np.ndarray:
    """Diagonal ``d`` such that ``diag(d)^-1 M_k diag(d)`` are jointly balanced.

    Rescaling the ``p`` basis by ``d`` (and ``q`` by ``1/d``) keeps it
    biorthogonal and removes most of the artificial non-normality that
    comes from moments of very different magnitudes.
    """
    r = mats[0].shape[0] if mats else 0
    if r == 0:
        return np.ones(0)
    A = sum(np.abs(M) for M in mats)
    if not np.all(np.isfinite(A)) or not A.any():
        return np.ones(r)
    _, (d, _) = scipy.linalg.matrix_balance(A, permute=False, separate=True)
    return np.asarray(d, dtype=float)


def _balance(mats, d):
    return [M * d[None, :] / d[:, None] for M in mats]


def _spectral_scale(M, values=None) -> float:
    """``max(spectral radius, sqrt(eps) ||M||)`` (1 for a zero matrix)."""
    if M.shape[0] == 0:
        return 1.0
    if values is None:
        values = np.linalg.eigvals(M)
    s = max(float(np.max(np.abs(values))), np.sqrt(EPS) * float(np.linalg.norm(M, 2)))
    return s if s > 0 else 1.0


def cluster_eigenvalues(M, cluster_tol: float = CLUSTER_TOL, scale: float | None = None,
                        balance: bool = True, norm: float | None = None):
    """Group the eigenvalues of ``M`` that belong to one root.

    Two eigenvalues are linked when their distance is at most
    ``cluster_tol * scale`` plus a term proportional to their condition
    numbers (so that the split of a defective eigenvalue stays together);
    clusters are the connected components (single linkage).  ``scale``
    defaults to the spectral radius of ``M`` and ``norm``, the size of the
    matrix whose rounding errors perturb the eigenvalues, to ``||M||``.

    Returns
    -------
    values : ndarray
        The eigenvalues.
    clusters : list of list of int
        Index groups, ordered by first member.
    conds : ndarray
        Eigenvalue condition numbers (of the balanced matrix).
    """
    M = np.asarray(M, dtype=complex)
    m = M.shape[0]
    if m == 0:
        return np.zeros(0, complex), [], np.zeros(0)
    B = scipy.linalg.matrix_balance(M, permute=False)[0] if balance else M
    w, cond, _ = eig_condition(B)
    if scale is None:
        scale = _spectral_scale(B, w)
    if norm is None:
        norm = float(np.linalg.norm(B, 2))
    finite = np.where(np.isfinite(cond), cond, 1e300)
    extra = np.minimum(COND_FACTOR * EPS * finite * norm, MAX_COND_RADIUS * scale)
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(m):
        for j in range(i + 1, m):
            if abs(w[i] - w[j]) <= cluster_tol * scale + extra[i] + extra[j]:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups: dict = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    return w, [groups[k] for k in sorted(groups)], cond


def _cluster_subspace(M, values, clusters, members):
    """Orthonormal basis of the invariant subspace of ``M`` for one cluster."""
    labels = np.empty(len(values), dtype=int)
    for c, group in enumerate(clusters):
        labels[group] = c
    target = labels[members[0]]

    def select(z):
        return labels[int(np.argmin(np.abs(values - z)))] == target

    Z = invariant_subspace(M, select)
    if Z.shape[1] != len(members):
        raise SingularClusterGram("could not isolate the invariant subspace of a cluster")
    return Z


def joint_blocks(mats, l, cluster_tol: float = CLUSTER_TOL):
    """Common invariant subspaces of the commuting matrices ``mats``.

    The spectrum of ``M_l`` is clustered first; each cluster subspace is then
    split further whenever the restriction of some ``M_k`` still has
    several eigenvalue clusters.  Returns ``(blocks, n_initial)`` where
    ``blocks`` are orthonormal column bases and ``n_initial`` is the number
    of clusters of ``M_l`` alone (a separating ``l`` needs no splitting).
    """
    Ml = combine(mats, l)
    if Ml.shape[0] == 0:
        return [], 0
    values, clusters, _ = cluster_eigenvalues(Ml, cluster_tol)
    blocks = [_cluster_subspace(Ml, values, clusters, members) for members in clusters]
    scales = [_spectral_scale(M) for M in mats]
    norms = [float(np.linalg.norm(M, 2)) for M in mats]
    n_initial = len(blocks)
    changed = True
    while changed:
        changed = False
        out = []
        for Z in blocks:
            split = None
            if Z.shape[1] > 1:
                for M, sc, nm in zip(mats, scales, norms):
                    T = Z.conj().T @ M @ Z
                    # T is triangular-like in an orthonormal basis; balancing it
                    # would hide the coupling of a defective eigenvalue
                    tv, tcl, _ = cluster_eigenvalues(T, cluster_tol, scale=sc, balance=False, norm=nm)
                    if len(tcl) > 1:
                        split = [Z @ _cluster_subspace(T, tv, tcl, members) for members in tcl]
                        break
            if split is None:
                out.append(Z)
            else:
                out.extend(split)
                changed = True
        blocks = out
    return blocks, n_initial


def _block_centres(M, blocks) -> np.ndarray:
    return np.array([np.trace(Z.conj().T @ M @ Z) / Z.shape[1] for Z in blocks])


def _separation_gap(mats, l, cluster_tol, sep_tol):
    """Relative gap between the roots as seen by ``M_l`` (None if not separating)."""
    blocks, n_initial = joint_blocks(mats, l, cluster_tol)
    if len(blocks) != n_initial:
        return None
    if len(blocks) < 2:
        return np.inf
    Ml = combine(mats, l)
    centres = _block_centres(Ml, blocks)
    scale = _spectral_scale(Ml)
    diffs = np.abs(centres[:, None] - centres[None, :]) / scale
    gap = float(np.min(diffs[np.triu_indices(len(centres), 1)]))
    return gap if gap > sep_tol else None


def is_separating(mats, l, cluster_tol: float = CLUSTER_TOL, sep_tol: float = CLUSTER_TOL) -> bool:
    """Whether ``M_l = sum_k l_k M_k`` separates the roots of ``mats``.

    Every eigenvalue cluster of ``M_l`` must carry a single eigenvalue
    cluster of each ``M_k`` and cluster centres must be more than
    ``sep_tol`` (relative to the spectral radius) apart.
    """
    return _separation_gap(mats, np.asarray(l), cluster_tol, sep_tol) is not None


def choose_separating_form(mats, seed: int = 0, sep_tol: float = CLUSTER_TOL, max_tries: int = 8,
                           cluster_tol: float = CLUSTER_TOL) -> np.ndarray:
    """A unit vector ``l`` such that ``sum_k l_k M_k`` separates the roots.

    ``max_tries`` random directions (normal draws from a Philox generator
    seeded by ``seed``) are examined and the one with the largest relative
    gap between root clusters is returned.  In one variable the answer is
    always ``(1,)``.

    Raises
    ------
    NoSeparatingForm
        If none of the draws separates the spectrum.
    """
    n = len(mats)
    if n == 1:
        return np.ones(1)
    d = balancing_scale(mats)
    bal = _balance(mats, d)
    rng = np.random.Generator(np.random.Philox(seed))
    best, best_gap = None, -1.0
    for _ in range(max(1, max_tries)):
        l = rng.standard_normal(n)
        l /= np.linalg.norm(l)
        gap = _separation_gap(bal, l, cluster_tol, sep_tol)
        if gap is not None and gap > best_gap:
            best, best_gap = l, gap
    if best is None:
        raise NoSeparatingForm(f"no separating linear form found in {max_tries} tries")
    return best


def _fallback_form(n, seed) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed))
    l = rng.standard_normal(n)
    return l / np.linalg.norm(l)


class _Operators:
    """Multiplication matrices and pairing vectors in balanced coordinates."""

    def __init__(self, sigma: MomentSequence, basis: OrthoBasisResult, mats=None):
        self.basis = basis
        mats = mult_matrices(sigma, basis) if mats is None else mats
        sp, sq, sx = _pairing_vectors(sigma, basis)
        Pb, _ = _sub_basis(basis)
        d = balancing_scale(mats)
        self.d = d
        self.mats = _balance(mats, d)
        self.sp = sp * d
        self.sq = sq / d
        self.sx = [v * d for v in sx]
        self.Pb = Pb * d[None, :]

    def eval_p(self, xi) -> np.ndarray:
        """``[d_j p_j(xi)]_j``: evaluation of the balanced ``p`` basis."""
        mons = np.array([np.prod(xi ** np.array(a)) for a in self.basis.b], dtype=complex)
        return mons @ self.Pb


# ---------------------------------------------------------------------------
# simple roots
# ---------------------------------------------------------------------------

def decompose_simple(sigma: MomentSequence, basis: OrthoBasisResult, l=None, *,
                     config: DecomposeConfig | None = None, mats=None) -> PolExpModel:
    """Constant-weight decomposition from the eigenvectors of ``M_l``.

    For each eigenvector ``v`` (a polynomial in the ``p`` basis)
    ``xi_j = <sigma | x_j v> / <sigma | v>`` and ``omega = <sigma|v> / v(xi)``.

    Raises
    ------
    DegenerateEigenvector
        If ``<sigma|v>`` vanishes numerically for some eigenvector.
    """
    config = config or DecomposeConfig()
    n = sigma.nvars
    if basis.rank == 0:
        return PolExpModel(n, ())
    ops = _Operators(sigma, basis, mats)
    if l is None:
        l = choose_separating_form(mats if mats is not None else mult_matrices(sigma, basis),
                                   config.seed, config.sep_tol, config.max_tries, config.cluster_tol)
    res = eig(combine(ops.mats, l))
    terms = []
    for i in range(res.vectors.shape[1]):
        v = res.vectors[:, i]
        s = ops.sp @ v
        size = np.abs(ops.sp) @ np.abs(v)
        if abs(s) <= config.pivot_tol * max(size, np.finfo(float).tiny):
            raise DegenerateEigenvector(f"eigenvector {i} pairs to zero with sigma")
        xi = np.array([ops.sx[k] @ v for k in range(n)]) / s
        vx = ops.eval_p(xi) @ v
        if vx == 0:
            raise DegenerateEigenvector(f"eigenvector {i} vanishes at its root")
        terms.append(PolExpTerm(xi, Poly.constant(n, s / vx, drop_tol=0.0)))
    return PolExpModel(n, tuple(terms))


# ---------------------------------------------------------------------------
# multiple roots
# ---------------------------------------------------------------------------

def decompose_multiple(sigma: MomentSequence, basis: OrthoBasisResult, l=None, *,
                       config: DecomposeConfig | None = None, mats=None, info: dict | None = None) -> PolExpModel:
    """Polynomial-weight decomposition through spectral idempotents.

    The joint spectrum is split into common invariant subspaces ``Z_i``
    (bases of the local algebras in ``p`` coordinates).  With ``Z'_i`` the
    matching left subspaces (``q`` coordinates) the idempotent ``u_i = Z_i c``
    solves ``(Z_i'^t Z_i) c = Z_i'^t <sigma|q>`` and the weight is

        omega_i(y) = sum_alpha <sigma | u_i (x - xi_i)^alpha> y^alpha / alpha!

    over ``|alpha| < m_i``, the block size.

    Raises
    ------
    SingularClusterGram
        If ``Z_i'^t Z_i`` is numerically singular for some block.
    """
    config = config or DecomposeConfig()
    n = sigma.nvars
    if basis.rank == 0:
        return PolExpModel(n, ())
    ops = _Operators(sigma, basis, mats)
    if l is None:
        try:
            l = choose_separating_form(mats if mats is not None else mult_matrices(sigma, basis),
                                       config.seed, config.sep_tol, config.max_tries, config.cluster_tol)
        except NoSeparatingForm:
            l = _fallback_form(n, config.seed)
    blocks, _ = joint_blocks(ops.mats, l, config.cluster_tol)
    Zall = np.hstack(blocks)
    try:
        W = solve(Zall, np.eye(Zall.shape[0])).T
    except SingularMatrix as exc:
        raise SingularClusterGram(f"spectral blocks are not independent: {exc}") from exc
    terms, sizes = [], []
    start = 0
    r = Zall.shape[0]
    for ci, Z in enumerate(blocks):
        m = Z.shape[1]
        Zp, _ = np.linalg.qr(W[:, start:start + m])
        start += m
        G = Zp.T @ Z
        try:
            c = solve(G, Zp.T @ ops.sq)
        except SingularMatrix as exc:
            raise SingularClusterGram(f"cluster {ci}: {exc}", cluster=ci) from exc
        u = Z @ c
        xi = np.array([np.trace(Z.conj().T @ M @ Z) / m for M in ops.mats])
        shifted = [M - x * np.eye(r) for M, x in zip(ops.mats, xi)]
        coeffs = {}
        for alpha in monomials_up_to(n, m - 1):
            t = u
            for k, e in enumerate(alpha):
                for _ in range(e):
                    t = shifted[k] @ t
            coeffs[alpha] = (ops.sp @ t) / index_factorial(alpha)
        top = max(abs(v) for v in coeffs.values())
        if top == 0:
            continue
        weight = Poly(n, {a: v for a, v in coeffs.items() if abs(v) > config.weight_tol * top}, drop_tol=0.0)
        terms.append(PolExpTerm(xi, weight))
        sizes.append(m)
    if info is not None:
        info["cluster_sizes"] = sizes
    return PolExpModel(n, tuple(terms))


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def check_coverage(sigma: MomentSequence, basis: OrthoBasisResult, mode: str = "auto"):
    """Raise :class:`InsufficientMoments` unless the needed products are in the support."""
    if basis.rank == 0:
        return
    if mode == "auto":
        mode = "pencil" if sigma.nvars == 1 else "flat"
    left = basis.border_plus()
    right = basis.border_plus_prime() if mode == "flat" else basis.b_prime
    for a in left:
        for bp in right:
            g = index_add(a, bp)
            if g not in sigma:
                raise InsufficientMoments(
                    f"moment {g} is needed to certify the rank-{basis.rank} structure "
                    f"({mode} coverage) but is not given",
                    g,
                )


def moment_residual(model: PolExpModel, sigma: MomentSequence) -> float:
    """``max |sigma_alpha - synth_alpha|`` over the support of ``sigma``."""
    synth = synth_moments(model, sigma.support)
    return max((abs(sigma[a] - synth[a]) for a in sigma.support), default=0.0)


def _coefficient_ratio_check(mats, l, basis, model) -> float | None:
    """Roots read from left eigenvectors as ratios of monomial evaluations."""
    n = basis.nvars
    needed = [tuple([0] * n)] + [unit(n, k) for k in range(n)]
    pos = {a: i for i, a in enumerate(basis.b)}
    if any(a not in pos for a in needed) or len(model.terms) != basis.rank:
        return None
    Pb, _ = _sub_basis(basis)
    w, vl = np.linalg.eig(combine(mats, l).T)
    # left eigenvectors hold [p_j(xi)]; recover monomial values through Pb
    mons = np.linalg.solve(Pb.T, vl)
    pts = model.points
    worst = 0.0
    for j in range(mons.shape[1]):
        c0 = mons[pos[needed[0]], j]
        if c0 == 0:
            return None
        xi = np.array([mons[pos[needed[k + 1]], j] / c0 for k in range(n)])
        worst = max(worst, float(np.min(np.max(np.abs(pts - xi[None, :]), axis=1))))
    return worst


def decompose(sigma: MomentSequence, config: DecomposeConfig | None = None) -> DecompositionReport:
    """Polynomial-exponential decomposition of a truncated moment sequence.

    Computes the biorthogonal bases, checks that the moments cover the
    products needed, builds the multiplication matrices, picks a separating
    form and recovers the model through the simple-root path when every
    eigenvalue cluster is a singleton (the multiple-root path otherwise).
    """
    config = config or DecomposeConfig()
    n = sigma.nvars
    basis = compute_orthobasis(sigma, config.order, config.pivot_tol)
    diagnostics: dict = {
        "seed": config.seed,
        "consumed_degree": basis.consumed_degree,
        "basis": [list(a) for a in basis.b],
        "basis_prime": [list(a) for a in basis.b_prime],
        "kernel_exponents": [list(a) for a in basis.d_exponents],
        "min_pivot": min((abs(p) for p in basis.pivots), default=0.0),
    }
    if basis.rank == 0:
        return DecompositionReport(
            model=PolExpModel(n, ()),
            rank=0,
            separating_form=np.eye(n)[0],
            mult_matrices=[np.zeros((0, 0), dtype=complex) for _ in range(n)],
            eigen_condition=0.0,
            moment_residual=moment_residual(PolExpModel(n, ()), sigma),
            multiplicity_profile=[],
            diagnostics=diagnostics,
        )
    check_coverage(sigma, basis, config.coverage)
    mats = mult_matrices(sigma, basis)
    diagnostics["commutation_error"] = commutation_error(mats)
    try:
        l = choose_separating_form(mats, config.seed, config.sep_tol, config.max_tries, config.cluster_tol)
        diagnostics["separated"] = True
    except NoSeparatingForm:
        l = _fallback_form(n, config.seed)
        diagnostics["separated"] = False
    bal = _balance(mats, balancing_scale(mats))
    _, _, cond = cluster_eigenvalues(combine(bal, l), config.cluster_tol)
    eigen_condition = float(np.max(cond)) if len(cond) else 0.0
    blocks, _ = joint_blocks(bal, l, config.cluster_tol)
    method = config.method
    if method == "auto":
        method = "simple" if all(Z.shape[1] == 1 for Z in blocks) else "multiple"
    info: dict = {}
    if method == "simple":
        try:
            model = decompose_simple(sigma, basis, l, config=config, mats=mats)
        except DegenerateEigenvector:
            method = "multiple"
    if method == "multiple":
        model = decompose_multiple(sigma, basis, l, config=config, mats=mats, info=info)
    diagnostics["method"] = method
    model = canonicalize(model, config.merge_tol, drop_tol=0.0)
    profile = [mu_dimension(t.weight, config.rank_tol) for t in model.terms]
    diagnostics["model_rank"] = sum(profile)
    if method == "simple":
        ratio = _coefficient_ratio_check(mats, l, basis, model)
        if ratio is not None:
            diagnostics["coefficient_ratio_deviation"] = ratio
    residual = moment_residual(model, sigma)
    diagnostics["relative_moment_residual"] = residual / (sigma.scale or 1.0)
    return DecompositionReport(
        model=model,
        rank=basis.rank,
        separating_form=np.asarray(l),
        mult_matrices=mats,
        eigen_condition=eigen_condition,
        moment_residual=residual,
        multiplicity_profile=profile,
        diagnostics=diagnostics,
    )

"""Multi-indices, sparse complex polynomials, monomial orders and moment sequences.

A moment sequence ``sigma`` assigns a complex number ``sigma[alpha]`` to every
exponent ``alpha`` of a finite downward-closed set.  It acts on polynomials
through the pairing ``<sigma|p> = sum_beta p_beta sigma_beta`` and polynomials
act on it through the shift ``(p * sigma)_alpha = sum_beta p_beta
sigma_{alpha+beta}``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from numbers import Number
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import EmptyResult, OutOfSupport, ParseError, PreconditionViolation

DROP_TOL = 1e-12

MultiIndex = tuple


# ---------------------------------------------------------------------------
# multi-index helpers
# ---------------------------------------------------------------------------

def as_index(alpha, nvars: int | None = None) -> tuple:
    """Validate ``alpha`` and return it as a tuple of non-negative ints."""
    try:
        out = tuple(int(a) for a in alpha)
    except TypeError as exc:
        raise PreconditionViolation(f"not a multi-index: {alpha!r}") from exc
    if any(a < 0 for a in out):
        raise PreconditionViolation(f"negative exponent in {out}")
    if any(int(a) != a for a in alpha):
        raise PreconditionViolation(f"non-integer exponent in {alpha!r}")
    if nvars is not None and len(out) != nvars:
        raise PreconditionViolation(f"{out} does not have {nvars} entries")
    return out


def degree(alpha) -> int:
    return sum(alpha)


def divides(beta, alpha) -> bool:
    """True when ``beta << alpha``, i.e. ``beta_i <= alpha_i`` for all i."""
    return all(b <= a for b, a in zip(beta, alpha))


def index_add(alpha, beta) -> tuple:
    return tuple(a + b for a, b in zip(alpha, beta))


def index_sub(alpha, beta) -> tuple:
    return tuple(a - b for a, b in zip(alpha, beta))


def unit(nvars: int, i: int) -> tuple:
    return tuple(1 if k == i else 0 for k in range(nvars))


def zero_index(nvars: int) -> tuple:
    return (0,) * nvars


def index_factorial(alpha) -> int:
    return math.prod(math.factorial(a) for a in alpha)


def falling_ratio(alpha, beta) -> int:
    """alpha! / (alpha - beta)!  (zero unless beta << alpha)."""
    if not divides(beta, alpha):
        return 0
    return math.prod(math.perm(a, b) for a, b in zip(alpha, beta))


def monomials_up_to(nvars: int, deg: int) -> list[tuple]:
    """All exponents of total degree at most ``deg`` (graded listing)."""
    out = []
    for d in range(deg + 1):
        out.extend(monomials_of_degree(nvars, d))
    return out


def monomials_of_degree(nvars: int, deg: int) -> list[tuple]:
    if nvars == 0:
        return [()] if deg == 0 else []
    out = []
    for first in range(deg, -1, -1):
        for rest in monomials_of_degree(nvars - 1, deg - first):
            out.append((first,) + rest)
    return out


def divisors(alpha) -> list[tuple]:
    return [tuple(b) for b in itertools.product(*(range(a + 1) for a in alpha))]


def divisor_closure(exponents: Iterable) -> set:
    out = set()
    for alpha in exponents:
        out.update(divisors(alpha))
    return out


def is_downward_closed(support) -> bool:
    support = set(support)
    for alpha in support:
        for i, a in enumerate(alpha):
            if a > 0:
                prev = alpha[:i] + (a - 1,) + alpha[i + 1:]
                if prev not in support:
                    return False
    return True


def border(exponents: Iterable, nvars: int) -> set:
    """The border ``{beta + e_i} \\ exponents`` of a set of exponents."""
    exps = set(exponents)
    out = set()
    for beta in exps:
        for i in range(nvars):
            cand = index_add(beta, unit(nvars, i))
            if cand not in exps:
                out.add(cand)
    return out


def is_connected_to_one(exponents: Iterable, nvars: int) -> bool:
    exps = set(exponents)
    if not exps:
        return True
    if zero_index(nvars) not in exps:
        return False
    for beta in exps:
        if sum(beta) == 0:
            continue
        if not any(
            b > 0 and beta[:i] + (b - 1,) + beta[i + 1:] in exps
            for i, b in enumerate(beta)
        ):
            return False
    return True


# ---------------------------------------------------------------------------
# monomial orders
# ---------------------------------------------------------------------------

_ORDER_ALIASES = {
    "grlex": "grlex",
    "graded-lex": "grlex",
    "grevlex": "grevlex",
    "graded-revlex": "grevlex",
    "lex": "lex",
}


@dataclass(frozen=True)
class MonomialOrder:
    """A total order on exponents.

    ``grlex`` sorts by degree and, within one degree, puts higher powers of
    earlier variables first (1, x1, x2, x1^2, x1*x2, x2^2, ...).  ``grevlex``
    sorts by degree and then by the reversed exponent tuple, and ``lex``
    compares reversed exponent tuples only.  ``perm`` relabels the variables
    before the key is computed: position ``i`` of the permuted exponent is
    ``alpha[perm[i]]``.
    """

    kind: str = "grlex"
    perm: tuple | None = None

    def __post_init__(self):
        kind = _ORDER_ALIASES.get(self.kind)
        if kind is None:
            raise PreconditionViolation(f"unknown monomial order {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if self.perm is not None:
            perm = tuple(int(i) for i in self.perm)
            if sorted(perm) != list(range(len(perm))):
                raise PreconditionViolation(f"{perm} is not a permutation")
            object.__setattr__(self, "perm", perm)

    def key(self, alpha):
        a = tuple(alpha)
        if self.perm is not None:
            a = tuple(a[i] for i in self.perm)
        if self.kind == "grlex":
            return (sum(a),) + tuple(-x for x in a)
        if self.kind == "grevlex":
            return (sum(a),) + tuple(reversed(a))
        return tuple(reversed(a))

    def sort(self, exponents: Iterable) -> list:
        return sorted(exponents, key=self.key)

    def less(self, alpha, beta) -> bool:
        return self.key(alpha) < self.key(beta)


GRLEX = MonomialOrder("grlex")


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

class Poly:
    """Sparse polynomial with complex coefficients in ``nvars`` variables.

    The same class represents polynomials in ``x`` and weights in ``y``.
    Coefficients with modulus at most ``drop_tol`` are discarded.  Instances
    are treated as immutable.

    Examples
    --------
    >>> x1, x2 = Poly.variables(2)
    >>> p = x1 * x2 + 2
    >>> p((1.0, 3.0))
    (5+0j)
    """

    __slots__ = ("nvars", "_terms", "drop_tol")

    def __init__(self, nvars: int, terms: Mapping | None = None, drop_tol: float = DROP_TOL):
        self.nvars = int(nvars)
        self.drop_tol = float(drop_tol)
        clean = {}
        for alpha, c in (terms or {}).items():
            alpha = as_index(alpha, self.nvars)
            c = complex(c)
            if not (np.isfinite(c.real) and np.isfinite(c.imag)):
                raise PreconditionViolation(f"non-finite coefficient for {alpha}")
            if abs(c) > self.drop_tol:
                clean[alpha] = clean.get(alpha, 0j) + c
        self._terms = {a: c for a, c in clean.items() if abs(c) > self.drop_tol}

    # constructors ---------------------------------------------------------
    @classmethod
    def constant(cls, nvars: int, c=1.0, drop_tol: float = DROP_TOL) -> "Poly":
        return cls(nvars, {zero_index(nvars): c}, drop_tol)

    @classmethod
    def monomial(cls, alpha, coeff=1.0, drop_tol: float = DROP_TOL) -> "Poly":
        alpha = tuple(alpha)
        return cls(len(alpha), {alpha: coeff}, drop_tol)

    @classmethod
    def variables(cls, nvars: int) -> list["Poly"]:
        return [cls.monomial(unit(nvars, i)) for i in range(nvars)]

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars)

    @classmethod
    def from_vector(cls, exponents: Sequence, coeffs, drop_tol: float = DROP_TOL) -> "Poly":
        """Build ``sum_k coeffs[k] x^exponents[k]``."""
        if not exponents:
            raise PreconditionViolation("cannot infer nvars from an empty exponent list")
        nvars = len(exponents[0])
        return cls(nvars, {a: c for a, c in zip(exponents, coeffs)}, drop_tol)

    # accessors --------------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def support(self) -> list:
        return sorted(self._terms, key=GRLEX.key)

    def coeff(self, alpha) -> complex:
        return self._terms.get(tuple(alpha), 0j)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(a) for a in self._terms), default=-1)

    def vector(self, exponents: Sequence) -> np.ndarray:
        return np.array([self.coeff(a) for a in exponents], dtype=complex)

    def __len__(self):
        return len(self._terms)

    # arithmetic ---------------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise PreconditionViolation("polynomials in different numbers of variables")
            return other
        if isinstance(other, (Number, np.number)):
            return Poly.constant(self.nvars, other, self.drop_tol)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for a, c in other._terms.items():
            terms[a] = terms.get(a, 0j) + c
        return Poly(self.nvars, terms, min(self.drop_tol, other.drop_tol))

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {a: -c for a, c in self._terms.items()}, self.drop_tol)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (Number, np.number)):
            c = complex(other)
            return Poly(self.nvars, {a: c * v for a, v in self._terms.items()}, self.drop_tol)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: dict = {}
        for a, c in self._terms.items():
            for b, d in other._terms.items():
                key = index_add(a, b)
                terms[key] = terms.get(key, 0j) + c * d
        return Poly(self.nvars, terms, min(self.drop_tol, other.drop_tol))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (Number, np.number)):
            return self * (1.0 / complex(other))
        return NotImplemented

    def __pow__(self, k: int):
        if int(k) != k or k < 0:
            raise PreconditionViolation("only non-negative integer powers are supported")
        out = Poly.constant(self.nvars, 1.0, self.drop_tol)
        for _ in range(int(k)):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (Number, np.number)):
            other = Poly.constant(self.nvars, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self._terms.items())))

    def allclose(self, other, atol: float = 1e-10) -> bool:
        """Coefficientwise comparison with absolute tolerance ``atol``."""
        if isinstance(other, (Number, np.number)):
            other = Poly.constant(self.nvars, other)
        keys = set(self._terms) | set(other._terms)
        return all(abs(self.coeff(a) - other.coeff(a)) <= atol for a in keys)

    def with_drop_tol(self, drop_tol: float) -> "Poly":
        return Poly(self.nvars, self._terms, drop_tol)

    def map_coefficients(self, fn: Callable[[complex], complex]) -> "Poly":
        return Poly(self.nvars, {a: fn(c) for a, c in self._terms.items()}, self.drop_tol)

    # calculus ---------------------------------------------------------------
    def __call__(self, point) -> complex:
        point = np.asarray(point, dtype=complex)
        if point.shape != (self.nvars,):
            raise PreconditionViolation(f"point must have {self.nvars} coordinates")
        total = 0j
        for a, c in self._terms.items():
            total += c * np.prod(point ** np.array(a))
        return complex(total)

    def derivative(self, beta) -> "Poly":
        """The partial derivative ``d^beta`` of the polynomial."""
        beta = as_index(beta, self.nvars)
        terms = {}
        for a, c in self._terms.items():
            if divides(beta, a):
                terms[index_sub(a, beta)] = c * falling_ratio(a, beta)
        return Poly(self.nvars, terms, self.drop_tol)

    def shift(self, t) -> "Poly":
        """The polynomial ``x -> p(x + t)``."""
        t = np.asarray(t, dtype=complex)
        terms: dict = {}
        for a, c in self._terms.items():
            for b in divisors(a):
                gamma = index_sub(a, b)
                coef = c * math.prod(math.comb(ai, bi) for ai, bi in zip(a, b))
                coef *= complex(np.prod(t ** np.array(gamma)))
                terms[b] = terms.get(b, 0j) + coef
        return Poly(self.nvars, terms, self.drop_tol)

    # display ------------------------------------------------------------------
    def __repr__(self):
        if not self._terms:
            return "Poly(0)"
        parts = []
        for a in self.support():
            c = self._terms[a]
            cs = f"{c.real:.6g}" if c.imag == 0 else f"({c.real:.6g}{c.imag:+.6g}j)"
            mono = "*".join(
                f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}" for i, e in enumerate(a) if e
            )
            parts.append(cs if not mono else f"{cs}*{mono}")
        return "Poly(" + " + ".join(parts) + ")"

    # serialization ------------------------------------------------------------
    def to_list(self, order: MonomialOrder = GRLEX) -> list:
        return [
            {"beta": list(a), "re": float(self._terms[a].real), "im": float(self._terms[a].imag)}
            for a in order.sort(self._terms)
        ]

    @classmethod
    def from_list(cls, nvars: int, items: Sequence, key: str = "beta") -> "Poly":
        terms: dict = {}
        for item in items:
            alpha = _parse_index(item, key, nvars)
            if alpha in terms:
                raise ParseError(f"duplicate exponent {alpha}")
            terms[alpha] = _parse_complex(item)
        return cls(nvars, terms, drop_tol=0.0)


# ---------------------------------------------------------------------------
# moment sequences
# ---------------------------------------------------------------------------

class MomentSequence:
    """Finite table of moments ``sigma_alpha`` on a downward-closed support.

    Parameters
    ----------
    nvars : int
        Number of variables.
    values : mapping
        Exponent tuple -> complex moment.
    support : iterable, optional
        The index set.  Defaults to the keys of ``values``.  Exponents of the
        support missing from ``values`` get the value 0.
    """

    __slots__ = ("nvars", "_values", "_support")

    def __init__(self, nvars: int, values: Mapping, support: Iterable | None = None):
        self.nvars = int(nvars)
        if self.nvars < 1:
            raise PreconditionViolation("nvars must be at least 1")
        vals = {}
        for alpha, v in values.items():
            alpha = as_index(alpha, self.nvars)
            v = complex(v)
            if not (np.isfinite(v.real) and np.isfinite(v.imag)):
                raise PreconditionViolation(f"non-finite moment at {alpha}")
            vals[alpha] = v
        if support is None:
            supp = frozenset(vals)
        else:
            supp = frozenset(as_index(a, self.nvars) for a in support)
            extra = set(vals) - supp
            if extra:
                raise PreconditionViolation(f"values outside the support: {sorted(extra)[:3]}")
            for alpha in supp:
                vals.setdefault(alpha, 0j)
        if not is_downward_closed(supp):
            raise PreconditionViolation("support is not downward-closed")
        self._values = vals
        self._support = supp

    @classmethod
    def from_function(cls, nvars: int, support: Iterable, fn: Callable) -> "MomentSequence":
        support = [as_index(a, nvars) for a in support]
        return cls(nvars, {a: fn(a) for a in support})

    @property
    def support(self) -> frozenset:
        return self._support

    @property
    def values(self) -> dict:
        return dict(self._values)

    def __getitem__(self, alpha) -> complex:
        alpha = tuple(alpha)
        try:
            return self._values[alpha]
        except KeyError:
            raise OutOfSupport(alpha) from None

    def get(self, alpha, default=None):
        return self._values.get(tuple(alpha), default)

    def __contains__(self, alpha) -> bool:
        return tuple(alpha) in self._support

    def __len__(self):
        return len(self._support)

    def __iter__(self):
        return iter(GRLEX.sort(self._support))

    def __eq__(self, other):
        if not isinstance(other, MomentSequence):
            return NotImplemented
        return self.nvars == other.nvars and self._values == other._values

    def __repr__(self):
        return f"MomentSequence(nvars={self.nvars}, size={len(self)}, max_degree={self.max_degree})"

    @property
    def max_degree(self) -> int:
        return max((sum(a) for a in self._support), default=-1)

    @property
    def scale(self) -> float:
        """Largest moment modulus (0 for the zero sequence)."""
        return max((abs(v) for v in self._values.values()), default=0.0)

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.scale <= tol

    def sorted_support(self, order: MonomialOrder = GRLEX) -> list:
        return order.sort(self._support)

    def array(self, exponents: Sequence) -> np.ndarray:
        return np.array([self[a] for a in exponents], dtype=complex)

    def scaled(self, c) -> "MomentSequence":
        c = complex(c)
        return MomentSequence(self.nvars, {a: c * v for a, v in self._values.items()})

    def restrict(self, support: Iterable) -> "MomentSequence":
        support = [tuple(a) for a in support]
        return MomentSequence(self.nvars, {a: self[a] for a in support})

    def rescaled(self, c) -> "MomentSequence":
        """The sequence ``sigma_alpha * c^(-alpha)``.

        If ``sigma`` has frequencies ``xi`` then the result has frequencies
        ``xi / c`` (componentwise).
        """
        c = np.asarray(c, dtype=complex)
        return MomentSequence(
            self.nvars,
            {a: v / complex(np.prod(c ** np.array(a))) for a, v in self._values.items()},
        )

    # serialization ------------------------------------------------------------
    def to_dict(self, order: MonomialOrder = GRLEX) -> dict:
        return {
            "nvars": self.nvars,
            "moments": [
                {"alpha": list(a), "re": float(self._values[a].real), "im": float(self._values[a].imag)}
                for a in order.sort(self._support)
            ],
        }

    @classmethod
    def from_dict(cls, doc) -> "MomentSequence":
        nvars = _parse_nvars(doc)
        items = doc.get("moments")
        if not isinstance(items, list):
            raise ParseError("'moments' must be a list")
        values: dict = {}
        for item in items:
            alpha = _parse_index(item, "alpha", nvars)
            if alpha in values:
                raise ParseError(f"duplicate exponent {list(alpha)}")
            values[alpha] = _parse_complex(item)
        try:
            return cls(nvars, values)
        except PreconditionViolation as exc:
            raise ParseError(str(exc)) from exc


def _parse_nvars(doc) -> int:
    if not isinstance(doc, dict):
        raise ParseError("top-level JSON value must be an object")
    nvars = doc.get("nvars")
    if not isinstance(nvars, int) or isinstance(nvars, bool) or nvars < 1:
        raise ParseError("'nvars' must be a positive integer")
    return nvars


def _parse_index(item, key: str, nvars: int) -> tuple:
    if not isinstance(item, dict) or key not in item:
        raise ParseError(f"entry without {key!r}: {item!r}")
    alpha = item[key]
    if (
        not isinstance(alpha, list)
        or len(alpha) != nvars
        or not all(isinstance(a, int) and not isinstance(a, bool) and a >= 0 for a in alpha)
    ):
        raise ParseError(f"{key!r} must be a list of {nvars} non-negative integers: {alpha!r}")
    return tuple(alpha)


def _parse_complex(item) -> complex:
    re = item.get("re", 0.0)
    im = item.get("im", 0.0)
    for v in (re, im):
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            raise ParseError(f"'re'/'im' must be finite numbers: {item!r}")
    return complex(re, im)


# ---------------------------------------------------------------------------
# pairing and shift
# ---------------------------------------------------------------------------

def pairing(sigma: MomentSequence, p: Poly) -> complex:
    """``<sigma|p> = sum_beta p_beta sigma_beta``."""
    _check_nvars(sigma, p)
    total = 0j
    for beta, c in p.items():
        total += c * sigma[beta]
    return total


def star_shift(sigma: MomentSequence, p: Poly) -> MomentSequence:
    """The shifted sequence ``(p * sigma)_alpha = sum_beta p_beta sigma_{alpha+beta}``.

    The result lives on the exponents ``alpha`` with ``alpha + beta`` in the
    support of ``sigma`` for every ``beta`` in the support of ``p``.
    """
    _check_nvars(sigma, p)
    terms = list(p.items())
    values = {}
    for alpha in sigma.support:
        shifted = [index_add(alpha, beta) for beta, _ in terms]
        if all(s in sigma for s in shifted):
            values[alpha] = sum((c * sigma[s] for (_, c), s in zip(terms, shifted)), 0j)
    if not values:
        raise EmptyResult("shifted support is empty")
    return MomentSequence(sigma.nvars, values)


def inner_product(sigma: MomentSequence, p: Poly, q: Poly) -> complex:
    """``<p, q>_sigma = <sigma | p q>`` (bilinear, not sesquilinear)."""
    return pairing(sigma, p * q)


def _check_nvars(sigma: MomentSequence, p: Poly):
    if p.nvars != sigma.nvars:
        raise PreconditionViolation(
            f"polynomial has {p.nvars} variables, sequence has {sigma.nvars}"
        )

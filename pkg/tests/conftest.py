import os
import zlib
from math import comb

import numpy as np
import pytest

from polyexp.algebra import MomentSequence, Poly, monomials_up_to
from polyexp.polexp import PolExpModel, PolExpTerm

SEED = int(os.environ.get("POLYEXP_SEED", "0"))

THREE_POINT_MODEL = PolExpModel.from_points([(1, 1), (2, 2), (3, 1)], [2, 3, -1])

# moment matrix on [1, x1, x2, x1^2, x1 x2, x2^2] as printed for the example
THREE_POINT_MATRIX = np.array([
    [4, 5, 7, 5, 11, 13],
    [5, 5, 11, -1, 17, 23],
    [7, 11, 13, 17, 23, 25],
    [5, -1, 17, -31, 23, 41],
    [11, 17, 23, 23, 41, 47],
    [13, 23, 25, 41, 47, 49],
], dtype=float)


def three_point_h(a):
    return 2 + 3 * 2 ** (a[0] + a[1]) - 3 ** a[0]


@pytest.fixture
def three_point_sigma():
    return MomentSequence(2, {a: three_point_h(a) for a in monomials_up_to(2, 4)})


def make_rng(*keys):
    """Philox stream keyed by the global seed and a test-specific tag."""
    return np.random.Generator(np.random.Philox(key=[SEED, zlib.crc32(repr(keys).encode())]))


def separated_points(rng, r, n, sep=0.3, box=1.0, real=False):
    """``r`` points of ``C^n`` (or ``R^n``) in a box, pairwise at least ``sep`` apart."""
    while True:
        pts = rng.uniform(-box, box, (r, n)).astype(complex)
        if not real:
            pts += 1j * rng.uniform(-box, box, (r, n))
        gaps = [np.max(np.abs(pts[i] - pts[j])) for i in range(r) for j in range(i)]
        if not gaps or min(gaps) >= sep:
            return pts


def random_weight(rng, n, degree, real=False):
    """Random polynomial with all coefficients of degree ``<= degree`` nonzero."""
    terms = {}
    for a in monomials_up_to(n, degree):
        c = rng.uniform(0.5, 1.5) * rng.choice([-1, 1])
        if not real:
            c = c * np.exp(1j * rng.uniform(0, 2 * np.pi))
        terms[a] = c
    return Poly(n, terms)


def random_constant_model(rng, r, n, real=False, positive=False, sep=0.3):
    pts = separated_points(rng, r, n, sep=sep, real=real)
    if positive:
        w = rng.uniform(0.5, 2.0, r)
    else:
        w = rng.uniform(0.5, 2.0, r) * (rng.choice([-1, 1], r) if real else np.exp(1j * rng.uniform(0, 2 * np.pi, r)))
    return PolExpModel.from_points(pts, w)


def min_basis_degree(n, r):
    d = 0
    while comb(n + d, n) < r:
        d += 1
    return d


def brute_force_moment(model, alpha):
    """Derivative of ``sum_i omega_i(y) exp(xi_i . y)`` at 0 via the Leibniz rule.

    Independent of the library's synthesis: the exponential factor
    contributes ``xi^(alpha - beta)`` and ``d^beta y^beta = beta!``.
    """
    from math import factorial
    total = 0j
    for t in model.terms:
        for beta, c in t.weight.items():
            if all(b <= a for a, b in zip(alpha, beta)):
                coef = 1
                for a, b in zip(alpha, beta):
                    coef *= comb(a, b) * factorial(b)
                total += c * coef * np.prod(np.asarray(t.xi) ** (np.array(alpha) - np.array(beta)))
    return total


def model_with_weights(points, weights):
    n = len(points[0])
    return PolExpModel(n, tuple(PolExpTerm(np.asarray(x, dtype=complex), w) for x, w in zip(points, weights)))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)

"""Symmetric quadrature rules on the reference triangle and on edges.

Triangle rules are stored in barycentric coordinates with weights that sum
to one, so that ``int_K f dx = area(K) * sum_q w_q f(x_q)``.  Only rules with
strictly positive weights are kept (the classic 4-point degree-3 rule has a
negative weight and is skipped; degree requests map to the next rule up).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class QuadratureRule:
    """Barycentric points (n_q, 3), positive weights (n_q,) summing to 1."""

    points: np.ndarray
    weights: np.ndarray
    degree: int

    @property
    def n_points(self) -> int:
        return self.points.shape[0]


def _perm3(a, b):
    # the three cyclic placements of a multiplicity-3 orbit (a, b, b)
    return [(a, b, b), (b, a, b), (b, b, a)]


def _perm6(a, b, c):
    return [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]


def _rule(degree, groups):
    pts, wts = [], []
    for w, orbit in groups:
        for p in orbit:
            pts.append(p)
            wts.append(w)
    points = np.asarray(pts, dtype=float)
    weights = np.asarray(wts, dtype=float)
    weights = weights / weights.sum()
    return QuadratureRule(points=points, weights=weights, degree=degree)


# Dunavant-style positive rules, weights normalized to the unit simplex.
_RULES = {
    1: _rule(1, [(1.0, [(1 / 3, 1 / 3, 1 / 3)])]),
    2: _rule(2, [(1 / 3, _perm3(2 / 3, 1 / 6))]),
    4: _rule(4, [
        (0.223381589678011, _perm3(0.108103018168070, 0.445948490915965)),
        (0.109951743655322, _perm3(0.816847572980459, 0.091576213509771)),
    ]),
    5: _rule(5, [
        (0.225, [(1 / 3, 1 / 3, 1 / 3)]),
        (0.132394152788506, _perm3(0.059715871789770, 0.470142064105115)),
        (0.125939180544827, _perm3(0.797426985353087, 0.101286507323456)),
    ]),
    6: _rule(6, [
        (0.050844906370207, _perm3(0.873821971016996, 0.063089014491502)),
        (0.116786275726379, _perm3(0.501426509658179, 0.249286745170910)),
        (0.082851075618374, _perm6(0.636502499121399, 0.310352451033785,
                                   0.053145049844816)),
    ]),
    8: _rule(8, [
        (0.144315607677787, [(1 / 3, 1 / 3, 1 / 3)]),
        (0.095091634413595, _perm3(0.081414823414554, 0.459292588292723)),
        (0.103217370534718, _perm3(0.658861384496480, 0.170569307751760)),
        (0.032458497623198, _perm3(0.898905543365938, 0.050547228317031)),
        (0.027230314174435, _perm6(0.008394777409958, 0.263112829634638,
                                   0.728492392955404)),
    ]),
}

_AVAILABLE = sorted(_RULES)


@lru_cache(maxsize=None)
def triangle_rule(degree: int) -> QuadratureRule:
    """Return a positive-weight rule exact for polynomials up to ``degree``."""
    if degree < 1:
        degree = 1
    for d in _AVAILABLE:
        if d >= degree:
            return _RULES[d]
    raise ValueError(f"no triangle quadrature rule of degree {degree}")


@lru_cache(maxsize=None)
def edge_rule(n_points: int):
    """Gauss-Legendre points/weights on [0, 1]; exact to degree 2n-1."""
    x, w = np.polynomial.legendre.leggauss(n_points)
    return 0.5 * (x + 1.0), 0.5 * w

"""Finite-part product quadrature for algebraic endpoint singularities.

The integrals defining conformal blocks are analytic continuations in the
exponents of the master function.  After a Duffy blow-up every singular
vertex and edge becomes a coordinate face of the unit square, and the
integrand factorises as r^{A_r - 1} w^{A_w - 1} g(r, w) with g smooth.  For
non-integer A the analytic continuation of int_0^1 y^{A-1} g(y) dy is the
Hadamard finite part, which is linear in g and agrees with the ordinary
integral whenever Re A > 0.  Product rules integrate y^{A-1} times the
interpolating polynomial of g exactly, so the moments 1/(A+m) carry the
continuation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

__all__ = [
    "PoleError",
    "LEVEL_NODES",
    "nodes_for_level",
    "product_rule",
    "finite_part",
    "Simplex",
    "duffy_pieces",
]

# node counts per dimension indexed by refinement level
LEVEL_NODES = (8, 12, 16, 24, 32, 40, 48)


class PoleError(ArithmeticError):
    """The analytic continuation has a pole at the requested exponents."""


def nodes_for_level(level: int) -> int:
    if not 0 <= level < len(LEVEL_NODES):
        raise ValueError(f"level must be in 0..{len(LEVEL_NODES) - 1}")
    return LEVEL_NODES[level]


def _key(a: float) -> float:
    # exponents are rational with small denominators; rounding keeps the cache small
    return round(float(a), 12)


@lru_cache(maxsize=256)
def _rule(a: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    if a <= 0 and abs(a - round(a)) < 1e-9:
        raise PoleError(f"finite part undefined for integer exponent A={a}")
    with mpmath.workdps(2 * n + 40):
        aa = mpmath.mpf(a)
        ys = [(1 - mpmath.cos((2 * i + 1) * mpmath.pi / (2 * n))) / 2 for i in range(n)]
        vt = mpmath.matrix(n, n)
        for m in range(n):
            for i in range(n):
                vt[m, i] = ys[i] ** m
        mom = mpmath.matrix([1 / (aa + m) for m in range(n)])
        w = mpmath.lu_solve(vt, mom)
        nodes = np.array([float(y) for y in ys])
        weights = np.array([float(x) for x in w])
    return nodes, weights


def product_rule(a: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1] for the weight y^{a-1} (finite part if a <= 0).

    Parameters
    ----------
    a : float
        Exponent parameter A; the rule integrates y^{A-1} P(y) exactly for
        polynomials P of degree < n.
    n : int
        Number of Chebyshev nodes.

    Raises
    ------
    PoleError
        If A is a non-positive integer.

    Notes
    -----
    The weights alternate in sign once A < 0 and sum(|w|) grows quickly
    (about 6e4 at A = -1.7 and 8e6 at A = -2.9 for n = 16), so in double
    precision a rule applied to data of size 1 carries an error of order
    eps * sum(|w|).
    """
    nodes, weights = _rule(_key(a), int(n))
    return nodes.copy(), weights.copy()


def finite_part(g, a: float, n: int = 32) -> complex:
    """Finite part of int_0^1 y^{a-1} g(y) dy for a vectorised smooth g."""
    y, w = product_rule(a, n)
    return complex(np.sum(w * np.asarray(g(y))))


@dataclass(frozen=True)
class Simplex:
    """A Duffy piece: triangle (or segment) with apex V, base edge V-M and third vertex C.

    Points are V + r((1 - w)(M - V) + w(C - V)) with (r, w) in [0,1]^2; for
    segments C is None and the point is V + r(M - V).  Coordinates are real
    parameter vectors s; the map to integration variables happens later.
    """

    V: tuple
    M: tuple
    C: tuple | None

    @property
    def dim(self) -> int:
        return 1 if self.C is None else 2

    def jacobian(self) -> float:
        v = np.array(self.V, float)
        m = np.array(self.M, float) - v
        if self.C is None:
            return float(np.linalg.norm(m)) if len(v) > 1 else abs(float(m[0]))
        c = np.array(self.C, float) - v
        return abs(float(m[0] * c[1] - m[1] * c[0]))

    def directions(self, w: np.ndarray) -> np.ndarray:
        """Direction vectors D(w) so that point = V + r D(w); shape (len(w), d)."""
        v = np.array(self.V, float)
        m = np.array(self.M, float) - v
        if self.C is None:
            return np.broadcast_to(m, (len(w), len(v))).copy()
        c = np.array(self.C, float) - v
        return np.outer(1 - w, m) + np.outer(w, c)


def _mid(a, b):
    return tuple((x + y) / 2 for x, y in zip(a, b))


def duffy_pieces(kind: str) -> list[Simplex]:
    """Decompose a reference domain into Duffy pieces with one singular apex each.

    kind is "segment" for [0,1], "simplex" for {1 >= s1 >= s2 >= 0} and
    "square" for [0,1]^2.
    """
    if kind == "segment":
        return [Simplex((0.0,), (0.5,), None), Simplex((1.0,), (0.5,), None)]
    if kind == "simplex":
        verts = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]
        cen = (2.0 / 3.0, 1.0 / 3.0)
        out = []
        for i, v in enumerate(verts):
            for j, u in enumerate(verts):
                if i != j:
                    out.append(Simplex(v, _mid(v, u), cen))
        return out
    if kind == "square":
        corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
        cen = (0.5, 0.5)
        out = []
        for i, v in enumerate(corners):
            for nb in (corners[(i + 1) % 4], corners[(i - 1) % 4]):
                out.append(Simplex(v, _mid(v, nb), cen))
        return out
    raise ValueError(f"unknown domain kind {kind!r}")


def _check_cover(kind: str) -> float:
    # total area of the pieces, used by tests
    return math.fsum(p.jacobian() / (2 if p.dim == 2 else 1) for p in duffy_pieces(kind))

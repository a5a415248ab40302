"""Elliptic hypergeometric integrals J^{[k]}_{kappa,n} and the blocks u^{[k]}_n.

Integration variables are t_j = s_j for j <= k and t_j = tau s_j otherwise,
with s in the unit segment (p = 1), the simplex 1 >= s_1 >= s_2 >= 0
(p = 2, k in {0, 2}) or the unit square (p = 2, k = 1).  Every singular
linear form (t_j, or t_i - t_j) is lattice valued at each apex of the Duffy
pieces; near an apex the form is written as omega + x with omega in the
lattice and x small, so E and sigma_lambda are evaluated through their
quasi-periodicity laws at x.  This keeps full relative accuracy at nodes
next to the singular vertices.

The exponent bookkeeping per form: E(t_j)^{-2p/kappa} sigma_lambda(t_j)
behaves like |x|^{-2p/kappa - 1}, E(t_i - t_j)^{2/kappa} like |x|^{2/kappa}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .branch import track_arguments
from .quadrature import PoleError, duffy_pieces, nodes_for_level, product_rule
from .theta import EllipticContext, E_shifted, sigma_lambda, theta_level

__all__ = [
    "IntegralSpec",
    "BlockValue",
    "NonConvergenceError",
    "u_block",
    "u_value",
    "j_integral",
    "PoleError",
]


class NonConvergenceError(RuntimeError):
    """Successive quadrature levels disagree above the requested tolerance."""


@dataclass(frozen=True)
class IntegralSpec:
    """Parameters of u^{[k]}_{kappa,n}(lambda, tau).

    Parameters
    ----------
    kappa, p, k, n : int
        Level, number of integration variables, number of real variables
        and theta index.
    lam : complex
        Spectral parameter lambda.
    level : int
        Quadrature refinement level (nodes per dimension from LEVEL_NODES).
    """

    kappa: int
    p: int
    k: int
    n: int
    lam: complex
    level: int = 3

    def __post_init__(self):
        if not 0 <= self.k <= self.p:
            raise ValueError("need 0 <= k <= p")
        if self.p > 2:
            raise ValueError("integrals are implemented for p <= 2")
        if self.kappa < 2 * self.p + 2:
            raise ValueError("need kappa >= 2p + 2")
        object.__setattr__(self, "lam", complex(self.lam))
        nodes_for_level(self.level)

    @property
    def domain(self) -> str:
        if self.p == 0:
            return "point"
        if self.p == 1:
            return "segment"
        return "square" if self.k == 1 else "simplex"

    def replace(self, **kw) -> "IntegralSpec":
        d = dict(kappa=self.kappa, p=self.p, k=self.k, n=self.n, lam=self.lam, level=self.level)
        d.update(kw)
        return IntegralSpec(**d)


@dataclass(frozen=True)
class BlockValue:
    """Value of u^{[k]}_n with the difference to the next lower level as error estimate."""

    value: complex
    error: float
    level: int
    nodes: int = 0
    extra: dict = field(default_factory=dict, compare=False)


def _forms(p: int, kappa: int):
    """Singular linear forms as (coefficients over t, exponent of E, single index)."""
    out = []
    for j in range(p):
        c = [0] * p
        c[j] = 1
        out.append((tuple(c), -2 * p / kappa, j))
    for i in range(p):
        for j in range(i + 1, p):
            c = [0] * p
            c[i], c[j] = 1, -1
            out.append((tuple(c), 2 / kappa, None))
    return out


def _is_int(x: float) -> bool:
    return abs(x - round(x)) < 1e-12


@dataclass
class _Nodes:
    """lambda-independent data of one quadrature rule at fixed (kappa, p, k, tau, level)."""

    measure: np.ndarray
    sum_t: np.ndarray
    single_n: list
    single_x: list
    count: int


@lru_cache(maxsize=64)
def _nodes(kappa: int, p: int, k: int, tau: complex, level: int) -> _Nodes:
    n_nodes = nodes_for_level(level)
    forms = _forms(p, kappa)
    real = np.array([j < k for j in range(p)])
    kind = "segment" if p == 1 else ("square" if k == 1 else "simplex")
    measures, sums = [], []
    singles_n = [[] for _ in range(p)]
    singles_x = [[] for _ in range(p)]
    # sequential accumulation per piece keeps results bit-reproducible
    for piece in duffy_pieces(kind):
        V = np.array(piece.V)
        dim = piece.dim
        # classify forms at the apex and along the base edge
        info = []
        a_r, a_w = float(dim), 1.0
        for c, e, single in forms:
            c = np.array(c, float)
            av, bv = float(np.dot(c, V * real)), float(np.dot(c, V * ~real))
            lattice = _is_int(av) and _is_int(bv)
            e_tot = e - 1.0 if single is not None else e
            if lattice:
                a_r += e_tot
                if dim == 2:
                    dm = np.array(piece.M) - V
                    if abs(np.dot(c, dm * real)) < 1e-14 and abs(np.dot(c, dm * ~real)) < 1e-14:
                        a_w += e_tot
            info.append((c, av, bv, lattice))
        r, wr = product_rule(a_r, n_nodes)
        if dim == 2:
            w, ww = product_rule(a_w, n_nodes)
            R = np.repeat(r, len(w))
            W = np.tile(w, len(r))
            wt = np.repeat(wr, len(w)) * np.tile(ww, len(r))
            D = piece.directions(W)
            smooth_div = R ** (a_r - 1 - (dim - 1)) * W ** (a_w - 1)
        else:
            R, wt = r, wr
            D = piece.directions(R)
            smooth_div = R ** (a_r - 1)
        S = V[None, :] + R[:, None] * D
        # per-form offsets; t = a + b tau with a from real variables, b from scaled ones
        offs = []
        for c, av, bv, lattice in info:
            da = R * ((D * real) @ c)
            db = R * ((D * ~real) @ c)
            if lattice:
                offs.append((int(round(av)), int(round(bv)), da, db))
            else:
                offs.append((0, 0, av + da, bv + db))

        def evaluate(tt, offs=offs):
            e = EllipticContext(tt)
            return np.stack([E_shifted(m, n, xa + xb * tt, e) for m, n, xa, xb in offs])

        vals, args = track_arguments(evaluate, tau)
        expo = np.array([e for _, e, _ in forms])[:, None]
        phi = np.prod(np.abs(vals) ** expo * np.exp(1j * expo * args), axis=0)
        jac = piece.jacobian() * tau ** (p - k)
        measures.append(wt * phi * jac / smooth_div)
        sums.append((S * real).sum(axis=1) + (S * ~real).sum(axis=1) * tau)
        for (c, _, single), (m, n, xa, xb) in zip(forms, offs):
            if single is not None:
                singles_n[single].append(np.full(len(R), n))
                singles_x[single].append(xa + xb * tau)
    return _Nodes(
        measure=np.concatenate(measures),
        sum_t=np.concatenate(sums),
        single_n=[np.concatenate(v) for v in singles_n],
        single_x=[np.concatenate(v) for v in singles_x],
        count=sum(len(m) for m in measures),
    )


def j_integral(kappa: int, p: int, k: int, n: int, lam: complex, ectx, level: int = 3) -> complex:
    """J^{[k]}_{kappa,n}(lambda, tau) as an analytically continued integral."""
    ectx = ectx if isinstance(ectx, EllipticContext) else EllipticContext(ectx)
    lam = complex(lam)
    if p == 0:
        return complex(theta_level(kappa, n, lam, ectx))
    nd = _nodes(kappa, p, k, ectx.tau, level)
    vals = nd.measure * theta_level(kappa, n, lam + (2 / kappa) * nd.sum_t, ectx)
    for nn, x in zip(nd.single_n, nd.single_x):
        vals = vals * np.exp(2j * math.pi * nn * lam) * sigma_lambda(lam, x, ectx)
    return complex(math.fsum(vals.real) + 1j * math.fsum(vals.imag))


def u_value(spec: IntegralSpec, ectx, level: int | None = None) -> complex:
    """u^{[k]}_n = J(lambda) + (-1)^{p+1} J(-lambda) at one quadrature level."""
    lev = spec.level if level is None else level
    sign = (-1) ** (spec.p + 1)
    args = (spec.kappa, spec.p, spec.k, spec.n)
    return j_integral(*args, spec.lam, ectx, lev) + sign * j_integral(*args, -spec.lam, ectx, lev)


def u_block(spec: IntegralSpec, ectx, tol: float | None = None) -> BlockValue:
    """Evaluate u^{[k]}_n(lambda, tau) with a refinement error estimate.

    Parameters
    ----------
    spec : IntegralSpec
        Block parameters and quadrature level.
    ectx : EllipticContext or complex
        Modular parameter.
    tol : float, optional
        If given, raise NonConvergenceError when the relative difference
        between the requested level and the one below exceeds it.

    Returns
    -------
    BlockValue
    """
    ectx = ectx if isinstance(ectx, EllipticContext) else EllipticContext(ectx)
    if spec.p == 0:
        return BlockValue(u_value(spec, ectx), 0.0, spec.level, 1)
    val = u_value(spec, ectx)
    err = abs(val - u_value(spec, ectx, spec.level - 1)) if spec.level > 0 else float("inf")
    count = _nodes(spec.kappa, spec.p, spec.k, ectx.tau, spec.level).count
    if tol is not None and err > tol * max(abs(val), 1e-300):
        raise NonConvergenceError(f"refinement difference {err:.3e} exceeds tolerance at {spec}")
    return BlockValue(val, err, spec.level, count)


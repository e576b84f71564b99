"""Tree recursions, uniqueness, the potential method and infinite-tree formulas.

Hardcore odds on a tree satisfy ``R = F(R_1, ..., R_d) = lam * prod 1/(R_u + 1)``
and the symmetric version ``f_d(R) = lam * (1/(R+1))^d`` has a unique fixed
point ``Rhat_d``.  Most functions below are closed-form evaluations; the
decay certificate combines them with the pseudoinfluence oracles of
:mod:`.saw`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import bisect

from .checks import Check
from .distributions import Pinning
from .graphs import Graph, RootedTree, regular_tree_ball
from .hardcore import HardcoreModel, enumerate_distribution, tree_partition_dp
from .influence import influence_matrix
from .saw import (
    Continuous,
    Mode,
    VertexBoundary,
    level_pseudoinfluence_sum,
    level_ratio_envelope,
    r_pseudoinfluence,
)

INF = math.inf
GAP_TOL = 1e-9


class NotUniqueError(ValueError):
    """Parameters lie outside the uniqueness regime required by the operation."""


class _NotUnique:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NOT_UNIQUE"

    def __bool__(self) -> bool:
        return False


NOT_UNIQUE = _NotUnique()


# ---------------------------------------------------------------------------
# Recursions and fixed points
# ---------------------------------------------------------------------------


def tree_recurrence_F(lam: float, child_ratios: Sequence[float]) -> float:
    """``lam * prod 1/(R_u + 1)``; an infinite child ratio (pinned In) zeroes the product."""
    prod = 1.0
    for r in child_ratios:
        if r < 0:
            raise ValueError("child ratios must be nonnegative")
        if math.isinf(r):
            return 0.0
        prod /= r + 1.0
    return lam * prod


@dataclass(frozen=True)
class TreeRecursionParams:
    """``f(R) = lam * ((beta R + 1) / (R + gamma))^d``; hardcore is ``(beta, gamma) = (0, 1)``."""

    lam: float
    beta: float = 0.0
    gamma: float = 1.0
    d: int = 1

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if self.beta < 0 or not self.gamma > 0:
            raise ValueError("need beta >= 0 and gamma > 0")
        if self.beta > self.gamma:
            raise ValueError("convention beta <= gamma")
        if self.d < 1:
            raise ValueError("arity must be at least 1")

    def f(self, R: float) -> float:
        return self.lam * ((self.beta * R + 1.0) / (R + self.gamma)) ** self.d

    def fprime(self, R: float) -> float:
        b, g = self.beta, self.gamma
        return self.d * (b * g - 1.0) / ((b * R + 1.0) * (R + g)) * self.f(R)


def f_d(R: float, lam: float, d: int) -> float:
    return lam * (1.0 / (R + 1.0)) ** d


def f_d_prime(R: float, lam: float, d: int) -> float:
    return -d * f_d(R, lam, d) / (R + 1.0)


def fixed_point(params: Union[TreeRecursionParams, Tuple[float, int]]) -> float:
    """Unique fixed point of the (antiferromagnetic) recursion, by bisection.

    ``f`` maps ``[0, inf)`` into ``[lam beta^d, lam / gamma^d]`` and is
    nonincreasing when ``beta * gamma <= 1``, so ``f(R) - R`` changes sign
    exactly once on that interval.
    """
    if not isinstance(params, TreeRecursionParams):
        lam, d = params
        params = TreeRecursionParams(lam=lam, d=d)
    p = params
    if p.beta * p.gamma > 1.0:
        raise ValueError("only the antiferromagnetic case beta * gamma <= 1 is supported")
    lo = p.lam * p.beta**p.d
    hi = p.lam / p.gamma**p.d
    if hi - lo <= 0:
        return hi
    g = lambda R: p.f(R) - R  # noqa: E731
    if g(lo) <= 0:
        return lo
    if g(hi) >= 0:
        return hi
    return float(bisect(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))


def critical_lambda(max_degree: int) -> float:
    """``(Delta - 1)^(Delta - 1) / (Delta - 2)^Delta``."""
    D = int(max_degree)
    if D < 3:
        raise ValueError("critical fugacity needs Delta >= 3")
    return (D - 1) ** (D - 1) / (D - 2) ** D


def contraction_at_fixed_point(lam: float, d: int) -> float:
    """``|f_d'(Rhat_d)| = d Rhat_d / (Rhat_d + 1)``."""
    R = fixed_point(TreeRecursionParams(lam=lam, d=d))
    return d * R / (R + 1.0)


def raw_uniqueness_gap(lam: float, max_degree: int) -> float:
    """``1 - max_{1 <= d < Delta} |f_d'(Rhat_d)|`` without thresholding."""
    if max_degree < 2:
        raise ValueError("Delta must be at least 2")
    return 1.0 - max(contraction_at_fixed_point(lam, d) for d in range(1, max_degree))


def uniqueness_gap(lam: float, max_degree: int):
    """Gap ``delta`` of up-to-Delta uniqueness, or :data:`NOT_UNIQUE` when ``delta <= 0``.

    Values within ``1e-9`` of zero count as not unique (the critical point
    itself is excluded).
    """
    delta = raw_uniqueness_gap(lam, max_degree)
    return delta if delta > GAP_TOL else NOT_UNIQUE


def gapped_threshold(delta: float, d_plus_1: int) -> float:
    """``d^d (1-delta) / (d-1+delta)^(d+1)``: fugacity where ``|f_d'(Rhat_d)| = 1 - delta``.

    Evaluated in exact rational arithmetic and rounded once, so ``delta = 0``
    reproduces :func:`critical_lambda` bit for bit.
    """
    d = int(d_plus_1) - 1
    if not 0 <= delta < 1:
        raise ValueError("delta must lie in [0, 1)")
    if d < 2:
        raise ValueError("need d + 1 >= 3")
    q = Fraction(delta)
    return float(d**d * (1 - q) / (d - 1 + q) ** (d + 1))


# ---------------------------------------------------------------------------
# Envelopes and strong spatial mixing
# ---------------------------------------------------------------------------


def rmin_rmax_envelope(lam: float, max_degree: int, ell: int) -> Tuple[float, float]:
    """Worst-case root odds interval for boundaries at distance ``ell``.

    ``ell = 1`` gives ``(0, lam)``, ``ell = 2`` gives ``(lam/(1+lam)^Delta, lam)``;
    deeper levels iterate ``(a, b) -> (f(b), f(a))`` with ``f = f_{Delta-1}``.
    """
    if ell < 1:
        raise ValueError("ell must be at least 1")
    if ell == 1:
        return 0.0, lam
    a, b = lam / (1.0 + lam) ** max_degree, lam
    for _ in range(ell - 2):
        a, b = f_d(b, lam, max_degree - 1), f_d(a, lam, max_degree - 1)
    return a, b


def eta_star(lam: float, max_degree: int) -> float:
    """``(R_max(2) / R_min(2)) * |R_min(2) - R_max(2)|``."""
    a, b = rmin_rmax_envelope(lam, max_degree, 2)
    return (b / a) * abs(a - b)


def ssm_envelope_bound(lam: float, max_degree: int, delta: float, ell: int) -> float:
    """``sqrt(1 - delta)^(ell - 2) * eta_star`` (``ell >= 2``)."""
    if ell < 2:
        raise ValueError("the bound starts at ell = 2")
    if not 0 < delta <= 1:
        raise NotUniqueError("need a positive uniqueness gap")
    return math.sqrt(1.0 - delta) ** (ell - 2) * eta_star(lam, max_degree)


def ssm_envelope_checks(lam: float, max_degree: int, max_ell: int = 30) -> List[Check]:
    """Measured ``|R_max(ell) - R_min(ell)|`` against the bound for ``2 <= ell <= max_ell``."""
    delta = uniqueness_gap(lam, max_degree)
    if delta is NOT_UNIQUE:
        raise NotUniqueError(f"lam = {lam} is not up-to-{max_degree} unique")
    out = []
    for ell in range(2, max_ell + 1):
        a, b = rmin_rmax_envelope(lam, max_degree, ell)
        out.append(Check.leq("ssm_envelope", b - a, ssm_envelope_bound(lam, max_degree, delta, ell), ell=ell))
    return out


# ---------------------------------------------------------------------------
# Potential method
# ---------------------------------------------------------------------------


def phi(R):
    """``2 log(sqrt(R) + sqrt(R + 1)) = 2 asinh(sqrt(R))``."""
    return 2.0 * np.arcsinh(np.sqrt(R))


def Phi(R):
    """``phi'(R) = 1 / sqrt(R (R + 1))``."""
    R = np.asarray(R, dtype=float)
    with np.errstate(divide="ignore"):
        return 1.0 / np.sqrt(R * (R + 1.0))


def phi_inverse(y):
    """Closed-form inverse ``sinh(y / 2)^2``."""
    return np.sinh(np.asarray(y, dtype=float) / 2.0) ** 2


@dataclass(frozen=True)
class PotentialFunction:
    phi = staticmethod(phi)
    Phi = staticmethod(Phi)
    phi_inverse = staticmethod(phi_inverse)


def gradient_norm(lam: float, R: np.ndarray) -> np.ndarray:
    """``||grad(phi o F o phi^-1)||_1 = Phi(F) * sum_u |dF/dR_u| / Phi(R_u)`` for rows of ``R``.

    ``R`` has shape ``(points, d)``.  ``1/Phi(R_u) = sqrt(R_u (R_u + 1))`` is
    used directly so ``R_u = 0`` is finite.
    """
    R = np.atleast_2d(np.asarray(R, dtype=float))
    F = lam * np.prod(1.0 / (1.0 + R), axis=1)
    dF = F[:, None] / (1.0 + R)
    inv_phi_child = np.sqrt(R * (R + 1.0))
    return Phi(F) * np.sum(dF * inv_phi_child, axis=1)


def gradient_norm_closed(lam: float, R: np.ndarray) -> np.ndarray:
    """Simplified form ``sqrt(F/(1+F)) * sum_u sqrt(R_u/(1+R_u))``."""
    R = np.atleast_2d(np.asarray(R, dtype=float))
    F = lam * np.prod(1.0 / (1.0 + R), axis=1)
    return np.sqrt(F / (1.0 + F)) * np.sum(np.sqrt(R / (1.0 + R)), axis=1)


@dataclass
class IdealDecayReport:
    check: Check
    max_norm: float
    bound: float
    points: int
    argmax: List[float]
    delta: float


def _grid_points(lam: float, max_degree: int, points: int, span: Tuple[float, float]) -> List[np.ndarray]:
    arities = list(range(1, max_degree))
    per = math.ceil(points / len(arities))
    corners = set()
    for ell in range(1, 7):
        corners.update(rmin_rmax_envelope(lam, max_degree, ell))
    corners = np.array(sorted(corners))
    blocks = []
    for d in arities:
        N = 2
        while math.comb(N + d - 1, d) < per:
            N += 1
        axis = np.logspace(math.log10(span[0]), math.log10(span[1]), N)
        blocks.append(np.array(list(itertools.combinations_with_replacement(axis, d))))
        blocks.append(np.array(list(itertools.combinations_with_replacement(corners, d))))
        # dense symmetric diagonal, where the maximum tends to sit
        diag = np.logspace(math.log10(span[0]), math.log10(span[1]), 20001)
        blocks.append(np.repeat(diag[:, None], d, axis=1))
    return blocks


def ideal_decay_check(
    lam: float,
    max_degree: int,
    points: int = 100_000,
    span: Tuple[float, float] = (1e-6, 1e6),
    tol: float = 1e-9,
) -> IdealDecayReport:
    """Sampled maximum of the potential-space gradient norm against ``sqrt(1 - delta)``.

    The grid covers every arity ``1..Delta-1``: a symmetric tensor grid with
    log-spaced coordinates over ``span``, all envelope corners, and a fine
    diagonal.  This validates the bound on the sample; it is not a proof of
    the supremum.
    """
    delta = uniqueness_gap(lam, max_degree)
    if delta is NOT_UNIQUE:
        raise NotUniqueError(f"lam = {lam} is not up-to-{max_degree} unique")
    bound = math.sqrt(1.0 - delta)
    best, arg, count = -1.0, [], 0
    for block in _grid_points(lam, max_degree, points, span):
        vals = gradient_norm(lam, block)
        count += vals.size
        k = int(np.argmax(vals))
        if vals[k] > best:
            best, arg = float(vals[k]), block[k].tolist()
    check = Check.leq("ideal_decay", best, bound, tol=tol, max_degree=max_degree, lam=lam, points=count)
    return IdealDecayReport(check, best, bound, count, arg, delta)


def true_to_ideal_factor(eta: float, max_degree: int) -> float:
    """``(1 + 2 eta)^(Delta + 1)`` for ``0 <= eta <= 1/2``."""
    if not 0 <= eta <= 0.5:
        raise ValueError("eta must lie in [0, 1/2]")
    return (1.0 + 2.0 * eta) ** (max_degree + 1)


def shifted_reciprocal_slack(x, eta):
    """``(1 + 2 eta)/(x + 1) - 1/((x + 1) - eta)``; nonnegative for ``x >= 0``, ``eta <= 1/2``."""
    x = np.asarray(x, dtype=float)
    eta = np.asarray(eta, dtype=float)
    return (1.0 + 2.0 * eta) / (x + 1.0) - 1.0 / ((x + 1.0) - eta)


# ---------------------------------------------------------------------------
# Decay certificates on finite trees
# ---------------------------------------------------------------------------


@dataclass
class LedgerRow:
    level: int
    sum_R: float
    sum_K: Optional[float]
    ratio: Optional[float]
    bound: Optional[float]
    passed: bool
    degree_bound: Optional[float] = None
    r_min: float = 0.0
    r_max: float = 0.0
    decay_from_l0: Optional[float] = None
    geometric_reference: Optional[float] = None


@dataclass
class DecayLedger:
    rows: List[LedgerRow]
    lam: float
    max_degree: int
    ell0: int
    delta: Optional[float]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def checks(self) -> List[Check]:
        out = []
        for r in self.rows:
            if r.ratio is not None and r.bound is not None:
                out.append(Check.leq("trivial_decay", r.ratio, r.bound, tol=1e-12, level=r.level))
        return out

    def to_csv(self) -> str:
        head = "level,sum_R,sum_K,ratio,bound,pass,degree_bound,r_min,r_max,decay_from_l0,geometric_reference"

        def fmt(x) -> str:
            if x is None:
                return ""
            if isinstance(x, bool):
                return "true" if x else "false"
            if isinstance(x, int):
                return str(x)
            return "%.17g" % x

        lines = [head]
        for r in self.rows:
            vals = [r.level, r.sum_R, r.sum_K, r.ratio, r.bound, r.passed, r.degree_bound,
                    r.r_min, r.r_max, r.decay_from_l0, r.geometric_reference]
            lines.append(",".join(fmt(v) for v in vals))
        return "\n".join(lines) + "\n"


def _k_sum(tree: RootedTree, lam: float, ell: int, width_cap: int) -> Optional[float]:
    nodes = tree.nodes_at_level(ell)
    if len(nodes) - 1 > width_cap:
        return None
    return float(sum(r_pseudoinfluence(tree, lam, v, VertexBoundary(), scale="K") for v in nodes))


def level_decay_certificate(
    t: RootedTree,
    lam: float,
    ell: Optional[int] = None,
    ell0: Optional[int] = None,
    mode: Mode = Continuous(),
    k_width_cap: int = 12,
) -> DecayLedger:
    """Per-level sums of R-pseudoinfluence and one-step decay ratios.

    For ``ell >= 2`` the ratio ``S_r(ell) / max_{u in L_r(1)} S_u(ell - 1)`` is
    compared with ``|L_r(1)| * lam`` (asserted) and ``(Delta - 1) * lam``
    (reported).  Beyond ``ell0`` (default ``ceil(4 / delta)``) the decay of
    ``S_r(ell) / S_r(ell0)`` is recorded next to ``sqrt(1 - delta)^(ell - ell0)``.
    """
    height = t.height
    ell = height if ell is None else min(ell, height)
    D = max(t.max_degree(), 2)
    gap = uniqueness_gap(lam, D) if D >= 2 else NOT_UNIQUE
    delta = None if gap is NOT_UNIQUE else float(gap)
    if ell0 is None:
        ell0 = math.ceil(4.0 / delta) if delta else ell
    kids = t.children[t.root]
    subtrees = [t.subtree(u)[0] for u in kids]
    rows: List[LedgerRow] = []
    sums: Dict[int, float] = {}
    for lev in range(1, ell + 1):
        s = level_pseudoinfluence_sum(t, lam, lev, mode)
        sums[lev] = s
        rmin, rmax = level_ratio_envelope(t, lam, lev)
        ratio = bound = degree = None
        ok = True
        if lev >= 2 and subtrees:
            denom = max(level_pseudoinfluence_sum(st, lam, lev - 1, mode) for st in subtrees)
            bound = len(kids) * lam
            degree = (D - 1) * lam
            if denom > 0:
                ratio = s / denom
                ok = ratio <= bound + 1e-12
            else:
                ok = s <= 1e-15
        row = LedgerRow(lev, s, _k_sum(t, lam, lev, k_width_cap), ratio, bound, ok, degree, rmin, rmax)
        if delta is not None and lev > ell0 and sums.get(ell0, 0) > 0:
            row.decay_from_l0 = s / sums[ell0]
            row.geometric_reference = math.sqrt(1.0 - delta) ** (lev - ell0)
        rows.append(row)
    return DecayLedger(rows, lam, D, ell0, delta)


@dataclass
class SandwichReport:
    R: float
    K: float
    lower: float
    upper: float

    @property
    def passed(self) -> bool:
        return self.lower <= self.K * (1 + 1e-12) + 1e-15 and self.K <= self.upper * (1 + 1e-12) + 1e-15


def potential_sandwich(t, lam: float, v: int, mode: Mode = VertexBoundary()) -> SandwichReport:
    """``Phi(R_max(ell)) R-infl <= K-infl <= Phi(R_min(ell)) R-infl`` at the level of ``v``."""
    tree = t.tree if hasattr(t, "tree") else t
    ell = tree.level[v]
    rmin, rmax = level_ratio_envelope(t, lam, ell)
    R = r_pseudoinfluence(t, lam, v, mode, scale="R")
    K = r_pseudoinfluence(t, lam, v, mode, scale="K")
    lower = float(Phi(rmax)) * R if rmax > 0 else math.inf * R if R > 0 else 0.0
    upper = float(Phi(rmin)) * R if rmin > 0 else (math.inf if R > 0 else 0.0)
    return SandwichReport(R, K, lower, upper)


# ---------------------------------------------------------------------------
# Infinite regular tree
# ---------------------------------------------------------------------------


def infinite_tree_influence(params: TreeRecursionParams) -> Tuple[float, float]:
    """Adjacent influence ``(beta gamma - 1) Rhat / ((beta Rhat + 1)(Rhat + gamma))`` and ``f'(Rhat)``.

    ``params.d`` is the arity ``Delta - 1``.
    """
    R = fixed_point(params)
    b, g = params.beta, params.gamma
    edge = (b * g - 1.0) * R / ((b * R + 1.0) * (R + g))
    fp = params.fprime(R)
    if abs(fp) > 1.0 + GAP_TOL:
        raise NotUniqueError(f"|f'(Rhat)| = {abs(fp):.6g} > 1: outside uniqueness")
    return edge, fp


def infinite_tree_lambda_max_bounds(delta: float, max_degree: int) -> Tuple[float, float]:
    """``Delta/(Delta-1) * (1/(delta(2-delta)) - 1)`` and ``Delta/(Delta-1) * (1/delta - 1)``."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    c = max_degree / (max_degree - 1)
    return c * (1.0 / (delta * (2.0 - delta)) - 1.0), c * (1.0 / delta - 1.0)


@dataclass
class TruncationReport:
    check: Check
    measured: float
    closed_form: float
    nodes: int
    fprime: float


def regular_ball_column_sum(max_degree: int, lam: float, radius: int, tol: float = 1e-6) -> TruncationReport:
    """``sum_v |Psi(v, r)|`` on the radius-``radius`` ball of the ``Delta``-regular tree.

    Leaves carry activity ``Rhat`` (the fixed point of ``f_{Delta-1}``), the
    boundary field under which every message on the finite ball equals the
    infinite-tree value.  Influences are computed one vertex at a time by the
    exact forest dynamic program and compared with
    ``Delta/(Delta-1) * sum_{k=1}^{L} |f'(Rhat)|^k``.
    """
    tree = regular_tree_ball(max_degree, radius)
    g = tree.to_graph()
    Rhat = fixed_point(TreeRecursionParams(lam=lam, d=max_degree - 1))
    act = np.full(g.n, lam)
    for x in range(tree.size):
        if not tree.children[x] and tree.level[x] == radius and radius > 0:
            act[x] = Rhat
    m = HardcoreModel(g, lam)
    total = 0.0
    for v in range(1, g.n):
        p_in = tree_partition_dp(m, Pinning.of(ins=[v]), root=0, activities=act).root_marginal
        p_out = tree_partition_dp(m, Pinning.of(outs=[v]), root=0, activities=act).root_marginal
        total += abs(p_in - p_out)
    fp = (max_degree - 1) * Rhat / (Rhat + 1.0)
    closed = max_degree / (max_degree - 1) * sum(fp**k for k in range(1, radius + 1))
    check = Check.equal("regular_ball_column_sum", total, closed, tol, radius=radius, nodes=g.n)
    return TruncationReport(check, total, closed, g.n, fp)


def tree_product_property_check(m: HardcoreModel, u: int, w: int, v: int, tol: float = 1e-10) -> Check:
    """``Psi(u, v) = Psi(u, w) Psi(w, v)`` for ``w`` on the tree path from ``u`` to ``v``."""
    g = m.graph
    if len({u, w, v}) != 3:
        raise ValueError("u, w, v must be distinct")
    if not g.is_forest():
        raise ValueError("the product property is stated on trees")
    import networkx as nx

    G = g.to_networkx()
    if not nx.has_path(G, u, v):
        raise ValueError("u and v are in different components")
    path = nx.shortest_path(G, u, v)
    if w not in path:
        raise ValueError(f"{w} is not on the path from {u} to {v}")
    psi = influence_matrix(enumerate_distribution(m))
    idx = {x: k for k, x in enumerate(psi.free)}
    A = psi.entries
    lhs = A[idx[u], idx[v]]
    rhs = A[idx[u], idx[w]] * A[idx[w], idx[v]]
    return Check.equal("tree_product_property", lhs, rhs, tol, u=u, w=w, v=v)

"""Link walks of the partite complex of a distribution and the down-up walk.

The complex has one vertex per literal (``i`` or ``ibar``) and a face for
every partial assignment with positive probability.  It is never
materialized: a link is determined by the pairwise conditionals of the
corresponding conditional table, and the top-level down-up walk lives on
the support of the distribution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from .checks import SPECTRUM_TOL, STOCHASTIC_TOL, Check
from .distributions import (
    IN,
    NO_PIN,
    OUT,
    DistributionTable,
    Pinning,
    condition,
    iter_consistent_pinnings,
    restrict_rows,
)
from .influence import influence_matrix
from .linalg import reversible_spectrum

DEFAULT_STATE_CAP = 1 << 20
DEFAULT_LOCAL_TO_GLOBAL_CAP = 12

Literal = Tuple[int, bool]


class StateCapError(ValueError):
    pass


@dataclass
class PartiteLinkWalk:
    """Walk on the 1-skeleton of the link of ``pinning``.

    ``vertices`` lists literals ``(element, side)``.  For the default free-only
    link the order is ``[free In..., free Out...]``; forced literals of
    deterministic elements, when included, come last.
    """

    pinning: Pinning
    vertices: List[Literal]
    matrix: np.ndarray
    stationary: np.ndarray
    free: Tuple[int, ...] = ()
    forced: Tuple[Literal, ...] = ()

    @property
    def parts(self) -> int:
        """Number of elements represented (free plus forced)."""
        return len(self.free) + len(self.forced)

    def spectrum(self) -> np.ndarray:
        return reversible_spectrum(self.matrix, self.stationary)


def build_link_walk(
    t: DistributionTable, pin: Pinning = NO_PIN, include_forced: bool = False
) -> PartiteLinkWalk:
    """Link walk with entries ``Pr[y | x] / (m - 1)`` between literals of distinct elements.

    By default only free elements (marginal strictly inside (0, 1)) are kept,
    giving a ``2k x 2k`` matrix.  With ``include_forced`` every unpinned
    element is a part of the complex; deterministic ones contribute their
    single possible literal, which is the exact link of the face ``pin``.
    """
    ct = condition(t, pin)
    free = ct.free_elements()
    pinned = set(ct.pin.pinned)
    forced: List[Literal] = []
    if include_forced:
        always_in, always_out = ct.deterministic()
        for i in range(ct.ground):
            if i in pinned or i in free:
                continue
            forced.append((i, bool(always_in >> i & 1)))
    vertices: List[Literal] = [(i, IN) for i in free] + [(i, OUT) for i in free] + forced
    m = len(free) + len(forced)
    if m < 2:
        raise ValueError(f"link of {pin} has {m} part(s); need at least 2")
    bits = ct.bits()
    w = ct.weights / ct.total
    # indicator of every literal on every support row
    ind = np.empty((bits.shape[0], len(vertices)))
    for c, (i, s) in enumerate(vertices):
        ind[:, c] = bits[:, i] if s else 1.0 - bits[:, i]
    joint = (ind * w[:, None]).T @ ind
    prob = ind.T @ w
    element = np.array([i for i, _ in vertices])
    same = element[:, None] == element[None, :]
    P = np.where(same, 0.0, joint / prob[:, None]) / (m - 1)
    pi = prob / m
    return PartiteLinkWalk(ct.pin, vertices, P, pi, tuple(free), tuple(forced))


def walk_invariants(w: PartiteLinkWalk) -> Dict[str, float]:
    """Row-sum, detailed-balance and partiteness residuals."""
    P, pi = w.matrix, w.stationary
    flow = pi[:, None] * P
    element = np.array([i for i, _ in w.vertices])
    same = element[:, None] == element[None, :]
    return {
        "row_sum": float(np.max(np.abs(P.sum(axis=1) - 1.0))),
        "detailed_balance": float(np.max(np.abs(flow - flow.T))),
        "partite": float(np.max(np.abs(P[same]))),
        "stationary": float(np.max(np.abs(pi @ P - pi))),
    }


def link_second_eigenvalue(w: PartiteLinkWalk) -> float:
    """Second largest eigenvalue of the (non-lazy) link walk."""
    ev = w.spectrum()
    return float(ev[-2])


@dataclass
class SpectrumReport:
    check: Check
    walk_spectrum: np.ndarray
    predicted: np.ndarray
    free: Tuple[int, ...]

    @property
    def passed(self) -> bool:
        return self.check.passed


def spectrum_identity_check(t: DistributionTable, pin: Pinning = NO_PIN) -> SpectrumReport:
    """Compare the spectrum of the link walk with ``spec(Psi/(k-1))``, ``k-1`` copies of ``-1/(k-1)`` and 1.

    The walk spectrum comes from the symmetrized link matrix; the influence
    eigenvalues come independently from the correlation matrix of the
    conditional table.  Both multisets are sorted and compared positionally.
    """
    w = build_link_walk(t, pin)
    k = len(w.free)
    lhs = np.sort(w.spectrum())
    psi = influence_matrix(t, pin)
    p = psi.marginals
    var = p * (1.0 - p)
    cov = psi.entries * var[:, None] + np.diag(var)
    cov = 0.5 * (cov + cov.T)
    d = np.sqrt(var)
    corr = cov / d[:, None] / d[None, :]
    psi_spec = np.linalg.eigvalsh(corr) - 1.0
    rhs = np.sort(np.concatenate([psi_spec / (k - 1), np.full(k - 1, -1.0 / (k - 1)), [1.0]]))
    dev = float(np.max(np.abs(lhs - rhs)))
    general = np.sort(np.linalg.eigvals(psi.entries))
    check = Check.equal(
        "spectrum_identity",
        dev,
        0.0,
        SPECTRUM_TOL,
        k=k,
        pin=pin.to_json(),
        max_imag_psi=float(np.max(np.abs(general.imag))),
    )
    return SpectrumReport(check, lhs, rhs, w.free)


@dataclass
class TrivialDecomposition:
    Q: np.ndarray
    M: np.ndarray
    A: np.ndarray
    B: np.ndarray
    residuals: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        r = self.residuals
        return (
            r["block_form"] <= STOCHASTIC_TOL
            and r["influence"] <= STOCHASTIC_TOL
            and r["Q_eigen"] <= 1e-10
            and r["M_kernel"] <= 1e-10
        )


def trivial_decomposition(t: DistributionTable, pin: Pinning = NO_PIN) -> TrivialDecomposition:
    """Split the link walk into the rank-one correction ``Q`` and the block matrix ``M``.

    ``Q = P - (n/(n-1)) 1 pi^T`` and ``M = Q + (n/(n-1)) sum_i 1^i (pi^i)^T``
    where ``1^i`` indicates the two literals of element ``i`` and ``pi^i`` is
    ``pi`` restricted to them.
    """
    w = build_link_walk(t, pin)
    n = len(w.free)
    P, pi = w.matrix, w.stationary
    c = n / (n - 1)
    ones = np.ones(2 * n)
    Q = P - c * np.outer(ones, pi)
    E = np.zeros((2 * n, n))
    E[np.arange(n), np.arange(n)] = 1.0
    E[n + np.arange(n), np.arange(n)] = 1.0
    # sum_i 1^i (pi^i)^T has entry pi(y) when x and y are literals of one element
    same = E @ E.T
    M = Q + c * same * pi[None, :]
    A, B = M[:n, :n], M[n:, :n]
    psi = influence_matrix(t, pin).entries
    block = max(np.max(np.abs(M[:n, n:] + A)), np.max(np.abs(M[n:, n:] + B)))
    resid = {
        "block_form": float(block),
        "influence": float(np.max(np.abs(A - B - psi / (n - 1)))),
        "Q_eigen": float(np.max(np.abs(Q @ E + E / (n - 1)))),
        "M_kernel": float(np.max(np.abs(M @ E))),
    }
    return TrivialDecomposition(Q, M, A, B, resid)


# ---------------------------------------------------------------------------
# Down-up walk on maximal faces
# ---------------------------------------------------------------------------


@dataclass
class DownUpWalk:
    """Down-up walk on the support of ``mu`` (maximal faces = full assignments)."""

    states: np.ndarray
    matrix: sp.csr_matrix
    stationary: np.ndarray
    ground: int

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def index_of(self, mask: int) -> int:
        k = int(np.searchsorted(self.states, mask))
        if k >= self.states.size or int(self.states[k]) != mask:
            raise KeyError(f"state {mask} is not in the support")
        return k


def build_down_up_walk(t: DistributionTable, cap: int = DEFAULT_STATE_CAP) -> DownUpWalk:
    """Remove a uniformly random literal, then re-add one proportionally to weight.

    From a maximal face ``sigma`` the walk drops element ``i`` (probability
    ``1/d`` with ``d = n``) to the face ``tau = sigma - i`` of weight
    ``w(tau) = mu(sigma) + mu(sigma xor i)`` and moves to a maximal face
    ``sigma' >= tau`` with probability ``w(sigma') / w(tau)``.
    """
    if t.size > cap:
        raise StateCapError(f"support has {t.size} states, cap is {cap}")
    d = t.ground
    masks = t.masks
    w = t.weights
    N = masks.size
    rows: List[np.ndarray] = []
    cols: List[np.ndarray] = []
    vals: List[np.ndarray] = []
    diag = np.zeros(N)
    idx = np.arange(N)
    for i in range(d):
        partner = masks ^ (1 << i)
        wp = t.mass_many(partner)
        wt = w + wp
        diag += w / (d * wt)
        hit = wp > 0
        if np.any(hit):
            rows.append(idx[hit])
            cols.append(np.searchsorted(masks, partner[hit]))
            vals.append(wp[hit] / (d * wt[hit]))
    rows.append(idx)
    cols.append(idx)
    vals.append(diag)
    P = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(N, N)
    )
    return DownUpWalk(masks.copy(), P, w / t.total, d)


# ---------------------------------------------------------------------------
# Local-to-global
# ---------------------------------------------------------------------------


@dataclass
class LocalToGlobalReport:
    check: Check
    alphas: List[float]
    alphas_free_only: List[float]
    lambda2: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.check.passed


def local_to_global_check(t: DistributionTable, cap: int = DEFAULT_LOCAL_TO_GLOBAL_CAP) -> LocalToGlobalReport:
    """``lambda_2(P_d) <= 1 - (1/d) prod_{k=0}^{d-2} (1 - alpha_k)``.

    ``alpha_k`` is the largest second eigenvalue over the links of faces of
    size ``k``; links include forced literals so they are the true links of
    the complex.  The free-only variant (an upper bound on each link
    eigenvalue) is recorded alongside.
    """
    from .glauber import chain_spectrum_from_walk

    n = t.ground
    if n > cap:
        raise StateCapError(f"local-to-global sweep needs n <= {cap}; got {n}")
    if n < 2:
        return LocalToGlobalReport(Check.skip("local_to_global", "fewer than two elements"), [], [], 0.0, 1.0)
    alphas = [-np.inf] * (n - 1)
    alphas_free = [-np.inf] * (n - 1)
    for pin, rows in iter_consistent_pinnings(t, max_size=n - 2):
        ct = restrict_rows(t, rows, pin)
        k = len(pin)
        link = build_link_walk(ct, NO_PIN, include_forced=True)
        alphas[k] = max(alphas[k], link_second_eigenvalue(link))
        free = ct.free_elements()
        if len(free) >= 2:
            alphas_free[k] = max(alphas_free[k], link_second_eigenvalue(build_link_walk(ct)))
    alphas = [float(a) for a in alphas]
    alphas_free = [float(a) if np.isfinite(a) else 0.0 for a in alphas_free]
    prod = 1.0
    for a in alphas:
        prod *= max(1.0 - a, 0.0)
    bound = 1.0 - prod / n
    spec = chain_spectrum_from_walk(build_down_up_walk(t))
    lam2 = spec.lambda2
    check = Check.leq("local_to_global", lam2, bound, tol=1e-12, alphas=alphas)
    return LocalToGlobalReport(check, alphas, alphas_free, lam2, bound)

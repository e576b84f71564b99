"""Glauber dynamics: samplers, exact kernels, spectral gaps and mixing.

Two independent descriptions of the same single-site chain are kept:

* the hardcore rule (pick ``v``; remove it with probability ``1/(1+lam)`` if
  present, add it with probability ``lam/(1+lam)`` if absent and unblocked),
* the generic heat-bath rule on a table (move to ``S - i`` with probability
  ``mu(S - i) / (mu(S - i) + mu(S + i))``).

Both are compared against the down-up walk built in :mod:`.simplicial`.
Randomness comes from numpy's PCG64 with ``SeedSequence`` stream splitting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .distributions import DistributionTable
from .hardcore import HardcoreModel, enumerate_distribution
from .linalg import symmetrize
from .simplicial import StateCapError

RNG_NAME = "numpy.PCG64"
DENSE_EIGEN_CAP = 4096
DEFAULT_STATE_CAP = 1 << 20
SAMPLER_BLOCK = 1 << 14


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def spawn_rngs(seed: int, k: int) -> List[np.random.Generator]:
    """``k`` independent child streams of one 64-bit seed."""
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(int(seed)).spawn(k)]


@dataclass
class GlauberChain:
    model: Union[HardcoreModel, DistributionTable]
    state: int
    rng: np.random.Generator
    step_count: int = 0
    stuck_count: int = 0

    @classmethod
    def start(cls, model, seed: int, state: int = 0) -> "GlauberChain":
        return cls(model, state, make_rng(seed))


def glauber_step(chain: GlauberChain) -> GlauberChain:
    """One hardcore Glauber transition (in place); returns the chain."""
    m = chain.model
    if not isinstance(m, HardcoreModel):
        raise TypeError("glauber_step needs a HardcoreModel; use generic_glauber_step for tables")
    v = int(chain.rng.integers(0, m.n))
    u = chain.rng.random()
    s = chain.state
    if s >> v & 1:
        if u < 1.0 / (1.0 + m.lam):
            s &= ~(1 << v)
    elif not any(s >> w & 1 for w in m.graph.adjacency[v]):
        if u < m.lam / (1.0 + m.lam):
            s |= 1 << v
    chain.state = s
    chain.step_count += 1
    return chain


def generic_glauber_step(chain: GlauberChain) -> GlauberChain:
    """One heat-bath step on an explicit table (in place); returns the chain."""
    t = chain.model
    if not isinstance(t, DistributionTable):
        raise TypeError("generic_glauber_step needs a DistributionTable")
    i = int(chain.rng.integers(0, t.ground))
    u = chain.rng.random()
    lo = chain.state & ~(1 << i)
    hi = chain.state | (1 << i)
    a, b = t.mass(lo), t.mass(hi)
    if a + b <= 0:
        chain.stuck_count += 1
    else:
        chain.state = lo if u < a / (a + b) else hi
    chain.step_count += 1
    return chain


# ---------------------------------------------------------------------------
# Exact kernels
# ---------------------------------------------------------------------------


def hardcore_kernel(t: DistributionTable) -> np.ndarray:
    """Dense hardcore Glauber matrix over the support of a hardcore table.

    Vertices pinned in the table are frozen (a step that selects them stays).
    """
    g = t.graph
    lam = t.fugacity
    if g is None or lam is None:
        raise ValueError("table does not come from a hardcore model")
    masks = t.masks
    N, n = masks.size, t.ground
    nbr = g.neighbor_masks()
    frozen = set(t.pin.pinned)
    P = np.zeros((N, N))
    idx = np.arange(N)
    for v in range(n):
        if v in frozen:
            P[idx, idx] += 1.0 / n
            continue
        bit = 1 << v
        present = (masks & bit) != 0
        blocked = (masks & int(nbr[v])) != 0
        target = np.searchsorted(masks, masks ^ bit)
        # remove
        r = idx[present]
        P[r, target[present]] += 1.0 / (n * (1.0 + lam))
        P[r, r] += lam / (n * (1.0 + lam))
        # add
        a = idx[~present & ~blocked]
        P[a, target[~present & ~blocked]] += lam / (n * (1.0 + lam))
        P[a, a] += 1.0 / (n * (1.0 + lam))
        # blocked: stay
        b = idx[~present & blocked]
        P[b, b] += 1.0 / n
    return P


def generic_kernel(t: DistributionTable) -> sp.csr_matrix:
    """Heat-bath kernel ``mu(S -+ i) / (mu(S - i) + mu(S + i))`` over the support."""
    masks = t.masks
    N, n = masks.size, t.ground
    idx = np.arange(N)
    rows, cols, vals = [], [], []
    for i in range(n):
        bit = 1 << i
        lo = masks & ~bit
        hi = masks | bit
        a = t.mass_many(lo)
        b = t.mass_many(hi)
        z = a + b
        for target, mass in ((lo, a), (hi, b)):
            hit = mass > 0
            rows.append(idx[hit])
            cols.append(np.searchsorted(masks, target[hit]))
            vals.append(mass[hit] / (n * z[hit]))
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(N, N))


@dataclass
class ChainSpectrum:
    """Exact transition matrix with its stationary law and spectral data."""

    matrix: Union[np.ndarray, sp.csr_matrix]
    stationary: np.ndarray
    states: np.ndarray
    eigenvalues: Optional[np.ndarray]
    lambda2: float
    lambda_min: float
    ground: int
    fugacity: Optional[float] = None

    @property
    def lambda_star(self) -> float:
        return max(abs(self.lambda2), abs(self.lambda_min))

    @property
    def gap(self) -> float:
        return 1.0 - self.lambda2

    def index_of(self, mask: int) -> int:
        k = int(np.searchsorted(self.states, mask))
        if k >= self.states.size or int(self.states[k]) != mask:
            raise KeyError(f"state {mask} is not in the support")
        return k

    def dense(self) -> np.ndarray:
        return self.matrix.toarray() if sp.issparse(self.matrix) else np.asarray(self.matrix)


def _spectrum(P, pi: np.ndarray):
    N = pi.size
    if N == 1:
        return np.ones(1), 1.0, 1.0
    if N <= DENSE_EIGEN_CAP:
        dense = P.toarray() if sp.issparse(P) else np.asarray(P)
        ev = np.linalg.eigvalsh(symmetrize(dense, pi))
        return ev, float(ev[-2]), float(ev[0])
    s = np.sqrt(pi)
    S = sp.diags(s) @ sp.csr_matrix(P) @ sp.diags(1.0 / s)
    S = 0.5 * (S + S.T)
    top = spla.eigsh(S, k=2, which="LA", return_eigenvectors=False, tol=1e-12)
    bottom = spla.eigsh(S, k=1, which="SA", return_eigenvectors=False, tol=1e-12)
    return None, float(np.sort(top)[0]), float(bottom[0])


def chain_spectrum_from_walk(walk) -> ChainSpectrum:
    """Spectral data of a :class:`~.simplicial.DownUpWalk`."""
    ev, l2, lmin = _spectrum(walk.matrix, walk.stationary)
    return ChainSpectrum(walk.matrix, walk.stationary, walk.states, ev, l2, lmin, walk.ground)


def exact_chain_spectrum(
    t: Union[DistributionTable, HardcoreModel], cap: int = DEFAULT_STATE_CAP
) -> ChainSpectrum:
    """Glauber matrix over the support, full spectrum (dense) or extreme eigenvalues (sparse).

    Hardcore tables use the three-case hardcore rule when the support fits a
    dense matrix; everything else uses the heat-bath kernel.
    """
    if isinstance(t, HardcoreModel):
        t = enumerate_distribution(t)
    if t.size > cap:
        raise StateCapError(f"support has {t.size} states, cap is {cap}")
    if t.graph is not None and t.fugacity is not None and t.size <= DENSE_EIGEN_CAP:
        P = hardcore_kernel(t)
    else:
        P = generic_kernel(t)
    pi = t.weights / t.total
    ev, l2, lmin = _spectrum(P, pi)
    return ChainSpectrum(P, pi, t.masks.copy(), ev, l2, lmin, t.ground, t.fugacity)


def detailed_balance_residual(spec: ChainSpectrum) -> float:
    P = spec.dense()
    flow = spec.stationary[:, None] * P
    return float(np.max(np.abs(flow - flow.T)))


# ---------------------------------------------------------------------------
# Mixing
# ---------------------------------------------------------------------------


@dataclass
class MixingBound:
    bound: float
    lambda_star: float
    start_mass: float
    eps: float
    remark_bound: Optional[float] = None


def mixing_time_bound(spec: ChainSpectrum, start: int, eps: float) -> MixingBound:
    """``log(1 / (eps * pi(start))) / (1 - lambda_star)``.

    For a hardcore chain started at the empty set the weaker form with
    ``pi(empty) >= (1 + lam)^(-n)`` is reported as well.
    """
    ls = spec.lambda_star
    if ls >= 1.0 - 1e-15:
        raise ValueError("lambda_star = 1: chain is reducible or periodic")
    if not eps > 0:
        raise ValueError("eps must be positive")
    pi_s = float(spec.stationary[spec.index_of(start)])
    bound = max(math.log(1.0 / (eps * pi_s)), 0.0) / (1.0 - ls)
    remark = None
    if start == 0 and spec.fugacity is not None:
        remark = (spec.ground * math.log(1.0 + spec.fugacity) - math.log(eps)) / (1.0 - ls)
    return MixingBound(bound, ls, pi_s, eps, remark)


def mixing_time_formula(gap_star: float, start_mass: float, eps: float) -> float:
    """Same bound from raw numbers: ``log(1/(eps*pi)) / (1 - lambda_star)`` with ``gap_star = 1 - lambda_star``."""
    return max(math.log(1.0 / (eps * start_mass)), 0.0) / gap_star


def distribution_curve(spec: ChainSpectrum, start: int, horizon: int) -> np.ndarray:
    """Rows ``P^t(start, .)`` for ``t = 0..horizon``."""
    P = spec.matrix
    x = np.zeros(spec.stationary.size)
    x[spec.index_of(start)] = 1.0
    out = np.empty((horizon + 1, x.size))
    out[0] = x
    PT = P.T.tocsr() if sp.issparse(P) else np.asarray(P).T
    for k in range(1, horizon + 1):
        x = PT @ x
        out[k] = x
    return out


def tv_distance_curve(spec: ChainSpectrum, start: int, horizon: int) -> np.ndarray:
    """Exact ``0.5 * ||P^t(start, .) - pi||_1`` for ``t = 0..horizon``."""
    rows = distribution_curve(spec, start, horizon)
    return 0.5 * np.abs(rows - spec.stationary[None, :]).sum(axis=1)


def first_hitting(curve: np.ndarray, eps: float) -> Optional[int]:
    hit = np.nonzero(curve <= eps)[0]
    return int(hit[0]) if hit.size else None


def eigen_envelope(spec: ChainSpectrum, start: int, horizon: int) -> np.ndarray:
    """``lambda_star^t / (2 sqrt(pi(start)))``, an upper bound on the TV curve."""
    pi_s = spec.stationary[spec.index_of(start)]
    return spec.lambda_star ** np.arange(horizon + 1) / (2.0 * math.sqrt(pi_s))


# ---------------------------------------------------------------------------
# Ensemble sampling
# ---------------------------------------------------------------------------


def hardcore_batch_step(
    states: np.ndarray, nbr: np.ndarray, lam: float, rng: np.random.Generator
) -> np.ndarray:
    """One hardcore Glauber step applied to every chain in ``states``."""
    n = nbr.size
    v = rng.integers(0, n, size=states.size)
    u = rng.random(states.size)
    bit = np.left_shift(np.int64(1), v.astype(np.int64))
    present = (states & bit) != 0
    blocked = (states & nbr[v]) != 0
    remove = present & (u < 1.0 / (1.0 + lam))
    add = ~present & ~blocked & (u < lam / (1.0 + lam))
    return states ^ np.where(remove | add, bit, 0)


def run_ensemble(m: HardcoreModel, count: int, steps: int, seed: int, start: int = 0) -> np.ndarray:
    """Final states of ``count`` independent chains after ``steps`` steps.

    Chains are processed in fixed blocks, each with its own spawned stream,
    so results do not depend on how blocks are scheduled.
    """
    if m.n > 62:
        raise ValueError("bit-mask sampler supports at most 62 vertices")
    nbr = m.graph.neighbor_masks()
    blocks = max(1, math.ceil(count / SAMPLER_BLOCK))
    rngs = spawn_rngs(seed, blocks)
    out = []
    for b in range(blocks):
        size = min(SAMPLER_BLOCK, count - b * SAMPLER_BLOCK)
        states = np.full(size, start, dtype=np.int64)
        for _ in range(steps):
            states = hardcore_batch_step(states, nbr, m.lam, rngs[b])
        out.append(states)
    return np.concatenate(out)


@dataclass
class SampleStats:
    frequencies: np.ndarray
    standard_errors: np.ndarray
    size_histogram: Dict[int, int]
    count: int
    burn_in: int
    seed: int
    rng: str = RNG_NAME
    samples: np.ndarray = field(default=None, repr=False)

    def to_json(self) -> Dict:
        return {
            "frequencies": self.frequencies.tolist(),
            "standard_errors": self.standard_errors.tolist(),
            "size_histogram": {str(k): v for k, v in sorted(self.size_histogram.items())},
            "count": self.count,
            "burn_in": self.burn_in,
            "seed": self.seed,
            "rng": self.rng,
        }


def sample_independent_sets(m: HardcoreModel, burn_in: int, count: int, seed: int) -> SampleStats:
    """``count`` independent chains from the empty set, each run ``burn_in`` steps.

    Samples are independent, so per-vertex standard errors are binomial.
    """
    states = run_ensemble(m, count, burn_in, seed)
    shifts = np.arange(m.n, dtype=np.int64)
    bits = (states[:, None] >> shifts[None, :]) & 1
    freq = bits.mean(axis=0)
    se = np.sqrt(freq * (1.0 - freq) / count)
    sizes = bits.sum(axis=1)
    hist = {int(k): int(c) for k, c in zip(*np.unique(sizes, return_counts=True))}
    return SampleStats(freq, se, hist, count, burn_in, seed, RNG_NAME, states)


def empirical_step_distribution(m: HardcoreModel, start: int, trials: int, seed: int) -> Dict[int, float]:
    """Empirical law of one step from ``start`` over ``trials`` seeded draws."""
    states = run_ensemble(m, trials, 1, seed, start)
    vals, counts = np.unique(states, return_counts=True)
    return {int(v): c / trials for v, c in zip(vals, counts)}

"""Pairwise influence matrices and spectral-independence profiles.

For a distribution ``mu`` on subsets of ``[n]`` the influence of ``i`` on
``j`` is ``Pr[j | i] - Pr[j | not i]`` (zero on the diagonal).  Writing
``C`` for the covariance of the membership indicators and ``D`` for its
diagonal, ``Psi = D^{-1} C - I``.  ``Psi`` is therefore similar to a
symmetric matrix and has a real spectrum.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .distributions import (
    IN,
    NO_PIN,
    OUT,
    DistributionTable,
    Pinning,
    condition,
)
from .linalg import (
    EigenSolverError,
    correlation_lambda_max,
    link_walk_matrix,
    nontrivial_link_spectrum,
    shifted_power_iteration,
)

DEFAULT_PINNING_CAP = 14
IMAG_TOL = 1e-9


class PinningCapError(ValueError):
    pass


@dataclass(frozen=True)
class InfluenceMatrix:
    """Influence matrix restricted to the free elements of a (conditioned) table.

    ``marginals`` are the free elements' marginals; they make the
    symmetrizing similarity available.  ``excluded`` lists elements dropped
    because their marginal was 0 or 1.
    """

    free: Tuple[int, ...]
    entries: np.ndarray
    marginals: Optional[np.ndarray] = None
    excluded: Tuple[int, ...] = ()

    @property
    def k(self) -> int:
        return len(self.free)


def influence_matrix(t: DistributionTable, pin: Pinning = NO_PIN) -> InfluenceMatrix:
    """Exact ``Psi(i, j) = Pr[j | i, pin] - Pr[j | not i, pin]`` over free elements."""
    ct = condition(t, pin)
    free = ct.free_elements()
    excluded = tuple(i for i in range(ct.ground) if i not in free)
    if not free:
        return InfluenceMatrix((), np.zeros((0, 0)), np.zeros(0), excluded)
    bits = ct.bits()[:, free]
    w = ct.weights
    z = ct.total
    p = bits.T @ w / z
    joint = (bits * w[:, None]).T @ bits / z
    # Pr[j | i] = joint[i, j] / p_i and Pr[j | not i] = (p_j - joint[i, j]) / (1 - p_i)
    cond_in = joint / p[:, None]
    cond_out = (p[None, :] - joint) / (1.0 - p[:, None])
    psi = cond_in - cond_out
    np.fill_diagonal(psi, 0.0)
    return InfluenceMatrix(tuple(free), psi, p, excluded)


def _conditionals_from_influence(psi: InfluenceMatrix) -> Tuple[np.ndarray, np.ndarray]:
    p = psi.marginals
    A = psi.entries
    # Pr[j|i] - Pr[j] = Psi(i,j) (1 - p_i) and Pr[j|not i] - Pr[j] = -Psi(i,j) p_i
    cond_in = p[None, :] + A * (1.0 - p)[:, None]
    cond_out = p[None, :] - A * p[:, None]
    return cond_in, cond_out


def influence_eigenvalues(psi: InfluenceMatrix) -> np.ndarray:
    """All eigenvalues of ``Psi`` (ascending).

    With marginals available the link walk on literals is rebuilt from
    ``Psi``, symmetrized by its stationary measure, compressed onto the
    complement of the trivial eigenvectors and scaled by ``k - 1``.  Without
    marginals a general eigensolve is used and the imaginary residue checked.
    """
    k = psi.k
    if k == 0:
        return np.zeros(0)
    if k == 1:
        return np.zeros(1)
    if psi.marginals is not None:
        cond_in, cond_out = _conditionals_from_influence(psi)
        P, pi = link_walk_matrix(psi.marginals, cond_in, cond_out)
        return nontrivial_link_spectrum(P, pi) * (k - 1)
    try:
        ev = np.linalg.eigvals(psi.entries)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigensolve failed for influence matrix\n{psi.entries!r}") from exc
    if np.max(np.abs(ev.imag)) > IMAG_TOL:
        raise EigenSolverError(
            f"influence matrix has non-real eigenvalues (residue {np.max(np.abs(ev.imag)):.3g})\n{psi.entries!r}"
        )
    return np.sort(ev.real)


def lambda_max_influence(psi: InfluenceMatrix) -> float:
    """Largest eigenvalue of ``Psi`` (0 when fewer than two free elements)."""
    if psi.k < 2:
        return 0.0
    return float(influence_eigenvalues(psi)[-1])


def lambda_max_power(psi: InfluenceMatrix) -> float:
    """Cross-check of :func:`lambda_max_influence` by shifted power iteration."""
    if psi.k < 2:
        return 0.0
    return shifted_power_iteration(psi.entries)


def lambda_max_correlation(psi: InfluenceMatrix) -> float:
    """Cross-check through the correlation matrix (needs marginals)."""
    if psi.k < 2:
        return 0.0
    p = psi.marginals
    var = p * (1.0 - p)
    cov = psi.entries * var[:, None] + np.diag(var)
    cov = 0.5 * (cov + cov.T)
    return correlation_lambda_max(cov)


def row_sums(psi: InfluenceMatrix) -> np.ndarray:
    return np.abs(psi.entries).sum(axis=1)


def column_sums(psi: InfluenceMatrix) -> np.ndarray:
    """``sum_u |Psi(u, v)|`` for each free ``v``."""
    return np.abs(psi.entries).sum(axis=0)


def rowsum_bound(psi: InfluenceMatrix) -> float:
    """``min(max row sum, max column sum)`` of ``|Psi|``; dominates ``lambda_max``."""
    if psi.k == 0:
        return 0.0
    return float(min(row_sums(psi).max(), column_sums(psi).max()))


def hardcore_column_bound(lam: float, n: int) -> float:
    """Column-sum bound ``lam / (1 + lam) * (n - 1)`` for hardcore influences."""
    return lam / (1.0 + lam) * (n - 1)


# ---------------------------------------------------------------------------
# Spectral-independence profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Exhaustive:
    pass


@dataclass(frozen=True)
class Sampled:
    k_samples: int
    seed: int = 0


@dataclass
class SpectralProfile:
    """``etas[k]`` is the worst ``lambda_max`` over consistent pinnings of size ``k``."""

    n: int
    etas: List[float]
    per_level_witness: List[Optional[Pinning]]
    exhaustive: bool = True
    fugacity: Optional[float] = None
    pinnings_checked: int = 0

    def to_json(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "lambda": self.fugacity,
            "etas": list(self.etas),
            "witnesses": [None if w is None else w.to_json() for w in self.per_level_witness],
            "gap_bound": main_theorem_gap_bound(self),
            "exhaustive": self.exhaustive,
        }


_TIE_TOL = 1e-12


def _pinned_lambda_max(bits: np.ndarray, weights: np.ndarray, rows: np.ndarray) -> float:
    """``lambda_max`` of the conditional influence matrix on the selected rows."""
    b = bits[rows]
    col = b.sum(axis=0)
    free = np.nonzero((col > 0) & (col < rows.size))[0]
    if free.size < 2:
        return 0.0
    b = b[:, free]
    w = weights[rows]
    z = w.sum()
    p = b.T @ w / z
    joint = (b * w[:, None]).T @ b / z
    cov = joint - np.outer(p, p)
    return correlation_lambda_max(cov)


class _Best:
    __slots__ = ("val", "key", "pin")

    def __init__(self) -> None:
        self.val = -math.inf
        self.key: Optional[tuple] = None
        self.pin: Optional[Pinning] = None

    def offer(self, val: float, pin: Pinning) -> None:
        key = pin.sort_key()
        if val > self.val + _TIE_TOL:
            self.val, self.key, self.pin = val, key, pin
        elif abs(val - self.val) <= _TIE_TOL and (self.key is None or key < self.key):
            self.val = max(self.val, val)
            self.key, self.pin = key, pin


def _sweep(bits: np.ndarray, weights: np.ndarray, n: int, prefix: Tuple[Tuple[int, bool], ...]) -> Tuple[List[Tuple[float, Optional[Tuple]]], int]:
    """Depth-first sweep over all consistent pinnings extending ``prefix``.

    Elements ``0..len(prefix)-1`` are decided by ``prefix`` (entries with
    side ``None`` mean free).  Returns per-level ``(value, pinning items)``.
    """
    best = [_Best() for _ in range(max(n - 1, 0))]
    rows0 = np.arange(bits.shape[0])
    items0: List[Tuple[int, bool]] = []
    for v, side in prefix:
        if side is None:
            continue
        rows0 = rows0[bits[rows0, v] == (1.0 if side else 0.0)]
        items0.append((v, side))
    count = 0
    if rows0.size == 0:
        return [(b.val, None) for b in best], 0
    stack = [(len(prefix), rows0, tuple(items0))]
    while stack:
        depth, rows, items = stack.pop()
        if depth == n:
            k = len(items)
            if k <= n - 2:
                count += 1
                best[k].offer(_pinned_lambda_max(bits, weights, rows), Pinning(items))
            continue
        col = bits[rows, depth]
        rows_in = rows[col == 1.0]
        rows_out = rows[col == 0.0]
        if rows_out.size:
            stack.append((depth + 1, rows_out, items + ((depth, OUT),)))
        if rows_in.size:
            stack.append((depth + 1, rows_in, items + ((depth, IN),)))
        stack.append((depth + 1, rows, items))
    return [(b.val, None if b.pin is None else b.pin.items) for b in best], count


def _sweep_task(args):
    return _sweep(*args)


def spectral_profile(
    t: DistributionTable,
    mode: Union[Exhaustive, Sampled, str] = Exhaustive(),
    jobs: int = 1,
    cap: int = DEFAULT_PINNING_CAP,
) -> SpectralProfile:
    """``eta_k = max lambda_max(Psi_{mu | tau})`` over consistent pinnings with ``|tau| = k``.

    Pinnings that leave fewer than two free elements contribute 0.  Exhaustive
    mode visits every positive-mass pinning; ties are broken toward the
    lexicographically smallest pinning.  ``Sampled`` returns lower bounds.
    """
    if isinstance(mode, str):
        mode = Exhaustive() if mode.lower() == "exhaustive" else Sampled(100)
    n = t.ground
    bits = t.bits()
    weights = t.weights
    if n < 2:
        return SpectralProfile(n, [], [], True, t.fugacity, 0)
    if isinstance(mode, Sampled):
        return _sampled_profile(t, bits, mode)
    if n > cap:
        raise PinningCapError(f"exhaustive sweep needs n <= {cap} (3^n pinnings); got n = {n}")
    prefixes: List[Tuple[Tuple[int, Optional[bool]], ...]] = [()]
    if jobs > 1:
        depth = min(n, 2)
        for v in range(depth):
            prefixes = [p + ((v, s),) for p in prefixes for s in (None, IN, OUT)]
    tasks = [(bits, weights, n, p) for p in prefixes]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_task, tasks))
    else:
        results = [_sweep_task(a) for a in tasks]
    best = [_Best() for _ in range(n - 1)]
    total = 0
    for per_level, count in results:
        total += count
        for k, (val, items) in enumerate(per_level):
            if items is not None:
                best[k].offer(val, Pinning(items))
    etas = [max(b.val, 0.0) if b.pin is not None else 0.0 for b in best]
    return SpectralProfile(n, etas, [b.pin for b in best], True, t.fugacity, total)


def _sampled_profile(t: DistributionTable, bits: np.ndarray, mode: Sampled) -> SpectralProfile:
    n = t.ground
    rng = np.random.default_rng(mode.seed)
    best = [_Best() for _ in range(n - 1)]
    rows_all = np.arange(bits.shape[0])
    total = 0
    best[0].offer(_pinned_lambda_max(bits, t.weights, rows_all), Pinning())
    for k in range(1, n - 1):
        for _ in range(mode.k_samples):
            subset = np.sort(rng.choice(n, size=k, replace=False))
            sides = rng.random(k) < 0.5
            rows = rows_all
            for v, s in zip(subset, sides):
                rows = rows[bits[rows, v] == (1.0 if s else 0.0)]
            if rows.size == 0:
                continue
            total += 1
            pin = Pinning(tuple((int(v), bool(s)) for v, s in zip(subset, sides)))
            best[k].offer(_pinned_lambda_max(bits, t.weights, rows), pin)
    etas = [max(b.val, 0.0) if b.pin is not None else 0.0 for b in best]
    return SpectralProfile(n, etas, [b.pin for b in best], False, t.fugacity, total + 1)


def main_theorem_gap_bound(profile: Union[SpectralProfile, Sequence[float]], n: Optional[int] = None) -> float:
    """``(1/n) prod_{i=0}^{n-2} (1 - eta_i / (n - i - 1))``, or 0 if a factor vanishes."""
    if isinstance(profile, SpectralProfile):
        etas, n = list(profile.etas), profile.n
    else:
        etas = list(profile)
        n = len(etas) + 2 if n is None else n
    if n <= 0:
        raise ValueError("n must be positive")
    prod = 1.0
    for i in range(n - 1):
        eta = etas[i] if i < len(etas) else 0.0
        factor = 1.0 - eta / (n - i - 1)
        if factor <= 0.0:
            return 0.0
        prod *= factor
    return prod / n

"""Dense linear algebra for reversible walks on literals.

Literal order everywhere is ``[1..k, 1bar..kbar]``: index ``i`` is the
literal "element i present" and ``k + i`` is "element i absent".
"""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np


class EigenSolverError(RuntimeError):
    pass


def symmetrize(P: np.ndarray, pi: np.ndarray) -> np.ndarray:
    """``D^{1/2} P D^{-1/2}`` with ``D = diag(pi)``, symmetrized to kill round-off."""
    s = np.sqrt(pi)
    S = P * s[:, None] / s[None, :]
    return 0.5 * (S + S.T)


def reversible_spectrum(P: np.ndarray, pi: np.ndarray) -> np.ndarray:
    """All eigenvalues (ascending) of a matrix reversible with respect to ``pi``."""
    try:
        return np.linalg.eigvalsh(symmetrize(P, pi))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigenSolverError(f"symmetric eigensolve failed for\n{P!r}") from exc


def link_walk_matrix(
    p: np.ndarray, cond_in: np.ndarray, cond_out: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Walk on ``2k`` literals from marginals and pairwise conditionals.

    ``cond_in[i, j] = Pr[j | i]`` and ``cond_out[i, j] = Pr[j | not i]``.  A
    step from a literal of element ``i`` picks one of the other ``k - 1``
    elements uniformly and then its literal from the conditional law.
    Returns the matrix and its stationary measure ``(p_i / k, (1 - p_i) / k)``.
    """
    k = p.size
    if k < 2:
        raise ValueError("a link walk needs at least two elements")
    off = 1.0 - np.eye(k)
    P = np.zeros((2 * k, 2 * k))
    P[:k, :k] = cond_in * off
    P[:k, k:] = (1.0 - cond_in) * off
    P[k:, :k] = cond_out * off
    P[k:, k:] = (1.0 - cond_out) * off
    P /= k - 1
    pi = np.concatenate([p, 1.0 - p]) / k
    return P, pi


def nontrivial_link_spectrum(P: np.ndarray, pi: np.ndarray) -> np.ndarray:
    """Spectrum of a ``2k`` literal walk with the ``k`` trivial eigenvalues removed.

    After the similarity ``S = D^{1/2} P D^{-1/2}`` the trivial eigenvectors
    span ``t_i = sqrt(pi_i) e_i + sqrt(pi_ibar) e_ibar``.  Their orthogonal
    complement is spanned by the disjointly supported vectors
    ``s_i = sqrt(pi_ibar) e_i - sqrt(pi_i) e_ibar`` and is invariant, so the
    remaining eigenvalues are those of the ``k x k`` compression ``V^T S V``.
    """
    k = P.shape[0] // 2
    S = symmetrize(P, pi)
    a, b = np.sqrt(pi[:k]), np.sqrt(pi[k:])
    norm = np.sqrt(a * a + b * b)
    V = np.zeros((2 * k, k))
    V[np.arange(k), np.arange(k)] = b / norm
    V[k + np.arange(k), np.arange(k)] = -a / norm
    C = V.T @ S @ V
    try:
        return np.linalg.eigvalsh(0.5 * (C + C.T))
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise EigenSolverError(f"compressed eigensolve failed for\n{P!r}") from exc


def correlation_lambda_max(cov: np.ndarray) -> float:
    """Largest eigenvalue of ``D^{-1} C - I`` through the correlation matrix."""
    d = np.sqrt(np.diag(cov))
    corr = cov / d[:, None] / d[None, :]
    return float(np.linalg.eigvalsh(0.5 * (corr + corr.T))[-1] - 1.0)


def shifted_power_iteration(
    A: np.ndarray,
    shift: Optional[float] = None,
    tol: float = 1e-13,
    max_iter: int = 200000,
    seed: int = 0,
) -> float:
    """Largest real eigenvalue of ``A`` (real spectrum assumed) by power iteration on ``A + shift I``.

    The default shift ``n`` makes every eigenvalue of an influence matrix
    (entries in [-1, 1], so spectrum inside ``[-(n-1), n-1]``) positive.
    Convergence is geometric in the ratio of the top two shifted eigenvalues,
    so this is a cross-check for small matrices rather than a primary route.
    """
    n = A.shape[0]
    if n == 0:
        return 0.0
    if shift is None:
        shift = float(n)
    B = A + shift * np.eye(n)
    x = np.random.default_rng(seed).uniform(0.5, 1.5, n)
    x /= np.linalg.norm(x)
    mu = 0.0
    for _ in range(max_iter):
        y = B @ x
        mu = float(np.linalg.norm(y))
        if mu == 0.0:
            break
        y /= mu
        if np.linalg.norm(y - x) < tol:
            break
        x = y
    return mu - shift

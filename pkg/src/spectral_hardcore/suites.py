"""Verification batteries shared by the command-line harness and the tests.

Each function takes a concrete instance and returns a list of
:class:`~.checks.Check` records plus a dictionary of reported values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .checks import Check
from .distributions import (
    NO_PIN,
    DistributionTable,
    Pinning,
    iter_consistent_pinnings,
    marginals,
    restrict_rows,
)
from .glauber import (
    DENSE_EIGEN_CAP,
    exact_chain_spectrum,
    first_hitting,
    generic_kernel,
    hardcore_kernel,
    mixing_time_bound,
    tv_distance_curve,
)
from .graphs import Graph, random_connected_graph
from .hardcore import DEFAULT_ENUM_CAP, HardcoreModel, check_pinning, enumerate_distribution
from .influence import (
    DEFAULT_PINNING_CAP,
    column_sums,
    hardcore_column_bound,
    influence_matrix,
    lambda_max_correlation,
    lambda_max_influence,
    main_theorem_gap_bound,
    spectral_profile,
)
from .saw import SawCapError, decoupling_check, weitz_identity_check
from .simplicial import DEFAULT_LOCAL_TO_GLOBAL_CAP, build_down_up_walk, local_to_global_check, spectrum_identity_check

SPECTRUM_PINNING_LIMIT = 64
DECOUPLING_MAX_N = 8


@dataclass
class Caps:
    enum_cap: int = DEFAULT_ENUM_CAP
    pinning_cap: int = DEFAULT_PINNING_CAP
    state_cap: int = 1 << 20


@dataclass
class Instance:
    graph: Graph
    lam: float
    pin: Pinning = NO_PIN

    def describe(self) -> Dict[str, Any]:
        return {"n": self.graph.n, "edges": sorted(self.graph.edges), "lambda": self.lam, "pin": self.pin.to_json()}


def random_consistent_pinning(g: Graph, rng: np.random.Generator, max_size: Optional[int] = None) -> Pinning:
    """Random pinning with positive hardcore mass (no two adjacent In vertices)."""
    n = g.n
    size = int(rng.integers(0, (max_size if max_size is not None else n) + 1))
    size = min(size, n)
    chosen = rng.permutation(n)[:size]
    items: List[Tuple[int, bool]] = []
    ins = set()
    for v in sorted(int(x) for x in chosen):
        side = bool(rng.random() < 0.5) and not any(u in ins for u in g.adjacency[v])
        if side:
            ins.add(v)
        items.append((v, side))
    pin = Pinning(tuple(items))
    check_pinning(g, pin)
    return pin


def fuzz_instances(
    seed: int,
    count: int,
    n_range: Tuple[int, int] = (2, 8),
    lam_max: float = 4.0,
    pin_max: Optional[int] = 3,
) -> List[Instance]:
    """Seeded random connected graphs, fugacities in ``(0, lam_max]`` and consistent pinnings."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        g = random_connected_graph(n, rng)
        lam = float(lam_max * (1.0 - rng.random()))
        pin = random_consistent_pinning(g, rng, pin_max)
        out.append(Instance(g, lam, pin))
    return out


# ---------------------------------------------------------------------------
# Individual suites
# ---------------------------------------------------------------------------


def column_sum_checks(t: DistributionTable, lam: float) -> List[Check]:
    psi = influence_matrix(t)
    if psi.k < 2:
        return [Check.skip("column_sum_bound", "fewer than two free vertices")]
    sums = column_sums(psi)
    bound = hardcore_column_bound(lam, t.ground)
    j = int(np.argmax(sums))
    return [Check.leq("column_sum_bound", float(sums[j]), bound, tol=1e-12, vertex=psi.free[j])]


def spectrum_checks(t: DistributionTable, rng: np.random.Generator, limit: int = SPECTRUM_PINNING_LIMIT) -> List[Check]:
    """Spectrum identity at the empty pinning and at consistent pinnings leaving two or more free vertices."""
    pins = []
    for pin, rows in iter_consistent_pinnings(t):
        if len(pin) == 0 or t.ground - len(pin) < 2:
            continue
        if len(restrict_rows(t, rows, pin).free_elements()) >= 2:
            pins.append(pin)
    if len(pins) > limit:
        pick = rng.choice(len(pins), size=limit, replace=False)
        pins = [pins[i] for i in sorted(pick)]
    out = []
    for pin in [NO_PIN] + pins:
        try:
            rep = spectrum_identity_check(t, pin)
        except ValueError as exc:
            out.append(Check.skip("spectrum_identity", f"{pin}: {exc}"))
            continue
        out.append(rep.check)
    return out


def kernel_checks(t: DistributionTable, tol: float = 1e-12) -> List[Check]:
    """Hardcore rule, generic heat-bath kernel and down-up walk agree entrywise."""
    if t.size > DENSE_EIGEN_CAP:
        return [Check.skip("kernel_agreement", f"{t.size} states exceed the dense cap")]
    A = hardcore_kernel(t)
    B = generic_kernel(t).toarray()
    C = build_down_up_walk(t).dense()
    d1 = float(np.max(np.abs(A - B)))
    d2 = float(np.max(np.abs(B - C)))
    return [
        Check.equal("kernel_hardcore_vs_generic", d1, 0.0, tol, states=t.size),
        Check.equal("kernel_generic_vs_down_up", d2, 0.0, tol, states=t.size),
    ]


def main_theorem_checks(t: DistributionTable, jobs: int = 1, caps: Caps = Caps()) -> Tuple[List[Check], Dict[str, Any]]:
    n = t.ground
    if n > caps.pinning_cap:
        return [Check.skip("main_theorem_gap", f"n = {n} exceeds the pinning cap {caps.pinning_cap}")], {}
    prof = spectral_profile(t, jobs=jobs, cap=caps.pinning_cap)
    bound = main_theorem_gap_bound(prof)
    spec = exact_chain_spectrum(t, cap=caps.state_cap)
    check = Check.leq("main_theorem_gap", bound, spec.gap, tol=1e-12, n=n)
    return [check], {"etas": prof.etas, "gap": spec.gap, "gap_bound": bound, "lambda_star": spec.lambda_star}


def mixing_checks(
    t: DistributionTable, eps_list=(0.1, 0.01), start: int = 0, max_horizon: int = 200_000
) -> Tuple[List[Check], Dict[str, Any]]:
    """First time the exact TV curve drops below ``eps`` against the relaxation-time bound."""
    spec = exact_chain_spectrum(t)
    if spec.states.size == 1:
        return [Check.skip("mixing_bound", "single state")], {}
    if spec.lambda_star >= 1.0 - 1e-15:
        return [Check.skip("mixing_bound", "lambda_star = 1")], {}
    bounds = {eps: mixing_time_bound(spec, start, eps) for eps in eps_list}
    horizon = min(max_horizon, int(math.ceil(max(b.bound for b in bounds.values()))) + 1)
    curve = tv_distance_curve(spec, start, horizon)
    checks, res = [], {"gap": spec.gap, "lambda_star": spec.lambda_star, "horizon": horizon, "tv": curve}
    for eps, b in bounds.items():
        hit = first_hitting(curve, eps)
        lhs = float(hit) if hit is not None else math.inf
        checks.append(Check.leq("mixing_bound", lhs, b.bound, eps=eps, start=start))
        res[f"bound_eps_{eps}"] = b.bound
        res[f"first_hit_eps_{eps}"] = hit
        if b.remark_bound is not None:
            res[f"remark_bound_eps_{eps}"] = b.remark_bound
    return checks, res


def weitz_checks(m: HardcoreModel, pin: Pinning = NO_PIN) -> List[Check]:
    out = []
    for r in range(m.n):
        if r in pin:
            continue
        try:
            out.append(weitz_identity_check(m, r, pin))
        except SawCapError as exc:
            out.append(Check.skip("weitz_identity", str(exc)))
    return out


def decoupling_checks(m: HardcoreModel, t: Optional[DistributionTable] = None) -> List[Check]:
    if m.n > DECOUPLING_MAX_N:
        return [Check.skip("decoupling", f"n = {m.n} exceeds {DECOUPLING_MAX_N}")]
    t = t if t is not None else enumerate_distribution(m)
    out = []
    for r in range(m.n):
        try:
            out.append(decoupling_check(m, r, table=t).check)
        except SawCapError as exc:
            out.append(Check.skip("decoupling", str(exc)))
    return out


def verify_instance(
    g: Graph,
    lam: float,
    rng: np.random.Generator,
    caps: Caps = Caps(),
    jobs: int = 1,
    pin: Pinning = NO_PIN,
) -> Tuple[List[Check], Dict[str, Any]]:
    """Full battery for one (graph, fugacity) pair."""
    if lam == 0:
        return [Check.skip("verify", "lambda = 0: the measure is a point mass on the empty set")], {}
    m = HardcoreModel(g, lam)
    t = enumerate_distribution(m, cap=caps.enum_cap)
    checks: List[Check] = []
    results: Dict[str, Any] = {"n": g.n, "lambda": lam, "states": t.size}
    psi = influence_matrix(t)
    if psi.k >= 2:
        lm = lambda_max_influence(psi)
        lc = lambda_max_correlation(psi)
        checks.append(Check.equal("lambda_max_cross_check", lm, lc, 1e-9))
        results["lambda_max"] = lm
    checks += column_sum_checks(t, lam)
    checks += spectrum_checks(t, rng)
    if g.n <= DEFAULT_LOCAL_TO_GLOBAL_CAP:
        rep = local_to_global_check(t)
        checks.append(rep.check)
        results["local_to_global"] = {"alphas": rep.alphas, "lambda2": rep.lambda2, "bound": rep.bound}
    mt, mres = main_theorem_checks(t, jobs, caps)
    checks += mt
    results["main_theorem"] = mres
    checks += kernel_checks(t)
    checks += weitz_checks(m, NO_PIN)
    if len(pin):
        checks += weitz_checks(m, pin)
    checks += decoupling_checks(m, t)
    return checks, results


def sampler_marginal_checks(
    m: HardcoreModel, samples, exact: np.ndarray, sigmas: float = 3.0
) -> List[Check]:
    """Per-vertex empirical frequency within ``sigmas`` standard errors of the exact marginal."""
    out = []
    for v in range(m.n):
        p = float(exact[v])
        se = math.sqrt(max(p * (1.0 - p), 0.0) / samples.count)
        diff = abs(float(samples.frequencies[v]) - p)
        out.append(Check.leq("sampler_marginal", diff, sigmas * se, tol=1e-15, vertex=v, exact=p))
    return out


def exact_marginals(m: HardcoreModel, caps: Caps = Caps()) -> np.ndarray:
    return marginals(enumerate_distribution(m, cap=caps.enum_cap))

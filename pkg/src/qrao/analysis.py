"""Closed-form shot-count and noisy approximation-ratio analysis."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ParameterError
from .simulator import SeedLike, as_generator

MAGIC_BOUND = 5.0 / 9.0


class DomainError(ParameterError):
    """Analysis input outside the formula's domain."""


def _ceil(x: float) -> int:
    # absorb float noise such as ln(e) evaluating a hair above 1
    r = round(x)
    return int(r) if abs(x - r) <= 1e-9 * max(1.0, abs(x)) else math.ceil(x)


def min_shots(delta: float, epsilon: float) -> int:
    """Smallest S with exp(-2 S eps^2) <= delta, i.e. ceil(ln(1/delta) / (2 eps^2))."""
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    if epsilon <= 0.0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    return _ceil(math.log(1.0 / delta) / (2.0 * epsilon**2))


def sign_error_bound(shots: int, epsilon: float) -> float:
    """Chernoff-Hoeffding bound exp(-2 S eps^2) on Pr[h <= S/2]."""
    return math.exp(-2.0 * shots * epsilon**2)


def epsilon_under_noise(p: float, N: int, trace: float) -> float:
    """Bias of one measured bit after N depolarizing applications: -p^N Tr(P rho) / 2."""
    _check_p(p, allow_zero=True)
    _check_n(N)
    if trace >= 0.0:
        raise DomainError(f"trace must be negative, got {trace}")
    return -(p**N) * trace / 2.0


def min_shots_under_noise(delta: float, p: float, N: int, trace: float) -> float:
    """Continuous shot requirement 4 ln(1/delta) / (p^{2N} Tr(P rho)^2)."""
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    _check_p(p)
    _check_n(N)
    if trace == 0.0:
        raise DomainError("trace must be non-zero")
    return 4.0 * math.log(1.0 / delta) / (p ** (2 * N) * trace**2)


def shots_order(num_nodes: int, epsilon: float) -> float:
    """Order-of-magnitude figure |V| ln|V| / eps^2 for decoding every node."""
    if num_nodes < 2:
        raise DomainError(f"need at least 2 nodes, got {num_nodes}")
    if epsilon <= 0.0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    return num_nodes * math.log(num_nodes) / epsilon**2


def shot_ratio_qrac_vs_ising(p: float, layers: int, num_nodes: int) -> float:
    """Ratio of shots needed by the QRAC encoding to the Ising one: p^(3/4 l |V|)."""
    _check_p(p)
    if layers < 1 or num_nodes < 1:
        raise DomainError("layers and num_nodes must be >= 1")
    return p ** (0.75 * layers * num_nodes)


@dataclass(frozen=True)
class ShotPlan:
    delta: float
    epsilon: float
    min_shots: int
    alpha: float | None = None


def shot_plan(alpha: float, num_nodes: int, epsilon: float) -> ShotPlan:
    """Per-node error budget delta = ln(1/alpha)/|V| for all-node success >= alpha."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if num_nodes < 1:
        raise DomainError("num_nodes must be >= 1")
    delta = math.log(1.0 / alpha) / num_nodes
    if delta >= 1.0:
        raise DomainError(f"alpha={alpha} too small for {num_nodes} nodes (delta={delta})")
    return ShotPlan(delta, epsilon, min_shots(delta, epsilon), alpha)


def _check_p(p: float, allow_zero: bool = False) -> None:
    lo_ok = p >= 0.0 if allow_zero else p > 0.0
    if not (lo_ok and p <= 1.0):
        raise DomainError(f"p must lie in (0, 1], got {p}")


def _check_n(N: float) -> None:
    if N < 0:
        raise DomainError(f"N must be non-negative, got {N}")


def _check_cut(edges: int, opt_cut: int) -> None:
    if opt_cut <= 0:
        raise DomainError(f"opt_cut must be positive, got {opt_cut}")
    if opt_cut > edges:
        raise DomainError(f"opt_cut {opt_cut} exceeds edge count {edges}")


def expected_ratio_ising(p: float, n1: float, edges: int, opt_cut: int) -> float:
    """p^N1 + (1 - p^N1) |E| / (2 cut*)."""
    _check_p(p)
    _check_n(n1)
    _check_cut(edges, opt_cut)
    s = p**n1
    return s + (1.0 - s) * edges / (2.0 * opt_cut)


def expected_ratio_qrac_lower(p: float, n3: float, edges: int, opt_cut: int) -> float:
    """(5/9) p^N3 + (1 - p^N3) |E| / (2 cut*)."""
    _check_p(p)
    _check_n(n3)
    _check_cut(edges, opt_cut)
    s = p**n3
    return MAGIC_BOUND * s + (1.0 - s) * edges / (2.0 * opt_cut)


def validity_condition(edges: int, opt_cut: int) -> bool:
    """True iff cut*/|E| > 9/10, the regime where the QRAC bound can overtake Ising."""
    if edges <= 0:
        raise DomainError(f"edges must be positive, got {edges}")
    return opt_cut / edges > 0.9


class Crossover(NamedTuple):
    n1: int | None  # smallest integer N1 at or past the crossing
    n1_continuous: float | None
    diagnostic: str


def crossover_closed_form(p: float, qubit_ratio: float = 1.0 / 3.0) -> float:
    """Crossing point for |E| = cut*: ln 9 / ((1 - r)(-ln p))."""
    _check_p(p)
    if p == 1.0:
        return math.inf
    return math.log(9.0) / ((1.0 - qubit_ratio) * -math.log(p))


def find_crossover_N1(p: float, qubit_ratio: float = 1.0 / 3.0, edges: int = 1, opt_cut: int = 1,
                      *, tol: float = 1e-9, n_max: float = 1e12) -> Crossover:
    """Smallest N1 with expected_ratio_qrac_lower(p, r N1) >= expected_ratio_ising(p, N1).

    Brackets the sign change by doubling, bisects the continuous N1 to ``tol``,
    then rounds up. Returns ``n1=None`` with a diagnostic when no crossing exists.
    """
    if not 0.0 < p < 1.0:
        return Crossover(None, None, f"no finite crossover: p={p} must lie strictly in (0, 1)")
    if not 0.0 <= qubit_ratio < 1.0:
        raise DomainError(f"qubit_ratio must lie in [0, 1), got {qubit_ratio}")
    _check_cut(edges, opt_cut)

    def gap(n1: float) -> float:
        return expected_ratio_qrac_lower(p, qubit_ratio * n1, edges, opt_cut) - expected_ratio_ising(p, n1, edges, opt_cut)

    if gap(0.0) >= 0.0:
        return Crossover(0, 0.0, "QRAC bound already ahead at N1=0")
    # gap = s3 (5/9 - k) - s1 (1 - k) with k = |E| / (2 cut*); it stays negative
    # (approaching 0 from below) unless 5/9 > k, i.e. cut*/|E| > 9/10
    if not validity_condition(edges, opt_cut):
        return Crossover(None, None, f"no crossover: cut*/|E|={opt_cut / edges:.3f} <= 0.9")
    lo, hi = 0.0, 1.0
    while gap(hi) <= 0.0:
        lo, hi = hi, hi * 2.0
        if hi > n_max:
            return Crossover(None, None, f"no crossover below N1={n_max:g} (cut*/|E|={opt_cut / edges:.3f})")
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if gap(mid) >= 0.0:
            hi = mid
        else:
            lo = mid
    return Crossover(math.ceil(hi - tol * max(1.0, hi)), hi, "ok")


def crossover_sweep(p: float, n1_max: int, qubit_ratio: float = 1.0 / 3.0, edges: int = 1,
                    opt_cut: int = 1) -> list[tuple[int, float, float]]:
    """Rows (N1, Ising expected ratio, QRAC lower bound) for N1 = 0..n1_max."""
    rows = []
    for n1 in range(n1_max + 1):
        rows.append((n1, expected_ratio_ising(p, n1, edges, opt_cut),
                     expected_ratio_qrac_lower(p, qubit_ratio * n1, edges, opt_cut)))
    return rows


def simulate_sign_errors(shots: int, epsilon: float, trials: int, seed: SeedLike) -> float:
    """Fraction of trials whose Bernoulli(1/2 + eps) count h satisfies h <= S/2."""
    if not 0.0 < epsilon <= 0.5:
        raise DomainError(f"epsilon must lie in (0, 1/2], got {epsilon}")
    rng = as_generator(seed)
    x = rng.random((trials, shots)) < 0.5 + epsilon
    h = x.sum(axis=1)
    return float(np.mean(h <= shots / 2))


def bounds_report(p: float, N: int, num_nodes: int, edges: int, opt_cut: int, layers: int,
                  delta: float, epsilon: float, qubit_ratio: float = 1.0 / 3.0) -> dict:
    """All closed-form quantities for one parameter point, JSON-ready."""
    cross = find_crossover_N1(p, qubit_ratio, edges, opt_cut)
    n3 = qubit_ratio * N
    return {
        "inputs": {"p": p, "N": N, "num_nodes": num_nodes, "edges": edges, "opt_cut": opt_cut,
                   "layers": layers, "delta": delta, "epsilon": epsilon, "qubit_ratio": qubit_ratio},
        "min_shots": min_shots(delta, epsilon),
        "sign_error_bound": sign_error_bound(min_shots(delta, epsilon), epsilon),
        "shots_order": shots_order(num_nodes, epsilon),
        "shot_ratio_qrac_vs_ising": shot_ratio_qrac_vs_ising(p, layers, num_nodes),
        "expected_ratio_ising": expected_ratio_ising(p, N, edges, opt_cut),
        "N3": round(n3),
        "expected_ratio_qrac_lower": expected_ratio_qrac_lower(p, n3, edges, opt_cut),
        "validity_condition": validity_condition(edges, opt_cut),
        "crossover_N1": cross.n1,
        "crossover_N1_continuous": cross.n1_continuous,
        "crossover_diagnostic": cross.diagnostic,
    }

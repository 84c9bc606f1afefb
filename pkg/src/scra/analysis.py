"""Exact evaluation of the contention-resolution performance quantities:
slot-count recursions, linear bounds and their slopes, expected and
worst-case throughput, net data rate with overhead accounting, genie upper
bounds, and the search for the best resolution capability K."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc as _betainc
from scipy.stats import binom as _binom

from .channel import plnc_rate
from .errors import ArgumentError
from .numtheory import regularized_incomplete_beta
from .sigcode import signature_bits_bound

log = logging.getLogger(__name__)

# cache: (K, sic) -> list of expected slot counts indexed by L
_slots_cache: dict[tuple[int, bool], list[float]] = {}


def _extend_slots(K: int, sic: bool, L: int) -> list[float]:
    vals = _slots_cache.setdefault((K, sic), [1.0])
    base = 0.0 if sic else 1.0
    for n in range(len(vals), L + 1):
        if n <= K:
            vals.append(float(n))
            continue
        # splitting recursion; exact integer binomials, one float division each
        two_n = 1 << n
        acc = base
        for i in range(n):
            acc += 2.0 * (math.comb(n, i) / two_n) * vals[i]
        vals.append(acc / (1.0 - 2.0 / two_n))
    return vals


def expected_slots(L: int, K: int) -> float:
    """Expected slots to resolve a batch of L users (collisions discarded)."""
    if L < 0 or K < 1:
        raise ArgumentError("need L >= 0 and K >= 1")
    return _extend_slots(K, False, L)[L]


def expected_slots_sic(L: int, K: int) -> float:
    """Expected slots to resolve a batch of L users with cancellation."""
    if L < 0 or K < 1:
        raise ArgumentError("need L >= 0 and K >= 1")
    return _extend_slots(K, True, L)[L]


def resolution_cost_ratio(L: int, K: int) -> float:
    """Ratio bounding slots per resolved user below the collision threshold."""
    if L <= K:
        raise ArgumentError("defined only for L > K")
    total = sum(math.comb(L, i) for i in range(K + 1))
    weighted = sum(math.comb(L, i) * i for i in range(K + 1))
    return 1.0 + (1 + total) / weighted


def resolution_cost_ratio_sic(L: int, K: int) -> float:
    if L <= K:
        raise ArgumentError("defined only for L > K")
    weighted = sum(math.comb(L, i) * i for i in range(1, K + 1))
    return 1.0 + 1.0 / weighted


def lower_slope(K: int) -> float:
    """Slope of the linear lower bound on expected slots."""
    if K < 1:
        raise ArgumentError("K must be >= 1")
    return 1.0 + 1.0 / K


def upper_slope(K: int) -> float:
    """Slope of the linear upper bound on expected slots."""
    if K < 1:
        raise ArgumentError("K must be >= 1")
    return 1.0 + 2.0 / ((K + 1) * (1.0 - 2.0**-K))


def lower_slope_sic(K: int) -> float:
    if K < 1:
        raise ArgumentError("K must be >= 1")
    return 1.0


def upper_slope_sic(K: int) -> float:
    if K < 1:
        raise ArgumentError("K must be >= 1")
    return 1.0 + 1.0 / ((K + 1) * (2.0**K - 1.0))


@dataclass(frozen=True)
class SchemeParams:
    """Operating point: population M, capability K, activity p, power P,
    payload bits D, with or without cancellation."""

    M: int
    K: int
    p: float
    P: float
    D: float
    sic: bool = False

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ArgumentError("p must lie in (0, 1)")
        if self.P <= 1.0:
            raise ArgumentError("P must exceed 1")
        if self.K < 1 or self.M < self.K:
            raise ArgumentError("need 1 <= K <= M")
        if self.D <= 0:
            raise ArgumentError("D must be positive")


def worst_case_throughput(K: int, sic: bool = False) -> float:
    """Users resolved per slot under any batch size (infimum over L)."""
    return 1.0 / (upper_slope_sic(K) if sic else upper_slope(K))


def throughput_lower(M: int, K: int, p: float, sic: bool = False) -> float:
    """Closed-form lower bound on mean users resolved per slot."""
    if not 0.0 < p < 1.0:
        raise ArgumentError("p must lie in (0, 1)")
    if K < 1 or K > M:
        raise ArgumentError("need 1 <= K <= M")
    beta = upper_slope_sic(K) if sic else upper_slope(K)
    q0 = (1.0 - p) ** M
    tail = regularized_incomplete_beta(p, K + 1, M - K)
    return 1.0 - (beta - 1.0) / (beta * (1.0 - q0)) * tail


def mean_throughput_lower(params: SchemeParams) -> float:
    """Closed-form lower bound on mean users resolved per slot."""
    return throughput_lower(params.M, params.K, params.p, params.sic)


def mean_throughput_exact(params: SchemeParams, tail_eps: float = 1e-15) -> float:
    """Mean users resolved per slot by direct summation over batch sizes.

    The sum truncates once the remaining batch-size tail mass drops below
    ``tail_eps``; the truncation point is logged at debug level.
    """
    M, p = params.M, params.p
    slots = expected_slots_sic if params.sic else expected_slots
    pmf = _binom.pmf(np.arange(M + 1), M, p)
    tail = 1.0 - np.cumsum(pmf)
    cut = int(np.argmax(tail < tail_eps)) if np.any(tail < tail_eps) else M
    log.debug("exact throughput sum truncated at L=%d of %d", cut, M)
    q0 = pmf[0]
    acc = 0.0
    for L in range(1, cut + 1):
        acc += L / slots(L, params.K) * pmf[L]
    return acc / (1.0 - q0)


def _throughput_lower_arr(M: int, Ks: np.ndarray, p: float, sic: bool) -> np.ndarray:
    Ks = np.asarray(Ks, dtype=np.int64)
    if sic:
        beta = 1.0 + 1.0 / ((Ks + 1) * (2.0**Ks - 1.0))
    else:
        beta = 1.0 + 2.0 / ((Ks + 1) * (1.0 - 2.0 ** (-Ks.astype(float))))
    q0 = (1.0 - p) ** M
    tail = np.where(
        Ks >= M, 0.0, _betainc(Ks + 1, np.maximum(M - Ks, 1), p)
    )
    return 1.0 - (beta - 1.0) / (beta * (1.0 - q0)) * tail


def _overhead_bits_arr(M: int, Ks: np.ndarray) -> np.ndarray:
    Ks = np.asarray(Ks, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = 1.0 - np.log2(Ks) / math.log2(M)
        out = np.where(Ks < M, (Ks / denom + 1.0) * (math.log2(M) + 1.0), np.inf)
    return out


def mean_net_rate_lower(params: SchemeParams) -> float:
    """Lower bound on information bits delivered per channel use."""
    if params.K >= params.M:
        return 0.0  # signature overhead bound is unbounded at K = M
    nw = signature_bits_bound(params.M, params.K)
    return (
        plnc_rate(params.P)
        * (params.D / (nw + params.D))
        * mean_throughput_lower(params)
    )


def mean_net_rate_limit(params: SchemeParams) -> float:
    """Net-rate bound in the infinite-payload limit (overhead washes out)."""
    return plnc_rate(params.P) * mean_throughput_lower(params)


def net_rate_upper(params: SchemeParams, *, conditioned: bool = False) -> float:
    """Genie bound: batch-size-weighted multi-user sum capacity.

    The printed form weights by the unconditional batch distribution;
    ``conditioned=True`` divides by the probability of a nonempty batch.
    """
    L = np.arange(1, params.M + 1)
    pmf = _binom.pmf(L, params.M, params.p)
    val = float(np.sum(pmf * 0.5 * np.log2(1.0 + L * params.P)))
    if conditioned:
        val /= 1.0 - (1.0 - params.p) ** params.M
    return val


def net_rate_upper_jensen(params: SchemeParams) -> float:
    """Concavity relaxation of the genie bound at the mean batch size."""
    return 0.5 * math.log2(1.0 + params.p * params.M * params.P)


def optimal_k(
    M: int,
    p: float,
    P: float,
    D: float,
    *,
    sic: bool = False,
    k_range=None,
) -> tuple[int, float]:
    """Capability maximizing the net-rate lower bound; ties break low."""
    if k_range is None:
        k_range = range(1, M // 2 + 1)
    Ks = np.asarray(sorted(k_range), dtype=np.int64)
    if len(Ks) == 0:
        raise ArgumentError("empty K range")
    if Ks[0] < 1 or Ks[-1] > M:
        raise ArgumentError("K range must lie in [1, M]")
    rates = (
        plnc_rate(P)
        * (D / (_overhead_bits_arr(M, Ks) + D))
        * _throughput_lower_arr(M, Ks, p, sic)
    )
    best = int(np.argmax(rates))
    return int(Ks[best]), float(rates[best])


@dataclass(frozen=True)
class AnalysisCurve:
    """Named (x, y) series with provenance, the unit of figure output."""

    name: str
    x_label: str
    y_label: str
    points: tuple[tuple[float, float], ...]
    provenance: str  # exact | lower_bound | upper_bound | simulated

    def __post_init__(self):
        xs = [x for x, _ in self.points]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ArgumentError("x values must be strictly increasing")
        if self.provenance not in {"exact", "lower_bound", "upper_bound", "simulated"}:
            raise ArgumentError(f"unknown provenance {self.provenance!r}")

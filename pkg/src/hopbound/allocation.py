"""Blocklength and time-share allocation across the hops of a linear chain.

Three allocation rules under the total budget sum(Q_n) = Q:
capacity-optimal time sharing, reliability-optimal (Lagrange, error
balancing) and information-continuous (common codeword count M).

Sums over hops are accumulated left-to-right with plain floats so the
distributed protocol can reproduce them bit-exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "AllocationError",
    "Method",
    "TimeShare",
    "Allocation",
    "optimal_time_share",
    "reliability_lagrange",
    "reliability_real_blocks",
    "reliability_optimal_blocks",
    "info_continuous_log_m",
    "information_continuous_blocks",
    "rate_policy_scale",
]


class AllocationError(ValueError):
    """Infeasible or invalid allocation request."""


class Method:
    RELIABILITY_OPTIMAL_RC = "reliability_optimal_rc"
    RELIABILITY_OPTIMAL_SP = "reliability_optimal_sp"
    INFO_CONTINUOUS = "info_continuous"
    MANUAL = "manual"


@dataclass(frozen=True)
class TimeShare:
    lambdas: list[float]  # fractional hop durations, sum to 1
    network_rate: float  # nats per channel use


@dataclass(frozen=True)
class Allocation:
    blocklengths: list[int]  # integer Q_n, sum exactly Q
    rates: list[float]  # R_n, nats per channel use
    end_to_end_rate: float  # min(Q_n R_n) / Q
    method: str
    real_blocklengths: list[float] | None = None  # pre-repair optimum

    @property
    def total_q(self) -> int:
        return sum(self.blocklengths)


def _end_to_end_rate(blocks: list[int], rates: list[float]) -> float:
    q = sum(blocks)
    return min(b * r for b, r in zip(blocks, rates)) / q


def optimal_time_share(capacities: list[float]) -> TimeShare:
    """Minimax-optimal time-sharing fractions: lambda_n proportional to 1/I_n."""
    if not capacities:
        raise AllocationError("need at least one hop")
    if any(c <= 0 for c in capacities):
        raise AllocationError("all capacities must be positive")
    inv_sum = 0.0
    for c in capacities:
        inv_sum += 1.0 / c
    network_rate = 1.0 / inv_sum
    lambdas = [network_rate / c for c in capacities]
    return TimeShare(lambdas, network_rate)


def _largest_remainder_repair(real_values: list[float], total: int) -> list[int]:
    """Round real allocations to integers summing to `total`.

    Floors first, then hands out the leftover one unit at a time in
    descending order of fractional remainder (ties to the lowest index).
    """
    floors = [max(int(math.floor(v)), 0) for v in real_values]
    leftover = total - sum(floors)
    if leftover < 0:
        raise AllocationError("real-valued allocation exceeds the budget")
    remainders = sorted(range(len(real_values)),
                        key=lambda i: (-(real_values[i] - math.floor(real_values[i])), i))
    blocks = list(floors)
    for k in range(leftover):
        blocks[remainders[k % len(blocks)]] += 1
    return blocks


def _exchange_polish(blocks: list[int], exponents: list[float]) -> list[int]:
    """Greedy one-unit exchanges minimizing sum(exp(-Q_n E_n)).

    The objective is separable convex, so a local optimum under single-unit
    moves is the global integer optimum.
    """
    blocks = list(blocks)
    n = len(blocks)

    def delta_add(i):  # objective change from Q_i -> Q_i + 1
        return math.exp(-(blocks[i] + 1) * exponents[i]) - math.exp(-blocks[i] * exponents[i])

    def delta_sub(i):  # objective change from Q_i -> Q_i - 1
        return math.exp(-(blocks[i] - 1) * exponents[i]) - math.exp(-blocks[i] * exponents[i])

    improved = True
    while improved:
        improved = False
        for i in range(n):
            for j in range(n):
                if i == j or blocks[j] <= 1:
                    continue
                if delta_add(i) + delta_sub(j) < 0:
                    blocks[i] += 1
                    blocks[j] -= 1
                    improved = True
    return blocks


def reliability_lagrange(exponents: list[float], q_total: int) -> float:
    """Lagrange multiplier of the error-balancing allocation."""
    if any(e <= 0 for e in exponents):
        raise AllocationError("all exponents must be positive (rate below capacity)")
    inv_sum = 0.0
    logexp_sum = 0.0
    for e in exponents:
        inv_sum += 1.0 / e
    for e in exponents:
        logexp_sum += math.log(e) / e
    return (logexp_sum - q_total) / inv_sum


def reliability_real_blocks(exponents: list[float], q_total: int) -> list[float]:
    """Real-valued error-balancing optimum: Q_n = (ln E_n - lambda) / E_n.

    At this point Q_n*E_n - ln(E_n) is the same on every hop.
    """
    lam = reliability_lagrange(exponents, q_total)
    return [(math.log(e) - lam) / e for e in exponents]


def reliability_optimal_blocks(exponents: list[float], q_total: int,
                               rates: list[float] | None = None,
                               method: str = Method.RELIABILITY_OPTIMAL_RC) -> Allocation:
    """Integer blocklengths minimizing sum(exp(-Q_n E_n)) under sum(Q_n) = Q.

    Largest-remainder rounding of the real optimum followed by an exchange
    polish, which makes the result exactly optimal among integer splits.
    """
    n = len(exponents)
    if q_total < n:
        raise AllocationError(f"budget {q_total} cannot give every one of {n} hops a block")
    real = reliability_real_blocks(exponents, q_total)
    start = [max(v, 1.0) for v in real]
    blocks = _largest_remainder_repair(start, q_total)
    # repair can leave a hop at 0 when its real share is tiny; bump from the largest
    for i in range(n):
        while blocks[i] < 1:
            j = max(range(n), key=lambda k: blocks[k])
            if blocks[j] <= 1:
                raise AllocationError("cannot keep every hop at blocklength >= 1")
            blocks[j] -= 1
            blocks[i] += 1
    blocks = _exchange_polish(blocks, exponents)
    if rates is None:
        rates_out = [float("nan")] * n
        e2e = float("nan")
    else:
        rates_out = list(rates)
        e2e = _end_to_end_rate(blocks, rates_out)
    return Allocation(blocks, rates_out, e2e, method, real_blocklengths=real)


def info_continuous_log_m(rates: list[float], q_total: int) -> float:
    """ln M for the common-codeword-count allocation: Q / sum(1/R_n)."""
    if any(r <= 0 for r in rates):
        raise AllocationError("all rates must be positive")
    inv_sum = 0.0
    for r in rates:
        inv_sum += 1.0 / r
    return q_total / inv_sum


# exp() overflows doubles near 709; above this ln M stays symbolic
_LN_M_MATERIALIZE_LIMIT = 700.0


def information_continuous_blocks(rates: list[float], q_total: int):
    """Common-M allocation: Q_n = floor(ln M / R_n), leftovers by remainder.

    Returns (M, Allocation); M is None when ln M > 700 and the codeword
    count cannot be materialized (ln M is still exact in the allocation).
    """
    n = len(rates)
    if q_total < n:
        raise AllocationError(f"budget {q_total} cannot give every one of {n} hops a block")
    ln_m = info_continuous_log_m(rates, q_total)
    m = int(math.floor(math.exp(ln_m))) if ln_m <= _LN_M_MATERIALIZE_LIMIT else None
    real = [ln_m / r for r in rates]
    blocks = _largest_remainder_repair(real, q_total)
    for i in range(n):
        if blocks[i] < 1:
            raise AllocationError("cannot keep every hop at blocklength >= 1")
    e2e = _end_to_end_rate(blocks, rates)
    return m, Allocation(blocks, list(rates), e2e, Method.INFO_CONTINUOUS,
                         real_blocklengths=real)


def rate_policy_scale(capacities: list[float], target_rate: float) -> list[float]:
    """Capacity-proportional per-hop rates hitting a target end-to-end rate.

    R_n = beta * I_n with beta = target / network capacity; requires the
    target not to exceed the network capacity 1/sum(1/I_n).
    """
    if target_rate <= 0:
        raise AllocationError("target rate must be positive")
    share = optimal_time_share(capacities)
    if target_rate > share.network_rate:
        raise AllocationError(
            f"target rate {target_rate} exceeds network capacity {share.network_rate}")
    beta = target_rate / share.network_rate
    return [beta * c for c in capacities]

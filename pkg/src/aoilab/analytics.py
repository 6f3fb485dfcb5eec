"""Closed-form performance of threshold scheduling on the Bernoulli/erasure link.

Everything here is a pure function of :class:`~aoilab.model.NetworkParams`
and integer thresholds. Masses are indexed from AoI value 1, so ``masses[0]``
is ``P(AoI = 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError
from .model import NetworkParams, check_budget

# |eps + lam - 1| below this uses the recurrence instead of the closed forms
SINGULAR_TOL = 1e-9


class Source(str, Enum):
    CLOSED_FORM = "closed_form"
    SIMULATED = "simulated"
    CMDP = "cmdp"
    LOWER_BOUND = "lower_bound"
    RANDOM_BENCHMARK = "random_benchmark"
    DOUBLE_THRESHOLD = "double_threshold"


@dataclass(frozen=True)
class TradeoffPoint:
    avg_aoi: float
    avg_cost: float
    source: Source
    label: str = ""


@dataclass(frozen=True)
class AoiPmf:
    """Receiver AoI distribution truncated at ``jmax`` with explicit tail mass."""

    delta: int
    masses: np.ndarray
    tail_mass: float
    beta: float

    @property
    def jmax(self) -> int:
        return len(self.masses)

    def mean(self) -> float:
        """Mean AoI including a geometric estimate of the truncated tail."""
        j = np.arange(1, self.jmax + 1)
        head = float(np.dot(j, self.masses))
        if self.tail_mass <= 0.0:
            return head
        # tail spread geometrically beyond jmax with the empirical last-step ratio
        last, prev = self.masses[-1], self.masses[-2] if self.jmax > 1 else 0.0
        r = last / prev if prev > 0 else 0.0
        r = min(max(r, 0.0), 1.0 - 1e-12)
        return head + self.tail_mass * (self.jmax + 1.0 / (1.0 - r))

    def upper_tail(self, start: int) -> float:
        """P(AoI >= start), tail mass included."""
        if start <= 1:
            return 1.0
        return float(self.masses[start - 1:].sum()) + self.tail_mass


@dataclass(frozen=True)
class MixedThreshold:
    """Two adjacent thresholds whose mixture spends exactly the budget.

    ``q`` is the weight on ``delta_low`` under linear cost interpolation.
    ``boundary_q`` is the per-slot transmit probability in the boundary state
    ``gap == delta_low`` that makes the boundary-randomized policy spend the
    budget exactly; this is the value a simulated mixed policy should use.
    """

    delta_low: int
    delta_high: int
    q: float
    boundary_q: float

    @property
    def randomized(self) -> bool:
        return self.delta_low != self.delta_high and 0.0 < self.q < 1.0


def _decay_rate(params: NetworkParams) -> float:
    return max(params.epsilon, 1.0 - params.lam)


def default_jmax(params: NetworkParams, delta: int) -> int:
    r = max(_decay_rate(params), 1e-3)
    return int(delta) + int(math.ceil(60.0 / -math.log(r)))


def _is_singular(params: NetworkParams) -> bool:
    return abs(params.epsilon + params.lam - 1.0) < SINGULAR_TOL


def _power(base: float, n: int) -> float:
    # log space keeps huge thresholds from underflowing through repeated products
    if n > 64 and base > 0.0:
        return math.exp(n * math.log(base))
    return base ** n


def p_empty(params: NetworkParams) -> float:
    """Long-run probability that the buffer is empty under pLGFS (or any δ <= 1)."""
    lam, eps = params.lam, params.epsilon
    return (1 - eps) * (1 - lam) / (1 - eps + eps * lam)


def beta(params: NetworkParams, delta: int) -> float:
    lam, eps = params.lam, params.epsilon
    d = 1 - eps + lam * eps
    x = _power((1 - lam) * eps, delta)
    return delta + eps / (1 - eps) + (1 - eps) * (1 - lam) / (d * lam) + x / d


def _check_delta(delta: int) -> int:
    if int(delta) != delta or delta < 0:
        raise DomainError(f"threshold must be a non-negative integer, got {delta!r}")
    return int(delta)


def aoi_pmf(params: NetworkParams, delta: int, jmax: Optional[int] = None) -> AoiPmf:
    """AoI distribution of the single threshold policy in closed form.

    Falls back to :func:`pmf_recurrence_oracle` on the line eps + lam = 1 where
    the j > delta branch is 0/0.
    """
    delta = _check_delta(delta)
    if jmax is None:
        jmax = default_jmax(params, delta)
    if jmax < delta + 1:
        raise DomainError(f"jmax={jmax} must be at least delta + 1 = {delta + 1}")
    if _is_singular(params):
        return pmf_recurrence_oracle(params, delta, jmax)

    lam, eps = params.lam, params.epsilon
    b = beta(params, delta)
    j = np.arange(1, jmax + 1, dtype=float)
    masses = np.empty(jmax)
    low = j <= delta
    masses[low] = (1 - (1 - lam) ** j[low] * eps ** j[low]) / b
    jh = j[~low]
    num = (
        lam * eps ** (jh - delta + 1)
        - lam * _power(eps, delta) * (1 - lam) ** jh
        + (1 - eps) * _power(1 - lam, delta) * eps ** jh
        - (1 - eps) * (1 - lam) ** (jh - delta + 1)
    )
    masses[~low] = num / (b * (eps + lam - 1))
    np.clip(masses, 0.0, 1.0, out=masses)
    tail = max(0.0, 1.0 - float(masses.sum()))
    return AoiPmf(delta, masses, tail, b)


def _geometric_tail(values: np.ndarray) -> float:
    """Sum beyond the end of a geometrically decaying sequence."""
    if len(values) < 2 or values[-2] <= 0.0:
        return 0.0
    r = values[-1] / values[-2]
    if not 0.0 <= r < 1.0:
        return 0.0
    return float(values[-1] * r / (1.0 - r))


def pmf_recurrence_oracle(
    params: NetworkParams,
    delta: int,
    jmax: Optional[int] = None,
    tol: float = 1e-13,
    max_iter: int = 10_000,
) -> AoiPmf:
    """Solve the two-case renewal recurrence for the AoI PMF numerically.

    Given the activation probability P_Delta = P(AoI >= delta), each P_j follows
    from the smaller ones; P_Delta itself is found by fixed-point iteration of
    the normalized map.
    """
    delta = _check_delta(delta)
    if jmax is None:
        jmax = default_jmax(params, delta)
    if jmax < delta + 1:
        raise DomainError(f"jmax={jmax} must be at least delta + 1 = {delta + 1}")
    lam, eps = params.lam, params.epsilon

    m = np.arange(1, jmax + 1, dtype=float)
    inter = lam * (1 - lam) ** (m - 1)  # last arrival exactly m slots back
    erased = inter * eps ** m  # ... and m attempts all erased

    def solve(p_delta: float) -> np.ndarray:
        p = np.zeros(jmax + 1)  # p[0] unused
        for j in range(1, jmax + 1):
            val = p_delta * inter[j - 1] * (1 - eps ** j)
            if j > 1:
                ages = np.arange(j - 1, 0, -1)  # j - m for m = 1..j-1
                w = np.where(ages < delta, inter[: j - 1], erased[: j - 1])
                val += float(np.dot(w, p[ages]))
            p[j] = val
        return p[1:]

    p_delta = 1.0
    for iteration in range(1, max_iter + 1):
        raw = solve(p_delta)
        total = raw.sum() + _geometric_tail(raw)
        if not total > 0.0:
            raise ConvergenceError("recurrence produced no probability mass")
        masses = raw / total
        tail = max(0.0, 1.0 - float(masses.sum()))
        new = float(masses[max(delta, 1) - 1:].sum()) + tail
        if abs(new - p_delta) < tol:
            break
        p_delta = new
    else:
        raise ConvergenceError(f"P_Delta fixed point not reached in {max_iter} iterations")
    return AoiPmf(delta, masses, tail, beta(params, delta))


def avg_aoi_closed(params: NetworkParams, delta: int) -> float:
    """Long-term average receiver AoI of the single threshold policy."""
    delta = _check_delta(delta)
    if _is_singular(params):
        return pmf_recurrence_oracle(params, delta).mean()
    lam, eps = params.lam, params.epsilon
    b = beta(params, delta)
    x = _power(eps, delta) * _power(1 - lam, delta)
    d = 1 - eps + lam * eps
    s = eps + lam - 1
    inner = (
        delta * (delta + 1) / 2
        - (1 - lam) * eps / d ** 2 * (1 - x)
        + lam * eps ** 2 / ((1 - eps) ** 2 * s)
        - (1 - eps) * (1 - lam) ** 2 / (s * lam ** 2)
        + x / ((1 - eps) * lam)
    )
    lin = (lam * eps + (1 - eps) * (1 - lam)) / ((1 - eps) * lam) + x / d
    return inner / b + delta / b * lin


def avg_cost_closed(params: NetworkParams, delta: int) -> float:
    """Long-term fraction of slots with a transmission."""
    delta = _check_delta(delta)
    return 1.0 / ((1 - params.epsilon) * beta(params, delta))


def plgfs_metrics(params: NetworkParams) -> TradeoffPoint:
    lam, eps = params.lam, params.epsilon
    return TradeoffPoint(
        1 / lam + eps / (1 - eps), lam / (1 - (1 - lam) * eps), Source.CLOSED_FORM, "plgfs"
    )


def gaw_metrics(epsilon: float, delta: int) -> TradeoffPoint:
    """Optimal generate-at-will tradeoff point for threshold ``delta >= 1``."""
    if not 0.0 <= epsilon < 1.0:
        raise DomainError(f"erasure probability must lie in [0, 1), got {epsilon}")
    if int(delta) != delta or delta < 1:
        raise DomainError(f"generate-at-will threshold must be >= 1, got {delta!r}")
    eps = epsilon
    k = delta * (1 - eps) + eps
    aoi = (k ** 2 + eps) / (2 * (1 - eps) * k) + 0.5
    return TradeoffPoint(aoi, 1 / k, Source.CLOSED_FORM, f"gaw:{int(delta)}")


def lower_bound(params: NetworkParams, eta_max: float) -> float:
    """AoI floor of any policy whose average cost is at most ``eta_max``."""
    eta_max = check_budget(eta_max)
    return 0.5 * (1.0 / min(params.lam, eta_max * (1 - params.epsilon)) + 1.0)


def deterministic_threshold(params: NetworkParams, eta_max: float) -> int:
    """Smallest threshold whose cost fits in the budget."""
    eta_max = check_budget(eta_max)
    if avg_cost_closed(params, 0) <= eta_max:
        return 0
    lam, eps = params.lam, params.epsilon
    d = 1 - eps + lam * eps
    # beta(delta) >= 1/((1-eps) eta_max) and the X/d term is at most 1/d
    target = 1.0 / ((1 - eps) * eta_max)
    start = target - eps / (1 - eps) - (1 - eps) * (1 - lam) / (d * lam) - 1.0 / d
    delta = max(1, int(math.floor(start)) - 1)
    while avg_cost_closed(params, delta) > eta_max:
        delta += 1
    while delta > 1 and avg_cost_closed(params, delta - 1) <= eta_max:
        delta -= 1
    return delta


def select_threshold(params: NetworkParams, eta_max: float) -> MixedThreshold:
    """Pair of thresholds and mixing weights that exactly spend ``eta_max``."""
    eta_max = check_budget(eta_max)
    delta_high = deterministic_threshold(params, eta_max)
    if delta_high <= 1:
        return MixedThreshold(0, 0, 1.0, 1.0)
    delta_low = delta_high - 1
    eta_low = avg_cost_closed(params, delta_low)
    eta_high = avg_cost_closed(params, delta_high)
    q = min(1.0, max(0.0, (eta_max - eta_high) / (eta_low - eta_high)))
    if q in (0.0, 1.0):
        bq = q
    else:
        bq = brentq(
            lambda x: boundary_threshold_metrics(params, delta_low, x)[1] - eta_max,
            0.0,
            1.0,
            xtol=1e-14,
            rtol=1e-14,
        )
    return MixedThreshold(delta_low, delta_high, q, float(bq))


def boundary_threshold_pmf(
    params: NetworkParams, delta: int, q: float, jmax: Optional[int] = None
) -> AoiPmf:
    """AoI PMF when the boundary state ``gap == delta`` transmits with probability q per slot.

    Gaps above ``delta`` always transmit and gaps below never do, so q = 1 is
    threshold ``delta`` and q = 0 is threshold ``delta + 1``.
    """
    delta = _check_delta(delta)
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"boundary probability must lie in [0, 1], got {q}")
    if jmax is None:
        jmax = default_jmax(params, delta + 1)
    lam, eps = params.lam, params.epsilon
    s_bd = q * (1 - eps)  # per-slot delivery probability in the boundary state

    m = np.arange(1, jmax + 1, dtype=float)
    inter = lam * (1 - lam) ** (m - 1)
    keep = {  # P(undelivered after m slots) by activation class
        "idle": inter,
        "boundary": inter * (1 - s_bd) ** m,
        "active": inter * eps ** m,
    }

    def basis(a_weight: float, b_weight: float) -> np.ndarray:
        p = np.zeros(jmax + 1)
        for j in range(1, jmax + 1):
            val = inter[j - 1] * (a_weight * (1 - eps ** j) + b_weight * (1 - (1 - s_bd) ** j))
            if j > 1:
                ages = np.arange(j - 1, 0, -1)
                w = np.where(
                    ages < delta,
                    keep["idle"][: j - 1],
                    np.where(ages == delta, keep["boundary"][: j - 1], keep["active"][: j - 1]),
                )
                val += float(np.dot(w, p[ages]))
            p[j] = val
        return p[1:]

    a = basis(1.0, 0.0)
    if delta >= 1:
        b = basis(0.0, 1.0)
        # P(gap == delta) must reproduce itself: B = A a_delta + B b_delta
        weight_b = a[delta - 1] / (1.0 - b[delta - 1])
        raw = a + weight_b * b
    else:
        raw = a
    total = raw.sum() + _geometric_tail(raw)
    masses = raw / total
    tail = max(0.0, 1.0 - float(masses.sum()))
    return AoiPmf(delta, masses, tail, float("nan"))


def boundary_threshold_metrics(params: NetworkParams, delta: int, q: float) -> tuple[float, float]:
    """(average AoI, average cost) of the boundary-randomized threshold policy."""
    pmf = boundary_threshold_pmf(params, delta, q)
    lam, eps = params.lam, params.epsilon
    if delta >= 1:
        p_boundary = float(pmf.masses[delta - 1])
        p_active = pmf.upper_tail(delta + 1)
    else:
        p_boundary, p_active = 0.0, 1.0
    cost = lam * (
        p_active / (1 - (1 - lam) * eps) + p_boundary * q / (1 - (1 - lam) * (1 - q * (1 - eps)))
    )
    return pmf.mean(), cost


def random_benchmark(params: NetworkParams, eta_max: float) -> tuple[float, TradeoffPoint]:
    """Feedback-free benchmark: transmit with probability gamma whenever occupied."""
    eta_max = check_budget(eta_max)
    lam, eps = params.lam, params.epsilon
    if eta_max >= plgfs_metrics(params).avg_cost:
        gamma = 1.0
    else:
        gamma = eta_max * lam / (lam - eta_max * (1 - lam) * (1 - eps))
    if not 0.0 < gamma <= 1.0:
        raise DomainError(f"transmit probability {gamma} outside (0, 1]")
    eff = 1 - gamma * (1 - eps)
    aoi = 1 / lam + eff / (1 - eff)
    cost = gamma * lam / (1 - (1 - lam) * eff)
    return gamma, TradeoffPoint(aoi, cost, Source.RANDOM_BENCHMARK, f"random:{gamma:.9g}")


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())

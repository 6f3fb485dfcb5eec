"""Slot-by-slot Monte Carlo engine for the single-buffer erasure link.

Slot ``i`` runs in a fixed order: arrival (preempting any buffered packet),
policy decision on ``(delta_t(i), delta_r(i-1), occupancy)``, transmission
over the erasure channel, then the receiver AoI update. Each slot consumes
exactly three uniforms from the counter-based stream in :mod:`aoilab.rng`
(arrival, channel, policy) whether or not they are needed, so two policies
run with the same seed see the same arrivals and channel realizations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numba import njit

from .analytics import AoiPmf, total_variation
from .errors import DomainError
from .model import Action, LinkState, NetworkParams
from .policies import PolicySpec, decide, decide_kernel
from .rng import MASK64, uniform_nb

DEFAULT_BATCHES = 50


@dataclass(frozen=True)
class SimConfig:
    params: NetworkParams
    policy: PolicySpec
    slots: int
    seed: int = 0
    record_trace: bool = False
    pmf_cap: Optional[int] = None

    def __post_init__(self) -> None:
        if int(self.slots) != self.slots or self.slots < 1:
            raise DomainError(f"slots must be a positive integer, got {self.slots!r}")
        object.__setattr__(self, "seed", int(self.seed) & MASK64)
        if self.pmf_cap is None:
            lam, eps = self.params.lam, self.params.epsilon
            cap = 10 * (self.policy.nominal_threshold() + 1 / lam + 1 / (1 - eps))
            object.__setattr__(self, "pmf_cap", int(math.ceil(cap)))
        elif int(self.pmf_cap) != self.pmf_cap or self.pmf_cap < 1:
            raise DomainError(f"pmf_cap must be a positive integer, got {self.pmf_cap!r}")


@dataclass
class Trace:
    """Per-slot record of a run; ``occupied`` is the pre-decision occupancy."""

    slot: np.ndarray
    delta_t: np.ndarray
    delta_r: np.ndarray
    action: np.ndarray
    success: np.ndarray
    occupied: np.ndarray

    def __len__(self) -> int:
        return len(self.slot)

    @property
    def delta_r_prev(self) -> np.ndarray:
        """Receiver AoI at the end of the previous slot (delta_r(0) = 0)."""
        return np.concatenate(([0], self.delta_r[:-1]))

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("# slot\tdelta_t\tdelta_r\taction\tsuccess\toccupied\n")
            cols = (self.slot, self.delta_t, self.delta_r, self.action, self.success, self.occupied)
            for row in zip(*(c.tolist() for c in cols)):
                fh.write("\t".join(str(int(v)) for v in row))
                fh.write("\n")


@dataclass
class SimStats:
    avg_aoi: float
    avg_cost: float
    throughput: float
    empirical_pmf: np.ndarray  # counts for AoI 1..pmf_cap, then one overflow bucket
    empty_buffer_freq: float
    slots: int
    seed: int
    aoi_stderr: float = float("nan")
    cost_stderr: float = float("nan")
    trace: Optional[Trace] = field(default=None, repr=False)

    @property
    def pmf_cap(self) -> int:
        return len(self.empirical_pmf) - 1

    def frequencies(self) -> np.ndarray:
        return self.empirical_pmf / self.slots


@dataclass(frozen=True)
class SlotRecord:
    decision: LinkState
    action: Action
    success: bool
    delta_r: int


def step(
    state: LinkState,
    params: NetworkParams,
    spec: PolicySpec,
    arrival_draw: float,
    channel_draw: float,
    policy_draw: float,
) -> tuple[LinkState, SlotRecord]:
    """Advance one slot from the state carried at the end of slot ``state.slot``."""
    i = state.slot + 1
    if arrival_draw < params.lam:
        g, dt, occupied = i, 0, True
    else:
        g, dt, occupied = state.g_latest, i - state.g_latest, state.buffer_occupied
    decision = LinkState(i, dt, state.delta_r_prev, occupied, g, state.u_latest)
    action = decide(spec, decision, policy_draw)
    success = bool(action) and channel_draw >= params.epsilon
    if success:
        delta_r, u, occupied = dt + 1, g, False
    else:
        delta_r, u = state.delta_r_prev + 1, state.u_latest
    return LinkState(i, dt, delta_r, occupied, g, u), SlotRecord(decision, action, success, delta_r)


@njit(cache=True, nogil=True)
def _simulate(lam, eps, kind, delta, q, delta1, delta2, gamma, slots, seed, pmf_cap, record, n_batches):
    hist = np.zeros(pmf_cap + 1, np.int64)
    batch_aoi = np.zeros(n_batches, np.int64)
    batch_tx = np.zeros(n_batches, np.int64)
    n_trace = slots if record else 0
    tr_dt = np.zeros(n_trace, np.int64)
    tr_dr = np.zeros(n_trace, np.int64)
    tr_a = np.zeros(n_trace, np.int8)
    tr_s = np.zeros(n_trace, np.int8)
    tr_o = np.zeros(n_trace, np.int8)

    g = 0
    dt = 0
    dr = 0
    occupied = False
    sum_aoi = 0
    n_tx = 0
    n_success = 0
    n_empty = 0
    for i in range(1, slots + 1):
        base = np.uint64(3) * np.uint64(i - 1)
        u_arr = uniform_nb(seed, base)
        u_ch = uniform_nb(seed, base + np.uint64(1))
        u_pol = uniform_nb(seed, base + np.uint64(2))

        if u_arr < lam:
            g = i
            dt = 0
            occupied = True
        else:
            dt = i - g
        occ_pre = occupied
        if not occupied:
            n_empty += 1
        a = decide_kernel(kind, delta, q, delta1, delta2, gamma, dt, dr, occupied, u_pol)
        ok = a == 1 and u_ch >= eps
        if ok:
            dr = dt + 1
            occupied = False
            n_success += 1
        else:
            dr = dr + 1

        b = ((i - 1) * n_batches) // slots
        sum_aoi += dr
        batch_aoi[b] += dr
        n_tx += a
        batch_tx[b] += a
        if dr <= pmf_cap:
            hist[dr - 1] += 1
        else:
            hist[pmf_cap] += 1
        if record:
            tr_dt[i - 1] = dt
            tr_dr[i - 1] = dr
            tr_a[i - 1] = a
            tr_s[i - 1] = 1 if ok else 0
            tr_o[i - 1] = 1 if occ_pre else 0
    return sum_aoi, n_tx, n_success, n_empty, hist, batch_aoi, batch_tx, tr_dt, tr_dr, tr_a, tr_s, tr_o


def _batch_stderr(batch_sums: np.ndarray, slots: int) -> float:
    nb = len(batch_sums)
    if nb < 2:
        return float("nan")
    edges = (np.arange(nb + 1) * slots + nb - 1) // nb
    lengths = np.diff(edges)
    if (lengths == 0).any():
        return float("nan")
    means = batch_sums / lengths
    return float(np.std(means, ddof=1) / math.sqrt(nb))


def run(config: SimConfig, n_batches: int = DEFAULT_BATCHES) -> SimStats:
    """Simulate ``config.slots`` slots; deterministic in ``(config, seed)``."""
    p = config.params
    kind, delta, q, d1, d2, gamma = config.policy.kernel_args()
    n_batches = max(1, min(n_batches, config.slots))
    (sum_aoi, n_tx, n_success, n_empty, hist, b_aoi, b_tx,
     tr_dt, tr_dr, tr_a, tr_s, tr_o) = _simulate(
        p.lam, p.epsilon, kind, delta, q, d1, d2, gamma,
        config.slots, np.uint64(config.seed), config.pmf_cap, config.record_trace, n_batches,
    )
    T = config.slots
    trace = None
    if config.record_trace:
        trace = Trace(np.arange(1, T + 1), tr_dt, tr_dr, tr_a, tr_s, tr_o)
    return SimStats(
        avg_aoi=sum_aoi / T,
        avg_cost=n_tx / T,
        throughput=n_success / T,
        empirical_pmf=hist,
        empty_buffer_freq=n_empty / T,
        slots=T,
        seed=config.seed,
        aoi_stderr=_batch_stderr(b_aoi, T),
        cost_stderr=_batch_stderr(b_tx, T),
        trace=trace,
    )


def empirical_vs_analytical(stats: SimStats, pmf: AoiPmf) -> float:
    """Total variation between simulated AoI frequencies and an analytical PMF.

    Both sides are folded to the common cap ``min(pmf_cap, jmax)``; the
    overflow bucket is compared against the analytical mass beyond the cap.
    """
    counts = np.asarray(stats.empirical_pmf)
    if counts.ndim != 1 or len(counts) < 2 or counts.sum() != stats.slots:
        raise DomainError("empirical histogram does not cover the simulated slots")
    cap = min(len(counts) - 1, pmf.jmax)
    emp = np.empty(cap + 1)
    emp[:cap] = counts[:cap] / stats.slots
    emp[cap] = counts[cap:].sum() / stats.slots
    ana = np.empty(cap + 1)
    ana[:cap] = pmf.masses[:cap]
    ana[cap] = pmf.masses[cap:].sum() + pmf.tail_mass
    return total_variation(emp, ana)

"""Constrained-MDP baseline on a truncated (delta_t, delta_r) state space.

A state is the pre-decision pair ``(delta_t(i), delta_r(i-1))``; both ages
saturate at their caps. Transitions are the simulator's slot dynamics: the
action resolves against the erasure channel first, the next slot's arrival
then resets ``delta_t``. The stage reward is ``-delta_r(i) - mu * a_i``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, TextIO

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import spsolve

from .errors import CapacityError, ConvergenceError, DomainError, NondegeneracyError
from .model import NetworkParams, check_budget

log = logging.getLogger(__name__)

DEFAULT_DT_CAP = 60
DEFAULT_DR_CAP = 400
DEFAULT_MAX_STATES = 2_000_000
CAP_BAND = 5
CAP_MASS_WARN = 1e-6
TIE_MARGIN = 1e-9


@dataclass
class TruncatedMdp:
    params: NetworkParams
    dt_cap: int
    dr_cap: int
    delta_t: np.ndarray
    delta_r: np.ndarray
    index: np.ndarray  # index[t, r] -> state id, -1 when excluded
    occupied: np.ndarray
    p_silent: sp.csr_matrix
    p_transmit: sp.csr_matrix  # equals p_silent on empty-buffer states
    aoi_silent: np.ndarray  # expected delta_r(i) given the action
    aoi_transmit: np.ndarray

    @property
    def n_states(self) -> int:
        return len(self.delta_t)

    def state_id(self, delta_t: int, delta_r: int) -> int:
        return int(self.index[delta_t, delta_r])

    def threshold_policy(self, delta: int) -> np.ndarray:
        """Action table of the single threshold policy."""
        return self.occupied & (self.delta_r - self.delta_t >= delta)

    def always_transmit(self) -> np.ndarray:
        return self.occupied.copy()

    def never_transmit(self) -> np.ndarray:
        return np.zeros(self.n_states, dtype=bool)

    def near_cap(self) -> np.ndarray:
        return (self.delta_t > self.dt_cap - CAP_BAND) | (self.delta_r > self.dr_cap - CAP_BAND)


def build_mdp(
    params: NetworkParams,
    dt_cap: int = DEFAULT_DT_CAP,
    dr_cap: int = DEFAULT_DR_CAP,
    max_states: int = DEFAULT_MAX_STATES,
) -> TruncatedMdp:
    if not 1 <= dt_cap <= dr_cap:
        raise DomainError(f"caps must satisfy 1 <= dt_cap <= dr_cap, got {dt_cap}/{dr_cap}")
    tt, rr = np.meshgrid(np.arange(dt_cap + 1), np.arange(dr_cap + 1), indexing="ij")
    keep = (rr >= tt) & (rr >= 1)
    n = int(keep.sum())
    if n > max_states:
        raise CapacityError(f"{n} states exceed the limit of {max_states}")
    t, r = tt[keep], rr[keep]
    index = np.full((dt_cap + 1, dr_cap + 1), -1, dtype=np.int64)
    index[t, r] = np.arange(n)
    occupied = r - t >= 1

    lam, eps = params.lam, params.epsilon
    t_next = np.minimum(t + 1, dt_cap)
    r_fail = np.minimum(r + 1, dr_cap)
    r_ok = np.minimum(t + 1, dr_cap)
    ids = np.arange(n)

    def kernel(branches) -> sp.csr_matrix:
        rows, cols, vals = [], [], []
        for prob, r_new in branches:
            for p_arr, t_new in ((lam, np.zeros_like(t)), (1 - lam, t_next)):
                w = prob * p_arr
                mask = w > 0
                rows.append(ids[mask])
                cols.append(index[t_new[mask], r_new[mask]])
                vals.append(np.broadcast_to(w, ids.shape)[mask])
        return sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
        )

    p_silent = kernel([(np.ones(n), r_fail)])
    ok = np.where(occupied, 1 - eps, 0.0)
    p_transmit = kernel([(ok, r_ok), (1 - ok, r_fail)])
    aoi_silent = r_fail.astype(float)
    aoi_transmit = ok * r_ok + (1 - ok) * r_fail
    return TruncatedMdp(
        params, dt_cap, dr_cap, t, r, index, occupied,
        p_silent, p_transmit, aoi_silent, aoi_transmit,
    )


class PolicyValue(NamedTuple):
    avg_aoi: float
    avg_cost: float
    cap_mass: float
    distribution: np.ndarray


def _policy_kernel(mdp: TruncatedMdp, policy: np.ndarray) -> sp.csr_matrix:
    tx = sp.diags(policy.astype(float))
    silent = sp.diags((~policy).astype(float))
    return (tx @ mdp.p_transmit + silent @ mdp.p_silent).tocsr()


def stationary_distribution(
    P: sp.csr_matrix, residual_tol: float = 1e-12, max_iter: int = 200_000
) -> np.ndarray:
    """Stationary distribution of a unichain stochastic matrix.

    The unique closed class is located from the strongly connected components
    and transient states receive zero mass. Power iteration runs on the lazy
    chain ``(I + P) / 2`` (same fixed point, always aperiodic); a sparse direct
    solve takes over if it stalls.
    """
    n = P.shape[0]
    _, labels = connected_components(P, directed=True, connection="strong")
    coo = P.tocoo()
    leaving = (labels[coo.row] != labels[coo.col]) & (coo.data > 0)
    closed = np.setdiff1d(np.unique(labels), np.unique(labels[coo.row[leaving]]))
    if len(closed) != 1:
        raise NondegeneracyError(f"policy chain has {len(closed)} closed classes")
    members = np.flatnonzero(labels == closed[0])
    PT = P.T.tocsr()
    pi = np.zeros(n)
    pi[members] = 1.0 / len(members)
    for it in range(max_iter):
        nxt = PT @ pi
        if it % 10 == 0:
            resid = np.abs(nxt - pi).sum()
            if resid < residual_tol:
                return pi
        pi = 0.5 * (pi + nxt)
    pi = _direct_stationary(P, members)
    resid = np.abs(PT @ pi - pi).sum()
    if not resid < residual_tol:
        raise ConvergenceError(f"stationary residual {resid:.3g} above {residual_tol:g}")
    return pi


def _direct_stationary(P: sp.csr_matrix, members: np.ndarray) -> np.ndarray:
    pi = np.zeros(P.shape[0])
    if len(members) == 1:
        pi[members[0]] = 1.0
        return pi
    sub = P[members][:, members]
    rest = np.arange(1, len(members))  # pin the first member's mass to 1
    a = (sp.eye(len(rest)) - sub[rest][:, rest]).T.tocsc()
    b = np.asarray(sub[0, rest].todense()).ravel()
    x = np.atleast_1d(spsolve(a, b, permc_spec="MMD_AT_PLUS_A"))
    vals = np.clip(np.concatenate(([1.0], x)), 0.0, None)
    pi[members] = vals / vals.sum()
    return pi


def evaluate_policy(mdp: TruncatedMdp, policy: np.ndarray) -> PolicyValue:
    """Exact long-run AoI and cost of a deterministic action table."""
    policy = np.asarray(policy, dtype=bool)
    if policy.shape != (mdp.n_states,):
        raise DomainError("policy must assign an action to every state")
    policy = policy & mdp.occupied
    pi = stationary_distribution(_policy_kernel(mdp, policy))
    aoi = float(np.dot(pi, np.where(policy, mdp.aoi_transmit, mdp.aoi_silent)))
    cost = float(np.dot(pi, policy))
    cap_mass = float(pi[mdp.near_cap()].sum())
    return PolicyValue(aoi, cost, cap_mass, pi)


@dataclass
class RviaResult:
    policy: np.ndarray
    gain: float  # optimal average Lagrangian reward, -(aoi + mu * cost)
    iterations: int
    h: np.ndarray


def rvia(
    mdp: TruncatedMdp,
    mu: float,
    tol: float = 1e-9,
    max_iter: int = 200_000,
    h0: Optional[np.ndarray] = None,
    tau: float = 0.5,
) -> RviaResult:
    """Relative value iteration for the Lagrangian reward ``-delta_r - mu * a``.

    Runs on the aperiodic transform ``tau * P + (1 - tau) * I`` and stops when
    the span of ``T h - h`` falls below ``tol``. Exact ties go to silence.
    """
    if mu < 0:
        raise DomainError(f"multiplier must be non-negative, got {mu}")
    r0 = -mdp.aoi_silent
    r1 = np.where(mdp.occupied, -mdp.aoi_transmit - mu, -np.inf)
    h = np.zeros(mdp.n_states) if h0 is None else np.array(h0, dtype=float)
    ref = mdp.state_id(0, 1)
    for it in range(1, max_iter + 1):
        q0 = r0 + mdp.p_silent @ h
        q1 = r1 + mdp.p_transmit @ h
        th = np.maximum(q0, q1)
        diff = th - h
        lo, hi = diff.min(), diff.max()
        h = h + tau * diff
        h -= h[ref]
        if hi - lo < tol:
            policy = q1 > q0 + TIE_MARGIN
            return RviaResult(policy, 0.5 * (lo + hi), it, h)
    raise ConvergenceError(f"RVIA span did not fall below {tol:g} in {max_iter} sweeps")


@dataclass
class CmdpSolution:
    policy_low: np.ndarray  # from the multiplier below the breakpoint (cost >= budget)
    policy_high: np.ndarray  # from the multiplier above it (cost <= budget)
    mix_weight: float  # weight on policy_low
    avg_aoi: float
    avg_cost: float
    multiplier: float
    iterations: int
    cap_mass: float
    low: PolicyValue
    high: PolicyValue
    mdp: TruncatedMdp


def solve_constrained(
    params: NetworkParams,
    eta_max: float,
    dt_cap: int = DEFAULT_DT_CAP,
    dr_cap: int = DEFAULT_DR_CAP,
    tol: float = 1e-6,
    mu_tol: float = 1e-6,
    rvia_tol: float = 1e-9,
    max_states: int = DEFAULT_MAX_STATES,
    mdp: Optional[TruncatedMdp] = None,
) -> CmdpSolution:
    """Minimum average AoI subject to average cost <= eta_max on the truncated chain.

    Bisection on the Lagrange multiplier brackets the budget between two
    deterministic RVIA policies; the reported point interpolates them linearly
    in cost, which is achievable by time sharing.
    """
    eta_max = check_budget(eta_max)
    if mdp is None:
        mdp = build_mdp(params, dt_cap, dr_cap, max_states)
    evals: dict[bytes, PolicyValue] = {}
    total_iter = 0

    def solve_at(mu: float, h0=None) -> tuple[RviaResult, PolicyValue]:
        nonlocal total_iter
        res = rvia(mdp, mu, rvia_tol, h0=h0)
        total_iter += res.iterations
        key = np.packbits(res.policy).tobytes()
        if key not in evals:
            evals[key] = evaluate_policy(mdp, res.policy)
        return res, evals[key]

    def finish(lo, lo_val, hi, hi_val, weight, mu) -> CmdpSolution:
        aoi = weight * lo_val.avg_aoi + (1 - weight) * hi_val.avg_aoi
        cost = weight * lo_val.avg_cost + (1 - weight) * hi_val.avg_cost
        cap = max(lo_val.cap_mass, hi_val.cap_mass)
        if cap > CAP_MASS_WARN:
            log.warning("stationary mass %.3g within %d states of the caps; enlarge them", cap, CAP_BAND)
        return CmdpSolution(lo.policy, hi.policy, weight, aoi, cost, mu, total_iter, cap, lo_val, hi_val, mdp)

    res0, val0 = solve_at(0.0)
    if val0.avg_cost <= eta_max + tol:
        return finish(res0, val0, res0, val0, 1.0, 0.0)

    mu_hi = float(dr_cap)
    res_hi, val_hi = solve_at(mu_hi, res0.h)
    for _ in range(64):
        if val_hi.avg_cost <= eta_max:
            break
        mu_hi *= 2
        res_hi, val_hi = solve_at(mu_hi, res_hi.h)
    else:
        raise ConvergenceError("no multiplier brings the cost under the budget")

    mu_lo, res_lo, val_lo = 0.0, res0, val0
    while mu_hi - mu_lo > mu_tol:
        if abs(val_hi.avg_cost - eta_max) <= tol:
            return finish(res_hi, val_hi, res_hi, val_hi, 1.0, mu_hi)
        mid = 0.5 * (mu_lo + mu_hi)
        res, val = solve_at(mid, res_hi.h)
        if val.avg_cost > eta_max:
            mu_lo, res_lo, val_lo = mid, res, val
        else:
            mu_hi, res_hi, val_hi = mid, res, val

    span = val_lo.avg_cost - val_hi.avg_cost
    weight = 1.0 if span <= 0 else (eta_max - val_hi.avg_cost) / span
    weight = min(1.0, max(0.0, weight))
    return finish(res_lo, val_lo, res_hi, val_hi, weight, 0.5 * (mu_lo + mu_hi))


def write_policy_csv(
    fh: TextIO, mdp: TruncatedMdp, policy: np.ndarray, mu: float, header: Optional[list[str]] = None
) -> None:
    p = mdp.params
    for line in header or []:
        fh.write(f"# {line}\n")
    fh.write(
        f"# lambda={p.lam:.9g} epsilon={p.epsilon:.9g} mu={mu:.9g} "
        f"dt_cap={mdp.dt_cap} dr_cap={mdp.dr_cap}\n"
    )
    fh.write("delta_t,delta_r,action\n")
    for t, r, a in zip(mdp.delta_t.tolist(), mdp.delta_r.tolist(), np.asarray(policy).tolist()):
        fh.write(f"{t},{r},{int(a)}\n")

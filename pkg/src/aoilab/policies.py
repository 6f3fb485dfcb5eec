"""Scheduling decision rules.

Every policy is a pure function of the pre-decision :class:`LinkState` and
one uniform draw supplied by the caller. The compiled :func:`decide_kernel`
is the single implementation; :func:`decide` wraps it for Python callers and
the simulator calls it directly from its slot loop.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import njit

from .errors import DomainError
from .model import Action, LinkState


class PolicyKind(str, Enum):
    PLGFS = "plgfs"
    SINGLE = "single_threshold"
    MIXED = "randomized_single_threshold"
    DOUBLE = "double_threshold"
    RANDOM = "random_transmission"


KIND_CODE = {
    PolicyKind.PLGFS: 0,
    PolicyKind.SINGLE: 1,
    PolicyKind.MIXED: 2,
    PolicyKind.DOUBLE: 3,
    PolicyKind.RANDOM: 4,
}

_TEXT_PREFIX = {
    PolicyKind.PLGFS: "plgfs",
    PolicyKind.SINGLE: "single",
    PolicyKind.MIXED: "mixed",
    PolicyKind.DOUBLE: "double",
    PolicyKind.RANDOM: "random",
}
_PREFIX_KIND = {v: k for k, v in _TEXT_PREFIX.items()}


def _nonneg_int(name: str, value) -> int:
    if value is None or int(value) != value or value < 0:
        raise DomainError(f"{name} must be a non-negative integer, got {value!r}")
    return int(value)


def _unit(name: str, value) -> float:
    if value is None or not 0.0 <= float(value) <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")
    return float(value)


@dataclass(frozen=True)
class PolicySpec:
    kind: PolicyKind
    delta: int = 0
    q: float = 1.0
    delta1: int = 0
    delta2: int = 0
    gamma: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", PolicyKind(self.kind))
        if self.kind in (PolicyKind.SINGLE, PolicyKind.MIXED):
            object.__setattr__(self, "delta", _nonneg_int("delta", self.delta))
        if self.kind is PolicyKind.MIXED:
            object.__setattr__(self, "q", _unit("q", self.q))
        if self.kind is PolicyKind.DOUBLE:
            object.__setattr__(self, "delta1", _nonneg_int("delta1", self.delta1))
            object.__setattr__(self, "delta2", _nonneg_int("delta2", self.delta2))
        if self.kind is PolicyKind.RANDOM:
            object.__setattr__(self, "gamma", _unit("gamma", self.gamma))

    # convenience constructors
    @classmethod
    def plgfs(cls) -> "PolicySpec":
        return cls(PolicyKind.PLGFS)

    @classmethod
    def single(cls, delta: int) -> "PolicySpec":
        return cls(PolicyKind.SINGLE, delta=delta)

    @classmethod
    def mixed(cls, delta: int, q: float) -> "PolicySpec":
        return cls(PolicyKind.MIXED, delta=delta, q=q)

    @classmethod
    def double(cls, delta1: int, delta2: int) -> "PolicySpec":
        return cls(PolicyKind.DOUBLE, delta1=delta1, delta2=delta2)

    @classmethod
    def random(cls, gamma: float) -> "PolicySpec":
        return cls(PolicyKind.RANDOM, gamma=gamma)

    def kernel_args(self) -> tuple[int, int, float, int, int, float]:
        return (KIND_CODE[self.kind], self.delta, self.q, self.delta1, self.delta2, self.gamma)

    def nominal_threshold(self) -> int:
        """Largest age gap the policy may wait for; used to size histograms."""
        if self.kind is PolicyKind.SINGLE:
            return self.delta
        if self.kind is PolicyKind.MIXED:
            return self.delta + 1
        if self.kind is PolicyKind.DOUBLE:
            return self.delta2
        return 0

    def __str__(self) -> str:
        return format_policy(self)


def format_policy(spec: PolicySpec) -> str:
    prefix = _TEXT_PREFIX[spec.kind]
    if spec.kind is PolicyKind.SINGLE:
        return f"{prefix}:{spec.delta}"
    if spec.kind is PolicyKind.MIXED:
        return f"{prefix}:{spec.delta}:{spec.q:.9g}"
    if spec.kind is PolicyKind.DOUBLE:
        return f"{prefix}:{spec.delta1}:{spec.delta2}"
    if spec.kind is PolicyKind.RANDOM:
        return f"{prefix}:{spec.gamma:.9g}"
    return prefix


def parse_policy(text: str) -> PolicySpec:
    """Parse the canonical text form, e.g. ``single:5`` or ``mixed:4:0.116``."""
    parts = text.strip().split(":")
    kind = _PREFIX_KIND.get(parts[0].lower())
    if kind is None:
        raise DomainError(f"unknown policy {text!r}")
    arity = {
        PolicyKind.PLGFS: 0,
        PolicyKind.SINGLE: 1,
        PolicyKind.MIXED: 2,
        PolicyKind.DOUBLE: 2,
        PolicyKind.RANDOM: 1,
    }[kind]
    args = parts[1:]
    if len(args) != arity:
        raise DomainError(f"policy {text!r} expects {arity} parameter(s)")
    try:
        if kind is PolicyKind.PLGFS:
            return PolicySpec.plgfs()
        if kind is PolicyKind.SINGLE:
            return PolicySpec.single(int(args[0]))
        if kind is PolicyKind.MIXED:
            return PolicySpec.mixed(int(args[0]), float(args[1]))
        if kind is PolicyKind.DOUBLE:
            return PolicySpec.double(int(args[0]), int(args[1]))
        return PolicySpec.random(float(args[0]))
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"malformed policy {text!r}: {exc}") from None


@njit(cache=True, nogil=True)
def decide_kernel(kind, delta, q, delta1, delta2, gamma, delta_t, delta_r_prev, occupied, u):
    if not occupied:
        return 0
    gap = delta_r_prev - delta_t
    if kind == 0:
        return 1
    if kind == 1:
        return 1 if gap >= delta else 0
    if kind == 2:
        if gap >= delta + 1:
            return 1
        if gap == delta:
            return 1 if u < q else 0
        return 0
    if kind == 3:
        return 1 if (delta_t <= delta1 and gap >= delta2) else 0
    return 1 if u < gamma else 0


def decide(spec: PolicySpec, state: LinkState, uniform_draw: float) -> Action:
    code, delta, q, d1, d2, gamma = spec.kernel_args()
    return Action(
        decide_kernel(
            code, delta, q, d1, d2, gamma,
            state.delta_t, state.delta_r_prev, state.buffer_occupied, uniform_draw,
        )
    )


def decision_epochs_property(spec: PolicySpec, trace) -> bool:
    """True iff, between consecutive arrivals, the action is constant until a success.

    ``trace`` is any object with per-slot ``delta_t``, ``action`` and
    ``success`` arrays (e.g. :class:`aoilab.simulator.Trace`). Arrivals are the
    slots with ``delta_t == 0``. Within one inter-arrival segment a policy with
    fixed decision epochs either stays silent, or keeps transmitting up to and
    including the delivering slot and is silent afterwards.
    """
    if (spec.kind is PolicyKind.MIXED and 0.0 < spec.q < 1.0) or (
        spec.kind is PolicyKind.RANDOM and spec.gamma < 1.0
    ):
        raise DomainError(f"{spec} is randomized; decision epochs are not fixed")
    delta_t = np.asarray(trace.delta_t)
    action = np.asarray(trace.action)
    success = np.asarray(trace.success)
    starts = np.flatnonzero(delta_t == 0)
    bounds = np.concatenate(([0], starts, [len(action)]))
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if hi <= lo:
            continue
        seg_a = action[lo:hi]
        if seg_a[0] == 0:
            if seg_a.any():
                return False
            continue
        hits = np.flatnonzero(success[lo:hi])
        stop = hits[0] + 1 if len(hits) else len(seg_a)
        if not seg_a[:stop].all() or seg_a[stop:].any():
            return False
    return True

"""Core domain types of the slotted link: parameters, per-slot state and actions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional

from .errors import DomainError


@dataclass(frozen=True)
class NetworkParams:
    """Physics of one experiment.

    lam is the Bernoulli arrival rate per slot, epsilon the erasure probability
    of a single transmission and eta_max an optional long-term budget on the
    fraction of slots spent transmitting.
    """

    lam: float
    epsilon: float
    eta_max: Optional[float] = None

    def __post_init__(self) -> None:
        for name in ("lam", "epsilon", "eta_max"):
            value = getattr(self, name)
            if value is not None and not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if not 0.0 < self.lam <= 1.0:
            raise DomainError(f"arrival rate must lie in (0, 1], got {self.lam}")
        if not 0.0 <= self.epsilon < 1.0:
            raise DomainError(f"erasure probability must lie in [0, 1), got {self.epsilon}")
        if self.eta_max is not None and not 0.0 < self.eta_max <= 1.0:
            raise DomainError(f"cost budget must lie in (0, 1], got {self.eta_max}")


def validate_params(lam: float, epsilon: float, eta_max: Optional[float] = None) -> NetworkParams:
    return NetworkParams(float(lam), float(epsilon), None if eta_max is None else float(eta_max))


def check_budget(eta_max: float) -> float:
    eta_max = float(eta_max)
    if not 0.0 < eta_max <= 1.0:
        raise DomainError(f"cost budget must lie in (0, 1], got {eta_max}")
    return eta_max


@dataclass(frozen=True)
class LinkState:
    """World state of the link.

    Inside a slot record this is the pre-decision state of slot ``slot``:
    ``delta_t`` is the transmitter freshness after the arrival step and
    ``delta_r_prev`` is the receiver AoI at the end of the previous slot.
    The simulator also carries the same type between slots, where
    ``delta_r_prev`` holds the AoI at the end of slot ``slot``.
    """

    slot: int = 0
    delta_t: int = 0
    delta_r_prev: int = 0
    buffer_occupied: bool = False
    g_latest: int = 0
    u_latest: int = 0

    @property
    def age_gap(self) -> int:
        """Receiver age minus transmitter age, the quantity thresholds act on."""
        return self.delta_r_prev - self.delta_t


INITIAL_STATE = LinkState()


class Action(IntEnum):
    SILENT = 0
    TRANSMIT = 1

"""Reference trajectory: smooth ramp profile plus online replanned correction."""
from dataclasses import dataclass, replace

import numpy as np

from . import kernels


@dataclass(frozen=True)
class BezierProfile:
    """Ramp from x0 at t0 to xf at tf with vanishing derivatives up to order 3."""
    t0: float
    tf: float
    x0: float
    xf: float

    def __post_init__(self):
        if not 0.0 <= self.t0 < self.tf:
            raise ValueError(f"require 0 <= t0 < tf, got t0={self.t0}, tf={self.tf}")


@dataclass(frozen=True)
class ReplanState:
    """Direction-alternating additive correction of the reference."""
    dirn: int = 1
    y_ad: float = 0.0
    coef: float = 0.35
    upper_bound: float = 12.0
    lower_bound: float = 4.5
    feed_rate: float = 0.0  # analytic rate of the last y_ad increment

    def __post_init__(self):
        if self.dirn not in (1, -1):
            raise ValueError(f"dirn must be +1 or -1, got {self.dirn}")
        if not self.lower_bound < self.upper_bound:
            raise ValueError("require lower_bound < upper_bound")


def bezier_eval(profile: BezierProfile, t: float) -> float:
    """Reference buffer level at time t (clamped outside [t0, tf])."""
    return kernels.bezier_eval(t, profile.t0, profile.tf, profile.x0, profile.xf)


def bezier_derivative(profile: BezierProfile, t: float, order: int) -> float:
    """Analytic derivative of the ramp profile, orders 1 to 3."""
    if order not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2 or 3, got {order}")
    return kernels.bezier_derivative(t, profile.t0, profile.tf, profile.x0, profile.xf, order)


def replan_step(state: ReplanState, x_meas: float, c_est: float, ladder, Te: float) -> ReplanState:
    """One sampling-period update of the replanned correction.

    Flips the direction when the measured buffer leaves the band, re-picks
    the ladder element bracketing the bandwidth estimate, and accumulates
    the correction at rate (c_est/coef - 1).
    """
    if Te <= 0.0:
        raise ValueError("Te must be positive")
    if c_est <= 0.0:
        raise ValueError("c_est must be positive")
    rates = np.asarray(getattr(ladder, "rates", ladder), dtype=float)
    dirn = state.dirn
    if x_meas > state.upper_bound and dirn == 1:
        dirn = -1
    if x_meas < state.lower_bound and dirn == -1:
        dirn = 1
    if dirn == 1:
        coef = kernels.ladder_below(c_est, rates)
    else:
        coef = kernels.ladder_above(c_est, rates)
    rate = c_est / coef - 1.0
    return replace(state, dirn=dirn, coef=coef, y_ad=state.y_ad + rate * Te, feed_rate=rate)


def reference_at(profile: BezierProfile, state: ReplanState, k: int, Te: float,
                 replan_enabled: bool) -> tuple[float, float]:
    """Combined reference value and rate at sample k."""
    if k < 0:
        raise ValueError("sample index must be non-negative")
    t = k * Te
    ref = bezier_eval(profile, t)
    rate = bezier_derivative(profile, t, 1)
    if replan_enabled:
        ref += state.y_ad
        rate += state.feed_rate
    return ref, rate

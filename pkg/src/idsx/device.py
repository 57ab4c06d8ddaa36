"""Single-junction memristor model: linear ion drift with hard state bounds.

The device resistance interpolates between r_on (fully doped, w = d) and
r_off (fully un-doped, w = 0).  Charge through the device moves the doped
region boundary w; the state is clamped to [0, d] instead of applying a
window function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DeviceParams:
    """Memristor constants.

    r_on/r_off in ohms, d (film thickness) in metres, mu_v (average ion
    mobility) in m^2 V^-1 s^-1.  Spreading behaviour depends on these only
    through the lumped drift factor mu_v * r_on / d**2, so any consistent
    set is usable; defaults are typical TiO2 values.
    """

    r_on: float = 100.0
    r_off: float = 100e3
    d: float = 10e-9
    mu_v: float = 1e-14

    def __post_init__(self) -> None:
        if not (0.0 < self.r_on < self.r_off):
            raise ValueError(f"need 0 < r_on < r_off, got r_on={self.r_on}, r_off={self.r_off}")
        if self.d <= 0.0 or self.mu_v <= 0.0:
            raise ValueError(f"d and mu_v must be positive, got d={self.d}, mu_v={self.mu_v}")

    @property
    def drift_rate(self) -> float:
        """Boundary speed per unit charge, dw/dq = mu_v * r_on / d (m/C)."""
        return self.mu_v * self.r_on / self.d


@dataclass(frozen=True)
class DeviceState:
    """Doped-region length w in metres; valid states satisfy 0 <= w <= d."""

    w: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.w) or self.w < 0.0:
            raise ValueError(f"w must be finite and non-negative, got {self.w}")


def memristance_of(params: DeviceParams, w):
    """M(w) = r_on*(w/d) + r_off*(1 - w/d).  Accepts a scalar or an array."""
    x = w / params.d
    return params.r_on * x + params.r_off * (1.0 - x)


def delta_r_of(params: DeviceParams, w):
    """Stored ink, r_off - M(w).  Accepts a scalar or an array."""
    return params.r_off - memristance_of(params, w)


def drift_w(params: DeviceParams, w, delta_q):
    """State after charge delta_q: w + (mu_v*r_on/d)*delta_q clamped to [0, d]."""
    return np.clip(w + params.drift_rate * delta_q, 0.0, params.d)


def memristance(params: DeviceParams, state: DeviceState) -> float:
    """Device resistance in ohms; lies in [r_on, r_off] for a valid state."""
    return float(memristance_of(params, state.w))


def apply_charge(params: DeviceParams, state: DeviceState, delta_q: float) -> DeviceState:
    """State after delta_q coulombs have passed through the device.

    Sign convention: positive delta_q is current entering the row-side
    terminal and leaving the column-side terminal; it grows the doped
    region and lowers the memristance.  Driving a column negative during
    spreading therefore produces positive delta_q.
    """
    return DeviceState(float(drift_w(params, state.w, delta_q)))


def delta_r(params: DeviceParams, state: DeviceState) -> float:
    """Change from the pristine resistance: r_off - memristance(state)."""
    return float(delta_r_of(params, state.w))

"""Behavioural narrow-path and spread extraction.

The hardware readout is modelled with ideal components: per-row
current-to-voltage connectors at virtual ground, a resistive summing
network whose outputs are cumulative profiles (with a half-weighted final
tap), a first-crossing priority scan for the narrow path, and per-row
threshold comparators for the spread count.  None of these operations can
modify device state; the probe voltage is assumed small enough to leave
the memristances untouched, which the code enforces structurally by never
applying charge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .device import delta_r_of, memristance_of
from .errors import RangeError
from .plane import Plane

# A column is treated as empty (no narrow path) when g_n < v_in * this.
EMPTY_COLUMN_EPS = 1e-6


@dataclass(frozen=True)
class ReadoutConfig:
    """Readout circuit constants.

    v_in is the probe voltage (small, positive), v_dd the comparator rail,
    r_res the summing feedback resistance, r_x the spread-side conversion
    resistance and delta_threshold the ink level (in ohms of resistance
    change) that counts a cell as spread.
    """

    v_in: float = 0.01
    v_dd: float = 5.0
    r_res: float = 10e3
    r_x: float = 1e3
    delta_threshold: float = 20.0

    def __post_init__(self) -> None:
        if min(self.v_in, self.v_dd, self.r_res, self.r_x) <= 0.0:
            raise ValueError("v_in, v_dd, r_res and r_x must all be positive")
        if self.delta_threshold <= 0.0:
            raise ValueError(f"delta_threshold must be positive, got {self.delta_threshold}")

    def v_th(self, r_off: float) -> float:
        """Comparator reference: the connector voltage of a cell holding
        exactly delta_threshold of ink."""
        return -self.v_in * self.r_x / (r_off - self.delta_threshold + self.r_x)


@dataclass(frozen=True)
class ReadoutResult:
    """One column's readout: summing profile g, narrow-path row (None for
    an empty column), spread count and its indicator current."""

    g: np.ndarray
    narrow_path_row: int | None
    spread_count: int
    i_spread: float


def _check_column(plane: Plane, j: int) -> None:
    if not (1 <= j <= plane.n):
        raise RangeError(f"column {j} outside 1..{plane.n}")


def connector_voltages(plane: Plane, j: int, cfg: ReadoutConfig) -> np.ndarray:
    """Row connector outputs for probe v_in on column j (1-based):
    z_i = -(r_off / R_ij) * v_in.

    With every row at virtual ground and the other columns floating no
    network solve is needed; the coupling chains are disengaged (clk1=0)
    during readout.
    """
    _check_column(plane, j)
    col_r = memristance_of(plane.params, plane.w[:, j - 1])
    return -(plane.params.r_off / col_r) * cfg.v_in


def summing_profile(z: np.ndarray, cfg: ReadoutConfig) -> np.ndarray:
    """Summing opamp outputs g_i = -(sum_{t<=i} z_t + i*v_in), with the
    final tap half-weighted.  On an inked column this is v_in times the
    cumulative dR/(r_off - dR) profile."""
    z = np.asarray(z, dtype=float)
    g = -(np.cumsum(z) + np.arange(1, z.size + 1) * cfg.v_in)
    g[-1] *= 0.5
    return g


def narrow_path_row(g: np.ndarray, cfg: ReadoutConfig) -> int | None:
    """First row whose profile reaches the half-sum tap g_n, i.e. the
    smallest i with g_i >= g_n; None when the column holds no ink."""
    g = np.asarray(g, dtype=float)
    g_n = g[-1]
    if g_n < cfg.v_in * EMPTY_COLUMN_EPS:
        return None
    hits = np.nonzero(g >= g_n)[0]  # non-empty: the final tap matches itself
    return int(hits[0]) + 1


def spread_count(plane: Plane, j: int, cfg: ReadoutConfig) -> tuple[int, float]:
    """Comparator count of rows whose ink reaches delta_threshold, plus the
    summed indicator current i_spread = -M * v_dd / r_res.

    Each row's decision is taken on the divider voltage
    V+ = -v_in * r_x / (r_off - dR + r_x) against the fixed reference
    v_th, which is algebraically the predicate dR >= delta_threshold.
    """
    _check_column(plane, j)
    params = plane.params
    if cfg.delta_threshold >= params.r_off:
        raise ValueError("delta_threshold must be below r_off")
    dr = delta_r_of(params, plane.w[:, j - 1])
    v_plus = -cfg.v_in * cfg.r_x / (params.r_off - dr + cfg.r_x)
    fired = int(np.count_nonzero(v_plus <= cfg.v_th(params.r_off)))
    return fired, -fired * cfg.v_dd / cfg.r_res


def read_plane(plane: Plane, j: int, cfg: ReadoutConfig) -> ReadoutResult:
    """Narrow path and spread for column j in one shot; non-destructive."""
    z = connector_voltages(plane, j, cfg)
    g = summing_profile(z, cfg)
    count, i_spread = spread_count(plane, j, cfg)
    return ReadoutResult(
        g=g,
        narrow_path_row=narrow_path_row(g, cfg),
        spread_count=count,
        i_spread=i_spread,
    )

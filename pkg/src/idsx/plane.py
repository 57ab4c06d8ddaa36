"""One modeling plane: an m x n memristor crossbar with chain coupling
resistors, plus the nodal solver used while ink is being dropped.

Conventions:
  * row i (1-based) is the i-th y bin, row 1 = lowest y; column j is the
    j-th x bin,
  * junction current I[i, j] is positive when it enters the row wire and
    leaves the column wire, i.e. I = (v_row - v_col) / M, matching the
    device charge-sign convention,
  * node ordering inside the solver is columns 1..n then rows 1..m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .device import DeviceParams, DeviceState, delta_r_of, memristance_of
from .errors import NumericalError, RangeError

# KCL residual at floating wires must stay below this times max |I_ij|.
KCL_RESIDUAL_RTOL = 1e-9


@dataclass(frozen=True)
class Quantizer:
    """Uniform binning of [lo, hi] onto cells 1..bins; hi maps to the top bin."""

    lo: float
    hi: float
    bins: int

    def __post_init__(self) -> None:
        if not (self.lo < self.hi):
            raise ValueError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        # bins == 1 is degenerate but allowed so 1-wide test planes can exist
        if self.bins < 1:
            raise ValueError(f"need bins >= 1, got {self.bins}")

    def quantize(self, v: float, axis: str = "value") -> int:
        """Cell index of v, raising RangeError (naming the axis) when v is
        outside [lo, hi]."""
        if not (math.isfinite(v) and self.lo <= v <= self.hi):
            raise RangeError(f"{axis}={v} outside [{self.lo}, {self.hi}]")
        cell = 1 + int((v - self.lo) / (self.hi - self.lo) * self.bins)
        return min(cell, self.bins)

    def midpoint(self, cell: float) -> float:
        """Value at bin position `cell`; integer cells give bin midpoints.
        Fractional positions interpolate linearly between midpoints."""
        return self.lo + (cell - 0.5) * (self.hi - self.lo) / self.bins

    @property
    def width(self) -> float:
        return (self.hi - self.lo) / self.bins


@dataclass(frozen=True)
class DrivePattern:
    """One driven column at v_drive, one grounded row, everything else
    floating.  coupling_on engages the inter-wire resistor chains (the
    crossbar's clk1)."""

    k0: int
    l0: int
    v_drive: float
    coupling_on: bool = True


@dataclass
class Plane:
    """Crossbar state plus geometry.

    w holds the doped-region lengths in metres as an (m, n) float64 array,
    row-major.  Mutating operations assume a single writer; reads may run
    concurrently with each other but not with a mutation.
    """

    m: int
    n: int
    params: DeviceParams
    r_couple: float
    x_quant: Quantizer
    y_quant: Quantizer
    w: np.ndarray
    block_reverse: bool = False  # ideal rectification layer, normally off

    def __post_init__(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ValueError(f"grid must be at least 1x1, got {self.m}x{self.n}")
        if self.r_couple <= 0.0:
            raise ValueError(f"r_couple must be positive, got {self.r_couple}")
        if self.x_quant.bins != self.n or self.y_quant.bins != self.m:
            raise ValueError("quantizer bins must match the grid (x->n, y->m)")
        self.w = np.asarray(self.w, dtype=np.float64)
        if self.w.shape != (self.m, self.n):
            raise ValueError(f"w shape {self.w.shape} != ({self.m}, {self.n})")
        if not np.all(np.isfinite(self.w)):
            raise ValueError("w must be finite")
        if self.w.min() < 0.0 or self.w.max() > self.params.d:
            raise ValueError("device states must lie in [0, d]")

    def copy(self) -> "Plane":
        return replace(self, w=self.w.copy())

    def state_at(self, i: int, j: int) -> DeviceState:
        """Device state at row i, column j (1-based)."""
        return DeviceState(float(self.w[i - 1, j - 1]))

    def memristances(self) -> np.ndarray:
        return memristance_of(self.params, self.w)


def fresh_plane(
    m: int,
    n: int,
    params: DeviceParams | None = None,
    r_couple: float = 1000.0,
    x_quant: Quantizer | None = None,
    y_quant: Quantizer | None = None,
    w0: float = 0.0,
) -> Plane:
    """All devices at the same initial state (default fully un-doped, R_off)."""
    params = params or DeviceParams()
    return Plane(
        m=m,
        n=n,
        params=params,
        r_couple=r_couple,
        x_quant=x_quant or Quantizer(0.0, 1.0, n),
        y_quant=y_quant or Quantizer(0.0, 1.0, m),
        w=np.full((m, n), float(w0)),
    )


@dataclass(frozen=True)
class NetworkSolution:
    """Node voltages (per wire) and signed junction currents."""

    v_cols: np.ndarray  # (n,)
    v_rows: np.ndarray  # (m,)
    currents: np.ndarray  # (m, n), I = (v_row - v_col) / M


def solve_network(plane: Plane, drive: DrivePattern) -> NetworkSolution:
    """Kirchhoff-consistent solve of the crossbar resistive network.

    Memristor (i, j) couples column j and row i with conductance 1/M_ij.
    When drive.coupling_on, r_couple joins adjacent column wires and
    adjacent row wires (open chains, no wraparound).  Column k0 is fixed
    at v_drive and row l0 at 0 V; every other wire floats as an exact
    zero-injection KCL node.  The two fixed nodes are eliminated and the
    remaining symmetric system is solved directly.
    """
    m, n = plane.m, plane.n
    if not (1 <= drive.k0 <= n):
        raise RangeError(f"driven column {drive.k0} outside 1..{n}")
    if not (1 <= drive.l0 <= m):
        raise RangeError(f"grounded row {drive.l0} outside 1..{m}")

    cond = 1.0 / memristance_of(plane.params, plane.w)  # (m, n)
    size = n + m
    g = np.zeros((size, size))
    g[n:, :n] = -cond
    g[:n, n:] = -cond.T
    diag = np.empty(size)
    diag[:n] = cond.sum(axis=0)
    diag[n:] = cond.sum(axis=1)
    if drive.coupling_on:
        gc = 1.0 / plane.r_couple
        for lo, hi in ((0, n), (n, size)):  # column chain, then row chain
            idx = np.arange(lo, hi - 1)
            g[idx, idx + 1] -= gc
            g[idx + 1, idx] -= gc
            diag[idx] += gc
            diag[idx + 1] += gc
    g[np.diag_indices(size)] = diag

    k = drive.k0 - 1
    l = n + drive.l0 - 1
    v = np.zeros(size)
    v[k] = drive.v_drive
    free = np.ones(size, dtype=bool)
    free[k] = False
    free[l] = False
    if free.any():
        try:
            vf = np.linalg.solve(g[np.ix_(free, free)], -g[free, k] * drive.v_drive)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"singular crossbar system: {exc}") from None
        if not np.all(np.isfinite(vf)):
            raise NumericalError("network solve produced non-finite voltages")
        v[free] = vf

    v_cols = v[:n]
    v_rows = v[n:]
    currents = (v_rows[:, None] - v_cols[None, :]) * cond

    scale = np.abs(currents).max()
    if scale > 0.0:
        residual = np.abs(g @ v)[free]
        if residual.size and residual.max() > KCL_RESIDUAL_RTOL * scale:
            raise NumericalError(
                f"KCL residual {residual.max():.3e} exceeds {KCL_RESIDUAL_RTOL:.0e} * {scale:.3e}"
            )

    if plane.block_reverse and drive.v_drive != 0.0:
        # ideal rectification: suppress currents opposing the drive direction
        forward = -np.sign(drive.v_drive)
        currents = np.where(currents * forward < 0.0, 0.0, currents)

    return NetworkSolution(v_cols=v_cols, v_rows=v_rows, currents=currents)


def total_delta_r(plane: Plane) -> np.ndarray:
    """Stored ink pattern: r_off - M_ij over the whole grid, in ohms."""
    return delta_r_of(plane.params, plane.w)

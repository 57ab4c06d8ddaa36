"""Combining per-plane readouts into an output estimate.

Each input dimension owns one trained plane.  A query reads the narrow
path (the plane's input-output trend) and the spread (how noisy that
trend is) at the queried column, dequantizes the narrow-path row to a y
value and averages the per-plane values with inverse-spread weights, so
inputs with tighter patterns dominate the estimate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import RangeError, UntrainedModelError
from .plane import Plane
from .readout import ReadoutConfig, connector_voltages, narrow_path_row, read_plane, summing_profile
from .spreading import PulseSpec


@dataclass
class Model:
    """N trained planes plus inference configuration.

    All planes must share the y resolution and quantizer so their
    narrow-path rows dequantize onto the same output scale.  Queries are
    read-only; training (spreading) must not overlap queries.
    """

    planes: list[Plane]
    readout_cfg: ReadoutConfig
    pulse: PulseSpec
    epsilon_weight: float = 0.01

    def __post_init__(self) -> None:
        if not self.planes:
            raise ValueError("a model needs at least one plane")
        first = self.planes[0]
        for plane in self.planes[1:]:
            if plane.m != first.m or plane.y_quant != first.y_quant:
                raise ValueError("all planes must share m and the y quantizer")
        if self.epsilon_weight <= 0.0:
            raise ValueError(f"epsilon_weight must be positive, got {self.epsilon_weight}")

    @property
    def n_inputs(self) -> int:
        return len(self.planes)


@dataclass(frozen=True)
class PlaneReadout:
    """One plane's contribution to a query."""

    column: int
    b_star: int | None  # circuit answer; None when the column was empty
    row: float  # row actually used (after interpolation fallback)
    spread: int
    y_value: float
    weight: float


@dataclass(frozen=True)
class InferenceBreakdown:
    per_plane: tuple[PlaneReadout, ...]
    y_hat: float


def narrow_path_curve(plane: Plane, cfg: ReadoutConfig) -> np.ndarray:
    """Narrow-path row per column, with empty columns filled by linear
    interpolation between the nearest inked neighbours (flat at the
    edges).  Raises UntrainedModelError when every column is empty."""
    rows = np.full(plane.n, np.nan)
    for j in range(1, plane.n + 1):
        b = narrow_path_row(summing_profile(connector_voltages(plane, j, cfg), cfg), cfg)
        if b is not None:
            rows[j - 1] = b
    inked = np.isfinite(rows)
    if not inked.any():
        raise UntrainedModelError("every column is empty; spread training data first")
    cols = np.arange(plane.n, dtype=float)
    return np.interp(cols, cols[inked], rows[inked])


def infer(model: Model, x: Sequence[float]) -> InferenceBreakdown:
    """Estimate the output at input vector x.

    Per plane i: quantize x_i to a column, read (b*, M); empty columns
    fall back to the interpolated narrow-path curve.  The row dequantizes
    to the bin-midpoint y_i and the estimate is the weighted mean with
    weight_i = 1 / (M_i/m + epsilon_weight), a convex combination of the
    per-plane values.
    """
    if len(x) != model.n_inputs:
        raise RangeError(f"query has {len(x)} inputs, model has {model.n_inputs} planes")
    entries = []
    num = 0.0
    den = 0.0
    for idx, (plane, xi) in enumerate(zip(model.planes, x), start=1):
        try:
            column = plane.x_quant.quantize(float(xi), axis="x")
        except RangeError as exc:
            raise RangeError(f"plane {idx}: {exc}") from None
        result = read_plane(plane, column, model.readout_cfg)
        if result.narrow_path_row is not None:
            row = float(result.narrow_path_row)
        else:
            row = float(narrow_path_curve(plane, model.readout_cfg)[column - 1])
        y_value = plane.y_quant.midpoint(row)
        weight = 1.0 / (result.spread_count / plane.m + model.epsilon_weight)
        entries.append(
            PlaneReadout(
                column=column,
                b_star=result.narrow_path_row,
                row=row,
                spread=result.spread_count,
                y_value=y_value,
                weight=weight,
            )
        )
        num += weight * y_value
        den += weight
    return InferenceBreakdown(per_plane=tuple(entries), y_hat=num / den)


def evaluate(model: Model, test_grid: Sequence[tuple[Sequence[float], float]]) -> tuple[float, float]:
    """RMSE and max absolute error of infer() over (x, y_true) pairs."""
    if not test_grid:
        raise ValueError("test_grid is empty")
    errors = np.array([infer(model, x).y_hat - y_true for x, y_true in test_grid])
    return float(np.sqrt(np.mean(errors**2))), float(np.abs(errors).max())

"""Ink dropping: pulse-driven, time-stepped crossbar updates.

One drop grounds the row of the sample's y bin, applies a finite negative
pulse to the column of its x bin with the coupling chains engaged, and
integrates every device state under the resulting junction currents.
Drops are strictly sequential per plane; distinct planes are independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .device import drift_w
from .errors import RangeError
from .plane import DrivePattern, Plane, solve_network


@dataclass(frozen=True)
class PulseSpec:
    """Rectangular drive pulse: amplitude v0 (negative deposits ink),
    duration t0 in seconds, integrated in `steps` forward-Euler intervals."""

    v0: float = -3.0
    t0: float = 10e-3
    steps: int = 50

    def __post_init__(self) -> None:
        if self.t0 <= 0.0:
            raise ValueError(f"t0 must be positive, got {self.t0}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")


@dataclass(frozen=True)
class Sample:
    """One training point: input vector x and output y."""

    x: tuple[float, ...]
    y: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))


def drop_ink(plane: Plane, k0: int, l0: int, pulse: PulseSpec) -> None:
    """Apply one pulse at column k0, row l0 (1-based), mutating the plane.

    Each of the `steps` sub-intervals solves the coupled network at the
    current device states and advances every junction by its own charge
    I_ij * dt, so the drop's footprint decays away from (l0, k0).
    """
    drive = DrivePattern(k0=k0, l0=l0, v_drive=pulse.v0, coupling_on=True)
    dt = pulse.t0 / pulse.steps
    for _ in range(pulse.steps):
        sol = solve_network(plane, drive)
        plane.w = drift_w(plane.params, plane.w, sol.currents * dt)


def spread_sample(planes: Sequence[Plane], sample: Sample, pulse: PulseSpec) -> None:
    """Drop the sample on every plane: column from x_i, row from y.

    All coordinates are validated against every plane before any plane is
    touched; a RangeError identifies the plane index and the axis.
    """
    if len(sample.x) != len(planes):
        raise RangeError(f"sample has {len(sample.x)} inputs, model has {len(planes)} planes")
    coords = []
    for idx, (plane, xi) in enumerate(zip(planes, sample.x), start=1):
        try:
            k0 = plane.x_quant.quantize(xi, axis="x")
            l0 = plane.y_quant.quantize(sample.y, axis="y")
        except RangeError as exc:
            raise RangeError(f"plane {idx}: {exc}") from None
        coords.append((k0, l0))
    for plane, (k0, l0) in zip(planes, coords):
        drop_ink(plane, k0, l0, pulse)


def spread_dataset(planes: Sequence[Plane], dataset: Iterable[Sample], pulse: PulseSpec) -> None:
    """Sequential fold of spread_sample in dataset order (order-sensitive).

    Fails fast on the first invalid sample, reporting its 0-based index;
    samples already spread stay in the planes.
    """
    for idx, sample in enumerate(dataset):
        try:
            spread_sample(planes, sample, pulse)
        except RangeError as exc:
            raise RangeError(f"sample {idx}: {exc}") from None

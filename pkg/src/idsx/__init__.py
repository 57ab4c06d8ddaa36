"""Memristor-crossbar simulator for ink-drop-spread modeling.

The package simulates per-input crossbar planes that store training data
as resistance changes, the pulse-driven spreading procedure that writes
them, the analog readout circuits that extract narrow-path and spread
values, and the inference rule that combines those values into an output
estimate.  `idsx.oracle` carries independent reference implementations
for testing, and `idsx.cli` the `ids` command-line front end.
"""

from .alm import InferenceBreakdown, Model, PlaneReadout, evaluate, infer, narrow_path_curve
from .device import (
    DeviceParams,
    DeviceState,
    apply_charge,
    delta_r,
    delta_r_of,
    memristance,
    memristance_of,
)
from .errors import (
    DataError,
    IdsError,
    NumericalError,
    RangeError,
    StateFormatError,
    UntrainedModelError,
)
from .experiment import ExperimentConfig, eq16, run_experiment
from .persist import dumps_model, load_model, loads_model, save_model
from .plane import (
    DrivePattern,
    NetworkSolution,
    Plane,
    Quantizer,
    fresh_plane,
    solve_network,
    total_delta_r,
)
from .readout import (
    ReadoutConfig,
    ReadoutResult,
    connector_voltages,
    narrow_path_row,
    read_plane,
    spread_count,
    summing_profile,
)
from .spreading import PulseSpec, Sample, drop_ink, spread_dataset, spread_sample

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "DeviceParams",
    "DeviceState",
    "DrivePattern",
    "ExperimentConfig",
    "IdsError",
    "InferenceBreakdown",
    "Model",
    "NetworkSolution",
    "NumericalError",
    "Plane",
    "PlaneReadout",
    "PulseSpec",
    "Quantizer",
    "RangeError",
    "ReadoutConfig",
    "ReadoutResult",
    "Sample",
    "StateFormatError",
    "UntrainedModelError",
    "apply_charge",
    "connector_voltages",
    "delta_r",
    "delta_r_of",
    "drop_ink",
    "dumps_model",
    "eq16",
    "evaluate",
    "fresh_plane",
    "infer",
    "load_model",
    "loads_model",
    "memristance",
    "memristance_of",
    "narrow_path_curve",
    "narrow_path_row",
    "read_plane",
    "run_experiment",
    "save_model",
    "solve_network",
    "spread_count",
    "spread_dataset",
    "spread_sample",
    "summing_profile",
    "total_delta_r",
]

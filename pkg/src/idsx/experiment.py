"""Experiment configuration, dataset handling and artifact emission.

The default configuration reproduces the desk-scale benchmark: two
100x90 planes trained with 800 uniformly drawn samples of the eq16
surface, coupling 1 kOhm, -3 V / 10 ms pulses, spread threshold 20 Ohm.
`run_experiment` trains the model, dumps CSV artifacts (single-drop
footprint, ink heatmaps, narrow-path and spread curves, inferred
surface) and a key=value metrics file, and saves a snapshot.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .alm import Model, infer, narrow_path_curve
from .device import DeviceParams
from .errors import DataError
from .oracle import oracle_infer_y, oracle_narrow_curve
from .persist import save_model
from .plane import Plane, Quantizer, fresh_plane, total_delta_r
from .readout import ReadoutConfig, read_plane
from .spreading import PulseSpec, Sample, drop_ink, spread_dataset

# Ink must stay well below r_off for the readout linearization to hold.
REGIME_LIMIT = 0.05


@dataclass
class ExperimentConfig:
    """Everything a run needs; all values overridable via a key=value file.

    mu_v defaults to the drift calibration that puts one drop's peak ink
    near 100 Ohm (0.1% of r_off) at the default pulse, which keeps a full
    800-drop training inside the linear regime.
    """

    n_inputs: int = 2
    rows: int = 90  # y resolution (m)
    cols: int = 100  # x resolution (n)
    x_lo: float = 1.0
    x_hi: float = 10.0
    y_lo: float | None = None  # default: training-data min/max padded 5%
    y_hi: float | None = None
    r_on: float = 100.0
    r_off: float = 100e3
    d: float = 10e-9
    mu_v: float = 3.3e-15
    r_couple: float = 1000.0
    block_reverse: bool = False
    v0: float = -3.0
    t0: float = 10e-3
    steps: int = 50
    v_in: float = 0.01
    v_dd: float = 5.0
    r_res: float = 10e3
    r_x: float = 1e3
    delta_threshold: float = 20.0
    samples: int = 800
    seed: int = 42
    target: str = "eq16"  # builtin target id; ignored when dataset is set
    dataset: str | None = None  # CSV path with header x1,...,xN,y
    eval_grid: int = 30
    epsilon_weight: float = 0.01

    def device_params(self) -> DeviceParams:
        return DeviceParams(r_on=self.r_on, r_off=self.r_off, d=self.d, mu_v=self.mu_v)

    def pulse(self) -> PulseSpec:
        return PulseSpec(v0=self.v0, t0=self.t0, steps=self.steps)

    def readout(self) -> ReadoutConfig:
        return ReadoutConfig(
            v_in=self.v_in,
            v_dd=self.v_dd,
            r_res=self.r_res,
            r_x=self.r_x,
            delta_threshold=self.delta_threshold,
        )


def _parse_bool(raw: str) -> bool:
    if raw.lower() in ("1", "true", "yes", "on"):
        return True
    if raw.lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


_FIELD_PARSERS = {
    "int": int,
    "float": float,
    "bool": _parse_bool,
    "str": str,
    "float | None": float,
    "str | None": str,
}


def parse_config(path, overrides: dict | None = None) -> ExperimentConfig:
    """Read a key=value config file ('#' starts a comment); keys are the
    ExperimentConfig field names."""
    parsers = {f.name: _FIELD_PARSERS[f.type] for f in fields(ExperimentConfig)}
    values: dict = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise DataError(f"{path}:{lineno}: expected key=value, got {line.strip()!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in parsers:
            raise DataError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            values[key] = parsers[key](raw)
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    if overrides:
        values.update(overrides)
    try:
        return ExperimentConfig(**values)
    except (TypeError, ValueError) as exc:
        raise DataError(f"{path}: invalid configuration: {exc}") from None


def eq16(x1, x2):
    """Benchmark surface sqrt(2*(sin x1 / x1)^2 + 3*(sin x2 / x2)^2)."""
    s1 = np.sin(x1) / x1
    s2 = np.sin(x2) / x2
    return np.sqrt(2.0 * s1 * s1 + 3.0 * s2 * s2)


BUILTIN_TARGETS: dict[str, tuple[Callable, int]] = {"eq16": (eq16, 2)}


def make_dataset(cfg: ExperimentConfig, rng: np.random.Generator) -> list[Sample]:
    """Uniformly sampled inputs over the x range, outputs from the builtin
    target."""
    if cfg.target not in BUILTIN_TARGETS:
        raise DataError(f"unknown builtin target {cfg.target!r}")
    fn, arity = BUILTIN_TARGETS[cfg.target]
    if cfg.n_inputs != arity:
        raise DataError(f"target {cfg.target} expects {arity} inputs, config has {cfg.n_inputs}")
    xs = rng.uniform(cfg.x_lo, cfg.x_hi, size=(cfg.samples, arity))
    return [Sample(x=tuple(row), y=float(fn(*row))) for row in xs]


def load_dataset_csv(path, n_inputs: int) -> list[Sample]:
    """CSV with header x1,...,xN,y, one sample per line; parse failures
    report line and column."""
    expected = [f"x{i}" for i in range(1, n_inputs + 1)] + ["y"]
    samples: list[Sample] = []
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise DataError(f"{path}: empty file, expected header {','.join(expected)}")
    header = [name.strip() for name in lines[0].split(",")]
    if header != expected:
        raise DataError(f"{path}:1: header {','.join(header)!r} != {','.join(expected)!r}")
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != n_inputs + 1:
            raise DataError(f"{path}:{lineno}: expected {n_inputs + 1} fields, got {len(cells)}")
        parsed = []
        for colno, cell in enumerate(cells, start=1):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise DataError(f"{path}:{lineno}: column {colno}: not a number: {cell.strip()!r}") from None
        samples.append(Sample(x=tuple(parsed[:-1]), y=parsed[-1]))
    return samples


def derive_y_range(cfg: ExperimentConfig, samples: Sequence[Sample]) -> tuple[float, float]:
    """Configured y range, or data min/max padded by 5% of the span."""
    if cfg.y_lo is not None and cfg.y_hi is not None:
        return cfg.y_lo, cfg.y_hi
    if not samples:
        return 0.0, 1.0
    ys = [s.y for s in samples]
    lo, hi = min(ys), max(ys)
    span = hi - lo
    if span <= 0.0:  # constant target still needs a non-degenerate axis
        span = max(abs(hi), 1.0)
    pad = 0.05 * span
    return lo - pad, hi + pad


def build_model(cfg: ExperimentConfig, samples: Sequence[Sample]) -> Model:
    """Fresh planes (one per input) sharing the y quantizer."""
    y_lo, y_hi = derive_y_range(cfg, samples)
    x_quant = Quantizer(cfg.x_lo, cfg.x_hi, cfg.cols)
    y_quant = Quantizer(y_lo, y_hi, cfg.rows)
    params = cfg.device_params()
    planes = []
    for _ in range(cfg.n_inputs):
        plane = fresh_plane(
            m=cfg.rows,
            n=cfg.cols,
            params=params,
            r_couple=cfg.r_couple,
            x_quant=x_quant,
            y_quant=y_quant,
        )
        plane.block_reverse = cfg.block_reverse
        planes.append(plane)
    return Model(
        planes=planes,
        readout_cfg=cfg.readout(),
        pulse=cfg.pulse(),
        epsilon_weight=cfg.epsilon_weight,
    )


def get_samples(cfg: ExperimentConfig, rng: np.random.Generator) -> list[Sample]:
    if cfg.dataset:
        return load_dataset_csv(cfg.dataset, cfg.n_inputs)
    return make_dataset(cfg, rng)


def max_ink_ratio(model: Model) -> float:
    """max dR_ij / r_off over all planes, the linear-regime diagnostic."""
    return max(float(total_delta_r(p).max()) / p.params.r_off for p in model.planes)


def single_drop_footprint(cfg: ExperimentConfig) -> tuple[np.ndarray, int, int]:
    """One pulse at the centre cell of a fresh plane at the configured
    parameters; returns (delta_r matrix, drop_row, drop_col), 1-based."""
    plane = fresh_plane(
        m=cfg.rows,
        n=cfg.cols,
        params=cfg.device_params(),
        r_couple=cfg.r_couple,
        x_quant=Quantizer(cfg.x_lo, cfg.x_hi, cfg.cols),
        y_quant=Quantizer(0.0, 1.0, cfg.rows),
    )
    row0 = (cfg.rows + 1) // 2
    col0 = (cfg.cols + 1) // 2
    drop_ink(plane, col0, row0, cfg.pulse())
    return total_delta_r(plane), row0, col0


def footprint_is_monotone(dr: np.ndarray, row0: int, col0: int, rtol: float = 1e-9) -> bool:
    """True when dr peaks at (row0, col0) (1-based) and never increases
    along any monotone path away from it: checked row-wise away from col0
    and column-wise away from row0, with slack rtol * peak for symmetric
    float noise."""
    dr = np.asarray(dr, dtype=float)
    r0, c0 = row0 - 1, col0 - 1
    peak = dr[r0, c0]
    if peak < dr.max():
        return False
    slack = rtol * peak
    right = np.diff(dr[:, c0:], axis=1)
    left = np.diff(dr[:, c0::-1], axis=1)
    down = np.diff(dr[r0:, :], axis=0)
    up = np.diff(dr[r0::-1, :], axis=0)
    return all(d.size == 0 or d.max() <= slack for d in (right, left, down, up))


def write_matrix_csv(path, matrix: np.ndarray) -> None:
    lines = [",".join(repr(float(v)) for v in row) for row in np.asarray(matrix)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_matrix_csv(path) -> np.ndarray:
    rows = [
        [float(cell) for cell in line.split(",")]
        for line in Path(path).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    return np.array(rows)


def write_table_csv(path, header: Sequence[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_metrics(path, metrics: dict) -> None:
    lines = [f"{key}={value}" for key, value in metrics.items()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def run_experiment(cfg: ExperimentConfig, out_dir) -> dict:
    """Full pipeline: generate/load data, train, dump artifacts, evaluate.

    Returns the metrics dict that is also written to metrics.txt.  The
    inferred-surface artifacts and error statistics need a builtin target
    (a closed-form y); CSV-trained runs emit everything else.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()

    rng = np.random.default_rng(cfg.seed)
    samples = get_samples(cfg, rng)
    model = build_model(cfg, samples)
    spread_dataset(model.planes, samples, model.pulse)

    ratio = max_ink_ratio(model) if samples else 0.0
    metrics: dict = {
        "samples": len(samples),
        "seed": cfg.seed,
        "max_delta_r_ratio": repr(ratio),
        "regime_ok": ratio <= REGIME_LIMIT,
    }

    footprint, row0, col0 = single_drop_footprint(cfg)
    write_matrix_csv(out / "fig7.csv", footprint)
    metrics["fig7_drop_row"] = row0
    metrics["fig7_drop_col"] = col0
    metrics["fig7_peak_ohm"] = repr(float(footprint[row0 - 1, col0 - 1]))

    for idx, plane in enumerate(model.planes, start=1):
        write_matrix_csv(out / f"fig10_plane{idx}.csv", total_delta_r(plane))
        curve = narrow_path_curve(plane, model.readout_cfg)
        oracle_curve = oracle_narrow_curve(plane)
        write_table_csv(
            out / f"fig11_plane{idx}.csv",
            ["col", "x", "row", "y"],
            (
                (j, plane.x_quant.midpoint(j), curve[j - 1], plane.y_quant.midpoint(curve[j - 1]))
                for j in range(1, plane.n + 1)
            ),
        )
        write_table_csv(
            out / f"fig12_plane{idx}.csv",
            ["col", "x", "spread"],
            (
                (j, plane.x_quant.midpoint(j), read_plane(plane, j, model.readout_cfg).spread_count)
                for j in range(1, plane.n + 1)
            ),
        )
        corr = np.corrcoef(np.asarray(curve), np.asarray(oracle_curve))[0, 1]
        metrics[f"narrow_path_corr_plane{idx}"] = repr(float(corr))

    if cfg.dataset is None and cfg.target in BUILTIN_TARGETS:
        fn, _ = BUILTIN_TARGETS[cfg.target]
        axis = np.linspace(cfg.x_lo, cfg.x_hi, cfg.eval_grid)
        rows = []
        errors = []
        oracle_errors = []
        for x1 in axis:
            for x2 in axis:
                y_true = float(fn(x1, x2))
                y_hat = infer(model, (x1, x2)).y_hat
                columns = [p.x_quant.quantize(v, axis="x") for p, v in zip(model.planes, (x1, x2))]
                y_oracle = oracle_infer_y(
                    model.planes, columns, cfg.delta_threshold, cfg.epsilon_weight
                )
                rows.append((x1, x2, y_true, y_hat, y_oracle))
                errors.append(y_hat - y_true)
                oracle_errors.append(y_oracle - y_true)
        write_table_csv(out / "fig13.csv", ["x1", "x2", "y_true", "y_hat", "y_oracle"], rows)
        errs = np.array(errors)
        oerrs = np.array(oracle_errors)
        metrics["rmse"] = repr(float(np.sqrt(np.mean(errs**2))))
        metrics["max_abs_err"] = repr(float(np.abs(errs).max()))
        metrics["oracle_rmse"] = repr(float(np.sqrt(np.mean(oerrs**2))))
        metrics["rmse_ratio"] = repr(float(np.sqrt(np.mean(errs**2)) / np.sqrt(np.mean(oerrs**2))))

    save_model(model, out / "state.idsx")
    metrics["runtime_seconds"] = repr(time.perf_counter() - started)
    write_metrics(out / "metrics.txt", metrics)
    return metrics

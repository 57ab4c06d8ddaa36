"""Command-line front end: ids spread | query | model | oracle.

Exit codes: 0 ok, 2 usage, 3 data error (parse/range/corrupt state/
untrained model), 4 numerical error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .alm import infer
from .errors import DataError, NumericalError, RangeError, StateFormatError, UntrainedModelError
from .experiment import (
    ExperimentConfig,
    REGIME_LIMIT,
    build_model,
    get_samples,
    max_ink_ratio,
    parse_config,
    run_experiment,
)
from .oracle import oracle_balance_row, oracle_solve, oracle_spread
from .persist import load_model, save_model
from .plane import DrivePattern, fresh_plane, solve_network, total_delta_r
from .readout import read_plane
from .spreading import PulseSpec, drop_ink, spread_dataset

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _load_config(args) -> ExperimentConfig:
    overrides = {"seed": args.seed} if args.seed is not None else None
    if args.config:
        return parse_config(args.config, overrides)
    cfg = ExperimentConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def cmd_spread(args) -> int:
    cfg = _load_config(args)
    rng = np.random.default_rng(cfg.seed)
    samples = get_samples(cfg, rng)
    model = build_model(cfg, samples)
    spread_dataset(model.planes, samples, model.pulse)
    ratio = max_ink_ratio(model) if samples else 0.0
    save_model(model, args.state)
    print(f"spread {len(samples)} samples onto {len(model.planes)} plane(s)")
    print(f"max delta_r / r_off = {ratio:.6f}")
    if ratio > REGIME_LIMIT:
        print(
            f"warning: ink ratio {ratio:.4f} exceeds the linear-regime limit {REGIME_LIMIT}",
            file=sys.stderr,
        )
    print(f"state written to {args.state}")
    return EXIT_OK


def cmd_query(args) -> int:
    model = load_model(args.state)
    breakdown = infer(model, args.x)
    for idx, entry in enumerate(breakdown.per_plane, start=1):
        b_star = entry.b_star if entry.b_star is not None else "none"
        print(
            f"plane {idx}: column={entry.column} b*={b_star} row={entry.row:g} "
            f"M={entry.spread} y={entry.y_value:.6g} weight={entry.weight:.6g}"
        )
    print(f"y_hat = {breakdown.y_hat:.6g}")
    return EXIT_OK


def cmd_model(args) -> int:
    cfg = _load_config(args)
    if cfg.dataset is not None:
        raise DataError("ids model reproduces a builtin target; use target=..., not dataset=...")
    metrics = run_experiment(cfg, args.out)
    for key, value in metrics.items():
        print(f"{key}={value}")
    if not metrics.get("regime_ok", True):
        print("warning: training left the linear regime", file=sys.stderr)
    print(f"artifacts written to {args.out}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    """Cross-check the production paths against the oracle implementations
    on randomized inputs; exits non-zero on disagreement."""
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    failures = 0

    worst = 0.0
    for _ in range(args.trials):
        m = int(rng.integers(1, 7))
        n = int(rng.integers(1, 7))
        plane = fresh_plane(m, n, r_couple=float(rng.uniform(200.0, 5e3)))
        plane.w = rng.uniform(0.0, plane.params.d, size=(m, n))
        drive = DrivePattern(
            k0=int(rng.integers(1, n + 1)),
            l0=int(rng.integers(1, m + 1)),
            v_drive=float(rng.uniform(-5.0, -0.5)),
            coupling_on=bool(rng.integers(0, 2)),
        )
        got = solve_network(plane, drive).currents
        want = oracle_solve(plane, drive).currents
        scale = max(np.abs(want).max(), 1e-30)
        worst = max(worst, float(np.abs(got - want).max() / scale))
    ok = worst < 1e-8
    failures += not ok
    print(f"solver vs oracle: max relative deviation {worst:.3e} over {args.trials} trials: "
          f"{'OK' if ok else 'FAIL'}")

    plane = fresh_plane(24, 16)
    for _ in range(8):
        drop_ink(
            plane,
            int(rng.integers(1, plane.n + 1)),
            int(rng.integers(1, plane.m + 1)),
            PulseSpec(v0=-3.0, t0=10e-3, steps=5),
        )
    cfg = ExperimentConfig()
    ink = total_delta_r(plane)
    mismatch_b = mismatch_m = 0
    for j in range(1, plane.n + 1):
        res = read_plane(plane, j, cfg.readout())
        column = ink[:, j - 1]
        if res.narrow_path_row != oracle_balance_row(column):
            mismatch_b += 1
        if res.spread_count != oracle_spread(column, cfg.delta_threshold):
            mismatch_m += 1
    print(f"narrow path vs balance rule: {mismatch_b}/{plane.n} columns disagree: "
          f"{'OK' if mismatch_b == 0 else 'NEAR-TIE ONLY?'}")
    print(f"spread count vs direct count: {mismatch_m}/{plane.n} columns disagree: "
          f"{'OK' if mismatch_m == 0 else 'FAIL'}")
    failures += mismatch_m > 0

    if failures:
        raise NumericalError("oracle cross-check failed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ids",
        description="Memristor-crossbar ink-drop-spread simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_spread = sub.add_parser("spread", help="train planes from a dataset and save a snapshot")
    p_spread.add_argument("--config", type=Path, help="key=value config file")
    p_spread.add_argument("--state", type=Path, required=True, help="snapshot output path")
    p_spread.add_argument("--seed", type=int, help="override the config seed")
    p_spread.set_defaults(func=cmd_spread)

    p_query = sub.add_parser("query", help="run inference from a snapshot")
    p_query.add_argument("--state", type=Path, required=True, help="snapshot path")
    p_query.add_argument("x", type=float, nargs="+", help="input values, one per plane")
    p_query.set_defaults(func=cmd_query)

    p_model = sub.add_parser("model", help="end-to-end builtin-target run with CSV artifacts")
    p_model.add_argument("--config", type=Path, help="key=value config file")
    p_model.add_argument("--out", type=Path, required=True, help="artifact directory")
    p_model.add_argument("--seed", type=int, help="override the config seed")
    p_model.set_defaults(func=cmd_model)

    p_oracle = sub.add_parser("oracle", help="cross-check production paths against the oracles")
    p_oracle.add_argument("--seed", type=int, help="randomization seed (default 0)")
    p_oracle.add_argument("--trials", type=int, default=40, help="solver comparison trials")
    p_oracle.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DataError, RangeError, StateFormatError, UntrainedModelError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()

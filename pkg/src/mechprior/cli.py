"""Command-line entry point.

Subcommands:
  train      run the full experiment from a JSON config into an output dir
  eval       evaluate saved network weights on the config's evaluation set
  curve      render learning curves from an aggregated results CSV
  hist       render a motion histogram from a dataset JSONL
  prior-map  render the network's predicted-reward heatmap for a mechanism
  show-mech  dump a mechanism's context image as PGM

Figure commands write deterministic SVG plus a matplotlib PNG companion
(suppress with --no-png). Failures exit nonzero with a one-line diagnostic
and remove partially written outputs.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import figures, harness
from .harness import Strategy
from .mechanisms import (
    MechanismKind,
    action_bounds,
    generate_mechanism,
    oracle_optimal,
    render,
    write_pgm,
)
from .prior_net import load_weights, make_prior


def _kind(text: str) -> MechanismKind:
    try:
        return MechanismKind(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"kind must be 'slider' or 'door', got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mechprior", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="run an experiment from a config file")
    p_train.add_argument("config", type=Path)
    p_train.add_argument("--out", type=Path, required=True, help="output directory")
    p_train.add_argument("--workers", type=int, default=None)

    p_eval = sub.add_parser("eval", help="evaluate saved weights on the evaluation set")
    p_eval.add_argument("config", type=Path)
    p_eval.add_argument("--weights", type=Path, required=True)
    p_eval.add_argument("--out", type=Path, required=True, help="output directory")
    p_eval.add_argument("--workers", type=int, default=None)

    p_curve = sub.add_parser("curve", help="learning-curve figure from aggregated results")
    p_curve.add_argument("results", type=Path, help="aggregated results CSV")
    p_curve.add_argument("--out", type=Path, required=True, help="output SVG path")
    p_curve.add_argument("--no-png", action="store_true")

    p_hist = sub.add_parser("hist", help="motion histogram figure from a dataset")
    p_hist.add_argument("dataset", type=Path, help="dataset JSONL")
    p_hist.add_argument("--out", type=Path, required=True, help="output SVG path")
    p_hist.add_argument("--bins", type=int, default=20)
    p_hist.add_argument("--no-png", action="store_true")

    p_map = sub.add_parser("prior-map", help="predicted-reward heatmap for a mechanism")
    p_map.add_argument("--weights", type=Path, required=True)
    p_map.add_argument("--kind", type=_kind, required=True)
    p_map.add_argument("--seed", type=int, required=True)
    p_map.add_argument("--out", type=Path, required=True, help="output SVG path")
    p_map.add_argument("--resolution", type=int, default=40)
    p_map.add_argument(
        "--pitch",
        type=float,
        default=None,
        help="fixed commanded pitch; required to slice the 3-D door space",
    )
    p_map.add_argument("--no-png", action="store_true")

    p_show = sub.add_parser("show-mech", help="dump a mechanism image as PGM")
    p_show.add_argument("kind", type=_kind)
    p_show.add_argument("seed", type=int)
    p_show.add_argument("--out", type=Path, required=True, help="output PGM path")

    return parser


def _png_path(svg_path: Path) -> Path:
    return svg_path.with_suffix(".png")


def cmd_train(args, written: list[Path]) -> None:
    config = harness.load_config(args.config)
    out: Path = args.out
    harness.run_experiment(config, out_dir=out, workers=args.workers)
    written.extend(sorted(out.glob("*.csv")))


def cmd_eval(args, written: list[Path]) -> None:
    config = harness.load_config(args.config)
    weights = load_weights(args.weights)
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    mechanisms = harness.evaluation_mechanisms(config)
    workers = args.workers if args.workers is not None else harness.default_workers()
    records = harness.evaluate_many(Strategy.CPP_GP_UCB, weights, mechanisms, config, workers)
    rows = harness.cells_from_records(Strategy.CPP_GP_UCB, 0, 0, records, config.max_attempts)
    path = out / "eval_results.csv"
    written.append(path)
    harness.save_results(rows, path)


def cmd_curve(args, written: list[Path]) -> None:
    curves = harness.load_aggregate(args.results)
    written.append(args.out)
    figures.write_curve_svg(curves, args.out)
    if not args.no_png:
        png = _png_path(args.out)
        written.append(png)
        figures.write_curve_png(curves, png)


def cmd_hist(args, written: list[Path]) -> None:
    dataset = harness.load_dataset(args.dataset)
    hist = harness.motion_histogram(dataset, args.bins)
    written.append(args.out)
    figures.write_hist_svg(hist, args.out)
    if not args.no_png:
        png = _png_path(args.out)
        written.append(png)
        figures.write_hist_png(hist, png)


def cmd_prior_map(args, written: list[Path]) -> None:
    if args.resolution < 2:
        raise ValueError("resolution must be at least 2")
    weights = load_weights(args.weights)
    mechanism = generate_mechanism(args.kind, args.seed)
    prior = make_prior(weights, render(mechanism))
    res = args.resolution
    oracle_action, _ = oracle_optimal(mechanism)

    if args.kind is MechanismKind.SLIDER:
        # Polar: direction and distance to move the handle.
        radius_range = (0.0, action_bounds(args.kind).high[1])
        angles = np.linspace(-math.pi, math.pi, res + 1)
        radii = np.linspace(radius_range[0], radius_range[1], res + 1)
        t_centers = (angles[:-1] + angles[1:]) / 2
        r_centers = (radii[:-1] + radii[1:]) / 2
        tt, rr = np.meshgrid(t_centers, r_centers, indexing="ij")
        actions = np.stack([tt.ravel(), rr.ravel()], axis=1)
        oracle_angle, oracle_radius = float(oracle_action[0]), float(oracle_action[1])
    else:
        if args.pitch is None:
            raise ValueError("prior-map draws the 2-D slider space; pass --pitch to slice a door")
        bounds = action_bounds(args.kind)
        if not (bounds.low[2] <= args.pitch <= bounds.high[2]):
            raise ValueError(f"--pitch must lie in [{bounds.low[2]}, {bounds.high[2]}]")
        # Polar slice at fixed pitch: opening angle around the disk, radius outward.
        radius_range = (bounds.low[0], bounds.high[0])
        angles = np.linspace(-math.pi, math.pi, res + 1)
        radii = np.linspace(radius_range[0], radius_range[1], res + 1)
        t_centers = (angles[:-1] + angles[1:]) / 2
        r_centers = (radii[:-1] + radii[1:]) / 2
        tt, rr = np.meshgrid(t_centers, r_centers, indexing="ij")
        actions = np.stack([rr.ravel(), tt.ravel(), np.full(rr.size, args.pitch)], axis=1)
        oracle_angle, oracle_radius = float(oracle_action[1]), float(oracle_action[0])

    values = prior(actions).reshape(res, res)
    written.append(args.out)
    figures.write_prior_map_svg(values, radius_range, oracle_angle, oracle_radius, args.out)
    if not args.no_png:
        png = _png_path(args.out)
        written.append(png)
        figures.write_prior_map_png(values, radius_range, oracle_angle, oracle_radius, png)


def cmd_show_mech(args, written: list[Path]) -> None:
    mechanism = generate_mechanism(args.kind, args.seed)
    written.append(args.out)
    write_pgm(render(mechanism), args.out)


_COMMANDS = {
    "train": cmd_train,
    "eval": cmd_eval,
    "curve": cmd_curve,
    "hist": cmd_hist,
    "prior-map": cmd_prior_map,
    "show-mech": cmd_show_mech,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    written: list[Path] = []
    try:
        _COMMANDS[args.command](args, written)
    except Exception as exc:  # noqa: BLE001 - single diagnostic line, clean exit
        for path in written:
            Path(path).unlink(missing_ok=True)
        print(f"mechprior {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: sweep, scan, reconstruct, and simulate subcommands."""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .harness import (
    _fmt,
    apply_full_scale,
    compare_scenarios,
    parse_scan_config,
    parse_sweep_config,
    run_scan,
    run_sweep,
    write_comparison_csv,
    write_per_sigma_csv,
    write_per_state_csv,
    write_scan_csv,
)
from .mle import format_rho_text, read_counts_csv, reconstruct
from .noise import NoiseConfig, RngStream, simulate_counts
from .polarimetry import build_measurement_set
from .states import BellFamily, bell_state, pure_density

_TWO_PI = 2.0 * np.pi


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="belltomo",
        description="Simulate noisy two-photon tomography of Bell states and reconstruct the measured states.",
    )
    parser.add_argument("--threads", type=int, default=1, help="worker processes for sweeps (default 1)")
    parser.add_argument(
        "--full-scale", action="store_true", help="run sweeps with 200 states per family instead of the configured sample_size"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run the scenarios of a config file and write per-state/per-sigma CSVs")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--out", required=True, help="output directory")

    p_scan = sub.add_parser("scan", help="run the rotating-analyzer scans of a config file and write scan CSVs")
    p_scan.add_argument("config")
    p_scan.add_argument("--out", required=True, help="output directory")

    p_rec = sub.add_parser("reconstruct", help="reconstruct density matrices from a counts CSV")
    p_rec.add_argument("--counts", required=True, help="counts CSV (scenario_id, state_index, HH..RR)")
    p_rec.add_argument("--n-mean", type=float, required=True, help="mean pair number used during acquisition")
    p_rec.add_argument("--out", required=True, help="output text file")

    p_sim = sub.add_parser("simulate", help="simulate one noisy acquisition and print the counts CSV row")
    p_sim.add_argument("--family", choices=["phi", "psi"], required=True)
    p_sim.add_argument("--phase", type=float, default=0.0, help="relative phase of the input state (radians)")
    p_sim.add_argument("--sigma", type=float, required=True, help="analyzer error angle scale")
    p_sim.add_argument("--p", type=float, default=0.0, help="dark-count fraction")
    p_sim.add_argument("--n-mean", type=float, required=True, help="mean pair number per measurement")
    p_sim.add_argument("--seed", type=int, required=True, help="master seed")
    p_sim.add_argument("--no-poisson", action="store_true", help="use exactly n_mean pairs per measurement")
    return parser


def _cmd_sweep(args):
    scenarios = apply_full_scale(parse_sweep_config(args.config), args.full_scale)
    os.makedirs(args.out, exist_ok=True)
    results = {}
    for scenario in scenarios:
        result = run_sweep(scenario, threads=args.threads)
        results[scenario.scenario_id] = result
        write_per_state_csv(os.path.join(args.out, f"{scenario.scenario_id}_per_state.csv"), result)
        write_per_sigma_csv(os.path.join(args.out, f"{scenario.scenario_id}_per_sigma.csv"), result)
        print(f"{scenario.scenario_id}: {len(result.per_state)} reconstructions over {len(scenario.sigma_grid)} sigma points")
    if len(results) > 1:
        grids = {r.scenario.sigma_grid for r in results.values()}
        if len(grids) == 1:
            write_comparison_csv(os.path.join(args.out, "comparison.csv"), results)
    return 0


def _cmd_scan(args):
    scans = parse_scan_config(args.config)
    os.makedirs(args.out, exist_ok=True)
    for scan_id, spec, family in scans:
        points = run_scan(spec, pure_density(bell_state(family)))
        write_scan_csv(os.path.join(args.out, f"{scan_id}_scan.csv"), points)
        print(f"{scan_id}: {len(points)} angles x {spec.repetitions} repetitions")
    return 0


def _cmd_reconstruct(args):
    mset = build_measurement_set()
    blocks = []
    for scenario_id, state_index, counts in read_counts_csv(args.counts):
        report = reconstruct(counts, mset, args.n_mean)
        text = format_rho_text(report.rho, report.final_objective)
        header, rest = text.split("\n", 1)
        blocks.append(f"{header} scenario_id={scenario_id} state_index={state_index}\n{rest}")
    with open(args.out, "w") as fh:
        fh.write("\n".join(blocks))
    return 0


def _cmd_simulate(args):
    phase = args.phase % _TWO_PI
    family = BellFamily(args.family, phase)
    rho = pure_density(bell_state(family))
    cfg = NoiseConfig(
        sigma=args.sigma,
        p=args.p,
        n_mean=args.n_mean,
        poisson_enabled=not args.no_poisson,
        master_seed=args.seed,
    )
    mset = build_measurement_set()
    counts = simulate_counts(rho, mset, cfg, RngStream.from_seed(args.seed, "simulate", 0))
    print(",".join(["scenario_id", "state_index", *mset.labels]))
    print(",".join([args.family, "0", *(_fmt(c) for c in counts)]))
    return 0


def main(argv=None):
    args = _build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return 2
    try:
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "scan":
            return _cmd_scan(args)
        if args.command == "reconstruct":
            return _cmd_reconstruct(args)
        return _cmd_simulate(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())

"""Command-line surface: scenario runs, sieve searches, trajectories, reports.

Exit codes: 0 for a PASS verdict (or successful data run), 2 for a FAIL
verdict, 1 for usage or config errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io, liealg, lindblad, opsalg, scenarios, sieve, structure, uncertainty
from .gcs import gcs_manifold
from .scenarios import SCENARIO_IDS


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gcsieve",
        description="Coherent-state and pointer-state numerics for Markovian open systems.",
    )
    sub = parser.add_subparsers(dest="command")

    p_sc = sub.add_parser("scenario", help="run a canned verdict-producing scenario")
    p_sc.add_argument("scenario_id", choices=SCENARIO_IDS)
    p_sc.add_argument("--config", help="JSON config overriding the defaults")
    p_sc.add_argument("--out", help="output directory (verdict.json + CSV tables)")

    p_sv = sub.add_parser("sieve", help="multistart pointer-state search for a model file")
    p_sv.add_argument("--model", required=True, help="JSON model file")
    p_sv.add_argument("--objective", default="rate", choices=["rate", "average"])
    p_sv.add_argument("--tau", type=float, default=None, help="averaging window")
    p_sv.add_argument("--starts", type=int, default=None)
    p_sv.add_argument("--seed", type=int, default=0)
    p_sv.add_argument("--out", help="output directory (report.json + minimizers.csv)")

    p_ev = sub.add_parser("evolve", help="propagate a state and write the purity trace")
    p_ev.add_argument("--model", required=True)
    p_ev.add_argument("--state", help="JSON file {re: [...], im: [...]}; default: basis state 0")
    p_ev.add_argument("--tmax", type=float, required=True)
    p_ev.add_argument("--steps", type=int, default=50)
    p_ev.add_argument("--out", help="output directory (trajectory.csv)")

    p_un = sub.add_parser("uncertainty", help="random-state sweep of the uncertainty bound")
    p_un.add_argument("--rep", required=True, help="JSON rep spec {name, parameters}")
    p_un.add_argument("--random", type=int, default=1000)
    p_un.add_argument("--seed", type=int, default=0)
    p_un.add_argument("--out", help="output directory (report.json)")

    p_df = sub.add_parser("dfs", help="extract the decoherence-free subspace of a model")
    p_df.add_argument("--model", required=True)
    p_df.add_argument("--out", help="output directory (dfs.json + basis.csv)")
    return parser


def _load_state(path: str | None, dim: int) -> np.ndarray:
    if path is None:
        v = np.zeros(dim, dtype=complex)
        v[0] = 1.0
        return v
    raw = io.load_json(path)
    v = np.asarray(raw["re"], dtype=float) + 1j * np.asarray(raw.get("im", np.zeros(dim)))
    return v / np.linalg.norm(v)


def run_cli(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    if args.command is None:
        parser.print_help()
        return 1
    try:
        if args.command == "scenario":
            overrides = io.load_json(args.config) if args.config else None
            verdict = scenarios.run_scenario(args.scenario_id, overrides, args.out)
            for c in verdict["checks"]:
                print(f"[{'PASS' if c['passed'] else 'FAIL'}] {verdict['scenario']}:{c['name']}")
            print(f"verdict: {verdict['verdict']}")
            return 0 if verdict["passed"] else 2

        if args.command == "sieve":
            cfg = io.load_json(args.model)
            model = lindblad.model_from_config(cfg)
            objective = sieve.Objective(args.objective, tau=args.tau)
            report = sieve.sieve_search(model, objective, n_starts=args.starts,
                                        seed=args.seed, model_id=Path(args.model).stem)
            print(f"global minimum: {report.global_min_value:.12g} "
                  f"({len(report.minimizers)} distinct minimizers)")
            if args.out:
                out = Path(args.out)
                io.write_json_atomic(out / "report.json", report.to_dict())
                io.write_csv_atomic(out / "minimizers.csv",
                                    ["value", "gcs_infidelity", "converged"],
                                    [[m.value, m.gcs_infidelity, m.converged]
                                     for m in report.minimizers])
            return 0

        if args.command == "evolve":
            cfg = io.load_json(args.model)
            model = lindblad.model_from_config(cfg)
            psi = _load_state(args.state, model.dim)
            if args.tmax < 0:
                raise ValueError("tmax must be nonnegative")
            times = np.linspace(0.0, args.tmax, args.steps + 1)
            trace = lindblad.purity_trace(model, psi, times)
            rows = [[t, p, r] for t, p, r in
                    zip(trace.times, trace.purity, trace.rate_formula)]
            if args.out:
                io.write_csv_atomic(Path(args.out) / "trajectory.csv",
                                    ["t", "purity", "rate_formula"], rows)
            else:
                print("t,purity,rate_formula")
                for t, p, r in rows:
                    print(f"{t:.12g},{p:.12g},{r:.12g}")
            return 0

        if args.command == "uncertainty":
            rep = liealg.rep_from_config(io.load_json(args.rep))
            report = uncertainty.verify_uncertainty_bound(rep, args.random, args.seed)
            print(f"bound: {report['bound']:.12g}  min over {args.random} random states: "
                  f"{report['min_over_random']:.12g}")
            if args.out:
                io.write_json_atomic(Path(args.out) / "report.json", report)
            return 0 if report["bound_respected"] else 2

        if args.command == "dfs":
            cfg = io.load_json(args.model)
            model = lindblad.model_from_config(cfg)
            basis = structure.dfs_extract(model)
            print(f"DFS dimension: {basis.shape[1]}")
            if args.out:
                out = Path(args.out)
                io.write_json_atomic(out / "dfs.json",
                                     {"dim": int(basis.shape[1]), "model_dim": model.dim})
                io.write_csv_atomic(out / "basis.csv",
                                    [f"v{k}" for k in range(basis.shape[1])],
                                    [[f"{z.real:.12g}{z.imag:+.12g}j" for z in row]
                                     for row in basis])
            return 0
    except (ValueError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 1


def main() -> None:
    sys.exit(run_cli())

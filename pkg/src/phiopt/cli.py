"""Command-line front end.

Exit codes: 0 success, 1 bad or conflicting flags / insufficient data,
2 invalid TPM, 3 infeasible network, 4 node-count guardrail.
"""
from __future__ import annotations

import argparse
import csv
import json
import secrets
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    BudgetError, InfeasibleNetworkError, InsufficientDataError, RangeError, ShapeError,
)
from .netmodel import (
    DEFAULT_SEED, Network, first_feasible_state, load_state, load_tpm, reachable_states, validate_state,
)
from .repertoire import members
from .search import METHODS, SearchConfig, best_artifacts
from .stats import run_inference_experiment, sample_population
from .system import DEFAULT_MAX_NODES, big_phi

EXIT_USAGE, EXIT_TPM, EXIT_INFEASIBLE, EXIT_BUDGET = 1, 2, 3, 4

DEFAULTS = {
    "seed": DEFAULT_SEED,
    "out": "out",
    "threads": 1,
    "max_nodes": DEFAULT_MAX_NODES,
    "method": "prior",
    "nodes": "3:4",
    "iters": 50,
    "batch": 5,
    "mu": 0.1,
    "kappa": 0.02,
    "prior": None,
    "reps": 1,
    "timings": False,
    "mode": "binary",
    "samples": 100,
    "a": "3:100",
    "b": "4:100",
}


_SHARED_KEYS = ["seed", "out", "threads", "max_nodes", "mode"]
COMMAND_KEYS = {
    "phi": _SHARED_KEYS + ["tpm_file", "state_file"],
    "search": _SHARED_KEYS + ["method", "nodes", "iters", "batch", "mu", "kappa", "prior", "reps", "timings"],
    "population": _SHARED_KEYS + ["nodes", "samples"],
    "compare": _SHARED_KEYS + ["a", "b"],
}

# Per-command overrides of DEFAULTS.
COMMAND_DEFAULTS = {"population": {"nodes": "3"}}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _shared(p):
    p.add_argument("--seed", help='integer seed, or "random"')
    p.add_argument("--out", help="output directory")
    p.add_argument("--threads", type=int, help="worker processes")
    p.add_argument("--max-nodes", dest="max_nodes", type=int, help="node-count guardrail")
    p.add_argument("--config", help="JSON file with defaults for any flag")
    p.add_argument("--mode", choices=["binary", "probabilistic"], help="TPM sampling mode")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="phiopt", description="Integrated information of small binary networks and search over TPMs.")
    parser.add_argument("--version", action="version", version=f"phiopt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("phi", help="compute Phi for a TPM file")
    p.add_argument("tpm_file")
    p.add_argument("--state", dest="state_file", help="JSON array with the current state")
    _shared(p)

    p = sub.add_parser("search", help="search for high-Phi TPMs")
    p.add_argument("--method", choices=sorted(METHODS))
    p.add_argument("--nodes", help="node-count range MIN:MAX")
    p.add_argument("--iters", type=int)
    p.add_argument("--batch", type=int)
    p.add_argument("--mu", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--prior", help="comma-separated initial prior")
    p.add_argument("--reps", type=int)
    p.add_argument("--timings", action="store_true", default=None,
                   help="also write per-evaluation wall-clock times")
    _shared(p)

    p = sub.add_parser("population", help="mean Phi of random TPMs of one size")
    p.add_argument("--nodes", help="node count")
    p.add_argument("--samples", type=int)
    _shared(p)

    p = sub.add_parser("compare", help="Welch t-test between two node counts")
    p.add_argument("--a", help="NODES:SAMPLES for group a")
    p.add_argument("--b", help="NODES:SAMPLES for group b")
    _shared(p)
    return parser


def _resolve(args) -> dict:
    """Flags override the config file, which overrides built-in defaults."""
    cfg = {}
    if getattr(args, "config", None):
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file: {exc}")
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
        if "command" in cfg and isinstance(cfg.get("config"), dict):
            # a run manifest: replay its resolved parameters
            cfg = cfg["config"]
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    flags = {k: v for k, v in vars(args).items() if v is not None and k != "config"}
    resolved = dict(DEFAULTS)
    resolved.update(COMMAND_DEFAULTS.get(args.command, {}))
    resolved.update({k: v for k, v in cfg.items() if k in DEFAULTS})
    resolved.update(flags)
    seed = resolved["seed"]
    if seed == "random":
        resolved["seed"] = secrets.randbits(63)
    else:
        try:
            resolved["seed"] = int(seed)
        except (TypeError, ValueError):
            raise UsageError(f'--seed must be an integer or "random", got {seed!r}')
    if resolved["threads"] < 1:
        raise UsageError("--threads must be at least 1")
    return {k: resolved.get(k) for k in COMMAND_KEYS[args.command]}


def _pair(text: str, what: str) -> tuple:
    try:
        lo, hi = (int(x) for x in str(text).split(":"))
    except ValueError:
        raise UsageError(f"{what} must look like INT:INT, got {text!r}")
    return lo, hi


def _write_json(path: Path, data):
    path.write_text(json.dumps(data, indent=2) + "\n")


def _manifest(out: Path, command: str, resolved: dict, started: str):
    _write_json(out / "manifest.json", {
        "command": command,
        "config": resolved,
        "seed": resolved["seed"],
        "tool_version": __version__,
        "started": started,
        "finished": datetime.now(timezone.utc).isoformat(),
    })


def _check_guardrail(n: int, limit: int):
    if n > limit:
        raise BudgetError(f"{n} nodes exceeds --max-nodes {limit}")


def cmd_phi(args, resolved, out: Path):
    try:
        tpm = load_tpm(args.tpm_file)
    except OSError as exc:
        raise ShapeError(f"cannot read TPM file: {exc}")
    _check_guardrail(tpm.node_count, resolved["max_nodes"])
    network = Network.from_tpm(tpm)
    if args.state_file:
        state = validate_state(load_state(args.state_file), tpm.node_count)
        if state not in reachable_states(network):
            raise InfeasibleNetworkError(f"state {state} is not reachable under this TPM")
    else:
        report = first_feasible_state(network)
        if not report.feasible:
            raise InfeasibleNetworkError("no reachable state")
        state = report.first_feasible_state
    result = big_phi(network, state, max_nodes=resolved["max_nodes"])
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "phi_result.json", result.to_json())
    print(f"Phi = {result.big_phi:.6f}")
    print(f"state = {list(state)}")
    if result.mip_cut:
        cut = result.mip_cut
        print(f"cut = {list(members(cut.severed_from))} -> {list(members(cut.severed_to))}")
    print(f"{len(result.constellation)} concepts")
    print(f"  {'mechanism':<12} {'phi':>9} {'phi_c':>9} {'phi_e':>9}  cause / effect purview")
    for c in result.constellation.concepts:
        print(f"  {str(list(members(c.mechanism))):<12} {c.phi:9.6f} {c.cause.phi:9.6f} "
              f"{c.effect.phi:9.6f}  {list(members(c.cause.purview))} / {list(members(c.effect.purview))}")


def cmd_search(args, resolved, out: Path):
    method = resolved["method"]
    d_min, d_max = _pair(resolved["nodes"], "--nodes")
    prior = resolved["prior"]
    if method != "prior":
        for flag in ("prior", "mu", "kappa"):
            if getattr(args, flag) is not None:
                raise UsageError(f"--{flag} only applies to --method prior")
    if prior is not None and not isinstance(prior, (list, tuple)):
        try:
            prior = [float(x) for x in str(prior).split(",")]
        except ValueError:
            raise UsageError(f"--prior must be comma-separated numbers, got {prior!r}")
    if resolved["reps"] < 1:
        raise UsageError("--reps must be at least 1")
    _check_guardrail(d_max, resolved["max_nodes"])
    try:
        base = SearchConfig(d_min, d_max, resolved["iters"], resolved["batch"], resolved["mu"],
                            resolved["kappa"], prior, resolved["seed"], resolved["mode"],
                            resolved["max_nodes"])
    except ValueError as exc:
        raise UsageError(str(exc))
    run = METHODS[method]
    results = []
    for rep in range(resolved["reps"]):
        config = SearchConfig(**{**base.__dict__, "seed": base.seed + rep})
        results.append(run(config, workers=resolved["threads"]))

    out.mkdir(parents=True, exist_ok=True)
    with open(out / "trajectory.jsonl", "w") as fh:
        for rep, res in enumerate(results):
            for rec in res.trajectory:
                fh.write(json.dumps({"rep": rep, **rec.to_json()}) + "\n")
    if resolved["timings"]:
        # Kept apart, and opt-in, so the default outputs stay byte-reproducible.
        with open(out / "timings.jsonl", "w") as fh:
            for rep, res in enumerate(results):
                for rec in res.trajectory:
                    fh.write(json.dumps({"rep": rep, "iteration": rec.iteration,
                                         "elapsed": rec.elapsed}) + "\n")
    if method == "prior":
        hist = [[list(p.theta) for p in res.prior_history] for res in results]
        _write_json(out / "prior_history.json", hist[0] if len(hist) == 1 else hist)
    best = max(results, key=lambda r: r.best_phi)
    art = best_artifacts(best)
    _write_json(out / "best_tpm.json", art["tpm"])
    _write_json(out / "best_cm.json", art["cm"])
    _write_json(out / "best_state.json", art["state"])
    curves = np.array([r.best_so_far() for r in results])
    if len(results) > 1:
        with open(out / "mean_trajectory.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "mean_best_phi", "method"])
            for i, v in enumerate(curves.mean(axis=0)):
                writer.writerow([i, repr(float(v)), method])
    finals = curves[:, -1]
    print(f"method = {method}, nodes = {d_min}:{d_max}, iters = {base.total_iters}, reps = {len(results)}")
    print(f"best Phi = {best.best_phi:.6f}")
    if len(results) > 1:
        print(f"mean final best Phi = {finals.mean():.6f} (sd {finals.std(ddof=1):.6f})")
    if method == "prior":
        print(f"final prior = {[round(t, 4) for t in best.prior_history[-1].theta]}")


def _write_values(path: Path, values):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["phi"])
        for v in values:
            writer.writerow([repr(float(v))])


def cmd_population(args, resolved, out: Path):
    try:
        n = int(resolved["nodes"])
    except (TypeError, ValueError):
        raise UsageError(f"--nodes must be an integer, got {resolved['nodes']!r}")
    _check_guardrail(n, resolved["max_nodes"])
    pop = sample_population(n, resolved["samples"], resolved["seed"], resolved["mode"],
                            resolved["max_nodes"], resolved["threads"])
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "population.json", pop.to_json())
    _write_values(out / "phi_values.csv", pop.phi_values)
    print(f"nodes = {n}, samples = {pop.sample_size}")
    print(f"mean Phi (feasible) = {pop.mean:.6f}, 95% CI [{pop.ci95[0]:.6f}, {pop.ci95[1]:.6f}]")
    print(f"mean Phi (infeasible as 0) = {pop.mean_with_zeros:.6f}")
    print(f"infeasible rate = {100 * pop.infeasible_rate:.4f}%")


def cmd_compare(args, resolved, out: Path):
    ga = _pair(resolved["a"], "--a")
    gb = _pair(resolved["b"], "--b")
    for n, _ in (ga, gb):
        _check_guardrail(n, resolved["max_nodes"])
    report = run_inference_experiment(ga, gb, resolved["seed"], mode=resolved["mode"],
                                      max_nodes=resolved["max_nodes"], workers=resolved["threads"])
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "compare.json", report.to_json())
    _write_values(out / "phi_values_a.csv", report.group_a.phi_values)
    _write_values(out / "phi_values_b.csv", report.group_b.phi_values)
    print(f"a: {ga[0]} nodes, mean Phi {report.group_a.mean:.6f} (n={ga[1]})")
    print(f"b: {gb[0]} nodes, mean Phi {report.group_b.mean:.6f} (n={gb[1]})")
    print(f"t = {report.t_statistic:.4f}, dof = {report.dof:.2f}, p = {report.p_value:.4g}")
    verdict = "reject" if report.rejects(0.01) else "fail to reject"
    print(f"alpha = 0.01: {verdict} equal means")


COMMANDS = {"phi": cmd_phi, "search": cmd_search, "population": cmd_population, "compare": cmd_compare}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors, --help, --version
        return exc.code
    started = datetime.now(timezone.utc).isoformat()
    try:
        resolved = _resolve(args)
        out = Path(resolved["out"])
        COMMANDS[args.command](args, resolved, out)
        _manifest(out, args.command, resolved, started)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InsufficientDataError as exc:
        print(f"error: insufficient data: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetError as exc:
        print(f"error: guardrail: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ShapeError, RangeError) as exc:
        if args.command == "phi":
            print(f"error: invalid TPM: {exc}", file=sys.stderr)
            return EXIT_TPM
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleNetworkError as exc:
        print(f"error: infeasible network: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return 0


if __name__ == "__main__":
    sys.exit(main())

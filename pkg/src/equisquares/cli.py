"""Command-line driver: generate instances, run solvers, verify artifacts,
and run the experiment suites with CSV output.

JSON goes to stdout for machine consumption; human-readable notes go to
stderr.  Exit codes: 0 success, 1 verification failure, 2 usage error.
All randomness flows from one seed through named per-site streams, and
trial i of an experiment uses seed + i, so runs are reproducible even
under --parallel.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import bipartite, constructions, halving, hypergraph, solvers, squares
from .rng import stream, trial_seed

EXPERIMENTS = ("missing-colour", "concentration", "greedy-baseline", "peel", "survival")


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _fail_usage(msg: str) -> int:
    _say(f"error: {msg}")
    return 2


# ---------------------------------------------------------------- generate

def cmd_generate(args) -> int:
    out = Path(args.out)
    kind = args.kind
    if kind == "counterexample":
        try:
            square, pairing = constructions.counterexample_square(args.n)
        except constructions.TooSmall as exc:
            return _fail_usage(str(exc))
        squares.write_square(square, out)
        sidecar = out.with_suffix(".pairing.json")
        sidecar.write_text(json.dumps(pairing.to_json(), indent=1) + "\n", encoding="utf-8")
        _say(f"wrote {out} and {sidecar}")
        print(json.dumps({"square": str(out), "pairing": str(sidecar),
                          "bound": pairing.transversal_bound()}))
    elif kind == "random":
        square = constructions.random_equi_square(args.n, seed=args.seed)
        squares.write_square(square, out)
        _say(f"wrote {out}")
        print(json.dumps({"square": str(out)}))
    elif kind == "block":
        if args.m is None:
            return _fail_usage("--m is required for block squares")
        try:
            square, blocks = constructions.block_structured_square(args.n, args.m, seed=args.seed)
        except constructions.NotDivisible as exc:
            return _fail_usage(str(exc))
        squares.write_square(square, out)
        sidecar = out.with_suffix(".blocks.json")
        sidecar.write_text(json.dumps(blocks.to_json(), indent=1) + "\n", encoding="utf-8")
        _say(f"wrote {out} and {sidecar}")
        print(json.dumps({"square": str(out), "blocks": str(sidecar)}))
    elif kind == "cyclic":
        square = constructions.cyclic_latin(args.n)
        squares.write_square(square, out)
        _say(f"wrote {out}")
        print(json.dumps({"square": str(out)}))
    elif kind == "alon-kim":
        try:
            h = hypergraph.alon_kim(args.n)
        except hypergraph.InvalidParam as exc:
            return _fail_usage(str(exc))
        hypergraph.write_hypergraph(h, out)
        _say(f"wrote {out} (t={args.n}: {len(h.edges)} edges)")
        print(json.dumps({"hypergraph": str(out), "t": args.n,
                          "edges": len(h.edges)}))
    else:
        return _fail_usage(f"unknown kind {kind!r}")
    return 0


# ------------------------------------------------------------------- solve

def cmd_solve(args) -> int:
    square = squares.read_square(args.infile)
    n = square.n
    out = Path(args.out) if args.out else Path(str(args.infile) + ".transversal.txt")
    optimal = False

    if args.method == "exact":
        t, optimal = solvers.exact_max(square, node_budget=args.budget)
    elif args.method == "brute":
        try:
            _, t = solvers.brute_force_max(square)
        except solvers.TooLarge as exc:
            return _fail_usage(str(exc))
        optimal = True
    elif args.method == "greedy":
        t = solvers.random_greedy(square, stream(args.seed, "greedy"))
    elif args.method == "local":
        rng = stream(args.seed, "local")
        t = solvers.random_greedy(square, rng)
        iterations = args.iterations if args.iterations else 40 * n
        t = solvers.local_search(square, t, rng, iterations)
    elif args.method == "block":
        if not args.blocks:
            return _fail_usage("--blocks sidecar is required for the block method")
        data = json.loads(Path(args.blocks).read_text(encoding="utf-8"))
        blocks = constructions.BlockStructure.from_json(data)
        s = args.s if args.s else halving.default_cap(n)
        t, _, _ = halving.block_transversal(
            square, blocks, s, stream(args.seed, "block"), rng_seed=args.seed
        )
    else:
        return _fail_usage(f"unknown method {args.method!r}")

    squares.write_transversal(t, out)
    _say(f"{args.method}: size {t.size} of n={n}; cells in {out}")
    print(json.dumps({"size": t.size, "optimal": optimal, "cells_file": str(out)}))
    return 0


# ------------------------------------------------------------------ verify

def cmd_verify(args) -> int:
    report: dict = {"square": None, "transversal": None, "certificate": None}
    try:
        square = squares.read_square(args.square)
        report["square"] = {"n": square.n, "valid": True}
    except (squares.SquareError, OSError) as exc:
        _say(f"square: {type(exc).__name__}: {exc}")
        print(json.dumps({"square": {"valid": False, "error": str(exc)}}))
        return 1

    transversal = None
    if args.transversal:
        try:
            cells = squares.read_transversal(args.transversal)
            transversal = squares.validate_transversal(square, cells)
            report["transversal"] = {"size": transversal.size, "valid": True}
        except (squares.SquareError, OSError) as exc:
            _say(f"transversal: {type(exc).__name__}: {exc}")
            report["transversal"] = {"valid": False, "error": f"{type(exc).__name__}: {exc}"}
            print(json.dumps(report))
            return 1

    if args.pairing:
        pairing = constructions.BoxPairing.from_json(
            json.loads(Path(args.pairing).read_text(encoding="utf-8"))
        )
        target = transversal if transversal is not None else squares.Transversal(())
        try:
            cert = constructions.missing_colour_certificate(square, pairing, target)
            report["certificate"] = {
                "passed": cert.passed,
                "bound": cert.bound,
                "min_missing": min((len(s) for s in cert.missing), default=0),
            }
            if not cert.passed:
                _say("certificate: bound exceeded")
                print(json.dumps(report))
                return 1
        except (constructions.CertificateViolation, constructions.PairingMismatch) as exc:
            _say(f"certificate: {type(exc).__name__}: {exc}")
            report["certificate"] = {"passed": False, "error": str(exc)}
            print(json.dumps(report))
            return 1

    _say("all checks passed")
    print(json.dumps(report))
    return 0


# -------------------------------------------------------------- experiment

@lru_cache(maxsize=8)
def _counterexample_ctx(n: int):
    return constructions.counterexample_square(n)


@lru_cache(maxsize=8)
def _survival_ctx(n: int, m: int, square_seed: int):
    square, blocks = constructions.block_structured_square(n, m, seed=square_seed)
    graph = halving.build_block_multigraph(square, blocks)
    matchings = tuple(bipartite.decompose_regular(graph, n // m))
    return graph, matchings


def _trial_missing_colour(params: tuple) -> dict:
    n, base_seed, trial = params
    square, pairing = _counterexample_ctx(n)
    rng = stream(trial_seed(base_seed, trial), "missing-colour")
    t = solvers.random_greedy(square, rng)
    method = "greedy"
    if trial % 2 == 1:
        t = solvers.local_search(square, t, rng, 40 * n)
        method = "greedy+local"
    try:
        cert = constructions.missing_colour_certificate(square, pairing, t)
        violations = 0 if cert.passed else 1
        min_missing = min(len(s) for s in cert.missing)
    except constructions.CertificateViolation:
        violations, min_missing = 1, 0
    return {"trial": trial, "seed": trial_seed(base_seed, trial), "n": n,
            "method": method, "size": t.size, "violations": violations,
            "min_missing": min_missing}


def _trial_survival(params: tuple) -> dict:
    n, m, s, square_seed, base_seed, trial = params
    graph, matchings = _survival_ctx(n, m, square_seed)
    rng = stream(trial_seed(base_seed, trial), "survival")
    final, _ = halving.iterated_halving(graph, matchings, s, rng)
    return {"trial": trial, "seed": trial_seed(base_seed, trial), "n": n,
            "edge_label": 0, "survived": int(0 in final)}


def _trial_concentration(params: tuple) -> dict:
    n, m, s, base_seed, trial = params
    seed = trial_seed(base_seed, trial)
    square, blocks = constructions.block_structured_square(n, m, seed=seed)
    rng = stream(seed, "concentration")
    _, trace, loads = halving.block_transversal(square, blocks, s, rng, rng_seed=seed)
    dev = np.abs(loads.loads.astype(np.float64) - n / 4)
    within = int((dev <= n / 8).sum())
    sumsq = halving.realized_effect_squares(trace, blocks, n)
    with np.errstate(divide="ignore"):
        bounds = np.minimum(1.0, 2.0 * np.exp(-((n / 8) ** 2) / sumsq))
    return {"trial": trial, "seed": seed, "n": n, "m": m, "s": s,
            "rows_within": within, "frac_within": within / n,
            "p99_abs_dev": float(np.percentile(dev, 99)),
            "mcdiarmid_worst_row": float(bounds.max())}


def _trial_greedy_baseline(params: tuple) -> dict:
    n, base_seed, trial = params
    seed = trial_seed(base_seed, trial)
    square = constructions.random_equi_square(n, seed=seed)
    t = solvers.random_greedy(square, stream(seed, "greedy-baseline"))
    return {"trial": trial, "seed": seed, "n": n, "size": t.size}


def _trial_peel(params: tuple) -> dict:
    n, min_size, base_seed, trial = params
    seed = trial_seed(base_seed, trial)
    square = constructions.random_equi_square(n, seed=seed)
    layers = solvers.peel_decomposition(square, stream(seed, "peel"), min_size)
    return {"trial": trial, "seed": seed, "n": n, "min_size": min_size,
            "layers": len(layers),
            "total_cells": sum(t.size for t in layers)}


def _run_trials(fn, param_list, workers: int) -> list[dict]:
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(fn, param_list))
    else:
        rows = [fn(p) for p in param_list]
    rows.sort(key=lambda r: r["trial"])
    return rows


def cmd_experiment(args) -> int:
    name = args.name
    if name not in EXPERIMENTS:
        return _fail_usage(f"unknown experiment {name!r}")
    trials = range(args.trials)
    if name == "missing-colour":
        params = [(args.n, args.seed, t) for t in trials]
        rows = _run_trials(_trial_missing_colour, params, args.parallel)
    elif name == "survival":
        if args.m is None:
            return _fail_usage("--m is required for the survival experiment")
        s = args.s if args.s else 2 * args.n  # no deletions: every edge survives capping
        params = [(args.n, args.m, s, args.seed, args.seed, t) for t in trials]
        rows = _run_trials(_trial_survival, params, args.parallel)
    elif name == "concentration":
        if args.m is None:
            return _fail_usage("--m is required for the concentration experiment")
        s = args.s if args.s else int(np.ceil(np.sqrt(args.n)))
        params = [(args.n, args.m, s, args.seed, t) for t in trials]
        rows = _run_trials(_trial_concentration, params, args.parallel)
    elif name == "greedy-baseline":
        params = [(args.n, args.seed, t) for t in trials]
        rows = _run_trials(_trial_greedy_baseline, params, args.parallel)
    else:  # peel
        min_size = args.min_size if args.min_size else int(np.ceil(0.9 * args.n))
        params = [(args.n, min_size, args.seed, t) for t in trials]
        rows = _run_trials(_trial_peel, params, args.parallel)

    if rows:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
            writer.writeheader()
            writer.writerows(rows)
    summary = _summarize(name, rows)
    _say(f"{name}: {len(rows)} trials -> {args.csv}")
    print(json.dumps(summary))
    return 0


def _summarize(name: str, rows: list[dict]) -> dict:
    out: dict = {"experiment": name, "trials": len(rows)}
    if not rows:
        return out
    if name == "survival":
        out["survival_frequency"] = sum(r["survived"] for r in rows) / len(rows)
    elif name == "missing-colour":
        out["violations"] = sum(r["violations"] for r in rows)
        out["mean_size"] = sum(r["size"] for r in rows) / len(rows)
    elif name == "concentration":
        out["frac_within_min"] = min(r["frac_within"] for r in rows)
        out["frac_within_mean"] = sum(r["frac_within"] for r in rows) / len(rows)
        out["p99_abs_dev_max"] = max(r["p99_abs_dev"] for r in rows)
    elif name == "greedy-baseline":
        out["mean_size"] = sum(r["size"] for r in rows) / len(rows)
    elif name == "peel":
        out["mean_layers"] = sum(r["layers"] for r in rows) / len(rows)
    return out


# -------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="equisquares",
        description="Equi-n-squares: generators, transversal solvers, verification, experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a square (plus sidecars) to disk")
    g.add_argument("--kind", required=True,
                   choices=["counterexample", "random", "block", "cyclic", "alon-kim"])
    g.add_argument("--n", type=int, required=True,
                   help="order (for alon-kim: the parameter t)")
    g.add_argument("--m", type=int, default=None, help="block size (block kind)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(fn=cmd_generate)

    s = sub.add_parser("solve", help="find a transversal of a square file")
    s.add_argument("--method", required=True,
                   choices=["exact", "brute", "greedy", "local", "block"])
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--out", default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--budget", type=int, default=None, help="node budget for exact")
    s.add_argument("--iterations", type=int, default=None, help="local search steps")
    s.add_argument("--blocks", default=None, help="blocks sidecar (block method)")
    s.add_argument("--s", type=int, default=None, help="component cap (block method)")
    s.set_defaults(fn=cmd_solve)

    v = sub.add_parser("verify", help="validate a square / transversal / certificate")
    v.add_argument("--square", required=True)
    v.add_argument("--transversal", default=None)
    v.add_argument("--pairing", default=None)
    v.set_defaults(fn=cmd_verify)

    e = sub.add_parser("experiment", help="run a trial suite, writing one CSV row per trial")
    e.add_argument("name", choices=EXPERIMENTS)
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--m", type=int, default=None)
    e.add_argument("--s", type=int, default=None)
    e.add_argument("--min-size", type=int, default=None)
    e.add_argument("--trials", type=int, default=100)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--parallel", type=int, default=1)
    e.add_argument("--csv", required=True)
    e.set_defaults(fn=cmd_experiment)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (squares.SquareError, constructions.PairingMismatch,
            constructions.BlockMismatch, halving.NotPowerOfTwo) as exc:
        _say(f"error: {type(exc).__name__}: {exc}")
        return 1
    except FileNotFoundError as exc:
        _say(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())

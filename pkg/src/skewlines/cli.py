"""Command-line interface.

Subcommands: verify, solve, graph, lemma, paley, export.  Machine-readable
JSON goes to standard output, human summaries to standard error.  Exit
codes: 0 holds/success, 1 violation or witness found, 2 invalid input,
3 no convergence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import solver, spectral
from .export import configuration_csv, configuration_obj
from .geometry import ConfigurationError, CoplanarPair, load_configuration, save_configuration
from .signed_graph import (
    BUILTIN_NAMES,
    GraphFormatError,
    SignedCompleteGraph,
    TooLarge,
    UnknownName,
    builtin,
    contains_switching_subgraph,
    find_mono_clique,
    is_balanced,
    load_graph,
    paley_17,
    switch,
    switching_isomorphic,
)

EXIT_OK = 0
EXIT_WITNESS = 1
EXIT_BAD_INPUT = 2
EXIT_NO_CONVERGENCE = 3

DEFAULT_TOL = 1e-8


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def _note(message: str) -> None:
    print(message, file=sys.stderr)


def cmd_verify(args) -> int:
    try:
        config = load_configuration(args.config)
    except ConfigurationError as exc:
        _note(f"error: {exc}")
        return EXIT_BAD_INPUT
    report = solver.verify(config, args.tol)
    _emit(report.to_json_dict())
    if args.report_dir:
        outdir = Path(args.report_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "report.json").write_text(json.dumps(report.to_json_dict(), indent=2) + "\n")
        rows = ["i,j,distance,deviation,class"]
        for (i, j), d, c in zip(report.pairs, report.pairwise_distances, report.pair_classes):
            rows.append(f"{i},{j},{d:.17g},{abs(d - config.target_distance):.17g},{c.value}")
        (outdir / "distances.csv").write_text("\n".join(rows) + "\n")
        from . import figures

        figures.render_deviation_matrix(config, outdir / "deviations.png")
        if report.chirality_graph is not None:
            figures.render_signed_graph(
                report.chirality_graph, outdir / "chirality_graph.png", title="chirality graph"
            )
        _note(f"report bundle written to {outdir}")
    _note(
        f"n={report.n} max|d-target|={report.max_abs_deviation:.3e} "
        f"all_skew={report.all_pairs_skew} passed={report.passed}"
    )
    return EXIT_OK if report.passed else EXIT_WITNESS


def cmd_solve(args) -> int:
    try:
        opts = solver.SolverOptions(
            n=args.n,
            seed=args.seed,
            multistarts=args.multistarts,
            max_iterations=args.max_iter,
            residual_tol=args.tol,
            target_distance=args.target,
        )
    except ValueError as exc:
        _note(f"error: {exc}")
        return EXIT_BAD_INPUT
    try:
        config = solver.solve(opts)
    except solver.NoConvergence as exc:
        _emit({
            "converged": False,
            "best_residual_norm": exc.best_residual_norm,
            "best_start_index": exc.best_start_index,
            "starts": exc.starts,
        })
        _note(f"no convergence: {exc}")
        return EXIT_NO_CONVERGENCE
    if args.out:
        save_configuration(config, args.out)
        _note(f"configuration written to {args.out}")
    report = solver.verify(config, args.verify_tol)
    _emit(report.to_json_dict())
    _note(f"solved n={config.n}: max|d-target|={report.max_abs_deviation:.3e} passed={report.passed}")
    return EXIT_OK if report.passed else EXIT_WITNESS


def _load_graph_arg(value: str) -> SignedCompleteGraph:
    if os.path.exists(value):
        return load_graph(value)
    if value in BUILTIN_NAMES:
        return builtin(value)
    raise GraphFormatError(f"{value!r} is neither a readable file nor a builtin graph name")


def cmd_graph(args) -> int:
    try:
        if args.builtin:
            g = builtin(args.builtin)
        else:
            g = load_graph(args.graph)
    except (UnknownName, GraphFormatError) as exc:
        _note(f"error: {exc}")
        return EXIT_BAD_INPUT
    actions = [a for a in ("find_mono", "balance", "iso", "contains") if getattr(args, a) not in (None, False)]
    if len(actions) != 1:
        _note("error: choose exactly one of --find-mono, --balance, --iso, --contains")
        return EXIT_BAD_INPUT
    action = actions[0]
    try:
        if action == "find_mono":
            witness = find_mono_clique(g, args.find_mono)
            _emit({
                "action": "find_mono",
                "k": args.find_mono,
                "witness": witness.to_json_dict() if witness else None,
            })
            return EXIT_WITNESS if witness else EXIT_OK
        if action == "balance":
            balanced = is_balanced(g)
            _emit({"action": "balance", "balanced": balanced})
            return EXIT_OK if balanced else EXIT_WITNESS
        other = _load_graph_arg(args.iso if action == "iso" else args.contains)
        if action == "iso":
            result = switching_isomorphic(g, other)
            _emit({"action": "iso", "isomorphism": result.to_json_dict() if result else None})
            return EXIT_OK if result else EXIT_WITNESS
        result = contains_switching_subgraph(g, other)
        _emit({"action": "contains", "embedding": result.to_json_dict() if result else None})
        return EXIT_OK if result else EXIT_WITNESS
    except (ValueError, TooLarge, GraphFormatError) as exc:
        _note(f"error: {exc}")
        return EXIT_BAD_INPUT


def cmd_lemma(args) -> int:
    if args.n < 2 or args.trials < 1 or args.zero_tol <= 0:
        _note("error: need n >= 2, trials >= 1, zero-tol > 0")
        return EXIT_BAD_INPUT
    rng = np.random.default_rng(args.seed)
    failures = []
    min_eig = float("inf")
    for trial in range(args.trials):
        vs = _random_direction_set(rng, args.n)
        check = spectral.verify_lemma(vs, args.zero_tol)
        min_eig = min(min_eig, check.min_abs_eigenvalue)
        if not check.passed:
            failures.append({
                "trial": trial,
                "vectors": [[float(x) for x in v] for v in vs],
                "signature": list(check.report.signature),
            })
    _emit({
        "n": args.n,
        "trials": args.trials,
        "seed": args.seed,
        "zero_tol": args.zero_tol,
        "expected_signature": [1, args.n - 1, 0],
        "failures": failures,
        "min_abs_eigenvalue": min_eig,
    })
    _note(f"{args.trials} trials at n={args.n}: {len(failures)} failures")
    return EXIT_OK if not failures else EXIT_WITNESS


def _random_direction_set(rng: np.random.Generator, n: int, min_cross: float = 1e-6) -> np.ndarray:
    while True:
        vs = rng.standard_normal((n, 3))
        vs /= np.linalg.norm(vs, axis=1, keepdims=True)
        crosses = np.linalg.norm(np.cross(vs[:, None, :], vs[None, :, :]), axis=2)
        crosses[np.diag_indices(n)] = 1.0
        if crosses.min() >= min_cross:
            return vs


def cmd_paley(args) -> int:
    g = paley_17()
    flipped = None
    if args.corrupt:
        i, j = args.corrupt
        if not (1 <= i <= 17 and 1 <= j <= 17) or i == j:
            _note("error: --corrupt needs two distinct vertices in 1..17")
            return EXIT_BAD_INPUT
        flipped = sorted((i, j))
        m = g.sign_matrix()
        m[i - 1, j - 1] = m[j - 1, i - 1] = -m[i - 1, j - 1]
        g = SignedCompleteGraph(m)
    witness = find_mono_clique(g, 4)
    subsets = 2380  # C(17, 4)
    residues = sorted({pow(x, 2, 17) for x in range(1, 17)})
    _emit({
        "vertices": 17,
        "subsets_checked": subsets,
        "quadratic_residues": residues,
        "corrupted_edge": flipped,
        "mono_k4": witness.to_json_dict() if witness else None,
    })
    if witness:
        _note(f"monochromatic K4 found: {witness.vertices} sign {witness.sign:+d}")
        return EXIT_WITNESS
    _note(f"{subsets} subsets checked, no monochromatic K4")
    return EXIT_OK


def cmd_export(args) -> int:
    try:
        config = load_configuration(args.config)
    except ConfigurationError as exc:
        _note(f"error: {exc}")
        return EXIT_BAD_INPUT
    out = Path(args.out)
    try:
        if args.format == "csv":
            out.write_text(configuration_csv(config))
        elif args.format == "obj":
            out.write_text(configuration_obj(config, args.radius, args.length))
        else:
            from . import figures

            figures.render_configuration(config, out, length=args.length, radius=args.radius)
    except (OSError, ValueError) as exc:
        _note(f"error: {exc}")
        return EXIT_BAD_INPUT
    _note(f"{args.format} export written to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skewlines",
        description="Verify and search configurations of pairwise unit-distance lines in 3-space.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check a configuration file and emit a verification report")
    p.add_argument("config", help="configuration JSON file")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="max |distance - target| (default 1e-8)")
    p.add_argument("--report-dir", help="also write report.json, distances.csv, and figures here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("solve", help="multistart least-squares search for a configuration")
    p.add_argument("--n", type=int, required=True, help="number of lines (>= 2)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--multistarts", type=int, default=100)
    p.add_argument("--max-iter", type=int, default=300)
    p.add_argument("--tol", type=float, default=1e-16, help="residual tolerance (success bound sqrt(tol)*target)")
    p.add_argument("--verify-tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--target", type=float, default=1.0, help="target pairwise distance")
    p.add_argument("--out", help="write the configuration JSON here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("graph", help="signed-graph queries")
    p.add_argument("graph", nargs="?", help="signed-graph JSON file")
    p.add_argument("--builtin", choices=BUILTIN_NAMES, help="use a built-in graph instead of a file")
    p.add_argument("--find-mono", type=int, metavar="K", help="search for a monochromatic K_k")
    p.add_argument("--balance", action="store_true", help="is the graph switchable to all-positive?")
    p.add_argument("--iso", metavar="OTHER", help="switching isomorphism against a file or builtin name")
    p.add_argument(
        "--contains",
        metavar="OTHER",
        help="switching-subgraph containment of OTHER (file or builtin); "
        "containment is tested up to switching",
    )
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("lemma", help="randomized cross-norm signature certificate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--zero-tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_lemma)

    p = sub.add_parser("paley", help="check the 17-vertex quadratic-residue graph for monochromatic K4")
    p.add_argument("--corrupt", type=int, nargs=2, metavar=("I", "J"), help="flip edge {I, J} first")
    p.set_defaults(func=cmd_paley)

    p = sub.add_parser("export", help="write OBJ cylinders, CSV line parameters, or a PNG rendering")
    p.add_argument("config", help="configuration JSON file")
    p.add_argument("--format", choices=("obj", "csv", "png"), default="csv")
    p.add_argument("--radius", type=float, default=0.5, help="cylinder radius (default target/2 = 0.5)")
    p.add_argument("--length", type=float, default=6.0, help="rendered segment length")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_BAD_INPUT if exc.code not in (0,) else 0
    try:
        return args.func(args)
    except CoplanarPair as exc:
        _note(f"error: {exc}")
        return EXIT_BAD_INPUT


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()

"""Command-line interface: solve, bench, synth, serve."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .bench import ExperimentSpec, run_experiment
from .errors import GroupwillError
from .graph import WeightMode, load_graph
from .ilp import export_ilp, write_lp
from .scenarios import apply_scenario_spec, solve_waso_dis
from .solvers import SolverConfig, solve
from .synth import synthetic_graph, write_instance


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groupwill",
        description="Willingness-maximizing social group selection")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="select a k-node group from a graph")
    ps.add_argument("--graph", required=True, help="edge-list file")
    ps.add_argument("--scores", help="node-score file (v eta [lambda])")
    ps.add_argument("--k", type=int, required=True)
    ps.add_argument("--algo", default="cbas-nd",
                    choices=["dgreedy", "rgreedy", "cbas", "cbas-nd",
                             "cbas-nd-g", "brute"])
    ps.add_argument("--budget", type=int, default=1000, help="total samples T")
    ps.add_argument("--starts", type=int, help="start-node count m (default n/k)")
    ps.add_argument("--stages", type=int, help="stage count r (default: auto)")
    ps.add_argument("--rho", type=float, default=0.3)
    ps.add_argument("--smooth", type=float, default=0.9)
    ps.add_argument("--alpha", type=float, default=0.99)
    ps.add_argument("--pb", type=float, default=0.7)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--workers", type=int, default=1)
    ps.add_argument("--scenario", help="scenario JSON object {kind, ...}")
    ps.add_argument("--weighted-lambda", action="store_true",
                    help="use the lambda-blended objective")
    ps.add_argument("--normalize", action="store_true",
                    help="min-max normalize scores on load")
    ps.add_argument("--export-lp", metavar="PATH",
                    help="write the integer-program model as LP text")
    ps.add_argument("--format", choices=["json", "csv"], default="json")

    pb = sub.add_parser("bench", help="run a parameter sweep")
    pb.add_argument("--spec", required=True, help="experiment spec JSON file")

    pg = sub.add_parser("synth", help="write a synthetic instance")
    pg.add_argument("--nodes", type=int, required=True)
    pg.add_argument("--topology", choices=["ba", "er"], default="ba")
    pg.add_argument("--beta", type=float, default=2.5)
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--edges-per-node", type=int, default=3)
    pg.add_argument("--edge-prob", type=float)
    pg.add_argument("--out", required=True, help="output path prefix")

    pv = sub.add_parser("serve", help="run the planning service")
    pv.add_argument("--host", default="127.0.0.1")
    pv.add_argument("--port", type=int, default=8750)
    pv.add_argument("--state-dir", help="persist sessions as JSON under this dir")
    pv.add_argument("--ui", help="serve static files from this directory")
    return parser


def _cmd_solve(args: argparse.Namespace) -> int:
    graph = load_graph(args.graph, args.scores, normalize=args.normalize)
    mode = WeightMode.LAMBDA_WEIGHTED if args.weighted_lambda else WeightMode.UNWEIGHTED
    separate_eps = None
    labels_graph = graph
    if args.scenario:
        spec = json.loads(args.scenario)
        applied = apply_scenario_spec(graph, spec)
        graph = labels_graph = applied.graph
        if applied.mode is WeightMode.LAMBDA_WEIGHTED:
            mode = applied.mode
        separate_eps = applied.separate_eps
        for note in applied.notes:
            print(f"note: {note}", file=sys.stderr)
    config = SolverConfig(
        k=args.k, budget=args.budget, starts=args.starts, stages=args.stages,
        rho=args.rho, smoothing=args.smooth, alpha=args.alpha,
        confidence=args.pb, seed=args.seed, algorithm=args.algo, mode=mode,
        workers=args.workers)
    if args.export_lp:
        write_lp(export_ilp(graph, args.k), args.export_lp)
        print(f"model written to {args.export_lp}", file=sys.stderr)
    if separate_eps is not None:
        sol = solve_waso_dis(
            graph, args.k,
            lambda g, kk: solve(g, replace(config, k=kk)),
            mode=mode, eps=separate_eps)
    else:
        sol = solve(graph, config)
    members = sol.sorted_members()
    if args.format == "csv":
        print("members,willingness,connected")
        names = " ".join(labels_graph.labels[v] for v in members)
        print(f"{names},{sol.willingness!r},{sol.connected}")
    else:
        print(json.dumps({
            "members": [labels_graph.labels[v] for v in members],
            "member_ids": members,
            "willingness": sol.willingness,
            "connected": sol.connected,
            "algorithm": args.algo,
        }, sort_keys=True))
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    spec = ExperimentSpec.from_json(args.spec)
    rows = run_experiment(spec)
    if spec.output:
        print(f"{len(rows)} rows written to {spec.output}", file=sys.stderr)
    else:
        from .bench import rows_to_csv
        sys.stdout.write(rows_to_csv(rows))
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    graph = synthetic_graph(args.nodes, topology=args.topology, beta=args.beta,
                            seed=args.seed, edges_per_node=args.edges_per_node,
                            edge_prob=args.edge_prob)
    edge_path, score_path = write_instance(graph, args.out)
    print(f"wrote {edge_path} and {score_path}", file=sys.stderr)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve
    serve(host=args.host, port=args.port, state_dir=args.state_dir,
          ui_dir=args.ui)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "synth":
            return _cmd_synth(args)
        if args.command == "serve":
            return _cmd_serve(args)
    except (GroupwillError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

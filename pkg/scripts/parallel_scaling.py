#!/usr/bin/env python3
"""Time the refit solver on a large synthetic network at 1..N workers.

Solutions must be identical at every worker count; wall time should shrink
roughly linearly on machines with real cores.
"""

import argparse
import sys
import time

from groupwill.solvers import SolverConfig, cbas_nd
from groupwill.synth import synthetic_graph


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, default=50_000)
    ap.add_argument("--k", type=int, default=30)
    ap.add_argument("--budget", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=3)
    ap.add_argument("--max-workers", type=int, default=8)
    args = ap.parse_args()

    print(f"building {args.nodes}-node graph ...", file=sys.stderr)
    graph = synthetic_graph(args.nodes, topology="ba", seed=1, edges_per_node=8)
    graph.component_labels()

    reference = None
    worker_counts = [1, 2, 4, args.max_workers]
    for workers in dict.fromkeys(worker_counts):
        cfg = SolverConfig(k=args.k, budget=args.budget, seed=args.seed,
                           workers=workers)
        t0 = time.perf_counter()
        sol = cbas_nd(graph, cfg)
        elapsed = time.perf_counter() - t0
        if reference is None:
            reference = sol
        match = "ok" if sol == reference else "MISMATCH"
        print(f"workers={workers:2d}  {elapsed:7.2f}s  "
              f"willingness={sol.willingness:.4f}  [{match}]")
        if sol != reference:
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

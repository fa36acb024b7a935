"""Edge-stability study: how bootstrap frequencies settle as replicates grow.

Simulates one dataset, reruns the chosen search over increasing numbers of
bootstrap replicates, and prints the frequency table at each step plus the
final consensus graph. Typical use:

    python scripts/bootstrap_stability.py --nodes 6 --samples 2000 --reps 10 30 100
    python scripts/bootstrap_stability.py --algorithm fges --dot consensus.dot
"""

import argparse
from pathlib import Path

from caussearch.facade import ALGORITHMS, SearchSession
from caussearch.graphs import cpdag_of
from caussearch.graph_io import to_edge_list_string
from caussearch.simulate import random_dag, random_sem, simulate


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nodes", type=int, default=6)
    parser.add_argument("--degree", type=float, default=2.0)
    parser.add_argument("--samples", type=int, default=2_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--algorithm", default="pc", choices=list(ALGORITHMS))
    parser.add_argument("--reps", type=int, nargs="+", default=[10, 30, 100])
    parser.add_argument("--dot", help="write the final consensus graph here as DOT")
    args = parser.parse_args()

    dag = random_dag(args.nodes, args.degree, seed=args.seed)
    data = simulate(random_sem(dag, seed=args.seed), n=args.samples, seed=args.seed)
    print("true pattern:")
    print(to_edge_list_string(cpdag_of(dag)))

    result = None
    for reps in args.reps:
        session = SearchSession(data).set_seed(args.seed).set_bootstrapping(reps)
        result = session.run(args.algorithm)
        print(f"--- {args.algorithm}, {reps} replicates ---")
        print(result.get_prob_table())

    print("consensus graph at the largest replicate count:")
    print(result.get_string())
    if args.dot:
        Path(args.dot).write_text(result.get_dot(), encoding="utf-8")
        print(f"wrote {args.dot}")


if __name__ == "__main__":
    main()

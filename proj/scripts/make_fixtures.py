#!/usr/bin/env python3
"""Regenerate data/: real-world edge lists, ground truth and best-known
modularity fixtures.

Graphs come from the copies bundled with networkx, so no network access is
needed. Best-known partitions are the highest-modularity Louvain result over
many seeds; the values are stored once and only read by the C++ code.
"""
import argparse
import json
import pathlib

import networkx as nx
from networkx.algorithms import community


def relabel_sorted(g):
    names = sorted(g.nodes())
    index = {name: i for i, name in enumerate(names)}
    return nx.relabel_nodes(g, index), names


def write_edges(path, g, source):
    with open(path, "w") as f:
        f.write(f"# {source}\n")
        f.write(f"# nodes {g.number_of_nodes()}\n")
        for u, v in sorted(tuple(sorted(e)) for e in g.edges()):
            f.write(f"{u} {v}\n")


def write_partition(path, labels):
    with open(path, "w") as f:
        for node in sorted(labels):
            f.write(f"{node} {labels[node]}\n")


def best_partition(g, seeds):
    best, best_q = None, -1.0
    for seed in range(seeds):
        parts = community.louvain_communities(g, weight=None, seed=seed)
        q = community.modularity(g, parts, weight=None)
        if q > best_q + 1e-12:
            best, best_q = parts, q
    parts = sorted((sorted(p) for p in best), key=lambda p: p[0])
    labels = {node: c for c, p in enumerate(parts) for node in p}
    return labels, best_q


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=pathlib.Path(__file__).resolve().parent.parent / "data",
                        type=pathlib.Path)
    parser.add_argument("--seeds", type=int, default=500)
    parser.add_argument("--dolphins", type=pathlib.Path,
                        help="dolphins.gml (Lusseau et al.), see fetch_datasets.sh")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    entries = []

    karate = nx.karate_club_graph()
    write_edges(args.out / "karate.txt", karate, "Zachary karate club (networkx copy)")
    truth = {n: 0 if karate.nodes[n]["club"] == "Mr. Hi" else 1 for n in karate.nodes()}
    write_partition(args.out / "karate.truth.txt", truth)
    labels, q = best_partition(karate, args.seeds)
    write_partition(args.out / "karate.best.txt", labels)
    entries.append({"name": "karate", "graph": "karate.txt", "truth": "karate.truth.txt",
                    "best_partition": "karate.best.txt", "best_modularity": q,
                    "source": "networkx karate_club_graph; best of Louvain over %d seeds" % args.seeds})

    lesmis, names = relabel_sorted(nx.les_miserables_graph())
    write_edges(args.out / "lesmis.txt", lesmis, "Les Miserables co-appearance (networkx copy, unweighted)")
    with open(args.out / "lesmis.names.txt", "w") as f:
        for i, name in enumerate(names):
            f.write(f"{i} {name}\n")
    labels, q = best_partition(lesmis, args.seeds)
    write_partition(args.out / "lesmis.best.txt", labels)
    entries.append({"name": "lesmis", "graph": "lesmis.txt", "best_partition": "lesmis.best.txt",
                    "best_modularity": q,
                    "source": "networkx les_miserables_graph, nodes in sorted-name order; "
                              "best of Louvain over %d seeds" % args.seeds})

    if args.dolphins:
        dolphins, names = relabel_sorted(nx.read_gml(args.dolphins, label="id"))
        write_edges(args.out / "dolphins.txt", dolphins, "Lusseau dolphin social network")
        labels, q = best_partition(dolphins, args.seeds)
        write_partition(args.out / "dolphins.best.txt", labels)
        entries.append({"name": "dolphins", "graph": "dolphins.txt",
                        "best_partition": "dolphins.best.txt", "best_modularity": q,
                        "source": "%s; best of Louvain over %d seeds" % (args.dolphins.name, args.seeds)})

    with open(args.out / "best_known.json", "w") as f:
        json.dump({"datasets": entries}, f, indent=2)
        f.write("\n")
    for e in entries:
        print(f"{e['name']}: best modularity {e['best_modularity']:.6f}")


if __name__ == "__main__":
    main()

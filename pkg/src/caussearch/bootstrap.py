"""Edge-stability analysis by nonparametric bootstrap.

Each replicate resamples rows with replacement (seed derived from the base
seed and the replicate index, so runs reproduce bit for bit and replicates
are independent), reruns the search, and the per-pair distribution over edge
categories is tabulated. A consensus graph keeps, for every pair, its modal
category.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .data import Dataset, resample
from .errors import ConfigError, IncompatibilityError
from .graphs import Endpoint, MixedGraph

# Categories for a pair (a, b) with a before b in node order; they always
# sum to one. A tail-circle edge has no category here and is rejected.
CATEGORIES = ("-->", "<--", "<->", "o->", "<-o", "o-o", "---", "absent")

# Modal-category ties resolve in this order (absent loses to any edge).
TIE_ORDER = ("-->", "<--", "---", "o->", "<-o", "o-o", "<->", "absent")

_MARKS_TO_CATEGORY = {
    (Endpoint.TAIL, Endpoint.ARROW): "-->",
    (Endpoint.ARROW, Endpoint.TAIL): "<--",
    (Endpoint.ARROW, Endpoint.ARROW): "<->",
    (Endpoint.CIRCLE, Endpoint.ARROW): "o->",
    (Endpoint.ARROW, Endpoint.CIRCLE): "<-o",
    (Endpoint.CIRCLE, Endpoint.CIRCLE): "o-o",
    (Endpoint.TAIL, Endpoint.TAIL): "---",
}

_CATEGORY_TO_MARKS = {v: k for k, v in _MARKS_TO_CATEGORY.items()}


def derive_seed(seed: int, i: int) -> int:
    """Replicate seed: child i of the base seed's spawn tree."""
    return int(np.random.SeedSequence(seed, spawn_key=(i,)).generate_state(1)[0])


def bootstrap_search(
    data: Dataset,
    run: Callable[[Dataset], MixedGraph],
    reps: int,
    seed: int = 0,
) -> list[MixedGraph]:
    """Run the search on `reps` bootstrap resamples of the data."""
    if reps < 1:
        raise ConfigError(f"bootstrap needs at least one replicate, got {reps}")
    graphs = []
    for i in range(reps):
        try:
            graphs.append(run(resample(data, derive_seed(seed, i))))
        except Exception as e:
            if e.args and isinstance(e.args[0], str):
                e.args = (f"bootstrap replicate {i}: {e.args[0]}",) + e.args[1:]
            raise
    return graphs


@dataclass(frozen=True)
class EdgeStatTable:
    """Per-pair edge-category frequencies over an ensemble of graphs."""

    nodes: tuple[str, ...]
    rows: dict[tuple[str, str], dict[str, float]]

    def probability(self, a: str, b: str, category: str) -> float:
        if category not in CATEGORIES:
            raise ConfigError(f"unknown edge category {category!r}")
        pair, flip = self._pair(a, b)
        if flip:
            category = _flip_category(category)
        return self.rows[pair][category]

    def adjacency(self, a: str, b: str) -> float:
        pair, _ = self._pair(a, b)
        return 1.0 - self.rows[pair]["absent"]

    def _pair(self, a: str, b: str) -> tuple[tuple[str, str], bool]:
        ia, ib = self.nodes.index(a), self.nodes.index(b)
        if ia == ib:
            raise ConfigError("pair must name two distinct variables")
        return ((a, b), False) if ia < ib else ((b, a), True)

    def to_text(self) -> str:
        """Stability table: one row per pair ever seen adjacent, 2 decimals."""
        lines = ["pair\t" + "\t".join(CATEGORIES)]
        for (a, b), probs in sorted(
            self.rows.items(), key=lambda kv: (self.nodes.index(kv[0][0]), self.nodes.index(kv[0][1]))
        ):
            if probs["absent"] >= 1.0:
                continue
            cells = "\t".join(f"{probs[c]:.2f}" for c in CATEGORIES)
            lines.append(f"({a}, {b})\t{cells}")
        return "\n".join(lines) + "\n"


def _flip_category(category: str) -> str:
    flips = {"-->": "<--", "<--": "-->", "o->": "<-o", "<-o": "o->"}
    return flips.get(category, category)


def consensus_graph(
    t: EdgeStatTable, threshold: float = 0.5
) -> tuple[MixedGraph, dict[tuple[str, str], float]]:
    """Majority-vote graph over an ensemble.

    A pair enters the consensus when its adjacency frequency (one minus the
    absent frequency) reaches `threshold`. Its edge type is the modal type
    among the seven present categories, ties resolved by TIE_ORDER, and the
    returned labels map each kept pair to that modal frequency.
    """
    if not 0.0 < threshold <= 1.0:
        raise ConfigError(f"consensus threshold must be in (0, 1], got {threshold}")
    present = [c for c in TIE_ORDER if c != "absent"]
    g = MixedGraph(t.nodes)
    freq: dict[tuple[str, str], float] = {}
    for (a, b), probs in sorted(
        t.rows.items(), key=lambda kv: (t.nodes.index(kv[0][0]), t.nodes.index(kv[0][1]))
    ):
        if 1.0 - probs["absent"] < threshold:
            continue
        best = max(present, key=lambda c: (probs[c], -present.index(c)))
        ma, mb = _CATEGORY_TO_MARKS[best]
        g.add_edge(a, b, ma, mb)
        freq[(a, b)] = probs[best]
    return g, freq


def _category_of(g: MixedGraph, a: str, b: str) -> str:
    if not g.has_edge(a, b):
        return "absent"
    marks = g.marks(a, b)
    try:
        return _MARKS_TO_CATEGORY[marks]
    except KeyError:
        raise IncompatibilityError(
            "edge-stability table",
            f"edge {a} {marks[0].value}-{marks[1].value} {b} has no category",
        ) from None


def graphs_to_probs(graphs: Sequence[MixedGraph]) -> EdgeStatTable:
    """Tabulate category frequencies; every row sums to one exactly."""
    if not graphs:
        raise ConfigError("cannot tabulate an empty graph ensemble")
    nodes = graphs[0].nodes
    for g in graphs:
        if g.nodes != nodes:
            raise ConfigError("graph ensemble mixes node sets")
    rows: dict[tuple[str, str], dict[str, float]] = {}
    counts: dict[tuple[str, str], dict[str, int]] = {}
    for i, a in enumerate(nodes):
        for b in nodes[i + 1 :]:
            counts[(a, b)] = {c: 0 for c in CATEGORIES}
    for g in graphs:
        for pair, row in counts.items():
            row[_category_of(g, *pair)] += 1
    m = len(graphs)
    for pair, row in counts.items():
        total = sum(row.values())
        assert total == m
        rows[pair] = {c: row[c] / m for c in CATEGORIES}
    return EdgeStatTable(nodes=nodes, rows=rows)

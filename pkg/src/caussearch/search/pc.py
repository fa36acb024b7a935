"""PC: constraint-based search returning a pattern (CPDAG under assumptions).

Three phases: level-wise skeleton pruning with recorded separating sets,
unshielded-collider orientation, and the orientation closure shared with the
score-based searches. Background knowledge removes both-ways-forbidden
adjacencies up front, pins required edges, and vetoes forbidden arrows.
"""

from __future__ import annotations

from itertools import combinations

from ..graphs import MixedGraph, complete_undirected, meek_closure
from ..knowledge import Knowledge
from . import SearchConfig, SepsetMap


def _required_pair(knowledge: Knowledge | None, x: str, y: str) -> bool:
    if knowledge is None:
        return False
    return (x, y) in knowledge.required or (y, x) in knowledge.required


def _arrow_allowed(knowledge: Knowledge | None, frm: str, to: str) -> bool:
    if knowledge is None:
        return True
    return not knowledge.is_forbidden(frm, to) and (to, frm) not in knowledge.required


def pc_skeleton(
    test, knowledge: Knowledge | None = None, config: SearchConfig | None = None
) -> tuple[MixedGraph, SepsetMap]:
    """Prune the complete graph by independence at increasing depths."""
    config = config or SearchConfig()
    nodes = list(test.variables)
    g = complete_undirected(nodes)
    sepsets = SepsetMap()

    if knowledge is not None:
        for a, b in combinations(nodes, 2):
            if knowledge.forbidden_both_ways(a, b) and not _required_pair(knowledge, a, b):
                g.remove_edge(a, b)  # ruled out, not separated: no sepset

    depth = 0
    p = len(nodes)
    while depth <= config.max_depth(p - 2):
        any_candidates = False
        for x in nodes:
            for y in list(g.adjacent(x)):
                if not g.has_edge(x, y):
                    continue
                if _required_pair(knowledge, x, y):
                    continue
                others = [v for v in g.adjacent(x) if v != y]
                if len(others) < depth:
                    continue
                any_candidates = True
                for z in combinations(others, depth):
                    if test.decide(x, y, z).independent:
                        g.remove_edge(x, y)
                        sepsets.record(x, y, z)
                        break
        if not any_candidates:
            break
        depth += 1
    return g, sepsets


def orient_colliders(
    g: MixedGraph,
    sepsets: SepsetMap,
    knowledge: Knowledge | None = None,
    config: SearchConfig | None = None,
) -> None:
    """Orient x -> z <- y at unshielded triples where z is not in sepset(x, y)."""
    config = config or SearchConfig()
    for z in g.nodes:
        for x, y in combinations(g.adjacent(z), 2):
            if g.has_edge(x, y):
                continue
            sep = sepsets.get(x, y)
            if sep is None or z in sep:
                continue
            for tail in (x, y):
                if not _arrow_allowed(knowledge, tail, z):
                    config.note(f"knowledge blocks collider arrow {tail} -> {z}")
                    continue
                if g.is_directed(z, tail):
                    config.note(f"collider conflict: {z} -> {tail} already oriented")
                    continue
                if not g.is_directed(tail, z):
                    g.orient(tail, z)
    return None


def pc_search(
    test, knowledge: Knowledge | None = None, config: SearchConfig | None = None
) -> MixedGraph:
    config = config or SearchConfig()
    g, sepsets = pc_skeleton(test, knowledge, config)
    orient_colliders(g, sepsets, knowledge, config)
    return meek_closure(g, knowledge)

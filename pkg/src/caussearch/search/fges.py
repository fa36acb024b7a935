"""Greedy equivalence search with decomposable local scores.

Two phases over patterns: forward equivalence search applies the best
positive-gain Insert(x, y, T) until none remains, then backward equivalence
search applies the best positive-gain Delete(x, y, H). After every applied
operator the graph is reverted to its unshielded-collider skeleton and
re-closed under the orientation rules, so the state stays a valid pattern.

Operator definitions and gain formulas follow the classic GES treatment:
  Insert gain  = s(y, Pa + NAyx + T + x) - s(y, Pa + NAyx + T)
  Delete gain  = s(y, Pa - x + NAyx - H) - s(y, Pa + x + NAyx - H)
where NAyx is the set of undirected neighbors of y that are adjacent to x.
"""

from __future__ import annotations

from itertools import combinations

from ..graphs import Endpoint, EdgeType, MixedGraph, meek_closure
from ..knowledge import Knowledge
from . import SearchConfig
from .pc import _arrow_allowed, _required_pair


def _na(g: MixedGraph, y: str, x: str) -> list[str]:
    """Undirected neighbors of y that are adjacent to x."""
    adj_x = set(g.adjacent(x))
    return [v for v in g.undirected_neighbors(y) if v in adj_x]


def _is_clique(g: MixedGraph, vs) -> bool:
    return all(g.has_edge(a, b) for a, b in combinations(vs, 2))


def _blocks_semidirected(g: MixedGraph, frm: str, to: str, blocked: set[str]) -> bool:
    """True iff every semidirected path frm ~> to passes through blocked."""
    if frm in blocked:
        return True
    seen = {frm}
    stack = [frm]
    while stack:
        v = stack.pop()
        if v == to:
            return False
        for w in g.adjacent(v):
            if w in seen or w in blocked:
                continue
            if g.mark_at(v, w) is Endpoint.TAIL:  # v --- w or v --> w
                seen.add(w)
                stack.append(w)
    return True


def rebuild_pattern(g: MixedGraph, knowledge: Knowledge | None = None) -> MixedGraph:
    """Undirect everything except unshielded-collider arrows, then re-close."""
    out = MixedGraph(g.nodes)
    for a, b, _, _ in g.edges():
        out.add_undirected(a, b)
    for v in g.nodes:
        for a, b in combinations(g.parents(v), 2):
            if not g.has_edge(a, b):
                out.orient(a, v)
                out.orient(b, v)
    return meek_closure(out, knowledge)


def _insert(g: MixedGraph, x: str, y: str, t: tuple[str, ...]) -> MixedGraph:
    out = g.copy()
    out.add_directed(x, y)
    for v in t:
        out.orient(v, y)
    return out


def _delete(g: MixedGraph, x: str, y: str, h: tuple[str, ...]) -> MixedGraph:
    out = g.copy()
    out.remove_edge(x, y)
    for v in h:
        out.orient(y, v)
        if out.has_edge(x, v) and out.type_of(x, v) is EdgeType.UNDIRECTED:
            out.orient(x, v)
    return out


def _forward_pass(g, score, knowledge, config):
    """Best positive Insert, or None."""
    best = None
    best_delta = 0.0
    nodes = g.nodes
    for y in nodes:
        pa_y = g.parents(y)
        for x in nodes:
            if x == y or g.has_edge(x, y):
                continue
            if not _arrow_allowed(knowledge, x, y):
                continue
            na = _na(g, y, x)
            adj_x = set(g.adjacent(x))
            cands = [
                v
                for v in g.undirected_neighbors(y)
                if v not in adj_x and _arrow_allowed(knowledge, v, y)
            ]
            for size in range(len(cands) + 1):
                for t in combinations(cands, size):
                    union = na + list(t)
                    if not _is_clique(g, union):
                        continue
                    if not _blocks_semidirected(g, y, x, set(union)):
                        continue
                    base = sorted(set(pa_y) | set(union))
                    delta = score.local(y, base + [x]) - score.local(y, base)
                    if delta > best_delta:
                        best = (x, y, t)
                        best_delta = delta
    if best is None:
        return None
    x, y, t = best
    config.note(f"insert {x} -> {y} with T={list(t)} (gain {best_delta:.6g})")
    return _insert(g, x, y, t)


def _backward_pass(g, score, knowledge, config):
    """Best positive Delete, or None."""
    best = None
    best_delta = 0.0
    for a, b, ma, mb in list(g.edges()):
        pairs = []
        t = g.type_of(a, b)
        if t is EdgeType.DIRECTED:
            pairs.append((a, b) if mb is Endpoint.ARROW else (b, a))
        elif t is EdgeType.UNDIRECTED:
            pairs.extend([(a, b), (b, a)])
        for x, y in pairs:
            if _required_pair(knowledge, x, y):
                continue
            na = _na(g, y, x)
            pool = [
                v
                for v in na
                if _arrow_allowed(knowledge, y, v)
                and (
                    g.type_of(x, v) is not EdgeType.UNDIRECTED
                    or _arrow_allowed(knowledge, x, v)
                )
            ]
            pa_y = g.parents(y)
            pa_minus = [v for v in pa_y if v != x]
            for size in range(len(pool) + 1):
                for h in combinations(pool, size):
                    rest = [v for v in na if v not in h]
                    if not _is_clique(g, rest):
                        continue
                    keep = sorted(set(pa_minus) | set(rest))
                    delta = score.local(y, keep) - score.local(y, sorted(set(keep) | {x}))
                    if delta > best_delta:
                        best = (x, y, h)
                        best_delta = delta
    if best is None:
        return None
    x, y, h = best
    config.note(f"delete {x} -- {y} with H={list(h)} (gain {best_delta:.6g})")
    return _delete(g, x, y, h)


def fges_search(
    score, knowledge: Knowledge | None = None, config: SearchConfig | None = None
) -> MixedGraph:
    config = config or SearchConfig()
    g = MixedGraph(score.variables)
    if knowledge is not None:
        for frm, to in sorted(knowledge.required):
            if not g.has_edge(frm, to):
                g.add_directed(frm, to)
        g = rebuild_pattern(g, knowledge)
    while True:
        nxt = _forward_pass(g, score, knowledge, config)
        if nxt is None:
            break
        g = rebuild_pattern(nxt, knowledge)
    while True:
        nxt = _backward_pass(g, score, knowledge, config)
        if nxt is None:
            break
        g = rebuild_pattern(nxt, knowledge)
    return g

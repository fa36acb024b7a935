"""FCI: constraint-based search tolerant of latent confounders, output a PAG.

Pipeline: PC-style skeleton with separating sets, collider orientation,
possible-d-sep pruning, then re-orientation from scratch — background
knowledge marks, colliders, and the four Zhang closure rules including the
discriminating-path rule. Non-circle marks are never overwritten; a rule
that would contradict one is skipped and logged.
"""

from __future__ import annotations

from itertools import combinations

from ..graphs import Endpoint, MixedGraph
from ..knowledge import Knowledge
from . import SearchConfig, SepsetMap
from .pc import pc_skeleton


def _set_mark(g: MixedGraph, at: str, other: str, mark: Endpoint, config: SearchConfig) -> bool:
    """Upgrade a circle mark; refuse (and log) changes to decided marks."""
    cur = g.mark_at(at, other)
    if cur is mark:
        return False
    if cur is not Endpoint.CIRCLE:
        config.note(f"orientation conflict: mark at {at} on {at}-{other} already {cur.value}")
        return False
    g.set_mark_at(at, other, mark)
    return True


def _apply_knowledge_marks(g: MixedGraph, knowledge: Knowledge | None, config: SearchConfig) -> None:
    if knowledge is None:
        return
    for a, b, _, _ in list(g.edges()):
        for frm, to in ((a, b), (b, a)):
            if (frm, to) in knowledge.required:
                _set_mark(g, frm, to, Endpoint.TAIL, config)
                _set_mark(g, to, frm, Endpoint.ARROW, config)
            elif knowledge.is_forbidden(frm, to):
                # frm cannot be an ancestor of to: arrowhead lands at frm
                _set_mark(g, frm, to, Endpoint.ARROW, config)


def _orient_colliders_circles(
    g: MixedGraph, sepsets: SepsetMap, config: SearchConfig
) -> None:
    for z in g.nodes:
        for x, y in combinations(g.adjacent(z), 2):
            if g.has_edge(x, y):
                continue
            sep = sepsets.get(x, y)
            if sep is None or z in sep:
                continue
            _set_mark(g, z, x, Endpoint.ARROW, config)
            _set_mark(g, z, y, Endpoint.ARROW, config)


def _circles(skeleton: MixedGraph) -> MixedGraph:
    g = MixedGraph(skeleton.nodes)
    for a, b, _, _ in skeleton.edges():
        g.add_edge(a, b, Endpoint.CIRCLE, Endpoint.CIRCLE)
    return g


def possible_d_sep(g: MixedGraph, x: str) -> list[str]:
    """Nodes reachable from x along paths whose interior nodes are each
    either a collider on the path or in a triangle with their path neighbors."""
    reached: set[str] = set()
    seen: set[tuple[str, str]] = set()
    frontier = [(x, v) for v in g.adjacent(x)]
    for pair in frontier:
        seen.add(pair)
        reached.add(pair[1])
    while frontier:
        prev, cur = frontier.pop()
        for nxt in g.adjacent(cur):
            if nxt == prev or nxt == x:
                continue
            collider = (
                g.mark_at(cur, prev) is Endpoint.ARROW
                and g.mark_at(cur, nxt) is Endpoint.ARROW
            )
            triangle = g.has_edge(prev, nxt)
            if not (collider or triangle):
                continue
            if (cur, nxt) in seen:
                continue
            seen.add((cur, nxt))
            reached.add(nxt)
            frontier.append((cur, nxt))
    reached.discard(x)
    return sorted(reached, key=g.index)


def _possible_d_sep_prune(
    g: MixedGraph, sepsets: SepsetMap, test, config: SearchConfig
) -> None:
    pds = {v: possible_d_sep(g, v) for v in g.nodes}
    for a, b, _, _ in list(g.edges()):
        removed = False
        for anchor, other in ((a, b), (b, a)):
            cands = [v for v in pds[anchor] if v != other]
            cap = config.max_depth(len(cands))
            for size in range(1, cap + 1):
                for s in combinations(cands, size):
                    if test.decide(a, b, s).independent:
                        g.remove_edge(a, b)
                        sepsets.record(a, b, s)
                        removed = True
                        break
                if removed:
                    break
            if removed:
                break


# -- Zhang closure rules ------------------------------------------------------


def _rule_r1(g: MixedGraph, config: SearchConfig) -> bool:
    changed = False
    for b in g.nodes:
        for a, c in combinations(g.adjacent(b), 2):
            if g.has_edge(a, c):
                continue
            for a, c in ((a, c), (c, a)):
                if g.mark_at(b, a) is Endpoint.ARROW and g.mark_at(b, c) is Endpoint.CIRCLE:
                    changed |= _set_mark(g, b, c, Endpoint.TAIL, config)
                    changed |= _set_mark(g, c, b, Endpoint.ARROW, config)
    return changed


def _rule_r2(g: MixedGraph, config: SearchConfig) -> bool:
    changed = False
    for a, c, ma, mc in list(g.edges()):
        for a, c in ((a, c), (c, a)):
            if g.mark_at(c, a) is not Endpoint.CIRCLE:
                continue
            for b in g.adjacent(a):
                if b == c or not g.has_edge(b, c):
                    continue
                chain1 = g.is_directed(a, b) and g.mark_at(c, b) is Endpoint.ARROW
                chain2 = g.mark_at(b, a) is Endpoint.ARROW and g.is_directed(b, c)
                if chain1 or chain2:
                    changed |= _set_mark(g, c, a, Endpoint.ARROW, config)
                    break
    return changed


def _rule_r3(g: MixedGraph, config: SearchConfig) -> bool:
    changed = False
    for b in g.nodes:
        into_b = [v for v in g.adjacent(b) if g.mark_at(b, v) is Endpoint.ARROW]
        for a, c in combinations(into_b, 2):
            if g.has_edge(a, c):
                continue
            for d in g.adjacent(b):
                if d in (a, c):
                    continue
                if not (g.has_edge(a, d) and g.has_edge(c, d)):
                    continue
                if g.mark_at(d, a) is not Endpoint.CIRCLE:
                    continue
                if g.mark_at(d, c) is not Endpoint.CIRCLE:
                    continue
                if g.mark_at(b, d) is Endpoint.CIRCLE:
                    changed |= _set_mark(g, b, d, Endpoint.ARROW, config)
    return changed


def _discriminating_paths(g: MixedGraph, b: str, c: str):
    """Yield (theta, a) endpoints of discriminating paths <theta ... a b c>."""
    starts = [
        a
        for a in g.adjacent(b)
        if a != c and g.mark_at(a, b) is Endpoint.ARROW and g.is_directed(a, c)
    ]
    for a in starts:
        stack = [(b, a, {b, c, a})]
        while stack:
            came_from, cur, on_path = stack.pop()
            for w in g.adjacent(cur):
                if w in on_path:
                    continue
                if g.mark_at(cur, w) is not Endpoint.ARROW:
                    continue  # cur must be a collider on the path
                if not g.has_edge(w, c):
                    yield w, a
                elif g.is_directed(w, c) and g.mark_at(w, cur) is Endpoint.ARROW:
                    stack.append((cur, w, on_path | {w}))


def _rule_r4(g: MixedGraph, sepsets: SepsetMap, config: SearchConfig) -> bool:
    changed = False
    for b, c, _, _ in list(g.edges()):
        for b, c in ((b, c), (c, b)):
            if g.mark_at(b, c) is not Endpoint.CIRCLE:
                continue
            for theta, a in _discriminating_paths(g, b, c):
                sep = sepsets.get(theta, c)
                if sep is None:
                    continue
                if b in sep:
                    changed |= _set_mark(g, b, c, Endpoint.TAIL, config)
                    changed |= _set_mark(g, c, b, Endpoint.ARROW, config)
                else:
                    changed |= _set_mark(g, a, b, Endpoint.ARROW, config)
                    changed |= _set_mark(g, b, a, Endpoint.ARROW, config)
                    changed |= _set_mark(g, b, c, Endpoint.ARROW, config)
                    changed |= _set_mark(g, c, b, Endpoint.ARROW, config)
                break
    return changed


def zhang_closure(
    g: MixedGraph, sepsets: SepsetMap, knowledge: Knowledge | None, config: SearchConfig
) -> None:
    changed = True
    while changed:
        changed = _rule_r1(g, config)
        changed |= _rule_r2(g, config)
        changed |= _rule_r3(g, config)
        changed |= _rule_r4(g, sepsets, config)


def fci_search(
    test, knowledge: Knowledge | None = None, config: SearchConfig | None = None
) -> MixedGraph:
    config = config or SearchConfig()
    skeleton, sepsets = pc_skeleton(test, knowledge, config)

    g = _circles(skeleton)
    _apply_knowledge_marks(g, knowledge, config)
    _orient_colliders_circles(g, sepsets, config)
    _possible_d_sep_prune(g, sepsets, test, config)

    g = _circles(g)
    _apply_knowledge_marks(g, knowledge, config)
    _orient_colliders_circles(g, sepsets, config)
    zhang_closure(g, sepsets, knowledge, config)
    return g

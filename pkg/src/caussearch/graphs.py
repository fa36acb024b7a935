"""Endpoint-marked graphs shared by every search algorithm.

A MixedGraph stores at most one edge per unordered node pair; each edge
carries a mark at both ends drawn from {TAIL, ARROW, CIRCLE}. DAGs, CPDAGs
and PAGs are all views of the same structure:

    a --> b   TAIL at a, ARROW at b   (directed)
    a <-> b   ARROW at both           (bidirected)
    a --- b   TAIL at both            (undirected)
    a o-> b   CIRCLE at a, ARROW at b (partial)
    a o-o b   CIRCLE at both          (nondirected)
    a o-- b   CIRCLE at a, TAIL at b  (partial undirected)

Iteration is everywhere in node-index order so that algorithm output is
reproducible bit for bit.
"""

from __future__ import annotations

import enum
import itertools
import logging
from typing import Iterable, Iterator, Sequence

from .errors import NotADagError

log = logging.getLogger(__name__)


class Endpoint(enum.Enum):
    TAIL = "-"
    ARROW = ">"
    CIRCLE = "o"


class EdgeType(enum.Enum):
    DIRECTED = "-->"
    BIDIRECTED = "<->"
    UNDIRECTED = "---"
    PARTIAL = "o->"
    NONDIRECTED = "o-o"
    PARTIAL_UNDIRECTED = "o--"


# Unordered mark pair -> edge type (bijective).
_TYPE_OF_MARKS = {
    frozenset({Endpoint.TAIL, Endpoint.ARROW}): EdgeType.DIRECTED,
    frozenset({Endpoint.ARROW}): EdgeType.BIDIRECTED,
    frozenset({Endpoint.TAIL}): EdgeType.UNDIRECTED,
    frozenset({Endpoint.CIRCLE, Endpoint.ARROW}): EdgeType.PARTIAL,
    frozenset({Endpoint.CIRCLE}): EdgeType.NONDIRECTED,
    frozenset({Endpoint.CIRCLE, Endpoint.TAIL}): EdgeType.PARTIAL_UNDIRECTED,
}


def edge_type(mark_a: Endpoint, mark_b: Endpoint) -> EdgeType:
    return _TYPE_OF_MARKS[frozenset({mark_a, mark_b})]


def marks_of_type(t: EdgeType) -> frozenset[Endpoint]:
    for marks, typ in _TYPE_OF_MARKS.items():
        if typ is t:
            return marks
    raise ValueError(t)


class MixedGraph:
    """Node list plus one marked edge per unordered pair."""

    def __init__(self, nodes: Iterable[str]):
        self._nodes: tuple[str, ...] = tuple(nodes)
        if len(set(self._nodes)) != len(self._nodes):
            raise ValueError("duplicate node names")
        self._index = {n: i for i, n in enumerate(self._nodes)}
        # key (i, j) with i < j -> (mark at i, mark at j)
        self._edges: dict[tuple[int, int], tuple[Endpoint, Endpoint]] = {}

    # -- basic structure ---------------------------------------------------

    @property
    def nodes(self) -> tuple[str, ...]:
        return self._nodes

    def index(self, node: str) -> int:
        try:
            return self._index[node]
        except KeyError:
            raise KeyError(f"unknown node {node!r}") from None

    def __contains__(self, node: str) -> bool:
        return node in self._index

    def edge_count(self) -> int:
        return len(self._edges)

    def _key(self, a: str, b: str) -> tuple[tuple[int, int], bool]:
        i, j = self.index(a), self.index(b)
        if i == j:
            raise ValueError(f"self loop at {a!r}")
        return ((i, j), False) if i < j else ((j, i), True)

    def has_edge(self, a: str, b: str) -> bool:
        key, _ = self._key(a, b)
        return key in self._edges

    def add_edge(self, a: str, b: str, mark_at_a: Endpoint, mark_at_b: Endpoint) -> None:
        key, swapped = self._key(a, b)
        if key in self._edges:
            raise ValueError(f"edge {a!r}-{b!r} already present")
        self._edges[key] = (mark_at_b, mark_at_a) if swapped else (mark_at_a, mark_at_b)

    def add_directed(self, tail: str, head: str) -> None:
        self.add_edge(tail, head, Endpoint.TAIL, Endpoint.ARROW)

    def add_undirected(self, a: str, b: str) -> None:
        self.add_edge(a, b, Endpoint.TAIL, Endpoint.TAIL)

    def remove_edge(self, a: str, b: str) -> None:
        key, _ = self._key(a, b)
        if key not in self._edges:
            raise ValueError(f"no edge {a!r}-{b!r}")
        del self._edges[key]

    def marks(self, a: str, b: str) -> tuple[Endpoint, Endpoint]:
        """Marks as (mark at a, mark at b) regardless of storage order."""
        key, swapped = self._key(a, b)
        ma, mb = self._edges[key]
        return (mb, ma) if swapped else (ma, mb)

    def mark_at(self, a: str, b: str) -> Endpoint:
        """The mark at node a on the edge between a and b."""
        return self.marks(a, b)[0]

    def set_marks(self, a: str, b: str, mark_at_a: Endpoint, mark_at_b: Endpoint) -> None:
        key, swapped = self._key(a, b)
        if key not in self._edges:
            raise ValueError(f"no edge {a!r}-{b!r}")
        self._edges[key] = (mark_at_b, mark_at_a) if swapped else (mark_at_a, mark_at_b)

    def set_mark_at(self, a: str, b: str, mark: Endpoint) -> None:
        ma, mb = self.marks(a, b)
        self.set_marks(a, b, mark, mb)

    def orient(self, tail: str, head: str) -> None:
        """Turn the existing edge into tail --> head."""
        self.set_marks(tail, head, Endpoint.TAIL, Endpoint.ARROW)

    def type_of(self, a: str, b: str) -> EdgeType:
        ma, mb = self.marks(a, b)
        return edge_type(ma, mb)

    def edges(self) -> Iterator[tuple[str, str, Endpoint, Endpoint]]:
        """Edges as (a, b, mark at a, mark at b) with index(a) < index(b)."""
        for (i, j) in sorted(self._edges):
            ma, mb = self._edges[(i, j)]
            yield self._nodes[i], self._nodes[j], ma, mb

    # -- neighborhood views (always sorted by node index) -------------------

    def adjacent(self, v: str) -> list[str]:
        i = self.index(v)
        out = []
        for (a, b) in self._edges:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return [self._nodes[k] for k in sorted(out)]

    def parents(self, v: str) -> list[str]:
        """Nodes u with a directed edge u --> v."""
        out = []
        for u in self.adjacent(v):
            if self.marks(u, v) == (Endpoint.TAIL, Endpoint.ARROW):
                out.append(u)
        return out

    def children(self, v: str) -> list[str]:
        out = []
        for u in self.adjacent(v):
            if self.marks(v, u) == (Endpoint.TAIL, Endpoint.ARROW):
                out.append(u)
        return out

    def undirected_neighbors(self, v: str) -> list[str]:
        out = []
        for u in self.adjacent(v):
            if self.type_of(u, v) is EdgeType.UNDIRECTED:
                out.append(u)
        return out

    def is_directed(self, tail: str, head: str) -> bool:
        return self.has_edge(tail, head) and self.marks(tail, head) == (
            Endpoint.TAIL,
            Endpoint.ARROW,
        )

    def arrow_at(self, a: str, b: str) -> bool:
        """True when the edge a-b exists and carries an arrow mark at a."""
        return self.has_edge(a, b) and self.mark_at(a, b) is Endpoint.ARROW

    # -- value semantics -----------------------------------------------------

    def copy(self) -> "MixedGraph":
        g = MixedGraph(self._nodes)
        g._edges = dict(self._edges)
        return g

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MixedGraph)
            and self._nodes == other._nodes
            and self._edges == other._edges
        )

    def __hash__(self):
        return hash((self._nodes, tuple(sorted(self._edges.items(), key=lambda kv: kv[0]))))

    def __repr__(self) -> str:
        parts = []
        for a, b, ma, mb in self.edges():
            parts.append(f"{a} {edge_type(ma, mb).value} {b}")
        return f"MixedGraph({list(self._nodes)!r}, [{', '.join(parts)}])"


def complete_undirected(nodes: Sequence[str]) -> MixedGraph:
    g = MixedGraph(nodes)
    for a, b in itertools.combinations(nodes, 2):
        g.add_undirected(a, b)
    return g


# -- DAG utilities ----------------------------------------------------------


def is_dag(g: MixedGraph) -> tuple[bool, list[str] | None]:
    """True plus a topological order iff all edges are directed and acyclic.

    Ties in the order are broken by node index.
    """
    for a, b, ma, mb in g.edges():
        if edge_type(ma, mb) is not EdgeType.DIRECTED:
            return False, None
    indeg = {v: len(g.parents(v)) for v in g.nodes}
    ready = [v for v in g.nodes if indeg[v] == 0]
    order: list[str] = []
    while ready:
        ready.sort(key=g.index)
        v = ready.pop(0)
        order.append(v)
        for c in g.children(v):
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
    if len(order) != len(g.nodes):
        return False, None
    return True, order


def _require_dag(g: MixedGraph) -> list[str]:
    ok, order = is_dag(g)
    if not ok:
        raise NotADagError("graph is not a DAG")
    return order  # type: ignore[return-value]


def ancestors(g: MixedGraph, targets: Iterable[str]) -> set[str]:
    """Targets plus every node with a directed path into them."""
    seen = set(targets)
    stack = list(seen)
    while stack:
        v = stack.pop()
        for p in g.parents(v):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def d_separated(g: MixedGraph, x: str, y: str, z: Iterable[str]) -> bool:
    """Standard d-separation on a DAG via active-trail reachability.

    A collider on a trail is open iff it or one of its descendants is in z.
    """
    _require_dag(g)
    zset = set(z)
    for v in (x, y, *zset):
        g.index(v)
    if x == y:
        raise ValueError("x and y must differ")
    if x in zset or y in zset:
        raise ValueError("x and y must not be in the conditioning set")

    an_z = ancestors(g, zset) if zset else set()

    # States: (node, came_from_child). Seed behaves like arrival from a child,
    # so the trail may leave x in any direction.
    visited = set()
    frontier = [(x, True)]
    while frontier:
        v, from_child = frontier.pop()
        if (v, from_child) in visited:
            continue
        visited.add((v, from_child))
        if v == y:
            return False
        if from_child:
            if v not in zset:
                for p in g.parents(v):
                    frontier.append((p, True))
                for c in g.children(v):
                    frontier.append((c, False))
        else:
            if v not in zset:
                for c in g.children(v):
                    frontier.append((c, False))
            if v in an_z:
                for p in g.parents(v):
                    frontier.append((p, True))
    return True


# -- patterns: Meek closure and CPDAGs ---------------------------------------


def _orient_if_allowed(g: MixedGraph, a: str, b: str, knowledge) -> bool:
    """Direct a --- b as a --> b unless knowledge forbids it."""
    if knowledge is not None and knowledge.is_forbidden(a, b):
        return False
    g.orient(a, b)
    return True


def _force_knowledge(g: MixedGraph, knowledge, conflicts: list[tuple[str, str]]) -> bool:
    """Orient undirected edges whose one direction knowledge forbids."""
    if knowledge is None:
        return False
    changed = False
    for a, b, ma, mb in list(g.edges()):
        if edge_type(ma, mb) is not EdgeType.UNDIRECTED:
            continue
        fab = knowledge.is_forbidden(a, b)
        fba = knowledge.is_forbidden(b, a)
        if fab and fba:
            if (a, b) not in conflicts:
                conflicts.append((a, b))
                log.warning("knowledge forbids both directions of %s --- %s; left undirected", a, b)
        elif fab:
            g.orient(b, a)
            changed = True
        elif fba:
            g.orient(a, b)
            changed = True
    for a, b in sorted(getattr(knowledge, "required", ()) or ()):
        if a in g and b in g and g.has_edge(a, b) and g.type_of(a, b) is EdgeType.UNDIRECTED:
            g.orient(a, b)
            changed = True
    return changed


def meek_closure(g: MixedGraph, knowledge=None) -> MixedGraph:
    """Close a pattern of directed/undirected edges under Meek rules R1-R4.

    Knowledge-forced orientations are applied before and between rule passes;
    an undirected edge with both directions forbidden is flagged and left
    undirected. Existing directed edges are never reversed.
    """
    for a, b, ma, mb in g.edges():
        if edge_type(ma, mb) not in (EdgeType.DIRECTED, EdgeType.UNDIRECTED):
            raise ValueError("meek closure expects only directed/undirected edges")
    out = g.copy()
    conflicts: list[tuple[str, str]] = []
    changed = True
    while changed:
        changed = _force_knowledge(out, knowledge, conflicts)
        changed |= _meek_pass(out, knowledge)
    return out


def _meek_pass(g: MixedGraph, knowledge) -> bool:
    changed = False
    undirected = [
        (a, b) for a, b, ma, mb in g.edges() if edge_type(ma, mb) is EdgeType.UNDIRECTED
    ]
    for a, b in undirected:
        if not g.has_edge(a, b) or g.type_of(a, b) is not EdgeType.UNDIRECTED:
            continue
        for x, y in ((a, b), (b, a)):
            if _meek_r1(g, x, y, knowledge) or _meek_r2(g, x, y, knowledge) \
                    or _meek_r3(g, x, y, knowledge) or _meek_r4(g, x, y, knowledge):
                changed = True
                break
    return changed


def _meek_r1(g: MixedGraph, x: str, y: str, knowledge) -> bool:
    # Some w --> x with w, y nonadjacent compels x --> y.
    for w in g.parents(x):
        if w != y and not g.has_edge(w, y):
            return _orient_if_allowed(g, x, y, knowledge)
    return False


def _meek_r2(g: MixedGraph, x: str, y: str, knowledge) -> bool:
    # A directed chain x --> w --> y compels x --> y.
    for w in g.children(x):
        if w != y and g.is_directed(w, y):
            return _orient_if_allowed(g, x, y, knowledge)
    return False


def _meek_r3(g: MixedGraph, x: str, y: str, knowledge) -> bool:
    # Two chains x --- c --> y and x --- d --> y with c, d nonadjacent.
    cands = [c for c in g.undirected_neighbors(x) if c != y and g.is_directed(c, y)]
    for c, d in itertools.combinations(cands, 2):
        if not g.has_edge(c, d):
            return _orient_if_allowed(g, x, y, knowledge)
    return False


def _meek_r4(g: MixedGraph, x: str, y: str, knowledge) -> bool:
    # Chains x --- c --> d and c --> d --> y with c, y nonadjacent.
    for c in g.undirected_neighbors(x):
        if c == y or g.has_edge(c, y):
            continue
        for d in g.children(c):
            if d != x and d != y and g.is_directed(d, y):
                return _orient_if_allowed(g, x, y, knowledge)
    return False


def cpdag_of(g: MixedGraph) -> MixedGraph:
    """The completed pattern of a DAG: v-structures directed, rest closed by Meek."""
    _require_dag(g)
    pattern = MixedGraph(g.nodes)
    for a, b, _, _ in g.edges():
        pattern.add_undirected(a, b)
    for v in g.nodes:
        ps = g.parents(v)
        for a, b in itertools.combinations(ps, 2):
            if not g.has_edge(a, b):
                pattern.orient(a, v)
                pattern.orient(b, v)
    return meek_closure(pattern)


def dag_extension(pattern: MixedGraph) -> MixedGraph:
    """A consistent DAG extension of a directed/undirected pattern (Dor-Tarsi).

    Raises NotADagError when no consistent extension exists.
    """
    work = pattern.copy()
    result = pattern.copy()
    remaining = list(work.nodes)
    while remaining:
        progress = False
        for v in list(remaining):
            if work.children(v):
                continue
            nbrs = work.undirected_neighbors(v)
            adj = set(work.adjacent(v))
            ok = all(
                u == w or work.has_edge(u, w)
                for u in nbrs
                for w in adj
                if w != u
            )
            if not ok:
                continue
            for u in nbrs:
                result.orient(u, v)
                work.orient(u, v)
            for u in work.adjacent(v):
                work.remove_edge(u, v)
            remaining.remove(v)
            progress = True
        if not progress:
            raise NotADagError("pattern admits no consistent DAG extension")
    return result

"""Graph serialization: edge list, DOT, adjacency-code matrix, lavaan.

The edge list and the matrix form round-trip exactly; DOT and lavaan are
write-only views (lavaan only for DAGs). All writers emit nodes and edges in
node-index order so output is stable across runs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

from .errors import NotADagError, ParseError
from .graphs import Endpoint, MixedGraph, is_dag

# -- edge list ----------------------------------------------------------------

# Tokens as written between the left and right node of an edge line. A
# left-pointing token never appears: writers flip the node order instead.
_EDGE_TOKENS = {
    (Endpoint.TAIL, Endpoint.ARROW): "-->",
    (Endpoint.ARROW, Endpoint.ARROW): "<->",
    (Endpoint.TAIL, Endpoint.TAIL): "---",
    (Endpoint.CIRCLE, Endpoint.ARROW): "o->",
    (Endpoint.CIRCLE, Endpoint.CIRCLE): "o-o",
    (Endpoint.CIRCLE, Endpoint.TAIL): "o--",
}
_TOKEN_MARKS = {tok: marks for marks, tok in _EDGE_TOKENS.items()}


def _edge_line_parts(a: str, b: str, ma: Endpoint, mb: Endpoint) -> tuple[str, str, str]:
    if (ma, mb) in _EDGE_TOKENS:
        return a, _EDGE_TOKENS[(ma, mb)], b
    return b, _EDGE_TOKENS[(mb, ma)], a


def to_edge_list_string(
    g: MixedGraph, labels: Mapping[tuple[str, str], str] | None = None
) -> str:
    """Two-section listing: node names, then numbered edge lines.

    With `labels` (keyed by node-order pair), each labeled edge line gets a
    trailing `# <label>` comment — stability frequencies, coefficients — and
    the parser ignores such comments.
    """
    lines = ["Graph Nodes:", ",".join(g.nodes), "", "Graph Edges:"]
    for k, (a, b, ma, mb) in enumerate(g.edges(), start=1):
        left, tok, right = _edge_line_parts(a, b, ma, mb)
        line = f"{k}. {left} {tok} {right}"
        if labels is not None and (a, b) in labels:
            line += f" # {labels[(a, b)]}"
        lines.append(line)
    return "\n".join(lines) + "\n"


_EDGE_LINE = re.compile(
    r"^(\d+)\.\s+(\S+)\s+(-->|<->|---|o->|o-o|o--)\s+(\S+)\s*(?:#.*)?$"
)


def parse_edge_list(text: str) -> MixedGraph:
    lines = text.splitlines()
    stripped = [ln.strip() for ln in lines]
    try:
        nodes_at = stripped.index("Graph Nodes:")
    except ValueError:
        raise ParseError("missing 'Graph Nodes:' header") from None
    if nodes_at + 1 >= len(stripped) or not stripped[nodes_at + 1]:
        raise ParseError("no node line after 'Graph Nodes:'")
    names = [n.strip() for n in stripped[nodes_at + 1].split(",")]
    if any(not n for n in names):
        raise ParseError("empty node name in node line")
    if len(set(names)) != len(names):
        raise ParseError("duplicate node name in node line")
    try:
        edges_at = stripped.index("Graph Edges:")
    except ValueError:
        raise ParseError("missing 'Graph Edges:' header") from None

    g = MixedGraph(names)
    expected = 1
    for offset, raw in enumerate(stripped[edges_at + 1 :], start=edges_at + 2):
        if not raw:
            continue
        m = _EDGE_LINE.match(raw)
        if m is None:
            raise ParseError(f"line {offset}: malformed edge line {raw!r}")
        k, left, tok, right = int(m.group(1)), m.group(2), m.group(3), m.group(4)
        if k != expected:
            raise ParseError(f"line {offset}: edge number {k}, expected {expected}")
        expected += 1
        for name in (left, right):
            if name not in g:
                raise ParseError(f"line {offset}: unknown node {name!r}")
        if left == right:
            raise ParseError(f"line {offset}: self loop at {left!r}")
        if g.has_edge(left, right):
            raise ParseError(f"line {offset}: duplicate edge {left!r}-{right!r}")
        ml, mr = _TOKEN_MARKS[tok]
        g.add_edge(left, right, ml, mr)
    return g


# -- DOT ----------------------------------------------------------------------

_DOT_SHAPE = {Endpoint.TAIL: "none", Endpoint.ARROW: "normal", Endpoint.CIRCLE: "odot"}


def to_dot(g: MixedGraph, labels: Mapping[tuple[str, str], str] | None = None) -> str:
    """Graphviz digraph; endpoint marks map to arrowtail/arrowhead shapes.

    Optional `labels` (keyed by node-order pair) become edge label
    attributes, e.g. stability frequencies on a consensus graph.
    """
    lines = ["digraph {"]
    for node in g.nodes:
        lines.append(f'    "{node}";')
    for a, b, ma, mb in g.edges():
        tail, head = _DOT_SHAPE[ma], _DOT_SHAPE[mb]
        attrs = f"dir=both, arrowtail={tail}, arrowhead={head}"
        if labels is not None and (a, b) in labels:
            attrs += f', label="{labels[(a, b)]}"'
        lines.append(f'    "{a}" -> "{b}" [{attrs}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- adjacency-code matrix ----------------------------------------------------

# M[i][j] is the mark sitting at node j on the edge between i and j:
# 0 no edge, 1 circle, 2 arrowhead, 3 tail. Code 4 is reserved.
_MARK_CODE = {Endpoint.CIRCLE: 1, Endpoint.ARROW: 2, Endpoint.TAIL: 3}
_CODE_MARK = {v: k for k, v in _MARK_CODE.items()}


@dataclass(frozen=True)
class PcalgMatrix:
    names: tuple[str, ...]
    codes: tuple[tuple[int, ...], ...]

    def to_text(self) -> str:
        lines = ["\t".join(self.names)]
        for row in self.codes:
            lines.append("\t".join(str(c) for c in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PcalgMatrix":
        lines = [ln for ln in (s.strip() for s in text.splitlines()) if ln]
        if not lines:
            raise ParseError("empty matrix text")
        names = tuple(lines[0].split("\t"))
        if len(lines) - 1 != len(names):
            raise ParseError(
                f"matrix has {len(lines) - 1} rows for {len(names)} variables"
            )
        codes = []
        for r, ln in enumerate(lines[1:]):
            cells = ln.split("\t")
            if len(cells) != len(names):
                raise ParseError(f"row {r + 1} has {len(cells)} cells, expected {len(names)}")
            try:
                codes.append(tuple(int(c) for c in cells))
            except ValueError:
                raise ParseError(f"row {r + 1} holds a non-integer cell") from None
        return cls(names=names, codes=tuple(codes))


def to_pcalg(g: MixedGraph) -> PcalgMatrix:
    p = len(g.nodes)
    codes = [[0] * p for _ in range(p)]
    for a, b, ma, mb in g.edges():
        i, j = g.index(a), g.index(b)
        codes[i][j] = _MARK_CODE[mb]  # mark at j
        codes[j][i] = _MARK_CODE[ma]  # mark at i
    return PcalgMatrix(names=g.nodes, codes=tuple(tuple(r) for r in codes))


def from_pcalg(m: PcalgMatrix) -> MixedGraph:
    p = len(m.names)
    if len(m.codes) != p or any(len(r) != p for r in m.codes):
        raise ParseError("matrix is not square over its variable names")
    try:
        g = MixedGraph(m.names)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    for i in range(p):
        if m.codes[i][i] != 0:
            raise ParseError(f"nonzero diagonal at {m.names[i]!r}")
        for j in range(i + 1, p):
            cij, cji = m.codes[i][j], m.codes[j][i]
            if cij == 4 or cji == 4:
                raise ParseError(f"reserved code 4 at pair ({m.names[i]!r}, {m.names[j]!r})")
            if (cij == 0) != (cji == 0):
                raise ParseError(
                    f"half-present edge at pair ({m.names[i]!r}, {m.names[j]!r})"
                )
            if cij == 0:
                continue
            try:
                mj, mi = _CODE_MARK[cij], _CODE_MARK[cji]
            except KeyError:
                raise ParseError(
                    f"unknown mark code at pair ({m.names[i]!r}, {m.names[j]!r})"
                ) from None
            g.add_edge(m.names[i], m.names[j], mi, mj)
    return g


# -- lavaan -------------------------------------------------------------------


def _cycle_edge(g: MixedGraph) -> tuple[str, str]:
    """Some directed edge lying on a cycle (caller guarantees one exists)."""
    color = {n: 0 for n in g.nodes}  # 0 unseen, 1 on stack, 2 done
    def visit(u: str) -> tuple[str, str] | None:
        color[u] = 1
        for v in g.children(u):
            if color[v] == 1:
                return (u, v)
            if color[v] == 0:
                hit = visit(v)
                if hit is not None:
                    return hit
        color[u] = 2
        return None

    for n in g.nodes:
        if color[n] == 0:
            hit = visit(n)
            if hit is not None:
                return hit
    raise AssertionError("no cycle found in a non-DAG of directed edges")


def to_lavaan(g: MixedGraph) -> str:
    """Regression syntax `child ~ parent1 + parent2`; defined for DAGs only."""
    ok, _ = is_dag(g)
    if not ok:
        for a, b, ma, mb in g.edges():
            if {ma, mb} != {Endpoint.TAIL, Endpoint.ARROW}:
                left, tok, right = _edge_line_parts(a, b, ma, mb)
                raise NotADagError(
                    f"lavaan output is defined for DAGs only: "
                    f"edge {left} {tok} {right} is not directed"
                )
        u, v = _cycle_edge(g)
        raise NotADagError(
            f"lavaan output is defined for DAGs only: edge {u} --> {v} lies on a cycle"
        )
    lines = []
    for child in g.nodes:
        parents = g.parents(child)
        if parents:
            lines.append(f"{child} ~ " + " + ".join(parents))
    return "\n".join(lines) + ("\n" if lines else "")

"""Permutation search: greedy relaxations of the sparsest permutation.

A permutation is projected to a DAG by grow-shrink parent selection over each
node's predecessors; the search then walks permutation space with tuck moves
(pull a node and its in-window ancestors in front of one of its parents),
running a bounded depth-first search through tuck sequences and accepting the
first permutation that strictly improves on the current score. Background
knowledge enters the projection: forbidden parents are never offered,
required ones are pinned when they precede the child.
"""

from __future__ import annotations

import math

import numpy as np

from ..graphs import MixedGraph, cpdag_of, meek_closure
from ..knowledge import Knowledge
from . import SearchConfig

Perm = tuple[str, ...]


def _grow_shrink(score, y: str, prefix: list[str], knowledge: Knowledge | None):
    required = [
        p for p in prefix if knowledge is not None and (p, y) in knowledge.required
    ]
    allowed = [
        p
        for p in prefix
        if not (knowledge is not None and knowledge.is_forbidden(p, y))
    ]
    pa = list(required)
    current = score.local(y, pa)
    grown = True
    while grown:
        grown = False
        best_p, best_s = None, current
        for p in allowed:
            if p in pa:
                continue
            s = score.local(y, pa + [p])
            if s > best_s:
                best_p, best_s = p, s
        if best_p is not None:
            pa.append(best_p)
            current = best_s
            grown = True
    shrunk = True
    while shrunk:
        shrunk = False
        for p in list(pa):
            if p in required:
                continue
            s = score.local(y, [q for q in pa if q != p])
            if s > current:
                pa.remove(p)
                current = s
                shrunk = True
                break
    return sorted(pa, key=score.variables.index), current


def project(perm: Perm, score, knowledge: Knowledge | None = None):
    """DAG (as a parent map) and total score induced by a causal order."""
    parent_map: dict[str, list[str]] = {}
    total = 0.0
    seq = list(perm)
    for i, y in enumerate(seq):
        pa, local = _grow_shrink(score, y, seq[:i], knowledge)
        parent_map[y] = pa
        total += local
    return parent_map, total


def _ancestors_of(parent_map: dict[str, list[str]], y: str) -> set[str]:
    seen: set[str] = set()
    stack = list(parent_map[y])
    while stack:
        v = stack.pop()
        if v not in seen:
            seen.add(v)
            stack.extend(parent_map[v])
    return seen


def tuck(perm: Perm, x: str, y: str, parent_map: dict[str, list[str]]) -> Perm:
    """Move y, led by its ancestors strictly between x and y, in front of x."""
    i, j = perm.index(x), perm.index(y)
    if i > j:
        raise ValueError("tuck expects x before y")
    window = perm[i + 1 : j]
    anc = _ancestors_of(parent_map, y)
    movers = [v for v in window if v in anc] + [y]
    rest = [v for v in window if v not in anc]
    return perm[:i] + tuple(movers) + (x,) + tuple(rest) + perm[j + 1 :]


def _dag_edges(perm: Perm, parent_map: dict[str, list[str]]):
    for y in perm:
        for x in parent_map[y]:
            yield x, y


def grasp_search(
    score, knowledge: Knowledge | None = None, config: SearchConfig | None = None
) -> MixedGraph:
    config = config or SearchConfig()
    variables = tuple(score.variables)
    proj_cache: dict[Perm, tuple[dict[str, list[str]], float]] = {}

    def projected(perm: Perm):
        if perm not in proj_cache:
            proj_cache[perm] = project(perm, score, knowledge)
        return proj_cache[perm]

    def dfs(perm: Perm, root_score: float, depth: int, visited: dict[Perm, int]):
        """First tuck sequence improving on root_score, else None.

        Recursion descends through score-preserving and even score-losing
        tucks (the loss must be recovered within the depth budget); only a
        strict improvement over the root is ever accepted. A permutation is
        re-expanded when reached again with more remaining depth, so the
        depth limit — not the arrival order — decides what is reachable.
        """
        parent_map, _ = projected(perm)
        eps = 1e-10 * (1.0 + abs(root_score))
        for x, y in _dag_edges(perm, parent_map):
            p2 = tuck(perm, x, y, parent_map)
            if p2 == perm or visited.get(p2, 0) >= depth:
                continue
            visited[p2] = depth
            _, s2 = projected(p2)
            if s2 > root_score + eps:
                return p2, s2
            if depth > 1:
                found = dfs(p2, root_score, depth - 1, visited)
                if found is not None:
                    return found
        return None

    rng = np.random.default_rng(config.seed)
    best_perm: Perm | None = None
    best_score = -math.inf
    for restart in range(max(1, config.grasp_restarts)):
        if restart == 0:
            perm: Perm = variables
        else:
            perm = tuple(rng.permutation(np.array(variables, dtype=object)))
        _, s = projected(perm)
        while True:
            depth = max(1, config.grasp_dfs_depth)
            found = dfs(perm, s, depth, {perm: depth + 1})
            if found is None:
                break
            perm, s = found
            config.note(f"tuck improved score to {s:.6g}")
        if s > best_score:
            best_perm, best_score = perm, s

    parent_map, _ = projected(best_perm)  # type: ignore[arg-type]
    dag = MixedGraph(variables)
    for x, y in _dag_edges(best_perm, parent_map):  # type: ignore[arg-type]
        dag.add_directed(x, y)
    return meek_closure(cpdag_of(dag), knowledge)

"""Ground-truth generators for benchmarking: random DAGs, linear-Gaussian
models, forward sampling, and a d-separation oracle usable as a drop-in
independence test."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .data import CONTINUOUS, Dataset, from_columns
from .errors import ConfigError
from .graphs import MixedGraph, d_separated, is_dag
from .stats import TestResult

def _rng_of(seed: int | np.random.Generator | None) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_dag(
    p: int, expected_degree: float, seed: int | np.random.Generator | None = None
) -> MixedGraph:
    """Erdos-Renyi DAG over a uniformly random causal order.

    Nodes are named X1..Xp; each forward pair gets an edge with probability
    expected_degree / (p - 1), so the expected total degree of a node is
    expected_degree. p=1 yields the single-node edgeless graph.
    """
    if p < 1:
        raise ConfigError("need at least one node")
    if not 0 <= expected_degree < p:
        raise ConfigError(f"expected degree must lie in [0, {p})")
    names = [f"X{i + 1}" for i in range(p)]
    g = MixedGraph(names)
    rng = _rng_of(seed)
    order = [names[i] for i in rng.permutation(p)]
    if p == 1:
        return g
    prob = expected_degree / (p - 1)
    for i in range(p):
        for j in range(i + 1, p):
            if rng.random() < prob:
                g.add_directed(order[i], order[j])
    return g


@dataclass(frozen=True)
class SemModel:
    """Linear-Gaussian structural model: X_v = sum_pa coef * X_pa + noise."""

    dag: MixedGraph
    coefficients: Mapping[tuple[str, str], float]  # (parent, child) -> weight
    noise_variances: Mapping[str, float] = field(default_factory=dict)

    def noise_std(self, v: str) -> float:
        var = float(self.noise_variances.get(v, 1.0))
        if var <= 0:
            raise ConfigError(f"noise variance for {v!r} must be positive")
        return float(np.sqrt(var))


def random_sem(
    dag: MixedGraph,
    seed: int | np.random.Generator | None = None,
    coef_low: float = 0.3,
    coef_high: float = 1.0,
) -> SemModel:
    """Random weights with magnitude in [coef_low, coef_high] and random sign."""
    ok, _ = is_dag(dag)
    if not ok:
        raise ConfigError("structural model needs a DAG")
    rng = _rng_of(seed)
    coefficients = {}
    for a, b, _, _ in dag.edges():
        parent, child = (a, b) if dag.is_directed(a, b) else (b, a)
        weight = rng.uniform(coef_low, coef_high)
        if rng.random() < 0.5:
            weight = -weight
        coefficients[(parent, child)] = float(weight)
    return SemModel(dag=dag, coefficients=coefficients)


def simulate(
    model: SemModel, n: int, seed: int | np.random.Generator | None = None
) -> Dataset:
    """Forward-sample n rows in topological order with Gaussian noise."""
    if n < 1:
        raise ConfigError("need at least one sample")
    ok, order = is_dag(model.dag)
    if not ok:
        raise ConfigError("structural model needs a DAG")
    rng = _rng_of(seed)
    names = model.dag.nodes
    values: dict[str, np.ndarray] = {}
    for v in order:  # type: ignore[union-attr]
        x = rng.normal(0.0, model.noise_std(v), size=n)
        for p in model.dag.parents(v):
            x = x + model.coefficients[(p, v)] * values[p]
        values[v] = x
    return from_columns(names, [CONTINUOUS] * len(names), [values[v] for v in names])


class OracleTest:
    """Independence test answered by d-separation on a known DAG."""

    mixed_ok = True
    alpha = 0.0  # no sampling error to trade off

    def __init__(self, dag: MixedGraph):
        ok, _ = is_dag(dag)
        if not ok:
            raise ConfigError("oracle needs a DAG")
        self.dag = dag
        self.variables = tuple(dag.nodes)
        self._cache: dict[tuple[str, str, frozenset[str]], bool] = {}

    def decide(self, x: str, y: str, z: Iterable[str]) -> TestResult:
        zset = frozenset(z)
        key = (x, y, zset) if x <= y else (y, x, zset)
        if key not in self._cache:
            self._cache[key] = d_separated(self.dag, x, y, zset)
        sep = self._cache[key]
        return TestResult(
            independent=sep, p_value=1.0 if sep else 0.0, strength=0.0 if sep else 1.0
        )


def oracle_test(dag: MixedGraph) -> OracleTest:
    return OracleTest(dag)

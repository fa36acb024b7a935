"""One-stop session object tying data, tests, scores, knowledge, searches,
bootstrapping, and serialization together.

Typical use:

    s = SearchSession(load_tabular("data.tsv"))
    s.use_fisher_z(alpha=0.01)
    s.add_to_tier(0, "age"); s.add_to_tier(1, "steps")
    result = s.run("pc")
    print(result.get_string())
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .bootstrap import EdgeStatTable, bootstrap_search, consensus_graph, graphs_to_probs
from .data import Dataset
from .errors import ConfigError
from .graphs import MixedGraph
from .graph_io import to_dot, to_edge_list_string, to_lavaan, to_pcalg
from .knowledge import Knowledge, validate_or_raise
from .search import SearchConfig, fci_search, fges_search, grasp_search, pc_search
from .stats import (
    DegenerateGaussianScore,
    FisherZTest,
    ScoreBasedTest,
    SemBicScore,
)

ALGORITHMS = ("pc", "fges", "grasp", "fci")
_NEEDS_SCORE = {"fges", "grasp"}


class CallbackScore:
    """Local score answered by a user callback on (node index, parent indices)."""

    mixed_ok = True

    def __init__(self, variables: Iterable[str], fn: Callable[[int, tuple[int, ...]], float]):
        self.variables = tuple(variables)
        self._fn = fn
        self._index = {n: i for i, n in enumerate(self.variables)}
        self._cache: dict[tuple[int, tuple[int, ...]], float] = {}

    def local(self, y: str, parents: Iterable[str]) -> float:
        yi = self._index[y]
        pa = tuple(sorted(self._index[p] for p in parents))
        if yi in pa:
            raise ConfigError(f"{y!r} cannot be its own parent")
        key = (yi, pa)
        if key not in self._cache:
            self._cache[key] = float(self._fn(yi, pa))
        return self._cache[key]


@dataclass
class SearchResult:
    algorithm: str
    graph: MixedGraph
    probabilities: EdgeStatTable | None = None
    frequencies: dict[tuple[str, str], float] | None = None
    log: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    def _labels(self) -> dict[tuple[str, str], str] | None:
        if self.frequencies is None:
            return None
        return {pair: f"{freq:.2f}" for pair, freq in self.frequencies.items()}

    def get_string(self) -> str:
        return to_edge_list_string(self.graph, self._labels())

    def get_dot(self) -> str:
        return to_dot(self.graph, self._labels())

    def get_pcalg(self) -> str:
        return to_pcalg(self.graph).to_text()

    def get_lavaan(self) -> str:
        return to_lavaan(self.graph)

    def get_prob_table(self) -> str:
        if self.probabilities is None:
            raise ConfigError("no bootstrap probabilities: run with bootstrapping enabled")
        return self.probabilities.to_text()


class SearchSession:
    """Configuration surface mirroring the common search workflow."""

    def __init__(self, data: Dataset, knowledge: Knowledge | None = None):
        if not isinstance(data, Dataset):
            raise ConfigError("a SearchSession needs a Dataset to search over")
        self.data = data
        self.knowledge = knowledge if knowledge is not None else Knowledge()
        self.alpha = 0.01
        self.penalty_discount = 2.0
        self.depth = -1
        self.seed: int | None = None
        self.bootstrap_reps = 0
        self.grasp_dfs_depth = 3
        self.grasp_restarts = 1
        self.verbose = False
        self._test_choice: str | None = None
        self._score_choice: str | None = None
        self._custom_fn: Callable[[int, tuple[int, ...]], float] | None = None
        self.last_result: SearchResult | None = None

    # -- component selection -------------------------------------------------

    def use_fisher_z(self, alpha: float | None = None) -> "SearchSession":
        if alpha is not None:
            self.set_alpha(alpha)
        self._test_choice = "fisher_z"
        return self

    def use_sem_bic(self, penalty_discount: float | None = None) -> "SearchSession":
        if penalty_discount is not None:
            self.set_penalty_discount(penalty_discount)
        self._score_choice = "sem_bic"
        return self

    def use_degenerate_gaussian(self, penalty_discount: float | None = None) -> "SearchSession":
        if penalty_discount is not None:
            self.set_penalty_discount(penalty_discount)
        self._score_choice = "degenerate_gaussian"
        return self

    def use_score_test(self) -> "SearchSession":
        self._test_choice = "score"
        return self

    def use_custom_score(self, fn: Callable[[int, tuple[int, ...]], float]) -> "SearchSession":
        self._custom_fn = fn
        self._score_choice = "custom"
        return self

    # -- scalar settings -------------------------------------------------------

    def set_alpha(self, alpha: float) -> "SearchSession":
        if not 0 < alpha < 1:
            raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
        self.alpha = float(alpha)
        return self

    def set_penalty_discount(self, c: float) -> "SearchSession":
        if not c > 0:
            raise ConfigError(f"penalty discount must be positive, got {c}")
        self.penalty_discount = float(c)
        return self

    def set_depth(self, depth: int) -> "SearchSession":
        if depth < -1:
            raise ConfigError(f"depth must be -1 (unbounded) or >= 0, got {depth}")
        self.depth = int(depth)
        return self

    def set_seed(self, seed: int | None) -> "SearchSession":
        self.seed = None if seed is None else int(seed)
        return self

    def set_bootstrapping(self, reps: int) -> "SearchSession":
        if reps < 0:
            raise ConfigError(f"bootstrap replicate count must be >= 0, got {reps}")
        self.bootstrap_reps = int(reps)
        return self

    def set_verbose(self, flag: bool) -> "SearchSession":
        self.verbose = bool(flag)
        return self

    def configure(self, setting: str, value) -> "SearchSession":
        setters = {
            "alpha": self.set_alpha,
            "penalty_discount": self.set_penalty_discount,
            "depth": self.set_depth,
            "seed": self.set_seed,
            "bootstrap_reps": self.set_bootstrapping,
            "verbose": self.set_verbose,
            "grasp_dfs_depth": self._set_grasp_depth,
            "grasp_restarts": self._set_grasp_restarts,
        }
        if setting not in setters:
            raise ConfigError(
                f"unknown setting {setting!r}; known: {', '.join(sorted(setters))}"
            )
        setters[setting](value)
        return self

    def _set_grasp_depth(self, d: int) -> None:
        if d < 1:
            raise ConfigError(f"grasp_dfs_depth must be >= 1, got {d}")
        self.grasp_dfs_depth = int(d)

    def _set_grasp_restarts(self, r: int) -> None:
        if r < 1:
            raise ConfigError(f"grasp_restarts must be >= 1, got {r}")
        self.grasp_restarts = int(r)

    # -- knowledge passthroughs ------------------------------------------------

    def add_to_tier(self, tier: int, name: str) -> "SearchSession":
        self.knowledge.add_to_tier(tier, name)
        return self

    def set_tier_forbidden_within(self, tier: int, flag: bool = True) -> "SearchSession":
        self.knowledge.set_tier_forbidden_within(tier, flag)
        return self

    def forbid(self, frm: str, to: str) -> "SearchSession":
        self.knowledge.forbid(frm, to)
        return self

    def require(self, frm: str, to: str) -> "SearchSession":
        self.knowledge.require(frm, to)
        return self

    # -- running ----------------------------------------------------------------

    def _make_score(self, data: Dataset):
        choice = self._score_choice
        if choice is None:
            choice = "sem_bic" if data.is_all_continuous() else "degenerate_gaussian"
        if choice == "sem_bic":
            return SemBicScore(data, self.penalty_discount)
        if choice == "degenerate_gaussian":
            return DegenerateGaussianScore(data, self.penalty_discount)
        if choice == "custom":
            if self._custom_fn is None:
                raise ConfigError("no custom score callback registered")
            return CallbackScore(data.names, self._custom_fn)
        raise ConfigError(f"unknown score choice {choice!r}")

    def _make_test(self, data: Dataset):
        choice = self._test_choice
        if choice is None:
            choice = "fisher_z" if data.is_all_continuous() else "score"
        if choice == "fisher_z":
            return FisherZTest(data, self.alpha)
        if choice == "score":
            return ScoreBasedTest(self._make_score(data), self.alpha)
        raise ConfigError(f"unknown test choice {choice!r}")

    def _search_config(self) -> SearchConfig:
        return SearchConfig(
            depth=self.depth,
            seed=self.seed,
            grasp_dfs_depth=self.grasp_dfs_depth,
            grasp_restarts=self.grasp_restarts,
            verbose=self.verbose,
        )

    def _single(self, algorithm: str, data: Dataset, log: list[str]) -> MixedGraph:
        config = self._search_config()
        config.log = log
        knowledge = None if self.knowledge.is_empty() else self.knowledge
        if algorithm == "pc":
            return pc_search(self._make_test(data), knowledge, config)
        if algorithm == "fci":
            return fci_search(self._make_test(data), knowledge, config)
        if algorithm == "fges":
            return fges_search(self._make_score(data), knowledge, config)
        if algorithm == "grasp":
            return grasp_search(self._make_score(data), knowledge, config)
        raise ConfigError(f"unknown algorithm {algorithm!r}; known: {', '.join(ALGORITHMS)}")

    def run(self, algorithm: str) -> SearchResult:
        if algorithm not in ALGORITHMS:
            raise ConfigError(
                f"unknown algorithm {algorithm!r}; known: {', '.join(ALGORITHMS)}"
            )
        if not self.knowledge.is_empty():
            validate_or_raise(self.knowledge, self.data)
        log: list[str] = []
        started = time.perf_counter()
        if self.bootstrap_reps > 0:
            if self._score_choice == "custom":
                raise ConfigError(
                    "bootstrapping cannot rerun an external score on resampled data"
                )
            seed = self.seed if self.seed is not None else 0
            graphs = bootstrap_search(
                self.data,
                lambda d: self._single(algorithm, d, log),
                self.bootstrap_reps,
                seed,
            )
            table = graphs_to_probs(graphs)
            consensus, freq = consensus_graph(table)
            result = SearchResult(
                algorithm=algorithm,
                graph=consensus,
                probabilities=table,
                frequencies=freq,
                log=log,
                elapsed=time.perf_counter() - started,
            )
        else:
            graph = self._single(algorithm, self.data, log)
            result = SearchResult(
                algorithm=algorithm,
                graph=graph,
                log=log,
                elapsed=time.perf_counter() - started,
            )
        self.last_result = result
        return result

    # -- serialization of the last run ------------------------------------------

    def _require_result(self) -> SearchResult:
        if self.last_result is None:
            raise ConfigError("no search has been run yet")
        return self.last_result

    def get_string(self) -> str:
        return self._require_result().get_string()

    def get_dot(self) -> str:
        return self._require_result().get_dot()

    def get_pcalg(self) -> str:
        return self._require_result().get_pcalg()

    def get_lavaan(self) -> str:
        return self._require_result().get_lavaan()

    def get_prob_table(self) -> str:
        return self._require_result().get_prob_table()

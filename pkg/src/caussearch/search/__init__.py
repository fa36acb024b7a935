"""Structure-learning algorithms over mixed-endpoint graphs."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class SearchConfig:
    """Knobs shared by the searches.

    depth caps the conditioning-set size during skeleton pruning (-1 means
    unbounded); grasp_dfs_depth bounds the tuck DFS; seed feeds any
    randomized restarts.
    """

    depth: int = -1
    seed: int | None = None
    grasp_dfs_depth: int = 3
    grasp_restarts: int = 1
    verbose: bool = False
    log: list[str] = field(default_factory=list)

    def max_depth(self, limit: int) -> int:
        return limit if self.depth < 0 else min(self.depth, limit)

    def note(self, message: str) -> None:
        self.log.append(message)
        if self.verbose:
            print(message)


class SepsetMap:
    """Separating sets recorded during skeleton pruning, keyed on pairs."""

    def __init__(self) -> None:
        self._sets: dict[frozenset[str], tuple[str, ...]] = {}

    def record(self, x: str, y: str, z: tuple[str, ...]) -> None:
        self._sets[frozenset((x, y))] = tuple(z)

    def get(self, x: str, y: str) -> tuple[str, ...] | None:
        return self._sets.get(frozenset((x, y)))

    def has(self, x: str, y: str) -> bool:
        return frozenset((x, y)) in self._sets

    def __len__(self) -> int:
        return len(self._sets)


from .pc import pc_search  # noqa: E402
from .fges import fges_search  # noqa: E402
from .grasp import grasp_search  # noqa: E402
from .fci import fci_search  # noqa: E402

__all__ = [
    "SearchConfig",
    "SepsetMap",
    "pc_search",
    "fges_search",
    "grasp_search",
    "fci_search",
]

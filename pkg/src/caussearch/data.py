"""Tabular datasets with mixed continuous/discrete columns.

Columns are stored column-major: float64 arrays for continuous variables,
int64 level indices for discrete ones. Discrete levels are indexed by first
appearance in the file, which keeps embeddings deterministic regardless of
label sort order. Datasets are immutable after construction and safe to
share across concurrent search folds.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DataError

# Auto-typing rule: an all-integer column with at most this many distinct
# values is treated as discrete unless a schema override says otherwise.
DEFAULT_DISCRETE_THRESHOLD = 20

_MISSING_TOKENS = {"", "NA", "N/A", "NaN", "nan", "null", "*"}


class ColumnKind(enum.Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


@dataclass(frozen=True)
class VariableKind:
    """Type tag for one variable; discrete kinds carry their level labels."""

    kind: ColumnKind
    categories: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind is ColumnKind.DISCRETE:
            if len(self.categories) < 1:
                raise DataError("discrete variable needs at least one observed level")
            if len(set(self.categories)) != len(self.categories):
                raise DataError("duplicate category labels: %r" % (self.categories,))
        elif self.categories:
            raise DataError("continuous variable cannot carry categories")

    @property
    def is_discrete(self) -> bool:
        return self.kind is ColumnKind.DISCRETE


CONTINUOUS = VariableKind(ColumnKind.CONTINUOUS)


def discrete(categories: Sequence[str]) -> VariableKind:
    return VariableKind(ColumnKind.DISCRETE, tuple(categories))


@dataclass(frozen=True)
class Dataset:
    """Immutable rectangular table of named, typed columns."""

    names: tuple[str, ...]
    kinds: tuple[VariableKind, ...]
    columns: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.names) != len(self.kinds) or len(self.names) != len(self.columns):
            raise DataError("names, kinds and columns must align")
        if len(set(self.names)) != len(self.names):
            raise DataError("duplicate variable names")
        if any(not n for n in self.names):
            raise DataError("empty variable name")
        lengths = {len(c) for c in self.columns}
        if len(lengths) > 1:
            raise DataError("columns differ in length: %s" % sorted(lengths))
        for name, kind, col in zip(self.names, self.kinds, self.columns):
            if kind.is_discrete:
                if col.dtype.kind not in "iu":
                    raise DataError(f"discrete column {name!r} must hold level indices")
                if len(col) and (col.min() < 0 or col.max() >= len(kind.categories)):
                    raise DataError(f"level index out of range in column {name!r}")
            else:
                if col.dtype.kind != "f":
                    raise DataError(f"continuous column {name!r} must hold floats")
                if len(col) and not np.isfinite(col).all():
                    raise DataError(f"non-finite value in column {name!r}")
            col.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.columns[0]) if self.columns else 0

    @property
    def p(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DataError(f"unknown variable {name!r}") from None

    def kind_of(self, name: str) -> VariableKind:
        return self.kinds[self.index(name)]

    def column(self, name: str) -> np.ndarray:
        return self.columns[self.index(name)]

    def discrete_names(self) -> list[str]:
        return [n for n, k in zip(self.names, self.kinds) if k.is_discrete]

    def is_all_continuous(self) -> bool:
        return not any(k.is_discrete for k in self.kinds)

    def row(self, i: int) -> tuple:
        return tuple(col[i] for col in self.columns)


@dataclass(frozen=True)
class CovarianceModel:
    """Sample covariance with the names and sample size tests need."""

    names: tuple[str, ...]
    matrix: np.ndarray
    n: int

    def __post_init__(self):
        p = len(self.names)
        if self.matrix.shape != (p, p):
            raise DataError("covariance matrix shape does not match names")
        if not np.allclose(self.matrix, self.matrix.T, atol=1e-12):
            raise DataError("covariance matrix is not symmetric")
        if len(self.matrix) and np.diag(self.matrix).min() < 0:
            raise DataError("negative variance on the diagonal")
        self.matrix.setflags(write=False)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DataError(f"unknown variable {name!r}") from None

    def correlation(self) -> np.ndarray:
        d = np.sqrt(np.diag(self.matrix))
        with np.errstate(divide="ignore", invalid="ignore"):
            corr = self.matrix / np.outer(d, d)
        return corr


def _parse_number(token: str, name: str, row: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise DataError(
            f"non-numeric token {token!r} in continuous column {name!r} (row {row + 2})"
        ) from None


def _levels_by_first_appearance(tokens: Sequence[str]) -> tuple[list[str], np.ndarray]:
    labels: list[str] = []
    index: dict[str, int] = {}
    codes = np.empty(len(tokens), dtype=np.int64)
    for i, tok in enumerate(tokens):
        if tok not in index:
            index[tok] = len(labels)
            labels.append(tok)
        codes[i] = index[tok]
    return labels, codes


def load_tabular(
    path: str | Path,
    delimiter: str | None = "\t",
    schema: Mapping[str, ColumnKind | str] | None = None,
    discrete_threshold: int = DEFAULT_DISCRETE_THRESHOLD,
) -> Dataset:
    """Load a delimited text file with a header row into a Dataset.

    Typing rule per column: an explicit schema override wins; otherwise a
    column whose values are all integers with at most ``discrete_threshold``
    distinct values is discrete, anything else continuous. ``delimiter=None``
    splits on arbitrary whitespace. Missing values are rejected.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    text = path.read_text(encoding="utf-8")
    return parse_tabular(text, delimiter=delimiter, schema=schema, discrete_threshold=discrete_threshold)


def parse_tabular(
    text: str,
    delimiter: str | None = "\t",
    schema: Mapping[str, ColumnKind | str] | None = None,
    discrete_threshold: int = DEFAULT_DISCRETE_THRESHOLD,
) -> Dataset:
    lines = [ln for ln in text.splitlines() if ln.strip() != ""]
    if not lines:
        raise DataError("empty file")

    def split(line: str) -> list[str]:
        return line.split() if delimiter is None else line.split(delimiter)

    header = [h.strip() for h in split(lines[0])]
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise DataError("duplicate header names: " + ", ".join(dupes))
    if any(not h for h in header):
        raise DataError("empty name in header row")

    body = lines[1:]
    if not body:
        raise DataError("empty body: header row only")

    p = len(header)
    cells: list[list[str]] = [[] for _ in range(p)]
    for r, line in enumerate(body):
        toks = [t.strip() for t in split(line)]
        if len(toks) != p:
            raise DataError(f"ragged row {r + 2}: expected {p} fields, found {len(toks)}")
        for j, tok in enumerate(toks):
            if tok in _MISSING_TOKENS:
                raise DataError(
                    f"missing value in column {header[j]!r} (row {r + 2}); "
                    "missing data is not supported"
                )
            cells[j].append(tok)

    overrides: dict[str, ColumnKind] = {}
    for name, kind in (schema or {}).items():
        if name not in header:
            raise DataError(f"schema override for unknown column {name!r}")
        overrides[name] = ColumnKind(kind) if isinstance(kind, str) else kind

    kinds: list[VariableKind] = []
    columns: list[np.ndarray] = []
    for j, name in enumerate(header):
        toks = cells[j]
        forced = overrides.get(name)
        if forced is ColumnKind.CONTINUOUS:
            values = np.array([_parse_number(t, name, r) for r, t in enumerate(toks)])
            kinds.append(CONTINUOUS)
            columns.append(values)
            continue
        if forced is ColumnKind.DISCRETE:
            labels, codes = _levels_by_first_appearance(toks)
            kinds.append(discrete(labels))
            columns.append(codes)
            continue
        # No override: integer-valued columns with few distinct values are discrete.
        numeric = True
        integral = True
        values = np.empty(len(toks))
        for r, t in enumerate(toks):
            try:
                v = float(t)
            except ValueError:
                numeric = False
                break
            values[r] = v
            if not v.is_integer():
                integral = False
        if numeric and integral and len(set(toks)) <= discrete_threshold:
            labels, codes = _levels_by_first_appearance(toks)
            kinds.append(discrete(labels))
            columns.append(codes)
        elif numeric:
            kinds.append(CONTINUOUS)
            columns.append(values)
        else:
            bad = next((i, t) for i, t in enumerate(toks) if _is_bad(t))
            raise DataError(
                f"non-numeric token {bad[1]!r} in continuous column {name!r} "
                f"(row {bad[0] + 2}); use a discrete schema override for label columns"
            )

    return Dataset(tuple(header), tuple(kinds), tuple(columns))


def _is_bad(tok: str) -> bool:
    try:
        float(tok)
        return False
    except ValueError:
        return True


def save_tabular(d: Dataset, path: str | Path, delimiter: str = "\t") -> None:
    """Write a dataset back to delimited text; inverse of load_tabular."""
    Path(path).write_text(to_tabular_text(d, delimiter), encoding="utf-8")


def to_tabular_text(d: Dataset, delimiter: str = "\t") -> str:
    out = [delimiter.join(d.names)]
    for i in range(d.n):
        row = []
        for kind, col in zip(d.kinds, d.columns):
            if kind.is_discrete:
                row.append(kind.categories[int(col[i])])
            else:
                row.append(repr(float(col[i])))
        out.append(delimiter.join(row))
    return "\n".join(out) + "\n"


def resample(d: Dataset, seed: int) -> Dataset:
    """Draw n rows with replacement using a seeded generator; schema unchanged."""
    if d.n < 1:
        raise DataError("cannot resample an empty dataset")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, d.n, size=d.n)
    columns = tuple(np.ascontiguousarray(col[idx]) for col in d.columns)
    return Dataset(d.names, d.kinds, columns)


@dataclass(frozen=True)
class EmbeddingMap:
    """Maps each original variable to its embedded column indices."""

    source_names: tuple[str, ...]
    blocks: tuple[tuple[int, ...], ...]

    def columns_of(self, name: str) -> tuple[int, ...]:
        return self.blocks[self.source_names.index(name)]


def one_hot_embed(d: Dataset) -> tuple[Dataset, EmbeddingMap]:
    """Replace each discrete variable by indicator columns.

    A discrete variable with m levels becomes m-1 indicators named
    ``name#label`` (reference category = last level). Continuous columns
    pass through unchanged.
    """
    names: list[str] = []
    kinds: list[VariableKind] = []
    columns: list[np.ndarray] = []
    blocks: list[tuple[int, ...]] = []
    for name, kind, col in zip(d.names, d.kinds, d.columns):
        if not kind.is_discrete:
            blocks.append((len(names),))
            names.append(name)
            kinds.append(CONTINUOUS)
            columns.append(col)
            continue
        observed = np.unique(col)
        if len(observed) < 2:
            raise DataError(f"constant discrete column {name!r}: one observed level")
        m = len(kind.categories)
        block = []
        for lvl in range(m - 1):
            block.append(len(names))
            names.append(f"{name}#{kind.categories[lvl]}")
            kinds.append(CONTINUOUS)
            columns.append((col == lvl).astype(np.float64))
        blocks.append(tuple(block))
    emb = Dataset(tuple(names), tuple(kinds), tuple(columns))
    return emb, EmbeddingMap(d.names, tuple(blocks))


def covariance(d: Dataset) -> CovarianceModel:
    """Unbiased sample covariance (divisor n-1) of an all-continuous dataset."""
    bad = d.discrete_names()
    if bad:
        raise DataError("covariance requires continuous data; discrete: " + ", ".join(bad))
    if d.n < 2:
        raise DataError("covariance needs at least 2 rows")
    X = np.column_stack(d.columns)
    X = X - X.mean(axis=0)
    mat = (X.T @ X) / (d.n - 1)
    mat = (mat + mat.T) / 2.0
    return CovarianceModel(d.names, mat, d.n)


def from_columns(
    names: Sequence[str],
    kinds: Sequence[VariableKind],
    arrays: Sequence[Iterable],
) -> Dataset:
    """Build a dataset from parallel column arrays (bridge entry point)."""
    if not (len(names) == len(kinds) == len(arrays)):
        raise DataError("names, kinds and arrays must have equal lengths")
    columns = []
    for name, kind, arr in zip(names, kinds, arrays):
        if kind.is_discrete:
            col = np.asarray(arr, dtype=np.int64)
        else:
            col = np.asarray(arr, dtype=np.float64)
        columns.append(col)
    return Dataset(tuple(names), tuple(kinds), tuple(columns))

"""Conditional independence tests and decomposable scores.

Two families:

* fisher_z: partial-correlation test for continuous data, computed from the
  precision matrix of the correlation submatrix (one inversion per query,
  with clear singularity diagnostics).
* BIC-style local scores: a linear-Gaussian score for continuous data and a
  mixed-type variant that scores the one-hot embedded dataset. Larger is
  better; the complexity penalty counts one parameter per regressor plus one
  for the residual variance, scaled by a penalty discount c (default 2).

A score can be wrapped into a test: x and y are judged independent given Z
when adding either to the other's regression on Z fails to improve the
score in both directions.
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple, Protocol, Sequence

import numpy as np
from scipy.stats import norm

from .data import CovarianceModel, Dataset, covariance, one_hot_embed
from .errors import ConfigError, DataError, IncompatibilityError, SingularityError

RSS_FLOOR = 1e-30  # keeps logarithms finite on deterministic fits


class TestResult(NamedTuple):
    independent: bool
    p_value: float | None
    strength: float


class IndependenceTest(Protocol):
    variables: tuple[str, ...]
    alpha: float
    mixed_ok: bool

    def decide(self, x: str, y: str, z: Iterable[str]) -> TestResult: ...


class LocalScore(Protocol):
    variables: tuple[str, ...]
    mixed_ok: bool

    def local(self, y: str, parents: Iterable[str]) -> float: ...


def _check_penalty(c: float) -> float:
    if not c > 0:
        raise ConfigError(f"penalty discount must be positive, got {c}")
    return float(c)


def _check_alpha(alpha: float) -> float:
    if not 0 < alpha < 1:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    return float(alpha)


# -- Fisher Z -----------------------------------------------------------------


def partial_correlation(corr: np.ndarray, names: Sequence[str], ix: Sequence[int]) -> float:
    """Partial correlation of ix[0], ix[1] given the rest, by precision matrix."""
    sub = corr[np.ix_(ix, ix)]
    try:
        if np.linalg.cond(sub) > 1e12:
            raise np.linalg.LinAlgError
        prec = np.linalg.inv(sub)
    except np.linalg.LinAlgError:
        raise SingularityError([names[i] for i in ix]) from None
    denom = prec[0, 0] * prec[1, 1]
    if not np.isfinite(prec).all() or denom <= 0:
        raise SingularityError([names[i] for i in ix])
    return float(-prec[0, 1] / math.sqrt(denom))


def fisher_z(
    cov: CovarianceModel, x: str, y: str, z: Iterable[str], alpha: float = 0.01
) -> TestResult:
    """Partial-correlation z test; independent iff p > alpha, strength = p."""
    alpha = _check_alpha(alpha)
    zs = list(z)
    if x == y or x in zs or y in zs or len(set(zs)) != len(zs):
        raise ConfigError("test variables {x, y} and conditioning set must be distinct")
    dof = cov.n - len(zs) - 3
    if dof <= 0:
        raise DataError(f"sample too small: n={cov.n} with |Z|={len(zs)} leaves no degrees of freedom")
    ix = [cov.index(x), cov.index(y)] + [cov.index(v) for v in zs]
    r = partial_correlation(cov.correlation(), cov.names, ix)
    r = max(-1.0 + 1e-16, min(1.0 - 1e-16, r))
    stat = math.sqrt(dof) * 0.5 * math.log((1 + r) / (1 - r))
    p = float(2.0 * norm.sf(abs(stat)))
    return TestResult(independent=p > alpha, p_value=p, strength=p)


class FisherZTest:
    """Test contract over a covariance model; requires continuous data."""

    mixed_ok = False

    def __init__(self, data: Dataset | CovarianceModel, alpha: float = 0.01):
        self.alpha = _check_alpha(alpha)
        if isinstance(data, Dataset):
            bad = data.discrete_names()
            if bad:
                raise IncompatibilityError(
                    "Fisher Z", "requires continuous data; discrete column(s): " + ", ".join(bad)
                )
            data = covariance(data)
        self.cov = data
        self.variables = tuple(data.names)
        self._corr = data.correlation()

    def decide(self, x: str, y: str, z: Iterable[str]) -> TestResult:
        zs = sorted(z, key=self.cov.index)
        alpha = self.alpha
        dof = self.cov.n - len(zs) - 3
        if dof <= 0:
            raise DataError(
                f"sample too small: n={self.cov.n} with |Z|={len(zs)} leaves no degrees of freedom"
            )
        ix = [self.cov.index(x), self.cov.index(y)] + [self.cov.index(v) for v in zs]
        r = partial_correlation(self._corr, self.cov.names, ix)
        r = max(-1.0 + 1e-16, min(1.0 - 1e-16, r))
        stat = math.sqrt(dof) * 0.5 * math.log((1 + r) / (1 - r))
        p = float(2.0 * norm.sf(abs(stat)))
        return TestResult(independent=p > alpha, p_value=p, strength=p)


# -- regression core shared by both scores ------------------------------------


def _biased_moments(columns: Sequence[np.ndarray]) -> np.ndarray:
    """Central second-moment matrix with divisor n (biased)."""
    X = np.column_stack(columns).astype(np.float64)
    X = X - X.mean(axis=0)
    n = X.shape[0]
    M = (X.T @ X) / n
    return (M + M.T) / 2.0


def _dependent_columns(C: np.ndarray, idx: Sequence[int], names: Sequence[str]) -> list[str]:
    """Columns that are linear combinations of the ones before them."""
    dependent = []
    kept: list[int] = []
    tol = 1e-10
    for j in idx:
        if C[j, j] <= tol:
            dependent.append(names[j])
            continue
        if kept:
            sub = C[np.ix_(kept, kept)]
            cross = C[np.ix_(kept, [j])][:, 0]
            try:
                beta = np.linalg.solve(sub, cross)
                resid = C[j, j] - cross @ beta
            except np.linalg.LinAlgError:
                resid = 0.0
            if resid <= tol * C[j, j]:
                dependent.append(names[j])
                continue
        kept.append(j)
    return dependent


def _rss(C: np.ndarray, n: int, y: int, pa: Sequence[int], names: Sequence[str]) -> float:
    """Residual sum of squares of y regressed on pa with intercept."""
    if not pa:
        return max(n * C[y, y], RSS_FLOOR)
    sub = C[np.ix_(pa, pa)]
    cross = C[np.ix_(pa, [y])][:, 0]
    try:
        chol = np.linalg.cholesky(sub)
    except np.linalg.LinAlgError:
        dep = _dependent_columns(C, pa, names)
        raise SingularityError(
            dep or [names[i] for i in pa],
            "rank-deficient regression design; dependent column(s): "
            + ", ".join(dep or [names[i] for i in pa]),
        ) from None
    w = np.linalg.solve(chol, cross)
    explained = float(w @ w)
    return max(n * (C[y, y] - explained), RSS_FLOOR)


class SemBicScore:
    """Linear-Gaussian BIC local score over continuous data; larger is better."""

    mixed_ok = False

    def __init__(self, data: Dataset, penalty_discount: float = 2.0):
        bad = data.discrete_names()
        if bad:
            raise IncompatibilityError(
                "SEM BIC", "requires continuous data; discrete column(s): " + ", ".join(bad)
            )
        self.penalty_discount = _check_penalty(penalty_discount)
        self.variables = tuple(data.names)
        self.n = data.n
        self._C = _biased_moments(data.columns)
        self._cache: dict[tuple[int, tuple[int, ...]], float] = {}
        self._index = {name: i for i, name in enumerate(self.variables)}

    def local(self, y: str, parents: Iterable[str]) -> float:
        pa = tuple(sorted(self._index[p] for p in parents))
        yi = self._index[y]
        if yi in pa:
            raise ConfigError(f"{y!r} cannot be its own parent")
        if self.n <= len(pa) + 1:
            raise DataError(f"n={self.n} too small for {len(pa)} parents")
        key = (yi, pa)
        if key not in self._cache:
            rss = _rss(self._C, self.n, yi, pa, self.variables)
            logn = math.log(self.n)
            self._cache[key] = (
                -self.n * math.log(rss / self.n)
                - self.penalty_discount * (len(pa) + 1) * logn
            )
        return self._cache[key]


class DegenerateGaussianScore:
    """Mixed-type BIC: scores the one-hot embedded dataset.

    Each embedding column of y is regressed on the union of the parents'
    embedding columns; the penalty counts |E(y)| * (|E(Pa)| + 1) parameters.
    Coincides exactly with SemBicScore on all-continuous data.
    """

    mixed_ok = True

    def __init__(self, data: Dataset, penalty_discount: float = 2.0):
        self.penalty_discount = _check_penalty(penalty_discount)
        self.variables = tuple(data.names)
        self.n = data.n
        emb, mapping = one_hot_embed(data)
        self._emb_names = emb.names
        self._blocks = {name: mapping.columns_of(name) for name in data.names}
        self._C = _biased_moments(emb.columns)
        self._cache: dict[tuple[str, tuple[str, ...]], float] = {}

    def local(self, y: str, parents: Iterable[str]) -> float:
        pa_names = tuple(sorted(parents, key=self.variables.index))
        if y in pa_names:
            raise ConfigError(f"{y!r} cannot be its own parent")
        key = (y, pa_names)
        if key in self._cache:
            return self._cache[key]
        ey = self._blocks[y]
        epa: list[int] = []
        for p in pa_names:
            epa.extend(self._blocks[p])
        epa = sorted(epa)
        if self.n <= len(epa) + 1:
            raise DataError(f"n={self.n} too small for {len(epa)} embedded regressors")
        logn = math.log(self.n)
        fit = 0.0
        for e in ey:
            rss = _rss(self._C, self.n, e, epa, self._emb_names)
            fit += -self.n * math.log(rss / self.n)
        value = fit - self.penalty_discount * len(ey) * (len(epa) + 1) * logn
        self._cache[key] = value
        return value


def sem_bic_local(d: Dataset, y: str, parents: Iterable[str], penalty_discount: float = 2.0) -> float:
    return SemBicScore(d, penalty_discount).local(y, parents)


def degenerate_gaussian_local(
    d: Dataset, y: str, parents: Iterable[str], penalty_discount: float = 2.0
) -> float:
    return DegenerateGaussianScore(d, penalty_discount).local(y, parents)


def total_score(score: LocalScore, parent_map: dict[str, Sequence[str]]) -> float:
    """Decomposable DAG score: sum of local scores over the parent map."""
    return sum(score.local(v, parent_map.get(v, ())) for v in score.variables)


class ScoreBasedTest:
    """Independence test derived from a local score.

    x and y are independent given Z when neither direction of augmentation
    improves the score; the strength is the larger of the two deltas, so
    positive strength means dependence.
    """

    def __init__(self, score: LocalScore, alpha: float = 0.01):
        self.score = score
        self.alpha = alpha  # unused by the decision rule; kept for the contract
        self.variables = tuple(score.variables)
        self.mixed_ok = score.mixed_ok

    def decide(self, x: str, y: str, z: Iterable[str]) -> TestResult:
        zs = sorted(set(z), key=self.variables.index)
        d1 = self.score.local(y, zs + [x]) - self.score.local(y, zs)
        d2 = self.score.local(x, zs + [y]) - self.score.local(x, zs)
        strength = max(d1, d2)
        return TestResult(independent=strength < 0, p_value=None, strength=strength)

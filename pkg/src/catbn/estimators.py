"""Estimator-style wrappers around the learners and missing-value treatments.

Learners follow the usual ``fit`` protocol: hyper-parameters go to the
constructor, ``fit(X)`` stores the learned graph in ``graph_``, and
``score(X)`` returns the BIC of that graph on ``X``.  ``X`` may be a
:class:`~catbn.dataset.Dataset`, a data frame, or a 2-D array of labels.

Examples
--------
>>> from catbn.fixtures import collider_bn
>>> from catbn.params import forward_sample
>>> d = forward_sample(collider_bn(), 5000, seed=0)
>>> PCStable(alpha=0.01).fit(d).graph_.directed == {(0, 1), (2, 1)}
True
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .citest import CiConfig
from .dataset import MISSING_STATE, MISSING_TOKEN, DataError, Dataset, _ordered_unique, _sort_states
from .graph import Dag, Pdag, Variable, consistent_extension
from .knowledge import Knowledge
from .learn import SearchConfig, ges, grow_shrink, hill_climb, iamb, mmhc, pc_stable, rsmax2, tabu
from .score import graph_bic

__all__ = [
    "check_dataset",
    "PCStable",
    "GrowShrink",
    "IAMB",
    "HillClimbing",
    "Tabu",
    "GES",
    "MMHC",
    "RSMAX2",
    "ModeImputer",
    "MissingCategoryEncoder",
]


def _label(v) -> str | None:
    if v is None:
        return None
    if isinstance(v, (float, np.floating)):
        if np.isnan(v):
            return None
        if float(v).is_integer():
            return str(int(v))
    s = str(v)
    return None if s in ("", MISSING_TOKEN) else s


def check_dataset(X, feature_names=None) -> Dataset:
    """Coerce ``X`` into a :class:`Dataset`.

    Parameters
    ----------
    X : Dataset, data frame or array-like of shape (n_samples, n_features)
        ``None``, NaN, empty strings and ``"?"`` are read as missing.
    feature_names : sequence of str, optional
        Column names for array input; defaults to ``x0, x1, ...``.
    """
    if isinstance(X, Dataset):
        return X
    if hasattr(X, "columns") and hasattr(X, "to_numpy"):
        names = [str(c) for c in X.columns]
        values = X.to_numpy(dtype=object)
    else:
        values = np.asarray(X, dtype=object)
        if values.ndim != 2:
            raise DataError(f"expected a 2-D table, got an array with {values.ndim} dimension(s)")
        names = list(feature_names) if feature_names is not None else [f"x{j}" for j in range(values.shape[1])]
    if values.shape[0] == 0:
        raise DataError("no rows")
    if len(names) != values.shape[1]:
        raise DataError(f"{len(names)} feature names for {values.shape[1]} columns")
    columns = {name: [_label(v) for v in values[:, j]] for j, name in enumerate(names)}
    # sorted like the CSV reader, so the codes do not depend on row order
    states = {name: _sort_states(_ordered_unique(v for v in col if v is not None)) for name, col in columns.items()}
    return Dataset.from_labels(columns, states)


class _Learner(BaseEstimator):
    def _learn(self, d: Dataset):
        raise NotImplementedError

    def fit(self, X, y=None):
        """Learn a graph from ``X``; ``y`` is ignored."""
        d = check_dataset(X)
        self.graph_ = self._learn(d)
        self.feature_names_in_ = np.array(d.names, dtype=object)
        self.n_features_in_ = d.n_vars
        return self

    def to_dag(self) -> Dag:
        """The learned graph, or a consistent extension of it when partially directed."""
        check_is_fitted(self, "graph_")
        g = self.graph_
        return g if isinstance(g, Dag) else consistent_extension(g)

    def score(self, X, y=None) -> float:
        """BIC of the learned structure on ``X`` (larger is better)."""
        d = check_dataset(X)
        return graph_bic(d, self.to_dag()).bic

    def _ci(self) -> CiConfig:
        return CiConfig(test=self.test, alpha=self.alpha, max_cond_size=self.max_cond_size)

    def _search(self) -> SearchConfig:
        return SearchConfig(
            max_iter=self.max_iter,
            tabu_length=getattr(self, "tabu_length", 10),
            tabu_budget=getattr(self, "tabu_budget", 15),
            max_degree=self.max_degree,
        )


class _ConstraintLearner(_Learner):
    def __init__(self, test="chi2", alpha=0.05, max_cond_size=None, knowledge: Knowledge | None = None):
        self.test = test
        self.alpha = alpha
        self.max_cond_size = max_cond_size
        self.knowledge = knowledge


class PCStable(_ConstraintLearner):
    """PC with order-independent skeleton search; ``graph_`` is a :class:`Pdag`."""

    def _learn(self, d):
        return pc_stable(d, self._ci(), self.knowledge)


class GrowShrink(_ConstraintLearner):
    """Markov-blanket learner with a grow-until-fixpoint phase."""

    def _learn(self, d):
        return grow_shrink(d, self._ci(), self.knowledge)


class IAMB(_ConstraintLearner):
    """Markov-blanket learner admitting the most associated variable first."""

    def _learn(self, d):
        return iamb(d, self._ci(), self.knowledge)


class HillClimbing(_Learner):
    """Greedy BIC search over DAGs from the empty graph."""

    def __init__(self, max_iter=10_000, max_degree=None, knowledge: Knowledge | None = None):
        self.max_iter = max_iter
        self.max_degree = max_degree
        self.knowledge = knowledge

    def _learn(self, d):
        return hill_climb(d, self._search(), self.knowledge)


class Tabu(_Learner):
    """Hill climbing that continues past local optima with a tabu list."""

    def __init__(self, max_iter=10_000, tabu_length=10, tabu_budget=15, max_degree=None, knowledge: Knowledge | None = None):
        self.max_iter = max_iter
        self.tabu_length = tabu_length
        self.tabu_budget = tabu_budget
        self.max_degree = max_degree
        self.knowledge = knowledge

    def _learn(self, d):
        return tabu(d, self._search(), self.knowledge)


class GES(_Learner):
    """Greedy equivalence search; ``max_degree`` bounds adjacencies in the forward phase."""

    def __init__(self, max_iter=10_000, max_degree=None, knowledge: Knowledge | None = None):
        self.max_iter = max_iter
        self.max_degree = max_degree
        self.knowledge = knowledge

    def _learn(self, d):
        return ges(d, self._search(), self.knowledge)


class _HybridLearner(_Learner):
    def __init__(self, test="chi2", alpha=0.05, max_cond_size=None, max_iter=10_000, max_degree=None, knowledge: Knowledge | None = None):
        self.test = test
        self.alpha = alpha
        self.max_cond_size = max_cond_size
        self.max_iter = max_iter
        self.max_degree = max_degree
        self.knowledge = knowledge


class MMHC(_HybridLearner):
    """Max-min parents-and-children restriction followed by hill climbing."""

    def _learn(self, d):
        return mmhc(d, self._ci(), self._search(), self.knowledge)


class RSMAX2(_HybridLearner):
    """Interleaved grow-prune restriction followed by hill climbing."""

    def _learn(self, d):
        return rsmax2(d, self._ci(), self._search(), self.knowledge)


# ---------------------------------------------------------------------------
# missing-value treatments


def _check_same_schema(fitted: tuple[Variable, ...], d: Dataset) -> None:
    if [v.name for v in fitted] != d.names:
        raise DataError("columns differ from those seen in fit")


class ModeImputer(TransformerMixin, BaseEstimator):
    """Fill missing cells with the most frequent state seen in ``fit``.

    Ties go to the lowest state index.  ``modes_`` holds state labels, so
    data whose state lists differ from the fitted ones are still filled
    correctly.  ``transform`` returns a Dataset.
    """

    def fit(self, X, y=None):
        d = check_dataset(X)
        modes = []
        for j, v in enumerate(d.variables):
            col = d.codes[:, j]
            counts = np.bincount(col[col >= 0], minlength=v.cardinality)
            if counts.sum() == 0:
                raise DataError(f"column {v.name!r} has no observed values")
            modes.append(v.states[int(np.argmax(counts))])
        self.variables_ = d.variables
        self.modes_ = np.array(modes, dtype=object)
        self.n_features_in_ = d.n_vars
        return self

    def transform(self, X) -> Dataset:
        check_is_fitted(self, "modes_")
        d = check_dataset(X)
        _check_same_schema(self.variables_, d)
        codes = np.array(d.codes)
        for j, v in enumerate(d.variables):
            miss = codes[:, j] < 0
            if not miss.any():
                continue
            if self.modes_[j] not in v.states:
                raise DataError(f"fitted mode {self.modes_[j]!r} is not a state of {v.name!r}")
            codes[miss, j] = v.states.index(self.modes_[j])
        return Dataset(d.variables, codes)


class MissingCategoryEncoder(TransformerMixin, BaseEstimator):
    """Treat missing cells as an extra ``__missing__`` state.

    Columns that had missing cells during ``fit`` gain the state; a missing
    cell in any other column at ``transform`` time is an error.
    """

    def fit(self, X, y=None):
        d = check_dataset(X)
        self.variables_ = d.variables
        self.encoded_ = np.asarray(d.missing.any(axis=0))
        self.n_features_in_ = d.n_vars
        return self

    def transform(self, X) -> Dataset:
        check_is_fitted(self, "encoded_")
        d = check_dataset(X)
        _check_same_schema(self.variables_, d)
        miss = d.missing
        stray = miss.any(axis=0) & ~self.encoded_
        if stray.any():
            bad = [d.names[j] for j in np.flatnonzero(stray)]
            raise DataError(f"missing cells in columns not seen with missing values during fit: {bad}")
        codes = np.array(d.codes)
        variables = list(d.variables)
        for j in np.flatnonzero(self.encoded_):
            v = d.variables[j]
            variables[j] = Variable(v.name, v.states + (MISSING_STATE,))
            codes[miss[:, j], j] = v.cardinality
        return Dataset(variables, codes)

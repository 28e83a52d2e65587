"""Decomposable BIC scoring of discrete DAGs.

BIC(G, D) = sum_i [ LL(X_i | Pa_i) - free_params_i / 2 * ln n ], natural log
throughout, larger is better.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .dataset import DataError, Dataset, joint_codes
from .graph import Dag, GraphError, has_directed_path

__all__ = [
    "FamilyScore",
    "ScoreCache",
    "BicResult",
    "family_bic",
    "free_parameters",
    "graph_bic",
    "delta_bic",
]


@dataclass(frozen=True)
class FamilyScore:
    child: int
    parents: frozenset
    log_likelihood: float
    free_params: int
    n: int

    @property
    def penalty(self) -> float:
        return 0.5 * self.free_params * math.log(self.n) if self.n > 0 else 0.0

    @property
    def bic(self) -> float:
        return self.log_likelihood - self.penalty


def free_parameters(child_card: int, parent_cards: Iterable[int]) -> int:
    q = 1
    for c in parent_cards:
        q *= int(c)
    return (int(child_card) - 1) * q


def _family(d: Dataset, child: int, parents: tuple[int, ...]) -> FamilyScore:
    card = d.cardinalities
    r = int(card[child])
    pc = [int(card[p]) for p in parents]
    q = int(np.prod(pc)) if pc else 1
    rows, w = d.patterns()
    key = joint_codes(rows[:, list(parents)], pc) * r + rows[:, child]
    counts = np.bincount(key, weights=w, minlength=q * r).reshape(q, r)
    totals = counts.sum(axis=1, keepdims=True)
    nz = counts > 0
    ll = float((counts[nz] * np.log((counts / np.where(totals > 0, totals, 1.0))[nz])).sum())
    return FamilyScore(child, frozenset(parents), min(ll, 0.0), (r - 1) * q, d.n_rows)


def family_bic(d: Dataset, child, parents=()) -> FamilyScore:
    """Log-likelihood, free parameters and BIC of one family."""
    if d.has_missing():
        raise DataError("scoring needs a dataset without missing values")
    ci = d.index(child)
    pa = tuple(sorted({d.index(p) for p in parents}))
    if ci in pa:
        raise GraphError("a variable cannot be its own parent")
    return _family(d, ci, pa)


class ScoreCache:
    """Memo of family scores for one dataset.

    Safe for concurrent use: lookups are lock-free and insertions are
    serialised.  Entries are only meaningful for ``self.data``.
    """

    def __init__(self, d: Dataset):
        if d.has_missing():
            raise DataError("scoring needs a dataset without missing values")
        self.data = d
        self._memo: dict = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def family(self, child: int, parents) -> FamilyScore:
        key = (int(child), frozenset(parents))
        fs = self._memo.get(key)
        if fs is not None:
            self.hits += 1
            return fs
        fs = _family(self.data, key[0], tuple(sorted(key[1])))
        with self._lock:
            self.misses += 1
            self._memo.setdefault(key, fs)
        return fs

    def local(self, child: int, parents) -> float:
        return self.family(child, parents).bic

    def __len__(self):
        return len(self._memo)


class BicResult(NamedTuple):
    bic: float
    log_likelihood: float
    penalty: float
    free_params: int


def _aligned_index(d: Dataset, g: Dag) -> list[int]:
    try:
        return [d.index(name) for name in g.nodes]
    except DataError as exc:
        raise GraphError(f"graph variable missing from dataset: {exc}") from None


def graph_bic(d: Dataset, g: Dag, cache: ScoreCache | None = None) -> BicResult:
    """Total BIC with its log-likelihood and penalty components."""
    if cache is None:
        cache = ScoreCache(d)
    elif cache.data is not d:
        raise ValueError("score cache belongs to another dataset")
    col = _aligned_index(d, g)
    ll = pen = 0.0
    fp = 0
    for i in range(g.n):
        fs = cache.family(col[i], [col[p] for p in g.parents(i)])
        ll += fs.log_likelihood
        pen += fs.penalty
        fp += fs.free_params
    return BicResult(ll - pen, ll, pen, fp)


def delta_bic(d: Dataset, g: Dag, move, cache: ScoreCache | None = None) -> float:
    """Score change from applying ``move`` = (kind, a, b) to ``g``.

    ``kind`` is ``"add"``, ``"delete"`` or ``"reverse"`` and refers to the arc
    ``a -> b``.  Only the families whose parent sets change are scored.
    """
    if cache is None:
        cache = ScoreCache(d)
    kind, a, b = move
    a, b = g.index(a), g.index(b)
    col = _aligned_index(d, g)
    pa_b = set(g.parents(b))
    if kind == "add":
        if g.adjacent(a, b) or a == b:
            raise GraphError("add: nodes already adjacent")
        if has_directed_path(g._children, b, a):
            raise GraphError("add: arc would close a cycle")
        return _local(cache, col, b, pa_b | {a}) - _local(cache, col, b, pa_b)
    if kind == "delete":
        if not g.has_arc(a, b):
            raise GraphError("delete: arc not present")
        return _local(cache, col, b, pa_b - {a}) - _local(cache, col, b, pa_b)
    if kind == "reverse":
        if not g.has_arc(a, b):
            raise GraphError("reverse: arc not present")
        trimmed = g.with_arcs(remove=[(a, b)])
        if has_directed_path(trimmed._children, a, b):
            raise GraphError("reverse: arc would close a cycle")
        pa_a = set(g.parents(a))
        return (
            _local(cache, col, b, pa_b - {a})
            - _local(cache, col, b, pa_b)
            + _local(cache, col, a, pa_a | {b})
            - _local(cache, col, a, pa_a)
        )
    raise ValueError(f"unknown move {kind!r}")


def _local(cache: ScoreCache, col, child: int, parents) -> float:
    return cache.local(col[child], [col[p] for p in parents])

"""Comparison of learned graphs against a reference graph.

Counting convention: an arc present in both graphs with the same direction is
a true positive; an arc of the learned graph that is absent from the
reference or reversed there is a false positive; a reference arc not matched
with the same direction is a false negative.  A reversed arc therefore counts
once as a false positive and once as a false negative.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from itertools import combinations
from typing import Sequence

import numpy as np

from .graph import Dag, GraphError, Pdag, extend_to_dag

__all__ = [
    "ConfusionCounts",
    "ComparisonReport",
    "REPORT_COLUMNS",
    "confusion",
    "precision_recall_f1",
    "shd",
    "bsf",
    "causal_paths",
    "pairwise_matrix",
    "align",
]


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int
    reversed: int
    reference_arcs: int
    independencies: int

    @property
    def extra(self) -> int:
        """False positives on pairs that are non-adjacent in the reference."""
        return self.fp - self.reversed


def _as_dag(g, seed) -> Dag:
    return g if isinstance(g, Dag) else extend_to_dag(g, seed)


def align(g, ref, seed=0) -> tuple[Dag, Dag]:
    """Extend PDAGs to DAGs and express ``g`` over the reference node order."""
    g, ref = _as_dag(g, seed), _as_dag(ref, seed)
    if set(g.nodes) != set(ref.nodes):
        raise GraphError("graphs are over different variable sets")
    if g.nodes != ref.nodes:
        g = g.relabel(ref.nodes)
    return g, ref


def confusion(g, ref, seed=0) -> ConfusionCounts:
    g, ref = align(g, ref, seed)
    n = ref.n
    arcs, ref_arcs = g.arcs, ref.arcs
    tp = len(arcs & ref_arcs)
    rev = sum(1 for a, b in arcs if (b, a) in ref_arcs)
    fp = len(arcs) - tp
    fn = len(ref_arcs) - tp
    adj = {(min(a, b), max(a, b)) for a, b in arcs}
    ref_adj = {(min(a, b), max(a, b)) for a, b in ref_arcs}
    pairs = n * (n - 1) // 2
    tn = pairs - len(adj | ref_adj)
    return ConfusionCounts(tp, fp, fn, tn, rev, len(ref_arcs), pairs - len(ref_arcs))


def precision_recall_f1(c: ConfusionCounts) -> tuple[float, float, float]:
    p = c.tp / (c.tp + c.fp) if c.tp + c.fp else 0.0
    r = c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f1


def _status(g, a: int, b: int) -> int:
    if isinstance(g, Dag):
        if (a, b) in g.arcs:
            return 1
        if (b, a) in g.arcs:
            return 2
        return 0
    if (a, b) in g.directed:
        return 1
    if (b, a) in g.directed:
        return 2
    if (min(a, b), max(a, b)) in g.undirected:
        return 3
    return 0


def shd(g, ref) -> int:
    """Number of node pairs whose edge status differs (missing, extra or reversed)."""
    if set(g.nodes) != set(ref.nodes):
        raise GraphError("graphs are over different variable sets")
    count = 0
    for u, v in combinations(ref.nodes, 2):
        if _status(ref, ref.index(u), ref.index(v)) != _status(g, g.index(u), g.index(v)):
            count += 1
    return count


def bsf(g, ref, seed=0) -> float:
    """Balanced scoring function in [-1, 1]; 1 for a perfect match, 0 for an empty graph.

    ``0.5 * (TP/a + TN/i - FP/i - FN/a)`` with ``a`` the reference arc count
    and ``i`` the number of non-adjacent reference pairs.  A reversed arc is
    scored as a missed dependency (in FN) only, so FP here counts the extra
    arcs on independent pairs and ``TN + FP = i``.
    """
    c = confusion(g, ref, seed)
    a, i = c.reference_arcs, c.independencies
    if a == 0 or i == 0:
        raise GraphError("BSF needs a reference with at least one arc and one non-adjacent pair")
    fp_ind = c.extra
    tn = i - fp_ind
    return 0.5 * (c.tp / a + tn / i - fp_ind / i - c.fn / a)


def causal_paths(g, causes: Sequence[str], target: str, seed=0) -> int:
    """How many of ``causes`` have a directed path to ``target``."""
    g = _as_dag(g, seed)
    if target in causes:
        raise GraphError("target must not be listed as a cause")
    t = g.index(target)
    anc = g.ancestors(t)
    return sum(1 for c in causes if c in g.nodes and g.index(c) in anc)


def _restrict(g, names):
    keep = [v for v in g.nodes if v in names]
    if isinstance(g, Dag):
        return Dag(keep, [(g.nodes[a], g.nodes[b]) for a, b in g.arcs if g.nodes[a] in names and g.nodes[b] in names])
    return Pdag(
        keep,
        [(g.nodes[a], g.nodes[b]) for a, b in g.directed if g.nodes[a] in names and g.nodes[b] in names],
        [(g.nodes[a], g.nodes[b]) for a, b in g.undirected if g.nodes[a] in names and g.nodes[b] in names],
    )


def pairwise_matrix(graphs: dict, metric: str = "shd", seed=0):
    """Metric between every ordered pair ``(row, column)``; column is the reference.

    Returns ``(labels, matrix, mean_off_diagonal, restricted)`` where
    ``restricted`` is True when graphs had different variable sets and were
    compared over their shared variables only.
    """
    labels = list(graphs)
    dags = {k: _as_dag(v, seed) for k, v in graphs.items()}
    shared = set.intersection(*(set(g.nodes) for g in dags.values())) if dags else set()
    restricted = any(set(g.nodes) != shared for g in dags.values())
    if restricted:
        dags = {k: _restrict(g, shared) for k, g in dags.items()}
    fn = {
        "shd": lambda g, r: float(shd(g, r)),
        "bsf": lambda g, r: bsf(g, r, seed),
        "f1": lambda g, r: precision_recall_f1(confusion(g, r, seed))[2],
    }[metric]
    n = len(labels)
    mat = np.zeros((n, n))
    for i, j in np.ndindex(n, n):
        mat[i, j] = fn(dags[labels[i]], dags[labels[j]])
    off = ~np.eye(n, dtype=bool)
    mean = float(mat[off].mean()) if n > 1 else float("nan")
    return labels, mat, mean, restricted


REPORT_COLUMNS = [
    "label",
    "algorithm",
    "fragments",
    "edges",
    "free_params",
    "bic",
    "cv_loss",
    "tp",
    "fp",
    "fn",
    "precision",
    "recall",
    "f1",
    "shd",
    "bsf",
    "causal_paths",
    "elapsed_s",
]


@dataclass
class ComparisonReport:
    """One row of the algorithm comparison table."""

    label: str
    algorithm: str
    fragments: int
    edges: int
    free_params: int
    bic: float
    cv_loss: float
    tp: int | None = None
    fp: int | None = None
    fn: int | None = None
    precision: float | None = None
    recall: float | None = None
    f1: float | None = None
    shd: int | None = None
    bsf: float | None = None
    causal_paths: int | None = None
    elapsed_s: float | None = None

    def as_row(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

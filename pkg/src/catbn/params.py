"""Conditional probability tables, forward sampling and cross-validated loss."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from pathlib import Path

import numpy as np

from .dataset import DataError, Dataset, joint_codes
from .graph import Dag, Variable, topological_order

__all__ = [
    "Cpt",
    "ParameterizedBn",
    "fit_mle",
    "forward_sample",
    "log_prob_rows",
    "cv_loss",
    "format_bn",
    "parse_bn",
    "save_bn",
    "load_bn",
]


@dataclass(frozen=True)
class Cpt:
    """``probs[u, k] = P(child = k | parents = u)``, ``u`` row-major over ``parents``."""

    child: str
    parents: tuple[str, ...]
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 2:
            raise ValueError("CPT must be a 2-D array")
        if (p < 0).any() or not np.allclose(p.sum(axis=1), 1.0, atol=1e-12, rtol=0):
            raise ValueError(f"CPT rows of {self.child!r} must be non-negative and sum to 1")
        object.__setattr__(self, "probs", p)


class ParameterizedBn:
    """A DAG over categorical variables with one CPT per variable."""

    def __init__(self, variables, dag: Dag, cpts):
        self.variables = tuple(variables)
        names = [v.name for v in self.variables]
        if list(dag.nodes) != names:
            dag = dag.relabel(names)
        self.dag = dag
        self.cpts = {c.child: c for c in cpts}
        card = {v.name: v.cardinality for v in self.variables}
        for i, v in enumerate(self.variables):
            cpt = self.cpts.get(v.name)
            if cpt is None:
                raise ValueError(f"no CPT for {v.name!r}")
            if set(cpt.parents) != {names[p] for p in dag.parents(i)}:
                raise ValueError(f"CPT parents of {v.name!r} disagree with the DAG")
            q = int(np.prod([card[p] for p in cpt.parents])) if cpt.parents else 1
            if cpt.probs.shape != (q, v.cardinality):
                raise ValueError(f"CPT of {v.name!r} has shape {cpt.probs.shape}, expected {(q, v.cardinality)}")

    @property
    def names(self) -> list[str]:
        return [v.name for v in self.variables]


def fit_mle(d: Dataset, g: Dag, alpha: float = 0.0) -> ParameterizedBn:
    """Estimate CPTs from counts with ``alpha`` pseudo-counts per cell.

    With ``alpha = 0`` a parent configuration never observed gets a uniform row.
    """
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if d.has_missing():
        raise DataError("parameter fitting needs a dataset without missing values")
    col = [d.index(name) for name in g.nodes]
    variables = [d.variables[c] for c in col]
    cpts = []
    for i, name in enumerate(g.nodes):
        parents = g.parents(i)
        pcols = [col[p] for p in parents]
        r = variables[i].cardinality
        pc = [int(d.cardinalities[c]) for c in pcols]
        q = int(np.prod(pc)) if pc else 1
        key = joint_codes(d.codes[:, pcols], pc) * r + d.codes[:, col[i]]
        counts = np.bincount(key, minlength=q * r).reshape(q, r).astype(float) + alpha
        totals = counts.sum(axis=1, keepdims=True)
        probs = np.where(totals > 0, counts / np.where(totals > 0, totals, 1.0), 1.0 / r)
        cpts.append(Cpt(name, tuple(g.nodes[p] for p in parents), probs))
    return ParameterizedBn(variables, g, cpts)


def _parent_index(bn: ParameterizedBn, codes: np.ndarray, child: str) -> np.ndarray:
    cpt = bn.cpts[child]
    pos = {n: i for i, n in enumerate(bn.names)}
    cols = [pos[p] for p in cpt.parents]
    card = [bn.variables[c].cardinality for c in cols]
    return joint_codes(codes[:, cols], card)


def forward_sample(bn: ParameterizedBn, n: int, seed=None) -> Dataset:
    """Draw ``n`` complete rows in topological order."""
    if n < 0:
        raise ValueError("n must be non-negative")
    rng = np.random.default_rng(seed)
    p = len(bn.variables)
    codes = np.zeros((n, p), dtype=np.int64)
    order = topological_order(bn.dag.arcs, p)
    for i in order:
        name = bn.variables[i].name
        cpt = bn.cpts[name]
        u = rng.random(n)
        rows = _parent_index(bn, codes, name)
        cum = np.cumsum(cpt.probs, axis=1)[rows]
        codes[:, i] = np.minimum((u[:, None] >= cum).sum(axis=1), cpt.probs.shape[1] - 1)
    return Dataset(bn.variables, codes)


def log_prob_rows(bn: ParameterizedBn, d: Dataset) -> np.ndarray:
    """Natural-log joint probability of every (complete) row of ``d``."""
    codes = d.select(bn.names).codes
    if (codes < 0).any():
        raise DataError("rows must be complete")
    total = np.zeros(codes.shape[0])
    for i, v in enumerate(bn.variables):
        cpt = bn.cpts[v.name]
        rows = _parent_index(bn, codes, v.name)
        with np.errstate(divide="ignore"):
            total += np.log(cpt.probs[rows, codes[:, i]])
    return total


def cv_loss(d: Dataset, g: Dag, folds: int = 10, alpha: float = 1.0, seed=0) -> float:
    """Average held-out negative log-likelihood per row under k-fold CV.

    Rows are shuffled with ``seed`` and split into ``folds`` near-equal parts;
    each part is scored by CPTs fitted on the remaining rows.
    """
    if folds < 2:
        raise ValueError("need at least 2 folds")
    if folds > d.n_rows:
        raise DataError("more folds than rows")
    rng = np.random.default_rng(seed)
    parts = np.array_split(rng.permutation(d.n_rows), folds)
    total = 0.0
    for k in range(folds):
        train = np.concatenate([parts[j] for j in range(folds) if j != k])
        bn = fit_mle(d.take(train), g, alpha)
        total -= float(log_prob_rows(bn, d.take(parts[k])).sum())
    return total / d.n_rows


# ---------------------------------------------------------------------------
# plain-text network format
#
#   variable <name> <state> <state> ...
#   cpt <child> | <parent> <parent> ...
#   <parent states ...> : <p_1> <p_2> ...        (one line per parent configuration)
#
# Names and states must not contain whitespace, '|' or ':'.  Rows appear in
# row-major order of the parent configurations; probabilities use 17
# significant digits so a save/load round trip is exact.


def format_bn(bn: ParameterizedBn) -> str:
    lines = ["# catbn network"]
    for v in bn.variables:
        for token in (v.name, *v.states):
            if any(c.isspace() for c in token) or "|" in token or ":" in token:
                raise ValueError(f"label {token!r} cannot be written in the network format")
        lines.append(" ".join(["variable", v.name, *v.states]))
    var = {v.name: v for v in bn.variables}
    for v in bn.variables:
        cpt = bn.cpts[v.name]
        lines.append(" ".join(["cpt", v.name, "|", *cpt.parents]).rstrip())
        configs = product(*(var[p].states for p in cpt.parents))
        for cfg, row in zip(configs, cpt.probs):
            probs = " ".join(format(float(x), ".17g") for x in row)
            lines.append(f"  {' '.join(cfg)} : {probs}".replace("   :", " :"))
    return "\n".join(lines) + "\n"


def parse_bn(text: str) -> ParameterizedBn:
    variables: list[Variable] = []
    tables: dict[str, tuple[tuple[str, ...], list[list[float]]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split()
        if head[0] == "variable":
            variables.append(Variable(head[1], head[2:]))
        elif head[0] == "cpt":
            if len(head) < 3 or head[2] != "|":
                raise ValueError(f"line {lineno}: expected 'cpt <child> | <parents>'")
            current = head[1]
            tables[current] = (tuple(head[3:]), [])
        elif ":" in line and current is not None:
            _, probs = line.split(":", 1)
            tables[current][1].append([float(x) for x in probs.split()])
        else:
            raise ValueError(f"line {lineno}: cannot parse {raw!r}")
    names = [v.name for v in variables]
    arcs = [(p, c) for c, (ps, _) in tables.items() for p in ps]
    dag = Dag(names, arcs)
    cpts = [Cpt(c, ps, np.array(rows, dtype=float)) for c, (ps, rows) in tables.items()]
    return ParameterizedBn(variables, dag, cpts)


def save_bn(bn: ParameterizedBn, path) -> None:
    Path(path).write_text(format_bn(bn), encoding="utf-8")


def load_bn(path) -> ParameterizedBn:
    return parse_bn(Path(path).read_text(encoding="utf-8"))

"""Categorical datasets: loading, missing-value treatments and counting.

A :class:`Dataset` stores integer state codes in an ``(N, p)`` array, with
``-1`` marking a missing cell.  All transformations return new datasets.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .graph import Variable

__all__ = [
    "DataError",
    "Dataset",
    "SyntheticSpec",
    "ContingencyTable",
    "MISSING_STATE",
    "MISSING_TOKEN",
    "load_csv",
    "read_csv_text",
    "to_csv_text",
    "drop_missing",
    "impute_mode",
    "missing_as_category",
    "subsample",
    "add_synthetic",
    "contingency",
    "rank_features",
    "entropy",
]

MISSING_TOKEN = "?"
MISSING_STATE = "__missing__"


class DataError(ValueError):
    """Raised for malformed or inconsistent data."""


class Dataset:
    """Immutable table of categorical observations.

    Parameters
    ----------
    variables : sequence of Variable
    codes : array-like of int, shape (N, p)
        State indices; ``-1`` marks a missing value.
    """

    __slots__ = ("variables", "codes", "_index", "_patterns")

    def __init__(self, variables: Sequence[Variable], codes):
        variables = tuple(variables)
        codes = np.array(codes, dtype=np.int64, copy=True)
        if codes.ndim != 2:
            codes = codes.reshape(-1, len(variables))
        if codes.shape[1] != len(variables):
            raise DataError(f"{codes.shape[1]} columns but {len(variables)} variables")
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise DataError("variable names must be unique")
        for j, v in enumerate(variables):
            col = codes[:, j]
            if col.size and (col.max() >= v.cardinality or col.min() < -1):
                raise DataError(f"column {v.name!r} has codes outside its state space")
        codes.setflags(write=False)
        self.variables = variables
        self.codes = codes
        self._index = {n: i for i, n in enumerate(names)}
        self._patterns = None

    @classmethod
    def from_labels(cls, columns: Mapping[str, Sequence], states: Mapping[str, Sequence] | None = None):
        """Build from a mapping of column name to state labels (``None`` = missing)."""
        states = states or {}
        variables, cols = [], []
        for name, values in columns.items():
            labels = list(states.get(name) or _ordered_unique(v for v in values if v is not None))
            try:
                var = Variable(name, labels)
            except ValueError as exc:
                raise DataError(str(exc)) from None
            lookup = {s: k for k, s in enumerate(var.states)}
            try:
                cols.append([-1 if v is None else lookup[str(v)] for v in values])
            except KeyError as exc:
                raise DataError(f"value {exc.args[0]!r} not a state of {name!r}") from None
            variables.append(var)
        return cls(variables, np.array(cols, dtype=np.int64).T.reshape(-1, len(variables)))

    @property
    def names(self) -> list[str]:
        return [v.name for v in self.variables]

    @property
    def n_rows(self) -> int:
        return self.codes.shape[0]

    @property
    def n_vars(self) -> int:
        return self.codes.shape[1]

    @property
    def cardinalities(self) -> np.ndarray:
        return np.array([v.cardinality for v in self.variables], dtype=np.int64)

    @property
    def missing(self) -> np.ndarray:
        return self.codes < 0

    def has_missing(self) -> bool:
        return bool((self.codes < 0).any())

    def index(self, var) -> int:
        if isinstance(var, (int, np.integer)):
            if not 0 <= var < self.n_vars:
                raise DataError(f"variable index {var} out of range")
            return int(var)
        try:
            return self._index[var]
        except KeyError:
            raise DataError(f"unknown variable {var!r}") from None

    def variable(self, var) -> Variable:
        return self.variables[self.index(var)]

    def column(self, var) -> np.ndarray:
        return self.codes[:, self.index(var)]

    def patterns(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct rows and their multiplicities; counting over these is exact and faster."""
        if self._patterns is None:
            if self.n_rows:
                rows, counts = np.unique(self.codes, axis=0, return_counts=True)
            else:
                rows, counts = self.codes, np.zeros(0, dtype=np.int64)
            self._patterns = (rows, counts.astype(np.int64))
        return self._patterns

    def take(self, rows) -> "Dataset":
        return Dataset(self.variables, self.codes[np.asarray(rows, dtype=np.int64)])

    def select(self, names: Sequence[str]) -> "Dataset":
        idx = [self.index(n) for n in names]
        return Dataset([self.variables[i] for i in idx], self.codes[:, idx])

    def labels(self) -> list[list[str]]:
        out = []
        for row in self.codes:
            out.append([MISSING_TOKEN if c < 0 else v.states[c] for v, c in zip(self.variables, row)])
        return out

    def __eq__(self, other):
        return (
            isinstance(other, Dataset)
            and self.variables == other.variables
            and np.array_equal(self.codes, other.codes)
        )

    def __hash__(self):
        return hash((self.variables, self.codes.tobytes()))

    def __repr__(self):
        return f"Dataset({self.n_rows} rows x {self.n_vars} variables)"


def _ordered_unique(values) -> list[str]:
    seen = {}
    for v in values:
        seen.setdefault(str(v), None)
    return list(seen)


def _sort_states(states: list[str]) -> list[str]:
    try:
        return sorted(states, key=float)
    except ValueError:
        return sorted(states)


# ---------------------------------------------------------------------------
# CSV input/output


def read_csv_text(text: str, schema: Mapping[str, Sequence[str]] | None = None) -> Dataset:
    """Parse CSV text; an empty cell or ``?`` marks a missing value.

    Without a schema, each variable's states are the observed labels sorted
    (numerically when every label parses as a number).
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise DataError("CSV has no header row") from None
    if len(set(header)) != len(header) or any(not h for h in header):
        raise DataError("CSV header has empty or duplicate names")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise DataError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        rows.append([None if c.strip() in ("", MISSING_TOKEN) else c.strip() for c in row])
    schema = dict(schema or {})
    unknown = set(schema) - set(header)
    if unknown:
        raise DataError(f"schema names unknown columns {sorted(unknown)}")
    variables, codes = [], np.full((len(rows), len(header)), -1, dtype=np.int64)
    for j, name in enumerate(header):
        observed = [r[j] for r in rows if r[j] is not None]
        if name in schema:
            states = [str(s) for s in schema[name]]
        else:
            states = _sort_states(_ordered_unique(observed))
        if len(states) < 2:
            raise DataError(f"variable {name!r} has fewer than 2 states")
        lookup = {s: k for k, s in enumerate(states)}
        for i, r in enumerate(rows):
            if r[j] is None:
                continue
            try:
                codes[i, j] = lookup[r[j]]
            except KeyError:
                raise DataError(f"value {r[j]!r} of {name!r} is outside the declared states") from None
        variables.append(Variable(name, states))
    return Dataset(variables, codes)


def load_csv(path, schema: Mapping[str, Sequence[str]] | None = None) -> Dataset:
    """Load a UTF-8 CSV file with a header row."""
    return read_csv_text(Path(path).read_text(encoding="utf-8"), schema)


def to_csv_text(d: Dataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(d.names)
    w.writerows(d.labels())
    return buf.getvalue()


# ---------------------------------------------------------------------------
# missing values


def drop_missing(d: Dataset) -> Dataset:
    """Remove every row with at least one missing cell."""
    keep = ~d.missing.any(axis=1)
    if not keep.any():
        raise DataError("every row has a missing value")
    return Dataset(d.variables, d.codes[keep])


def impute_mode(d: Dataset) -> Dataset:
    """Replace missing cells by the column mode (lowest state index on ties)."""
    codes = np.array(d.codes)
    for j, v in enumerate(d.variables):
        col = codes[:, j]
        miss = col < 0
        if not miss.any():
            continue
        counts = np.bincount(col[~miss], minlength=v.cardinality)
        if counts.sum() == 0:
            raise DataError(f"column {v.name!r} has no observed values")
        col[miss] = int(np.argmax(counts))
    return Dataset(d.variables, codes)


def missing_as_category(d: Dataset) -> Dataset:
    """Give each column with missing cells an extra ``__missing__`` state."""
    codes = np.array(d.codes)
    variables = list(d.variables)
    for j, v in enumerate(d.variables):
        miss = codes[:, j] < 0
        if miss.any():
            variables[j] = Variable(v.name, v.states + (MISSING_STATE,))
            codes[miss, j] = v.cardinality
    return Dataset(variables, codes)


def subsample(d: Dataset, n: int, seed=None) -> Dataset:
    """Draw ``n`` rows uniformly without replacement."""
    if n <= 0 or n > d.n_rows:
        raise DataError(f"sample size {n} not in 1..{d.n_rows}")
    rng = np.random.default_rng(seed)
    return d.take(rng.permutation(d.n_rows)[:n])


# ---------------------------------------------------------------------------
# synthetic variables


@dataclass
class SyntheticSpec:
    """A variable computed deterministically from parent columns.

    ``mapping`` is either a dict from tuples of parent state labels to an
    output label, or a callable taking the parent labels and returning one.
    """

    name: str
    parents: list[str]
    mapping: Mapping[tuple, str] | Callable[..., str]
    states: list[str] | None = field(default=None)

    def table(self, d: Dataset) -> tuple[list[str], dict[tuple[int, ...], str]]:
        parent_vars = [d.variable(p) for p in self.parents]
        out = {}
        for combo in product(*(range(v.cardinality) for v in parent_vars)):
            labels = tuple(v.states[c] for v, c in zip(parent_vars, combo))
            if callable(self.mapping):
                value = self.mapping(*labels)
            else:
                if labels not in self.mapping:
                    raise DataError(f"synthetic {self.name!r}: no output for parent states {labels}")
                value = self.mapping[labels]
            out[combo] = str(value)
        states = list(self.states) if self.states else _sort_states(_ordered_unique(out.values()))
        if len(set(out.values())) < 2 and not self.states:
            raise DataError(f"synthetic {self.name!r} is constant; needs at least 2 output states")
        if len(states) < 2:
            raise DataError(f"synthetic {self.name!r} needs at least 2 output states")
        bad = set(out.values()) - set(states)
        if bad:
            raise DataError(f"synthetic {self.name!r} produces undeclared states {sorted(bad)}")
        return states, out


def add_synthetic(d: Dataset, spec: SyntheticSpec) -> Dataset:
    """Append the column defined by ``spec``."""
    if spec.name in d.names:
        raise DataError(f"variable {spec.name!r} already exists")
    idx = [d.index(p) for p in spec.parents]
    if (d.codes[:, idx] < 0).any():
        raise DataError(f"synthetic {spec.name!r}: parent columns contain missing values")
    states, table = spec.table(d)
    lookup = {s: k for k, s in enumerate(states)}
    card = [d.variables[i].cardinality for i in idx]
    flat = np.zeros(int(np.prod(card)), dtype=np.int64)
    for combo, label in table.items():
        flat[np.ravel_multi_index(combo, card)] = lookup[label]
    keys = np.ravel_multi_index(tuple(d.codes[:, i] for i in idx), card) if idx else np.zeros(d.n_rows, dtype=np.int64)
    new_col = flat[keys]
    return Dataset(d.variables + (Variable(spec.name, states),), np.column_stack([d.codes, new_col]))


# ---------------------------------------------------------------------------
# counting


@dataclass(frozen=True)
class ContingencyTable:
    """Joint counts of a child variable against a list of conditioning variables.

    ``counts[k, u]`` is the number of rows with child state ``k`` and joint
    conditioning configuration ``u`` (row-major over ``conditioning``).
    """

    child: str
    conditioning: tuple[str, ...]
    cardinalities: tuple[int, ...]
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def child_marginal(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def conditioning_marginal(self) -> np.ndarray:
        return self.counts.sum(axis=0)


def joint_codes(codes: np.ndarray, card: Sequence[int]) -> np.ndarray:
    """Row-major joint configuration index of the given columns."""
    if codes.shape[1] == 0:
        return np.zeros(codes.shape[0], dtype=np.int64)
    out = codes[:, 0].astype(np.int64)
    for j in range(1, codes.shape[1]):
        out = out * card[j] + codes[:, j]
    return out


def contingency(d: Dataset, child, conditioning: Sequence = ()) -> ContingencyTable:
    """Exact joint counts of ``child`` against ``conditioning``."""
    ci = d.index(child)
    cond = [d.index(c) for c in conditioning]
    cols = [ci] + cond
    sub = d.codes[:, cols]
    if (sub < 0).any():
        raise DataError("contingency table requested over columns with missing values")
    card = [int(d.cardinalities[c]) for c in cond]
    q = int(np.prod(card)) if card else 1
    r = int(d.cardinalities[ci])
    key = sub[:, 0] * q + joint_codes(sub[:, 1:], card)
    counts = np.bincount(key, minlength=r * q).reshape(r, q)
    return ContingencyTable(
        d.variables[ci].name,
        tuple(d.variables[c].name for c in cond),
        (r, *card),
        counts,
    )


# ---------------------------------------------------------------------------
# feature ranking


def entropy(counts) -> float:
    """Shannon entropy in nats of a count vector."""
    counts = np.asarray(counts, dtype=float).ravel()
    total = counts.sum()
    if total <= 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log(p)).sum())


def rank_features(d: Dataset, target) -> list[tuple[str, float, float]]:
    """Rank variables by information gain about ``target``.

    Returns ``(name, information_gain, pearson_correlation)`` tuples sorted by
    information gain, largest first.  Correlation uses the integer state codes
    in declared state order, so it is sensitive to that ordering.
    Rows where the candidate variable is missing are skipped for that pair.
    """
    ti = d.index(target)
    t = d.codes[:, ti]
    if (t < 0).any():
        raise DataError("target has missing values")
    h_t = entropy(np.bincount(t))
    if h_t == 0.0:
        raise DataError("target is constant")
    out = []
    for j, v in enumerate(d.variables):
        if j == ti:
            continue
        x = d.codes[:, j]
        ok = x >= 0
        xs, ts = x[ok], t[ok]
        rt = d.variables[ti].cardinality
        joint = np.bincount(xs * rt + ts, minlength=v.cardinality * rt).reshape(v.cardinality, rt)
        n = joint.sum()
        h_cond = sum(row.sum() / n * entropy(row) for row in joint if row.sum() > 0)
        ig = max(0.0, entropy(joint.sum(axis=0)) - h_cond)
        if xs.std() == 0 or ts.std() == 0:
            corr = 0.0
        else:
            corr = float(np.corrcoef(xs, ts)[0, 1])
        out.append((v.name, float(ig), corr))
    out.sort(key=lambda r: (-r[1], r[0]))
    return out

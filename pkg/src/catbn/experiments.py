"""Experiment protocols behind the command-line tool.

Each ``run_*`` function takes a :class:`RunConfig`, writes its artifacts
under ``cfg.out_dir`` and returns the table rows it wrote.  Every CSV starts
with ``#`` provenance lines (tool version, seeds, config hash, test and
score names, missing-value treatment) and contains no timestamps.  With
``timing=False`` the elapsed-time column is written as ``NA`` so repeated
runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import yaml

from . import __version__
from .citest import TESTS, CiConfig
from .dataset import (
    DataError,
    Dataset,
    SyntheticSpec,
    add_synthetic,
    drop_missing,
    impute_mode,
    load_csv,
    missing_as_category,
    rank_features,
    subsample,
    to_csv_text,
)
from .graph import Dag, GraphError, Pdag, empty_graph, extend_to_dag, fragments, random_connected_dag, read_arc_csv, to_arc_csv, to_dot
from .knowledge import Knowledge, load_knowledge, validate_output
from .learn import ALGORITHMS, SearchConfig, learn
from .metrics import REPORT_COLUMNS, ComparisonReport, bsf, causal_paths, confusion, pairwise_matrix, precision_recall_f1, shd
from .params import cv_loss
from .score import ScoreCache, graph_bic

__all__ = [
    "ConfigError",
    "RunConfig",
    "load_config",
    "run_learn",
    "run_suite",
    "run_sweep",
    "run_ablation",
    "run_missing_ablation",
    "run_compare",
    "run_rank",
    "run_sample",
    "load_inputs",
    "report_row",
    "write_table",
    "ABLATION_CONDITIONS",
    "MISSING_TREATMENTS",
]

log = logging.getLogger("catbn.experiments")

MISSING_TREATMENTS = {
    "none": None,
    "drop": drop_missing,
    "impute": impute_mode,
    "category": missing_as_category,
}
BASELINES = ("empty", "random3", "reference")
ABLATION_CONDITIONS = ("none", "tiers", "tiers+synthetic", "tiers+synthetic+required")


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


@dataclass
class RunConfig:
    """Everything a run needs; loaded from YAML and overridden by flags.

    Paths are kept as given; relative paths resolve against the working
    directory.
    """

    data: str | None = None
    schema: dict | None = None
    synthetic: list = field(default_factory=list)
    knowledge: str | None = None
    reference: str | None = None
    algorithms: list = field(default_factory=lambda: ["pc-stable"])
    baselines: list = field(default_factory=lambda: ["empty", "random3", "reference"])
    test: str = "chi2"
    alpha: float = 0.05
    max_cond_size: int | None = None
    max_iter: int = 10_000
    tabu_length: int = 10
    tabu_budget: int = 15
    max_degree: int | None = None
    seed: int = 0
    eval_seed: int = 0
    folds: int = 10
    cv_alpha: float = 1.0
    missing: str = "drop"
    impute: str = "impute"
    target: str | None = None
    causes: list = field(default_factory=list)
    sizes: list = field(default_factory=list)
    out_dir: str = "out"
    timing: bool = True

    def validate(self) -> "RunConfig":
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ConfigError(f"unknown algorithm(s) {unknown}; choose from {sorted(ALGORITHMS)}")
        bad = [b for b in self.baselines if b not in BASELINES]
        if bad:
            raise ConfigError(f"unknown baseline(s) {bad}; choose from {list(BASELINES)}")
        if self.test not in TESTS:
            raise ConfigError(f"unknown test {self.test!r}; choose from {sorted(TESTS)}")
        if not 0.0 < float(self.alpha) < 1.0:
            raise ConfigError("alpha must lie in (0, 1)")
        if self.missing not in MISSING_TREATMENTS:
            raise ConfigError(f"unknown missing treatment {self.missing!r}; choose from {sorted(MISSING_TREATMENTS)}")
        if self.impute not in ("impute", "category"):
            raise ConfigError("impute must be 'impute' or 'category'")
        if int(self.folds) < 2:
            raise ConfigError("folds must be at least 2")
        if self.max_degree is not None and int(self.max_degree) < 1:
            raise ConfigError("max_degree must be positive")
        if any(int(s) <= 0 for s in self.sizes):
            raise ConfigError("sweep sizes must be positive")
        if self.target is not None and self.target in self.causes:
            raise ConfigError("target must not be listed among the causes")
        return self

    def ci(self) -> CiConfig:
        return CiConfig(test=self.test, alpha=float(self.alpha), max_cond_size=self.max_cond_size)

    def search(self) -> SearchConfig:
        return SearchConfig(
            max_iter=int(self.max_iter),
            tabu_length=int(self.tabu_length),
            tabu_budget=int(self.tabu_budget),
            max_degree=None if self.max_degree is None else int(self.max_degree),
            seed=int(self.seed),
        )

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form, plus the bytes of every input file.

        The output directory is left out so relocated runs hash alike.
        """
        payload = {k: v for k, v in asdict(self).items() if k != "out_dir"}
        h = hashlib.sha256(json.dumps(payload, sort_keys=True, default=str).encode())
        for path in (self.data, self.knowledge, self.reference):
            if path and Path(path).is_file():
                h.update(Path(path).read_bytes())
        return h.hexdigest()


def load_config(path=None, **overrides) -> RunConfig:
    """Read a YAML config and apply non-``None`` overrides."""
    raw = {}
    if path is not None:
        try:
            raw = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except yaml.YAMLError as exc:
            raise ConfigError(f"config is not valid YAML: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a mapping")
    known = set(RunConfig.__dataclass_fields__)
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"unknown config keys {sorted(extra)}")
    raw.update({k: v for k, v in overrides.items() if v is not None})
    try:
        cfg = RunConfig(**raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return cfg.validate()


# ---------------------------------------------------------------------------
# inputs


def _synthetic_specs(cfg: RunConfig) -> list[SyntheticSpec]:
    """``synthetic`` entries: ``name``, ``parents``, ``table`` rows ``[*parent_states, output]``, optional ``default``."""
    specs = []
    for entry in cfg.synthetic:
        try:
            name, parents = str(entry["name"]), [str(p) for p in entry["parents"]]
        except (KeyError, TypeError):
            raise ConfigError("each synthetic entry needs 'name' and 'parents'") from None
        table = {}
        for row in entry.get("table", []):
            row = [str(x) for x in row]
            if len(row) != len(parents) + 1:
                raise ConfigError(f"synthetic {name!r}: table rows need {len(parents) + 1} entries")
            table[tuple(row[:-1])] = row[-1]
        default = entry.get("default")

        def mapping(*labels, _t=table, _d=default, _n=name):
            if labels in _t:
                return _t[labels]
            if _d is None:
                raise DataError(f"synthetic {_n!r}: no output for parent states {labels}")
            return str(_d)

        specs.append(SyntheticSpec(name, parents, mapping, entry.get("states")))
    return specs


def load_inputs(cfg: RunConfig, treatment: str | None = None) -> Dataset:
    if not cfg.data:
        raise ConfigError("no dataset given (config 'data' or --data)")
    try:
        d = load_csv(cfg.data, cfg.schema)
    except OSError as exc:
        raise DataError(f"cannot read data: {exc}") from None
    treatment = cfg.missing if treatment is None else treatment
    fn = MISSING_TREATMENTS[treatment]
    if fn is not None and d.has_missing():
        d = fn(d)
    return d


def _knowledge(cfg: RunConfig) -> Knowledge:
    if not cfg.knowledge:
        return Knowledge()
    try:
        return load_knowledge(cfg.knowledge)
    except OSError as exc:
        raise ConfigError(f"cannot read knowledge file: {exc}") from None


def _reference(cfg: RunConfig, d: Dataset) -> Dag | None:
    if not cfg.reference:
        return None
    try:
        g = read_arc_csv(Path(cfg.reference).read_text(encoding="utf-8"), d.names)
    except OSError as exc:
        raise ConfigError(f"cannot read reference graph: {exc}") from None
    if not isinstance(g, Dag):
        raise ConfigError("the reference graph must be fully directed")
    return g


# ---------------------------------------------------------------------------
# outputs


def _fmt(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "NA" if np.isnan(v) else format(float(v), ".10g")
    return str(v)


def _header(cfg: RunConfig, command: str, treatment: str | None = None) -> list[str]:
    return [
        f"# tool: catbn {__version__}",
        f"# command: {command}",
        f"# seed: {cfg.seed}",
        f"# eval_seed: {cfg.eval_seed}",
        f"# config_sha256: {cfg.digest()}",
        f"# test: {cfg.test} alpha={_fmt(float(cfg.alpha))}",
        "# score: bic (natural log)",
        f"# missing: {treatment or cfg.missing}",
        f"# timing: {'on' if cfg.timing else 'off'}",
    ]


def write_table(path: Path, header: list[str], columns: Sequence[str], rows: list[dict]) -> None:
    buf = io.StringIO()
    for line in header:
        buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue(), encoding="utf-8")


def write_matrix(path: Path, header: list[str], labels: list[str], mat: np.ndarray, extra: list[str] = ()) -> None:
    rows = [dict(zip(["graph", *labels], [lab, *mat[i]])) for i, lab in enumerate(labels)]
    write_table(path, header + list(extra), ["graph", *labels], rows)


def write_graph(out: Path, label: str, g) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{label}.dot").write_text(to_dot(g, _dot_name(label)), encoding="utf-8")
    (out / f"{label}.arcs.csv").write_text(to_arc_csv(g), encoding="utf-8")


def _dot_name(label: str) -> str:
    return "".join(c if c.isalnum() else "_" for c in label) or "G"


# ---------------------------------------------------------------------------
# building blocks


class _Timer:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.elapsed = None

    def __enter__(self):
        self._t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        if self.enabled:
            self.elapsed = time.perf_counter() - self._t0
        return False


def _fit(cfg: RunConfig, algo: str, d: Dataset, k: Knowledge):
    with _Timer(cfg.timing) as t:
        g = learn(algo, d, cfg.ci(), cfg.search(), k.restrict(d.names))
    return g, t.elapsed


def _as_dag(g, seed) -> Dag:
    return g if isinstance(g, Dag) else extend_to_dag(g, seed)


def report_row(
    cfg: RunConfig,
    label: str,
    algorithm: str,
    g,
    eval_data: Dataset,
    ref: Dag | None,
    elapsed: float | None,
    cache: ScoreCache | None = None,
) -> ComparisonReport:
    """One Table-6 style row.  PDAGs are extended with ``cfg.eval_seed`` first."""
    dag = _as_dag(g, cfg.eval_seed)
    scored = graph_bic(eval_data, dag, cache)
    loss = cv_loss(eval_data, dag, folds=int(cfg.folds), alpha=float(cfg.cv_alpha), seed=cfg.eval_seed)
    edges = g.n_arcs if isinstance(g, Dag) else g.n_edges
    rep = ComparisonReport(label, algorithm, fragments(g), edges, scored.free_params, scored.bic, loss, elapsed_s=elapsed)
    if ref is not None:
        c = confusion(dag, ref)
        p, r, f1 = precision_recall_f1(c)
        rep.tp, rep.fp, rep.fn = c.tp, c.fp, c.fn
        rep.precision, rep.recall, rep.f1 = p, r, f1
        rep.shd = shd(dag, ref)
        rep.bsf = _safe_bsf(dag, ref)
    if cfg.target is not None and cfg.causes:
        rep.causal_paths = causal_paths(dag, cfg.causes, cfg.target)
    return rep


def _safe_bsf(g, ref):
    try:
        return bsf(g, ref)
    except GraphError:
        return None


# ---------------------------------------------------------------------------
# protocols


def run_learn(cfg: RunConfig, algo: str | None = None) -> list[dict]:
    """Learn one graph; write ``<algo>.dot``, ``<algo>.arcs.csv`` and ``<algo>.report.csv``."""
    algo = algo or cfg.algorithms[0]
    if algo not in ALGORITHMS and algo not in ("empty", "random3"):
        raise ConfigError(f"unknown algorithm {algo!r}; choose from {sorted(ALGORITHMS) + ['empty', 'random3']}")
    d = load_inputs(cfg)
    k = _knowledge(cfg)
    ref = _reference(cfg, d)
    k.bind(d.names)
    if algo in ALGORITHMS:
        g, elapsed = _fit(cfg, algo, d, k)
    else:
        g, elapsed = _baseline(algo, d, ref, cfg.seed), None
    out = Path(cfg.out_dir)
    write_graph(out, algo, g)
    row = report_row(cfg, algo, algo, g, d, ref, elapsed).as_row()
    write_table(out / f"{algo}.report.csv", _header(cfg, "learn"), REPORT_COLUMNS, [row])
    return [row]


def _baseline(name: str, d: Dataset, ref: Dag | None, seed: int):
    if name == "empty":
        return empty_graph(d.names)
    if name == "random3":
        return random_connected_dag(d.names, 3, 3, seed=seed)
    if ref is None:
        return None
    return ref


def run_suite(cfg: RunConfig) -> list[dict]:
    """All configured algorithms plus baselines; ``suite.csv`` and pairwise matrices."""
    d = load_inputs(cfg)
    k = _knowledge(cfg)
    ref = _reference(cfg, d)
    k.bind(d.names)
    out = Path(cfg.out_dir)
    cache = ScoreCache(d)
    header = _header(cfg, "suite")
    rows, graphs = [], {}
    for algo in cfg.algorithms:
        log.info("suite: running %s", algo)
        g, elapsed = _fit(cfg, algo, d, k)
        write_graph(out / "graphs", algo, g)
        graphs[algo] = g
        rows.append(report_row(cfg, algo, algo, g, d, ref, elapsed, cache).as_row())
    for name in cfg.baselines:
        g = _baseline(name, d, ref, cfg.seed)
        if g is None:
            log.warning("suite: no reference graph; skipping the reference baseline")
            continue
        write_graph(out / "graphs", name, g)
        rows.append(report_row(cfg, name, "baseline", g, d, ref, None, cache).as_row())
    write_table(out / "suite.csv", header, REPORT_COLUMNS, rows)
    if len(graphs) > 1:
        for metric in ("shd", "bsf", "f1"):
            try:
                labels, mat, mean, _ = pairwise_matrix(graphs, metric, cfg.eval_seed)
            except GraphError as exc:
                log.warning("suite: pairwise %s skipped: %s", metric, exc)
                continue
            write_matrix(out / f"pairwise_{metric}.csv", header, labels, mat, [f"# mean_off_diagonal: {_fmt(mean)}"])
    return rows


SWEEP_COLUMNS = ["algorithm", "n", "edges", "bic", "elapsed_s"]


def run_sweep(cfg: RunConfig) -> list[dict]:
    """Train on seeded subsamples of each size; score BIC on the full data."""
    if not cfg.sizes:
        raise ConfigError("sweep needs 'sizes'")
    d = load_inputs(cfg)
    k = _knowledge(cfg)
    k.bind(d.names)
    too_big = [s for s in cfg.sizes if int(s) > d.n_rows]
    if too_big:
        raise DataError(f"sample sizes {too_big} exceed the {d.n_rows} available rows")
    cache = ScoreCache(d)
    rows = []
    for algo in cfg.algorithms:
        for n in sorted(int(s) for s in cfg.sizes):
            train = d if n == d.n_rows else subsample(d, n, seed=cfg.seed)
            g, elapsed = _fit(cfg, algo, train, k)
            dag = _as_dag(g, cfg.eval_seed)
            edges = g.n_arcs if isinstance(g, Dag) else g.n_edges
            rows.append({"algorithm": algo, "n": n, "edges": edges, "bic": graph_bic(d, dag, cache).bic, "elapsed_s": elapsed})
    write_table(Path(cfg.out_dir) / "sweep.csv", _header(cfg, "sweep"), SWEEP_COLUMNS, rows)
    return rows


ABLATION_COLUMNS = ["condition", "algorithm", "variables", "edges", "bic", "f1", "shd", "bsf", "causal_paths", "violations", "restricted", "elapsed_s"]
SUMMARY_COLUMNS = ["condition", "mean_bsf", "mean_shd", "mean_f1", "restricted"]


def _condition_knowledge(k: Knowledge, condition: str) -> Knowledge:
    if condition == "none":
        return Knowledge()
    if condition.endswith("required"):
        return k
    return Knowledge(k.tiers, (), k.forbidden)


def run_ablation(cfg: RunConfig) -> tuple[list[dict], list[dict]]:
    """Learn under each knowledge condition; ``ablation.csv`` and ``ablation_summary.csv``.

    Graphs that gain synthetic variables are compared with the reference and
    with each other over the shared variables only; such rows are flagged
    ``restricted``.
    """
    base = load_inputs(cfg)
    k = _knowledge(cfg)
    ref = _reference(cfg, base)
    specs = _synthetic_specs(cfg)
    with_synth = base
    for spec in specs:
        with_synth = add_synthetic(with_synth, spec)
    if not specs:
        log.warning("ablation: no synthetic variables configured; the +synthetic conditions reuse the plain data")
    k.bind(with_synth.names)
    rows, summary = [], []
    for condition in ABLATION_CONDITIONS:
        d = with_synth if "synthetic" in condition else base
        kc = _condition_knowledge(k, condition).restrict(d.names)
        cache = ScoreCache(d)
        graphs = {}
        for algo in cfg.algorithms:
            g, elapsed = _fit(cfg, algo, d, kc)
            graphs[algo] = g
            dag = _as_dag(g, cfg.eval_seed)
            row = {
                "condition": condition,
                "algorithm": algo,
                "variables": d.n_vars,
                "edges": g.n_arcs if isinstance(g, Dag) else g.n_edges,
                "bic": graph_bic(d, dag, cache).bic,
                "violations": len(validate_output(kc, g)),
                "restricted": d.n_vars != base.n_vars,
                "elapsed_s": elapsed,
            }
            if ref is not None:
                shared = _restrict_to(dag, ref.nodes)
                c = confusion(shared, ref)
                row["f1"] = precision_recall_f1(c)[2]
                row["shd"] = shd(shared, ref)
                row["bsf"] = _safe_bsf(shared, ref)
            if cfg.target is not None and cfg.causes:
                row["causal_paths"] = causal_paths(dag, [c for c in cfg.causes if c in d.names], cfg.target)
            rows.append(row)
        means = {}
        for metric in ("bsf", "shd", "f1"):
            try:
                _, _, means[metric], restricted = pairwise_matrix(graphs, metric, cfg.eval_seed)
            except GraphError:
                means[metric] = None
        summary.append({
            "condition": condition,
            "mean_bsf": means["bsf"],
            "mean_shd": means["shd"],
            "mean_f1": means["f1"],
            "restricted": d.n_vars != base.n_vars,
        })
    header = _header(cfg, "ablate-knowledge")
    out = Path(cfg.out_dir)
    write_table(out / "ablation.csv", header, ABLATION_COLUMNS, rows)
    write_table(out / "ablation_summary.csv", header, SUMMARY_COLUMNS, summary)
    return rows, summary


def _restrict_to(g: Dag, names) -> Dag:
    keep = set(names)
    return Dag(list(names), [(a, b) for a, b in g.named_arcs() if a in keep and b in keep])


MISSING_COLUMNS = ["algorithm", "treatment_a", "treatment_b", "n_a", "n_b", "edges_a", "edges_b", "shd", "bsf", "f1"]


def run_missing_ablation(cfg: RunConfig) -> list[dict]:
    """Row deletion against imputation at matched sample size.

    The imputed data is subsampled (seeded) to the number of complete rows
    so both arms train on equally many rows.  ``bsf`` and ``f1`` score the
    imputation arm's graph against the deletion arm's graph.
    """
    raw = load_inputs(cfg, treatment="none")
    if not raw.has_missing():
        log.warning("missing ablation: the dataset has no missing cells; both arms see the same rows")
    dropped = drop_missing(raw)
    filled = MISSING_TREATMENTS[cfg.impute](raw)
    if filled.n_rows != dropped.n_rows:
        filled = subsample(filled, dropped.n_rows, seed=cfg.seed)
    k = _knowledge(cfg)
    k.bind(raw.names)
    rows = []
    for algo in cfg.algorithms:
        ga, _ = _fit(cfg, algo, dropped, k)
        gb, _ = _fit(cfg, algo, filled, k)
        da, db = _as_dag(ga, cfg.eval_seed), _as_dag(gb, cfg.eval_seed)
        rows.append({
            "algorithm": algo,
            "treatment_a": "drop",
            "treatment_b": cfg.impute,
            "n_a": dropped.n_rows,
            "n_b": filled.n_rows,
            "edges_a": ga.n_arcs if isinstance(ga, Dag) else ga.n_edges,
            "edges_b": gb.n_arcs if isinstance(gb, Dag) else gb.n_edges,
            "shd": shd(db, da),
            "bsf": _safe_bsf(db, da),
            "f1": precision_recall_f1(confusion(db, da))[2],
        })
    write_table(Path(cfg.out_dir) / "missing_ablation.csv", _header(cfg, "ablate-missing", f"drop vs {cfg.impute}"), MISSING_COLUMNS, rows)
    return rows


def run_compare(cfg: RunConfig, graph_paths: Sequence[str], metrics: Sequence[str] = ("shd", "bsf", "f1")) -> dict:
    """Pairwise matrices between saved graphs (arc-list CSV files)."""
    if len(graph_paths) < 2:
        raise ConfigError("compare needs at least two graphs")
    graphs = {}
    for p in graph_paths:
        label = Path(p).name.removesuffix(".csv").removesuffix(".arcs")
        try:
            graphs[label] = read_arc_csv(Path(p).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read graph: {exc}") from None
    if len(graphs) != len(graph_paths):
        raise ConfigError("graph file names must be distinct")
    if cfg.data:
        d = load_inputs(cfg)
        graphs = {lab: _relabel_to(g, d.names) for lab, g in graphs.items()}
    header = _header(cfg, "compare")
    result = {}
    for metric in metrics:
        labels, mat, mean, restricted = pairwise_matrix(graphs, metric, cfg.eval_seed)
        extra = [f"# mean_off_diagonal: {_fmt(mean)}", f"# restricted_to_shared_variables: {int(restricted)}"]
        write_matrix(Path(cfg.out_dir) / f"pairwise_{metric}.csv", header, labels, mat, extra)
        result[metric] = (labels, mat, mean)
    return result


def _relabel_to(g, names):
    # arc files omit isolated nodes; restore them from the dataset header
    if isinstance(g, Dag):
        return Dag(names, g.named_arcs())
    return Pdag(
        names,
        [(g.nodes[a], g.nodes[b]) for a, b in sorted(g.directed)],
        [(g.nodes[a], g.nodes[b]) for a, b in sorted(g.undirected)],
    )


RANK_COLUMNS = ["variable", "info_gain", "correlation"]


def run_rank(cfg: RunConfig) -> list[dict]:
    if cfg.target is None:
        raise ConfigError("rank needs a target variable")
    d = load_inputs(cfg)
    if cfg.target not in d.names:
        raise ConfigError(f"target {cfg.target!r} is not a column of the data")
    rows = [{"variable": v, "info_gain": ig, "correlation": r} for v, ig, r in rank_features(d, cfg.target)]
    write_table(Path(cfg.out_dir) / "rank.csv", _header(cfg, "rank"), RANK_COLUMNS, rows)
    return rows


def run_sample(network, rows: int, seed: int, out_dir) -> Dataset:
    """Forward-sample ``rows`` rows; writes ``sample.csv`` and ``reference.arcs.csv``."""
    from .params import forward_sample

    d = forward_sample(network, rows, seed=seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "sample.csv").write_text(to_csv_text(d), encoding="utf-8")
    (out / "reference.arcs.csv").write_text(to_arc_csv(network.dag), encoding="utf-8")
    return d


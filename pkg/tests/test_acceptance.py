"""Acceptance criteria, one or more tests per criterion.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary prints one
PASS/FAIL line per criterion.  Expected values marked as derived come from
the independent oracles in ``oracles.py``.
"""

import math
from collections import Counter
from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

import oracles
from catbn import cli
from catbn.citest import chi2_sf, chi_squared, g_squared
from catbn.dataset import Dataset, drop_missing, impute_mode, missing_as_category, read_csv_text
from catbn.fixtures import SURVEY_CAUSES, SURVEY_TARGET, survey_bn, survey_knowledge
from catbn.graph import (
    Dag,
    Pdag,
    Variable,
    cpdag,
    consistent_extension,
    d_separated,
    empty_graph,
    extend_to_dag,
    fragments,
    is_acyclic,
    iter_random_connected_dags,
    random_connected_dag,
)
from catbn.knowledge import Knowledge, validate_output
from catbn.learn import ALGORITHMS, CiConfig, SearchConfig, ges, hill_climb, learn, tabu
from catbn.metrics import ConfusionCounts, bsf, causal_paths, confusion, precision_recall_f1, shd
from catbn.params import cv_loss, fit_mle, forward_sample, log_prob_rows
from catbn.score import ScoreCache, delta_bic, family_bic, free_parameters, graph_bic

# --------------------------------------------------------------------------
# 1. empty-graph metric identities


def _random_dag(rng, n, n_arcs):
    order = rng.permutation(n)
    pairs = [(order[i], order[j]) for i in range(n) for j in range(i + 1, n)]
    pick = rng.choice(len(pairs), size=n_arcs, replace=False)
    return Dag([f"v{i}" for i in range(n)], [pairs[k] for k in pick])


def test_criterion_01_empty_graph_identities(criterion_note):
    rng = np.random.default_rng(1)
    refs = [_random_dag(rng, 28, 68)] + [_random_dag(rng, int(rng.integers(3, 15)), 0) for _ in range(0)]
    for _ in range(50):
        n = int(rng.integers(3, 15))
        a = int(rng.integers(1, n * (n - 1) // 2))
        refs.append(_random_dag(rng, n, a))
    for ref in refs:
        empty = empty_graph(ref.nodes)
        a = ref.n_arcs
        assert shd(empty, ref) == a
        assert bsf(empty, ref) == 0.0
        assert precision_recall_f1(confusion(empty, ref)) == (0.0, 0.0, 0.0)
        assert fragments(empty) == ref.n
    big = refs[0]
    criterion_note(f"68-arc 28-node reference: SHD {shd(empty_graph(big.nodes), big)}, BSF 0, P=R=F1=0, fragments 28; plus 50 random references")


# --------------------------------------------------------------------------
# 2. confusion arithmetic of the tabu row


def test_criterion_02_tabu_row_arithmetic(criterion_note):
    c = ConfusionCounts(tp=34, fp=77, fn=34, tn=0, reversed=0, reference_arcs=68, independencies=310)
    p, r, f1 = precision_recall_f1(c)
    assert abs(p - 0.306) <= 0.001
    assert abs(r - 0.500) <= 0.001
    assert abs(f1 - 0.380) <= 0.001
    criterion_note(f"P {p:.3f}, R {r:.3f}, F1 {f1:.3f}")


# --------------------------------------------------------------------------
# 3. d-separation against path enumeration


@pytest.mark.slow
def test_criterion_03_d_separation_exhaustive(criterion_note):
    queries = mismatches = graphs = 0
    for n in range(2, 7):
        for arcs in oracles.dag_classes(n):
            graphs += 1
            g = Dag([f"v{i}" for i in range(n)], arcs)
            for x, y in combinations(range(n), 2):
                masks = oracles.path_masks(n, arcs, x, y)
                rest = [v for v in range(n) if v not in (x, y)]
                for k in range(min(3, len(rest)) + 1):
                    for z in combinations(rest, k):
                        zm = sum(1 << v for v in z)
                        queries += 1
                        if d_separated(g, x, y, z) == oracles.open_given(masks, zm):
                            mismatches += 1
    criterion_note(f"{graphs} DAG isomorphism classes (2..6 nodes), {queries} queries, {mismatches} mismatches")
    assert mismatches == 0


# --------------------------------------------------------------------------
# 4. CI statistics and p-values


def test_criterion_04_ci_statistics(criterion_note):
    t = np.array([[20, 10], [10, 20]])
    chi, g2 = chi_squared(t), g_squared(t)
    assert abs(chi.statistic - 6.66667) <= 1e-5  # 20/3 to the printed precision
    assert abs(chi.statistic - 20 / 3) <= 1e-6
    g2_formula = 2 * (2 * 20 * math.log(4 / 3) + 2 * 10 * math.log(2 / 3))
    assert abs(g2.statistic - oracles.g2_stat_oracle([t])) <= 1e-9
    assert abs(g2.statistic - g2_formula) <= 1e-9
    for x, expected in ((3.8415, 0.05), (6.6349, 0.01)):
        p, ref = chi2_sf(x, 1), oracles.chi2_sf_oracle(x, 1)
        assert abs(p - expected) <= 1e-4
        assert abs(p - ref) <= 1e-10
    target = 6.79628
    criterion_note(
        f"chi2 {chi.statistic:.5f}, G2 {g2.statistic:.5f} (closed form {g2_formula:.5f}, target {target}), "
        f"sf(3.8415)={chi2_sf(3.8415, 1):.5f}, sf(6.6349)={chi2_sf(6.6349, 1):.5f}"
    )
    # the G2 target does not equal its own closed form 2(40 ln 4/3 + 20 ln 2/3) = 6.795961;
    # it is kept verbatim rather than loosened
    assert abs(g2.statistic - target) <= 1e-6


# --------------------------------------------------------------------------
# 5. score decomposability and free parameters


def _random_data(rng, p, n):
    cards = rng.integers(2, 4, size=p)
    variables = [Variable(f"x{j}", [str(s) for s in range(c)]) for j, c in enumerate(cards)]
    codes = np.column_stack([rng.integers(0, c, size=n) for c in cards])
    # correlate neighbouring columns so scores are not all alike
    for j in range(1, p):
        flip = rng.random(n) < 0.5
        codes[flip, j] = codes[flip, j - 1] % cards[j]
    return Dataset(variables, codes)


def _legal_moves(g: Dag):
    moves = []
    for a in range(g.n):
        for b in range(g.n):
            if a == b:
                continue
            if (a, b) in g.arcs:
                moves.append(("delete", a, b))
                if is_acyclic((g.arcs - {(a, b)}) | {(b, a)}, g.n):
                    moves.append(("reverse", a, b))
            elif (b, a) not in g.arcs and is_acyclic(g.arcs | {(a, b)}, g.n):
                moves.append(("add", a, b))
    return moves


def test_criterion_05_score_correctness(criterion_note):
    rng = np.random.default_rng(5)
    worst = 0.0
    pairs = 0
    while pairs < 1000:
        d = _random_data(rng, int(rng.integers(3, 7)), int(rng.integers(20, 400)))
        cache = ScoreCache(d)
        for _ in range(25):
            g = random_connected_dag(d.names, 3, 3, seed=int(rng.integers(1 << 30)), burn_in=40)
            total = graph_bic(d, g, cache)
            fam_sum = sum(family_bic(d, g.nodes[i], [g.nodes[p] for p in g.parents(i)]).bic for i in range(g.n))
            fresh = graph_bic(d, g)
            worst = max(worst, abs(total.bic - fam_sum), abs(total.bic - fresh.bic))
            moves = _legal_moves(g)
            kind, a, b = moves[int(rng.integers(len(moves)))]
            if kind == "add":
                after = g.with_arcs(add=[(a, b)])
            elif kind == "delete":
                after = g.with_arcs(remove=[(a, b)])
            else:
                after = g.with_arcs(add=[(b, a)], remove=[(a, b)])
            delta = delta_bic(d, g, (kind, a, b), cache)
            worst = max(worst, abs(delta - (graph_bic(d, after).bic - fresh.bic)))
            pairs += 1
    assert worst <= 1e-9

    for _ in range(200):
        r = int(rng.integers(2, 5))
        pcs = [int(c) for c in rng.integers(2, 5, size=int(rng.integers(0, 4)))]
        cells = sum(r - 1 for _ in np.ndindex(*pcs)) if pcs else r - 1
        assert free_parameters(r, pcs) == cells

    d = Dataset([Variable("X", ["a", "b"])], np.array([[0]] * 4 + [[1]] * 4))
    fs = family_bic(d, "X")
    assert abs(fs.bic - (-6.5849)) <= 1e-4
    assert fs.free_params == 1
    criterion_note(f"{pairs} (graph, move) pairs, max |error| {worst:.2e}; single-variable BIC {fs.bic:.4f}")


# --------------------------------------------------------------------------
# 6. structure recovery


def _f1(g, ref) -> float:
    dag = extend_to_dag(g, 0) if isinstance(g, Pdag) else g
    return precision_recall_f1(confusion(dag, ref))[2]


def test_criterion_06_survey_recovery(survey_50k, criterion_note):
    bn = survey_bn()
    ref = consistent_extension(cpdag(bn.dag))
    scores = {}
    for algo in ("pc-stable", "ges", "tabu", "mmhc"):
        scores[algo] = _f1(learn(algo, survey_50k), ref)
    criterion_note(", ".join(f"{a} F1 {f:.3f}" for a, f in scores.items()) + " (n=50k, seed 0)")
    assert all(f >= 0.9 for f in scores.values()), scores


@pytest.mark.parametrize("algo", ["pc-stable", "gs", "iamb"])
def test_criterion_06_chain_and_collider(algo, chain_10k, collider_10k):
    g = learn(algo, chain_10k)
    assert g.directed == frozenset() and g.undirected == {(0, 1), (1, 2)}
    g = learn(algo, collider_10k)
    assert g.directed == {(0, 1), (2, 1)} and g.undirected == frozenset()


# --------------------------------------------------------------------------
# 7. score-search ordering


def _random_bn_data(rng, n_rows):
    p = int(rng.integers(4, 8))
    names = [f"x{i}" for i in range(p)]
    dag = random_connected_dag(names, 3, 3, seed=int(rng.integers(1 << 30)))
    variables = [Variable(v, [str(s) for s in range(int(rng.integers(2, 4)))]) for v in names]
    from catbn.params import Cpt, ParameterizedBn

    card = [v.cardinality for v in variables]
    cpts = []
    for i, v in enumerate(variables):
        q = int(np.prod([card[j] for j in dag.parents(i)])) if dag.parents(i) else 1
        probs = rng.dirichlet(np.full(card[i], 0.6), size=q)
        cpts.append(Cpt(v.name, tuple(names[j] for j in dag.parents(i)), probs))
    return forward_sample(ParameterizedBn(variables, dag, cpts), n_rows, seed=int(rng.integers(1 << 30)))


def test_criterion_07_tabu_not_worse_than_hc(criterion_note):
    rng = np.random.default_rng(7)
    gains = []
    for _ in range(50):
        d = _random_bn_data(rng, int(rng.integers(200, 3000)))
        cache = ScoreCache(d)
        cfg = SearchConfig(seed=0)
        b_hc = graph_bic(d, hill_climb(d, cfg, cache=cache), cache).bic
        b_tabu = graph_bic(d, tabu(d, cfg, cache=cache), cache).bic
        gains.append(b_tabu - b_hc)
        assert b_tabu >= b_hc - 1e-9
    criterion_note(f"50 datasets; tabu strictly better on {sum(g > 1e-9 for g in gains)}, never worse")


def test_criterion_07_ges_degree_ordering(survey_50k, criterion_note):
    cache = ScoreCache(survey_50k)
    bics = []
    for deg in (3, 4, None):
        g = ges(survey_50k, SearchConfig(max_degree=deg), cache=cache)
        bics.append(graph_bic(survey_50k, consistent_extension(g), cache).bic)
    criterion_note("GES BIC at max degree 3/4/unbounded: " + " / ".join(f"{b:.1f}" for b in bics))
    assert bics[0] <= bics[1] <= bics[2]


# --------------------------------------------------------------------------
# 8. sample-size sweep direction


def test_criterion_08_edges_grow_with_sample_size(criterion_note):
    bn = survey_bn()
    full = forward_sample(bn, 50_000, seed=0)
    small = full.take(np.arange(500))
    large = full.take(np.arange(10_000))
    notes = []
    for algo, (family, _) in ALGORITHMS.items():
        if family != "score":
            continue
        e_small = learn(algo, small)
        e_large = learn(algo, large)
        count = lambda g: g.n_arcs if isinstance(g, Dag) else g.n_edges  # noqa: E731
        notes.append(f"{algo} {count(e_small)}->{count(e_large)}")
        assert count(e_large) > count(e_small), (algo, count(e_small), count(e_large))
    criterion_note("edges at n=500 -> n=10k: " + ", ".join(notes))


# --------------------------------------------------------------------------
# 9. knowledge contract


def _random_knowledge(rng, names) -> Knowledge:
    tiers = {v: int(rng.integers(1, 4)) for v in names if rng.random() < 0.6}
    order = list(rng.permutation(names))
    rank = {v: i for i, v in enumerate(order)}
    required, forbidden = set(), set()
    for a, b in combinations(names, 2):
        u = rng.random()
        if u < 0.08:
            # orient along the random order and the tiers, so required arcs stay acyclic and consistent
            x, y = (a, b) if rank[a] < rank[b] else (b, a)
            if x in tiers and y in tiers and tiers[x] > tiers[y]:
                continue
            required.add((x, y))
        elif u < 0.2:
            forbidden.add((a, b) if rng.random() < 0.5 else (b, a))
    # tier-consistency of required arcs through transitivity is all the class checks
    try:
        return Knowledge(tiers, required, forbidden - required - {(b, a) for a, b in required})
    except ValueError:
        return Knowledge(tiers, (), forbidden)


@pytest.mark.slow
def test_criterion_09_knowledge_contract(survey_2k, criterion_note):
    rng = np.random.default_rng(9)
    d = survey_2k
    violations = 0
    runs = 0
    for _ in range(100):
        k = _random_knowledge(rng, d.names)
        for algo in ALGORITHMS:
            g = learn(algo, d, CiConfig(), SearchConfig(), k)
            problems = validate_output(k, g)
            violations += len(problems)
            runs += 1
            assert not problems, (algo, k, problems)
    k = survey_knowledge()
    paths = {}
    for algo in ALGORITHMS:
        g = learn(algo, d, k=k)
        dag = extend_to_dag(g, 0) if isinstance(g, Pdag) else g
        paths[algo] = causal_paths(dag, SURVEY_CAUSES, SURVEY_TARGET)
    criterion_note(f"{runs} constrained runs, {violations} violations; min causal paths with required arcs {min(paths.values())}")
    assert all(v >= 4 for v in paths.values()), paths


# --------------------------------------------------------------------------
# 10. PDAG extension


def test_criterion_10_pdag_extension(criterion_note):
    rng = np.random.default_rng(10)
    for trial in range(10_000):
        n = int(rng.integers(2, 9))
        order = rng.permutation(n)
        directed, undirected = [], []
        for i in range(n):
            for j in range(i + 1, n):
                u = rng.random()
                a, b = int(order[i]), int(order[j])
                if u < 0.25:
                    directed.append((a, b))
                elif u < 0.5:
                    undirected.append((a, b))
        p = Pdag([f"v{i}" for i in range(n)], directed, undirected)
        g = extend_to_dag(p, seed=trial)
        assert is_acyclic(g.arcs, n)
        assert set(p.directed) <= g.arcs
        assert g.n_arcs == len(directed) + len(undirected)
    criterion_note("10^4 random PDAGs: all extensions acyclic, directed arcs preserved")


# --------------------------------------------------------------------------
# 11. uniform random connected DAGs


@pytest.mark.slow
def test_criterion_11_random_dag_uniformity(criterion_note):
    support = [arcs for arcs in oracles.all_dags(3) if oracles.weakly_connected(3, arcs)]
    assert len(support) == 18
    draws = 100_000
    counts = Counter()
    gen = iter_random_connected_dags(["a", "b", "c"], 3, 3, seed=11)
    for _ in range(draws):
        g = next(gen)
        assert is_acyclic(g.arcs, 3) and fragments(g) == 1
        assert all(len(g.parents(i)) <= 3 and len(g.children(i)) <= 3 for i in range(3))
        counts[g.arcs] += 1
    assert set(counts) == set(support)
    expected = draws / len(support)
    worst = max(abs(c - expected) / expected for c in counts.values())
    criterion_note(f"18 connected 3-node DAGs, max relative deviation {worst:.3%} over 10^5 draws")
    assert worst <= 0.10


# --------------------------------------------------------------------------
# 12. cross-validation loss


def test_criterion_12_cv_loss(survey_50k, criterion_note):
    rng = np.random.default_rng(12)
    d = Dataset([Variable("X", ["0", "1"])], rng.integers(0, 2, size=(10_000, 1)))
    loss = cv_loss(d, empty_graph(["X"]), folds=10)
    assert abs(loss - math.log(2)) <= 0.01

    bn = survey_bn()
    cv = cv_loss(survey_50k, bn.dag, folds=10)
    full = -float(log_prob_rows(fit_mle(survey_50k, bn.dag), survey_50k).mean())
    rel = abs(cv - full) / full
    criterion_note(f"uniform column {loss:.4f} (ln 2 = {math.log(2):.4f}); survey CV {cv:.4f} vs full-data {full:.4f} ({rel:.3%})")
    assert rel <= 0.02


# --------------------------------------------------------------------------
# 13. missing-value plumbing


def test_criterion_13_missing_values(tmp_path, criterion_note):
    bn = survey_bn()
    clean = forward_sample(bn, 3_000, seed=13)
    rng = np.random.default_rng(13)
    codes = np.array(clean.codes)
    mask = rng.random(codes.shape) < 0.03
    codes[mask] = -1
    planted = Dataset(clean.variables, codes)
    expected_rows = np.flatnonzero(~mask.any(axis=1))

    dropped = drop_missing(planted)
    assert dropped.n_rows == len(expected_rows)
    assert np.array_equal(dropped.codes, clean.codes[expected_rows])
    assert not impute_mode(planted).missing.any()
    assert not missing_as_category(planted).missing.any()

    # zero-missing data: both ablation arms learn the same graphs
    data = tmp_path / "clean.csv"
    from catbn.dataset import to_csv_text

    data.write_text(to_csv_text(clean))
    out = tmp_path / "out"
    rc = cli.main(["ablate-missing", "--data", str(data), "--algo", ",".join(ALGORITHMS), "--out-dir", str(out), "--no-timing"])
    assert rc == 0
    rows = [line.split(",") for line in (out / "missing_ablation.csv").read_text().splitlines() if not line.startswith("#")]
    header, body = rows[0], rows[1:]
    col = header.index("bsf")
    assert len(body) == 8
    assert all(float(r[col]) == 1.0 for r in body)
    criterion_note(f"{mask.any(axis=1).sum()} planted rows removed exactly; zero-missing ablation BSF = 1 for all 8 learners")


# --------------------------------------------------------------------------
# 14. determinism of every subcommand


def _artifacts(root: Path) -> dict:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def _strip_elapsed(blob: bytes) -> bytes:
    lines = blob.decode().splitlines()
    out, col = [], None
    for line in lines:
        if line.startswith("#"):
            out.append(line)
            continue
        cells = line.split(",")
        if col is None:
            col = cells.index("elapsed_s") if "elapsed_s" in cells else -1
        elif col >= 0:
            cells[col] = "*"
        out.append(",".join(cells))
    return "\n".join(out).encode()


@pytest.mark.slow
def test_criterion_14_determinism(tmp_path, criterion_note):
    src = tmp_path / "src"
    assert cli.main(["sample", "--network", "survey", "--rows", "3000", "--seed", "4", "--out-dir", str(src)]) == 0
    data, ref, kn = src / "sample.csv", src / "reference.arcs.csv", src / "knowledge.txt"
    text = data.read_text().splitlines()
    rng = np.random.default_rng(14)
    holes = [text[0]] + [",".join("?" if rng.random() < 0.02 else c for c in line.split(",")) for line in text[1:]]
    gappy = src / "gappy.csv"
    gappy.write_text("\n".join(holes) + "\n")
    config = src / "cfg.yaml"
    config.write_text(
        f"data: {data}\nknowledge: {kn}\nreference: {ref}\nalgorithms: [pc-stable, gs, iamb, hc, tabu, ges, mmhc, rsmax2]\n"
        f"target: {SURVEY_TARGET}\ncauses: [{', '.join(SURVEY_CAUSES)}]\nsizes: [300, 1000, 3000]\n"
        "synthetic:\n  - name: Hygiene\n    parents: [Water, WFH]\n    table: [['1', '1', 'good']]\n    default: poor\n"
    )
    graphs = [str(src / "reference.arcs.csv")]
    commands = {
        "sample": ["sample", "--network", "survey", "--rows", "500", "--seed", "2"],
        "learn": ["learn", "--config", str(config), "--algo", "ges"],
        "suite": ["suite", "--config", str(config)],
        "sweep": ["sweep", "--config", str(config), "--algo", "hc,ges,pc-stable"],
        "ablate-knowledge": ["ablate-knowledge", "--config", str(config), "--algo", "pc-stable,hc,ges,mmhc"],
        "ablate-missing": ["ablate-missing", "--data", str(gappy), "--algo", "hc,pc-stable,mmhc"],
        "compare": ["compare", *graphs, None, "--data", str(data)],
        "rank": ["rank", "--data", str(data), "--target", SURVEY_TARGET],
    }
    identical = []
    for name, argv in commands.items():
        outputs = []
        for run in range(2):
            out = tmp_path / f"{name}-{run}"
            args = list(argv)
            if name == "compare":
                learned = tmp_path / f"suite-0/graphs/hc.arcs.csv"
                args[args.index(None)] = str(learned)
            if name != "sample":
                args.append("--no-timing")
            assert cli.main(args + ["--out-dir", str(out)]) == 0, name
            outputs.append(_artifacts(out))
        assert outputs[0] and outputs[0] == outputs[1], name
        identical.append(name)

    # with timing on, only the elapsed column differs
    timed = []
    for run in range(2):
        out = tmp_path / f"timed-{run}"
        assert cli.main(["suite", "--config", str(config), "--out-dir", str(out)]) == 0
        timed.append({k: _strip_elapsed(v) if k.endswith(".csv") else v for k, v in _artifacts(out).items()})
    assert timed[0] == timed[1]
    criterion_note(f"byte-identical artifacts for {len(identical)} subcommands ({', '.join(identical)}); timed suite identical outside elapsed_s")

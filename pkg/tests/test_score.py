import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from catbn.dataset import DataError, Dataset, read_csv_text
from catbn.graph import Dag, GraphError, Variable
from catbn.score import ScoreCache, delta_bic, family_bic, free_parameters, graph_bic


def _data(seed, p=4, n=300):
    rng = np.random.default_rng(seed)
    cards = rng.integers(2, 4, size=p)
    codes = np.column_stack([rng.integers(0, c, size=n) for c in cards])
    for j in range(1, p):
        copy = rng.random(n) < 0.6
        codes[copy, j] = codes[copy, j - 1] % cards[j]
    return Dataset([Variable(f"x{j}", [str(s) for s in range(c)]) for j, c in enumerate(cards)], codes)


def test_single_binary_variable():
    d = Dataset([Variable("X", ["a", "b"])], np.array([[0]] * 4 + [[1]] * 4))
    fs = family_bic(d, "X")
    assert fs.log_likelihood == pytest.approx(8 * math.log(0.5))
    assert fs.free_params == 1
    assert fs.bic == pytest.approx(8 * math.log(0.5) - 0.5 * math.log(8))
    assert fs.bic == pytest.approx(-6.5849, abs=1e-4)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000), st.data())
def test_family_matches_oracle(seed, data):
    d = _data(seed)
    child = data.draw(st.integers(0, d.n_vars - 1))
    parents = data.draw(st.lists(st.sampled_from([j for j in range(d.n_vars) if j != child]), unique=True, max_size=3))
    fs = family_bic(d, child, parents)
    bic, cells = oracles.family_bic_oracle(d.codes, child, sorted(parents), d.cardinalities.tolist())
    assert fs.bic == pytest.approx(bic, abs=1e-9)
    assert fs.free_params == cells == free_parameters(d.cardinalities[child], [d.cardinalities[p] for p in parents])


def test_free_parameters():
    assert free_parameters(2, []) == 1
    assert free_parameters(3, [2, 4]) == 16


def test_graph_bic_components():
    d = _data(3)
    g = Dag(d.names, [("x0", "x1"), ("x1", "x2"), ("x0", "x3")])
    res = graph_bic(d, g)
    assert res.bic == pytest.approx(res.log_likelihood - res.penalty)
    assert res.penalty == pytest.approx(0.5 * res.free_params * math.log(d.n_rows))
    # node order of the graph does not matter
    assert graph_bic(d, g.relabel(list(reversed(d.names)))).bic == pytest.approx(res.bic)


def test_delta_rejects_illegal_moves():
    d = _data(4)
    g = Dag(d.names, [("x0", "x1"), ("x1", "x2")])
    with pytest.raises(GraphError):
        delta_bic(d, g, ("add", "x0", "x1"))
    with pytest.raises(GraphError):
        delta_bic(d, g, ("add", "x2", "x0"))
    with pytest.raises(GraphError):
        delta_bic(d, g, ("delete", "x0", "x2"))
    with pytest.raises(ValueError):
        delta_bic(d, g, ("flip", "x0", "x1"))
    g2 = Dag(d.names, [("x0", "x1"), ("x1", "x2"), ("x0", "x2")])
    with pytest.raises(GraphError):
        delta_bic(d, g2, ("reverse", "x0", "x2"))


def test_cache_counts_and_wrong_dataset():
    d = _data(5)
    cache = ScoreCache(d)
    cache.family(0, [1])
    cache.family(0, (1,))
    assert cache.hits == 1 and cache.misses == 1 and len(cache) == 1
    with pytest.raises(ValueError):
        graph_bic(_data(6), Dag(d.names), cache)


def test_cache_thread_safe():
    d = _data(8, p=5, n=2000)
    cache = ScoreCache(d)
    families = [(c, tuple(p for p in range(5) if p != c and (mask >> p) & 1)) for c in range(5) for mask in range(32)]
    results = {}

    def work(tid):
        results[tid] = [cache.local(c, ps) for c, ps in families]

    threads = [threading.Thread(target=work, args=(t,)) for t in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(results[t] == results[0] for t in results)
    assert len(cache) == len(set((c, frozenset(ps)) for c, ps in families))


def test_scoring_rejects_missing():
    with pytest.raises(DataError):
        ScoreCache(read_csv_text("a,b\n0,?\n1,1\n"))
    with pytest.raises(GraphError):
        family_bic(_data(1), 0, [0])


def test_bic_prefers_true_structure():
    rng = np.random.default_rng(0)
    a = rng.integers(0, 2, size=3000)
    b = np.where(rng.random(3000) < 0.85, a, 1 - a)
    c = rng.integers(0, 2, size=3000)
    d = Dataset([Variable(v, ["0", "1"]) for v in "abc"], np.column_stack([a, b, c]))
    assert delta_bic(d, Dag("abc"), ("add", "a", "b")) > 0
    assert delta_bic(d, Dag("abc"), ("add", "a", "c")) < 0

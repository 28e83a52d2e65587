"""Greedy Equivalence Search over CPDAGs with an optional node-degree bound.

The forward phase applies the best Insert(X, Y, T) operator and the backward
phase the best Delete(X, Y, H) operator, both scored by the change in the
local BIC of Y.  After each operator the PDAG is replaced by the CPDAG of a
consistent extension.
"""

from __future__ import annotations

from itertools import chain, combinations

from ..dataset import Dataset
from ..graph import GraphError, Pdag, _MutablePdag, consistent_extension, cpdag, extend_to_dag
from ..knowledge import BoundKnowledge, Knowledge
from ..score import ScoreCache
from ._common import bind, finalize, log, require_complete
from .search import SearchConfig

__all__ = ["ges"]

_EPS = 1e-9


def _subsets(items):
    items = sorted(items)
    return chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))


def _is_clique(m: _MutablePdag, nodes) -> bool:
    return all(m.adjacent(a, b) for a, b in combinations(nodes, 2))


def _adj(m: _MutablePdag, v: int) -> set[int]:
    return m.ne[v] | m.pa[v] | m.ch[v]


def _semi_directed_blocked(m: _MutablePdag, src: int, dst: int, blockers: set[int]) -> bool:
    """True iff every semi-directed path src ~> dst passes through ``blockers``."""
    seen = {src}
    stack = [src]
    while stack:
        u = stack.pop()
        for v in m.ch[u] | m.ne[u]:
            if v == dst:
                return False
            if v in blockers or v in seen:
                continue
            seen.add(v)
            stack.append(v)
    return True


def _degree(m: _MutablePdag, v: int) -> int:
    return len(_adj(m, v))


def _best_insert(m, cache, bk: BoundKnowledge, max_degree):
    best = None
    n = m.n
    for x in range(n):
        for y in range(n):
            if x == y or m.adjacent(x, y) or not bk.allowed(x, y):
                continue
            if max_degree is not None and (_degree(m, x) >= max_degree or _degree(m, y) >= max_degree):
                continue
            ax = _adj(m, x)
            na = m.ne[y] & ax
            t0 = [t for t in m.ne[y] if t not in ax and bk.allowed(t, y)]
            base = m.pa[y]
            for t in _subsets(t0):
                cond = na | set(t)
                if not _is_clique(m, cond):
                    continue
                if not _semi_directed_blocked(m, y, x, cond):
                    continue
                pa_new = cond | base
                delta = cache.local(y, pa_new | {x}) - cache.local(y, pa_new)
                cand = (delta, x, y, t)
                if best is None or _better(cand, best):
                    best = cand
    return best


def _best_delete(m, cache, bk: BoundKnowledge):
    best = None
    n = m.n
    for y in range(n):
        for x in sorted(m.pa[y] | m.ne[y]):
            if bk.touches_required(x, y):
                continue
            na = m.ne[y] & _adj(m, x)
            for h in _subsets(na):
                rest = na - set(h)
                if not _is_clique(m, rest):
                    continue
                pa_new = (rest | m.pa[y]) - {x}
                delta = cache.local(y, pa_new) - cache.local(y, pa_new | {x})
                cand = (delta, x, y, h)
                if best is None or _better(cand, best):
                    best = cand
    return best


def _better(a, b) -> bool:
    if a[0] > b[0] + _EPS:
        return True
    if a[0] < b[0] - _EPS:
        return False
    return (a[1], a[2], a[3]) < (b[1], b[2], b[3])


def _recomplete(m: _MutablePdag, nodes) -> _MutablePdag:
    p = m.to_pdag(nodes)
    try:
        dag = consistent_extension(p)
    except GraphError:
        dag = extend_to_dag(p, 0)
    return _MutablePdag.from_pdag(cpdag(dag))


def ges(d: Dataset, cfg: SearchConfig | None = None, k: Knowledge | None = None, *, cache: ScoreCache | None = None) -> Pdag:
    """Forward insertion then backward deletion until neither improves BIC.

    ``cfg.max_degree`` caps the adjacencies of every node during the forward
    phase.  Required arcs are present from the start and never deleted.
    """
    require_complete(d)
    cfg = cfg or SearchConfig()
    if cache is None or cache.data is not d:
        cache = ScoreCache(d)
    bk = bind(k, d)
    nodes = d.names
    start = Pdag(nodes, sorted(bk.required))
    m = _recomplete(_MutablePdag.from_pdag(start), nodes)
    steps = 0
    while steps < cfg.max_iter:
        op = _best_insert(m, cache, bk, cfg.max_degree)
        if op is None or op[0] <= _EPS:
            break
        _, x, y, t = op
        m.ne[x].discard(y)
        m.ne[y].discard(x)
        m.ch[x].add(y)
        m.pa[y].add(x)
        for v in t:
            m.orient(v, y)
        m = _recomplete(m, nodes)
        steps += 1
    forward = steps
    while steps < cfg.max_iter:
        op = _best_delete(m, cache, bk)
        if op is None or op[0] <= _EPS:
            break
        _, x, y, h = op
        m.remove(x, y)
        for v in h:
            m.orient(y, v)
            if v in m.ne[x]:
                m.orient(x, v)
        m = _recomplete(m, nodes)
        steps += 1
    log.debug("ges: %d inserts, %d deletes", forward, steps - forward)
    return finalize(m, bk, nodes)

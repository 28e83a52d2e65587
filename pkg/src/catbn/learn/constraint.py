"""Constraint-based learners: PC-stable, Grow-Shrink and IAMB."""

from __future__ import annotations

from itertools import combinations

from ..citest import CiConfig, CITester
from ..dataset import Dataset
from ..graph import Pdag, _MutablePdag
from ..knowledge import Knowledge
from ._common import bind, finalize, log, orient_colliders, require_complete

__all__ = [
    "pc_skeleton",
    "pc_stable",
    "markov_blanket_gs",
    "markov_blanket_iamb",
    "mb_to_graph",
    "grow_shrink",
    "iamb",
]


def _max_level(cfg: CiConfig, n: int) -> int:
    return n - 2 if cfg.max_cond_size is None else cfg.max_cond_size


def pc_skeleton(d: Dataset, cfg: CiConfig | None = None, k: Knowledge | None = None, tester: CITester | None = None):
    """Skeleton search with per-level adjacency snapshots.

    Returns ``(adjacency, sepsets)``; ``sepsets[(i, j)]`` (both key orders)
    is the first separating set found for a removed pair.
    """
    require_complete(d)
    cfg = cfg or CiConfig()
    tester = tester or CITester(d, cfg)
    bk = bind(k, d)
    n = d.n_vars
    adj = [{j for j in range(n) if j != i and bk.pair_allowed(i, j)} for i in range(n)]
    # pairs removed by knowledge get no separating set, so never form colliders
    sepsets: dict = {}
    level = 0
    while level <= _max_level(cfg, n):
        snapshot = [frozenset(a) for a in adj]
        testable = False
        for i in range(n):
            for j in sorted(snapshot[i]):
                if j < i or j not in adj[i] or bk.touches_required(i, j):
                    continue
                for pool in (snapshot[i] - {j}, snapshot[j] - {i}):
                    if len(pool) < level:
                        continue
                    testable = True
                    sep = next((s for s in combinations(sorted(pool), level) if tester.independent(i, j, s)), None)
                    if sep is not None:
                        adj[i].discard(j)
                        adj[j].discard(i)
                        sepsets[(i, j)] = sepsets[(j, i)] = sep
                        break
        if not testable:
            break
        level += 1
    return adj, sepsets


def pc_stable(d: Dataset, cfg: CiConfig | None = None, k: Knowledge | None = None) -> Pdag:
    """PC-stable: skeleton, collider orientation, knowledge, Meek completion."""
    cfg = cfg or CiConfig()
    tester = CITester(d, cfg)
    adj, sepsets = pc_skeleton(d, cfg, k, tester)
    bk = bind(k, d)
    m = _MutablePdag(d.n_vars, (), [(i, j) for i in range(d.n_vars) for j in adj[i] if i < j])
    for a, b in sorted(bk.required):
        m.orient(a, b)
    orient_colliders(m, sepsets, bk)
    log.debug("pc-stable: %d tests", tester.n_tests)
    return finalize(m, bk, d.names)


# ---------------------------------------------------------------------------
# Markov blankets


def _shrink(tester: CITester, t: int, blanket: list[int]) -> list[int]:
    changed = True
    while changed:
        changed = False
        for x in list(blanket):
            rest = [v for v in blanket if v != x]
            if tester.independent(t, x, rest):
                blanket.remove(x)
                changed = True
    return sorted(blanket)


def markov_blanket_gs(d: Dataset, target, cfg: CiConfig | None = None, tester: CITester | None = None) -> set[int]:
    """Grow-Shrink blanket of ``target`` (as variable indices)."""
    require_complete(d)
    tester = tester or CITester(d, cfg or CiConfig())
    t = d.index(target)
    blanket: list[int] = []
    changed = True
    while changed:
        changed = False
        for x in range(d.n_vars):
            if x == t or x in blanket:
                continue
            if not tester.independent(t, x, blanket):
                blanket.append(x)
                changed = True
    return set(_shrink(tester, t, blanket))


def markov_blanket_iamb(d: Dataset, target, cfg: CiConfig | None = None, tester: CITester | None = None) -> set[int]:
    """IAMB blanket: admit the most strongly associated variable each step."""
    require_complete(d)
    tester = tester or CITester(d, cfg or CiConfig())
    t = d.index(target)
    blanket: list[int] = []
    while True:
        rest = [x for x in range(d.n_vars) if x != t and x not in blanket]
        if not rest:
            break
        scored = [(tester.association(t, x, blanket), -x) for x in rest]
        best, negx = max(scored)
        x = -negx
        if best <= 0.0 or tester.independent(t, x, blanket):
            break
        blanket.append(x)
    return set(_shrink(tester, t, blanket))


def _find_sepset(tester: CITester, a: int, b: int, pools, max_level: int):
    for level in range(max_level + 1):
        for pool in pools:
            if len(pool) < level:
                continue
            for s in combinations(sorted(pool), level):
                if tester.independent(a, b, s):
                    return s
    return None


def mb_to_graph(d: Dataset, blankets, cfg: CiConfig | None = None, k: Knowledge | None = None, tester: CITester | None = None) -> Pdag:
    """Turn per-variable blankets into a PDAG.

    Blankets are symmetrised with the AND rule.  A pair stays adjacent only
    if no subset of the smaller of the two blankets separates it, which
    removes spouses.  Colliders are oriented from the separating sets, then
    knowledge and Meek's rules are applied.
    """
    require_complete(d)
    cfg = cfg or CiConfig()
    tester = tester or CITester(d, cfg)
    bk = bind(k, d)
    n = d.n_vars
    mb = [set(blankets[i]) if isinstance(blankets, (list, tuple)) else set(blankets.get(i, ())) for i in range(n)]
    sym = [{j for j in mb[i] if i in mb[j]} for i in range(n)]
    max_level = _max_level(cfg, n)
    sepsets: dict = {}
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if bk.touches_required(i, j):
                edges.append((i, j))
                continue
            if j not in sym[i] or not bk.pair_allowed(i, j):
                continue
            pools = sorted([sym[i] - {j}, sym[j] - {i}], key=lambda p: (len(p), sorted(p)))
            sep = _find_sepset(tester, i, j, pools, max_level)
            if sep is None:
                edges.append((i, j))
            else:
                sepsets[(i, j)] = sepsets[(j, i)] = sep
    m = _MutablePdag(n, (), edges)
    # separating sets for non-adjacent pairs that share a neighbour
    for b in range(n):
        for a, c in combinations(sorted(m.ne[b]), 2):
            if m.adjacent(a, c) or (a, c) in sepsets:
                continue
            pools = sorted([sym[a] - {c}, sym[c] - {a}], key=lambda p: (len(p), sorted(p)))
            sep = _find_sepset(tester, a, c, pools, max_level)
            if sep is None:
                sep = _find_sepset(tester, a, c, [set(range(n)) - {a, c}], min(max_level, 2))
            if sep is not None:
                sepsets[(a, c)] = sepsets[(c, a)] = sep
    for a, b in sorted(bk.required):
        m.orient(a, b)
    orient_colliders(m, sepsets, bk)
    return finalize(m, bk, d.names)


def grow_shrink(d: Dataset, cfg: CiConfig | None = None, k: Knowledge | None = None) -> Pdag:
    cfg = cfg or CiConfig()
    tester = CITester(d, cfg)
    blankets = [markov_blanket_gs(d, t, cfg, tester) for t in range(d.n_vars)]
    return mb_to_graph(d, blankets, cfg, k, tester)


def iamb(d: Dataset, cfg: CiConfig | None = None, k: Knowledge | None = None) -> Pdag:
    cfg = cfg or CiConfig()
    tester = CITester(d, cfg)
    blankets = [markov_blanket_iamb(d, t, cfg, tester) for t in range(d.n_vars)]
    return mb_to_graph(d, blankets, cfg, k, tester)

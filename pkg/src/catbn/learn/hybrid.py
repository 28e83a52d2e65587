"""Hybrid learners: a constraint-based restrict phase then a score search."""

from __future__ import annotations

from itertools import combinations

from ..citest import CiConfig, CITester
from ..dataset import Dataset
from ..graph import Dag
from ..knowledge import Knowledge
from ..score import ScoreCache
from ._common import bind, log, require_complete
from .constraint import markov_blanket_gs, markov_blanket_iamb
from .search import SearchConfig, hill_climb, tabu

__all__ = ["mmpc", "hiton_pc", "restrict_maximize", "mmhc", "rsmax2", "RESTRICT", "MAXIMIZE"]


def _subsets_upto(items, k):
    items = sorted(items)
    for r in range(min(k, len(items)) + 1):
        yield from combinations(items, r)


def _symmetrise(cands: list[set[int]]) -> list[set[int]]:
    return [{j for j in cands[i] if i in cands[j]} for i in range(len(cands))]


def _max_size(cfg: CiConfig, n: int) -> int:
    return n if cfg.max_cond_size is None else cfg.max_cond_size


def _mmpc_one(tester: CITester, t: int, n: int, max_size: int, allowed) -> set[int]:
    cpc: list[int] = []
    pool = [x for x in range(n) if x != t and allowed(t, x)]
    # running minimum; admitting v only adds the subsets that contain v
    min_assoc = {x: tester.association(t, x) for x in pool}
    while True:
        best, best_x = 0.0, None
        for x in pool:
            if x in cpc:
                continue
            if cpc and min_assoc[x] > 0.0:
                v, rest = cpc[-1], cpc[:-1]
                for s in _subsets_upto(rest, max_size - 1):
                    min_assoc[x] = min(min_assoc[x], tester.association(t, x, s + (v,)))
                    if min_assoc[x] == 0.0:
                        break
            if min_assoc[x] > best:
                best, best_x = min_assoc[x], x
        if best_x is None:
            break
        cpc.append(best_x)
    for x in list(cpc):
        rest = [v for v in cpc if v != x]
        if any(tester.independent(t, x, s) for s in _subsets_upto(rest, max_size)):
            cpc.remove(x)
    return set(cpc)


def mmpc(d: Dataset, cfg: CiConfig | None = None, k: Knowledge | None = None, tester: CITester | None = None) -> list[set[int]]:
    """Max-min parents-and-children sets, symmetrised with the AND rule.

    A candidate's strength is its minimum association with the target over
    all subsets of the current set; the strongest candidate is admitted
    while that minimum indicates dependence.  A backward pass then drops any
    member made independent by some subset of the others.
    """
    require_complete(d)
    cfg = cfg or CiConfig()
    tester = tester or CITester(d, cfg)
    bk = bind(k, d)
    n = d.n_vars
    size = _max_size(cfg, n)
    cands = [_mmpc_one(tester, t, n, size, bk.pair_allowed) for t in range(n)]
    return _symmetrise(cands)


def hiton_pc(d: Dataset, cfg: CiConfig | None = None, k: Knowledge | None = None, tester: CITester | None = None) -> list[set[int]]:
    """Interleaved grow-prune parents-and-children search.

    Candidates enter in order of marginal association; after each admission
    any member separated from the target by a subset of the others is
    removed.  The wrapper-based variable selection of full HITON is not
    performed.
    """
    require_complete(d)
    cfg = cfg or CiConfig()
    tester = tester or CITester(d, cfg)
    bk = bind(k, d)
    n = d.n_vars
    size = _max_size(cfg, n)
    out = []
    for t in range(n):
        order = [x for x in range(n) if x != t and bk.pair_allowed(t, x) and not tester.independent(t, x)]
        order.sort(key=lambda x: (-tester.association(t, x), x))
        pc: list[int] = []
        for x in order:
            pc.append(x)
            for y in list(pc):
                rest = [v for v in pc if v != y]
                if any(tester.independent(t, y, s) for s in _subsets_upto(rest, size)):
                    pc.remove(y)
        out.append(set(pc))
    return _symmetrise(out)


def _blankets(fn):
    def restrict(d, cfg, k, tester):
        bk = bind(k, d)
        raw = [fn(d, t, cfg, tester) for t in range(d.n_vars)]
        sym = _symmetrise(raw)
        return [{j for j in s if bk.pair_allowed(i, j)} for i, s in enumerate(sym)]

    return restrict


RESTRICT = {
    "mmpc": mmpc,
    "hiton": hiton_pc,
    "gs": _blankets(markov_blanket_gs),
    "iamb": _blankets(markov_blanket_iamb),
}
MAXIMIZE = {"hc": hill_climb, "tabu": tabu}


def restrict_maximize(
    d: Dataset,
    restrict: str = "hiton",
    maximize: str = "hc",
    cfg: CiConfig | None = None,
    search: SearchConfig | None = None,
    k: Knowledge | None = None,
    *,
    cache: ScoreCache | None = None,
) -> Dag:
    """Learn a candidate skeleton, then search only over arcs inside it.

    Arc additions are limited to skeleton pairs; deletions and reversals are
    unrestricted.  Required arcs outside the skeleton widen it.
    """
    if restrict not in RESTRICT:
        raise ValueError(f"unknown restrict method {restrict!r}; choose from {sorted(RESTRICT)}")
    if maximize not in MAXIMIZE:
        raise ValueError(f"unknown maximize method {maximize!r}; choose from {sorted(MAXIMIZE)}")
    require_complete(d)
    cfg = cfg or CiConfig()
    tester = CITester(d, cfg)
    cands = RESTRICT[restrict](d, cfg, k, tester)
    skeleton = {(i, j) for i in range(d.n_vars) for j in cands[i] if i < j}
    bk = bind(k, d)
    widened = {(min(a, b), max(a, b)) for a, b in bk.required} - skeleton
    if widened:
        log.info("restrict phase: skeleton widened by %d required arcs", len(widened))
        skeleton |= widened
    return MAXIMIZE[maximize](d, search, k, skeleton=skeleton, cache=cache)


def mmhc(d: Dataset, cfg: CiConfig | None = None, search: SearchConfig | None = None, k: Knowledge | None = None, **kw) -> Dag:
    return restrict_maximize(d, "mmpc", "hc", cfg, search, k, **kw)


def rsmax2(d: Dataset, cfg: CiConfig | None = None, search: SearchConfig | None = None, k: Knowledge | None = None, **kw) -> Dag:
    return restrict_maximize(d, "hiton", "hc", cfg, search, k, **kw)

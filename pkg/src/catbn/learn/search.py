"""Score-based DAG search: greedy hill climbing and tabu search over BIC."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from ..dataset import Dataset
from ..graph import Dag, has_directed_path
from ..knowledge import BoundKnowledge, Knowledge
from ..score import ScoreCache
from ._common import bind, log, require_complete

__all__ = ["SearchConfig", "hill_climb", "tabu", "MOVE_ORDER"]

MOVE_ORDER = {"add": 0, "delete": 1, "reverse": 2}
_EPS = 1e-9


@dataclass(frozen=True)
class SearchConfig:
    """Settings for the score-based learners.

    ``tabu_length`` is the number of recently visited graphs that may not be
    revisited; ``tabu_budget`` is how many consecutive moves without a new
    best score tabu search tolerates.  ``max_degree`` bounds the number of
    adjacencies per node (used by GES and optionally by the greedy searches).
    """

    max_iter: int = 10_000
    tabu_length: int = 10
    tabu_budget: int = 15
    max_degree: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if self.tabu_length < 1:
            raise ValueError("tabu_length must be positive")
        if self.tabu_budget < 0:
            raise ValueError("tabu_budget must be non-negative")
        if self.max_degree is not None and self.max_degree < 1:
            raise ValueError("max_degree must be positive")


class _State:
    """Mutable DAG with per-node local scores."""

    def __init__(self, n: int, cache: ScoreCache, arcs=()):
        self.n = n
        self.cache = cache
        self.pa = [set() for _ in range(n)]
        self.ch = [set() for _ in range(n)]
        for a, b in arcs:
            self.pa[b].add(a)
            self.ch[a].add(b)
        self.local = [cache.local(i, self.pa[i]) for i in range(n)]

    @property
    def score(self) -> float:
        return sum(self.local)

    def key(self) -> frozenset:
        return frozenset((a, b) for b in range(self.n) for a in self.pa[b])

    def degree(self, i: int) -> int:
        return len(self.pa[i]) + len(self.ch[i])

    def delta(self, kind: str, a: int, b: int) -> float:
        c = self.cache
        if kind == "add":
            return c.local(b, self.pa[b] | {a}) - self.local[b]
        if kind == "delete":
            return c.local(b, self.pa[b] - {a}) - self.local[b]
        return (
            c.local(b, self.pa[b] - {a})
            - self.local[b]
            + c.local(a, self.pa[a] | {b})
            - self.local[a]
        )

    def apply(self, kind: str, a: int, b: int) -> None:
        if kind == "add":
            self.pa[b].add(a)
            self.ch[a].add(b)
        else:
            self.pa[b].discard(a)
            self.ch[a].discard(b)
            if kind == "reverse":
                self.pa[a].add(b)
                self.ch[b].add(a)
        for v in (a, b):
            self.local[v] = self.cache.local(v, self.pa[v])

    def reverse_ok(self, a: int, b: int) -> bool:
        # a -> b reversed closes a cycle iff another path a ~> b exists
        self.ch[a].discard(b)
        try:
            return not has_directed_path(self.ch, a, b)
        finally:
            self.ch[a].add(b)


def _moves(s: _State, bk: BoundKnowledge, cfg: SearchConfig, skeleton):
    n = s.n
    deg = cfg.max_degree
    for a in range(n):
        for b in range(n):
            if a == b:
                continue
            if b in s.ch[a]:
                if bk.is_required(a, b):
                    continue
                yield "delete", a, b
                if bk.allowed(b, a) and s.reverse_ok(a, b):
                    yield "reverse", a, b
            elif a not in s.ch[b]:
                if not bk.allowed(a, b):
                    continue
                if skeleton is not None and (min(a, b), max(a, b)) not in skeleton:
                    continue
                if deg is not None and (s.degree(a) >= deg or s.degree(b) >= deg):
                    continue
                if has_directed_path(s.ch, b, a):
                    continue
                yield "add", a, b


def _ranked(s: _State, bk, cfg, skeleton):
    """Legal moves sorted best-first; ties broken by (move type, parent, child)."""
    scored = [(s.delta(kind, a, b), kind, a, b) for kind, a, b in _moves(s, bk, cfg, skeleton)]
    scored.sort(key=lambda m: (-m[0], MOVE_ORDER[m[1]], m[2], m[3]))
    return scored


def _start(d: Dataset, k: Knowledge | None, cache: ScoreCache | None):
    require_complete(d)
    if cache is None or cache.data is not d:
        cache = ScoreCache(d)
    bk = bind(k, d)
    return bk, _State(d.n_vars, cache, sorted(bk.required))


def _normalise_skeleton(skeleton):
    if skeleton is None:
        return None
    return frozenset((min(a, b), max(a, b)) for a, b in skeleton)


def hill_climb(
    d: Dataset,
    cfg: SearchConfig | None = None,
    k: Knowledge | None = None,
    *,
    skeleton=None,
    cache: ScoreCache | None = None,
    trace: list | None = None,
) -> Dag:
    """Greedy ascent over arc additions, deletions and reversals.

    Starts from the required arcs (or the empty graph) and applies the best
    strictly improving move until none remains.  ``skeleton`` optionally
    restricts additions to the given unordered index pairs.  When ``trace``
    is a list, the score after every step is appended to it.
    """
    cfg = cfg or SearchConfig()
    bk, s = _start(d, k, cache)
    skeleton = _normalise_skeleton(skeleton)
    if trace is not None:
        trace.append(s.score)
    for _ in range(cfg.max_iter):
        ranked = _ranked(s, bk, cfg, skeleton)
        if not ranked or ranked[0][0] <= _EPS:
            break
        _, kind, a, b = ranked[0]
        s.apply(kind, a, b)
        if trace is not None:
            trace.append(s.score)
    return Dag(d.names, s.key())


def tabu(
    d: Dataset,
    cfg: SearchConfig | None = None,
    k: Knowledge | None = None,
    *,
    skeleton=None,
    cache: ScoreCache | None = None,
    trace: list | None = None,
) -> Dag:
    """Tabu search: hill climbing that keeps moving past local optima.

    The best non-tabu move is always taken, improving or not; recently
    visited graphs are tabu.  The search stops after ``cfg.tabu_budget``
    consecutive moves fail to improve on the best score seen, and returns
    the best graph seen.  Until the first local optimum it makes exactly the
    moves hill climbing makes.
    """
    cfg = cfg or SearchConfig()
    bk, s = _start(d, k, cache)
    skeleton = _normalise_skeleton(skeleton)
    best_key, best_score = s.key(), s.score
    recent = deque([best_key], maxlen=cfg.tabu_length)
    stale = 0
    if trace is not None:
        trace.append(best_score)
    for _ in range(cfg.max_iter):
        chosen = None
        for delta, kind, a, b in _ranked(s, bk, cfg, skeleton):
            key = _key_after(s, kind, a, b)
            if key not in recent:
                chosen = (delta, kind, a, b)
                break
        if chosen is None:
            break
        delta, kind, a, b = chosen
        if delta <= _EPS and stale >= cfg.tabu_budget:
            break
        s.apply(kind, a, b)
        recent.append(s.key())
        current = s.score
        if trace is not None:
            trace.append(current)
        if current > best_score + _EPS:
            best_key, best_score = s.key(), current
            stale = 0
        else:
            stale += 1
            if stale > cfg.tabu_budget:
                break
    log.debug("tabu: best score %.4f", best_score)
    return Dag(d.names, best_key)


def _key_after(s: _State, kind: str, a: int, b: int) -> frozenset:
    arcs = set(s.key())
    if kind == "add":
        arcs.add((a, b))
    else:
        arcs.discard((a, b))
        if kind == "reverse":
            arcs.add((b, a))
    return frozenset(arcs)

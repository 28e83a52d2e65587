"""Helpers shared by the learners: knowledge binding and PDAG finalisation."""

from __future__ import annotations

import logging
from itertools import combinations

from ..dataset import DataError, Dataset
from ..graph import Pdag, _meek_pass, _MutablePdag
from ..knowledge import BoundKnowledge, Knowledge

log = logging.getLogger("catbn.learn")


def require_complete(d: Dataset) -> None:
    if d.has_missing():
        raise DataError("structure learning needs a dataset without missing values")


def bind(k: Knowledge | None, d: Dataset) -> BoundKnowledge:
    return (k or Knowledge()).bind(d.names)


def orient_colliders(m: _MutablePdag, sepsets: dict, bk: BoundKnowledge) -> int:
    """Orient unshielded triples ``a - b - c`` with ``b`` outside sepset(a, c).

    The first orientation written wins; later contradicting ones are skipped
    and counted.  Returns the number of conflicts.
    """
    conflicts = 0
    n = m.n
    for b in range(n):
        adj = sorted(m.ne[b] | m.pa[b] | m.ch[b])
        for a, c in combinations(adj, 2):
            if m.adjacent(a, c):
                continue
            sep = sepsets.get((a, c))
            if sep is None or b in sep:
                continue
            for x in (a, c):
                if x in m.pa[b]:
                    continue
                if x in m.ch[b] or not bk.allowed(x, b) or m.creates_cycle(x, b):
                    conflicts += 1
                    continue
                m.orient(x, b)
    if conflicts:
        log.info("collider orientation: %d conflicting orientations skipped", conflicts)
    return conflicts


def lock_required(m: _MutablePdag, bk: BoundKnowledge) -> None:
    """Orient every required arc, adding it if absent.

    Learned arcs are lifted out first and restored afterwards in a fixed
    order; one that would now close a cycle through the required arcs is
    kept as an undirected edge for the caller to resolve.
    """
    learned = sorted((a, b) for a in range(m.n) for b in m.ch[a] if (a, b) not in bk.required)
    for a, b in learned:
        m.unorient(a, b)
    for a, b in sorted(bk.required):
        if not m.adjacent(a, b):
            m.ne[a].add(b)
            m.ne[b].add(a)
        m.orient(a, b)
    for a, b in learned:
        if b in m.ne[a] and not m.creates_cycle(a, b):
            m.orient(a, b)


def finalize(m: _MutablePdag, bk: BoundKnowledge, nodes) -> Pdag:
    """Make a working PDAG consistent with the knowledge, then Meek-complete it.

    Disallowed arcs are reversed when the reverse is allowed, otherwise
    dropped.  Undirected edges with a single allowed orientation receive it.
    Edges whose only allowed orientation would close a cycle are dropped.
    """
    lock_required(m, bk)
    for a in range(m.n):
        for b in sorted(m.ch[a]):
            if bk.allowed(a, b):
                continue
            m.remove(a, b)
            if bk.allowed(b, a) and not m.creates_cycle(b, a):
                m.ne[a].add(b)
                m.ne[b].add(a)
                m.orient(b, a)
    for a, b in m.undirected_edges():
        fwd, back = bk.allowed(a, b), bk.allowed(b, a)
        if fwd and back:
            continue
        if not fwd and not back:
            m.remove(a, b)
            continue
        x, y = (a, b) if fwd else (b, a)
        if m.creates_cycle(x, y):
            m.remove(a, b)
        else:
            m.orient(x, y)
    while _meek_pass(m, bk.allowed):
        pass
    return m.to_pdag(nodes)

"""Graph types and structural algorithms for Bayesian network structures.

Nodes are addressed by integer index internally; every public function also
accepts node names.  ``Dag`` and ``Pdag`` values are immutable and hashable,
and all iteration is in sorted index order so results are reproducible.
"""

from __future__ import annotations

import csv
import io
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "GraphError",
    "Variable",
    "Dag",
    "Pdag",
    "is_acyclic",
    "topological_order",
    "v_structures",
    "d_separated",
    "markov_blanket",
    "extend_to_dag",
    "consistent_extension",
    "meek_orient",
    "cpdag",
    "random_connected_dag",
    "iter_random_connected_dags",
    "empty_graph",
    "fragments",
    "has_directed_path",
    "to_dot",
    "to_arc_csv",
    "read_arc_csv",
]


class GraphError(ValueError):
    """Raised when a graph invariant would be violated."""


@dataclass(frozen=True)
class Variable:
    """A categorical variable with an ordered state space."""

    name: str
    states: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(str(s) for s in self.states))
        if not self.name:
            raise ValueError("variable name must be non-empty")
        if len(self.states) < 2:
            raise ValueError(f"variable {self.name!r} needs at least 2 states")
        if len(set(self.states)) != len(self.states):
            raise ValueError(f"variable {self.name!r} has duplicate state labels")

    @property
    def cardinality(self) -> int:
        return len(self.states)


def _node_names(nodes) -> tuple[str, ...]:
    names = tuple(v.name if isinstance(v, Variable) else str(v) for v in nodes)
    if len(set(names)) != len(names):
        raise GraphError("node names must be unique")
    return names


class _GraphBase:
    __slots__ = ("nodes", "_index")

    def _init_nodes(self, nodes):
        self.nodes = _node_names(nodes)
        self._index = {name: i for i, name in enumerate(self.nodes)}

    @property
    def n(self) -> int:
        return len(self.nodes)

    def index(self, node) -> int:
        """Return the index of ``node`` (a name or an index)."""
        if isinstance(node, (int, np.integer)):
            if not 0 <= node < len(self.nodes):
                raise GraphError(f"node index {node} out of range")
            return int(node)
        try:
            return self._index[node]
        except KeyError:
            raise GraphError(f"unknown node {node!r}") from None

    def _pair(self, a, b) -> tuple[int, int]:
        return self.index(a), self.index(b)


class Dag(_GraphBase):
    """Directed acyclic graph over named nodes.

    Parameters
    ----------
    nodes : sequence of str or Variable
    arcs : iterable of (parent, child) pairs, given as names or indices
    """

    __slots__ = ("arcs", "_parents", "_children")

    def __init__(self, nodes, arcs=()):
        self._init_nodes(nodes)
        arc_set = set()
        for a, b in arcs:
            i, j = self._pair(a, b)
            if i == j:
                raise GraphError(f"self-loop on {self.nodes[i]!r}")
            arc_set.add((i, j))
        if not is_acyclic(arc_set, self.n):
            raise GraphError("arc set contains a directed cycle")
        self.arcs = frozenset(arc_set)
        parents = [[] for _ in range(self.n)]
        children = [[] for _ in range(self.n)]
        for i, j in sorted(arc_set):
            parents[j].append(i)
            children[i].append(j)
        self._parents = tuple(tuple(p) for p in parents)
        self._children = tuple(tuple(c) for c in children)

    @classmethod
    def from_parents(cls, nodes, parents: dict) -> "Dag":
        return cls(nodes, [(p, c) for c, ps in parents.items() for p in ps])

    def parents(self, node) -> tuple[int, ...]:
        return self._parents[self.index(node)]

    def children(self, node) -> tuple[int, ...]:
        return self._children[self.index(node)]

    def has_arc(self, a, b) -> bool:
        return self._pair(a, b) in self.arcs

    def adjacent(self, a, b) -> bool:
        i, j = self._pair(a, b)
        return (i, j) in self.arcs or (j, i) in self.arcs

    @property
    def n_arcs(self) -> int:
        return len(self.arcs)

    def arc_list(self) -> list[tuple[int, int]]:
        return sorted(self.arcs)

    def named_arcs(self) -> list[tuple[str, str]]:
        return [(self.nodes[i], self.nodes[j]) for i, j in self.arc_list()]

    def with_arcs(self, add=(), remove=()) -> "Dag":
        arcs = set(self.arcs)
        arcs.difference_update(self._pair(a, b) for a, b in remove)
        arcs.update(self._pair(a, b) for a, b in add)
        return Dag(self.nodes, arcs)

    def relabel(self, nodes) -> "Dag":
        """Return the same arcs expressed over another node ordering (by name)."""
        names = _node_names(nodes)
        if set(names) != set(self.nodes):
            raise GraphError("relabel requires the same node set")
        return Dag(names, self.named_arcs())

    def ancestors(self, node) -> set[int]:
        seen, stack = set(), list(self.parents(node))
        while stack:
            u = stack.pop()
            if u not in seen:
                seen.add(u)
                stack.extend(self._parents[u])
        return seen

    def descendants(self, node) -> set[int]:
        seen, stack = set(), list(self.children(node))
        while stack:
            u = stack.pop()
            if u not in seen:
                seen.add(u)
                stack.extend(self._children[u])
        return seen

    def to_pdag(self) -> "Pdag":
        return Pdag(self.nodes, directed=self.arcs)

    def __eq__(self, other):
        return isinstance(other, Dag) and self.nodes == other.nodes and self.arcs == other.arcs

    def __hash__(self):
        return hash((self.nodes, self.arcs))

    def __repr__(self):
        body = ", ".join(f"{a}->{b}" for a, b in self.named_arcs())
        return f"Dag({self.n} nodes: {body})"


class Pdag(_GraphBase):
    """Partially directed graph: directed arcs plus undirected edges.

    Undirected edges are stored as ``(i, j)`` with ``i < j``.
    """

    __slots__ = ("directed", "undirected")

    def __init__(self, nodes, directed=(), undirected=()):
        self._init_nodes(nodes)
        d = set()
        for a, b in directed:
            i, j = self._pair(a, b)
            if i == j:
                raise GraphError(f"self-loop on {self.nodes[i]!r}")
            d.add((i, j))
        u = set()
        for a, b in undirected:
            i, j = self._pair(a, b)
            if i == j:
                raise GraphError(f"self-loop on {self.nodes[i]!r}")
            u.add((min(i, j), max(i, j)))
        for i, j in d:
            if (min(i, j), max(i, j)) in u or (j, i) in d:
                raise GraphError(
                    f"pair {self.nodes[i]!r}, {self.nodes[j]!r} has more than one edge"
                )
        if not is_acyclic(d, self.n):
            raise GraphError("directed part contains a cycle")
        self.directed = frozenset(d)
        self.undirected = frozenset(u)

    def adjacent(self, a, b) -> bool:
        i, j = self._pair(a, b)
        return (i, j) in self.directed or (j, i) in self.directed or (min(i, j), max(i, j)) in self.undirected

    def has_arc(self, a, b) -> bool:
        return self._pair(a, b) in self.directed

    def has_edge(self, a, b) -> bool:
        i, j = self._pair(a, b)
        return (min(i, j), max(i, j)) in self.undirected

    def neighbors(self, node) -> list[int]:
        """Nodes joined to ``node`` by an undirected edge."""
        i = self.index(node)
        return sorted({b if a == i else a for a, b in self.undirected if i in (a, b)})

    def parents(self, node) -> list[int]:
        i = self.index(node)
        return sorted(a for a, b in self.directed if b == i)

    def children(self, node) -> list[int]:
        i = self.index(node)
        return sorted(b for a, b in self.directed if a == i)

    def adjacents(self, node) -> list[int]:
        return sorted(set(self.neighbors(node)) | set(self.parents(node)) | set(self.children(node)))

    @property
    def n_edges(self) -> int:
        return len(self.directed) + len(self.undirected)

    def is_dag(self) -> bool:
        return not self.undirected

    def to_dag(self) -> Dag:
        if self.undirected:
            raise GraphError("PDAG still has undirected edges; use extend_to_dag")
        return Dag(self.nodes, self.directed)

    def skeleton(self) -> frozenset:
        return frozenset((min(i, j), max(i, j)) for i, j in self.directed) | self.undirected

    def __eq__(self, other):
        return (
            isinstance(other, Pdag)
            and self.nodes == other.nodes
            and self.directed == other.directed
            and self.undirected == other.undirected
        )

    def __hash__(self):
        return hash((self.nodes, self.directed, self.undirected))

    def __repr__(self):
        parts = [f"{self.nodes[a]}->{self.nodes[b]}" for a, b in sorted(self.directed)]
        parts += [f"{self.nodes[a]}--{self.nodes[b]}" for a, b in sorted(self.undirected)]
        return f"Pdag({self.n} nodes: {', '.join(parts)})"


# ---------------------------------------------------------------------------
# basic structure queries


def is_acyclic(arcs: Iterable[tuple[int, int]], n: int) -> bool:
    """True iff the directed arcs over ``n`` nodes contain no directed cycle."""
    return topological_order(arcs, n) is not None


def topological_order(arcs: Iterable[tuple[int, int]], n: int) -> list[int] | None:
    """Kahn ordering (smallest index first), or None if the arcs are cyclic."""
    children = [[] for _ in range(n)]
    indeg = [0] * n
    for i, j in arcs:
        if not (0 <= i < n and 0 <= j < n):
            raise GraphError(f"arc ({i}, {j}) references an invalid node")
        if i == j:
            return None
        children[i].append(j)
        indeg[j] += 1
    import heapq

    ready = [i for i in range(n) if indeg[i] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        u = heapq.heappop(ready)
        order.append(u)
        for v in children[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(ready, v)
    return order if len(order) == n else None


def has_directed_path(children: Sequence[Iterable[int]], src: int, dst: int) -> bool:
    """Is there a directed path ``src -> ... -> dst`` in an adjacency list?"""
    if src == dst:
        return True
    seen = {src}
    stack = [src]
    while stack:
        u = stack.pop()
        for v in children[u]:
            if v == dst:
                return True
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return False


def _directed_sets(g) -> tuple[set[tuple[int, int]], set[tuple[int, int]]]:
    if isinstance(g, Dag):
        return set(g.arcs), set()
    return set(g.directed), set(g.undirected)


def _adjacent_in(directed, undirected, a, b) -> bool:
    return (a, b) in directed or (b, a) in directed or (min(a, b), max(a, b)) in undirected


def v_structures(g) -> set[tuple[int, int, int]]:
    """All unshielded colliders ``a -> b <- c`` as index triples with ``a < c``."""
    directed, undirected = _directed_sets(g)
    into = {}
    for a, b in directed:
        into.setdefault(b, []).append(a)
    out = set()
    for b, ps in into.items():
        for a, c in combinations(sorted(ps), 2):
            if not _adjacent_in(directed, undirected, a, c):
                out.add((a, b, c))
    return out


def d_separated(g: Dag, x, y, z=()) -> bool:
    """Decide whether ``x`` and ``y`` are d-separated by ``z`` in ``g``.

    Uses a reachability traversal over (node, direction) states, so the cost
    is linear in the number of arcs.
    """
    xi, yi = g.index(x), g.index(y)
    zs = {g.index(v) for v in z}
    if xi == yi:
        raise GraphError("x and y must differ")
    if xi in zs or yi in zs:
        raise GraphError("x and y must not be in the conditioning set")
    return yi not in _reachable(g, xi, zs)


def _reachable(g: Dag, source: int, z: set[int]) -> set[int]:
    # nodes in z or with a descendant in z
    anc_z = set(z)
    stack = list(z)
    while stack:
        u = stack.pop()
        for p in g._parents[u]:
            if p not in anc_z:
                anc_z.add(p)
                stack.append(p)
    # direction True: arrived from a child (travelling up)
    visited = set()
    reach = set()
    stack = [(source, True)]
    while stack:
        node, up = stack.pop()
        if (node, up) in visited:
            continue
        visited.add((node, up))
        if node not in z:
            reach.add(node)
        if up:
            if node not in z:
                stack.extend((p, True) for p in g._parents[node])
                stack.extend((c, False) for c in g._children[node])
        else:
            if node not in z:
                stack.extend((c, False) for c in g._children[node])
            if node in anc_z:
                stack.extend((p, True) for p in g._parents[node])
    return reach


def markov_blanket(g: Dag, node) -> set[int]:
    """Parents, children and the children's other parents."""
    i = g.index(node)
    mb = set(g.parents(i)) | set(g.children(i))
    for c in g.children(i):
        mb.update(g.parents(c))
    mb.discard(i)
    return mb


# ---------------------------------------------------------------------------
# orientation


def extend_to_dag(p: Pdag, seed=None) -> Dag:
    """Orient every undirected edge of ``p`` at random, flipping on cycles.

    Edges are visited in sorted order; each receives a random direction and,
    if that direction closes a directed cycle, the opposite one.  Because the
    partial graph is acyclic at every step, at most one of the two directions
    can close a cycle, so the procedure always succeeds on a valid PDAG.
    """
    if isinstance(p, Dag):
        return p
    rng = np.random.default_rng(seed)
    children = [set() for _ in range(p.n)]
    for i, j in p.directed:
        children[i].add(j)
    if not is_acyclic(p.directed, p.n):
        raise GraphError("directed part of the PDAG is cyclic")
    for i, j in sorted(p.undirected):
        a, b = (i, j) if rng.random() < 0.5 else (j, i)
        if has_directed_path(children, b, a):
            a, b = b, a
            if has_directed_path(children, b, a):
                raise GraphError(
                    f"edge {p.nodes[i]}--{p.nodes[j]} cannot be oriented without a cycle"
                )
        children[a].add(b)
    return Dag(p.nodes, [(a, b) for a in range(p.n) for b in children[a]])


def consistent_extension(p: Pdag) -> Dag:
    """A DAG extension of ``p`` adding no new v-structure (Dor and Tarsi).

    Raises GraphError when ``p`` admits no such extension.
    """
    if isinstance(p, Dag):
        return p
    pa = [set() for _ in range(p.n)]
    ch = [set() for _ in range(p.n)]
    ne = [set() for _ in range(p.n)]
    for a, b in p.directed:
        ch[a].add(b)
        pa[b].add(a)
    for a, b in p.undirected:
        ne[a].add(b)
        ne[b].add(a)
    arcs = set(p.directed)
    alive = set(range(p.n))
    while alive:
        for x in sorted(alive):
            if ch[x]:
                continue
            adj_x = pa[x] | ne[x]
            if all(adj_x - {y} <= (pa[y] | ne[y] | ch[y]) for y in ne[x]):
                break
        else:
            raise GraphError("PDAG admits no consistent extension")
        for y in ne[x]:
            arcs.add((y, x))
            ne[y].discard(x)
        for y in pa[x]:
            ch[y].discard(x)
        alive.discard(x)
        pa[x], ne[x] = set(), set()
    return Dag(p.nodes, arcs)


class _MutablePdag:
    """Working copy used by orientation procedures."""

    def __init__(self, n, directed=(), undirected=()):
        self.n = n
        self.pa = [set() for _ in range(n)]
        self.ch = [set() for _ in range(n)]
        self.ne = [set() for _ in range(n)]
        for a, b in directed:
            self.pa[b].add(a)
            self.ch[a].add(b)
        for a, b in undirected:
            self.ne[a].add(b)
            self.ne[b].add(a)

    @classmethod
    def from_pdag(cls, p: Pdag):
        return cls(p.n, p.directed, p.undirected)

    def adjacent(self, a, b):
        return b in self.ne[a] or b in self.pa[a] or b in self.ch[a]

    def orient(self, a, b):
        self.ne[a].discard(b)
        self.ne[b].discard(a)
        self.pa[a].discard(b)
        self.ch[b].discard(a)
        self.ch[a].add(b)
        self.pa[b].add(a)

    def unorient(self, a, b):
        self.ch[a].discard(b)
        self.pa[b].discard(a)
        self.ch[b].discard(a)
        self.pa[a].discard(b)
        self.ne[a].add(b)
        self.ne[b].add(a)

    def remove(self, a, b):
        for s in (self.ne, self.pa, self.ch):
            s[a].discard(b)
            s[b].discard(a)

    def creates_cycle(self, a, b):
        return has_directed_path(self.ch, b, a)

    def undirected_edges(self):
        return sorted((a, b) for a in range(self.n) for b in self.ne[a] if a < b)

    def to_pdag(self, nodes) -> Pdag:
        directed = [(a, b) for a in range(self.n) for b in self.ch[a]]
        return Pdag(nodes, directed, self.undirected_edges())


def _meek_pass(m: _MutablePdag, can_orient: Callable[[int, int], bool]) -> bool:
    changed = False
    for a, b in m.undirected_edges():
        for x, y in ((a, b), (b, a)):
            if y not in m.ne[x]:
                break
            if not can_orient(x, y) or m.creates_cycle(x, y):
                continue
            if _meek_applies(m, x, y):
                m.orient(x, y)
                changed = True
                break
    return changed


def _meek_applies(m: _MutablePdag, x: int, y: int) -> bool:
    # R1: w -> x - y, w and y non-adjacent
    for w in m.pa[x]:
        if not m.adjacent(w, y):
            return True
    # R2: x -> w -> y
    for w in m.ch[x]:
        if y in m.ch[w]:
            return True
    # R3: x - c -> y, x - d -> y, c and d non-adjacent
    cands = sorted(c for c in m.ne[x] if y in m.ch[c])
    for c, d in combinations(cands, 2):
        if not m.adjacent(c, d):
            return True
    # R4: x - c -> d -> y, with c and y non-adjacent and x adjacent to d
    for d in m.pa[y]:
        if not m.adjacent(x, d):
            continue
        for c in m.pa[d]:
            if c in m.ne[x] and not m.adjacent(c, y):
                return True
    return False


def meek_orient(p: Pdag, can_orient: Callable[[int, int], bool] | None = None) -> Pdag:
    """Apply Meek's rules R1-R4 until no further edge can be oriented.

    ``can_orient(a, b)`` may veto individual orientations (used to honour
    background knowledge).  Orientations that would close a directed cycle
    are never made.
    """
    allow = can_orient or (lambda a, b: True)
    m = _MutablePdag.from_pdag(p)
    while _meek_pass(m, allow):
        pass
    return m.to_pdag(p.nodes)


def cpdag(g: Dag) -> Pdag:
    """Completed PDAG of the Markov equivalence class of ``g``."""
    vs = v_structures(g)
    compelled = set()
    for a, b, c in vs:
        compelled.add((a, b))
        compelled.add((c, b))
    undirected = [(min(a, b), max(a, b)) for a, b in g.arcs if (a, b) not in compelled]
    return meek_orient(Pdag(g.nodes, compelled, undirected))


# ---------------------------------------------------------------------------
# baselines


def empty_graph(nodes) -> Dag:
    return Dag(nodes, ())


def fragments(g) -> int:
    """Number of weakly connected components."""
    parent = list(range(g.n))

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    edges = g.arcs if isinstance(g, Dag) else (g.directed | g.undirected)
    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return len({find(u) for u in range(g.n)})


def _still_connected(nbrs, a, b) -> bool:
    # is b reachable from a once the a-b link is dropped?
    seen = {a}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        for v in nbrs[u]:
            if u == a and v == b:
                continue
            if v == b:
                return True
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return False


def iter_random_connected_dags(
    nodes, max_in: int = 3, max_out: int = 3, seed=None, burn_in: int | None = None, thin: int | None = None
) -> Iterator[Dag]:
    """Yield DAGs from the arc-toggle chain over weakly connected DAGs.

    Each step picks an ordered pair uniformly.  An existing arc is deleted if
    the graph stays connected; a missing arc is added if it keeps the graph
    acyclic and within the degree bounds.  The proposal is symmetric, so the
    chain's stationary law is uniform over connected DAGs satisfying the
    bounds.  The first graph is yielded after ``burn_in`` steps (default
    ``50 * n**2``) and each later one after ``thin`` steps (default ``n**2``).
    """
    names = _node_names(nodes)
    n = len(names)
    if max_in < 1 or max_out < 1:
        raise GraphError("degree bounds must be at least 1 for a connected graph")
    if n == 0:
        raise GraphError("need at least one node")
    burn_in = 50 * n * n if burn_in is None else burn_in
    thin = max(1, n * n) if thin is None else thin
    rng = np.random.default_rng(seed)

    ch = [set() for _ in range(n)]
    pa = [set() for _ in range(n)]
    nb = [set() for _ in range(n)]
    for i in range(n - 1):
        ch[i].add(i + 1)
        pa[i + 1].add(i)
        nb[i].add(i + 1)
        nb[i + 1].add(i)

    def step(k):
        if n < 2:
            return
        firsts = rng.integers(0, n, size=k)
        offsets = rng.integers(1, n, size=k)
        for a, off in zip(firsts.tolist(), offsets.tolist()):
            b = (a + off) % n
            if b in ch[a]:
                if _still_connected(nb, a, b):
                    ch[a].discard(b)
                    pa[b].discard(a)
                    nb[a].discard(b)
                    nb[b].discard(a)
            elif a not in ch[b]:
                if len(ch[a]) < max_out and len(pa[b]) < max_in and not has_directed_path(ch, b, a):
                    ch[a].add(b)
                    pa[b].add(a)
                    nb[a].add(b)
                    nb[b].add(a)

    step(burn_in)
    while True:
        yield Dag(names, [(a, b) for a in range(n) for b in ch[a]])
        step(thin)


def random_connected_dag(nodes, max_in: int = 3, max_out: int = 3, seed=None, burn_in: int | None = None) -> Dag:
    """One draw from the arc-toggle chain (see ``iter_random_connected_dags``)."""
    return next(iter_random_connected_dags(nodes, max_in, max_out, seed, burn_in))


# ---------------------------------------------------------------------------
# serialization


def to_dot(g, name: str = "G") -> str:
    lines = [f"digraph {name} {{"]
    for v in g.nodes:
        lines.append(f'  "{v}";')
    if isinstance(g, Dag):
        directed, undirected = sorted(g.arcs), []
    else:
        directed, undirected = sorted(g.directed), sorted(g.undirected)
    for a, b in directed:
        lines.append(f'  "{g.nodes[a]}" -> "{g.nodes[b]}";')
    for a, b in undirected:
        lines.append(f'  "{g.nodes[a]}" -> "{g.nodes[b]}" [dir=none];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_arc_csv(g) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["parent", "child", "directed"])
    if isinstance(g, Dag):
        directed, undirected = sorted(g.arcs), []
    else:
        directed, undirected = sorted(g.directed), sorted(g.undirected)
    for a, b in directed:
        w.writerow([g.nodes[a], g.nodes[b], 1])
    for a, b in undirected:
        w.writerow([g.nodes[a], g.nodes[b], 0])
    return buf.getvalue()


def read_arc_csv(text: str, nodes=None):
    """Parse an arc-list CSV; returns a ``Dag`` when every row is directed."""
    rows = list(csv.DictReader(io.StringIO(text)))
    missing = {"parent", "child", "directed"} - set(rows[0].keys() if rows else {"parent", "child", "directed"})
    if missing:
        raise GraphError(f"arc CSV lacks columns {sorted(missing)}")
    if nodes is None:
        seen = []
        for r in rows:
            for k in ("parent", "child"):
                if r[k] not in seen:
                    seen.append(r[k])
        nodes = seen
    directed = [(r["parent"], r["child"]) for r in rows if r["directed"].strip() == "1"]
    undirected = [(r["parent"], r["child"]) for r in rows if r["directed"].strip() == "0"]
    if len(directed) + len(undirected) != len(rows):
        raise GraphError("the 'directed' column must be 0 or 1")
    if undirected:
        return Pdag(nodes, directed, undirected)
    return Dag(nodes, directed)

"""Background knowledge: temporal tiers, required arcs and forbidden arcs.

Knowledge file grammar (one statement per line, ``#`` starts a comment)::

    tier <k>: name[, name ...]     # k is a positive integer
    require <a> -> <b>
    forbid <a> -> <b>

An arc from a higher tier to a lower tier is prohibited.  Variables sharing
a tier, or without a tier, may be joined in either direction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .graph import Dag, Pdag, is_acyclic

__all__ = [
    "KnowledgeError",
    "Knowledge",
    "BoundKnowledge",
    "arc_allowed",
    "validate_output",
    "parse_knowledge",
    "load_knowledge",
    "format_knowledge",
]


class KnowledgeError(ValueError):
    pass


@dataclass(frozen=True)
class Knowledge:
    tiers: dict = field(default_factory=dict)
    required: frozenset = frozenset()
    forbidden: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "tiers", {str(k): int(v) for k, v in dict(self.tiers).items()})
        object.__setattr__(self, "required", frozenset((str(a), str(b)) for a, b in self.required))
        object.__setattr__(self, "forbidden", frozenset((str(a), str(b)) for a, b in self.forbidden))
        if any(t < 1 for t in self.tiers.values()):
            raise KnowledgeError("tier indices must be positive")
        for a, b in self.required | self.forbidden:
            if a == b:
                raise KnowledgeError(f"arc {a} -> {a} is a self-loop")
        both = self.required & self.forbidden
        if both:
            a, b = sorted(both)[0]
            raise KnowledgeError(f"arc {a} -> {b} is both required and forbidden")
        for a, b in self.required:
            if self._tier_blocks(a, b):
                raise KnowledgeError(f"required arc {a} -> {b} points to an earlier tier")
        names = sorted({v for arc in self.required for v in arc})
        pos = {v: i for i, v in enumerate(names)}
        if not is_acyclic({(pos[a], pos[b]) for a, b in self.required}, len(names)):
            raise KnowledgeError("required arcs form a directed cycle")

    def __hash__(self):
        return hash((tuple(sorted(self.tiers.items())), self.required, self.forbidden))

    def _tier_blocks(self, a: str, b: str) -> bool:
        ta, tb = self.tiers.get(a), self.tiers.get(b)
        return ta is not None and tb is not None and ta > tb

    def arc_allowed(self, a: str, b: str) -> bool:
        if (a, b) in self.required:
            return True
        if (a, b) in self.forbidden:
            return False
        return not self._tier_blocks(a, b)

    def tier_groups(self) -> dict[int, list[str]]:
        out: dict[int, list[str]] = {}
        for name, t in sorted(self.tiers.items(), key=lambda kv: (kv[1], kv[0])):
            out.setdefault(t, []).append(name)
        return out

    @property
    def is_empty(self) -> bool:
        return not (self.tiers or self.required or self.forbidden)

    def names(self) -> set[str]:
        return set(self.tiers) | {v for arc in self.required | self.forbidden for v in arc}

    def bind(self, nodes: Sequence[str], strict: bool = True) -> "BoundKnowledge":
        """Index-based view over ``nodes``; unknown names raise when ``strict``."""
        unknown = self.names() - set(nodes)
        if unknown and strict:
            raise KnowledgeError(f"knowledge names unknown variables {sorted(unknown)}")
        return BoundKnowledge(self, tuple(nodes))

    def restrict(self, nodes: Iterable[str]) -> "Knowledge":
        keep = set(nodes)
        return Knowledge(
            {k: v for k, v in self.tiers.items() if k in keep},
            {(a, b) for a, b in self.required if a in keep and b in keep},
            {(a, b) for a, b in self.forbidden if a in keep and b in keep},
        )


class BoundKnowledge:
    """Knowledge resolved against a node ordering, queried by index."""

    def __init__(self, k: Knowledge, nodes: tuple[str, ...]):
        self.knowledge = k
        self.nodes = nodes
        n = len(nodes)
        pos = {v: i for i, v in enumerate(nodes)}
        self.required = frozenset((pos[a], pos[b]) for a, b in k.required if a in pos and b in pos)
        self._allowed = [[i != j and k.arc_allowed(nodes[i], nodes[j]) for j in range(n)] for i in range(n)]

    def allowed(self, a: int, b: int) -> bool:
        return self._allowed[a][b]

    def pair_allowed(self, a: int, b: int) -> bool:
        """Can ``a`` and ``b`` be adjacent at all?"""
        return self._allowed[a][b] or self._allowed[b][a]

    def is_required(self, a: int, b: int) -> bool:
        return (a, b) in self.required

    def touches_required(self, a: int, b: int) -> bool:
        return (a, b) in self.required or (b, a) in self.required


def arc_allowed(k: Knowledge, a: str, b: str) -> bool:
    """False iff ``a -> b`` is forbidden or runs from a later to an earlier tier."""
    return k.arc_allowed(a, b)


def validate_output(k: Knowledge, g) -> list[str]:
    """Every knowledge violation in a learned graph, as readable messages.

    Undirected edges count as violations unless both orientations are allowed,
    since any extension of the graph may pick either one.
    """
    problems = []
    if isinstance(g, Dag):
        directed, undirected = sorted(g.arcs), []
    else:
        directed, undirected = sorted(g.directed), sorted(g.undirected)
    names = g.nodes
    for a, b in directed:
        if not k.arc_allowed(names[a], names[b]):
            problems.append(f"arc {names[a]} -> {names[b]} is not allowed")
    for a, b in undirected:
        if not (k.arc_allowed(names[a], names[b]) and k.arc_allowed(names[b], names[a])):
            problems.append(f"undirected edge {names[a]} -- {names[b]} admits a prohibited orientation")
    present = {(names[a], names[b]) for a, b in directed}
    for a, b in sorted(k.required):
        if a in names and b in names and (a, b) not in present:
            problems.append(f"required arc {a} -> {b} is missing")
    return problems


_TIER = re.compile(r"^tier\s+(\d+)\s*:\s*(.*)$", re.IGNORECASE)
_ARC = re.compile(r"^(require|forbid)\s+(\S+)\s*->\s*(\S+)$", re.IGNORECASE)


def parse_knowledge(text: str) -> Knowledge:
    tiers: dict[str, int] = {}
    required, forbidden = set(), set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _TIER.match(line)
        if m:
            t = int(m.group(1))
            for name in (s.strip() for s in m.group(2).split(",")):
                if not name:
                    continue
                if name in tiers and tiers[name] != t:
                    raise KnowledgeError(f"line {lineno}: {name} assigned to two tiers")
                tiers[name] = t
            continue
        m = _ARC.match(line)
        if m:
            (required if m.group(1).lower() == "require" else forbidden).add((m.group(2), m.group(3)))
            continue
        raise KnowledgeError(f"line {lineno}: cannot parse {raw!r}")
    return Knowledge(tiers, required, forbidden)


def load_knowledge(path) -> Knowledge:
    return parse_knowledge(Path(path).read_text(encoding="utf-8"))


def format_knowledge(k: Knowledge) -> str:
    lines = [f"tier {t}: {', '.join(names)}" for t, names in sorted(k.tier_groups().items())]
    lines += [f"require {a} -> {b}" for a, b in sorted(k.required)]
    lines += [f"forbid {a} -> {b}" for a, b in sorted(k.forbidden)]
    return "\n".join(lines) + ("\n" if lines else "")

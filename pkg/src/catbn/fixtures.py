"""Bundled ground-truth networks used by the tests and the CLI demos.

All probabilities are fixed numbers, so every fixture is reproducible
without a seed.  ``survey_bn`` is a 10-variable network shaped like a
household-survey study: two background variables, a wealth index,
intermediate behaviours, and a binary outcome with four direct causes.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .graph import Dag, Variable
from .knowledge import Knowledge
from .params import Cpt, ParameterizedBn

__all__ = [
    "chain_bn",
    "collider_bn",
    "independent_bn",
    "five_node_bn",
    "survey_bn",
    "survey_knowledge",
    "SURVEY_TARGET",
    "SURVEY_CAUSES",
    "FIXTURES",
]


def _binary(name):
    return Variable(name, ["0", "1"])


def _cpt(variables, child, parents, prob_fn):
    """CPT whose rows come from ``prob_fn(*parent_codes) -> probabilities``."""
    card = {v.name: v.cardinality for v in variables}
    rows = [np.asarray(prob_fn(*combo), dtype=float) for combo in product(*(range(card[p]) for p in parents))]
    return Cpt(child, tuple(parents), np.vstack(rows) if rows else np.empty((0, card[child])))


def _bern(p1):
    return [1.0 - p1, p1]


def _build(variables, spec):
    """``spec`` maps child -> (parents, prob_fn)."""
    arcs = [(p, c) for c, (ps, _) in spec.items() for p in ps]
    dag = Dag([v.name for v in variables], arcs)
    cpts = [_cpt(variables, c, ps, fn) for c, (ps, fn) in spec.items()]
    return ParameterizedBn(variables, dag, cpts)


def chain_bn() -> ParameterizedBn:
    """A -> B -> C with copy probability 0.8."""
    vs = [_binary(n) for n in "ABC"]
    return _build(vs, {
        "A": ((), lambda: [0.5, 0.5]),
        "B": (("A",), lambda a: _bern(0.8 if a else 0.2)),
        "C": (("B",), lambda b: _bern(0.8 if b else 0.2)),
    })


def collider_bn() -> ParameterizedBn:
    """A -> B <- C; each parent shifts P(B = 1) by 0.4."""
    vs = [_binary(n) for n in "ABC"]
    return _build(vs, {
        "A": ((), lambda: [0.5, 0.5]),
        "C": ((), lambda: [0.5, 0.5]),
        "B": (("A", "C"), lambda a, c: _bern(0.1 + 0.4 * a + 0.4 * c)),
    })


def independent_bn() -> ParameterizedBn:
    vs = [_binary(n) for n in "ABC"]
    return _build(vs, {n: ((), lambda: [0.5, 0.5]) for n in "ABC"})


def five_node_bn() -> ParameterizedBn:
    """A -> C <- B, C -> D -> E, A -> E."""
    vs = [_binary(n) for n in "ABCDE"]
    return _build(vs, {
        "A": ((), lambda: [0.5, 0.5]),
        "B": ((), lambda: [0.4, 0.6]),
        "C": (("A", "B"), lambda a, b: _bern(0.1 + 0.4 * a + 0.4 * b)),
        "D": (("C",), lambda c: _bern(0.85 if c else 0.2)),
        "E": (("D", "A"), lambda d, a: _bern(0.1 + 0.45 * d + 0.35 * a)),
    })


SURVEY_TARGET = "Diarrhoea"
SURVEY_CAUSES = ("Water", "Breastfeeding", "Immunised", "WFH")

_SURVEY_TIERS = {
    "Region": 1,
    "Religion": 1,
    "Wealth": 2,
    "Education": 3,
    "ChildAge": 3,
    "Water": 4,
    "WFH": 4,
    "Breastfeeding": 4,
    "Immunised": 4,
    "Diarrhoea": 5,
}


def survey_bn() -> ParameterizedBn:
    """10-variable survey-like network; every arc of its DAG is compelled."""
    vs = [
        Variable("Region", ["r1", "r2", "r3"]),
        _binary("Religion"),
        Variable("Wealth", ["q1", "q2", "q3"]),
        _binary("Education"),
        _binary("Water"),
        _binary("ChildAge"),
        _binary("WFH"),
        _binary("Breastfeeding"),
        _binary("Immunised"),
        _binary("Diarrhoea"),
    ]

    def wealth(r, g):
        p = np.full(3, 0.1)
        p[(r + g) % 3] = 0.8
        return p

    return _build(vs, {
        "Region": ((), lambda: [0.35, 0.35, 0.3]),
        "Religion": ((), lambda: [0.55, 0.45]),
        "Wealth": (("Region", "Religion"), wealth),
        "Education": (("Wealth",), lambda w: _bern((0.15, 0.6, 0.9)[w])),
        "ChildAge": ((), lambda: [0.5, 0.5]),
        "Water": (("Wealth",), lambda w: _bern((0.2, 0.55, 0.85)[w])),
        "WFH": (("Wealth", "ChildAge"), lambda w, a: _bern(0.15 + 0.35 * (w > 0) + 0.35 * a)),
        "Breastfeeding": (("Education",), lambda e: _bern(0.8 if e else 0.25)),
        "Immunised": (("Education",), lambda e: _bern(0.85 if e else 0.3)),
        # every protective factor missing raises the risk by 0.2
        "Diarrhoea": (
            ("Water", "Breastfeeding", "Immunised", "WFH"),
            lambda w, b, i, h: _bern(0.1 + 0.2 * ((1 - w) + (1 - b) + (1 - i) + (1 - h))),
        ),
    })


def survey_knowledge(required: bool = True, tiers: bool = True) -> Knowledge:
    """Tiers for the survey network plus the four required arcs into the outcome."""
    req = {(c, SURVEY_TARGET) for c in SURVEY_CAUSES} if required else set()
    return Knowledge(dict(_SURVEY_TIERS) if tiers else {}, req)


FIXTURES = {
    "chain": chain_bn,
    "collider": collider_bn,
    "independent": independent_bn,
    "five": five_node_bn,
    "survey": survey_bn,
}

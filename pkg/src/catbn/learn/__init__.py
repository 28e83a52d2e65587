"""Structure learners and a name-based registry used by the estimators and CLI."""

from __future__ import annotations

from ..citest import CiConfig
from ..dataset import Dataset
from ..knowledge import Knowledge
from .constraint import grow_shrink, iamb, markov_blanket_gs, markov_blanket_iamb, mb_to_graph, pc_skeleton, pc_stable
from .ges import ges
from .hybrid import hiton_pc, mmhc, mmpc, restrict_maximize, rsmax2
from .search import SearchConfig, hill_climb, tabu

__all__ = [
    "ALGORITHMS",
    "learn",
    "CiConfig",
    "SearchConfig",
    "pc_skeleton",
    "pc_stable",
    "markov_blanket_gs",
    "markov_blanket_iamb",
    "mb_to_graph",
    "grow_shrink",
    "iamb",
    "hill_climb",
    "tabu",
    "ges",
    "mmpc",
    "hiton_pc",
    "restrict_maximize",
    "mmhc",
    "rsmax2",
]

# name -> (family, callable taking (data, ci_config, search_config, knowledge))
ALGORITHMS = {
    "pc-stable": ("constraint", lambda d, ci, sc, k: pc_stable(d, ci, k)),
    "gs": ("constraint", lambda d, ci, sc, k: grow_shrink(d, ci, k)),
    "iamb": ("constraint", lambda d, ci, sc, k: iamb(d, ci, k)),
    "hc": ("score", lambda d, ci, sc, k: hill_climb(d, sc, k)),
    "tabu": ("score", lambda d, ci, sc, k: tabu(d, sc, k)),
    "ges": ("score", lambda d, ci, sc, k: ges(d, sc, k)),
    "mmhc": ("hybrid", lambda d, ci, sc, k: mmhc(d, ci, sc, k)),
    "rsmax2": ("hybrid", lambda d, ci, sc, k: rsmax2(d, ci, sc, k)),
}


def learn(name: str, d: Dataset, ci: CiConfig | None = None, search: SearchConfig | None = None, k: Knowledge | None = None):
    """Run the learner registered under ``name``."""
    try:
        _, fn = ALGORITHMS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}") from None
    return fn(d, ci or CiConfig(), search or SearchConfig(), k)

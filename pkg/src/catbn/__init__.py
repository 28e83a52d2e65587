"""Structure learning for Bayesian networks over categorical data.

The library is organised by task: :mod:`catbn.graph` (DAGs, PDAGs and
graph algorithms), :mod:`catbn.dataset` (loading and preparing data),
:mod:`catbn.citest` and :mod:`catbn.score` (independence tests and BIC),
:mod:`catbn.learn` (the learners), :mod:`catbn.knowledge` (tiers and
required or forbidden arcs), :mod:`catbn.params` (CPTs, sampling and
cross-validation), :mod:`catbn.metrics` (graph comparison) and
:mod:`catbn.estimators` (fit/transform wrappers).
"""

__version__ = "0.1.0"

from .dataset import DataError, Dataset, load_csv
from .graph import Dag, GraphError, Pdag, Variable
from .knowledge import Knowledge, KnowledgeError, load_knowledge
from .learn import ALGORITHMS, CiConfig, SearchConfig, learn

__all__ = [
    "__version__",
    "ALGORITHMS",
    "CiConfig",
    "Dag",
    "DataError",
    "Dataset",
    "GraphError",
    "Knowledge",
    "KnowledgeError",
    "Pdag",
    "SearchConfig",
    "Variable",
    "learn",
    "load_csv",
    "load_knowledge",
]

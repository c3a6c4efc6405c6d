from .degree_sequence import CaseTag, DegreeSequence
from .multigraph import MultiGraph, PercolationMethod, PercolationOutcome
from .trace import ExplorationTrace
from .limit_path import LimitPath, ExcursionTable, ReflectedPath

__all__ = [
    "CaseTag",
    "DegreeSequence",
    "MultiGraph",
    "PercolationMethod",
    "PercolationOutcome",
    "ExplorationTrace",
    "LimitPath",
    "ExcursionTable",
    "ReflectedPath"
]

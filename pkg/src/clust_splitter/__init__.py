"""Incremental minimum sum-of-squares clustering by cluster splitting,
with a limited memory bundle solver and evaluation metrics."""

from .data import Assignment, CenterSet, DataSet, assign, cluster_sse, load_csv
from .errors import ClustError
from .lmbm import SolverConfig, SolverResult, Status, minimize
from .splitter import RunReport, SplitConfig, run

__all__ = ["Assignment", "CenterSet", "ClustError", "DataSet", "RunReport", "SolverConfig",
           "SolverResult", "SplitConfig", "Status", "assign", "cluster_sse", "load_csv",
           "minimize", "run"]
__version__ = "0.1.0"

"""Configuration IPs with thin solutions, and approximation schemes built on them."""

from .conf_ip import ConfIP, make_thin, reduce_support, simplify_lp_support
from .eptas import Epsilon, graham_list, solve
from .exceptions import BudgetExceeded, InfeasibleError, InstanceFormatError
from .instance import Instance, Schedule
from .knapsack import KnapsackSpec, sparsify

_ESTIMATORS = ("EPTASScheduler", "LPTScheduler", "ObjectiveScheduler")


def __getattr__(name):
    # scikit-learn is slow to import; load the estimator wrappers on first use
    if name in _ESTIMATORS:
        from . import estimators

        return getattr(estimators, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


__all__ = [
    "BudgetExceeded",
    "ConfIP",
    "EPTASScheduler",
    "Epsilon",
    "InfeasibleError",
    "Instance",
    "InstanceFormatError",
    "KnapsackSpec",
    "LPTScheduler",
    "ObjectiveScheduler",
    "Schedule",
    "graham_list",
    "make_thin",
    "reduce_support",
    "simplify_lp_support",
    "solve",
    "sparsify",
]

"""Scikit-learn style wrappers around the schedulers.

Each scheduler treats ``X`` as the vector of processing times and, like a
clustering estimator, stores one machine label per job in ``labels_``.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator, ClusterMixin

from . import eptas, objectives
from ._validation import check_epsilon, check_machines, check_mode, check_processing_times
from .instance import Instance


class _SchedulerBase(ClusterMixin, BaseEstimator):
    def _instance(self, X) -> Instance:
        return Instance(check_processing_times(X), check_machines(self.n_machines))

    def _store(self, schedule):
        self.labels_ = list(schedule.assignment)
        self.loads_ = list(schedule.loads)
        self.makespan_ = schedule.makespan
        self.n_features_in_ = 1
        return self


class LPTScheduler(_SchedulerBase):
    """Longest processing time first; a 2-approximation of the makespan."""

    def __init__(self, n_machines=2):
        self.n_machines = n_machines

    def fit(self, X, y=None):
        return self._store(eptas.graham_list(self._instance(X)))


class EPTASScheduler(_SchedulerBase):
    """Makespan within ``factor_`` of optimal, ``factor_ <= (1+eps)^2 (1+5eps)``.

    Parameters
    ----------
    n_machines : int
    eps : str or number
        ``"1/q"`` with ``q >= 4``; other values snap down to the next ``1/q``.
    mode : {"paper", "oracle"}
        How each makespan guess is decided.
    max_nodes : int
        Node budget for the restricted IP solver.
    """

    def __init__(self, n_machines=2, eps="1/4", mode="paper", max_nodes=10**8):
        self.n_machines = n_machines
        self.eps = eps
        self.mode = mode
        self.max_nodes = max_nodes

    def fit(self, X, y=None):
        report = eptas.solve(
            self._instance(X), check_epsilon(self.eps), check_mode(self.mode), max_nodes=self.max_nodes
        )
        self.factor_ = report.factor
        self.lower_bound_ = report.search.low
        self.n_iter_ = report.search.iterations
        return self._store(report.schedule)


class ObjectiveScheduler(_SchedulerBase):
    """Approximate optimum of a load objective (``kind``) under ``f``.

    ``f`` is ``"identity"`` or ``"power:p"``; ``kind`` one of ``sum-min``,
    ``min-max``, ``sum-max``, ``max-min``.
    """

    def __init__(self, n_machines=2, kind="sum-min", f="power:2", eps="1/4", mode="oracle"):
        self.n_machines = n_machines
        self.kind = kind
        self.f = f
        self.eps = eps
        self.mode = mode

    def fit(self, X, y=None):
        func = objectives.parse_function(self.f) if isinstance(self.f, str) else self.f
        spec = objectives.ObjectiveSpec(self.kind, func)
        report = objectives.solve_objective(
            self._instance(X), check_epsilon(self.eps).value, spec, check_mode(self.mode)
        )
        self.objective_ = report.value
        self.factor_ = report.factor
        return self._store(report.schedule)

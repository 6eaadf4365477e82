import numpy as np
import pytest
from sklearn.base import clone

from confsched import oracle
from confsched.estimators import EPTASScheduler, LPTScheduler, ObjectiveScheduler
from confsched.instance import Instance


def test_lpt_fit_predict():
    labels = LPTScheduler(n_machines=2).fit_predict([3, 3, 2, 2, 2])
    loads = [0, 0]
    for p, a in zip([3, 3, 2, 2, 2], labels):
        loads[a] += p
    assert max(loads) == 7


def test_eptas_attributes_and_params():
    est = EPTASScheduler(n_machines=2, eps="1/4")
    assert est.get_params() == {"n_machines": 2, "eps": "1/4", "mode": "paper", "max_nodes": 10**8}
    est.fit(np.array([3, 3, 2, 2, 2]))
    assert len(est.labels_) == 5
    assert est.makespan_ <= est.factor_ * 6
    assert est.lower_bound_ <= 6
    twin = clone(est).set_params(mode="oracle")
    assert twin.fit(np.array([[3], [3], [2], [2], [2]])).makespan_ <= twin.factor_ * 6


def test_objective_scheduler():
    est = ObjectiveScheduler(n_machines=2, kind="sum-min", f="power:2", eps="1/4")
    est.fit([2, 2, 2, 2])
    assert est.objective_ == 32
    value = oracle.opt_objective(Instance((3, 1, 1, 1), 2), "max-min", lambda v: v)[0]
    est = ObjectiveScheduler(n_machines=2, kind="max-min", f="identity").fit([3, 1, 1, 1])
    assert est.objective_ * est.factor_ >= value


@pytest.mark.parametrize("X", [[], [0, 1], [1.5, 2], [[1, 2], [3, 4]], ["a"]])
def test_rejects_bad_input(X):
    with pytest.raises(ValueError):
        LPTScheduler().fit(X)


@pytest.mark.parametrize("params", [{"n_machines": 0}, {"n_machines": 1.5}, {"eps": "2"}, {"mode": "fast"}])
def test_rejects_bad_params(params):
    with pytest.raises(ValueError):
        EPTASScheduler(**params).fit([1, 2, 3])


def test_float_integers_accepted():
    assert LPTScheduler(n_machines=1).fit([2.0, 3.0]).makespan_ == 5

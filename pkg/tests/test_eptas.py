import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from confsched import oracle
from confsched.conf_ip import ConfIP, check_feasible_solution
from confsched.eptas import (
    Epsilon,
    RoundedInstance,
    admissible_size_count,
    composed_bound,
    decide,
    decide_makespan,
    graham_list,
    min_machines_dp,
    reduce_small_jobs,
    round_scaled,
    rounded_capacity,
    scale_and_round,
    solve,
)
from confsched.exceptions import BudgetExceeded
from confsched.instance import Instance
from confsched.knapsack import KnapsackSpec


def test_epsilon_parse():
    assert Epsilon.parse("1/4") == Epsilon(4)
    assert Epsilon.parse("0.3") == Epsilon(4)  # snaps down to 1/4
    assert Epsilon(8).inverse_sq == 64 and Epsilon(8).value == Fraction(1, 8)
    with pytest.raises(ValueError):
        Epsilon.parse("0")
    with pytest.raises(ValueError):
        Epsilon(3).check_scheme_range()


def test_graham_examples():
    sched = graham_list(Instance((3, 3, 2, 2, 2), 2))
    assert sched.makespan == 7 and sorted(sched.loads) == [5, 7]
    assert graham_list(Instance((5,), 3)).makespan == 5
    assert graham_list(Instance((1, 1, 1, 1), 2)).makespan == 2


def test_reduce_small_jobs_example():
    inst = Instance((3, 3, 2, 2, 2), 2)
    red = reduce_small_jobs(inst, 6, Epsilon(2))
    assert red.big == (0, 1)
    assert red.placeholders == 2 and red.placeholder_size == 3
    assert red.sizes(inst) == [3, 3, 3, 3]


def test_reduce_small_jobs_boundaries():
    inst = Instance((5, 6), 2)
    red = reduce_small_jobs(inst, 6, Epsilon(4))
    assert red.placeholders == 0 and red.big == (0, 1)
    # small volume exactly eps*T gives one placeholder
    red = reduce_small_jobs(Instance((8, 1, 1), 1), 8, Epsilon(4))
    assert red.small == (1, 2) and red.placeholders == 1
    with pytest.raises(ValueError):
        reduce_small_jobs(inst, 5, Epsilon(4))


def test_round_scaled_examples():
    # 2 -> 1.5^2 = 2.25 -> 3
    assert round_scaled(Fraction(2), Epsilon(2)) == 3
    assert round_scaled(Fraction(8), Epsilon(1)) == 8
    assert round_scaled(Fraction(1), Epsilon(4)) == 1


def test_capacity():
    assert rounded_capacity(Epsilon(4)) == 36
    assert rounded_capacity(Epsilon(8)) == 104


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 60), min_size=1, max_size=15), st.integers(1, 4), st.sampled_from([4, 5, 8]))
def test_scale_and_round_properties(times, m, q):
    inst = Instance(tuple(times), m)
    eps = Epsilon(q)
    T = max(max(times), inst.lower_bound())
    red = reduce_small_jobs(inst, T, eps)
    r = scale_and_round(inst, red, T, eps)
    scale = Fraction(eps.inverse_sq, T)
    for size, members in zip(r.sizes, r.members):
        for j in members:
            p = red.placeholder_size if j is None else inst.processing_times[j]
            scaled = p * scale
            assert scaled <= size <= (1 + eps.value) * scaled + 1
            assert q <= size <= (1 + eps.value) * eps.inverse_sq + 1
    assert len(r.sizes) <= admissible_size_count(eps)
    assert sum(r.demand) == len(red.big) + red.placeholders


def test_admissible_size_count():
    # powers 1.25^k in [4, 20]: k = 7..13
    assert admissible_size_count(Epsilon(4)) == 7


def test_min_machines_examples():
    assert min_machines_dp((0, 0), 7, KnapsackSpec((2, 3), 7), 3) == 0
    assert min_machines_dp((2,), 3, KnapsackSpec((3,), 3), 3) == 2
    assert min_machines_dp((2, 1), 7, KnapsackSpec((2, 3), 7), 3) == 1
    assert min_machines_dp((2,), 3, KnapsackSpec((3,), 3), 1) is None


def test_decide_makespan_examples():
    assert decide_makespan(RoundedInstance((3,), (4,), 2, 6)) == {(2,): 2}
    assert decide_makespan(RoundedInstance((3,), (3,), 1, 6)) is None
    assert decide_makespan(RoundedInstance((3,), (4,), 2, 6), mode="oracle") == {(2,): 2}


rounded = st.integers(1, 3).flatmap(
    lambda d: st.tuples(
        st.lists(st.integers(1, 6), min_size=d, max_size=d, unique=True).map(lambda s: tuple(sorted(s))),
        st.lists(st.integers(0, 4), min_size=d, max_size=d).map(tuple),
        st.integers(1, 4),
        st.integers(6, 12),
    )
)


@settings(max_examples=200, deadline=None)
@given(rounded)
def test_decide_matches_oracle(args):
    sizes, demand, m, cap = args
    r = RoundedInstance(sizes, demand, m, cap)
    x = decide_makespan(r)
    truth = oracle.confip_feasible(ConfIP(KnapsackSpec(sizes, cap), demand, m))
    assert (x is None) == (truth is None)
    assert (decide_makespan(r, mode="oracle") is None) == (truth is None)
    if x is not None:
        assert check_feasible_solution(ConfIP(KnapsackSpec(sizes, cap), demand, m), x)


@settings(max_examples=100, deadline=None)
@given(rounded)
def test_decide_monotone_in_capacity(args):
    sizes, demand, m, cap = args
    if decide_makespan(RoundedInstance(sizes, demand, m, cap)) is not None:
        assert decide_makespan(RoundedInstance(sizes, demand, m, cap + 1)) is not None


def test_decision_budget():
    inst = Instance(tuple(range(9, 40, 2)), 4)
    with pytest.raises(BudgetExceeded):
        decide(inst, 100, Epsilon(8), vector_budget=3)


def test_solve_examples():
    inst = Instance((3, 3, 2, 2, 2), 2)
    report = solve(inst, Epsilon(4))
    assert report.makespan <= math.ceil(report.factor * 6)
    assert report.factor <= composed_bound(Epsilon(4))
    assert solve(Instance((17,), 1), Epsilon(4)).makespan == 17


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 40), min_size=1, max_size=12), st.integers(1, 4), st.sampled_from([4, 5, 8]))
def test_solve_within_factor(times, m, q):
    inst = Instance(tuple(times), m)
    opt = oracle.opt_makespan(inst)[0]
    for mode in ("paper", "oracle"):
        report = solve(inst, Epsilon(q), mode, max_nodes=10**6, vector_budget=10**5)
        assert Fraction(report.makespan, opt) <= report.factor <= composed_bound(Epsilon(q))
        # the lower end is only ever raised by an exact refutation
        assert report.search.low <= opt


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 40), min_size=2, max_size=12), st.integers(2, 4), st.sampled_from([4, 8]))
def test_decide_refutes_only_below_opt(times, m, q):
    # a "no" at T is a certificate that OPT > T; a "yes" schedule obeys the relaxed bound
    inst = Instance(tuple(times), m)
    opt = oracle.opt_makespan(inst)[0]
    eps = Epsilon(q)
    for T in range(max(times), opt + 3):
        sched = decide(inst, T, eps, "oracle")
        if T >= opt:
            assert sched is not None
        if sched is not None:
            assert sched.makespan <= (1 + 5 * eps.value) * T + eps.value * T

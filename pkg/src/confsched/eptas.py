"""(1+eps)-approximation for makespan on identical machines.

Pipeline: an LPT start value, a dual-approximation binary search over the
target makespan ``T``, and for each guess a decision procedure that

1. swaps small jobs (``p < eps*T``) for placeholders of size ``eps*T``,
2. scales so ``T = 1/eps^2`` and rounds every size up to a power of
   ``1 + eps`` and then to an integer,
3. decides whether the rounded jobs fit into ``m`` bins of capacity
   ``floor((1 + 5 eps) / eps^2)`` (guessing the complex-configuration part and
   the simple support, then solving the restricted IP exactly),
4. rebuilds a schedule and pours the small jobs back into placeholder room.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .conf_ip import ConfIP, support_bound, thin_support_bound
from .exceptions import BudgetExceeded
from .instance import Instance, Schedule
from .ip_solver import DEFAULT_MAX_NODES, RestrictedConfIP, solve_feasibility
from .knapsack import KnapsackSpec, enumerate_configurations, is_simple
from . import oracle

DEFAULT_VECTOR_BUDGET = 10**6
DEFAULT_STATE_CAP = 10**7
MODES = ("paper", "oracle")


@dataclass(frozen=True)
class Epsilon:
    """eps = 1/q, so 1/eps^2 = q^2 is an integer."""

    q: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("eps must be 1/q for a positive integer q")

    @classmethod
    def parse(cls, text) -> "Epsilon":
        """Accept ``"1/q"`` or any number in (0, 1]; other values snap down to 1/ceil(1/eps)."""
        value = Fraction(str(text).strip())
        if not 0 < value <= 1:
            raise ValueError(f"eps must lie in (0, 1], got {text}")
        return cls(math.ceil(1 / value))

    @property
    def value(self) -> Fraction:
        return Fraction(1, self.q)

    @property
    def inverse_sq(self) -> int:
        return self.q * self.q

    def check_scheme_range(self):
        if self.q < 4:
            raise ValueError(f"the scheme needs eps < 1/3; got eps = 1/{self.q}")

    def __str__(self):
        return f"1/{self.q}"


def graham_list(instance: Instance) -> Schedule:
    """LPT list scheduling: longest job first onto the least loaded machine."""
    loads = [0] * instance.m
    assignment = [0] * instance.n
    order = sorted(range(instance.n), key=lambda j: (-instance.processing_times[j], j))
    for j in order:
        i = min(range(instance.m), key=lambda k: (loads[k], k))
        loads[i] += instance.processing_times[j]
        assignment[j] = i
    return Schedule.from_assignment(instance, assignment)


# -- big/small reduction ----------------------------------------------------

@dataclass(frozen=True)
class ReducedInstance:
    """Big jobs plus placeholders standing in for the small ones."""

    big: tuple[int, ...]  # original job indices with p >= eps*T
    small: tuple[int, ...]
    placeholders: int
    placeholder_size: Fraction
    machines: int

    def sizes(self, instance: Instance):
        return [instance.processing_times[j] for j in self.big] + [self.placeholder_size] * self.placeholders


def reduce_small_jobs(instance: Instance, T: int, eps: Epsilon) -> ReducedInstance:
    if T < max(instance.processing_times):
        raise ValueError(f"guess T={T} is below the largest processing time")
    unit = eps.value * T
    big = tuple(j for j, p in enumerate(instance.processing_times) if p >= unit)
    small = tuple(j for j, p in enumerate(instance.processing_times) if p < unit)
    total_small = sum(instance.processing_times[j] for j in small)
    count = math.ceil(Fraction(total_small) / unit)
    return ReducedInstance(big, small, count, unit, instance.m)


# -- scaling and rounding ----------------------------------------------------

def round_up_power(x: Fraction, base: Fraction) -> Fraction:
    """Smallest base^k >= x over integers k >= 0 (x >= 1 assumed)."""
    x = Fraction(x)
    if x <= 1:
        return Fraction(1)
    k = max(0, math.floor(math.log(x) / math.log(base)) - 1)
    power = base**k
    while power < x:
        power *= base
    return power


@dataclass(frozen=True)
class RoundedInstance:
    sizes: tuple[int, ...]  # strictly increasing
    demand: tuple[int, ...]
    machines: int
    capacity: int
    # per size class, the reduced-instance members: job index, or None for a placeholder
    members: tuple[tuple, ...] = field(default=(), compare=False)

    @property
    def dimension(self):
        return len(self.sizes)

    def spec(self) -> KnapsackSpec:
        return KnapsackSpec(self.sizes, self.capacity)

    def with_capacity(self, capacity: int) -> "RoundedInstance":
        return RoundedInstance(self.sizes, self.demand, self.machines, capacity, self.members)


def rounded_capacity(eps: Epsilon) -> int:
    return math.floor((1 + 5 * eps.value) * eps.inverse_sq)


def scaled_size_range(eps: Epsilon):
    """[1/eps, (1+eps)/eps^2 + 1], where rounded sizes must land."""
    return Fraction(eps.q), (1 + eps.value) * eps.inverse_sq + 1


def admissible_size_count(eps: Epsilon) -> int:
    """Number of powers (1+eps)^k with 1/eps <= (1+eps)^k <= (1+eps)/eps^2."""
    base = 1 + eps.value
    lo, hi = Fraction(eps.q), (1 + eps.value) * eps.inverse_sq
    count, power = 0, Fraction(1)
    while power <= hi:
        if power >= lo:
            count += 1
        power *= base
    return count


def round_scaled(p_scaled: Fraction, eps: Epsilon) -> int:
    return math.ceil(round_up_power(p_scaled, 1 + eps.value))


def scale_and_round(instance: Instance, reduced: ReducedInstance, T: int, eps: Epsilon) -> RoundedInstance:
    scale = Fraction(eps.inverse_sq, T)
    classes: dict[int, list] = {}
    jobs = [(j, instance.processing_times[j]) for j in reduced.big]
    jobs += [(None, reduced.placeholder_size)] * reduced.placeholders
    for j, p in jobs:
        if not reduced.placeholder_size <= p <= T:
            raise ValueError(f"job size {p} outside [eps*T, T]")
        classes.setdefault(round_scaled(p * scale, eps), []).append(j)
    sizes = tuple(sorted(classes))
    return RoundedInstance(
        sizes=sizes,
        demand=tuple(len(classes[s]) for s in sizes),
        machines=reduced.machines,
        capacity=rounded_capacity(eps),
        members=tuple(tuple(classes[s]) for s in sizes),
    )


# -- the decision procedure --------------------------------------------------

def _vector_le(a, b):
    return all(x <= y for x, y in zip(a, b))


def _min_machines(bc, spec: KnapsackSpec, cap: int, state_cap=DEFAULT_STATE_CAP):
    """Layered reachability: fewest non-empty bins holding exactly ``bc``, with the bins."""
    zero = tuple(0 for _ in bc)
    if bc == zero:
        return 0, []
    box = 1
    for v in bc:
        box *= v + 1
    if box * (cap + 1) > state_cap:
        raise BudgetExceeded("min-machines state", state_cap)
    columns = [c for c in enumerate_configurations(spec, upper=bc) if any(c)]
    layer = {zero: None}
    parents = []
    for _ in range(cap):
        nxt = {}
        for z in layer:
            for c in columns:
                y = tuple(a + v for a, v in zip(z, c))
                if y in nxt or not _vector_le(y, bc):
                    continue
                nxt[y] = (z, c)
        parents.append(nxt)
        if bc in nxt:
            bins = []
            z = bc
            for level in reversed(parents):
                z, c = level[z]
                bins.append(c)
            return len(parents), bins
        layer = nxt
    return None


def min_machines_dp(bc, capacity: int, spec: KnapsackSpec, cap: int, state_cap=DEFAULT_STATE_CAP):
    """Fewest bins of ``capacity`` that hold exactly ``bc`` jobs, or ``None`` if more than ``cap``."""
    spec = KnapsackSpec(spec.sizes, capacity)
    found = _min_machines(tuple(bc), spec, cap, state_cap)
    return None if found is None else found[0]


def _complex_candidates(complex_configs, demand, cap, budget):
    """Demand vectors coverable by at most ``cap`` complex configurations, colex order."""
    zero = tuple(0 for _ in demand)
    seen = {zero}
    frontier = [zero]
    for _ in range(cap):
        nxt = []
        for z in frontier:
            for c in complex_configs:
                y = tuple(a + v for a, v in zip(z, c))
                if y in seen or not _vector_le(y, demand):
                    continue
                seen.add(y)
                nxt.append(y)
                if len(seen) > budget:
                    raise BudgetExceeded("complex-demand guess", budget)
        if not nxt:
            break
        frontier = nxt
    return sorted(seen, key=lambda v: v[::-1])


def support_guesses(simple_configs, limit, budget):
    """Maximal candidate supports: every ``limit``-subset of the simple configurations.

    A restricted IP that is feasible on a subset stays feasible on any
    superset, so only maximal subsets need trying.
    """
    n = len(simple_configs)
    if n <= limit:
        return [list(simple_configs)]
    if math.comb(n, limit) > budget:
        raise BudgetExceeded("support guess", budget)
    return [list(s) for s in combinations(simple_configs, limit)]


def _paper_decide(r: RoundedInstance, max_nodes, vector_budget, state_cap):
    spec = r.spec()
    ip = ConfIP(spec, r.demand, r.machines)
    if not ip.volume_feasible:
        return None
    d, cap_T = r.dimension, r.capacity
    configs = enumerate_configurations(spec, upper=r.demand)
    simple = [c for c in configs if is_simple(spec, c)]
    complex_ = [c for c in configs if not is_simple(spec, c)]
    mc_cap = min(r.machines, math.ceil(support_bound(d, cap_T)))
    job_cap = mc_cap * (cap_T // min(r.sizes))
    guesses = support_guesses(simple, math.ceil(thin_support_bound(d, cap_T)), vector_budget)
    for bc in _complex_candidates(complex_, r.demand, mc_cap, vector_budget):
        if sum(bc) > job_cap:
            continue
        found = _min_machines(bc, spec, mc_cap, state_cap)
        if found is None:
            continue
        mc, bins = found
        rest = ConfIP(spec, tuple(a - b for a, b in zip(r.demand, bc)), r.machines - mc)
        if rest.machines < 0 or not rest.volume_feasible:
            continue
        for allowed in guesses:
            x = solve_feasibility(RestrictedConfIP(rest, tuple(allowed)), max_nodes)
            if x is not None:
                for c in bins:
                    x[c] = x.get(c, 0) + 1
                return dict(sorted(x.items()))
    return None


def _oracle_decide(r: RoundedInstance, budget: oracle.OracleBudget):
    items = [s for s, b in zip(r.sizes, r.demand) for _ in range(b)]
    kinds = [k for k, b in enumerate(r.demand) for _ in range(b)]
    packing = oracle.bin_packing_feasible(items, r.machines, r.capacity, budget)
    if packing is None:
        return None
    bins = [[0] * r.dimension for _ in range(r.machines)]
    for k, i in zip(kinds, packing):
        bins[i][k] += 1
    x: dict = {}
    for row in bins:
        c = tuple(row)
        x[c] = x.get(c, 0) + 1
    return dict(sorted(x.items()))


def decide_makespan(
    r: RoundedInstance,
    mode="paper",
    max_nodes=DEFAULT_MAX_NODES,
    vector_budget=DEFAULT_VECTOR_BUDGET,
    state_cap=DEFAULT_STATE_CAP,
):
    """A packing of the rounded demand into ``m`` bins of ``r.capacity``, or ``None``.

    ``None`` means no such packing exists.  Budget overruns raise
    :class:`BudgetExceeded` instead of guessing.
    """
    if mode == "paper":
        return _paper_decide(r, max_nodes, vector_budget, state_cap)
    if mode == "oracle":
        return _oracle_decide(r, oracle.OracleBudget(max_states=state_cap, max_assignments=max_nodes))
    raise ValueError(f"unknown mode {mode!r}")


# -- reconstruction and the outer search --------------------------------------

def reconstruct(instance: Instance, reduced: ReducedInstance, r: RoundedInstance, x) -> Schedule:
    """Turn a configuration solution into a schedule of the original jobs."""
    pools = [list(members) for members in r.members]
    assignment = [None] * instance.n
    holders = []  # (machine, placeholder count)
    machine = 0
    for c, mult in sorted(x.items()):
        for _ in range(mult):
            slots = 0
            for k, count in enumerate(c):
                for _ in range(count):
                    j = pools[k].pop()
                    if j is None:
                        slots += 1
                    else:
                        assignment[j] = machine
            if slots:
                holders.append((machine, slots))
            machine += 1
    assert machine == instance.m and not any(pools), "solution does not cover the rounded demand"
    unit = reduced.placeholder_size
    smalls = sorted(reduced.small, key=lambda j: (-instance.processing_times[j], j))
    pos = 0
    for i, slots in holders:
        room = slots * unit
        filled = 0
        while pos < len(smalls) and filled < room:
            j = smalls[pos]
            assignment[j] = i
            filled += instance.processing_times[j]
            pos += 1
        assert filled < room + unit, "small-job refill overflowed its placeholder room"
    assert pos == len(smalls), "placeholders did not absorb every small job"
    return Schedule.from_assignment(instance, assignment)


def decide(instance: Instance, T: int, eps: Epsilon, mode="paper", **budgets):
    """A schedule of makespan at most (1+5eps)(1+eps)T, or ``None`` when OPT > T."""
    if T < max(instance.processing_times) or T * instance.m < instance.total:
        return None
    reduced = reduce_small_jobs(instance, T, eps)
    r = scale_and_round(instance, reduced, T, eps)
    x = decide_makespan(r, mode, **budgets)
    if x is None:
        return None
    schedule = reconstruct(instance, reduced, r, x)
    assert schedule.makespan <= (1 + 5 * eps.value) * T + eps.value * T
    return schedule


@dataclass
class DualSearchState:
    low: int
    high: int
    iterations: int = 0
    decisions: list = field(default_factory=list)


@dataclass
class SolveReport:
    schedule: Schedule
    search: DualSearchState
    eps: Epsilon
    factor: Fraction

    @property
    def makespan(self) -> int:
        return self.schedule.makespan


def composed_bound(eps: Epsilon) -> Fraction:
    """(1+eps)(1+5eps)(1+eps): search slack, rounding slack, small-job refill."""
    e = eps.value
    return (1 + e) * (1 + 5 * e) * (1 + e)


def solve(instance: Instance, eps: Epsilon, mode="paper", trace=None, **budgets) -> SolveReport:
    """Dual-approximation search; the reported factor bounds makespan / OPT.

    The factor is ``(high/low)(1+5eps)(1+eps)`` where ``low`` is certified
    (every guess below it was refuted exactly) and ``high`` is the guess whose
    schedule is returned.
    """
    eps.check_scheme_range()
    start = graham_list(instance)
    B = start.makespan
    state = DualSearchState(low=max(-(-B // 2), instance.lower_bound()), high=B)
    best = start
    while state.high - state.low > eps.value * state.low:
        mid = (state.low + state.high) // 2
        schedule = decide(instance, mid, eps, mode, **budgets)
        state.iterations += 1
        state.decisions.append((mid, schedule is not None))
        if trace is not None:
            trace(f"T={mid} verdict={'yes' if schedule is not None else 'no'}")
        if schedule is None:
            state.low = mid + 1
        else:
            state.high = mid
            # any schedule is a valid answer; keep the shorter one
            if schedule.makespan < best.makespan:
                best = schedule
    e = eps.value
    factor = Fraction(state.high, state.low) * (1 + 5 * e) * (1 + e)
    if trace is not None:
        trace(f"done low={state.low} high={state.high} makespan={best.makespan} factor={factor}")
    return SolveReport(best, state, eps, factor)

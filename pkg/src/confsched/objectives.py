"""Approximation scheme for load-based objectives on identical machines.

Supported objectives over machine loads l_i and a per-machine function f:

* ``sum-min``  minimise sum f(l_i)    (f convex)
* ``min-max``  minimise max f(l_i)    (f convex)
* ``sum-max``  maximise sum f(l_i)    (f concave)
* ``max-min``  maximise min f(l_i)    (f concave)

Pipeline: jobs at least as long as the average load get a machine of their
own; the rest are rounded to integer multiples of ``u = L/lambda^2`` (small
jobs merged into composites first); then either the cost configuration IP is
solved by guessing its complex part (``mode="paper"``) or the rounded instance
is solved exactly by the oracle (``mode="oracle"``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import oracle
from .conf_ip import ConfIP, is_thin, make_thin, support_bound, thin_support_bound
from .eptas import Epsilon, _complex_candidates, round_up_power, support_guesses
from .exceptions import BudgetExceeded, InfeasibleError
from .instance import Instance, Schedule
from .ip_solver import DEFAULT_MAX_NODES, RestrictedConfIP, solve_min_cost
from .knapsack import KnapsackSpec, enumerate_configurations, is_simple

KINDS = ("sum-min", "min-max", "sum-max", "max-min")
MINIMISING = ("sum-min", "min-max")
DEFAULT_CONFIG_CAP = 10**6


# -- load functions -----------------------------------------------------------

@dataclass(frozen=True)
class Power:
    """f(x) = x^p, convex for p >= 1."""

    p: int

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("power must be >= 1")

    def __call__(self, x):
        return Fraction(x) ** self.p

    @property
    def convex(self):
        return True

    @property
    def concave(self):
        return self.p == 1

    def raw_delta(self, eps: Fraction) -> Fraction:
        # (1 + eps/(3p))^p <= e^(eps/3) <= 1 + eps for eps <= 1
        return Fraction(eps) / (3 * self.p)

    @property
    def gamma(self):
        return 3 * self.p + 1

    def __str__(self):
        return f"power:{self.p}"


@dataclass(frozen=True)
class Identity:
    """f(x) = x, both convex and concave."""

    def __call__(self, x):
        return Fraction(x)

    convex = True
    concave = True

    def raw_delta(self, eps: Fraction) -> Fraction:
        return Fraction(eps)

    @property
    def gamma(self):
        return 2

    def __str__(self):
        return "identity"


@dataclass(frozen=True)
class CustomFunction:
    """User-supplied monotone f with its own delta rule (no guarantees checked)."""

    func: Callable
    delta_rule: Callable
    convex: bool = True
    concave: bool = False
    gamma: int = 1
    name: str = "custom"

    def __call__(self, x):
        return self.func(Fraction(x))

    def raw_delta(self, eps):
        return Fraction(self.delta_rule(Fraction(eps)))

    def __str__(self):
        return self.name


def parse_function(text: str):
    text = text.strip()
    if text == "identity":
        return Identity()
    if text.startswith("power:"):
        return Power(int(text.split(":", 1)[1]))
    raise ValueError(f"unknown load function {text!r}; use power:p or identity")


@dataclass(frozen=True)
class ObjectiveSpec:
    kind: str
    f: object

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown objective kind {self.kind!r}")
        if self.kind in MINIMISING and not self.f.convex:
            raise ValueError(f"{self.kind} needs a convex f")
        if self.kind not in MINIMISING and not self.f.concave:
            raise ValueError(f"{self.kind} needs a concave f, got {self.f}")

    @property
    def maximise(self):
        return self.kind not in MINIMISING

    def value(self, loads):
        return oracle.aggregate(self.kind, [self.f(v) for v in loads])


def delta_for(f, eps) -> Fraction:
    """delta with |l' - l| <= delta*l  =>  |f(l') - f(l)| <= eps*f(l), snapped to 1/integer."""
    eps = Fraction(eps)
    if not 0 < eps <= Fraction(1, 4):
        raise ValueError(f"eps must lie in (0, 1/4], got {eps}")
    raw = f.raw_delta(eps)
    return Fraction(1, math.ceil(1 / raw))


# -- preprocessing and rounding ---------------------------------------------------

def preprocess_large(instance: Instance):
    """Give every job with p_j >= current average load its own machine.

    Returns ``(remaining job indices, remaining machines, singleton jobs)``;
    the singletons are listed in removal order.
    """
    p = instance.processing_times
    remaining = sorted(range(instance.n), key=lambda j: (-p[j], j))
    machines = instance.m
    total = instance.total
    singles = []
    while remaining:
        if machines == 0:
            raise InfeasibleError("jobs remain but every machine holds a singleton")
        j = remaining[0]
        if p[j] * machines < total:
            break
        singles.append(j)
        remaining.pop(0)
        machines -= 1
        total -= p[j]
    return sorted(remaining), machines, singles


@dataclass(frozen=True)
class GeneralRoundedInstance:
    """Rounded jobs in integer units of ``unit = L/lambda^2``."""

    average: Fraction  # L
    lam: int
    sizes: tuple[int, ...]
    demand: tuple[int, ...]
    machines: int
    # per size class, one tuple of original job indices per rounded item
    members: tuple = field(default=(), compare=False)

    @property
    def unit(self) -> Fraction:
        return self.average / (self.lam * self.lam)

    @property
    def capacity(self) -> int:
        return 4 * self.lam * self.lam

    @property
    def dimension(self):
        return len(self.sizes)

    @property
    def rounded_average(self) -> Fraction:
        """L' = (rounded total) / m in original units."""
        units = sum(s * b for s, b in zip(self.sizes, self.demand))
        return units * self.unit / self.machines

    def spec(self) -> KnapsackSpec:
        return KnapsackSpec(self.sizes, self.capacity)

    def load_class(self, c):
        """l with load = lambda + l (in units), ``None`` for the empty configuration."""
        load = sum(s * v for s, v in zip(self.sizes, c))
        return None if load == 0 else load - self.lam


def round_size(units: Fraction, delta: Fraction) -> int:
    """Round up to a power of (1+delta), then up to an integer number of units."""
    return math.ceil(round_up_power(units, 1 + delta))


def round_general(instance: Instance, delta, jobs=None, machines=None) -> GeneralRoundedInstance:
    """Round ``jobs`` (default: all) on ``machines`` (default: m).

    Jobs shorter than L/lambda are merged, longest first, into composites of
    total at least L/lambda; a leftover group joins the last composite (or the
    shortest large job when there is none).  Every item then has at least
    lambda units, which keeps each rounded item within (1 + 2/lambda) of its
    true size and hence L <= L' <= (1 + 2/lambda) L.
    """
    delta = Fraction(delta)
    jobs = list(range(instance.n)) if jobs is None else list(jobs)
    m = instance.m if machines is None else machines
    p = instance.processing_times
    if m < 1 or not jobs:
        raise ValueError("rounding needs at least one job and one machine")
    total = sum(p[j] for j in jobs)
    average = Fraction(total, m)
    if any(p[j] >= average for j in jobs):
        raise ValueError("jobs at least as long as the average load must be removed first")
    lam = math.ceil(1 / delta)
    threshold = average / lam
    large = [j for j in jobs if p[j] >= threshold]
    small = sorted((j for j in jobs if p[j] < threshold), key=lambda j: (-p[j], j))
    items = [[j] for j in large]
    composites, group, acc = [], [], 0
    for j in small:
        group.append(j)
        acc += p[j]
        if acc >= threshold:
            composites.append(group)
            group, acc = [], 0
    if group:
        if composites:
            composites[-1].extend(group)
        else:
            host = min(items, key=lambda it: (p[it[0]], it[0]))
            host.extend(group)
    items.extend(composites)
    unit = average / (lam * lam)
    classes: dict[int, list] = {}
    for it in items:
        size = round_size(sum(p[j] for j in it) / unit, delta)
        classes.setdefault(size, []).append(tuple(it))
    sizes = tuple(sorted(classes))
    r = GeneralRoundedInstance(
        average=average,
        lam=lam,
        sizes=sizes,
        demand=tuple(len(classes[s]) for s in sizes),
        machines=m,
        members=tuple(tuple(classes[s]) for s in sizes),
    )
    assert average <= r.rounded_average <= (1 + Fraction(2, lam)) * average
    assert max(sizes) <= r.capacity
    return r


# -- costs -----------------------------------------------------------------

@dataclass(frozen=True)
class CostTable:
    """f-bar_c = ceil(f(load_c) / (eps * f_min)), stored per load in units."""

    by_load: dict
    f_min: Fraction
    f_max: Fraction
    eps: Fraction

    def cost(self, r: GeneralRoundedInstance, c) -> int:
        return self.by_load[sum(s * v for s, v in zip(r.sizes, c))]

    @property
    def max_cost(self) -> int:
        return max(self.by_load.values())

    @property
    def cost_bound(self) -> int:
        return math.ceil(self.f_max / (self.eps * self.f_min))


def build_cost_table(r: GeneralRoundedInstance, spec: ObjectiveSpec, eps, configs=None, cap=DEFAULT_CONFIG_CAP):
    """Costs for every configuration of ``r`` (``configs`` defaults to Q restricted to the demand).

    The empty configuration costs 0; every other cost is at least 1.
    """
    eps = Fraction(eps)
    if configs is None:
        configs = enumerate_configurations(r.spec(), cap, upper=r.demand)
    loads = sorted({sum(s * v for s, v in zip(r.sizes, c)) for c in configs})
    values = {w: spec.f(w * r.unit) for w in loads if w > 0}
    if not values:
        return CostTable({0: 0}, Fraction(0), Fraction(0), eps)
    f_min, f_max = min(values.values()), max(values.values())
    if f_min <= 0:
        raise ValueError("f must be positive on positive loads")
    table = {w: math.ceil(v / (eps * f_min)) for w, v in values.items()}
    if 0 in loads:
        table[0] = 0
    return CostTable(table, f_min, f_max, eps)


def solution_cost(r, table: CostTable, x) -> int:
    return sum(v * table.cost(r, c) for c, v in x.items())


def thin_gen(r: GeneralRoundedInstance, x, **kw):
    """Make each load class of ``x`` thin on its own; total cost is unchanged.

    Costs depend only on the load of a configuration, and both the splits and
    the exchanges of :func:`make_thin` keep every configuration in its load
    class, so the multiplicity per class (and with it the cost) is preserved.
    """
    spec = r.spec()
    ConfIP(spec, r.demand, r.machines)  # validates shape
    out: dict = {}
    for cls, part in sorted(split_by_load_class(r, x).items(), key=lambda kv: (kv[0] is not None, kv[0] or 0)):
        sub = class_ip(r, part)
        thin = make_thin(sub, part, **kw) if cls is not None else dict(part)
        for c, v in thin.items():
            out[c] = out.get(c, 0) + v
    return dict(sorted(out.items()))


def split_by_load_class(r: GeneralRoundedInstance, x):
    parts: dict = {}
    for c, v in x.items():
        parts.setdefault(r.load_class(c), {})[c] = v
    return parts


def class_ip(r: GeneralRoundedInstance, part) -> ConfIP:
    spec = r.spec()
    demand = [0] * r.dimension
    for c, v in part.items():
        for k, ck in enumerate(c):
            demand[k] += v * ck
    return ConfIP(spec, tuple(demand), sum(part.values()))


def class_thin(r: GeneralRoundedInstance, x) -> bool:
    """Every non-empty load class of ``x`` is thin for its own IP."""
    return all(
        is_thin(class_ip(r, part), part)
        for cls, part in split_by_load_class(r, x).items()
        if cls is not None
    )


# -- the cost configuration IP ------------------------------------------------

def _complex_part_dp(bc, complex_configs, cost, cap, state_cap):
    """Per machine count l <= cap: cheapest multiset of l complex configurations summing to bc."""
    zero = tuple(0 for _ in bc)
    box = 1
    for v in bc:
        box *= v + 1
    if box * (cap + 1) > state_cap:
        raise BudgetExceeded("complex-part state", state_cap)
    out = {0: (0, [])} if bc == zero else {}
    if bc == zero:
        return out
    columns = [c for c in complex_configs if all(a <= b for a, b in zip(c, bc))]
    layer = {zero: (0, [])}
    for ell in range(1, cap + 1):
        nxt: dict = {}
        for z, (val, used) in layer.items():
            for c in columns:
                y = tuple(a + v for a, v in zip(z, c))
                if any(a > b for a, b in zip(y, bc)):
                    continue
                cand = val + cost[c]
                if y not in nxt or cand < nxt[y][0]:
                    nxt[y] = (cand, used + [c])
        if not nxt:
            break
        if bc in nxt:
            out[ell] = nxt[bc]
        layer = nxt
    return out


def solve_cost_ip(r: GeneralRoundedInstance, allowed, cost, max_nodes=DEFAULT_MAX_NODES,
                  vector_budget=10**6, state_cap=10**7):
    """Cheapest solution over ``allowed`` by guessing the complex part.

    Guesses the complex demand ``b^c`` and machine count ``m^c``, prices the
    complex part exactly by a table over (machines, demand), and solves the
    simple remainder with :func:`solve_min_cost` over a guessed support.
    Returns ``(x, cost)`` or ``None``.
    """
    spec = r.spec()
    simple = [c for c in allowed if is_simple(spec, c)]
    complex_ = [c for c in allowed if not is_simple(spec, c)]
    d, cap_T = r.dimension, r.capacity
    classes = 4 * r.lam * r.lam - r.lam + 1
    mc_cap = min(r.machines, classes * math.ceil(support_bound(d, cap_T)))
    guesses = support_guesses(simple, classes * math.ceil(thin_support_bound(d, cap_T)), vector_budget)
    best = None
    for bc in _complex_candidates(complex_, r.demand, mc_cap, vector_budget):
        parts = _complex_part_dp(bc, complex_, cost, mc_cap, state_cap)
        for mc, (ccost, used) in sorted(parts.items()):
            rest = ConfIP(spec, tuple(a - b for a, b in zip(r.demand, bc)), r.machines - mc)
            if rest.machines < 0 or not rest.volume_feasible:
                continue
            for support_set in guesses:
                found = solve_min_cost(RestrictedConfIP(rest, tuple(support_set), cost), max_nodes)
                if found is None:
                    continue
                x, scost = found
                total = ccost + scost
                if best is None or total < best[1]:
                    for c in used:
                        x[c] = x.get(c, 0) + 1
                    best = (dict(sorted(x.items())), total)
                    if total == 0:
                        return best
    return best


def _paper_rounded(r, ospec: ObjectiveSpec, eps, budgets):
    configs = enumerate_configurations(r.spec(), budgets.get("config_cap", DEFAULT_CONFIG_CAP), upper=r.demand)
    table = build_cost_table(r, ospec, eps, configs)
    cost = {c: table.cost(r, c) for c in configs}
    ip_kw = {k: v for k, v in budgets.items() if k in ("max_nodes", "vector_budget", "state_cap")}
    if ospec.kind == "sum-min":
        found = solve_cost_ip(r, configs, cost, **ip_kw)
    elif ospec.kind == "sum-max":
        top = max(cost.values())
        found = solve_cost_ip(r, configs, {c: top - v for c, v in cost.items()}, **ip_kw)
    else:
        found = _bottleneck(r, configs, cost, ospec.kind, ip_kw)
    if found is None:
        raise InfeasibleError("rounded instance has no packing")
    return found[0]


def _bottleneck(r, configs, cost, kind, ip_kw):
    """Binary search over cost thresholds; feasibility with zero costs at each."""
    levels = sorted(set(cost.values()))
    if kind == "max-min":
        levels.reverse()
    zero = {c: 0 for c in configs}

    def attempt(t):
        if kind == "min-max":
            allowed = [c for c in configs if cost[c] <= t]
        else:
            allowed = [c for c in configs if cost[c] >= t]
        return solve_cost_ip(r, allowed, zero, **ip_kw)

    # levels are ordered from most to least demanding; feasibility is monotone along them
    lo, hi = 0, len(levels) - 1
    best = attempt(levels[hi])
    if best is None:
        return None
    while lo < hi:
        mid = (lo + hi) // 2
        found = attempt(levels[mid])
        if found is not None:
            best, hi = found, mid
        else:
            lo = mid + 1
    return best


def _oracle_rounded(r, ospec: ObjectiveSpec, budgets):
    items = [s for s, b in zip(r.sizes, r.demand) for _ in range(b)]
    unit = r.unit
    inst = Instance(tuple(items), r.machines)
    budget = oracle.OracleBudget(max_states=budgets.get("state_cap", 10**7))
    _, sched = oracle.opt_objective(inst, ospec.kind, lambda w: ospec.f(w * unit), budget)
    kinds = [k for k, b in enumerate(r.demand) for _ in range(b)]
    bins = [[0] * r.dimension for _ in range(r.machines)]
    for k, i in zip(kinds, sched.assignment):
        bins[i][k] += 1
    x: dict = {}
    for row in bins:
        x[tuple(row)] = x.get(tuple(row), 0) + 1
    return dict(sorted(x.items()))


@dataclass
class ObjectiveReport:
    schedule: Schedule
    value: Fraction
    factor: Fraction
    kind: str
    delta: Fraction
    rounded: GeneralRoundedInstance | None
    singletons: tuple


def composed_factor(eps) -> Fraction:
    """(1+eps)^3: rounding of the instance, rounding of loads through f, cost scaling."""
    return (1 + Fraction(eps)) ** 3


def _assign(r: GeneralRoundedInstance, x, jobs_assignment):
    pools = [list(m) for m in r.members]
    machine = 0
    for c, mult in sorted(x.items()):
        for _ in range(mult):
            for k, count in enumerate(c):
                for _ in range(count):
                    for j in pools[k].pop():
                        jobs_assignment[j] = machine
            machine += 1
    assert machine == r.machines and not any(pools)


def solve_objective(instance: Instance, eps, ospec: ObjectiveSpec, mode="paper", **budgets) -> ObjectiveReport:
    """Schedule within the reported factor of the optimum for ``ospec``.

    Minimisation kinds satisfy value <= factor * OPT, maximisation kinds
    value >= OPT / factor.
    """
    if isinstance(eps, Epsilon):
        eps = eps.value
    eps = Fraction(eps)
    delta = delta_for(ospec.f, eps)
    remaining, machines, singles = preprocess_large(instance)
    assignment = [None] * instance.n
    for offset, j in enumerate(singles):
        assignment[j] = machines + offset
    r = None
    if remaining:
        r = round_general(instance, delta, remaining, machines)
        if mode == "paper":
            x = _paper_rounded(r, ospec, eps, budgets)
        elif mode == "oracle":
            x = _oracle_rounded(r, ospec, budgets)
        else:
            raise ValueError(f"unknown mode {mode!r}")
        _assign(r, x, assignment)
    schedule = Schedule.from_assignment(instance, assignment)
    return ObjectiveReport(
        schedule=schedule,
        value=ospec.value(schedule.loads),
        factor=composed_factor(eps),
        kind=ospec.kind,
        delta=delta,
        rounded=r,
        singletons=tuple(singles),
    )

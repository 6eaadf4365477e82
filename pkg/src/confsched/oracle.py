"""Brute-force ground truth used to check everything else.

Nothing in here shares code with the solvers it is meant to validate: the
makespan and objective optima come from assignment searches over sorted load
vectors, and conf-IP feasibility from a layered reachability table over
demand vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exceptions import BudgetExceeded
from .instance import Instance, Schedule
from .knapsack import iter_configurations


@dataclass(frozen=True)
class OracleBudget:
    max_states: int = 10**7
    max_assignments: int = 10**8

    def __post_init__(self):
        if self.max_states < 1 or self.max_assignments < 1:
            raise ValueError("budgets must be positive")


DEFAULT_BUDGET = OracleBudget()


def _lpt_upper(times, m):
    loads = [0] * m
    for p in sorted(times, reverse=True):
        i = loads.index(min(loads))
        loads[i] += p
    return max(loads)


def opt_makespan(instance: Instance, budget: OracleBudget = DEFAULT_BUDGET):
    """Exact minimum makespan and a witness schedule."""
    p = instance.processing_times
    m = instance.m
    order = sorted(range(instance.n), key=lambda j: -p[j])
    sizes = [p[j] for j in order]
    best = _lpt_upper(sizes, m) + 1
    target_floor = instance.lower_bound()
    best_assign = None
    visited = set()
    counter = [0]
    assign = [0] * len(sizes)

    # loads[i] is the load of machine i; symmetric machines (equal loads) are tried once
    def dfs(j, loads):
        nonlocal best, best_assign
        counter[0] += 1
        if counter[0] > budget.max_assignments:
            raise BudgetExceeded("oracle assignment", budget.max_assignments)
        if j == len(sizes):
            value = max(loads)
            if value < best:
                best = value
                best_assign = list(assign)
            return
        key = (j, tuple(sorted(loads)))
        if key in visited:
            return
        if len(visited) < budget.max_states:
            visited.add(key)
        tried = set()
        for i in range(m):
            if loads[i] in tried or loads[i] + sizes[j] >= best:
                continue
            tried.add(loads[i])
            loads[i] += sizes[j]
            assign[j] = i
            dfs(j + 1, loads)
            loads[i] -= sizes[j]
            if best == target_floor:
                return

    dfs(0, [0] * m)
    if best_assign is None:
        # LPT was already optimal; rebuild its schedule
        loads = [0] * m
        best_assign = []
        for s in sizes:
            i = loads.index(min(loads))
            loads[i] += s
            best_assign.append(i)
        best = max(loads)
    assignment = [0] * instance.n
    for pos, j in enumerate(order):
        assignment[j] = best_assign[pos]
    return best, Schedule.from_assignment(instance, assignment)


def bin_packing_feasible(sizes, bins: int, capacity: int, budget: OracleBudget = DEFAULT_BUDGET):
    """Exact decision: can ``sizes`` be packed into ``bins`` bins of ``capacity``?

    Returns a bin index per item (in input order) or ``None``.
    """
    if bins == 0:
        return [] if not sizes else None
    order = sorted(range(len(sizes)), key=lambda j: -sizes[j])
    items = [sizes[j] for j in order]
    if sum(items) > bins * capacity or (items and items[0] > capacity):
        return None
    failed = set()
    counter = [0]
    assign = [0] * len(items)

    def dfs(j, loads):
        counter[0] += 1
        if counter[0] > budget.max_assignments:
            raise BudgetExceeded("oracle assignment", budget.max_assignments)
        if j == len(items):
            return True
        key = (j, tuple(sorted(loads)))
        if key in failed:
            return False
        tried = set()
        for i in range(bins):
            if loads[i] in tried or loads[i] + items[j] > capacity:
                continue
            tried.add(loads[i])
            loads[i] += items[j]
            assign[j] = i
            if dfs(j + 1, loads):
                return True
            loads[i] -= items[j]
        if len(failed) < budget.max_states:
            failed.add(key)
        return False

    if not dfs(0, [0] * bins):
        return None
    out = [0] * len(items)
    for pos, j in enumerate(order):
        out[j] = assign[pos]
    return out


def confip_feasible(ip, budget: OracleBudget = DEFAULT_BUDGET):
    """Exact conf-IP feasibility with a witness, by layered reachability.

    Layer ``l`` holds every demand vector ``z <= b`` coverable by exactly
    ``l`` configurations (the zero configuration included).
    """
    b = ip.demand
    m = ip.machines
    states = m + 1
    for v in b:
        states *= v + 1
    if states > budget.max_states:
        raise BudgetExceeded("oracle state", budget.max_states)
    if not ip.volume_feasible:
        return None
    if m == 0:
        return {} if not any(b) else None
    columns = list(iter_configurations(ip.spec, upper=b))
    zero = tuple(0 for _ in b)
    layer = {zero: None}
    parents = []
    for _ in range(m):
        nxt = {}
        for z in layer:
            for c in columns:
                y = tuple(a + v for a, v in zip(z, c))
                if y in nxt or any(a > v for a, v in zip(y, b)):
                    continue
                nxt[y] = (z, c)
        parents.append(nxt)
        layer = nxt
    if b not in layer:
        return None
    x: dict = {}
    z = b
    for level in reversed(parents):
        prev, c = level[z]
        x[c] = x.get(c, 0) + 1
        z = prev
    return dict(sorted(x.items()))


# -- general objectives ----------------------------------------------------

def aggregate(kind: str, values):
    if kind in ("sum-min", "sum-max"):
        return sum(values)
    if kind == "min-max":
        return max(values)
    if kind == "max-min":
        return min(values)
    raise ValueError(f"unknown objective kind {kind!r}")


def is_maximization(kind: str) -> bool:
    return kind in ("sum-max", "max-min")


def opt_objective(instance: Instance, kind: str, f, budget: OracleBudget = DEFAULT_BUDGET):
    """Exact optimum of ``kind`` over machine loads under per-machine ``f``.

    ``f`` maps an integer load to an exact number.  Search state is the sorted
    load vector after each job (jobs in descending size order).
    """
    p = instance.processing_times
    m = instance.m
    order = sorted(range(instance.n), key=lambda j: -p[j])
    layer = {tuple([0] * m): None}
    history = []
    for j in order:
        nxt = {}
        for loads in layer:
            seen = set()
            for i in range(m):
                if loads[i] in seen:
                    continue
                seen.add(loads[i])
                new = list(loads)
                new[i] += p[j]
                key = tuple(sorted(new))
                if key not in nxt:
                    nxt[key] = (loads, i)
        if len(nxt) > budget.max_states:
            raise BudgetExceeded("oracle state", budget.max_states)
        history.append(nxt)
        layer = nxt
    better = (lambda a, b: a > b) if is_maximization(kind) else (lambda a, b: a < b)
    best_key, best_val = None, None
    for loads in layer:
        val = aggregate(kind, [f(v) for v in loads])
        if best_val is None or better(val, best_val):
            best_key, best_val = loads, val
    # walk back: map each sorted state to concrete machine indices
    path = []
    key = best_key
    for nxt in reversed(history):
        prev, i = nxt[key]
        path.append((prev, i))
        key = prev
    path.reverse()
    assignment = [0] * instance.n
    # perm[k] = machine id currently sitting at sorted position k
    perm = list(range(m))
    for (prev, i), j in zip(path, order):
        assignment[j] = perm[i]
        new = list(prev)
        new[i] += p[j]
        ranked = sorted(range(m), key=lambda k: (new[k], k))
        perm = [perm[k] for k in ranked]
    return best_val, Schedule.from_assignment(instance, assignment)

"""Exact depth-first solver for a configuration IP over a given set of columns.

Configurations are sorted by descending weight.  Each search node picks the
next configuration to use (latest first) and its multiplicity (smallest
first), so the recursion depth is at most the machine count and the first
solution found (and, for the cost version, the first optimal one) is the
lexicographically smallest multiplicity vector under that order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .conf_ip import ConfIP
from .exceptions import BudgetExceeded

DEFAULT_MAX_NODES = 10**8
MEMO_LIMIT = 10**6


@dataclass(frozen=True)
class RestrictedConfIP:
    ip: ConfIP
    allowed: tuple
    cost: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        allowed = tuple(dict.fromkeys(tuple(c) for c in self.allowed))
        object.__setattr__(self, "allowed", allowed)
        for c in allowed:
            self.ip.spec.check(c)
        if self.cost is not None:
            missing = [c for c in allowed if c not in self.cost]
            if missing:
                raise ValueError(f"no cost for {missing[0]}")


class _Search:
    def __init__(self, r: RestrictedConfIP, max_nodes):
        spec = r.ip.spec
        self.sizes = spec.sizes
        order = sorted(range(len(r.allowed)), key=lambda i: -spec.weight(r.allowed[i]))
        self.configs = [r.allowed[i] for i in order]
        self.weights = [spec.weight(c) for c in self.configs]
        self.costs = [r.cost[c] for c in self.configs] if r.cost is not None else None
        d = spec.dimension
        n = len(self.configs)
        # suffix maxima of c_k, for the per-size coverage test
        self.suffix_max = [[0] * d for _ in range(n + 1)]
        for i in range(n - 1, -1, -1):
            c = self.configs[i]
            prev = self.suffix_max[i + 1]
            self.suffix_max[i] = [max(prev[k], c[k]) for k in range(d)]
        self.position = {c: i for i, c in enumerate(self.configs)}
        # only the feasibility search may fill idle machines with the empty configuration directly
        self.zero = self.position.get(tuple([0] * d)) if r.cost is None else None
        if self.costs is not None:
            self.suffix_min_cost = [0] * (n + 1)
            best = None
            for i in range(n - 1, -1, -1):
                best = self.costs[i] if best is None else min(best, self.costs[i])
                self.suffix_min_cost[i] = best
        self.max_nodes = max_nodes
        self.nodes = 0
        self.memo = {}

    def tick(self):
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise BudgetExceeded("solver node", self.max_nodes)

    def hopeless(self, i, rem_b, rem_m):
        if i >= len(self.configs):
            return True
        if self.weights[i] * rem_m < sum(s * v for s, v in zip(self.sizes, rem_b)):
            return True
        caps = self.suffix_max[i]
        return any(v > rem_m * caps[k] for k, v in enumerate(rem_b))

    def remember(self, key, value):
        if len(self.memo) < MEMO_LIMIT:
            self.memo[key] = value

    def _moves(self, i, rem_b, rem_m):
        """(j, t, remaining demand) for every next configuration j >= i used t >= 1 times.

        Later configurations come first and smaller t first, which walks the
        multiplicity vectors in increasing lexicographic order.
        """
        for j in range(len(self.configs) - 1, i - 1, -1):
            c = self.configs[j]
            nb = rem_b
            for t in range(1, rem_m + 1):
                nb = tuple(b - ck for b, ck in zip(nb, c))
                if any(v < 0 for v in nb):
                    break
                yield j, t, nb

    # -- feasibility --------------------------------------------------------
    def feasible(self, i, rem_b, rem_m):
        """Multiplicities for configs[i:], or None."""
        self.tick()
        if not any(rem_b) and self.zero is not None and self.zero >= i:
            return {self.configs[self.zero]: rem_m} if rem_m else {}
        if rem_m == 0:
            return {} if not any(rem_b) else None
        if rem_m == 1:
            j = self.position.get(rem_b)
            return {rem_b: 1} if j is not None and j >= i else None
        key = (i, rem_b, rem_m)
        if key in self.memo:
            return None
        if self.hopeless(i, rem_b, rem_m):
            self.remember(key, None)
            return None
        for j, t, nb in self._moves(i, rem_b, rem_m):
            sub = self.feasible(j + 1, nb, rem_m - t)
            if sub is not None:
                sub[self.configs[j]] = t
                return sub
        self.remember(key, None)
        return None

    # -- minimum cost -------------------------------------------------------
    def cheapest(self, i, rem_b, rem_m):
        """(cost, multiplicities) for configs[i:], or None."""
        self.tick()
        if rem_m == 0:
            return (0, {}) if not any(rem_b) else None
        if rem_m == 1:
            j = self.position.get(rem_b)
            return (self.costs[j], {rem_b: 1}) if j is not None and j >= i else None
        key = (i, rem_b, rem_m)
        if key in self.memo:
            return self.memo[key]
        if self.hopeless(i, rem_b, rem_m):
            self.remember(key, None)
            return None
        best = None
        for j, t, nb in self._moves(i, rem_b, rem_m):
            rest = rem_m - t
            here = t * self.costs[j]
            if best is not None:
                # every remaining machine costs at least the cheapest later column
                lower = self.suffix_min_cost[j + 1] if rest and j + 1 < len(self.configs) else 0
                if here + rest * lower >= best[0]:
                    continue
            sub = self.cheapest(j + 1, nb, rest)
            if sub is None:
                continue
            total = here + sub[0]
            if best is None or total < best[0]:
                sol = dict(sub[1])
                sol[self.configs[j]] = t
                best = (total, sol)
        self.remember(key, best)
        return best


def solve_feasibility(r: RestrictedConfIP, max_nodes=DEFAULT_MAX_NODES):
    """A solution supported on ``r.allowed``, or ``None`` if none exists."""
    ip = r.ip
    if not ip.volume_feasible:
        return None
    if ip.machines == 0:
        return {} if not any(ip.demand) else None
    search = _Search(r, max_nodes)
    sol = search.feasible(0, ip.demand, ip.machines)
    return None if sol is None else dict(sorted(sol.items()))


def solve_min_cost(r: RestrictedConfIP, max_nodes=DEFAULT_MAX_NODES):
    """``(solution, total_cost)`` minimising the cost over ``r.allowed``, or ``None``."""
    if r.cost is None:
        raise ValueError("solve_min_cost needs a cost map")
    ip = r.ip
    if not ip.volume_feasible:
        return None
    if ip.machines == 0:
        return ({}, 0) if not any(ip.demand) else None
    search = _Search(r, max_nodes)
    best = search.cheapest(0, ip.demand, ip.machines)
    if best is None:
        return None
    return dict(sorted(best[1].items())), best[0]

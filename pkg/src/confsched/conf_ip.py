"""The configuration IP and its sparse-solution transformations.

A :class:`ConfIP` asks for multiplicities ``x_c`` over configurations with

    sum_c x_c * c = demand,   sum_c x_c = machines.

Solutions are plain dicts ``{configuration: multiplicity}`` holding only
positive entries.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .exceptions import BudgetExceeded, InfeasibleError
from .knapsack import (
    KnapsackSpec,
    convexify,
    count_configurations,
    format_configuration,
    is_simple,
    sparsify,
    support,
)

DEFAULT_SUBSET_STEPS = 1 << 22
GRAY_CODE_LIMIT = 62


@dataclass(frozen=True)
class ConfIP:
    spec: KnapsackSpec
    demand: tuple[int, ...]
    machines: int

    def __post_init__(self):
        object.__setattr__(self, "demand", tuple(int(v) for v in self.demand))
        if len(self.demand) != self.spec.dimension:
            raise ValueError("demand length differs from the dimension")
        if any(v < 0 for v in self.demand) or self.machines < 0:
            raise ValueError("demand and machines must be non-negative")

    @property
    def volume_feasible(self) -> bool:
        """The necessary condition sum b_k * pi_k <= m * T."""
        return self.spec.weight(self.demand) <= self.machines * self.spec.capacity


def support_bound(d: int, capacity: int) -> float:
    """2(d+1) log2(4(d+1)T): the equal-subset threshold."""
    return 2 * (d + 1) * math.log2(4 * (d + 1) * capacity)


def thin_support_bound(d: int, capacity: int) -> float:
    return 2 * support_bound(d, capacity)


def _check_keys(spec, x):
    for c, v in x.items():
        spec.check(c)
        if v < 0:
            raise ValueError(f"negative multiplicity for {format_configuration(c)}")


def column_sums(spec: KnapsackSpec, x):
    total = [0] * spec.dimension
    count = 0
    for c, v in x.items():
        for k, ck in enumerate(c):
            total[k] += v * ck
        count += v
    return tuple(total), count


def check_feasible_solution(ip: ConfIP, x) -> bool:
    _check_keys(ip.spec, x)
    total, count = column_sums(ip.spec, x)
    return total == ip.demand and count == ip.machines


def _require_feasible(ip, x):
    if not check_feasible_solution(ip, x):
        raise InfeasibleError("solution does not satisfy the configuration IP")


def potential(x, spec: KnapsackSpec) -> int:
    """Sum of x_c * |supp(c)| over complex configurations."""
    _check_keys(spec, x)
    return sum(v * len(support(c)) for c, v in x.items() if not is_simple(spec, c))


# -- equal subsets --------------------------------------------------------

def _strip(a_mask, b_mask, configs):
    common = a_mask & b_mask
    a_mask ^= common
    b_mask ^= common
    pick = lambda mask: [configs[i] for i in range(len(configs)) if mask >> i & 1]
    return pick(a_mask), pick(b_mask)


def equal_subsets_among(configs, max_steps=DEFAULT_SUBSET_STEPS, seed=0):
    """Disjoint non-empty ``A``, ``B`` of ``configs`` with equal sums of ``(c, 1)``.

    ``configs`` must be distinct. Returns ``None`` when every subset has been
    seen without a collision; raises :class:`BudgetExceeded` when the budget
    runs out first.
    """
    configs = sorted(configs)
    s = len(configs)
    if s < 2:
        return None
    columns = [tuple(c) + (1,) for c in configs]
    if s > GRAY_CODE_LIMIT:
        return _equal_subsets_random(columns, configs, max_steps, seed)
    dim = len(columns[0])
    acc = [0] * dim
    seen = {tuple(acc): 0}
    mask = 0
    for i in range(1, 1 << s):
        if i > max_steps:
            raise BudgetExceeded("equal-subset search", max_steps)
        bit = (i & -i).bit_length() - 1
        mask ^= 1 << bit
        sign = 1 if mask >> bit & 1 else -1
        col = columns[bit]
        for k in range(dim):
            acc[k] += sign * col[k]
        key = tuple(acc)
        prev = seen.get(key)
        if prev is not None:
            return _strip(mask, prev, configs)
        seen[key] = mask
    return None


def _equal_subsets_random(columns, configs, max_steps, seed):
    rng = random.Random(seed)
    s = len(columns)
    dim = len(columns[0])
    seen = {}
    for _ in range(max_steps):
        mask = rng.getrandbits(s)
        if not mask:
            continue
        acc = [0] * dim
        for i in range(s):
            if mask >> i & 1:
                for k in range(dim):
                    acc[k] += columns[i][k]
        key = tuple(acc)
        prev = seen.get(key)
        if prev is not None and prev != mask:
            return _strip(mask, prev, configs)
        seen[key] = mask
    raise BudgetExceeded("equal-subset search", max_steps)


def find_equal_subsets(ip: ConfIP, x, max_steps=DEFAULT_SUBSET_STEPS):
    """Disjoint non-empty subsets of supp(x) with equal column sums, or ``None``.

    Subsets are visited in reflected Gray-code order over the support sorted
    lexicographically; the first repeated column sum wins.  ``A`` is the later
    subset, ``B`` the earlier one, both with their intersection removed.
    """
    _check_keys(ip.spec, x)
    return equal_subsets_among([c for c, v in x.items() if v > 0], max_steps)


def _exchange(x, a, b, amount):
    for c in a:
        x[c] -= amount
        if x[c] == 0:
            del x[c]
    for c in b:
        x[c] = x.get(c, 0) + amount


def _search_or_stop(configs, bound, max_steps):
    """Equal subsets among ``configs``; ``None`` if none or if the bound is met
    and the exhaustive search would be too long."""
    try:
        return equal_subsets_among(configs, max_steps)
    except BudgetExceeded:
        if len(configs) <= bound:
            return None
        raise


def _debug_check(ip, x, kind):
    if not check_feasible_solution(ip, x):
        raise AssertionError(f"{kind} step broke the configuration IP constraints")


def reduce_support(ip: ConfIP, x, max_steps=DEFAULT_SUBSET_STEPS, trace=None, debug=False):
    """Shrink supp(x) by balanced exchanges until no equal subsets remain.

    Each round moves ``min{x_c : c in A}`` units from ``A`` to ``B``, which
    zeroes at least one variable while keeping both constraints intact.
    With ``debug`` set, both constraints are re-checked after every step.
    """
    _require_feasible(ip, x)
    x = dict(x)
    bound = support_bound(ip.spec.dimension, ip.spec.capacity)
    step = 0
    while True:
        pair = _search_or_stop(list(x), bound, max_steps)
        if pair is None:
            return x
        a, b = pair
        _exchange(x, a, b, min(x[c] for c in a))
        step += 1
        if debug:
            _debug_check(ip, x, "reduce")
        if trace is not None:
            trace(_trace_line(step, "reduce", potential(x, ip.spec), len(x)))


def _trace_line(step, kind, phi, supp):
    return f"step={step} kind={kind} phi={phi} supp={supp}"


def default_thin_iterations(spec: KnapsackSpec) -> int:
    return 10 * count_configurations(spec) * (spec.dimension + 1) * spec.capacity


def make_thin(ip: ConfIP, x, max_iterations=None, max_steps=DEFAULT_SUBSET_STEPS, trace=None, debug=False):
    """Transform a feasible solution into a thin one.

    Thin means: complex configurations have multiplicity at most one, the
    support is at most ``4(d+1)log2(4(d+1)T)`` and the total complex
    multiplicity is at most ``2(d+1)log2(4(d+1)T)``.  The potential
    ``sum x_c |supp(c)|`` over complex ``c`` never increases.
    """
    _require_feasible(ip, x)
    spec = ip.spec
    x = dict(x)
    bound = support_bound(spec.dimension, spec.capacity)
    if max_iterations is None:
        max_iterations = default_thin_iterations(spec)
    complex_of = {}

    def is_complex(c):
        flag = complex_of.get(c)
        if flag is None:
            flag = complex_of[c] = not is_simple(spec, c)
        return flag

    step = 0

    def log(kind):
        nonlocal step
        step += 1
        if debug:
            _debug_check(ip, x, kind)
        if trace is not None:
            trace(_trace_line(step, kind, potential(x, spec), len(x)))

    def split_all():
        # P1: a complex configuration used twice is replaced by its two halves
        while True:
            doubled = sorted(c for c, v in x.items() if v >= 2 and is_complex(c))
            if not doubled:
                return
            for c in doubled:
                while x.get(c, 0) >= 2:
                    c1, c2 = sparsify(spec, c)
                    _exchange(x, [c, c], [c1, c2], 1)
                    log("split")

    iterations = 0
    split_all()
    # P2: balance complex-only equal subsets, dropping the side with larger potential
    while iterations < max_iterations:
        complex_supp = [c for c in x if is_complex(c)]
        pair = _search_or_stop(complex_supp, bound, max_steps)
        if pair is None:
            break
        a, b = pair
        phi_a = sum(len(support(c)) for c in a)
        phi_b = sum(len(support(c)) for c in b)
        if phi_a < phi_b:
            a, b = b, a
        _exchange(x, a, b, 1)
        log("swap")
        split_all()
        iterations += 1

    # Final step: exchanges among simple configurations only
    while True:
        simple_supp = [c for c in x if not is_complex(c)]
        pair = _search_or_stop(simple_supp, bound, max_steps)
        if pair is None:
            break
        a, b = pair
        _exchange(x, a, b, min(x[c] for c in a))
        log("reduce")
    return x


def thin_report(ip: ConfIP, x) -> dict:
    """The three thinness properties, evaluated exactly."""
    spec = ip.spec
    d, cap = spec.dimension, spec.capacity
    complex_mass = sum(v for c, v in x.items() if not is_simple(spec, c))
    return {
        "feasible": check_feasible_solution(ip, x),
        "complex_at_most_once": all(v <= 1 for c, v in x.items() if not is_simple(spec, c)),
        "support": len(x),
        "support_bound": thin_support_bound(d, cap),
        "complex_mass": complex_mass,
        "complex_mass_bound": support_bound(d, cap),
        "potential": potential(x, spec),
    }


def is_thin(ip: ConfIP, x) -> bool:
    r = thin_report(ip, x)
    return (
        r["feasible"]
        and r["complex_at_most_once"]
        and r["support"] <= r["support_bound"]
        and r["complex_mass"] <= r["complex_mass_bound"]
    )


# -- LP side --------------------------------------------------------------

def lp_feasible(ip: ConfIP, x) -> bool:
    _check_keys(ip.spec, x)
    total = [Fraction(0)] * ip.spec.dimension
    count = Fraction(0)
    for c, v in x.items():
        for k, ck in enumerate(c):
            total[k] += v * ck
        count += v
    return tuple(total) == tuple(Fraction(b) for b in ip.demand) and count == ip.machines


def simplify_lp_support(ip: ConfIP, x) -> dict:
    """Move the mass of every complex configuration onto simple ones.

    Uses the convex decomposition from :func:`convexify`; all arithmetic is
    exact.
    """
    if not lp_feasible(ip, x):
        raise InfeasibleError("x does not satisfy the LP constraints")
    out: dict = {}
    for c, v in sorted(x.items()):
        v = Fraction(v)
        if v == 0:
            continue
        if is_simple(ip.spec, c):
            out[c] = out.get(c, 0) + v
            continue
        for q, lam in convexify(ip.spec, c).items():
            out[q] = out.get(q, 0) + lam * v
    return {c: v for c, v in out.items() if v != 0}

"""Configurations of a knapsack polytope and the support-splitting toolkit.

A configuration is a tuple of non-negative counts ``c`` with
``sizes . c <= capacity``.  It is *simple* when its support has at most
``log2(capacity + 1)`` entries and *complex* otherwise.  Every complex
configuration ``c`` can be split: ``2c = c1 + c2`` with ``c1``, ``c2`` of the
same weight and strictly smaller support (:func:`sparsify`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .exceptions import BudgetExceeded

Configuration = tuple  # tuple[int, ...]

DEFAULT_ENUMERATION_CAP = 10**7


@dataclass(frozen=True)
class KnapsackSpec:
    sizes: tuple[int, ...]
    capacity: int

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if not self.sizes:
            raise ValueError("dimension must be >= 1")
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        for s in self.sizes:
            if not 1 <= s <= self.capacity:
                raise ValueError(f"size {s} outside [1, capacity={self.capacity}]")

    @property
    def dimension(self) -> int:
        return len(self.sizes)

    def weight(self, c) -> int:
        return sum(s * k for s, k in zip(self.sizes, c))

    def contains(self, c) -> bool:
        return (
            len(c) == self.dimension
            and all(k >= 0 for k in c)
            and self.weight(c) <= self.capacity
        )

    def check(self, c) -> None:
        if not self.contains(c):
            raise ValueError(f"{format_configuration(c)} is not a configuration of {self}")


def support(c) -> tuple[int, ...]:
    return tuple(k for k, v in enumerate(c) if v)


def is_simple_support(support_size: int, capacity: int) -> bool:
    # |supp| <= log2(T+1)  <=>  2^|supp| <= T+1, decided in integers
    return (1 << support_size) <= capacity + 1


def is_simple(spec: KnapsackSpec, c) -> bool:
    return is_simple_support(len(support(c)), spec.capacity)


def classify(spec: KnapsackSpec, c) -> str:
    """``"simple"`` or ``"complex"``."""
    spec.check(c)
    return "simple" if is_simple(spec, c) else "complex"


def simplicity_threshold(capacity: int) -> float:
    return math.log2(capacity + 1)


def format_configuration(c) -> str:
    return "(" + ",".join(str(v) for v in c) + ")"


def parse_configuration(text: str) -> Configuration:
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise ValueError(f"configuration must look like (a,b,...): {text!r}")
    inner = text[1:-1].strip()
    if not inner:
        raise ValueError("empty configuration")
    return tuple(int(tok) for tok in inner.split(","))


# -- enumeration ----------------------------------------------------------

def iter_configurations(spec: KnapsackSpec, upper=None):
    """Yield the integer points of the polytope in lexicographic order.

    ``upper`` optionally bounds each coordinate (e.g. by the demand vector).
    """
    d = spec.dimension
    sizes = spec.sizes
    caps = upper if upper is not None else (spec.capacity,) * d
    current = [0] * d

    def rec(k, room):
        if k == d:
            yield tuple(current)
            return
        top = min(room // sizes[k], caps[k])
        for v in range(top + 1):
            current[k] = v
            yield from rec(k + 1, room - v * sizes[k])
        current[k] = 0

    yield from rec(0, spec.capacity)


def enumerate_configurations(spec: KnapsackSpec, cap: int = DEFAULT_ENUMERATION_CAP, upper=None):
    out = []
    for c in iter_configurations(spec, upper):
        if len(out) >= cap:
            raise BudgetExceeded("configuration enumeration", cap)
        out.append(c)
    return out


def count_configurations(spec: KnapsackSpec) -> int:
    """|Q| by a capacity-indexed counting recursion; no enumeration."""
    # ways[w] = number of vectors over the sizes seen so far with weight exactly w
    ways = [1] + [0] * spec.capacity
    for s in spec.sizes:
        for w in range(s, spec.capacity + 1):
            ways[w] += ways[w - s]
    return sum(ways)


def count_simple(spec: KnapsackSpec, cap: int = DEFAULT_ENUMERATION_CAP) -> int:
    return sum(1 for c in enumerate_configurations(spec, cap) if is_simple(spec, c))


def simple_count_bound(spec: KnapsackSpec) -> float:
    """(floor(log(T+1)) + 1) * d^log(T+1) * (T+1)^log(T+1)."""
    t = math.log2(spec.capacity + 1)
    return (math.floor(t) + 1) * spec.dimension**t * (spec.capacity + 1) ** t


# -- sparsification -------------------------------------------------------

def sparsify(spec: KnapsackSpec, c):
    """Split a complex configuration into two of equal weight and smaller support.

    Subsets of ``supp(c)`` are scanned by increasing size (lexicographic within
    a size) and bucketed by the weight of ``c`` restricted to them; the first
    collision ``S``, ``R`` is made disjoint and gives
    ``(c - c^R + c^S, c - c^S + c^R)``.
    """
    spec.check(c)
    supp = support(c)
    if is_simple_support(len(supp), spec.capacity):
        raise ValueError(f"{format_configuration(c)} is simple; the split needs a complex configuration")
    part_weight = {k: spec.sizes[k] * c[k] for k in supp}
    seen = {}
    for size in range(1, len(supp) + 1):
        for subset in combinations(supp, size):
            w = sum(part_weight[k] for k in subset)
            other = seen.get(w)
            if other is None:
                seen[w] = frozenset(subset)
                continue
            s_set = other - set(subset)
            r_set = frozenset(subset) - other
            c1 = tuple(0 if k in r_set else (2 * v if k in s_set else v) for k, v in enumerate(c))
            c2 = tuple(0 if k in s_set else (2 * v if k in r_set else v) for k, v in enumerate(c))
            return c1, c2
    raise AssertionError(f"no equal-weight subsets for complex {format_configuration(c)}")


def convexify(spec: KnapsackSpec, c) -> dict:
    """Write ``c`` as a convex combination of simple configurations.

    Weights are exact dyadic fractions obtained by recursive splitting;
    equal configurations are merged.
    """
    spec.check(c)
    weights: dict = {}

    def rec(conf, weight):
        if is_simple(spec, conf):
            weights[conf] = weights.get(conf, 0) + weight
            return
        c1, c2 = sparsify(spec, conf)
        rec(c1, weight / 2)
        rec(c2, weight / 2)

    rec(tuple(c), Fraction(1))
    return weights


def hull_vertex_witness(spec: KnapsackSpec, c, cap: int = DEFAULT_ENUMERATION_CAP):
    """A pair ``(c1, c2)`` of other configurations with ``c1 + c2 = 2c``, or ``None``.

    Only complex configurations are searched (simple ones return ``None``).
    The pair is the first ``c1`` in lexicographic order of ``Q`` whose mirror
    ``2c - c1`` is also in ``Q``.
    """
    spec.check(c)
    if is_simple(spec, c):
        return None
    for count, c1 in enumerate(iter_configurations(spec)):
        if count >= cap:
            raise BudgetExceeded("configuration enumeration", cap)
        if c1 == c:
            continue
        c2 = tuple(2 * a - b for a, b in zip(c, c1))
        if spec.contains(c2):
            return c1, c2
    raise AssertionError(f"complex {format_configuration(c)} has no midpoint witness")

"""Seeded corpora listed in the checked-in manifest ``data/corpora.json``.

Every corpus item is a pure function of its seed, drawn with the package's
xorshift64* generator, so runs are reproducible across machines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from .conf_ip import ConfIP
from .instance import Instance, XorShift64Star, generate_instance
from .knapsack import KnapsackSpec, enumerate_configurations, is_simple, sparsify


def load_manifest() -> dict:
    text = resources.files("confsched").joinpath("data/corpora.json").read_text()
    return json.loads(text)


def _between(rng, lo, hi):
    return lo + rng.below(hi - lo + 1)


@dataclass(frozen=True)
class CorpusInstance:
    id: str
    seed: int
    instance: Instance


def scheduling_corpus(name: str, count=None) -> list[CorpusInstance]:
    """Instances for ``name`` in ("pcmax", "objectives"); shape drawn from the seed."""
    cfg = load_manifest()[name]
    count = cfg["count"] if count is None else count
    out = []
    for i in range(count):
        seed = cfg["base_seed"] + i
        rng = XorShift64Star(seed ^ 0x9E3779B97F4A7C15)
        n = _between(rng, cfg["n_min"], cfg["n_max"])
        m = _between(rng, cfg["m_min"], cfg["m_max"])
        out.append(CorpusInstance(f"{name}-{i:04d}", seed, generate_instance(seed, n, m, cfg["p_max"])))
    return out


def _random_spec(rng, d_max, T_max):
    d = _between(rng, 1, d_max)
    T = _between(rng, 2, T_max)
    # half the specs use short sizes so that complex configurations exist
    top = T if rng.below(2) == 0 else max(1, T // d)
    sizes = tuple(_between(rng, 1, top) for _ in range(d))
    return KnapsackSpec(sizes, T)


def _sample_configs(rng, configs, m, complex_bias):
    """m configurations, with complex ones (and repeats of them) drawn more often."""
    complex_ = [c for c in configs if c[1]]
    chosen = []
    for _ in range(m):
        if complex_ and rng.below(100) < complex_bias:
            chosen.append(complex_[rng.below(len(complex_))][0])
        else:
            chosen.append(configs[rng.below(len(configs))][0])
    return chosen


def confip_item(seed: int, d_max=5, T_max=20, m_max=8):
    """A feasible (ip, x) pair: x counts m sampled configurations."""
    rng = XorShift64Star(seed)
    spec = _random_spec(rng, d_max, T_max)
    tagged = [(c, not is_simple(spec, c)) for c in enumerate_configurations(spec)]
    m = _between(rng, 1, m_max)
    bias = (0, 50, 90)[rng.below(3)]
    x: dict = {}
    for c in _sample_configs(rng, tagged, m, bias):
        x[c] = x.get(c, 0) + 1
    demand = [0] * spec.dimension
    for c, v in x.items():
        for k, ck in enumerate(c):
            demand[k] += v * ck
    return ConfIP(spec, tuple(demand), m), dict(sorted(x.items()))


def confip_corpus(count=None):
    cfg = load_manifest()["confip"]
    count = cfg["count"] if count is None else count
    return [confip_item(cfg["base_seed"] + i, cfg["d_max"], cfg["T_max"], cfg["m_max"]) for i in range(count)]


def conflp_item(seed: int, d_max=5, T_max=20, m_max=8):
    """A rational LP point: a sampled integer solution with split mass moved onto complex configurations.

    For a complex c with halves c1, c2 (2c = c1 + c2), shifting weight t from
    each of c1 and c2 onto c with weight 2t keeps both LP constraints.  Each
    corpus item has at least one complex configuration when its spec has any.
    """
    rng = XorShift64Star(seed)
    spec = _random_spec(rng, d_max, T_max)
    configs = enumerate_configurations(spec)
    complex_ = [c for c in configs if not is_simple(spec, c)]
    m = _between(rng, 1, m_max)
    x: dict = {}
    for _ in range(m):
        c = configs[rng.below(len(configs))]
        x[c] = x.get(c, Fraction(0)) + 1
    for c in complex_[:: max(1, len(complex_) // 4)][:4]:
        c1, c2 = sparsify(spec, c)
        # one extra machine each on c1 and c2 keeps b and m integral; then move part of it onto c
        x[c1] = x.get(c1, Fraction(0)) + 1
        x[c2] = x.get(c2, Fraction(0)) + 1
        m += 2
        shift = Fraction(1 + rng.below(4), 5)
        x[c1] -= shift
        x[c2] -= shift
        x[c] = x.get(c, Fraction(0)) + 2 * shift
    demand = [0] * spec.dimension
    for c, v in x.items():
        for k, ck in enumerate(c):
            demand[k] += v * ck
    assert all(v.denominator == 1 for v in demand)
    x = {c: v for c, v in sorted(x.items()) if v}
    return ConfIP(spec, tuple(int(v) for v in demand), m), x


def conflp_corpus(count=None):
    cfg = load_manifest()["conflp"]
    count = cfg["count"] if count is None else count
    return [conflp_item(cfg["base_seed"] + i, cfg["d_max"], cfg["T_max"], cfg["m_max"]) for i in range(count)]


def thin_gen_item(seed: int):
    """A rounded instance with a solution built from sampled non-empty configurations.

    With lambda in {3, 4}, a complex configuration needs 2*lambda sizes in
    [lambda, 4 lambda^2]; half the items use exactly the 2*lambda shortest
    admissible sizes so that complex configurations (and repeats) appear.
    """
    from .objectives import GeneralRoundedInstance

    rng = XorShift64Star(seed)
    lam = 3 + rng.below(2)
    if rng.below(2):
        sizes = tuple(range(lam, 3 * lam))
    else:
        d = _between(rng, 2, 6)
        sizes = tuple(sorted({_between(rng, lam, 4 * lam) for _ in range(d)}))
    probe = GeneralRoundedInstance(Fraction(lam * lam), lam, sizes, (0,) * len(sizes), 1)
    spec = probe.spec()
    tagged = [(c, not is_simple(spec, c)) for c in enumerate_configurations(spec) if any(c)]
    m = _between(rng, 1, 8)
    x: dict = {}
    for c in _sample_configs(rng, tagged, m, (30, 70, 95)[rng.below(3)]):
        x[c] = x.get(c, 0) + 1
    demand = [0] * len(sizes)
    for c, v in x.items():
        for k, ck in enumerate(c):
            demand[k] += v * ck
    r = GeneralRoundedInstance(Fraction(lam * lam), lam, sizes, tuple(demand), m)
    return r, dict(sorted(x.items()))


def thin_gen_corpus(count=None):
    cfg = load_manifest()["thin_gen"]
    count = cfg["count"] if count is None else count
    return [thin_gen_item(cfg["base_seed"] + i) for i in range(count)]

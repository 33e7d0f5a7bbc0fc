"""Seeded random instances on small rational grids (denominators <= 60)."""

from __future__ import annotations

import random
from fractions import Fraction

from .model import (
    AuctionInstance,
    ValuationDistribution,
    feasibility_explicit,
    feasibility_identical_items,
    feasibility_single_item,
    feasibility_single_minded,
    make_distribution,
    make_instance,
)

MAX_DEN = 60
VALUE_DENS = (1, 2, 3, 4, 5, 6, 10, 12)
FEASIBILITY_KINDS = ("single_item", "identical_items", "single_minded", "explicit")


def random_probs(rng: random.Random, k: int) -> list[Fraction]:
    den = rng.randint(max(k, 2), MAX_DEN)
    cuts = sorted(rng.sample(range(1, den), k - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [den])]
    return [Fraction(v, den) for v in parts]


def random_distribution(rng: random.Random, k_max: int = 3, k_min: int = 1, value_max: int = 6) -> ValuationDistribution:
    k = rng.randint(k_min, k_max)
    q = rng.choice(VALUE_DENS)
    nums = sorted(rng.sample(range(1, value_max * q + 1), k))
    return make_distribution([Fraction(a, q) for a in nums], random_probs(rng, k))


def random_feasibility(rng: random.Random, n: int, kind: str | None = None):
    kind = kind or rng.choice(FEASIBILITY_KINDS)
    if kind == "single_item":
        return feasibility_single_item(n)
    if kind == "identical_items":
        return feasibility_identical_items(n, rng.randint(1, n))
    if kind == "single_minded":
        items = "ABCD"
        bundles = [rng.sample(items, rng.randint(1, 2)) for _ in range(n)]
        return feasibility_single_minded(bundles)
    sets = [rng.sample(range(n), rng.randint(1, n)) for _ in range(rng.randint(1, 3))]
    sets += [[i] for i in range(n)]
    return feasibility_explicit(n, sets, autoclose=True)


def random_instance(rng: random.Random, n_max: int = 3, k_max: int = 3, iid_share: float = 0.3, kind: str | None = None) -> AuctionInstance:
    n = rng.randint(1, n_max)
    if rng.random() < iid_share:
        buyers = [random_distribution(rng, k_max)] * n
    else:
        buyers = [random_distribution(rng, k_max) for _ in range(n)]
    return make_instance(buyers, random_feasibility(rng, n, kind))


def random_binary_instance(rng: random.Random, n_max: int = 4) -> tuple[AuctionInstance, Fraction]:
    """Two-point priors; returns the instance and its ratio max H / min L."""
    n = rng.randint(1, n_max)
    r = Fraction(rng.randint(11, 100), 10)
    # lows stay below the midpoint of [1, r] so every high has room above them
    lows = [1 + (r - 1) / 2 * Fraction(rng.randint(0, 20), 20) for _ in range(n)]
    cap = r * min(lows)
    buyers = []
    for low in lows:
        high = low + (cap - low) * Fraction(rng.randint(1, MAX_DEN), MAX_DEN)
        p = Fraction(rng.randint(1, MAX_DEN - 1), MAX_DEN)
        buyers.append(make_distribution([low, high], [1 - p, p]))
    inst = make_instance(buyers, random_feasibility(rng, n))
    ratio = max(b.support[-1] for b in buyers) / min(b.support[0] for b in buyers)
    return inst, ratio


def random_common_low_instance(rng: random.Random, n_max: int = 4) -> AuctionInstance:
    """Single item, common low value 1, distinct highs, every p_n H_n >= 1."""
    n = rng.randint(1, n_max)
    q = rng.choice(VALUE_DENS)
    highs = sorted(Fraction(a, q) for a in rng.sample(range(q + 1, 10 * q + 1), n))
    buyers = []
    for h in highs:
        lo = Fraction(1) / h
        # p on a grid in [1/H, 1)
        p = lo + (1 - lo) * Fraction(rng.randint(0, MAX_DEN - 1), MAX_DEN)
        buyers.append(make_distribution([1, h], [1 - p, p]))
    return make_instance(buyers, feasibility_single_item(n))

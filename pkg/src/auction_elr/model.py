"""Auction instances: buyer priors, feasibility systems, and profile enumeration.

All quantities are exact :class:`fractions.Fraction` values. Buyer indices and
support indices are 0-based.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import (
    BadCardinality,
    BuyerNeverWins,
    EmptyBundle,
    MassNotOne,
    NonIncreasingSupport,
    NonPositiveMass,
    NonPositiveValue,
    NotDownwardClosed,
    ProfileSpaceTooLarge,
    TooManySets,
)

DEFAULT_MAX_PROFILES = 10**7
MAX_FEASIBLE_SETS = 2**20

Winners = tuple  # sorted tuple of buyer indices


def to_fraction(value) -> Fraction:
    """Convert ints, Fractions, ``"a/b"`` strings and decimal strings exactly.

    Floats are accepted and converted through their shortest ``repr`` so that
    ``0.1`` becomes ``1/10`` rather than its binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite number {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


@dataclass(frozen=True)
class ValuationDistribution:
    support: tuple[Fraction, ...]
    probs: tuple[Fraction, ...]

    @property
    def k(self) -> int:
        return len(self.support)

    def index_of(self, value) -> int:
        return self.support.index(to_fraction(value))

    def tail(self, i: int) -> Fraction:
        """P[X >= support[i]]."""
        return sum(self.probs[i:], Fraction(0))

    def mean(self) -> Fraction:
        return sum((x * p for x, p in zip(self.support, self.probs)), Fraction(0))


def make_distribution(support: Sequence, probs: Sequence) -> ValuationDistribution:
    if len(support) != len(probs):
        raise ValueError(f"support has {len(support)} points but probs has {len(probs)}")
    if not support:
        raise ValueError("a distribution needs at least one support point")
    xs = tuple(to_fraction(x) for x in support)
    ps = tuple(to_fraction(p) for p in probs)
    for x in xs:
        if x <= 0:
            raise NonPositiveValue(f"support value {x} is not positive")
    for a, b in zip(xs, xs[1:]):
        if not a < b:
            raise NonIncreasingSupport(f"support not strictly increasing at {a}, {b}")
    for p in ps:
        if p <= 0:
            raise NonPositiveMass(f"probability {p} is not positive")
    total = sum(ps, Fraction(0))
    if total != 1:
        raise MassNotOne(f"probabilities sum to {total}, not 1")
    return ValuationDistribution(xs, ps)


@dataclass(frozen=True)
class FeasibilitySystem:
    """Downward-closed collection of winner sets.

    ``sets`` holds sorted index tuples in lexicographic order, so the first
    maximizer found by a linear scan is the lexicographically smallest one.
    """

    n_buyers: int
    sets: tuple[Winners, ...]
    kind: str = "explicit"
    count: int | None = None
    bundles: tuple[tuple[str, ...], ...] | None = None

    def __contains__(self, subset) -> bool:
        return tuple(sorted(subset)) in self._lookup

    @property
    def _lookup(self) -> frozenset:
        # frozen dataclass: cache on the instance dict
        cached = self.__dict__.get("_lookup_cache")
        if cached is None:
            cached = frozenset(self.sets)
            object.__setattr__(self, "_lookup_cache", cached)
        return cached

    def maximal_sets(self) -> list[Winners]:
        members = set(self.sets)
        out = []
        for s in self.sets:
            if not any(s != t and set(s) < set(t) for t in members):
                out.append(s)
        return out

    def max_size(self) -> int:
        return max(len(s) for s in self.sets)


def _canonical(sets: Iterable[Iterable[int]]) -> tuple[Winners, ...]:
    uniq = {tuple(sorted(set(s))) for s in sets}
    if len(uniq) > MAX_FEASIBLE_SETS:
        raise TooManySets(f"{len(uniq)} feasible sets exceed the cap of {MAX_FEASIBLE_SETS}")
    return tuple(sorted(uniq))


def _check_closed(n: int, sets: tuple[Winners, ...]) -> None:
    members = set(sets)
    if () not in members:
        raise NotDownwardClosed("the empty set is missing")
    for s in sets:
        # immediate subsets suffice by induction
        for drop in range(len(s)):
            sub = s[:drop] + s[drop + 1:]
            if sub not in members:
                raise NotDownwardClosed(f"{list(s)} is feasible but its subset {list(sub)} is not")
    seen = {i for s in sets for i in s}
    missing = sorted(set(range(n)) - seen)
    if missing:
        raise BuyerNeverWins(f"buyer {missing[0]} belongs to no feasible set")


def feasibility_single_item(n: int) -> FeasibilitySystem:
    if n < 1:
        raise BadCardinality("need at least one buyer")
    sets = _canonical([()] + [(i,) for i in range(n)])
    return FeasibilitySystem(n, sets, kind="single_item")


def feasibility_identical_items(n: int, s: int) -> FeasibilitySystem:
    if not 1 <= s <= n:
        raise BadCardinality(f"item count {s} must lie in [1, {n}]")
    sets = _canonical(c for size in range(s + 1) for c in itertools.combinations(range(n), size))
    return FeasibilitySystem(n, sets, kind="identical_items", count=s)


def feasibility_single_minded(bundles: Sequence[Iterable]) -> FeasibilitySystem:
    """Buyer sets whose bundles are pairwise disjoint."""
    if not bundles:
        raise BadCardinality("need at least one buyer")
    frozen = [frozenset(b) for b in bundles]
    for i, b in enumerate(frozen):
        if not b:
            raise EmptyBundle(f"buyer {i} has an empty bundle")
    # grow independent sets buyer by buyer; each set carries its item union
    grown: list[tuple[Winners, frozenset]] = [((), frozenset())]
    for i, b in enumerate(frozen):
        grown += [(s + (i,), used | b) for s, used in grown if not used & b]
        if len(grown) > MAX_FEASIBLE_SETS:
            raise TooManySets(f"more than {MAX_FEASIBLE_SETS} feasible sets")
    sets = _canonical(s for s, _ in grown)
    labels = tuple(tuple(sorted(map(str, b))) for b in frozen)
    return FeasibilitySystem(len(frozen), sets, kind="single_minded", bundles=labels)


def feasibility_explicit(n: int, sets: Iterable[Iterable[int]], autoclose: bool = True) -> FeasibilitySystem:
    if n < 1:
        raise BadCardinality("need at least one buyer")
    raw = [tuple(sorted(set(s))) for s in sets]
    for s in raw:
        for i in s:
            if not 0 <= i < n:
                raise BadCardinality(f"buyer index {i} out of range for {n} buyers")
    if autoclose:
        closed: set[Winners] = {()}
        for s in raw:
            if len(s) > 20:
                raise TooManySets(f"closing a set of {len(s)} buyers exceeds the cap")
            for size in range(len(s) + 1):
                closed.update(itertools.combinations(s, size))
        canon = _canonical(closed)
    else:
        canon = _canonical(raw)
    _check_closed(n, canon)
    return FeasibilitySystem(n, canon, kind="explicit")


@dataclass(frozen=True)
class AuctionInstance:
    buyers: tuple[ValuationDistribution, ...]
    feasibility: FeasibilitySystem

    def __post_init__(self):
        if not self.buyers:
            raise BadCardinality("an instance needs at least one buyer")
        if self.feasibility.n_buyers != len(self.buyers):
            raise BadCardinality(
                f"feasibility system is for {self.feasibility.n_buyers} buyers, "
                f"instance has {len(self.buyers)}"
            )

    @property
    def n_buyers(self) -> int:
        return len(self.buyers)

    def profile_count(self) -> int:
        return math.prod(b.k for b in self.buyers)


def make_instance(buyers: Sequence[ValuationDistribution], feasibility: FeasibilitySystem) -> AuctionInstance:
    return AuctionInstance(tuple(buyers), feasibility)


@dataclass(frozen=True)
class TypeProfile:
    indices: tuple[int, ...]
    values: tuple[Fraction, ...]
    probability: Fraction


def enumerate_profiles(instance: AuctionInstance, max_profiles: int = DEFAULT_MAX_PROFILES) -> Iterator[TypeProfile]:
    """Yield every type profile with its (independent) probability.

    Raises :class:`ProfileSpaceTooLarge` before yielding anything when the
    product of support sizes exceeds ``max_profiles``.
    """
    total = instance.profile_count()
    if total > max_profiles:
        raise ProfileSpaceTooLarge(f"{total} profiles exceed the cap of {max_profiles}")
    return _profiles(instance)


def _profiles(instance: AuctionInstance) -> Iterator[TypeProfile]:
    buyers = instance.buyers
    for idx in itertools.product(*(range(b.k) for b in buyers)):
        prob = Fraction(1)
        for b, i in zip(buyers, idx):
            prob *= b.probs[i]
        yield TypeProfile(idx, tuple(b.support[i] for b, i in zip(buyers, idx)), prob)

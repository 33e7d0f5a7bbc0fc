"""Efficient and revenue-optimal allocation rules, payments, and IC/IR checks.

Rules are deterministic: each maps a profile of support indices to one
feasible winner set. Remaining ties after the rule's own criteria go to the
lexicographically smallest set of buyer indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import MonotonicityViolated
from .model import (
    DEFAULT_MAX_PROFILES,
    AuctionInstance,
    TypeProfile,
    enumerate_profiles,
    to_fraction,
)
from .virtual import IronedTable, ironed_virtual_valuation

TIE_BREAKS = ("welfare", "ironed")


class AllocationRule:
    kind = "abstract"

    def __init__(self, instance: AuctionInstance):
        self.instance = instance
        self._cache: dict[tuple[int, ...], tuple[int, ...]] = {}

    def winners(self, idx: Sequence[int]) -> tuple[int, ...]:
        key = tuple(idx)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._choose(key)
            self._cache[key] = hit
        return hit

    def wins(self, n: int, idx: Sequence[int]) -> bool:
        return n in self.winners(idx)

    def _choose(self, idx: tuple[int, ...]) -> tuple[int, ...]:
        raise NotImplementedError

    def _values(self, idx):
        return [b.support[i] for b, i in zip(self.instance.buyers, idx)]


class EfficientRule(AllocationRule):
    kind = "efficient"

    def _choose(self, idx):
        v = self._values(idx)
        best, best_set = None, ()
        for s in self.instance.feasibility.sets:
            total = sum((v[n] for n in s), Fraction(0))
            if best is None or total > best:
                best, best_set = total, s
        return best_set


class OptimalRule(AllocationRule):
    """Maximum-weight rule on ironed virtual values.

    Only buyers with strictly positive ironed value may win. Among sets with
    the largest ironed total, ``tie_break="welfare"`` prefers the largest sum
    of reported values; ``tie_break="ironed"`` prefers the largest sum of
    ironing-block mean values, which keeps each buyer's allocation constant on
    an ironed block and so attains the optimal revenue exactly.
    """

    kind = "optimal"

    def __init__(self, instance: AuctionInstance, tie_break: str = "welfare"):
        super().__init__(instance)
        if tie_break not in TIE_BREAKS:
            raise ValueError(f"unknown tie_break {tie_break!r}; expected one of {TIE_BREAKS}")
        self.tie_break = tie_break
        self.tables: tuple[IronedTable, ...] = tuple(ironed_virtual_valuation(b) for b in instance.buyers)
        self._block_means = tuple(_block_means(b, t) for b, t in zip(instance.buyers, self.tables))

    def _choose(self, idx):
        wb = [t.w_bar[i] for t, i in zip(self.tables, idx)]
        if self.tie_break == "welfare":
            second = self._values(idx)
        else:
            second = [m[i] for m, i in zip(self._block_means, idx)]
        best, best_set = None, ()
        for s in self.instance.feasibility.sets:
            if any(wb[n] <= 0 for n in s):
                continue
            key = (sum((wb[n] for n in s), Fraction(0)), sum((second[n] for n in s), Fraction(0)))
            if best is None or key > best:
                best, best_set = key, s
        return best_set


def _block_means(dist, table: IronedTable) -> tuple[Fraction, ...]:
    num: dict[int, Fraction] = {}
    den: dict[int, Fraction] = {}
    for x, p, b in zip(dist.support, dist.probs, table.blocks):
        num[b] = num.get(b, Fraction(0)) + x * p
        den[b] = den.get(b, Fraction(0)) + p
    return tuple(num[b] / den[b] for b in table.blocks)


def make_rule(instance: AuctionInstance, kind: str | AllocationRule, tie_break: str = "welfare") -> AllocationRule:
    if isinstance(kind, AllocationRule):
        return kind
    if kind == "efficient":
        return EfficientRule(instance)
    if kind == "optimal":
        return OptimalRule(instance, tie_break=tie_break)
    raise ValueError(f"unknown rule kind {kind!r}")


def _indices(instance: AuctionInstance, profile) -> tuple[int, ...]:
    if isinstance(profile, TypeProfile):
        return profile.indices
    vals = list(profile)
    if len(vals) != instance.n_buyers:
        raise ValueError(f"profile has {len(vals)} entries for {instance.n_buyers} buyers")
    out = []
    for n, (b, v) in enumerate(zip(instance.buyers, vals)):
        v = to_fraction(v)
        try:
            out.append(b.support.index(v))
        except ValueError:
            raise ValueError(f"value {v} is not in buyer {n}'s support") from None
    return tuple(out)


def efficient_allocation(instance: AuctionInstance, profile) -> tuple[int, ...]:
    return EfficientRule(instance).winners(_indices(instance, profile))


def optimal_allocation(instance: AuctionInstance, profile, tie_break: str = "welfare") -> tuple[int, ...]:
    return OptimalRule(instance, tie_break).winners(_indices(instance, profile))


def payments(instance: AuctionInstance, rule, profile, scheme: str = "threshold") -> list[Fraction]:
    """Per-buyer payments at one profile.

    ``threshold``: sum over own support points up to the bid of the jump in
    the win indicator times that point, i.e. each winner pays the lowest bid
    at which he would still win. ``vcg``: Clarke pivot payments, only for the
    efficient rule.
    """
    rule = make_rule(instance, rule)
    idx = _indices(instance, profile)
    if scheme == "threshold":
        return [_threshold_payment(instance, rule, n, idx) for n in range(instance.n_buyers)]
    if scheme == "vcg":
        if rule.kind != "efficient":
            raise ValueError("VCG payments are defined for the efficient rule only")
        return _vcg_payments(instance, rule, idx)
    raise ValueError(f"unknown payment scheme {scheme!r}")


def _threshold_payment(instance, rule, n, idx) -> Fraction:
    xs = instance.buyers[n].support
    total = Fraction(0)
    prev = 0
    probe = list(idx)
    for i in range(idx[n] + 1):
        probe[n] = i
        cur = 1 if rule.wins(n, probe) else 0
        if cur != prev:
            total += (cur - prev) * xs[i]
        prev = cur
    return total


def _vcg_payments(instance, rule, idx) -> list[Fraction]:
    v = [b.support[i] for b, i in zip(instance.buyers, idx)]
    chosen = rule.winners(idx)
    out = []
    for n in range(instance.n_buyers):
        if n not in chosen:
            out.append(Fraction(0))
            continue
        without = max(sum((v[m] for m in s), Fraction(0)) for s in instance.feasibility.sets if n not in s)
        others = sum((v[m] for m in chosen if m != n), Fraction(0))
        out.append(without - others)
    return out


@dataclass(frozen=True)
class InterimTable:
    q: tuple[tuple[Fraction, ...], ...]
    m: tuple[tuple[Fraction, ...], ...]

    def is_monotone(self) -> bool:
        return all(a <= b for qn in self.q for a, b in zip(qn, qn[1:]))


def interim_quantities(
    instance: AuctionInstance,
    rule,
    scheme: str = "threshold",
    max_profiles: int = DEFAULT_MAX_PROFILES,
    check_monotone: bool = True,
) -> InterimTable:
    rule = make_rule(instance, rule)
    q = [[Fraction(0)] * b.k for b in instance.buyers]
    m = [[Fraction(0)] * b.k for b in instance.buyers]
    for prof in enumerate_profiles(instance, max_profiles):
        chosen = rule.winners(prof.indices)
        pay = payments(instance, rule, prof, scheme)
        for n, i in enumerate(prof.indices):
            # weight by P[v_{-n}] = P[v] / p_n(i)
            wgt = prof.probability / instance.buyers[n].probs[i]
            if n in chosen:
                q[n][i] += wgt
            m[n][i] += wgt * pay[n]
    table = InterimTable(tuple(map(tuple, q)), tuple(map(tuple, m)))
    if check_monotone and not table.is_monotone():
        raise MonotonicityViolated(f"interim win probabilities of the {rule.kind} rule are not nondecreasing")
    if scheme == "threshold":
        for n, b in enumerate(instance.buyers):
            if table.m[n] != telescoped_payments(b.support, table.q[n]):
                raise ArithmeticError(f"buyer {n}: interim payments differ from the telescoped identity")
    return table


def telescoped_payments(support: Sequence[Fraction], q: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """m(x_i) = sum_{j<=i} (q(x_j) - q(x_{j-1})) x_j with q(x_{-1}) = 0."""
    out, acc, prev = [], Fraction(0), Fraction(0)
    for x, qi in zip(support, q):
        acc += (qi - prev) * x
        prev = qi
        out.append(acc)
    return tuple(out)


@dataclass(frozen=True)
class ICIRVerdict:
    ic_violations: tuple[tuple[int, int, int], ...] = ()
    ir_violations: tuple[tuple[int, int], ...] = ()

    @property
    def ic(self) -> bool:
        return not self.ic_violations

    @property
    def ir(self) -> bool:
        return not self.ir_violations

    @property
    def passed(self) -> bool:
        return self.ic and self.ir


def verify_ic_ir(interim: InterimTable, buyers) -> ICIRVerdict:
    """Check every truthful-vs-misreport and participation constraint.

    Violations are reported as ``(buyer, true_index, reported_index)`` for IC
    and ``(buyer, true_index)`` for IR.
    """
    ic, ir = [], []
    for n, b in enumerate(buyers):
        qn, mn = interim.q[n], interim.m[n]
        for i, x in enumerate(b.support):
            truthful = qn[i] * x - mn[i]
            if truthful < 0:
                ir.append((n, i))
            for j in range(b.k):
                if j != i and qn[j] * x - mn[j] > truthful:
                    ic.append((n, i, j))
    return ICIRVerdict(tuple(ic), tuple(ir))


def expected_virtual_surplus(
    instance: AuctionInstance, rule, ironed: bool = False, max_profiles: int = DEFAULT_MAX_PROFILES
) -> Fraction:
    """E[sum_n Q_n w_n(X_n)], or with ironed values when ``ironed``."""
    rule = make_rule(instance, rule)
    tables = [ironed_virtual_valuation(b) for b in instance.buyers]
    total = Fraction(0)
    for prof in enumerate_profiles(instance, max_profiles):
        for n in rule.winners(prof.indices):
            t = tables[n]
            total += prof.probability * (t.w_bar if ironed else t.w)[prof.indices[n]]
    return total


def expected_welfare(instance: AuctionInstance, rule, max_profiles: int = DEFAULT_MAX_PROFILES) -> Fraction:
    rule = make_rule(instance, rule)
    total = Fraction(0)
    for prof in enumerate_profiles(instance, max_profiles):
        total += prof.probability * sum((prof.values[n] for n in rule.winners(prof.indices)), Fraction(0))
    return total


def expected_revenue(
    instance: AuctionInstance, rule, scheme: str = "threshold", max_profiles: int = DEFAULT_MAX_PROFILES
) -> Fraction:
    """Expected total payment under truthful bidding.

    With threshold payments the result is cross-checked against the expected
    virtual surplus, and for the ``ironed`` optimal rule against the expected
    ironed surplus.
    """
    rule = make_rule(instance, rule)
    interim_quantities(instance, rule, scheme, max_profiles)  # raises on non-monotone q
    total = Fraction(0)
    for prof in enumerate_profiles(instance, max_profiles):
        total += prof.probability * sum(payments(instance, rule, prof, scheme), Fraction(0))
    if scheme == "threshold":
        vs = expected_virtual_surplus(instance, rule, ironed=False, max_profiles=max_profiles)
        if vs != total:
            raise ArithmeticError(f"revenue {total} differs from expected virtual surplus {vs}")
        if isinstance(rule, OptimalRule) and rule.tie_break == "ironed":
            ivs = expected_virtual_surplus(instance, rule, ironed=True, max_profiles=max_profiles)
            if ivs != total:
                raise ArithmeticError(f"revenue {total} differs from expected ironed surplus {ivs}")
    return total


@dataclass(frozen=True)
class ProfileOutcome:
    profile: TypeProfile
    winners: tuple[int, ...]
    payments: tuple[Fraction, ...]


@dataclass(frozen=True)
class MechanismReport:
    rule: str
    scheme: str
    outcomes: tuple[ProfileOutcome, ...]
    interim: InterimTable
    revenue: Fraction
    welfare: Fraction
    verdict: ICIRVerdict
    tie_break: str | None = None
    extras: dict = field(default_factory=dict)


def run_mechanism(
    instance: AuctionInstance,
    rule="optimal",
    scheme: str = "threshold",
    tie_break: str = "welfare",
    max_profiles: int = DEFAULT_MAX_PROFILES,
) -> MechanismReport:
    rule = make_rule(instance, rule, tie_break)
    outcomes = []
    revenue = welfare = Fraction(0)
    for prof in enumerate_profiles(instance, max_profiles):
        chosen = rule.winners(prof.indices)
        pay = tuple(payments(instance, rule, prof, scheme))
        outcomes.append(ProfileOutcome(prof, chosen, pay))
        revenue += prof.probability * sum(pay, Fraction(0))
        welfare += prof.probability * sum((prof.values[n] for n in chosen), Fraction(0))
    interim = interim_quantities(instance, rule, scheme, max_profiles, check_monotone=False)
    return MechanismReport(
        rule=rule.kind,
        scheme=scheme,
        outcomes=tuple(outcomes),
        interim=interim,
        revenue=revenue,
        welfare=welfare,
        verdict=verify_ic_ir(interim, instance.buyers),
        tie_break=getattr(rule, "tie_break", None),
    )

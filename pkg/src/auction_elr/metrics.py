"""Maximum social welfare and efficiency loss of the optimal auction."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .mechanism import EfficientRule, OptimalRule
from .model import DEFAULT_MAX_PROFILES, AuctionInstance, TypeProfile, enumerate_profiles, make_distribution, to_fraction
from .virtual import reserve_price


@dataclass(frozen=True)
class WelfareReport:
    msw: Fraction
    realized: Fraction
    elr: Fraction
    loss_profiles: tuple[TypeProfile, ...]
    revenue: Fraction | None = None

    @property
    def information_rent_ratio(self) -> Fraction | None:
        if self.revenue is None:
            return None
        return (self.msw - self.revenue) / self.msw


def msw(instance: AuctionInstance, max_profiles: int = DEFAULT_MAX_PROFILES) -> Fraction:
    rule = EfficientRule(instance)
    total = Fraction(0)
    for prof in enumerate_profiles(instance, max_profiles):
        total += prof.probability * sum((prof.values[n] for n in rule.winners(prof.indices)), Fraction(0))
    return total


def elr(instance: AuctionInstance, tie_break: str = "welfare", max_profiles: int = DEFAULT_MAX_PROFILES) -> WelfareReport:
    """Efficiency loss ratio of the maximum-weight auction.

    The default ``welfare`` tie-break selects, among optimal winner sets, the
    one with the largest realized value.
    """
    eff = EfficientRule(instance)
    opt = OptimalRule(instance, tie_break)
    best = realized = Fraction(0)
    losses = []
    for prof in enumerate_profiles(instance, max_profiles):
        we = sum((prof.values[n] for n in eff.winners(prof.indices)), Fraction(0))
        wo = sum((prof.values[n] for n in opt.winners(prof.indices)), Fraction(0))
        assert wo <= we
        best += prof.probability * we
        realized += prof.probability * wo
        if wo != we:
            losses.append(prof)
    assert best > 0
    return WelfareReport(best, realized, (best - realized) / best, tuple(losses))


@dataclass(frozen=True)
class MaxOrderMass:
    z: tuple[Fraction, ...]


def max_order_mass(p: Sequence, n_buyers: int) -> MaxOrderMass:
    """Distribution of the index of max(X_1..X_N) for i.i.d. buyers."""
    ps = [to_fraction(v) for v in p]
    if sum(ps, Fraction(0)) != 1 or any(v <= 0 for v in ps):
        raise ValueError("p must be a positive probability vector")
    out, prev, cum = [], Fraction(0), Fraction(0)
    for v in ps:
        cum += v
        cur = cum**n_buyers
        out.append(cur - prev)
        prev = cur
    return MaxOrderMass(tuple(out))


def single_item_iid_elr(x: Sequence, p: Sequence, n_buyers: int) -> Fraction:
    """Closed-form ELR for a single item sold to N i.i.d. buyers.

    Loss comes only from the item going unsold when every bid is below the
    common reserve.
    """
    dist = make_distribution(x, p)
    z = max_order_mass(dist.probs, n_buyers).z
    _, t = reserve_price(dist)
    weighted = [zi * xi for zi, xi in zip(z, dist.support)]
    return sum(weighted[:t], Fraction(0)) / sum(weighted, Fraction(0))

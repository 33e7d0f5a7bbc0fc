"""Small named instances used as golden cases."""

from __future__ import annotations

from fractions import Fraction

from .model import (
    AuctionInstance,
    feasibility_single_item,
    feasibility_single_minded,
    make_distribution,
    make_instance,
)


def iid_pair() -> AuctionInstance:
    """Two i.i.d. buyers, one item, values {1, 2} w.p. {1/3, 2/3}."""
    d = make_distribution([1, 2], [Fraction(1, 3), Fraction(2, 3)])
    return make_instance([d, d], feasibility_single_item(2))


def strong_weak_pair() -> AuctionInstance:
    """One item; buyer 0 values {5, 10}, buyer 1 values {1, 2}, all halves."""
    half = Fraction(1, 2)
    return make_instance(
        [make_distribution([5, 10], [half, half]), make_distribution([1, 2], [half, half])],
        feasibility_single_item(2),
    )


def single_minded_chain() -> AuctionInstance:
    """Bundles AB, BC, CD; i.i.d. values {1, 8/5} w.p. 1/2 each."""
    d = make_distribution([1, Fraction(8, 5)], [Fraction(1, 2), Fraction(1, 2)])
    return make_instance([d, d, d], feasibility_single_minded([["A", "B"], ["B", "C"], ["C", "D"]]))


CATALOG = {
    "iid-pair": iid_pair,
    "strong-weak": strong_weak_pair,
    "single-minded-chain": single_minded_chain,
}

"""Exact analysis of revenue-optimal auctions and their efficiency loss."""

from .errors import AuctionError, NonConvergenceWarning
from .mechanism import EfficientRule, OptimalRule, expected_revenue, run_mechanism
from .metrics import elr, msw
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
from .virtual import ironed_virtual_valuation, reserve_price, virtual_valuation

__version__ = "0.1.0"

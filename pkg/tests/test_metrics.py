import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from auction_elr.catalog import iid_pair
from auction_elr.generators import random_binary_instance, random_common_low_instance, random_instance
from auction_elr.mechanism import EfficientRule, OptimalRule, expected_revenue
from auction_elr.metrics import elr, max_order_mass, msw, single_item_iid_elr
from auction_elr.model import (
    enumerate_profiles,
    feasibility_identical_items,
    feasibility_single_item,
    make_distribution,
    make_instance,
)
from conftest import distributions

F = Fraction


class TestWelfare:
    def test_msw(self):
        assert msw(iid_pair()) == F(17, 9)
        d = make_distribution([1, 2], [F(1, 3), F(2, 3)])
        assert msw(make_instance([d], feasibility_single_item(1))) == F(5, 3)
        e = make_distribution([2, 3], [F(1, 4), F(3, 4)])
        assert msw(make_instance([d, e], feasibility_identical_items(2, 2))) == d.mean() + e.mean()

    def test_elr_iid_pair(self):
        rep = elr(iid_pair())
        assert rep.elr == F(1, 17)
        assert [p.values for p in rep.loss_profiles] == [(1, 1)]

    def test_single_buyer_worst_binary(self):
        d = make_distribution([1, 2], [F(1, 2), F(1, 2)])
        assert elr(make_instance([d], feasibility_single_item(1))).elr == F(1, 3)

    def test_zero_loss(self):
        d = make_distribution([3, 4], [F(1, 2), F(1, 2)])
        assert elr(make_instance([d, d], feasibility_single_item(2))).elr == 0

    def test_information_rent(self):
        inst = iid_pair()
        rep = elr(inst)
        rev = expected_revenue(inst, OptimalRule(inst, "ironed"))
        assert rep.elr <= (rep.msw - rev) / rep.msw


class TestOrderStatistics:
    def test_examples(self):
        assert max_order_mass([F(1, 3), F(2, 3)], 2).z == (F(1, 9), F(8, 9))
        assert max_order_mass([F(1, 2), F(1, 2)], 3).z == (F(1, 8), F(7, 8))
        assert max_order_mass([F(1, 5), F(4, 5)], 1).z == (F(1, 5), F(4, 5))

    def test_fast_path_examples(self):
        assert single_item_iid_elr([1, 2], [F(1, 3), F(2, 3)], 2) == F(1, 17)
        assert single_item_iid_elr([1, 2], [F(1, 2), F(1, 2)], 1) == F(1, 3)
        assert single_item_iid_elr([3, 4], [F(1, 2), F(1, 2)], 2) == 0

    @given(distributions(4), st.integers(1, 4))
    @settings(max_examples=40)
    def test_fast_path_matches_enumeration(self, d, n):
        inst = make_instance([d] * n, feasibility_single_item(n))
        assert elr(inst).elr == single_item_iid_elr(d.support, d.probs, n)
        assert sum(max_order_mass(d.probs, n).z) == 1


class TestProperties:
    @given(st.integers(0, 10**6))
    @settings(max_examples=80)
    def test_report_identities(self, seed):
        inst = random_instance(random.Random(seed))
        rep = elr(inst)
        eff, opt = EfficientRule(inst), OptimalRule(inst)
        loss = F(0)
        for prof in enumerate_profiles(inst):
            we = sum((prof.values[n] for n in eff.winners(prof.indices)), F(0))
            wo = sum((prof.values[n] for n in opt.winners(prof.indices)), F(0))
            assert we >= wo
            loss += prof.probability * (we - wo)
        assert rep.elr == loss / rep.msw
        assert 0 <= rep.elr < 1 and rep.realized <= rep.msw
        rev = expected_revenue(inst, OptimalRule(inst, "ironed"))
        assert rep.elr <= (rep.msw - rev) / rep.msw

    @given(st.integers(0, 10**6))
    def test_binary_ratio_bound(self, seed):
        inst, r = random_binary_instance(random.Random(seed))
        assert elr(inst).elr <= (r - 1) / (2 * r - 1)

    @given(st.integers(0, 10**6))
    def test_common_low_bound(self, seed):
        inst = random_common_low_instance(random.Random(seed))
        assert elr(inst).elr <= F(1, inst.n_buyers + 1)

    @pytest.mark.parametrize("s, n", [(1, 1), (1, 2), (2, 2), (2, 3), (3, 3), (1, 3)])
    @pytest.mark.parametrize("p", [F(1, 2), F(1, 5), F(1, 20)])
    def test_identical_items_bound(self, s, n, p):
        d = make_distribution([1, 1 / p], [1 - p, p])
        e = elr(make_instance([d] * n, feasibility_identical_items(n, s))).elr
        assert e <= F(s, s + n)

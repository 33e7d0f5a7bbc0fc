import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from auction_elr.catalog import iid_pair, single_minded_chain, strong_weak_pair
from auction_elr.errors import MonotonicityViolated
from auction_elr.generators import random_instance
from auction_elr.lp_oracle import lp_optimal_revenue
from auction_elr.mechanism import (
    EfficientRule,
    InterimTable,
    OptimalRule,
    efficient_allocation,
    expected_revenue,
    expected_virtual_surplus,
    expected_welfare,
    interim_quantities,
    optimal_allocation,
    payments,
    run_mechanism,
    telescoped_payments,
    verify_ic_ir,
)
from auction_elr.model import feasibility_single_item, make_distribution, make_instance
from auction_elr.virtual import ironed_virtual_valuation

F = Fraction


class TestAllocation:
    def test_efficient(self):
        assert efficient_allocation(single_minded_chain(), [1, F(8, 5), 1]) == (0, 2)
        assert efficient_allocation(strong_weak_pair(), [5, 2]) == (0,)
        solo = make_instance([make_distribution([1, 2], [F(1, 2), F(1, 2)])], feasibility_single_item(1))
        assert efficient_allocation(solo, [1]) == (0,)

    def test_optimal(self):
        assert optimal_allocation(single_minded_chain(), [1, F(8, 5), 1]) == (1,)
        assert optimal_allocation(iid_pair(), [1, 1]) == ()
        # both ironed values are exactly zero: nobody may win
        assert optimal_allocation(strong_weak_pair(), [5, 1]) == ()

    def test_welfare_tie_break(self):
        # both bid 2: equal w_bar, equal value, lexicographic choice
        assert optimal_allocation(iid_pair(), [2, 2]) == (0,)


class TestPayments:
    def test_examples(self):
        assert payments(iid_pair(), "optimal", [2, 1]) == [2, 0]
        for low in (1, 2):
            assert payments(strong_weak_pair(), "optimal", [10, low])[0] == 10
        assert payments(iid_pair(), "optimal", [1, 1]) == [0, 0]

    def test_vcg(self):
        inst = iid_pair()
        assert payments(inst, "efficient", [2, 1], "vcg") == [1, 0]
        assert payments(inst, "efficient", [2, 2], "vcg") == [2, 0]
        with pytest.raises(ValueError):
            payments(inst, "optimal", [2, 1], "vcg")

    @given(st.integers(0, 10**6))
    @settings(max_examples=40)
    def test_threshold_is_lowest_winning_bid(self, seed):
        inst = random_instance(random.Random(seed))
        rule = OptimalRule(inst, "ironed")
        from auction_elr.model import enumerate_profiles

        for prof in enumerate_profiles(inst):
            pay = payments(inst, rule, prof)
            for n in range(inst.n_buyers):
                if n not in rule.winners(prof.indices):
                    assert pay[n] == 0
                    continue
                probe = list(prof.indices)
                lowest = None
                for i in range(prof.indices[n] + 1):
                    probe[n] = i
                    if rule.wins(n, probe):
                        lowest = inst.buyers[n].support[i]
                        break
                assert pay[n] == lowest


class TestInterim:
    def test_iid_pair(self):
        t = interim_quantities(iid_pair(), "optimal")
        assert t.q == ((0, 1), (0, F(1, 3)))
        assert verify_ic_ir(t, iid_pair().buyers).passed

    def test_strong_weak(self):
        t = interim_quantities(strong_weak_pair(), "optimal")
        assert t.q[0] == (0, 1) and t.m[0][1] == 10

    def test_single_buyer_posted_price(self):
        d = make_distribution([1, 2], [F(1, 3), F(2, 3)])
        t = interim_quantities(make_instance([d], feasibility_single_item(1)), "optimal")
        assert t.q == ((0, 1),) and t.m == ((0, 2),)

    def test_ir_violation(self):
        d = make_distribution([1, 2], [F(1, 3), F(2, 3)])
        v = verify_ic_ir(InterimTable(((0, F(1)),), ((0, F(3)),)), [d])
        assert not v.ir and (0, 1) in v.ir_violations

    def test_first_price_not_ic(self):
        inst = iid_pair()
        t = interim_quantities(inst, "efficient")
        pay_as_bid = InterimTable(t.q, tuple(tuple(q * x for q, x in zip(qn, b.support)) for qn, b in zip(t.q, inst.buyers)))
        v = verify_ic_ir(pay_as_bid, inst.buyers)
        assert not v.ic and v.ir
        assert any(i == 1 and j == 0 for _, i, j in v.ic_violations)

    def test_non_monotone_rule_rejected(self):
        class Perverse(OptimalRule):
            def _choose(self, idx):
                return (0,) if idx[0] == 0 else ()

        inst = iid_pair()
        with pytest.raises(MonotonicityViolated):
            interim_quantities(inst, Perverse(inst))

    def test_telescoped(self):
        assert telescoped_payments([1, 2, 4], [0, F(1, 2), 1]) == (0, 1, 3)


class TestRevenue:
    def test_examples(self):
        inst = iid_pair()
        assert expected_revenue(inst, "optimal") == F(16, 9)
        assert expected_revenue(inst, "efficient", "vcg") == F(13, 9)
        # the same rule with threshold payments charges 2 whenever the top bid is 2
        assert expected_revenue(inst, "efficient") == F(5, 3)
        assert expected_revenue(strong_weak_pair(), "optimal") == F(11, 2)

    def test_welfare_tie_break_loses_revenue_on_ironed_blocks(self):
        # the two lower points of this prior iron into one positive block
        d = make_distribution([1, 2, 3], [F(7, 10), F(1, 20), F(1, 4)])
        t = ironed_virtual_valuation(d)
        assert t.w_bar[0] == t.w_bar[1] > 0
        inst = make_instance([d, d], feasibility_single_item(2))
        ironed = expected_revenue(inst, OptimalRule(inst, "ironed"))
        welfare = expected_revenue(inst, OptimalRule(inst, "welfare"))
        assert ironed == F(3, 2) == expected_virtual_surplus(inst, OptimalRule(inst, "welfare"), ironed=True)
        assert welfare == F(11, 8) < ironed
        assert abs(lp_optimal_revenue(inst).revenue - 1.5) < 1e-9

    def test_report(self):
        rep = run_mechanism(iid_pair())
        assert rep.revenue == F(16, 9) and rep.welfare == F(16, 9) and rep.verdict.passed
        assert len(rep.outcomes) == 4

    @given(st.integers(0, 10**6), st.sampled_from(["welfare", "ironed"]))
    @settings(max_examples=80)
    def test_properties(self, seed, tie_break):
        inst = random_instance(random.Random(seed))
        opt = OptimalRule(inst, tie_break)
        eff = EfficientRule(inst)
        t = interim_quantities(inst, opt)
        assert verify_ic_ir(t, inst.buyers).passed
        rev = expected_revenue(inst, opt)
        ironed_surplus = expected_virtual_surplus(inst, opt, ironed=True)
        assert rev <= ironed_surplus
        if tie_break == "ironed":
            assert rev == ironed_surplus
            assert rev >= expected_revenue(inst, eff)
        assert expected_virtual_surplus(inst, eff) <= expected_virtual_surplus(inst, eff, ironed=True)
        assert rev <= expected_welfare(inst, opt)
        assert expected_revenue(inst, eff, "vcg") <= expected_welfare(inst, eff)
        tables = [ironed_virtual_valuation(b) for b in inst.buyers]
        from auction_elr.model import enumerate_profiles

        for prof in enumerate_profiles(inst):
            ws = opt.winners(prof.indices)
            assert ws in inst.feasibility
            assert all(tables[n].w_bar[prof.indices[n]] > 0 for n in ws)

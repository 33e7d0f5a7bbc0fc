"""Self-verification suite behind ``auction-elr verify``.

Each group returns a list of ``Check`` records. Randomized checks draw from a
``random.Random(seed)`` per group, so counts and outcomes are reproducible.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import worstcase as wc
from .catalog import iid_pair, single_minded_chain, strong_weak_pair
from .errors import AuctionError, NonConvergenceWarning
from .generators import random_binary_instance, random_common_low_instance, random_distribution, random_instance
from .lp_oracle import lp_optimal_revenue
from .mechanism import (
    EfficientRule,
    OptimalRule,
    expected_revenue,
    expected_virtual_surplus,
    interim_quantities,
    payments,
    verify_ic_ir,
)
from .metrics import elr, single_item_iid_elr
from .virtual import ironed_virtual_valuation, revenue_curve_points

GROUPS = ("examples", "ic-ir", "ironing", "bounds", "certificates")


@dataclass(frozen=True)
class Check:
    group: str
    name: str
    passed: bool
    detail: str = ""


def _check(group: str, name: str, fn: Callable[[], str | None]) -> Check:
    try:
        detail = fn() or ""
        return Check(group, name, True, detail)
    except AssertionError as exc:
        return Check(group, name, False, str(exc))
    except (ValueError, ArithmeticError) as exc:
        return Check(group, name, False, f"{type(exc).__name__}: {exc}")


# --- examples ------------------------------------------------------------------


def _ex_iid_pair() -> str:
    inst = iid_pair()
    opt = OptimalRule(inst, "ironed")
    rev_opt = expected_revenue(inst, opt)
    rev_vcg = expected_revenue(inst, EfficientRule(inst), "vcg")
    table = ironed_virtual_valuation(inst.buyers[0])
    rep = elr(inst)
    assert rev_opt == Fraction(16, 9), f"optimal revenue {rev_opt}"
    assert rev_vcg == Fraction(13, 9), f"second-price revenue {rev_vcg}"
    assert table.reserve_price == 2, f"reserve {table.reserve_price}"
    assert opt.winners((0, 0)) == (), "item sold at (1, 1)"
    assert rep.elr == Fraction(1, 17), f"ELR {rep.elr}"
    return "revenue 16/9 vs 13/9, ELR 1/17"


def _ex_strong_weak() -> str:
    inst = strong_weak_pair()
    opt = OptimalRule(inst, "ironed")
    rev = expected_revenue(inst, opt)
    assert rev == Fraction(11, 2), f"optimal revenue {rev}"
    for j in range(2):
        assert opt.winners((1, j)) == (0,), "buyer 1 must win at bid 10"
        assert payments(inst, opt, [10, j + 1])[0] == 10, "buyer 1 must pay 10"
    return "revenue 11/2"


def _ex_chain() -> str:
    inst = single_minded_chain()
    prof = (0, 1, 0)
    assert OptimalRule(inst).winners(prof) == (1,), "optimal should pick the middle buyer"
    assert EfficientRule(inst).winners(prof) == (0, 2), "efficient should pick the outer buyers"
    return "optimal {2}, efficient {1,3}"


def _ex_closed_forms() -> str:
    for r in (Fraction(3, 2), Fraction(2), Fraction(5), Fraction(100)):
        v = wc.elr_binary_iid(r, 1)
        assert v == (r - 1) / (2 * r - 1), f"binary one-buyer formula at r={r}"
        g = wc.gamma_one_buyer(r, 2)
        assert abs(g.elr - float(v)) < 1e-12, f"one-buyer k=2 at r={r}"
    assert wc.elr_binary_iid(2, 2) == Fraction(1, 7)
    return "binary and one-buyer forms agree"


def _ex_fast_path(rng: random.Random, cases: int) -> Callable[[], str]:
    def run() -> str:
        from .model import feasibility_single_item, make_instance

        for _ in range(cases):
            d = random_distribution(rng, 3)
            n = rng.randint(1, 3)
            inst = make_instance([d] * n, feasibility_single_item(n))
            assert elr(inst).elr == single_item_iid_elr(d.support, d.probs, n), f"fast path at {d}"
        return f"{cases} i.i.d. single-item instances"

    return run


def group_examples(seed: int, cases: int) -> list[Check]:
    rng = random.Random(seed)
    return [
        _check("examples", "iid-pair", _ex_iid_pair),
        _check("examples", "strong-weak", _ex_strong_weak),
        _check("examples", "single-minded-chain", _ex_chain),
        _check("examples", "closed-forms", _ex_closed_forms),
        _check("examples", "single-item-fast-path", _ex_fast_path(rng, min(cases, 100))),
    ]


# --- ic-ir ---------------------------------------------------------------------


def _icir_random(rng: random.Random, cases: int) -> Callable[[], str]:
    def run() -> str:
        for c in range(cases):
            inst = random_instance(rng)
            opt = OptimalRule(inst, "ironed")
            interim = interim_quantities(inst, opt)
            verdict = verify_ic_ir(interim, inst.buyers)
            assert verdict.passed, f"case {c}: IC/IR violations {verdict}"
            rev = expected_revenue(inst, opt)
            assert rev == expected_virtual_surplus(inst, opt, ironed=True), f"case {c}: revenue != E[Q w_bar]"
            eff = EfficientRule(inst)
            assert expected_virtual_surplus(inst, eff) <= rev, f"case {c}: efficient virtual surplus above optimum"
        return f"{cases} instances"

    return run


def _icir_lp(rng: random.Random, cases: int) -> Callable[[], str]:
    def run() -> str:
        worst = 0.0
        for c in range(cases):
            inst = random_instance(rng, n_max=2)
            lp = lp_optimal_revenue(inst)
            assert lp.status == 0, f"case {c}: LP status {lp.message}"
            rev = expected_revenue(inst, OptimalRule(inst, "ironed"))
            worst = max(worst, abs(lp.revenue - float(rev)))
            assert worst <= 1e-8, f"case {c}: LP {lp.revenue} vs {rev}"
        return f"{cases} instances, max gap {worst:.2e}"

    return run


def group_icir(seed: int, cases: int) -> list[Check]:
    rng = random.Random(seed)
    return [
        _check("ic-ir", "optimal-rule-properties", _icir_random(rng, cases)),
        _check("ic-ir", "lp-oracle", _icir_lp(rng, min(cases, 50))),
    ]


# --- ironing -------------------------------------------------------------------


def _ironing_random(rng: random.Random, cases: int) -> Callable[[], str]:
    def run() -> str:
        for c in range(cases):
            d = random_distribution(rng, 6)
            t = ironed_virtual_valuation(d)
            assert all(a <= b for a, b in zip(t.w_bar, t.w_bar[1:])), f"case {c}: w_bar not monotone"
            # mass-weighted sums of w and w_bar agree on every block
            for b in set(t.blocks):
                members = [i for i in range(d.k) if t.blocks[i] == b]
                sw = sum((d.probs[i] * t.w[i] for i in members), Fraction(0))
                sb = sum((d.probs[i] * t.w_bar[i] for i in members), Fraction(0))
                assert sw == sb, f"case {c}: block {b} not mean-preserving"
            # the ironed curve lies on or below the revenue curve
            pts = revenue_curve_points(d)
            for g, y in pts:
                assert _hull_value(t.hull_points, g) <= y, f"case {c}: hull above curve"
        return f"{cases} distributions"

    return run


def _hull_value(hull, g: Fraction) -> Fraction:
    for (g0, y0), (g1, y1) in zip(hull, hull[1:]):
        if g0 <= g <= g1:
            return y0 + (y1 - y0) * (g - g0) / (g1 - g0)
    raise AssertionError("point outside hull range")


def group_ironing(seed: int, cases: int) -> list[Check]:
    rng = random.Random(seed)
    return [_check("ironing", "hull-and-blocks", _ironing_random(rng, cases))]


# --- bounds --------------------------------------------------------------------


def _bounds_binary(rng: random.Random, cases: int) -> Callable[[], str]:
    def run() -> str:
        for c in range(cases):
            inst, ratio = random_binary_instance(rng)
            bound = (ratio - 1) / (2 * ratio - 1)
            e = elr(inst).elr
            assert e <= bound, f"case {c}: ELR {e} above {bound}"
        return f"{cases} instances"

    return run


def _bounds_common_low(rng: random.Random, cases: int) -> Callable[[], str]:
    def run() -> str:
        for c in range(cases):
            inst = random_common_low_instance(rng)
            e = elr(inst).elr
            assert e <= Fraction(1, inst.n_buyers + 1), f"case {c}: ELR {e}"
        return f"{cases} instances"

    return run


def _bounds_limits() -> str:
    out = []
    for s, n in ((1, 2), (2, 3), (2, 4)):
        table = wc.identical_items_limit_check(s, n, [Fraction(1, 5), Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000)])
        assert table.never_exceeds, f"S={s}, N={n}: bound exceeded"
        assert table.monotone_approach, f"S={s}, N={n}: approach not monotone"
        assert abs(table.rows[-1].gap) < Fraction(1, 100), f"S={s}, N={n}: gap {float(table.rows[-1].gap)}"
        out.append(f"({s},{n}) gap {float(table.rows[-1].gap):.1e}")
    return ", ".join(out)


def _bounds_sandwich() -> str:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonConvergenceWarning)
        for r in (2, 4):
            for k in (3, 4, 5, 6):
                for n in (1, 2, 3):
                    lo, hi = wc.gamma_bounds(r, k, n)
                    g = wc.optimize_gamma(r, k, n).gamma
                    assert lo.gamma - 1e-9 <= g <= hi.gamma + hi.truncation_error + 1e-9, f"r={r} k={k} n={n}"
    return "24 grid points"


def _bounds_trends() -> str:
    # finite-grid stand-ins for the K, r and N limits
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonConvergenceWarning)
        for r in (2, 4, 10):
            for n in (1, 2, 3):
                etas = [wc.optimize_gamma(r, k, n).elr for k in range(2, 7)]
                assert all(b >= a - 1e-9 for a, b in zip(etas, etas[1:])), f"eta not nondecreasing in k at r={r}, n={n}"
                cap = (1 - 1 / r) ** n
                assert all(e <= cap + 1e-12 for e in etas), f"eta above (1-1/r)^N at r={r}, n={n}"
            one = [wc.gamma_one_buyer(r, k).elr for k in range(2, 9)]
            assert all(b > a for a, b in zip(one, one[1:])), f"one-buyer eta not increasing in k at r={r}"
            assert one[-1] < 1 - 1 / r, "one-buyer eta above its k -> infinity limit"
        binary = [[float(wc.elr_binary_iid(Fraction(r), n)) for r in (2, 4, 16, 256)] for n in (1, 2, 3, 4)]
        for n, row in enumerate(binary, start=1):
            assert all(b > a for a, b in zip(row, row[1:])), f"binary eta not increasing in r at N={n}"
            assert row[-1] < 1 / (n + 1), f"binary eta above 1/(N+1) at N={n}"
        for col in zip(*binary):
            assert all(b < a for a, b in zip(col, col[1:])), "binary eta not decreasing in N"
    return "monotone in k, r and N on grids"


def group_bounds(seed: int, cases: int) -> list[Check]:
    rng = random.Random(seed)
    return [
        _check("bounds", "binary-ratio-bound", _bounds_binary(rng, cases)),
        _check("bounds", "identical-items-limit", _bounds_limits),
        _check("bounds", "common-low-bound", _bounds_common_low(rng, min(cases, 200))),
        _check("bounds", "series-sandwich", _bounds_sandwich),
        _check("bounds", "finite-grid-trends", _bounds_trends),
    ]


# --- certificates --------------------------------------------------------------


def _cert_one_buyer() -> str:
    worst = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonConvergenceWarning)
        for r in (2, 4, 10):
            for k in (2, 3, 4, 5):
                closed = (k - 1) * (1 - r ** (-1 / (k - 1)))
                worst = max(worst, abs(wc.optimize_gamma(r, k, 1).gamma - closed))
    assert worst < 1e-6, f"max gap {worst}"
    return f"max gap {worst:.1e}"


def _cert_realizable() -> str:
    count = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonConvergenceWarning)
        for r in (2, 4):
            for k in (2, 3, 4):
                for n in (1, 2, 3):
                    res = wc.optimize_gamma(r, k, n)
                    cert = res.certificate
                    inst = wc.certificate_instance(cert, r, n)
                    claimed = wc.elr_from_gamma(wc.gamma_objective(cert, n), Fraction(r), n)
                    got = elr(inst).elr
                    assert got == claimed, f"r={r} k={k} n={n}: {got} != {claimed}"
                    assert abs(float(got) - res.elr) < 1e-9, f"r={r} k={k} n={n}: certificate drifted"
                    count += 1
    return f"{count} certificates"


def _cert_adversarial() -> str:
    inst = wc.adversarial_instance(4, 3, 2, Fraction(1, 100))
    got = float(elr(inst).elr)
    bound = wc.different_priors_lower_bound(4 / 1.01, 3)
    assert got >= bound - 1e-3, f"ELR {got} below bound {bound}"
    return f"ELR {got:.5f} vs bound {bound:.5f}"


def group_certificates(seed: int, cases: int) -> list[Check]:
    return [
        _check("certificates", "one-buyer-optimizer", _cert_one_buyer),
        _check("certificates", "realizability", _cert_realizable),
        _check("certificates", "adversarial", _cert_adversarial),
    ]


RUNNERS = {
    "examples": group_examples,
    "ic-ir": group_icir,
    "ironing": group_ironing,
    "bounds": group_bounds,
    "certificates": group_certificates,
}


def run_verify(groups=None, seed: int = 0, cases: int = 500) -> list[Check]:
    selected = list(groups) if groups else list(GROUPS)
    for g in selected:
        if g not in RUNNERS:
            raise AuctionError(f"unknown verify group {g!r}")
    checks = []
    for g in selected:
        checks.extend(RUNNERS[g](seed, cases))
    return checks

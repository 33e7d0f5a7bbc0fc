"""Command-line front end: ``auction-elr {analyze,worstcase,sweep,verify}``.

Exit codes: 0 success, 1 invalid input, 2 profile space above the cap.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
import warnings
from fractions import Fraction
from pathlib import Path

from . import worstcase as wc
from .errors import AuctionError, NonConvergenceWarning, ParseError, ProfileSpaceTooLarge
from .io import load_instance, save_instance
from .mechanism import EfficientRule, OptimalRule, expected_revenue, payments
from .metrics import elr
from .model import DEFAULT_MAX_PROFILES, enumerate_profiles, to_fraction
from .verify import GROUPS, run_verify
from .virtual import ironed_virtual_valuation

REGIMES = ("binary-iid", "one-buyer", "iid-bounds", "iid-numeric", "different-priors-lb")
SWEEP_COLUMNS = ("regime", "r", "k", "n", "elr_lower", "elr_upper", "elr_value", "gamma", "truncation_error")


def fmt(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _winners(ws) -> str:
    return "{" + ",".join(str(n + 1) for n in ws) + "}"


# --- analyze -------------------------------------------------------------------


def analyze_rows(instance, max_profiles: int, show_profiles: int, with_threshold: bool) -> list[tuple]:
    """Report as (section, buyer, index, key, value) rows; buyers and indices 1-based."""
    rows = []
    for n, dist in enumerate(instance.buyers):
        t = ironed_virtual_valuation(dist)
        for i, (x, p) in enumerate(zip(dist.support, dist.probs)):
            rows.append(("buyer", n + 1, i + 1, "value", x))
            rows.append(("buyer", n + 1, i + 1, "prob", p))
            rows.append(("buyer", n + 1, i + 1, "w", t.w[i]))
            rows.append(("buyer", n + 1, i + 1, "w_bar", t.w_bar[i]))
        rows.append(("buyer", n + 1, "", "reserve_price", t.reserve_price))

    opt = OptimalRule(instance, "ironed")
    eff = EfficientRule(instance)
    for c, prof in enumerate(enumerate_profiles(instance, max_profiles)):
        if c >= show_profiles:
            break
        label = "(" + ", ".join(str(v) for v in prof.values) + ")"
        win = opt.winners(prof.indices)
        pay = payments(instance, opt, prof)
        rows.append(("profile", "", c + 1, "values", label))
        rows.append(("profile", "", c + 1, "probability", prof.probability))
        rows.append(("profile", "", c + 1, "optimal_winners", _winners(win)))
        rows.append(("profile", "", c + 1, "optimal_payments", " ".join(str(pay[n]) for n in range(instance.n_buyers))))
        rows.append(("profile", "", c + 1, "efficient_winners", _winners(eff.winners(prof.indices))))

    rep = elr(instance, max_profiles=max_profiles)
    rows.append(("summary", "", "", "msw", rep.msw))
    rows.append(("summary", "", "", "realized_welfare", rep.realized))
    rows.append(("summary", "", "", "revenue_optimal", expected_revenue(instance, opt, max_profiles=max_profiles)))
    rows.append(("summary", "", "", "revenue_optimal_welfare_tiebreak",
                 expected_revenue(instance, OptimalRule(instance, "welfare"), max_profiles=max_profiles)))
    rows.append(("summary", "", "", "revenue_efficient", expected_revenue(instance, eff, "vcg", max_profiles)))
    if with_threshold:
        rows.append(("summary", "", "", "revenue_efficient_threshold", expected_revenue(instance, eff, "threshold", max_profiles)))
    rows.append(("summary", "", "", "elr", rep.elr))
    return rows


def _render_text(rows, out) -> None:
    section = None
    for sec, buyer, idx, key, value in rows:
        if sec == "buyer":
            if section != ("buyer", buyer):
                section = ("buyer", buyer)
                out.write(f"buyer {buyer}\n")
            if key == "reserve_price":
                out.write(f"  reserve price: {fmt(value)}\n")
            else:
                out.write(f"  [{idx}] {key:<6} {fmt(value)}\n")
        elif sec == "profile":
            if section != "profile":
                section = "profile"
                out.write("profiles\n")
            out.write(f"  #{idx} {key}: {fmt(value)}\n")
        else:
            if section != "summary":
                section = "summary"
                out.write("summary\n")
            out.write(f"  {key}: {fmt(value)}\n")


def cmd_analyze(args, out) -> int:
    instance = load_instance(args.instance)
    rows = analyze_rows(instance, args.max_profiles, args.show_profiles, args.threshold_efficient)
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(("section", "buyer", "index", "key", "value"))
        w.writerows((s, b, i, k, fmt(v)) for s, b, i, k, v in rows)
    else:
        _render_text(rows, out)
    return 0


# --- worstcase -----------------------------------------------------------------


def _gamma_one_buyer_exact(r: Fraction, k: int) -> Fraction | None:
    lam = wc._root_exact(1 / r, k - 1)
    return None if lam is None else (k - 1) * (1 - lam)


def cmd_worstcase(args, out) -> int:
    r = to_fraction(args.r)
    k, n = args.k, args.n
    regime = args.regime
    emit = None
    if regime == "binary-iid":
        v = wc.elr_binary_iid(r, n)
        out.write(f"elr: {fmt(v)}\nelr_float: {float(v)!r}\n")
        emit = wc.certificate_instance((1 - 1 / r, 1 / r), r, n)
    elif regime == "one-buyer":
        res = wc.gamma_one_buyer(r, k)
        exact = _gamma_one_buyer_exact(r, k)
        if exact is not None:
            out.write(f"gamma: {fmt(exact)}\nelr: {fmt(exact / (1 + exact))}\n")
        out.write(f"gamma_float: {res.gamma!r}\nelr_float: {res.elr!r}\n")
        if k <= wc.CERT_MAX_K:
            dist = wc.worst_distribution_one_buyer(r, k)
            out.write("support: " + " ".join(map(str, dist.support)) + "\n")
            out.write("probs: " + " ".join(map(str, dist.probs)) + "\n")
            emit = wc.certificate_instance(dist.probs, r, 1)
    elif regime == "iid-bounds":
        lo, hi = wc.gamma_bounds(r, k, n, args.terms)
        out.write(f"gamma_lower: {lo.gamma!r}\ngamma_upper: {hi.gamma!r}\n")
        out.write(f"elr_lower: {lo.elr!r}\nelr_upper: {hi.elr!r}\n")
        out.write(f"terms: {lo.terms} {hi.terms}\ntruncation_error: {max(lo.truncation_error, hi.truncation_error)!r}\n")
    elif regime == "iid-numeric":
        cfg = wc.OptimizerConfig(starts=args.starts, seed=args.seed)
        res = wc.optimize_gamma(r, k, n, cfg)
        out.write(f"gamma: {res.gamma!r}\nelr: {res.elr!r}\n")
        out.write(f"converged: {res.converged}\nresidual: {res.residual:.3e}\nevaluations: {res.evaluations}\n")
        out.write("certificate: " + " ".join(map(str, res.certificate)) + "\n")
        if k >= 3:
            lo, hi = wc.gamma_bounds(r, k, n)
            out.write(f"elr_lower: {lo.elr!r}\nelr_upper: {hi.elr!r}\n")
        emit = wc.certificate_instance(res.certificate, r, n)
    else:
        bound = wc.different_priors_lower_bound(r, k)
        out.write(f"lower_bound: {bound!r}\n")
        if args.epsilon is not None:
            eps = to_fraction(args.epsilon)
            emit = wc.adversarial_instance(r, k, n, eps)
            got = elr(emit).elr
            out.write(f"adversarial_elr: {fmt(got)}\nadversarial_elr_float: {float(got)!r}\n")
            out.write(f"bound_at_scaled_ratio: {wc.different_priors_lower_bound(r / (1 + eps), k)!r}\n")
    if args.emit_instance:
        if emit is None:
            raise AuctionError(f"regime {regime} has no instance to emit" + (" (pass --epsilon)" if regime == "different-priors-lb" else ""))
        save_instance(emit, args.emit_instance)
        out.write(f"instance written to {args.emit_instance}\n")
    return 0


# --- sweep ---------------------------------------------------------------------


def _grid(spec: dict, key: str, default, cast):
    vals = spec.get(key, default)
    if not isinstance(vals, list):
        vals = [vals]
    if not vals:
        raise AuctionError(f"sweep spec: grid '{key}' is empty")
    try:
        return [cast(v) for v in vals]
    except (TypeError, ValueError, ZeroDivisionError):
        raise AuctionError(f"sweep spec: bad value in grid '{key}'") from None


def _int(v) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValueError(v)
    return v


def sweep_rows(spec: dict) -> list[dict]:
    regime = spec.get("regime")
    if regime not in REGIMES:
        raise AuctionError(f"sweep spec: regime must be one of {', '.join(REGIMES)}")
    rs = _grid(spec, "r", None, to_fraction)
    ks = _grid(spec, "k", [2] if regime == "binary-iid" else None, _int)
    ns = _grid(spec, "n", [1], _int)
    for r in rs:
        if not r > 1:
            raise AuctionError(f"sweep spec: r must exceed 1, got {r}")
    for v in ks + ns:
        if v < 1:
            raise AuctionError("sweep spec: k and n must be positive")
    opt = spec.get("optimizer", {})
    cfg = wc.OptimizerConfig(starts=int(opt.get("starts", 32)), seed=int(opt.get("seed", 0)),
                             tol=float(opt.get("tol", 1e-8)), max_evals=int(opt.get("max_evals", 100_000)))
    rows = []
    for r in rs:
        for k in ks:
            for n in ns:
                row = dict.fromkeys(SWEEP_COLUMNS, "")
                row.update(regime=regime, r=str(r), k=k, n=n)
                if regime == "binary-iid":
                    v = wc.elr_binary_iid(r, n)
                    row.update(elr_value=str(v), gamma=repr(float((1 - 1 / r) ** n)))
                elif regime == "one-buyer":
                    res = wc.gamma_one_buyer(r, k)
                    row.update(elr_value=repr(res.elr), gamma=repr(res.gamma))
                elif regime == "iid-bounds":
                    lo, hi = wc.gamma_bounds(r, k, n)
                    row.update(elr_lower=repr(lo.elr), elr_upper=repr(hi.elr),
                               truncation_error=repr(max(lo.truncation_error, hi.truncation_error)))
                elif regime == "iid-numeric":
                    res = wc.optimize_gamma(r, k, n, cfg)
                    row.update(elr_value=repr(res.elr), gamma=repr(res.gamma))
                    if k >= 3:
                        lo, hi = wc.gamma_bounds(r, k, n)
                        row.update(elr_lower=repr(lo.elr), elr_upper=repr(hi.elr),
                                   truncation_error=repr(max(lo.truncation_error, hi.truncation_error)))
                else:
                    row.update(elr_lower=repr(wc.different_priors_lower_bound(r, k)))
                rows.append(row)
    return rows


def cmd_sweep(args, out) -> int:
    try:
        spec = json.loads(Path(args.spec).read_text())
    except OSError as exc:
        raise ParseError(f"{args.spec}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{args.spec}: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(spec, dict):
        raise ParseError("sweep spec must be a JSON object")
    rows = sweep_rows(spec)
    buf = _io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    target = args.output or spec.get("output")
    if target:
        Path(target).write_text(buf.getvalue())
        out.write(f"{len(rows)} rows written to {target}\n")
    else:
        out.write(buf.getvalue())
    return 0


# --- verify --------------------------------------------------------------------


def cmd_verify(args, out) -> int:
    checks = run_verify(args.group, seed=args.seed, cases=args.cases)
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        out.write(f"[{status}] {c.group}/{c.name}: {c.detail}\n")
    groups = list(dict.fromkeys(c.group for c in checks))
    for g in groups:
        ok = all(c.passed for c in checks if c.group == g)
        out.write(f"group {g}: {'pass' if ok else 'FAIL'}\n")
    return 0 if all(c.passed for c in checks) else 1


# --- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="auction-elr", description="Optimal auctions and their efficiency loss.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyze an instance file")
    p.add_argument("instance", help="instance JSON file")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--max-profiles", type=int, default=DEFAULT_MAX_PROFILES)
    p.add_argument("--show-profiles", type=int, default=50, help="profiles listed in the report (default 50)")
    p.add_argument("--threshold-efficient", action="store_true",
                   help="also report the efficient rule with threshold payments")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("worstcase", help="worst-case ELR values and bounds")
    p.add_argument("regime", choices=REGIMES)
    p.add_argument("--r", required=True, help="value ratio, e.g. 4 or 7/2")
    p.add_argument("--k", type=int, default=2, help="support size (default 2)")
    p.add_argument("--n", type=int, default=1, help="number of buyers (default 1)")
    p.add_argument("--terms", type=int, help="series terms for iid-bounds")
    p.add_argument("--starts", type=int, default=32, help="optimizer multi-starts for iid-numeric")
    p.add_argument("--seed", type=int, default=0, help="optimizer seed")
    p.add_argument("--epsilon", help="slack for the different-priors construction")
    p.add_argument("--emit-instance", metavar="PATH", help="write the extremal instance as JSON")
    p.set_defaults(func=cmd_worstcase)

    p = sub.add_parser("sweep", help="parameter sweep to CSV")
    p.add_argument("spec", help="sweep spec JSON file")
    p.add_argument("--output", help="CSV path (overrides the spec's output)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the self-verification suite")
    p.add_argument("--seed", type=int, default=0, help="seed for the randomized checks")
    p.add_argument("--cases", type=int, default=500, help="random cases per randomized check")
    p.add_argument("--group", action="append", choices=GROUPS, help="restrict to a group (repeatable)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always", NonConvergenceWarning)
            return args.func(args, out)
    except ProfileSpaceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (AuctionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

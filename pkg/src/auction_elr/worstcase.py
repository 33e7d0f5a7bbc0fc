"""Worst-case efficiency loss: closed forms, series bounds, search, and
adversarial constructions.

``gamma`` throughout is the value of the reduced problem over the common
probability vector ``p`` with ``p_K = 1/r``; the worst-case ELR follows from
it through :func:`elr_from_gamma`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import AuctionError, KTooSmall, NonConvergenceWarning
from .metrics import elr as instance_elr
from .model import (
    AuctionInstance,
    ValuationDistribution,
    feasibility_identical_items,
    feasibility_single_item,
    make_distribution,
    make_instance,
    to_fraction,
)

SERIES_TOL = 1e-9
CERT_MAX_DENOMINATOR = 10**6


@dataclass(frozen=True)
class GammaResult:
    gamma: float
    elr: float
    certificate: tuple[Fraction, ...] | None = None
    truncation_error: float = 0.0
    converged: bool = True
    residual: float = 0.0
    evaluations: int = 0
    terms: int | None = None


@dataclass(frozen=True)
class OptimizerConfig:
    starts: int = 32
    seed: int = 0
    tol: float = 1e-8
    max_evals: int = 100_000
    floor: float = 1e-15


def _check_r(r) -> None:
    if not r > 1:
        raise AuctionError(f"value ratio r must exceed 1, got {r}")


def _check_k(k: int) -> None:
    if k < 2:
        raise KTooSmall(f"support size k must be at least 2, got {k}")


def normalizer(r, n: int):
    """(r^N - (r-1)^N) / r^(N-1): top-type welfare term after scaling."""
    return (r**n - (r - 1) ** n) / r ** (n - 1)


def elr_from_gamma(gamma, r, n: int):
    return gamma / (normalizer(r, n) + gamma)


def elr_binary_iid(r, n_buyers: int):
    """Worst-case ELR for a single item, N i.i.d. buyers with two values.

    Exact when ``r`` is an int or Fraction.
    """
    _check_r(r)
    if isinstance(r, (int, Fraction)):
        r = Fraction(r)
        return (r - 1) ** n_buyers / (r ** (n_buyers + 1) - (r - 1) ** (n_buyers + 1))
    ratio = r / (r - 1)
    return 1.0 / sum(ratio**i for i in range(n_buyers + 1))


def _root_exact(r: Fraction, k: int) -> Fraction | None:
    """r ** (1/k) when it is rational."""
    def iroot(v: int) -> int | None:
        c = round(v ** (1.0 / k))
        for cand in (c - 1, c, c + 1):
            if cand >= 0 and cand**k == v:
                return cand
        return None

    a, b = iroot(r.numerator), iroot(r.denominator)
    if a is None or b is None:
        return None
    return Fraction(a, b)


def geometric_ratio(target, k: int, max_denominator: int = 10**12) -> Fraction:
    """Rational lam >= target**(1/(k-1)) close to it; exact when possible.

    Rounding up keeps the constructed support inside the ratio budget.
    """
    t = to_fraction(target)
    if k == 1:
        return Fraction(1)
    exact = _root_exact(t, k - 1)
    if exact is not None:
        return exact
    lam = Fraction(float(t) ** (1.0 / (k - 1))).limit_denominator(max_denominator)
    step = Fraction(1, max_denominator)
    while lam ** (k - 1) < t:
        lam += step
    return lam


CERT_MAX_K = 64


def _gamma_one_buyer_value(r, k: int) -> float:
    return (k - 1) * (1.0 - float(r) ** (-1.0 / (k - 1)))


def gamma_one_buyer(r, k: int) -> GammaResult:
    """Closed-form one-buyer gamma; the certificate is attached for k <= 64."""
    _check_r(r)
    _check_k(k)
    gamma = _gamma_one_buyer_value(r, k)
    cert = worst_distribution_one_buyer(r, k).probs if k <= CERT_MAX_K else None
    return GammaResult(gamma=gamma, elr=gamma / (1.0 + gamma), certificate=cert)


def worst_distribution_one_buyer(r, k: int, max_denominator: int = 10**12) -> ValuationDistribution:
    """Single-buyer prior attaining the worst-case ELR for ratio r and k values.

    Masses are geometric with ratio lam = r^(-1/(k-1)) and values make every
    price equally profitable, so the seller only sells at the top value. lam
    is rounded up to a rational when irrational; the resulting ELR falls short
    of the closed form by at most (k-1) * |lam_q - lam|.
    """
    _check_r(r)
    _check_k(k)
    rq = to_fraction(r)
    lam = geometric_ratio(1 / rq, k, max_denominator)
    probs = [lam**i * (1 - lam) for i in range(k - 1)] + [lam ** (k - 1)]
    support = [rq * lam ** (k - 1 - i) for i in range(k)]
    return make_distribution(support, probs)


def _series_terms(a: float, n: int, tol: float) -> int:
    if a <= 0:
        return n
    m = max(64, n + math.ceil(math.log(1e9) / math.log(1.0 / a)))
    while n * a ** (m + 1) / ((m + 1) * (1 - a)) > tol:
        m *= 2
    return m


def _series_result(a: float, r: float, n: int, terms: int) -> GammaResult:
    gamma = _kernels.log_tail(a, n, terms)
    trunc = n * a ** (terms + 1) / ((terms + 1) * (1 - a)) if a > 0 else 0.0
    return GammaResult(gamma=gamma, elr=elr_from_gamma(gamma, r, n), truncation_error=trunc, terms=terms)


def gamma_bounds(r, k: int, n_buyers: int, terms: int | None = None) -> tuple[GammaResult, GammaResult]:
    """Lower and upper series bounds on gamma for k >= 3.

    Both are partial sums up to index ``terms``; the neglected tail is at most
    ``truncation_error``. The default term count drives that below 1e-9.
    """
    _check_r(r)
    if k < 3:
        raise KTooSmall("series bounds need k >= 3; use elr_binary_iid for k = 2")
    rf = float(r)
    a_hi = 1.0 - 1.0 / rf
    a_lo = a_hi * (1.0 - 1.0 / (k - 1))
    m_lo = terms if terms is not None else _series_terms(a_lo, n_buyers, SERIES_TOL)
    m_hi = terms if terms is not None else _series_terms(a_hi, n_buyers, SERIES_TOL)
    if min(m_lo, m_hi) < n_buyers:
        raise ValueError("terms must be at least n_buyers")
    return _series_result(a_lo, rf, n_buyers, m_lo), _series_result(a_hi, rf, n_buyers, m_hi)


def log_tail_closed_form(a: float, n: int) -> float:
    """n * sum_{i>=n} a^i / i = -n (ln(1-a) + sum_{i<n} a^i / i)."""
    return -n * (math.log1p(-a) + sum(a**i / i for i in range(1, n)))


def gamma_objective(p: Sequence, n_buyers: int):
    """sum_{i<K} z_i / P[X >= x_i] for a full probability vector ``p``.

    Works on floats or Fractions; Fractions give an exact value.
    """
    out = 0
    cum = 0
    for pi in list(p)[:-1]:
        nxt = cum + pi
        out += (nxt**n_buyers - cum**n_buyers) / (1 - cum)
        cum = nxt
    return out


def optimize_gamma(r, k: int, n_buyers: int, config: OptimizerConfig | None = None) -> GammaResult:
    """Best gamma found by multi-start projected gradient ascent.

    Starts are the equal-mass vector plus ``starts - 1`` seeded Dirichlet
    draws. The best start wins. Starts within 1e-12 (relative) of the best
    are tied: the earliest converged one is kept, else the earliest.
    """
    _check_r(r)
    _check_k(k)
    cfg = config or OptimizerConfig()
    rq = to_fraction(r)
    rf = float(r)
    total = 1.0 - 1.0 / rf
    m = k - 1

    if m == 1:
        gamma = total**n_buyers
        cert = (1 - 1 / rq, 1 / rq)
        return GammaResult(gamma=gamma, elr=elr_from_gamma(gamma, rf, n_buyers), certificate=cert, evaluations=0)

    rng = np.random.default_rng(cfg.seed)
    starts = [np.full(m, total / m)]
    for _ in range(max(cfg.starts, 1) - 1):
        starts.append(rng.dirichlet(np.ones(m)) * total)

    runs = []
    evals_total = 0
    for s in starts:
        d, f, evals, res = _kernels.ascend(s, n_buyers, total, cfg.floor, cfg.max_evals, cfg.tol)
        evals_total += int(evals)
        if res >= cfg.tol and m > 1:
            d, f, evals, res = _kernels.newton_polish(np.array(d), n_buyers, total, cfg.floor, cfg.tol)
            evals_total += int(evals)
        runs.append((np.array(d), float(f), float(res)))

    top = max(f for _, f, _ in runs)
    # starts within rounding of the best value count as tied; prefer a converged one
    tied = [run for run in runs if run[1] >= top - 1e-12 * max(1.0, abs(top))]
    d, f, res = next((run for run in tied if run[2] < cfg.tol), tied[0])
    converged = res < cfg.tol
    if not converged:
        warnings.warn(
            f"optimize_gamma(r={r}, k={k}, n={n_buyers}) stopped with residual {res:.3e} > {cfg.tol:.1e}",
            NonConvergenceWarning,
            stacklevel=2,
        )
    cert = rationalize_certificate(d, rq)
    return GammaResult(
        gamma=f,
        elr=elr_from_gamma(f, rf, n_buyers),
        certificate=cert,
        converged=converged,
        residual=res,
        evaluations=evals_total,
    )


def rationalize_certificate(d: Sequence[float], r: Fraction, max_denominator: int = CERT_MAX_DENOMINATOR) -> tuple[Fraction, ...]:
    """Exact probability vector near ``(d, 1/r)`` with p_K = 1/r exactly.

    Masses below the top sit on the grid 1/D with D = max_denominator times
    the denominator of 1/r, so the rounding residue lands on the same grid.
    """
    top = 1 / r
    budget = 1 - top
    den = max_denominator * top.denominator
    q = [Fraction(max(round(float(v) * den), 1), den) for v in d]
    # absorb rounding in the largest coordinate
    j = max(range(len(q)), key=lambda i: q[i])
    q[j] = budget - (sum(q, Fraction(0)) - q[j])
    if q[j] <= 0:
        raise ArithmeticError("certificate rationalization produced a nonpositive mass")
    return tuple(q) + (top,)


def certificate_instance(p: Sequence, r, n_buyers: int) -> AuctionInstance:
    """Single-item i.i.d. instance realizing ``p`` with values r p_K / P[X >= x_i].

    Every price is equally profitable, so the reserve sits at the top value.
    """
    ps = [to_fraction(v) for v in p]
    rq = to_fraction(r)
    tails = [sum(ps[i:], Fraction(0)) for i in range(len(ps))]
    xs = [rq * ps[-1] / t for t in tails]
    dist = make_distribution(xs, ps)
    return make_instance([dist] * n_buyers, feasibility_single_item(n_buyers))


def different_priors_lower_bound(r, k: int) -> float:
    _check_r(r)
    _check_k(k)
    g = _gamma_one_buyer_value(r, k)
    return (g - (1.0 - 1.0 / float(r))) / (1.0 + g)


def adversarial_instance(r, k: int, n_buyers: int, epsilon, max_denominator: int = CERT_MAX_DENOMINATOR) -> AuctionInstance:
    """Single item; the last buyer dominates the others, who all value it at 1.

    The dominant buyer's masses are geometric with ratio lam, lam^(k-1) =
    (1+eps)/r, and values (1+eps)/P[X >= x_i]: every virtual value below the
    top is exactly zero, so he is served only at his top value.
    """
    _check_r(r)
    _check_k(k)
    eps = to_fraction(epsilon)
    rq = to_fraction(r)
    if eps <= 0 or not rq / (1 + eps) > 1:
        raise AuctionError("need epsilon > 0 and r / (1 + epsilon) > 1")
    c = 1 + eps
    lam = geometric_ratio(c / rq, k, max_denominator)
    probs = [lam**i * (1 - lam) for i in range(k - 1)] + [lam ** (k - 1)]
    support = [c / lam**i for i in range(k)]
    dominant = make_distribution(support, probs)
    filler = make_distribution([1], [1])
    return make_instance([filler] * (n_buyers - 1) + [dominant], feasibility_single_item(n_buyers))


@dataclass(frozen=True)
class LimitRow:
    p: Fraction
    elr: Fraction
    bound: Fraction

    @property
    def gap(self) -> Fraction:
        return self.bound - self.elr


@dataclass(frozen=True)
class LimitTable:
    s: int
    n_buyers: int
    rows: tuple[LimitRow, ...] = field(default_factory=tuple)

    @property
    def bound(self) -> Fraction:
        return Fraction(self.s, self.s + self.n_buyers)

    @property
    def never_exceeds(self) -> bool:
        return all(row.elr <= row.bound for row in self.rows)

    @property
    def monotone_approach(self) -> bool:
        """Gap shrinks along the sweep order (p decreasing)."""
        gaps = [row.gap for row in self.rows]
        return all(b <= a for a, b in zip(gaps, gaps[1:]))


def binary_iid_identical_items(s: int, n_buyers: int, p) -> AuctionInstance:
    """N i.i.d. buyers valuing one of s identical items at 1/p w.p. p, else 1."""
    pq = to_fraction(p)
    if not 0 < pq < 1:
        raise AuctionError("p must lie in (0, 1)")
    dist = make_distribution([1, 1 / pq], [1 - pq, pq])
    return make_instance([dist] * n_buyers, feasibility_identical_items(n_buyers, s))


def identical_items_limit_check(s: int, n_buyers: int, p_sweep: Sequence) -> LimitTable:
    if not 1 <= s <= n_buyers:
        raise AuctionError(f"need 1 <= s <= n, got s={s}, n={n_buyers}")
    bound = Fraction(s, s + n_buyers)
    rows = []
    for p in p_sweep:
        rep = instance_elr(binary_iid_identical_items(s, n_buyers, p))
        rows.append(LimitRow(to_fraction(p), rep.elr, bound))
    return LimitTable(s, n_buyers, tuple(rows))

"""Virtual valuations, ironing by lower convex hull, and reserve prices."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import ValuationDistribution

Point = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class IronedTable:
    w: tuple[Fraction, ...]
    w_bar: tuple[Fraction, ...]
    reserve_index: int
    reserve_price: Fraction
    points: tuple[Point, ...]
    hull_points: tuple[Point, ...]
    # block id per support index; equal ids share one hull segment
    blocks: tuple[int, ...]

    def positive(self, i: int) -> bool:
        return self.w_bar[i] > 0


def virtual_valuation(dist: ValuationDistribution) -> tuple[Fraction, ...]:
    xs, ps = dist.support, dist.probs
    k = len(xs)
    out = []
    for i in range(k - 1):
        tail = sum(ps[i + 1:], Fraction(0))
        out.append(xs[i] - (xs[i + 1] - xs[i]) * tail / ps[i])
    out.append(xs[-1])
    return tuple(out)


def revenue_curve_points(dist: ValuationDistribution) -> tuple[Point, ...]:
    """Points (G_i, -x_{i+1} P[X >= x_{i+1}]) whose successive slopes are w."""
    xs, ps = dist.support, dist.probs
    k = len(xs)
    pts = [(Fraction(0), -xs[0])]
    cum = Fraction(0)
    for i in range(k - 1):
        cum += ps[i]
        pts.append((cum, -xs[i + 1] * (1 - cum)))
    pts.append((Fraction(1), Fraction(0)))
    return tuple(pts)


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def lower_hull(points: tuple[Point, ...]) -> list[int]:
    """Indices of lower-hull vertices (monotone chain, collinear points dropped).

    ``points`` must already be sorted by strictly increasing x.
    """
    hull: list[int] = []
    for j, p in enumerate(points):
        while len(hull) >= 2 and _cross(points[hull[-2]], points[hull[-1]], p) <= 0:
            hull.pop()
        hull.append(j)
    return hull


def ironed_virtual_valuation(dist: ValuationDistribution) -> IronedTable:
    w = virtual_valuation(dist)
    pts = revenue_curve_points(dist)
    hull = lower_hull(pts)
    k = dist.k

    w_bar: list[Fraction] = [Fraction(0)] * k
    blocks: list[int] = [0] * k
    for b, (lo, hi) in enumerate(zip(hull, hull[1:])):
        slope = (pts[hi][1] - pts[lo][1]) / (pts[hi][0] - pts[lo][0])
        # segment lo->hi covers support indices lo..hi-1
        mass = sum(dist.probs[lo:hi], Fraction(0))
        mean_w = sum((dist.probs[i] * w[i] for i in range(lo, hi)), Fraction(0)) / mass
        if mean_w != slope:
            raise ArithmeticError(f"hull slope {slope} differs from pooled mean {mean_w}")
        for i in range(lo, hi):
            w_bar[i] = slope
            blocks[i] = b

    t = next(i for i in range(k) if w_bar[i] > 0)
    x_star, t_check = reserve_price(dist)
    if t_check != t:
        raise ArithmeticError(f"reserve index {t_check} disagrees with first positive MVV at {t}")
    return IronedTable(
        w=w,
        w_bar=tuple(w_bar),
        reserve_index=t,
        reserve_price=x_star,
        points=pts,
        hull_points=tuple(pts[j] for j in hull),
        blocks=tuple(blocks),
    )


def reserve_price(dist: ValuationDistribution) -> tuple[Fraction, int]:
    """Largest maximizer of ``x * P[X >= x]`` over the support, with its index."""
    best_i, best = 0, None
    for i, x in enumerate(dist.support):
        rev = x * dist.tail(i)
        if best is None or rev >= best:
            best_i, best = i, rev
    return dist.support[best_i], best_i

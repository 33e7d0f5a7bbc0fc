"""Revenue-maximizing mechanism as a direct linear program.

An independent check on the virtual-value route: the LP knows nothing about
virtual valuations or ironing. Variables are, for every type profile, a
lottery over feasible winner sets and one payment per buyer. Constraints are
interim IC and IR in the Bayesian sense. Solved in floating point by HiGHS.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import lil_matrix

from .model import DEFAULT_MAX_PROFILES, AuctionInstance, enumerate_profiles


@dataclass(frozen=True)
class LPResult:
    revenue: float
    status: int
    message: str
    interim_q: tuple[tuple[float, ...], ...]


def lp_optimal_revenue(instance: AuctionInstance, max_profiles: int = DEFAULT_MAX_PROFILES) -> LPResult:
    profiles = list(enumerate_profiles(instance, max_profiles))
    sets = instance.feasibility.sets
    n_buyers = instance.n_buyers
    n_prof, n_sets = len(profiles), len(sets)
    n_alloc = n_prof * n_sets
    n_vars = n_alloc + n_prof * n_buyers

    def a_var(j, s):
        return j * n_sets + s

    def m_var(j, n):
        return n_alloc + j * n_buyers + n

    # interim q_n(i) and m_n(i) as linear forms over the variables
    q_form = [[np.zeros(n_vars) for _ in range(b.k)] for b in instance.buyers]
    m_form = [[np.zeros(n_vars) for _ in range(b.k)] for b in instance.buyers]
    cost = np.zeros(n_vars)
    for j, prof in enumerate(profiles):
        prob = float(prof.probability)
        for n, i in enumerate(prof.indices):
            wgt = float(prof.probability / instance.buyers[n].probs[i])
            for s, chosen in enumerate(sets):
                if n in chosen:
                    q_form[n][i][a_var(j, s)] += wgt
            m_form[n][i][m_var(j, n)] += wgt
            cost[m_var(j, n)] = -prob

    rows = []
    for n, b in enumerate(instance.buyers):
        for i, x in enumerate(b.support):
            xf = float(x)
            truthful = xf * q_form[n][i] - m_form[n][i]
            rows.append(-truthful)  # IR: truthful utility >= 0
            for k in range(b.k):
                if k != i:
                    rows.append(xf * q_form[n][k] - m_form[n][k] - truthful)
    a_ub = np.array(rows)
    b_ub = np.zeros(len(rows))

    a_eq = lil_matrix((n_prof, n_vars))
    for j in range(n_prof):
        for s in range(n_sets):
            a_eq[j, a_var(j, s)] = 1.0
    b_eq = np.ones(n_prof)

    bounds = [(0.0, 1.0)] * n_alloc + [(None, None)] * (n_prof * n_buyers)
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq.tocsr(), b_eq=b_eq, bounds=bounds, method="highs")
    if res.status != 0:
        return LPResult(float("nan"), res.status, res.message, ())
    q = tuple(tuple(float(f @ res.x) for f in qn) for qn in q_form)
    return LPResult(float(-res.fun), res.status, res.message, q)

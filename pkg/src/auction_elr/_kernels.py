"""Floating-point kernels for the worst-case search.

Each kernel has a vectorized numpy implementation and a loop implementation
compiled with numba. The numba path is used when numba imports and the
environment variable ``AUCTION_ELR_DISABLE_NUMBA`` is unset or ``0``.

The free variables are ``d = (p_1, ..., p_{K-1})``, the masses below the top
support point; ``theta`` denotes their cumulative sums. The objective is
``sum_i (theta_i^N - theta_{i-1}^N) / (1 - theta_{i-1})``.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("AUCTION_ELR_DISABLE_NUMBA", "0").lower() in ("", "0", "false", "no")


# --- numpy implementations -------------------------------------------------


def objective_np(d, n):
    theta = np.cumsum(d)
    prev = np.concatenate((np.zeros(1), theta[:-1]))
    return float(np.sum((theta**n - prev**n) / (1.0 - prev)))


def gradient_np(d, n):
    theta = np.cumsum(d)
    prev = np.concatenate((np.zeros(1), theta[:-1]))
    f = float(np.sum((theta**n - prev**n) / (1.0 - prev)))
    g_theta = n * theta ** (n - 1) / (1.0 - prev)
    head, nxt = theta[:-1], theta[1:]
    g_theta[:-1] += (-n * head ** (n - 1) * (1.0 - head) + nxt**n - head**n) / (1.0 - head) ** 2
    # d_j feeds theta_m for every m >= j
    return f, np.cumsum(g_theta[::-1])[::-1]


def project_np(v, total, floor):
    """Euclidean projection onto {x >= floor, sum x = total}."""
    m = v.shape[0]
    y = v - floor
    target = total - m * floor
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - target
    ks = np.arange(1, m + 1)
    rho = np.nonzero(u - css / ks > 0)[0][-1]
    shift = css[rho] / (rho + 1.0)
    return np.maximum(y - shift, 0.0) + floor


def ascend_np(d0, n, total, floor, max_evals, tol):
    """Projected gradient ascent with Armijo backtracking.

    Returns ``(d, f, evaluations, residual)`` where the residual is the norm of
    the unit-step projected gradient map.
    """
    d = project_np(np.asarray(d0, dtype=np.float64), total, floor)
    f, g = gradient_np(d, n)
    evals = 1
    step = 1.0
    residual = np.inf
    while evals < max_evals:
        residual = float(np.linalg.norm(project_np(d + g, total, floor) - d))
        if residual < tol:
            break
        accepted = False
        while step >= 1e-18:
            cand = project_np(d + step * g, total, floor)
            fc, gc = gradient_np(cand, n)
            evals += 1
            delta = cand - d
            if fc >= f + 1e-4 * float(np.dot(g, delta)):
                accepted = True
            elif abs(fc - f) <= 1e-14 * max(1.0, abs(f)) and float(np.dot(gc - gc.mean(), delta)) >= 0.0:
                # below function-value resolution: still climbing along delta;
                # centering drops the multiplier component, which only sees rounding in sum(delta)
                accepted = True
            if accepted:
                break
            step *= 0.5
        if not accepted:
            break
        d, f, g = cand, fc, gc
        step = min(step * 2.0, 1e6)
    return d, f, evals, residual


def newton_polish(d, n, total, floor, tol, max_iter=50):
    """Newton iterations on the slice sum(d) = total, for interior points.

    Gradient-based ascent stalls when r is large: the slice is badly scaled
    near theta = 1 and objective changes drop below float resolution while
    the tangent gradient is still far from zero. Newton steps on the tangent
    gradient do not need objective differences. Uses finite differences of
    the analytic gradient for the Hessian. Returns ``(d, f, evals, residual)``.
    """
    m = d.shape[0]
    basis = np.zeros((m, m - 1))
    for j in range(m - 1):
        basis[j, j], basis[m - 1, j] = 1.0, -1.0

    def tangent(x):
        f, g = gradient(x, n)
        return f, basis.T @ g

    d = np.asarray(d, dtype=np.float64).copy()
    f, gy = tangent(d)
    evals = 1
    for _ in range(max_iter):
        residual = float(np.linalg.norm(project(d + gradient(d, n)[1], total, floor) - d))
        evals += 1
        if residual < tol:
            return d, f, evals, residual
        h = 1e-7 * max(float(d.min()), 1e-12)
        hess = np.empty((m - 1, m - 1))
        for j in range(m - 1):
            hess[:, j] = (tangent(d + h * basis[:, j])[1] - tangent(d - h * basis[:, j])[1]) / (2 * h)
        evals += 2 * (m - 1)
        try:
            step = -np.linalg.solve(0.5 * (hess + hess.T), gy)
        except np.linalg.LinAlgError:
            break
        t = 1.0
        moved = False
        while t > 1e-6:
            cand = d + t * (basis @ step)
            if cand.min() > floor:
                fc, gc = tangent(cand)
                evals += 1
                if np.linalg.norm(gc) < np.linalg.norm(gy):
                    d, f, gy, moved = cand, fc, gc, True
                    break
            t *= 0.5
        if not moved:
            break
    residual = float(np.linalg.norm(project(d + gradient(d, n)[1], total, floor) - d))
    return d, f, evals + 1, residual


def log_tail_np(a, n, upper):
    """n * sum_{i=n}^{upper} a^i / i."""
    i = np.arange(n, upper + 1, dtype=np.float64)
    return float(n * np.sum(np.exp(i * np.log(a)) / i)) if a > 0 else 0.0


# --- loop implementations (compiled with numba when enabled) ---------------


def _objective_loop(d, n):
    f = 0.0
    prev = 0.0
    for j in range(d.shape[0]):
        cur = prev + d[j]
        f += (cur**n - prev**n) / (1.0 - prev)
        prev = cur
    return f


def _gradient_loop(d, n):
    m = d.shape[0]
    theta = np.empty(m)
    acc = 0.0
    for j in range(m):
        acc += d[j]
        theta[j] = acc
    f = 0.0
    g_theta = np.empty(m)
    for j in range(m):
        prev = theta[j - 1] if j > 0 else 0.0
        f += (theta[j] ** n - prev**n) / (1.0 - prev)
        g_theta[j] = n * theta[j] ** (n - 1) / (1.0 - prev)
        if j + 1 < m:
            h = theta[j]
            g_theta[j] += (-n * h ** (n - 1) * (1.0 - h) + theta[j + 1] ** n - h**n) / (1.0 - h) ** 2
    g = np.empty(m)
    acc = 0.0
    for j in range(m - 1, -1, -1):
        acc += g_theta[j]
        g[j] = acc
    return f, g


def _project_loop(v, total, floor):
    m = v.shape[0]
    y = v - floor
    target = total - m * floor
    u = np.sort(y)[::-1]
    css = 0.0
    shift = 0.0
    for j in range(m):
        css += u[j]
        t = (css - target) / (j + 1.0)
        if u[j] - t > 0:
            shift = t
    out = np.empty(m)
    for j in range(m):
        out[j] = max(y[j] - shift, 0.0) + floor
    return out


def _make_ascend_loop(_project_loop, _gradient_loop):
    # the kernels are closed over so numba can resolve the compiled versions
    def _ascend_loop(d0, n, total, floor, max_evals, tol):
        d = _project_loop(d0.astype(np.float64), total, floor)
        f, g = _gradient_loop(d, n)
        evals = 1
        step = 1.0
        residual = np.inf
        while evals < max_evals:
            probe = _project_loop(d + g, total, floor) - d
            residual = np.sqrt(np.sum(probe * probe))
            if residual < tol:
                break
            accepted = False
            cand = d
            gc = g
            fc = f
            while step >= 1e-18:
                cand = _project_loop(d + step * g, total, floor)
                fc, gc = _gradient_loop(cand, n)
                evals += 1
                delta = cand - d
                if fc >= f + 1e-4 * np.sum(g * delta):
                    accepted = True
                elif abs(fc - f) <= 1e-14 * max(1.0, abs(f)) and np.sum((gc - np.mean(gc)) * delta) >= 0.0:
                    accepted = True
                if accepted:
                    break
                step *= 0.5
            if not accepted:
                break
            d = cand
            f = fc
            g = gc
            step = min(step * 2.0, 1e6)
        return d, f, evals, residual

    return _ascend_loop


def _log_tail_loop(a, n, upper):
    if a <= 0:
        return 0.0
    m = upper - n + 1
    terms = np.empty(m)
    power = a**n
    for j in range(m):
        terms[j] = power / (n + j)
        power *= a
    s = 0.0
    # descending order keeps small terms from being absorbed early
    for j in range(m - 1, -1, -1):
        s += terms[j]
    return n * s


if USE_NUMBA:
    _jit = numba.njit(cache=True)
    objective_jit = _jit(_objective_loop)
    gradient_jit = _jit(_gradient_loop)
    project_jit = _jit(_project_loop)
    ascend_jit = numba.njit(_make_ascend_loop(project_jit, gradient_jit))
    log_tail_jit = _jit(_log_tail_loop)
else:
    objective_jit = _objective_loop
    gradient_jit = _gradient_loop
    project_jit = _project_loop
    ascend_jit = _make_ascend_loop(_project_loop, _gradient_loop)
    log_tail_jit = _log_tail_loop

if USE_NUMBA:
    objective, gradient, project, ascend, log_tail = objective_jit, gradient_jit, project_jit, ascend_jit, log_tail_jit
    BACKEND = "numba"
else:
    objective, gradient, project, ascend, log_tail = objective_np, gradient_np, project_np, ascend_np, log_tail_np
    BACKEND = "numpy"

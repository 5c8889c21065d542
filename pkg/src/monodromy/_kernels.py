"""Compiled inner loops: sparse polynomial evaluation, dense complex LU,
Newton correction and predictor-corrector path tracking.

Everything here works on the flat term layout used by
:class:`monodromy.polysys.ParametricSystem`: an ``(T, n)`` exponent
matrix, a length-``T`` equation index and a length-``T`` vector of
numeric coefficients (the parameters are already substituted).
"""

import numpy as np
from numba import njit

# Status codes shared with tracker.TrackStatus.
SUCCESS = 0
SINGULAR = 1
MIN_STEP = 2
BUDGET = 3
DIVERGED = 4

SINGULAR_PIVOT = 1e-14


@njit(cache=True)
def _power_table(exps, x):
    n = x.shape[0]
    maxdeg = 0
    for t in range(exps.shape[0]):
        for k in range(n):
            if exps[t, k] > maxdeg:
                maxdeg = exps[t, k]
    table = np.empty((n, maxdeg + 1), dtype=np.complex128)
    for k in range(n):
        table[k, 0] = 1.0
        for e in range(1, maxdeg + 1):
            table[k, e] = table[k, e - 1] * x[k]
    return table


@njit(cache=True)
def monomials(exps, x):
    """Values of all monomials ``x**exps[t]``."""
    table = _power_table(exps, x)
    out = np.empty(exps.shape[0], dtype=np.complex128)
    for t in range(exps.shape[0]):
        v = 1.0 + 0.0j
        for k in range(x.shape[0]):
            v *= table[k, exps[t, k]]
        out[t] = v
    return out


@njit(cache=True)
def evaluate(exps, eq_index, coef, x, neq):
    f = np.zeros(neq, dtype=np.complex128)
    mono = monomials(exps, x)
    for t in range(exps.shape[0]):
        f[eq_index[t]] += coef[t] * mono[t]
    return f


@njit(cache=True)
def evaluate_all(exps, eq_index, coef, x, neq):
    """Return ``(f, J, mag)`` with exact term-by-term derivatives.

    ``mag[i]`` is ``sum |c_T| |x^e_T|`` over the terms of equation ``i``, the
    size of the numbers that cancel in ``f[i]``; residuals are measured
    against it.  Prefix/suffix products of the per-variable factors give
    every partial derivative of a monomial in O(n) without dividing by
    ``x_k``.
    """
    n = x.shape[0]
    table = _power_table(exps, x)
    f = np.zeros(neq, dtype=np.complex128)
    mag = np.zeros(neq)
    jac = np.zeros((neq, n), dtype=np.complex128)
    prefix = np.empty(n + 1, dtype=np.complex128)
    suffix = np.empty(n + 1, dtype=np.complex128)
    for t in range(exps.shape[0]):
        c = coef[t]
        if c == 0:
            continue
        i = eq_index[t]
        prefix[0] = 1.0
        for k in range(n):
            prefix[k + 1] = prefix[k] * table[k, exps[t, k]]
        suffix[n] = 1.0
        for k in range(n - 1, -1, -1):
            suffix[k] = suffix[k + 1] * table[k, exps[t, k]]
        term = c * prefix[n]
        f[i] += term
        mag[i] += abs(term)
        for k in range(n):
            e = exps[t, k]
            if e > 0:
                jac[i, k] += c * e * table[k, e - 1] * prefix[k] * suffix[k + 1]
    return f, jac, mag


@njit(cache=True)
def evaluate_jacobian(exps, eq_index, coef, x, neq):
    f, jac, _ = evaluate_all(exps, eq_index, coef, x, neq)
    return f, jac


@njit(cache=True)
def relative_residual(f, mag):
    """``max_i |f_i| / (1 + mag_i)``: a backward-error style residual that
    stays meaningful when large terms cancel."""
    r = 0.0
    for i in range(f.shape[0]):
        v = abs(f[i]) / (1.0 + mag[i])
        if not v <= r:
            r = v
    return r


@njit(cache=True)
def residual(exps, eq_index, coef, x, neq):
    f, _, mag = evaluate_all(exps, eq_index, coef, x, neq)
    return relative_residual(f, mag)


@njit(cache=True)
def max_abs(v):
    m = 0.0
    for i in range(v.shape[0]):
        a = abs(v[i])
        if a > m:
            m = a
    return m


@njit(cache=True)
def lu_solve(a, b):
    """Gaussian elimination with partial pivoting.

    Returns ``(x, ok)``; ``ok`` is False when a pivot falls below
    ``SINGULAR_PIVOT * max|a_ij|``.
    """
    n = a.shape[0]
    m = a.copy()
    x = b.copy()
    amax = 0.0
    for i in range(n):
        for j in range(n):
            v = abs(m[i, j])
            if v > amax:
                amax = v
    if amax == 0.0 or not np.isfinite(amax):
        return x, False
    thresh = SINGULAR_PIVOT * amax
    for k in range(n):
        p = k
        best = abs(m[k, k])
        for i in range(k + 1, n):
            v = abs(m[i, k])
            if v > best:
                best = v
                p = i
        if best <= thresh:
            return x, False
        if p != k:
            for j in range(k, n):
                tmp = m[k, j]
                m[k, j] = m[p, j]
                m[p, j] = tmp
            tmp = x[k]
            x[k] = x[p]
            x[p] = tmp
        piv = m[k, k]
        for i in range(k + 1, n):
            l = m[i, k] / piv
            if l != 0:
                for j in range(k + 1, n):
                    m[i, j] -= l * m[k, j]
                x[i] -= l * x[k]
    for k in range(n - 1, -1, -1):
        s = x[k]
        for j in range(k + 1, n):
            s -= m[k, j] * x[j]
        x[k] = s / m[k, k]
    return x, True


@njit(cache=True)
def newton(exps, eq_index, coef, x0, neq, tol, max_iter):
    """Newton's method on a square system.

    Returns ``(x, residual, converged, iterations, singular)``.  The stopping
    test is ``relative_residual <= tol`` and is checked before every update,
    so an exact root costs zero iterations.
    """
    x = x0.copy()
    it = 0
    while True:
        f, jac, mag = evaluate_all(exps, eq_index, coef, x, neq)
        res = relative_residual(f, mag)
        if res <= tol:
            return x, res, True, it, False
        if it >= max_iter:
            return x, res, False, it, False
        dx, ok = lu_solve(jac, f)
        if not ok:
            return x, res, False, it, True
        x = x - dx
        it += 1


@njit(cache=True)
def correct(exps, eq_index, coef, x0, neq, tol, max_iter, max_ratio):
    """Corrector step: Newton that also demands fast contraction.

    Besides the residual test of :func:`newton`, every update after the
    first must be at most ``max_ratio`` times the previous one.  Slow
    contraction means the predicted point is outside the quadratic basin of
    the path being followed, and converging anyway risks jumping to another
    path.  Returns ``(x, converged, iterations)``.
    """
    x = x0.copy()
    it = 0
    prev = -1.0
    while True:
        f, jac, mag = evaluate_all(exps, eq_index, coef, x, neq)
        if relative_residual(f, mag) <= tol:
            return x, True, it
        if it >= max_iter:
            return x, False, it
        dx, ok = lu_solve(jac, f)
        if not ok:
            return x, False, it
        step = max_abs(dx)
        if prev >= 0.0 and step > max_ratio * prev:
            return x, False, it
        x = x - dx
        it += 1
        prev = step


@njit(cache=True)
def _velocity(exps, eq_index, c_start, dc, t, x, neq):
    coef = c_start + t * dc
    _, jac = evaluate_jacobian(exps, eq_index, coef, x, neq)
    ht = evaluate(exps, eq_index, dc, x, neq)
    v, ok = lu_solve(jac, ht)
    return -v, ok


@njit(cache=True)
def track(exps, eq_index, c_start, c_target, x_start, tol, max_newton,
          h_init, h_min, h_max, max_steps, shrink, grow, grow_after,
          rk4, diverge_norm, max_ratio):
    """Track one path of ``H(t) = sum_T ((1-t) c_start + t c_target) x^e`` from
    t=0 to t=1.

    Returns ``(status, x, steps, newton_iterations)``.
    """
    neq = x_start.shape[0]
    dc = c_target - c_start
    x = x_start.copy()
    t = 0.0
    h = h_init
    steps = 0
    newton_total = 0
    accepted_run = 0
    while t < 1.0:
        if steps >= max_steps:
            return BUDGET, x, steps, newton_total
        steps += 1
        if h > 1.0 - t:
            h = 1.0 - t
        t_next = t + h
        if t_next > 1.0 or 1.0 - t_next < 1e-14:
            t_next = 1.0

        k1, ok = _velocity(exps, eq_index, c_start, dc, t, x, neq)
        if not ok:
            return SINGULAR, x, steps, newton_total
        if rk4:
            k2, ok2 = _velocity(exps, eq_index, c_start, dc, t + 0.5 * h, x + 0.5 * h * k1, neq)
            k3, ok3 = _velocity(exps, eq_index, c_start, dc, t + 0.5 * h, x + 0.5 * h * k2, neq)
            k4, ok4 = _velocity(exps, eq_index, c_start, dc, t_next, x + h * k3, neq)
            good = ok2 and ok3 and ok4
            xp = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        else:
            good = True
            xp = x + h * k1

        converged = False
        if good:
            coef = c_start + t_next * dc
            if t_next == 1.0:
                coef = c_target
            xc, converged, its = correct(exps, eq_index, coef, xp, neq, tol, max_newton,
                                         max_ratio)
            newton_total += its

        if converged:
            t = t_next
            x = xc
            if max_abs(x) > diverge_norm:
                return DIVERGED, x, steps, newton_total
            accepted_run += 1
            if accepted_run >= grow_after:
                h = min(h * grow, h_max)
                accepted_run = 0
        else:
            accepted_run = 0
            h *= shrink
            if h < h_min:
                return MIN_STEP, x, steps, newton_total

    # Polish at t=1: a couple of extra Newton iterations past the tolerance.
    # The last accepted step already satisfies the tolerance at t=1, so a
    # polish that does not improve things falls back to that point.
    xf, res, _, its, sing = newton(exps, eq_index, c_target, x, neq, 0.0, 2)
    newton_total += its
    if sing or not np.isfinite(res) or res > tol:
        xf = x
    return SUCCESS, xf, steps, newton_total

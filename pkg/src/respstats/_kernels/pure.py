"""Pure-numpy kernel implementations.

Mirror of the compiled ``_fast`` extension. Either backend may be active;
they implement the same algorithms but may differ in the last few ulps
because numpy reductions use pairwise summation while the C loops are
sequential. All callers treat kernel output as tolerance-equal, not
bit-equal, across backends.
"""

from __future__ import annotations

import numpy as np

# log-parameter box for the damped least-squares steps; generous enough to
# never bind for real fits, tight enough to keep exp() finite
_LOG_CLIP = 69.0


def column_kurtosis(values):
    """Excess kurtosis of every column, with population (1/N) moments.

    Returns ``(kurt, valid)``; ``valid`` is False (and ``kurt`` NaN) for
    zero-variance columns.
    """
    mean = values.mean(axis=0)
    dev = values - mean
    sq = dev * dev
    m2 = sq.mean(axis=0)
    m4 = (sq * sq).mean(axis=0)
    valid = m2 > 0.0
    kurt = np.full(values.shape[1], np.nan)
    np.divide(m4, m2 * m2, out=kurt, where=valid)
    kurt[valid] -= 3.0
    return kurt, valid


# infeasibility penalty: large but finite so simplex arithmetic stays clean
INFEASIBLE_NLL = 1e300


def gpd_nll(y, k, log_sigma):
    """Negative log-likelihood of generalized-Pareto excesses ``y``.

    Parametrized by (k, log sigma) so the scale stays positive. Support
    violations (k <= -1, or an excess beyond the bounded endpoint for
    k < 0) return a huge finite penalty. |k| below 1e-8 uses the
    exponential limit to avoid cancellation.
    """
    n = y.shape[0]
    if k <= -1.0:
        return INFEASIBLE_NLL
    sigma = np.exp(log_sigma)
    if abs(k) < 1e-8:
        return n * log_sigma + y.sum() / sigma
    u = k * (y / sigma)
    if np.any(u <= -1.0):
        return INFEASIBLE_NLL
    return n * log_sigma + (1.0 + 1.0 / k) * np.log1p(u).sum()


def model_values(params, x):
    """Saturating size-to-dimensionality curve, evaluated in log space.

    ``params`` is (a, b, c, d, e, f), all positive; returns
    a * [1 - (b / (exp(x^c / d) - 1 + b))^e]^f with the exponential
    overflow guarded (the value saturates to a).
    """
    a, b, c, d, e, f = params
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        t = np.power(x, c) / d
        em = np.expm1(t)
        log_e = np.where(np.isfinite(em), np.log(em + b), t)
        w = e * (np.log(b) - log_e)        # log of (b/E)^e, always <= 0
        bracket = -np.expm1(w)
        bracket = np.clip(bracket, 0.0, 1.0)
        out = a * np.power(bracket, f)
    return out


def _residuals(u, xs, zs):
    return model_values(np.exp(u), xs) - zs


def lm_fit_log(xs, zs, u0, max_iter, tol):
    """Damped least-squares on log-parameters.

    Levenberg-style (J'J + lam*I) steps with a forward-difference
    Jacobian; lam shrinks on accepted steps and grows on rejected ones.
    Stops when the relative step or the relative SSE improvement falls
    below ``tol``, when no damped step improves, or at ``max_iter``.

    Returns ``(u, rmse, n_iter, converged)`` where ``converged`` means the
    tolerance test was met (as opposed to stalling or hitting the cap).
    """
    xs = np.asarray(xs, dtype=np.float64)
    zs = np.asarray(zs, dtype=np.float64)
    u = np.clip(np.asarray(u0, dtype=np.float64), -_LOG_CLIP, _LOG_CLIP)
    npts = xs.shape[0]
    npar = u.shape[0]
    r = _residuals(u, xs, zs)
    sse = float(r @ r)
    lam = 1e-3
    eye = np.eye(npar)
    it = 0
    while it < max_iter:
        it += 1
        h = 1e-7 * np.maximum(1.0, np.abs(u))
        jac = np.empty((npts, npar))
        for j in range(npar):
            up = u.copy()
            up[j] += h[j]
            jac[:, j] = (_residuals(up, xs, zs) - r) / h[j]
        g = jac.T @ r
        a_mat = jac.T @ jac
        accepted = False
        for _ in range(50):
            try:
                delta = np.linalg.solve(a_mat + lam * eye, -g)
            except np.linalg.LinAlgError:
                lam = min(lam * 10.0, 1e14)
                continue
            u_new = np.clip(u + delta, -_LOG_CLIP, _LOG_CLIP)
            r_new = _residuals(u_new, xs, zs)
            sse_new = float(r_new @ r_new)
            if np.isfinite(sse_new) and sse_new < sse:
                rel_step = np.linalg.norm(u_new - u) / (np.linalg.norm(u) + 1e-300)
                rel_gain = (sse - sse_new) / max(sse, 1e-300)
                u, r, sse = u_new, r_new, sse_new
                lam = max(lam / 10.0, 1e-12)
                accepted = True
                if rel_step < tol or rel_gain < tol:
                    return u, np.sqrt(sse / npts), it, True
                break
            lam = min(lam * 10.0, 1e14)
            if lam >= 1e14:
                break
        if not accepted:
            # no productive step at any damping: local minimum to working precision
            return u, np.sqrt(sse / npts), it, True
    return u, np.sqrt(sse / npts), it, False

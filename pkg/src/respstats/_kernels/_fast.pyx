# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: column kurtosis, GPD likelihood, damped least squares.

Same algorithms as ``pure.py``; sequential summation instead of numpy's
pairwise reductions, so backends agree to tolerance, not bitwise.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, expm1, fabs, isfinite, log, log1p, pow, sqrt

cnp.import_array()

DEF NPAR = 6
DEF LOG_CLIP = 69.0


def column_kurtosis(const double[:, ::1] values):
    cdef Py_ssize_t n_rows = values.shape[0]
    cdef Py_ssize_t n_cols = values.shape[1]
    cdef cnp.ndarray[double, ndim=1] kurt = np.full(n_cols, np.nan)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] valid = np.zeros(n_cols, dtype=np.uint8)
    cdef Py_ssize_t i, j
    cdef double mean, dev, sq, m2, m4
    for j in range(n_cols):
        mean = 0.0
        for i in range(n_rows):
            mean += values[i, j]
        mean /= n_rows
        m2 = 0.0
        m4 = 0.0
        for i in range(n_rows):
            dev = values[i, j] - mean
            sq = dev * dev
            m2 += sq
            m4 += sq * sq
        m2 /= n_rows
        m4 /= n_rows
        if m2 > 0.0:
            kurt[j] = m4 / (m2 * m2) - 3.0
            valid[j] = 1
    return kurt, valid.view(np.bool_)


DEF INFEASIBLE_NLL = 1e300


def gpd_nll(const double[::1] y, double k, double log_sigma):
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t i
    cdef double sigma, acc, u
    if k <= -1.0:
        return INFEASIBLE_NLL
    sigma = exp(log_sigma)
    acc = 0.0
    if fabs(k) < 1e-8:
        for i in range(n):
            acc += y[i]
        return n * log_sigma + acc / sigma
    for i in range(n):
        u = k * (y[i] / sigma)
        if u <= -1.0:
            return INFEASIBLE_NLL
        acc += log1p(u)
    return n * log_sigma + (1.0 + 1.0 / k) * acc


cdef inline double _model_one(double a, double b, double c, double d,
                              double e, double f, double x):
    cdef double t, em, log_e, w, bracket
    t = pow(x, c) / d
    em = expm1(t)
    if isfinite(em):
        log_e = log(em + b)
    else:
        log_e = t
    w = e * (log(b) - log_e)
    if w > 0.0:
        w = 0.0
    bracket = -expm1(w)
    if bracket < 0.0:
        bracket = 0.0
    elif bracket > 1.0:
        bracket = 1.0
    return a * pow(bracket, f)


def model_values(params, x):
    cdef cnp.ndarray[double, ndim=1] p = np.array(params, dtype=np.float64, order="C", copy=True)
    cdef cnp.ndarray[double, ndim=1] xv = np.array(
        np.atleast_1d(x), dtype=np.float64, order="C", copy=True)
    cdef cnp.ndarray[double, ndim=1] out = np.empty(xv.shape[0])
    cdef Py_ssize_t i
    for i in range(xv.shape[0]):
        out[i] = _model_one(p[0], p[1], p[2], p[3], p[4], p[5], xv[i])
    if np.ndim(x) == 0:
        return out.reshape(())
    return out


cdef void _residuals(const double[::1] u, const double[::1] xs, const double[::1] zs,
                     double[::1] out):
    cdef Py_ssize_t i
    cdef double a = exp(u[0]), b = exp(u[1]), c = exp(u[2])
    cdef double d = exp(u[3]), e = exp(u[4]), f = exp(u[5])
    for i in range(xs.shape[0]):
        out[i] = _model_one(a, b, c, d, e, f, xs[i]) - zs[i]


cdef double _sse(const double[::1] r):
    cdef double acc = 0.0
    cdef Py_ssize_t i
    for i in range(r.shape[0]):
        acc += r[i] * r[i]
    return acc


cdef int _solve(double[:, ::1] a, double[::1] b, double[::1] out):
    # Gaussian elimination with partial pivoting on an NPAR x NPAR copy
    cdef double m[NPAR][NPAR]
    cdef double v[NPAR]
    cdef Py_ssize_t i, j, k, piv
    cdef double best, factor, tmp
    for i in range(NPAR):
        v[i] = b[i]
        for j in range(NPAR):
            m[i][j] = a[i, j]
    for k in range(NPAR):
        piv = k
        best = fabs(m[k][k])
        for i in range(k + 1, NPAR):
            if fabs(m[i][k]) > best:
                best = fabs(m[i][k])
                piv = i
        if best == 0.0 or not isfinite(best):
            return -1
        if piv != k:
            for j in range(NPAR):
                tmp = m[k][j]
                m[k][j] = m[piv][j]
                m[piv][j] = tmp
            tmp = v[k]
            v[k] = v[piv]
            v[piv] = tmp
        for i in range(k + 1, NPAR):
            factor = m[i][k] / m[k][k]
            for j in range(k, NPAR):
                m[i][j] -= factor * m[k][j]
            v[i] -= factor * v[k]
    for k in range(NPAR - 1, -1, -1):
        tmp = v[k]
        for j in range(k + 1, NPAR):
            tmp -= m[k][j] * out[j]
        out[k] = tmp / m[k][k]
    return 0


def lm_fit_log(xs, zs, u0, int max_iter, double tol):
    cdef cnp.ndarray[double, ndim=1] xs_a = np.array(xs, dtype=np.float64, order="C", copy=True)
    cdef cnp.ndarray[double, ndim=1] zs_a = np.array(zs, dtype=np.float64, order="C", copy=True)
    cdef cnp.ndarray[double, ndim=1] u = np.clip(
        np.asarray(u0, dtype=np.float64), -LOG_CLIP, LOG_CLIP).copy()
    if u.shape[0] != NPAR:
        raise ValueError("expected 6 log-parameters")
    cdef Py_ssize_t npts = xs_a.shape[0]
    cdef cnp.ndarray[double, ndim=1] r = np.empty(npts)
    cdef cnp.ndarray[double, ndim=1] r_new = np.empty(npts)
    cdef cnp.ndarray[double, ndim=1] u_new = np.empty(NPAR)
    cdef cnp.ndarray[double, ndim=1] up = np.empty(NPAR)
    cdef cnp.ndarray[double, ndim=1] rp = np.empty(npts)
    cdef cnp.ndarray[double, ndim=2] jac = np.empty((npts, NPAR))
    cdef cnp.ndarray[double, ndim=2] a_mat = np.empty((NPAR, NPAR))
    cdef cnp.ndarray[double, ndim=2] a_damp = np.empty((NPAR, NPAR))
    cdef cnp.ndarray[double, ndim=1] g = np.empty(NPAR)
    cdef cnp.ndarray[double, ndim=1] neg_g = np.empty(NPAR)
    cdef cnp.ndarray[double, ndim=1] delta = np.empty(NPAR)
    cdef double sse, sse_new, lam, h, acc, rel_step, rel_gain, step_sq, u_sq
    cdef Py_ssize_t i, j, kk
    cdef int it = 0, attempt
    cdef bint accepted

    _residuals(u, xs_a, zs_a, r)
    sse = _sse(r)
    lam = 1e-3
    while it < max_iter:
        it += 1
        for j in range(NPAR):
            h = 1e-7 * (fabs(u[j]) if fabs(u[j]) > 1.0 else 1.0)
            for kk in range(NPAR):
                up[kk] = u[kk]
            up[j] += h
            _residuals(up, xs_a, zs_a, rp)
            for i in range(npts):
                jac[i, j] = (rp[i] - r[i]) / h
        for j in range(NPAR):
            acc = 0.0
            for i in range(npts):
                acc += jac[i, j] * r[i]
            g[j] = acc
            for kk in range(j, NPAR):
                acc = 0.0
                for i in range(npts):
                    acc += jac[i, j] * jac[i, kk]
                a_mat[j, kk] = acc
                a_mat[kk, j] = acc
        accepted = False
        for attempt in range(50):
            for j in range(NPAR):
                for kk in range(NPAR):
                    a_damp[j, kk] = a_mat[j, kk]
                a_damp[j, j] += lam
                neg_g[j] = -g[j]
            if _solve(a_damp, neg_g, delta) != 0:
                lam = lam * 10.0 if lam * 10.0 < 1e14 else 1e14
                continue
            for j in range(NPAR):
                u_new[j] = u[j] + delta[j]
                if u_new[j] > LOG_CLIP:
                    u_new[j] = LOG_CLIP
                elif u_new[j] < -LOG_CLIP:
                    u_new[j] = -LOG_CLIP
            _residuals(u_new, xs_a, zs_a, r_new)
            sse_new = _sse(r_new)
            if isfinite(sse_new) and sse_new < sse:
                step_sq = 0.0
                u_sq = 0.0
                for j in range(NPAR):
                    step_sq += (u_new[j] - u[j]) * (u_new[j] - u[j])
                    u_sq += u[j] * u[j]
                rel_step = sqrt(step_sq) / (sqrt(u_sq) + 1e-300)
                rel_gain = (sse - sse_new) / (sse if sse > 1e-300 else 1e-300)
                for j in range(NPAR):
                    u[j] = u_new[j]
                for i in range(npts):
                    r[i] = r_new[i]
                sse = sse_new
                lam = lam / 10.0 if lam / 10.0 > 1e-12 else 1e-12
                accepted = True
                if rel_step < tol or rel_gain < tol:
                    return u, sqrt(sse / npts), it, True
                break
            lam = lam * 10.0 if lam * 10.0 < 1e14 else 1e14
            if lam >= 1e14:
                break
        if not accepted:
            return u, sqrt(sse / npts), it, True
    return u, sqrt(sse / npts), it, False

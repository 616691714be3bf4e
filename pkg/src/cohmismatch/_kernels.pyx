# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels mirroring :mod:`cohmismatch._pykernels`."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()

cdef double _EPS = 2.220446049250313e-16
cdef int MAX_ITER = 200


cdef inline double _fmax(double a, double b) noexcept nogil:
    return a if a > b else b


cdef inline double _fmin(double a, double b) noexcept nogil:
    return a if a < b else b


cdef double _solve(double base, const double[:] c2, const double[:] D, Py_ssize_t o,
                   double lo, double hi) noexcept nogil:
    cdef Py_ssize_t m = D.shape[0]
    cdef Py_ssize_t i, it
    cdef double t = 0.5 * (lo + hi)
    cdef double p, dp, q, new, do = D[o]
    for it in range(MAX_ITER):
        p = base + t
        dp = 1.0
        for i in range(m):
            q = 1.0 / ((D[i] - do) - t)
            p += c2[i] * q
            dp += c2[i] * q * q
        if p == 0.0:
            return t
        if p > 0.0:
            hi = t
        else:
            lo = t
        new = t - p / dp
        if not (new > lo and new < hi):
            new = 0.5 * (lo + hi)
        if fabs(new - t) <= 2 * _EPS * fabs(new) or hi - lo <= 2 * _EPS * _fmax(fabs(lo), fabs(hi)) or hi - lo <= 1e-300:
            return new
        t = new
    return t


def secular_roots(double F, C, D):
    cdef const double[:] Cv = np.ascontiguousarray(C, dtype=np.float64)
    cdef const double[:] Dv = np.ascontiguousarray(D, dtype=np.float64)
    cdef Py_ssize_t m = Dv.shape[0]
    cdef Py_ssize_t r, i, o
    c2_arr = np.empty(m)
    cdef double[:] c2 = c2_arr
    cdef double cn = 0.0, mid, pm, lo, hi
    for i in range(m):
        c2[i] = Cv[i] * Cv[i]
        cn += c2[i]
    cn = sqrt(cn)
    roots_arr = np.empty(m + 1)
    tau_arr = np.empty(m + 1)
    origin_arr = np.empty(m + 1, dtype=np.intp)
    cdef double[:] roots = roots_arr
    cdef double[:] tau = tau_arr
    cdef Py_ssize_t[:] origin = origin_arr
    with nogil:
        for r in range(m + 1):
            if r == 0:
                o = 0
                lo = 0.0
                hi = _fmax(F - Dv[0], 0.0) + cn
            elif r == m:
                o = m - 1
                lo = _fmin(F - Dv[m - 1], 0.0) - cn
                hi = 0.0
            else:
                mid = 0.5 * (Dv[r - 1] + Dv[r])
                pm = mid - F
                for i in range(m):
                    pm += c2[i] / (Dv[i] - mid)
                if pm >= 0.0:
                    o = r
                    lo = 0.0
                    hi = mid - Dv[r]
                else:
                    o = r - 1
                    lo = mid - Dv[r - 1]
                    hi = 0.0
            origin[r] = o
            tau[r] = _solve(Dv[o] - F, c2, Dv, o, lo, hi)
            roots[r] = Dv[o] + tau[r]
    return roots_arr, origin_arr, tau_arr


cdef inline void _pair(double* x, double* y, const double* ur, const double* ui) noexcept nogil:
    # (x, y) <- M (x, y) with M = ur + i ui stored row-major as [m00, m01, m10, m11]
    cdef double xr = x[0], xi = x[1], yr = y[0], yi = y[1]
    x[0] = ur[0] * xr - ui[0] * xi + ur[1] * yr - ui[1] * yi
    x[1] = ur[0] * xi + ui[0] * xr + ur[1] * yi + ui[1] * yr
    y[0] = ur[2] * xr - ui[2] * xi + ur[3] * yr - ui[3] * yi
    y[1] = ur[2] * xi + ui[2] * xr + ur[3] * yi + ui[3] * yr


def apply_1q(cnp.ndarray rho, u, int q, int n):
    cdef double[:, ::1] r = rho.view(np.float64)
    cdef cnp.ndarray uu = np.ascontiguousarray(u, dtype=np.complex128).reshape(4)
    cdef double ur[4]
    cdef double ui[4]
    cdef double vr[4]
    cdef double vi[4]
    cdef Py_ssize_t k
    for k in range(4):
        ur[k] = uu[k].real
        ui[k] = uu[k].imag
    # right multiplication by U^dag acts on column pairs with conj(U)
    for k in range(4):
        vr[k] = ur[k]
        vi[k] = -ui[k]
    cdef Py_ssize_t d = rho.shape[0]
    cdef Py_ssize_t s = 1 << (n - 1 - q)
    cdef Py_ssize_t i, j
    cdef double* a
    cdef double* b
    with nogil:
        for i in range(d):
            if i & s:
                continue
            a = &r[i, 0]
            b = &r[i | s, 0]
            for j in range(d):
                _pair(a + 2 * j, b + 2 * j, ur, ui)
        for i in range(d):
            a = &r[i, 0]
            for j in range(d):
                if j & s:
                    continue
                _pair(a + 2 * j, a + 2 * (j | s), vr, vi)


cdef inline void _quad(double* p0, double* p1, double* p2, double* p3, const double* ur, const double* ui) noexcept nogil:
    cdef double xr[4]
    cdef double xi[4]
    cdef double* ps[4]
    cdef int k, l
    cdef double ar, ai
    ps[0] = p0
    ps[1] = p1
    ps[2] = p2
    ps[3] = p3
    for k in range(4):
        xr[k] = ps[k][0]
        xi[k] = ps[k][1]
    for k in range(4):
        ar = 0.0
        ai = 0.0
        for l in range(4):
            ar = ar + ur[4 * k + l] * xr[l] - ui[4 * k + l] * xi[l]
            ai = ai + ur[4 * k + l] * xi[l] + ui[4 * k + l] * xr[l]
        ps[k][0] = ar
        ps[k][1] = ai


def apply_2q(cnp.ndarray rho, u, int q1, int q2, int n):
    cdef double[:, ::1] r = rho.view(np.float64)
    cdef cnp.ndarray uu = np.ascontiguousarray(u, dtype=np.complex128).reshape(16)
    cdef double ur[16]
    cdef double ui[16]
    cdef double vi[16]
    cdef Py_ssize_t k
    for k in range(16):
        ur[k] = uu[k].real
        ui[k] = uu[k].imag
        vi[k] = -ui[k]
    cdef Py_ssize_t d = rho.shape[0]
    cdef Py_ssize_t s1 = 1 << (n - 1 - q1), s2 = 1 << (n - 1 - q2)
    cdef Py_ssize_t i, j
    cdef double* row
    with nogil:
        for i in range(d):
            if i & s1 or i & s2:
                continue
            for j in range(d):
                _quad(&r[i, 2 * j], &r[i | s2, 2 * j], &r[i | s1, 2 * j], &r[i | s1 | s2, 2 * j], ur, ui)
        for i in range(d):
            row = &r[i, 0]
            for j in range(d):
                if j & s1 or j & s2:
                    continue
                _quad(row + 2 * j, row + 2 * (j | s2), row + 2 * (j | s1), row + 2 * (j | s1 | s2), ur, vi)


def depolarize_1q(double complex[:, ::1] rho, double p, int q, int n):
    cdef Py_ssize_t d = rho.shape[0]
    cdef Py_ssize_t s = 1 << (n - 1 - q)
    cdef Py_ssize_t i, j
    cdef double keep = 1 - 2 * p / 3, move = 2 * p / 3, off = 1 - 4 * p / 3
    cdef double complex a, b
    with nogil:
        for i in range(d):
            if i & s:
                continue
            for j in range(d):
                if j & s:
                    continue
                a = rho[i, j]
                b = rho[i | s, j | s]
                rho[i, j] = keep * a + move * b
                rho[i | s, j | s] = keep * b + move * a
                rho[i, j | s] = off * rho[i, j | s]
                rho[i | s, j] = off * rho[i | s, j]


def dephase_1q(double complex[:, ::1] rho, double p, int q, int n):
    cdef Py_ssize_t d = rho.shape[0]
    cdef Py_ssize_t s = 1 << (n - 1 - q)
    cdef Py_ssize_t i, j
    cdef double f = 1 - 2 * p
    with nogil:
        for i in range(d):
            for j in range(d):
                if (i ^ j) & s:
                    rho[i, j] = f * rho[i, j]


def dephase_zz(double complex[:, ::1] rho, double p, int q1, int q2, int n):
    cdef Py_ssize_t d = rho.shape[0]
    cdef Py_ssize_t b1 = n - 1 - q1, b2 = n - 1 - q2
    cdef Py_ssize_t i, j, x
    cdef double f = 1 - 2 * p
    with nogil:
        for i in range(d):
            for j in range(d):
                x = i ^ j
                if ((x >> b1) ^ (x >> b2)) & 1:
                    rho[i, j] = f * rho[i, j]


def damp_1q(double complex[:, ::1] rho, double gamma, int q, int n):
    cdef Py_ssize_t d = rho.shape[0]
    cdef Py_ssize_t s = 1 << (n - 1 - q)
    cdef Py_ssize_t i, j
    cdef double r = sqrt(1 - gamma)
    with nogil:
        for i in range(d):
            if i & s:
                continue
            for j in range(d):
                if j & s:
                    continue
                rho[i, j] = rho[i, j] + gamma * rho[i | s, j | s]
                rho[i | s, j | s] = (1 - gamma) * rho[i | s, j | s]
                rho[i, j | s] = r * rho[i, j | s]
                rho[i | s, j] = r * rho[i | s, j]

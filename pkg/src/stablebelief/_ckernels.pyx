# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled stable-law kernels.

Typed twin of :mod:`stablebelief._pykernels`; same algorithms, constants and
break-point strategy, evaluated without the GIL.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport (atan, atan2, cos, sin, tan, log, exp, expm1, fabs,
                        sqrt, pow, ceil, erfc, tgamma, INFINITY, NAN, M_PI)
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef double[8] XGK = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000]
cdef double[8] WGK = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714]
cdef double[4] WG = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327]

cdef double[6] LEVELS = [4.0, 1.5, 0.0, -2.0, -6.0, -16.0]

cdef enum:
    K_DENS = 0
    K_SURV = 1
    K_COMP = 2
    K_FRE = 3
    K_FIM = 4

cdef double EPSABS = 1e-15
cdef double EPSREL = 1e-11
cdef int LIMIT = 400
cdef double LOG_TINY = -745.0
cdef double LOG_HUGE = 700.0
cdef double FOURIER_BAND = 1e-3
cdef double FOURIER_XMAX = 50.0


cdef struct Ctx:
    double alpha
    double beta
    double x
    double S
    double lx
    double theta0
    double a1
    double a2
    double c0
    int kind


cdef double log_g(Ctx* c, double s) noexcept nogil:
    cdef double u, a, b, w, su, sa, cc
    cdef bint increasing = c.alpha <= 1.0
    if s <= 0.0 or s >= c.S:
        if (s <= 0.0) == increasing:
            return -INFINITY
        return INFINITY
    u = c.S - s
    a = c.alpha
    if a == 1.0:
        b = c.beta
        w = 0.5 * M_PI * (1.0 - b) + b * s
        if w <= 0.0:
            return -INFINITY
        return (c.lx + log(2.0 / M_PI) + log(w) - log(sin(s))
                - w * cos(s) / (sin(s) * b))
    su = sin(u)
    sa = sin(a * s)
    cc = cos(c.theta0 + (a - 1.0) * s)
    if su <= 0.0 or sa <= 0.0 or cc <= 0.0:
        if cc <= 0.0 and su > 0.0 and sa > 0.0:
            return -INFINITY
        if (sa <= 0.0) == (a > 1.0):
            return INFINITY
        return -INFINITY
    return c.lx + c.c0 + c.a1 * log(su) - c.a2 * log(sa) + log(cc)


cdef double eta(double t, double alpha) noexcept nogil:
    if alpha == 1.0:
        return 2.0 / M_PI * t * log(t)
    return -tan(M_PI * alpha / 2.0) * t * expm1((alpha - 1.0) * log(t))


cdef double integrand(Ctx* c, double s) noexcept nogil:
    cdef double lg
    if c.kind == K_FRE:
        return exp(-pow(s, c.alpha)) * cos(c.x * s + c.beta * eta(s, c.alpha))
    if c.kind == K_FIM:
        return exp(-pow(s, c.alpha)) * sin(c.x * s + c.beta * eta(s, c.alpha)) / s
    lg = log_g(c, s)
    if c.kind == K_DENS:
        if lg > LOG_HUGE or lg < LOG_TINY:
            return 0.0
        return exp(lg - exp(lg))
    if c.kind == K_SURV:
        if lg > LOG_HUGE:
            return 0.0
        if lg < LOG_TINY:
            return 1.0
        return exp(-exp(lg))
    if lg > LOG_HUGE:
        return 1.0
    if lg < LOG_TINY:
        return 0.0
    return -expm1(-exp(lg))


cdef void gk15(Ctx* c, double a, double b, double* res, double* err) noexcept nogil:
    cdef double center = 0.5 * (a + b)
    cdef double h = 0.5 * (b - a)
    cdef double fc = integrand(c, center)
    cdef double resk = fc * WGK[7]
    cdef double resg = fc * WG[3]
    cdef double dx, fsum
    cdef int j
    for j in range(7):
        dx = h * XGK[j]
        fsum = integrand(c, center - dx) + integrand(c, center + dx)
        resk += WGK[j] * fsum
        if j % 2 == 1:
            resg += WG[j // 2] * fsum
    res[0] = resk * h
    err[0] = fabs((resk - resg) * h)


cdef double adaptive(Ctx* c, double* brk, int nbrk, double epsabs) noexcept nogil:
    """Globally adaptive GK15: bisect the segment with the largest error."""
    cdef int cap = nbrk + LIMIT + 2
    cdef double* sa = <double*> malloc(4 * cap * sizeof(double))
    cdef double* sb = sa + cap
    cdef double* sr = sb + cap
    cdef double* se = sr + cap
    cdef int n = 0, i, imax, nsplit = 0
    cdef double total = 0.0, err = 0.0, r, e, ra, ea, rb, eb, m, a, b, tol
    if sa == NULL:
        return NAN
    for i in range(nbrk - 1):
        if brk[i + 1] <= brk[i]:
            continue
        gk15(c, brk[i], brk[i + 1], &r, &e)
        sa[n] = brk[i]
        sb[n] = brk[i + 1]
        sr[n] = r
        se[n] = e
        total += r
        err += e
        n += 1
    while n > 0 and nsplit < LIMIT:
        tol = EPSREL * fabs(total)
        if tol < epsabs:
            tol = epsabs
        if err <= tol:
            break
        imax = 0
        for i in range(1, n):
            if se[i] > se[imax]:
                imax = i
        a = sa[imax]
        b = sb[imax]
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        nsplit += 1
        gk15(c, a, m, &ra, &ea)
        gk15(c, m, b, &rb, &eb)
        total += ra + rb - sr[imax]
        err += ea + eb - se[imax]
        sb[imax] = m
        sr[imax] = ra
        se[imax] = ea
        sa[n] = m
        sb[n] = b
        sr[n] = rb
        se[n] = eb
        n += 1
    total = 0.0
    for i in range(n):
        total += sr[i]
    free(sa)
    return total


cdef void nolan_setup(Ctx* c, double x, double alpha, double beta) noexcept nogil:
    cdef double zeta
    c.alpha = alpha
    c.beta = beta
    c.x = x
    if alpha == 1.0:
        c.S = M_PI
        c.lx = -M_PI * x / (2.0 * beta)
        c.theta0 = 0.0
    else:
        zeta = -beta * tan(M_PI * alpha / 2.0)
        c.theta0 = atan(beta * tan(M_PI * alpha / 2.0)) / alpha
        c.S = M_PI / 2.0 + c.theta0
        c.a1 = 1.0 / (alpha - 1.0)
        c.a2 = alpha / (alpha - 1.0)
        c.c0 = log(cos(alpha * c.theta0)) / (alpha - 1.0)
        c.lx = c.a2 * log(x - zeta)


cdef double level(Ctx* c, double target) noexcept nogil:
    cdef double lo = 0.0, hi = c.S, mid
    cdef bint increasing = c.alpha <= 1.0
    cdef int it
    for it in range(64):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if (log_g(c, mid) < target) == increasing:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


cdef void sort8(double* v, int n) noexcept nogil:
    cdef int i, j
    cdef double t
    for i in range(1, n):
        t = v[i]
        j = i - 1
        while j >= 0 and v[j] > t:
            v[j + 1] = v[j]
            j -= 1
        v[j + 1] = t


cdef void nolan_right(double x, double alpha, double beta, bint want_pdf,
                      bint want_cdf, double* out) noexcept nogil:
    cdef Ctx c
    cdef double brk[8]
    cdef double val, zeta, c1, theta0
    cdef int i
    out[0] = NAN
    out[1] = NAN
    out[2] = NAN
    if alpha != 1.0:
        theta0 = atan(beta * tan(M_PI * alpha / 2.0)) / alpha
        if M_PI / 2.0 + theta0 <= 1e-15:
            out[0] = 0.0
            out[1] = 1.0
            out[2] = 0.0
            return
    nolan_setup(&c, x, alpha, beta)
    for i in range(6):
        brk[i] = level(&c, LEVELS[i])
    brk[6] = 0.0
    brk[7] = c.S
    sort8(brk, 8)
    if want_pdf:
        c.kind = K_DENS
        val = adaptive(&c, brk, 8, EPSABS)
        if alpha == 1.0:
            out[0] = val / (2.0 * beta)
        else:
            zeta = -beta * tan(M_PI * alpha / 2.0)
            out[0] = alpha * val / (M_PI * fabs(alpha - 1.0) * (x - zeta))
    if want_cdf:
        if alpha > 1.0:
            c.kind = K_SURV
            out[2] = adaptive(&c, brk, 8, EPSABS) / M_PI
            out[1] = 1.0 - out[2]
        elif alpha == 1.0:
            c.kind = K_SURV
            out[1] = adaptive(&c, brk, 8, EPSABS) / M_PI
            c.kind = K_COMP
            out[2] = adaptive(&c, brk, 8, EPSABS) / M_PI
        else:
            c1 = (M_PI / 2.0 - c.theta0) / M_PI
            c.kind = K_SURV
            out[1] = c1 + adaptive(&c, brk, 8, EPSABS) / M_PI
            c.kind = K_COMP
            out[2] = adaptive(&c, brk, 8, EPSABS) / M_PI


cdef void swap12(double* out) noexcept nogil:
    cdef double t = out[1]
    out[1] = out[2]
    out[2] = t


cdef void cauchy(double x, double* out) noexcept nogil:
    out[0] = 1.0 / (M_PI * (1.0 + x * x))
    if x > 0:
        out[2] = atan2(1.0, x) / M_PI
        out[1] = 1.0 - out[2]
    else:
        out[1] = atan2(1.0, -x) / M_PI
        out[2] = 1.0 - out[1]


cdef void nolan(double x, double alpha, double beta, bint want_pdf, bint want_cdf,
                double* out) noexcept nogil:
    cdef double zeta, theta0
    if alpha == 1.0:
        if beta == 0.0:
            cauchy(x, out)
        elif beta > 0.0:
            nolan_right(x, alpha, beta, want_pdf, want_cdf, out)
        else:
            nolan_right(-x, alpha, -beta, want_pdf, want_cdf, out)
            swap12(out)
        return
    zeta = -beta * tan(M_PI * alpha / 2.0)
    if fabs(x - zeta) <= 1e-12 * (fabs(zeta) if fabs(zeta) > 1.0 else 1.0):
        theta0 = atan(beta * tan(M_PI * alpha / 2.0)) / alpha
        out[0] = (tgamma(1.0 + 1.0 / alpha) * cos(theta0)
                  / (M_PI * pow(1.0 + zeta * zeta, 0.5 / alpha)))
        out[1] = (M_PI / 2.0 - theta0) / M_PI
        out[2] = 1.0 - out[1]
        return
    if x > zeta:
        nolan_right(x, alpha, beta, want_pdf, want_cdf, out)
    else:
        nolan_right(-x, alpha, -beta, want_pdf, want_cdf, out)
        swap12(out)


cdef void fourier(double x, double alpha, double beta, bint want_pdf, bint want_cdf,
                  double* out) noexcept nogil:
    cdef Ctx c
    cdef double tmax = pow(40.0, 1.0 / alpha)
    cdef int npanel = <int> ceil(tmax * (fabs(x) + 1.0 + fabs(beta)) / 2.0)
    cdef int i
    cdef double h
    cdef double* brk
    if npanel < 8:
        npanel = 8
    brk = <double*> malloc((npanel + 1) * sizeof(double))
    out[0] = NAN
    out[1] = NAN
    out[2] = NAN
    if brk == NULL:
        return
    for i in range(npanel + 1):
        brk[i] = tmax * i / npanel
    c.alpha = alpha
    c.beta = beta
    c.x = x
    if want_pdf:
        c.kind = K_FRE
        out[0] = adaptive(&c, brk, npanel + 1, 1e-14) / M_PI
        if out[0] < 0.0:
            out[0] = 0.0
    if want_cdf:
        c.kind = K_FIM
        h = adaptive(&c, brk, npanel + 1, 1e-14) / M_PI
        out[1] = min(max(0.5 + h, 0.0), 1.0)
        out[2] = min(max(0.5 - h, 0.0), 1.0)
    free(brk)


cdef void evaluate(double x, double alpha, double beta, int method, bint want_pdf,
                   bint want_cdf, double* out) noexcept nogil:
    if method == 2:
        fourier(x, alpha, beta, want_pdf, want_cdf, out)
        return
    if method == 0:
        if alpha == 2.0:
            out[0] = exp(-0.25 * x * x) / (2.0 * sqrt(M_PI))
            out[1] = 0.5 * erfc(-0.5 * x)
            out[2] = 0.5 * erfc(0.5 * x)
            return
        if alpha == 1.0 and beta == 0.0:
            cauchy(x, out)
            return
        if (beta != 0.0 and alpha != 1.0 and fabs(alpha - 1.0) < FOURIER_BAND
                and fabs(x) <= FOURIER_XMAX):
            fourier(x, alpha, beta, want_pdf, want_cdf, out)
            return
    nolan(x, alpha, beta, want_pdf, want_cdf, out)


cdef double pdf1(double x, double alpha, double beta) noexcept nogil:
    cdef double out[3]
    evaluate(x, alpha, beta, 0, True, False, out)
    return out[0] if out[0] > 0.0 else 0.0


cdef double conjugate(double target, double alpha, double beta, double mode,
                      double side) noexcept nogil:
    cdef double width = 60.0
    cdef double far = mode + side * width
    cdef double ffar = pdf1(far, alpha, beta)
    cdef double a, fa, b, fb, c = mode, fc, tol_f
    cdef int it, side_kept = 0
    while ffar > target:
        if width > 1e8:
            return far
        width *= 2.0
        far = mode + side * width
        ffar = pdf1(far, alpha, beta)
    a = mode
    fa = pdf1(mode, alpha, beta) - target
    b = far
    fb = ffar - target
    tol_f = 1e-10 * target
    for it in range(200):
        if fb == fa:
            c = 0.5 * (a + b)
        else:
            c = b - fb * (b - a) / (fb - fa)
            if not (min(a, b) < c < max(a, b)):
                c = 0.5 * (a + b)
        fc = pdf1(c, alpha, beta) - target
        if fabs(fc) <= tol_f or fabs(b - a) <= 1e-13 * (1.0 + fabs(c)):
            return c
        if (fc > 0.0) == (fa > 0.0):
            a = c
            fa = fc
            if side_kept == -1:
                fb *= 0.5
            side_kept = -1
        else:
            b = c
            fb = fc
            if side_kept == 1:
                fa *= 0.5
            side_kept = 1
    return c


def pdf_std(x, double alpha, double beta, int method=0):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xf = np.ascontiguousarray(x, dtype=np.float64).reshape(-1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] of = np.empty_like(xf)
    cdef double out[3]
    cdef Py_ssize_t i, n = xf.shape[0]
    with nogil:
        for i in range(n):
            evaluate(xf[i], alpha, beta, method, True, False, out)
            of[i] = out[0] if out[0] > 0.0 else 0.0
    return of.reshape(np.shape(x))


def cdf_sf_std(x, double alpha, double beta, int method=0):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xf = np.ascontiguousarray(x, dtype=np.float64).reshape(-1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p = np.empty_like(xf)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] q = np.empty_like(xf)
    cdef double out[3]
    cdef Py_ssize_t i, n = xf.shape[0]
    with nogil:
        for i in range(n):
            evaluate(xf[i], alpha, beta, method, False, True, out)
            p[i] = min(max(out[1], 0.0), 1.0)
            q[i] = min(max(out[2], 0.0), 1.0)
    shape = np.shape(x)
    return p.reshape(shape), q.reshape(shape)


def pl_conj_std(z, double alpha, double beta, double mode):
    """Point plausibility and conjugate point of a standardized unimodal law."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] zf = np.ascontiguousarray(z, dtype=np.float64).reshape(-1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pl = np.empty_like(zf)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cj = np.empty_like(zf)
    cdef double out[3]
    cdef double zi, fz, c, lo, hi, p_lo, val, side
    cdef Py_ssize_t i, n = zf.shape[0]
    with nogil:
        for i in range(n):
            zi = zf[i]
            if zi == mode:
                pl[i] = 1.0
                cj[i] = zi
                continue
            fz = pdf1(zi, alpha, beta)
            if fz <= 0.0:
                pl[i] = 0.0
                cj[i] = NAN
                continue
            side = -1.0 if zi > mode else 1.0
            c = conjugate(fz, alpha, beta, mode, side)
            if c < zi:
                lo = c
                hi = zi
            else:
                lo = zi
                hi = c
            evaluate(lo, alpha, beta, 0, False, True, out)
            p_lo = out[1]
            evaluate(hi, alpha, beta, 0, False, True, out)
            val = p_lo + out[2] + (hi - lo) * fz
            pl[i] = min(max(val, 0.0), 1.0)
            cj[i] = c
    shape = np.shape(z)
    return pl.reshape(shape), cj.reshape(shape)

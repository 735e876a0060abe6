"""Pure-Python stable-law kernels.

Reference implementation of the hot loops in :mod:`stablebelief._ckernels`.
Both modules implement the same algorithms with the same constants so that
results agree to quadrature tolerance; this one is used when the compiled
extension is unavailable or ``STABLEBELIEF_PURE=1`` is set.

All routines work on the *standardized* S0 law (scale 1, location 0).
"""

import heapq
import math

import numpy as np

# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)

METHOD_AUTO = 0
METHOD_NOLAN = 1
METHOD_FOURIER = 2

# |alpha - 1| below which the auto method switches to Fourier inversion
# (the Nolan integrand degenerates as alpha -> 1 with beta != 0).
FOURIER_BAND = 1e-3
# Fourier inversion is only used on this central range; tails stay with Nolan.
FOURIER_XMAX = 50.0
EPSABS = 1e-15
EPSREL = 1e-11
LIMIT = 400
LOG_TINY = -745.0
LOG_HUGE = 700.0
# log g levels used as quadrature break points around the integrand peak
LEVELS = (4.0, 1.5, 0.0, -2.0, -6.0, -16.0)

_SQRT_PI = math.sqrt(math.pi)


def gk15(f, a, b):
    """One Gauss-Kronrod 15-point panel; returns (integral, error estimate)."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fc = f(c)
    resk = fc * WGK[7]
    resg = fc * WG[3]
    for j in range(7):
        dx = h * XGK[j]
        fsum = f(c - dx) + f(c + dx)
        resk += WGK[j] * fsum
        if j % 2 == 1:
            resg += WG[j // 2] * fsum
    return resk * h, abs((resk - resg) * h)


def adaptive(f, breaks, epsabs=EPSABS, epsrel=EPSREL, limit=LIMIT):
    """Globally adaptive GK15 quadrature over consecutive ``breaks``."""
    heap = []
    total = 0.0
    err = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b <= a:
            continue
        r, e = gk15(f, a, b)
        total += r
        err += e
        heap.append((-e, a, b, r))
    heapq.heapify(heap)
    nsplit = 0
    while heap and err > max(epsabs, epsrel * abs(total)) and nsplit < limit:
        nsplit += 1
        ne, a, b, r = heapq.heappop(heap)
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            heapq.heappush(heap, (ne, a, b, r))
            break
        ra, ea = gk15(f, a, m)
        rb, eb = gk15(f, m, b)
        total += ra + rb - r
        err += ea + eb + ne
        heapq.heappush(heap, (-ea, a, m, ra))
        heapq.heappush(heap, (-eb, m, b, rb))
    return math.fsum(item[3] for item in heap)


# ---------------------------------------------------------------------------
# closed forms


def _gauss(x):
    f = math.exp(-0.25 * x * x) / (2.0 * _SQRT_PI)
    return f, 0.5 * math.erfc(-0.5 * x), 0.5 * math.erfc(0.5 * x)


def _cauchy(x):
    f = 1.0 / (math.pi * (1.0 + x * x))
    if x > 0:
        q = math.atan2(1.0, x) / math.pi
        return f, 1.0 - q, q
    p = math.atan2(1.0, -x) / math.pi
    return f, p, 1.0 - p


# ---------------------------------------------------------------------------
# Nolan integral representation


class _Nolan:
    """Integrand of the Zolotarev/Nolan representation for one (x, alpha, beta).

    Integration variable is ``s = theta + theta0`` on ``[0, S]`` so that the
    singular endpoint ``sin(alpha*s)`` is evaluated without cancellation.
    """

    def __init__(self, x, alpha, beta):
        self.alpha = alpha
        if alpha == 1.0:
            # beta > 0 here, s = theta + pi/2
            self.S = math.pi
            self.lx = -math.pi * x / (2.0 * beta)
            self.beta = beta
        else:
            zeta = -beta * math.tan(math.pi * alpha / 2.0)
            self.theta0 = math.atan(beta * math.tan(math.pi * alpha / 2.0)) / alpha
            self.S = math.pi / 2.0 + self.theta0
            self.a1 = 1.0 / (alpha - 1.0)
            self.a2 = alpha / (alpha - 1.0)
            self.c0 = math.log(math.cos(alpha * self.theta0)) / (alpha - 1.0)
            self.lx = self.a2 * math.log(x - zeta)

    def log_g(self, s):
        if s <= 0.0 or s >= self.S:
            # endpoint limits; only reached by the split search
            increasing = self.alpha <= 1.0
            return -math.inf if (s <= 0.0) == increasing else math.inf
        u = self.S - s
        a = self.alpha
        if a == 1.0:
            b = self.beta
            w = 0.5 * math.pi * (1.0 - b) + b * s
            if w <= 0.0:
                return -math.inf
            return (self.lx + math.log(2.0 / math.pi) + math.log(w)
                    - math.log(math.sin(s)) - w * math.cos(s) / (math.sin(s) * b))
        su = math.sin(u)
        sa = math.sin(a * s)
        cc = math.cos(self.theta0 + (a - 1.0) * s)
        if su <= 0.0 or sa <= 0.0 or cc <= 0.0:
            if cc <= 0.0 and su > 0.0 and sa > 0.0:
                return -math.inf
            return math.inf if (sa <= 0.0) == (a > 1.0) else -math.inf
        return (self.lx + self.c0 + self.a1 * math.log(su)
                - self.a2 * math.log(sa) + math.log(cc))

    def level(self, target):
        """Locate s with log g(s) == target by bisection (g is monotone)."""
        lo, hi = 0.0, self.S
        increasing = self.alpha <= 1.0
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if (self.log_g(mid) < target) == increasing:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def breaks(self):
        """Break points bracketing the narrow peak of g*exp(-g) at g == 1."""
        pts = [self.level(t) for t in LEVELS]
        pts.append(0.0)
        pts.append(self.S)
        pts.sort()
        return pts

    def dens(self, s):
        lg = self.log_g(s)
        if lg > LOG_HUGE or lg < LOG_TINY:
            return 0.0
        return math.exp(lg - math.exp(lg))

    def surv(self, s):
        lg = self.log_g(s)
        if lg > LOG_HUGE:
            return 0.0
        if lg < LOG_TINY:
            return 1.0
        return math.exp(-math.exp(lg))

    def comp(self, s):
        lg = self.log_g(s)
        if lg > LOG_HUGE:
            return 1.0
        if lg < LOG_TINY:
            return 0.0
        return -math.expm1(-math.exp(lg))


def _nolan_right(x, alpha, beta, want_pdf, want_cdf):
    """pdf, F, 1-F for x strictly right of zeta (alpha != 1) or beta > 0 (alpha == 1)."""
    if alpha != 1.0:
        theta0 = math.atan(beta * math.tan(math.pi * alpha / 2.0)) / alpha
        if math.pi / 2.0 + theta0 <= 1e-15:
            # alpha < 1, beta = -1: support ends at zeta
            return 0.0, 1.0, 0.0
    integ = _Nolan(x, alpha, beta)
    breaks = integ.breaks()
    f = p = q = math.nan
    if want_pdf:
        val = adaptive(integ.dens, breaks)
        if alpha == 1.0:
            f = val / (2.0 * beta)
        else:
            zeta = -beta * math.tan(math.pi * alpha / 2.0)
            f = alpha * val / (math.pi * abs(alpha - 1.0) * (x - zeta))
    if want_cdf:
        if alpha > 1.0:
            q = adaptive(integ.surv, breaks) / math.pi
            p = 1.0 - q
        elif alpha == 1.0:
            p = adaptive(integ.surv, breaks) / math.pi
            q = adaptive(integ.comp, breaks) / math.pi
        else:
            c1 = (math.pi / 2.0 - integ.theta0) / math.pi
            p = c1 + adaptive(integ.surv, breaks) / math.pi
            q = adaptive(integ.comp, breaks) / math.pi
    return f, p, q


def _nolan(x, alpha, beta, want_pdf=True, want_cdf=True):
    if alpha == 1.0:
        if beta == 0.0:
            return _cauchy(x)
        if beta > 0.0:
            return _nolan_right(x, alpha, beta, want_pdf, want_cdf)
        f, p, q = _nolan_right(-x, alpha, -beta, want_pdf, want_cdf)
        return f, q, p
    zeta = -beta * math.tan(math.pi * alpha / 2.0)
    if abs(x - zeta) <= 1e-12 * max(1.0, abs(zeta)):
        theta0 = math.atan(beta * math.tan(math.pi * alpha / 2.0)) / alpha
        f = (math.gamma(1.0 + 1.0 / alpha) * math.cos(theta0)
             / (math.pi * (1.0 + zeta * zeta) ** (0.5 / alpha)))
        p = (math.pi / 2.0 - theta0) / math.pi
        return f, p, 1.0 - p
    if x > zeta:
        return _nolan_right(x, alpha, beta, want_pdf, want_cdf)
    f, p, q = _nolan_right(-x, alpha, -beta, want_pdf, want_cdf)
    return f, q, p


# ---------------------------------------------------------------------------
# direct Fourier inversion of the characteristic function


def _eta(t, alpha):
    if alpha == 1.0:
        return 2.0 / math.pi * t * math.log(t)
    return -math.tan(math.pi * alpha / 2.0) * t * math.expm1((alpha - 1.0) * math.log(t))


def _fourier(x, alpha, beta, want_pdf=True, want_cdf=True):
    tmax = 40.0 ** (1.0 / alpha)
    npanel = max(8, int(math.ceil(tmax * (abs(x) + 1.0 + abs(beta)) / 2.0)))
    breaks = [tmax * i / npanel for i in range(npanel + 1)]

    def re(t):
        return math.exp(-t ** alpha) * math.cos(x * t + beta * _eta(t, alpha))

    def im(t):
        return math.exp(-t ** alpha) * math.sin(x * t + beta * _eta(t, alpha)) / t

    f = p = q = math.nan
    if want_pdf:
        f = max(adaptive(re, breaks, epsabs=1e-14) / math.pi, 0.0)
    if want_cdf:
        h = adaptive(im, breaks, epsabs=1e-14) / math.pi
        p = min(max(0.5 + h, 0.0), 1.0)
        q = min(max(0.5 - h, 0.0), 1.0)
    return f, p, q


def _eval(x, alpha, beta, method, want_pdf, want_cdf):
    if method == METHOD_FOURIER:
        return _fourier(x, alpha, beta, want_pdf, want_cdf)
    if method == METHOD_AUTO:
        if alpha == 2.0:
            return _gauss(x)
        if alpha == 1.0 and beta == 0.0:
            return _cauchy(x)
        if (beta != 0.0 and alpha != 1.0 and abs(alpha - 1.0) < FOURIER_BAND
                and abs(x) <= FOURIER_XMAX):
            return _fourier(x, alpha, beta, want_pdf, want_cdf)
    return _nolan(x, alpha, beta, want_pdf, want_cdf)


# ---------------------------------------------------------------------------
# public array API


def pdf_std(x, alpha, beta, method=METHOD_AUTO):
    x = np.array(x, dtype=np.float64)
    out = np.empty_like(x)
    flat = out.reshape(-1)
    for i, xi in enumerate(x.reshape(-1)):
        f = _eval(float(xi), alpha, beta, method, True, False)[0]
        flat[i] = f if f > 0.0 else 0.0
    return out


def cdf_sf_std(x, alpha, beta, method=METHOD_AUTO):
    x = np.array(x, dtype=np.float64)
    p = np.empty_like(x)
    q = np.empty_like(x)
    pf, qf = p.reshape(-1), q.reshape(-1)
    for i, xi in enumerate(x.reshape(-1)):
        _, pi, qi = _eval(float(xi), alpha, beta, method, False, True)
        pf[i] = min(max(pi, 0.0), 1.0)
        qf[i] = min(max(qi, 0.0), 1.0)
    return p, q


def _pdf1(x, alpha, beta):
    f = _eval(x, alpha, beta, METHOD_AUTO, True, False)[0]
    return f if f > 0.0 else 0.0


def _conjugate(target, alpha, beta, mode, side):
    """Point on ``side`` (+1 right, -1 left) of the mode where pdf == target."""
    width = 60.0
    far = mode + side * width
    ffar = _pdf1(far, alpha, beta)
    while ffar > target:
        if width > 1e8:
            return far
        width *= 2.0
        far = mode + side * width
        ffar = _pdf1(far, alpha, beta)
    # root of pdf(c) - target between mode (positive) and far (<= 0)
    a, fa = mode, _pdf1(mode, alpha, beta) - target
    b, fb = far, ffar - target
    tol_f = 1e-10 * target
    side_kept = 0
    for _ in range(200):
        if fb == fa:
            c = 0.5 * (a + b)
        else:
            c = b - fb * (b - a) / (fb - fa)
            if not (min(a, b) < c < max(a, b)):
                c = 0.5 * (a + b)
        fc = _pdf1(c, alpha, beta) - target
        if abs(fc) <= tol_f or abs(b - a) <= 1e-13 * (1.0 + abs(c)):
            return c
        if (fc > 0.0) == (fa > 0.0):
            a, fa = c, fc
            if side_kept == -1:
                fb *= 0.5
            side_kept = -1
        else:
            b, fb = c, fc
            if side_kept == 1:
                fa *= 0.5
            side_kept = 1
    return c


def pl_conj_std(z, alpha, beta, mode):
    """Least-commitment point plausibility of a unimodal standardized law.

    Returns ``(pl, conj)`` arrays: ``pl(z) = F(lo) + 1 - F(hi) + (hi - lo) f(z)``
    where ``{lo, hi} = {z, conj}`` and ``f(conj) = f(z)`` on the other flank.
    """
    z = np.array(z, dtype=np.float64)
    pl = np.empty_like(z)
    conj = np.empty_like(z)
    plf, cf = pl.reshape(-1), conj.reshape(-1)
    for i, zi in enumerate(z.reshape(-1)):
        zi = float(zi)
        if zi == mode:
            plf[i], cf[i] = 1.0, zi
            continue
        fz = _pdf1(zi, alpha, beta)
        if fz <= 0.0:
            plf[i], cf[i] = 0.0, math.nan
            continue
        side = -1.0 if zi > mode else 1.0
        c = _conjugate(fz, alpha, beta, mode, side)
        lo, hi = (c, zi) if c < zi else (zi, c)
        p_lo = _eval(lo, alpha, beta, METHOD_AUTO, False, True)[1]
        q_hi = _eval(hi, alpha, beta, METHOD_AUTO, False, True)[2]
        val = p_lo + q_hi + (hi - lo) * fz
        plf[i] = min(max(val, 0.0), 1.0)
        cf[i] = c
    return pl, conj

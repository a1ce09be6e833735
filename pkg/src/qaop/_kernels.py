"""Compiled inner loops for the spectral iteration.

Two variants: plain float64 and double-double (an unevaluated sum
``hi + lo`` of two float64 values, about 106 significant bits). The
double-double primitives are the classic error-free transformations of
Dekker and Knuth; they rely on strict IEEE evaluation, so nothing here may
be compiled with fastmath.

Each kernel advances at most ``n_steps`` iterations and records, per step,
the normalization constant, the condition number ``max/min`` of beta, the
largest squared amplitude, and the adjacent-order inversions of beta.
"""

import numpy as np
from numba import njit

_SPLIT = 134217729.0  # 2**27 + 1


@njit(cache=True, inline="always")
def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@njit(cache=True, inline="always")
def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


@njit(cache=True, inline="always")
def _split(a):
    t = _SPLIT * a
    hi = t - (t - a)
    return hi, a - hi


@njit(cache=True, inline="always")
def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@njit(cache=True, inline="always")
def dd_add(ah, al, bh, bl):
    s, e = _two_sum(ah, bh)
    t, f = _two_sum(al, bl)
    e += t
    s, e = _quick_two_sum(s, e)
    e += f
    return _quick_two_sum(s, e)


@njit(cache=True, inline="always")
def dd_sub(ah, al, bh, bl):
    return dd_add(ah, al, -bh, -bl)


@njit(cache=True, inline="always")
def dd_mul(ah, al, bh, bl):
    p, e = _two_prod(ah, bh)
    e += ah * bl + al * bh
    return _quick_two_sum(p, e)


@njit(cache=True, inline="always")
def dd_div(ah, al, bh, bl):
    q1 = ah / bh
    ph, pl = dd_mul(q1, 0.0, bh, bl)
    rh, rl = dd_sub(ah, al, ph, pl)
    q2 = rh / bh
    ph, pl = dd_mul(q2, 0.0, bh, bl)
    rh, rl = dd_sub(rh, rl, ph, pl)
    q3 = rh / bh
    q1, q2 = _quick_two_sum(q1, q2)
    return dd_add(q1, q2, q3, 0.0)


@njit(cache=True, inline="always")
def dd_sqrt(ah, al):
    if ah <= 0.0:
        return 0.0, 0.0
    x = np.sqrt(ah)
    sh, sl = _two_prod(x, x)
    rh, rl = dd_sub(ah, al, sh, sl)
    return _quick_two_sum(x, rh / (2.0 * x))


@njit(cache=True)
def run_double(s2, beta, lam, eps, n_steps, hist):
    """Advance ``beta`` in place; return ``(steps_done, converged, c, kappa, a, inversions)``.

    ``hist`` is either ``(n_steps, k)`` to record every iterate or ``(0, k)``.
    The per-step arrays have length ``n_steps``; only the first
    ``steps_done`` entries are meaningful.
    """
    k = s2.shape[0]
    record = hist.shape[0] > 0
    c_seq = np.empty(n_steps)
    kap_seq = np.empty(n_steps)
    a_seq = np.empty(n_steps)
    inv_seq = np.zeros(n_steps, dtype=np.int64)
    w = np.empty(k)
    for step in range(n_steps):
        ss = 0.0
        for j in range(k):
            sb = s2[j] * beta[j]
            wj = (sb * beta[j] + lam) / sb
            w[j] = wj
            ss += wj * wj
        c = np.sqrt(ss)
        diff = 0.0
        bmax = 0.0
        bmin = np.inf
        for j in range(k):
            nb = w[j] / c
            d = abs(nb - beta[j])
            if d > diff:
                diff = d
            beta[j] = nb
            if nb > bmax:
                bmax = nb
            if nb < bmin:
                bmin = nb
        inv = 0
        for j in range(k - 1):
            if beta[j + 1] < beta[j]:
                inv += 1
        c_seq[step] = c
        kap_seq[step] = bmax / bmin
        a_seq[step] = bmax * bmax
        inv_seq[step] = inv
        if record:
            hist[step, :] = beta
        if diff < eps:
            return step + 1, True, c_seq, kap_seq, a_seq, inv_seq
    return n_steps, False, c_seq, kap_seq, a_seq, inv_seq


@njit(cache=True)
def run_dd(s2, bhi, blo, lam, eps, n_steps, hist):
    """Double-double twin of :func:`run_double`; ``bhi``/``blo`` updated in place.

    Uses ``w_j = beta_j + lam / (s2_j beta_j)``, algebraically identical to
    the quotient form and one division cheaper. Recorded sequences are
    rounded to float64.
    """
    k = s2.shape[0]
    record = hist.shape[0] > 0
    c_seq = np.empty(n_steps)
    kap_seq = np.empty(n_steps)
    a_seq = np.empty(n_steps)
    inv_seq = np.zeros(n_steps, dtype=np.int64)
    wh = np.empty(k)
    wl = np.empty(k)
    for step in range(n_steps):
        sh = 0.0
        sl = 0.0
        for j in range(k):
            ph, pl = dd_mul(s2[j], 0.0, bhi[j], blo[j])
            qh, ql = dd_div(lam, 0.0, ph, pl)
            xh, xl = dd_add(bhi[j], blo[j], qh, ql)
            wh[j] = xh
            wl[j] = xl
            yh, yl = dd_mul(xh, xl, xh, xl)
            sh, sl = dd_add(sh, sl, yh, yl)
        ch, cl = dd_sqrt(sh, sl)
        diff = 0.0
        bmax = 0.0
        bmin = np.inf
        for j in range(k):
            nh, nl = dd_div(wh[j], wl[j], ch, cl)
            dh, dl = dd_sub(nh, nl, bhi[j], blo[j])
            d = abs(dh)
            if d > diff:
                diff = d
            bhi[j] = nh
            blo[j] = nl
            if nh > bmax:
                bmax = nh
            if nh < bmin:
                bmin = nh
        inv = 0
        for j in range(k - 1):
            dh, dl = dd_sub(bhi[j + 1], blo[j + 1], bhi[j], blo[j])
            if dh < 0.0:
                inv += 1
        c_seq[step] = ch
        kap_seq[step] = bmax / bmin
        a_seq[step] = bmax * bmax
        inv_seq[step] = inv
        if record:
            hist[step, :] = bhi
        if diff < eps:
            return step + 1, True, c_seq, kap_seq, a_seq, inv_seq
    return n_steps, False, c_seq, kap_seq, a_seq, inv_seq

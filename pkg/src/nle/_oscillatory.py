"""Oscillatory power-law integrals for singular jump-kernel quadrature.

Everything here reduces to the tail integral

    T(y; beta) = int_y^inf exp(i s) s^(-beta) ds,     y > 0, beta > 1,

computed by integration-by-parts asymptotics for large y and by cached
panel tables for moderate y.  Radial integrals of exp(i r t) r^(-1-sigma)
over mesh shells become differences of T, which removes any need to
resolve oscillations with nodes.  The same machinery yields the
angularly-averaged (Bessel / sinc) reductions used for the isotropic part
of a kernel in d = 2, 3.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import j0 as _bessel_j0

# Branch thresholds.  SERIES_PHASE is the |t|*r below which the Taylor
# series of the compensated integrand is used; arguments reaching the
# panel tables are then always >= SERIES_PHASE.
SERIES_PHASE = 0.5
ASYM_SPLIT = 40.0
TABLE_LO = 0.3
MEAN_SPLIT = 30.0
_MEAN_TAYLOR = 0.01

_GL_ORDER = 12
_gl_x, _gl_w = np.polynomial.legendre.leggauss(_GL_ORDER)


def _gl_panel_integral(f, a, b):
    """Gauss-Legendre integral of f over [a, b]; a, b may be arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    s = mid[..., None] + half[..., None] * _gl_x
    vals = f(s)
    return (vals * _gl_w).sum(axis=-1) * half


def tail_asymptotic(y, beta):
    """T(y; beta) for scalar/array y >= ASYM_SPLIT, by repeated parts."""
    y = np.asarray(y, dtype=float)
    term = 1j * y ** (-beta) + 0j * y
    total = np.zeros_like(term)
    active = np.ones(y.shape, dtype=bool)
    for k in range(64):
        total = np.where(active, total + term, total)
        nxt = term * (-1j) * (beta + k) / y
        small = np.abs(nxt) < 1e-17 * np.maximum(np.abs(total), y ** (-beta))
        growing = np.abs(nxt) >= np.abs(term)
        active = active & ~(small | growing)
        if not active.any():
            break
        term = nxt
    return np.exp(1j * y) * total


@lru_cache(maxsize=64)
def phase_table(beta: float):
    """Cached (breakpoints, prefix, top) data for T(.; beta) queries.

    prefix[j] holds int_{bp[j]}^{bp[-1]} exp(is) s^(-beta) ds and top is
    the asymptotic T(bp[-1]; beta), so T(y) for y in [bp[j], bp[j+1])
    needs only one partial-panel quadrature.
    """
    n = int(np.ceil(np.log(ASYM_SPLIT / TABLE_LO) / np.log(1.045)))
    bp = TABLE_LO * (ASYM_SPLIT / TABLE_LO) ** (np.arange(n + 1) / n)
    bp[-1] = ASYM_SPLIT
    panels = _gl_panel_integral(
        lambda s: np.exp(1j * s) * s ** (-beta), bp[:-1], bp[1:]
    )
    prefix = np.zeros(n + 1, dtype=complex)
    prefix[:-1] = panels[::-1].cumsum()[::-1]
    top = complex(tail_asymptotic(ASYM_SPLIT, beta))
    return bp, prefix, top


def tail_integral(y, beta):
    """T(y; beta) = int_y^inf exp(is) s^(-beta) ds for y >= TABLE_LO."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.empty(y.shape, dtype=complex)
    hi = y >= ASYM_SPLIT
    if hi.any():
        out[hi] = tail_asymptotic(y[hi], beta)
    lo = ~hi
    if lo.any():
        bp, prefix, top = phase_table(float(beta))
        yl = y[lo]
        idx = np.searchsorted(bp, yl, side="right") - 1
        idx = np.clip(idx, 0, len(bp) - 2)
        partial = _gl_panel_integral(
            lambda s: np.exp(1j * s) * s ** (-beta), yl, bp[idx + 1]
        )
        out[lo] = partial + prefix[idx + 1] + top
    return out


# Hankel asymptotic coefficients for J0: (P0 + iQ0)(s) ~ sum a_k s^(-k).
def _hankel_coeffs(nterms=8):
    coeffs = []
    for k in range(nterms):
        dfact = 1.0
        for j in range(1, k + 1):
            dfact *= (2 * j - 1) ** 2 / (8.0 * j)
        coeffs.append((-1j) ** k * dfact)
    return np.array(coeffs)


_A_HANKEL = _hankel_coeffs()


def _mean_integrand(d):
    if d == 2:
        return lambda s: _bessel_j0(s) - 1.0
    return lambda s: np.sinc(s / np.pi) - 1.0


def _mean_taylor_int(y, d, sigma):
    # int_0^y (avg(s)-1) s^(-1-sigma) ds for y <= _MEAN_TAYLOR, from the
    # series avg(s)-1 = c2 s^2 + c4 s^4 + c6 s^6 + ...
    if d == 2:
        c = (-0.25, 1.0 / 64.0, -1.0 / 2304.0)
    else:
        c = (-1.0 / 6.0, 1.0 / 120.0, -1.0 / 5040.0)
    y = np.asarray(y, dtype=float)
    total = np.zeros_like(y)
    for k, ck in enumerate(c):
        p = 2 * (k + 1) - sigma
        total = total + ck * y**p / p
    return total


def _mean_tail(s, d, sigma):
    # G_tail(s) = int_s^inf (avg(u)-1) u^(-1-sigma) du for s >= MEAN_SPLIT.
    s = np.asarray(s, dtype=float)
    if d == 2:
        acc = np.zeros(s.shape, dtype=complex)
        rot = np.exp(-1j * np.pi / 4.0)
        for k, ak in enumerate(_A_HANKEL):
            acc = acc + ak * rot * tail_integral(s, 1.5 + sigma + k)
        osc = np.sqrt(2.0 / np.pi) * acc.real
    else:
        osc = tail_integral(s, 2.0 + sigma).imag
    return osc - s ** (-sigma) / sigma


@lru_cache(maxsize=64)
def mean_table(d: int, sigma: float):
    """Cached prefix table for the isotropic reduction in dimension d."""
    f = _mean_integrand(d)
    n = int(np.ceil(np.log(MEAN_SPLIT / _MEAN_TAYLOR) / np.log(1.13)))
    bp = _MEAN_TAYLOR * (MEAN_SPLIT / _MEAN_TAYLOR) ** (np.arange(n + 1) / n)
    bp[-1] = MEAN_SPLIT
    panels = _gl_panel_integral(lambda s: f(s) * s ** (-1.0 - sigma), bp[:-1], bp[1:])
    prefix = np.zeros(n + 1)
    prefix[:-1] = panels[::-1].cumsum()[::-1]
    g_split = float(_mean_tail(MEAN_SPLIT, d, sigma))
    taylor_top = float(_mean_taylor_int(_MEAN_TAYLOR, d, sigma))
    return bp, prefix, g_split, taylor_top


def mean_upper_integral(s, d, sigma):
    """G(s) = int_s^inf (avg(u)-1) u^(-1-sigma) du; avg is the spherical
    average of the plane wave (J0 in d=2, sinc in d=3).  s >= 0; s=inf -> 0.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.zeros(s.shape)
    bp, prefix, g_split, taylor_top = mean_table(d, float(sigma))
    f = _mean_integrand(d)

    inf_mask = np.isinf(s)
    hi = (s >= MEAN_SPLIT) & ~inf_mask
    if hi.any():
        out[hi] = _mean_tail(s[hi], d, sigma)
    tiny = s < _MEAN_TAYLOR
    if tiny.any():
        g_b0 = prefix[0] + g_split
        out[tiny] = (taylor_top - _mean_taylor_int(s[tiny], d, sigma)) + g_b0
    mid = ~(hi | tiny | inf_mask)
    if mid.any():
        sm = s[mid]
        idx = np.searchsorted(bp, sm, side="right") - 1
        idx = np.clip(idx, 0, len(bp) - 2)
        partial = _gl_panel_integral(
            lambda u: f(u) * u ** (-1.0 - sigma), sm, bp[idx + 1]
        )
        out[mid] = partial + prefix[idx + 1] + g_split
    return out


def power_integral(a, b, p):
    """int_a^b r^p dr with the log case p = -1; b may be inf (needs p < -1),
    a may be 0 (needs p > -1)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p = float(p)
    if p == -1.0:
        return np.log(b / a)
    q = p + 1.0
    with np.errstate(divide="ignore"):
        bterm = np.where(np.isinf(b), 0.0, np.power(b, q))
        aterm = np.where(a == 0.0, 0.0, np.power(a, q))
    return (bterm - aterm) / q

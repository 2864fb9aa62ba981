"""NumPy implementation of the hot numerical kernels.

This module is the reference backend; ``nle._core`` is a compiled twin
with identical semantics, selected at import time in ``nle._backend``.

The central routine is ``reduce_pieces``: given a flat list of radial
pieces (t, rho0, rho1, mode, weight) it accumulates

    P = int_{rho0}^{rho1} (exp(i r t) - 1 - i r t * mode) r^(-1-sigma) dr

per segment.  Small phases |t| rho1 <= SERIES_PHASE use the Taylor series
of the compensated integrand (which also neutralises the cancellation
between the three terms); larger phases use exact tail-integral
differences, so no oscillation is ever resolved by brute-force nodes.
"""

from __future__ import annotations

import numpy as np

from ._oscillatory import SERIES_PHASE, power_integral, tail_integral

_SERIES_TERMS = 18


def _power_primitive(a, b, p):
    # int_a^b r^p dr, vectorized in a, b with scalar p; log case p == -1.
    if abs(p + 1.0) < 1e-14:
        return np.log(b / a)
    q = p + 1.0
    with np.errstate(divide="ignore"):
        bterm = np.where(np.isinf(b), 0.0, np.power(b, q))
        aterm = np.where(a == 0.0, 0.0, np.power(a, q))
    return (bterm - aterm) / q


def _series_part(x, a, b, mode, sigma):
    """Taylor sum_k (i x)^k / k! * int_a^b r^(k-1-sigma) dr; k starts at 2
    where mode == 1 (the compensator removes the linear term)."""
    out = np.zeros(x.shape, dtype=complex)
    coeff = np.ones(x.shape, dtype=complex)
    ix = 1j * x
    for k in range(1, _SERIES_TERMS + 1):
        coeff = coeff * ix / k
        p = k - 1.0 - sigma
        with np.errstate(divide="ignore", invalid="ignore"):
            if abs(p + 1.0) < 1e-14:
                ik = np.log(b / np.where(a > 0.0, a, 1.0))
                ik = np.where(a > 0.0, ik, np.inf)
            else:
                q = p + 1.0
                ratio = np.where(a > 0.0, b / a, 1.0)
                ik = np.where(
                    a > 0.0,
                    np.power(np.where(a > 0.0, a, 1.0), q)
                    * np.expm1(q * np.log(ratio))
                    / q,
                    np.power(b, q) / q,
                )
            term = coeff * ik
        if k == 1:
            # the compensator removes the linear term exactly where mode=1
            term = np.where(mode > 0.5, 0.0, term)
        out = out + term
    return out


def reduce_pieces(t, rho0, rho1, mode, w, seg_id, nseg, sigma):
    """Weighted per-segment sums of compensated radial piece integrals.

    Parameters are flat float arrays of equal length (mode is 0/1, rho1
    may be inf); seg_id maps each piece to an output slot.
    """
    t = np.asarray(t, dtype=float)
    rho0 = np.asarray(rho0, dtype=float)
    rho1 = np.asarray(rho1, dtype=float)
    mode = np.asarray(mode, dtype=float)
    w = np.asarray(w, dtype=float)
    seg_id = np.asarray(seg_id, dtype=np.intp)

    vals = np.zeros(t.shape, dtype=complex)
    x = np.abs(t)
    live = x > 0.0

    phase_top = np.where(np.isinf(rho1), np.inf, x * rho1)
    ser = live & (phase_top <= SERIES_PHASE)
    if ser.any():
        vals[ser] = _series_part(x[ser], rho0[ser], rho1[ser], mode[ser], sigma)

    osc = live & ~ser
    if osc.any():
        xo = x[osc]
        r0o = rho0[osc]
        r1o = rho1[osc]
        mo = mode[osc]
        rsplit = SERIES_PHASE / xo
        acc = np.zeros(xo.shape, dtype=complex)

        has_series = r0o < rsplit
        if has_series.any():
            acc[has_series] = _series_part(
                xo[has_series],
                r0o[has_series],
                rsplit[has_series],
                mo[has_series],
                sigma,
            )

        ra = np.maximum(r0o, rsplit)
        ya = xo * ra
        yb = xo * r1o
        ey = tail_integral(ya, 1.0 + sigma)
        fin = np.isfinite(yb)
        if fin.any():
            ey[fin] = ey[fin] - tail_integral(yb[fin], 1.0 + sigma)
        acc = acc + np.power(xo, sigma) * ey
        acc = acc - _power_primitive(ra, r1o, -1.0 - sigma)
        cvals = _power_primitive(ra, r1o, -sigma)
        acc = acc - 1j * np.where(mo > 0.5, xo * cvals, 0.0)
        vals[osc] = acc

    vals = np.where(t < 0.0, np.conj(vals), vals)
    wv = w * vals
    out = np.bincount(seg_id, weights=wv.real, minlength=nseg) + 1j * np.bincount(
        seg_id, weights=wv.imag, minlength=nseg
    )
    return out


# 6-point (quintic) Lagrange interpolation on a uniform grid, zero outside.
_STENCIL = np.arange(-2, 4)


def _lagrange6_weights(s):
    s = np.asarray(s, dtype=float)
    w = np.empty(s.shape + (6,), dtype=float)
    for m_idx, m in enumerate(_STENCIL):
        num = np.ones_like(s)
        den = 1.0
        for k in _STENCIL:
            if k == m:
                continue
            num = num * (s - k)
            den *= m - k
        w[..., m_idx] = num / den
    return w


def interp_zero_outside(u, x0, h, pts):
    """Quintic Lagrange interpolation of samples u at positions pts; the
    field is 0 outside [x0, x0 + (n-1) h]."""
    u = np.asarray(u, dtype=float)
    pts = np.asarray(pts, dtype=float)
    n = u.shape[0]
    q = (pts - x0) / h
    j = np.floor(q).astype(np.intp)
    s = q - j
    w = _lagrange6_weights(s)
    idx = j[..., None] + _STENCIL
    valid = (idx >= 0) & (idx < n)
    vals = np.where(valid, u[np.clip(idx, 0, n - 1)], 0.0)
    out = (w * vals).sum(axis=-1)
    inside = (q > -3.0) & (q < n + 2.0)
    return np.where(inside, out, 0.0)


def double_diff_sum(u, x0, h, ynodes, yweights):
    """sum_i h * sum_q w_q (U(x_i + y_q) - u_i)^2 with U the quintic
    zero-outside interpolant of u."""
    u = np.asarray(u, dtype=float)
    n = u.shape[0]
    xs = x0 + h * np.arange(n)
    pts = xs[:, None] + np.asarray(ynodes)[None, :]
    shifted = interp_zero_outside(u, x0, h, pts)
    diff2 = (shifted - u[:, None]) ** 2
    return float(h * (diff2 @ np.asarray(yweights)).sum())


def triple_diff_sum(u, x0, h, ynodes, yweights, znodes, zweights):
    """sum_i h * sum_{q,r} wy_q wz_r (U(x+y+z)-U(x+y)-U(x+z)+u)^2."""
    u = np.asarray(u, dtype=float)
    yn = np.asarray(ynodes, dtype=float)
    zn = np.asarray(znodes, dtype=float)
    wy = np.asarray(yweights, dtype=float)
    wz = np.asarray(zweights, dtype=float)
    n = u.shape[0]
    xs = x0 + h * np.arange(n)
    total = 0.0
    for i in range(n):
        ay = interp_zero_outside(u, x0, h, xs[i] + yn)
        az = interp_zero_outside(u, x0, h, xs[i] + zn)
        c = interp_zero_outside(u, x0, h, xs[i] + yn[:, None] + zn[None, :])
        quad = c - ay[:, None] - az[None, :] + u[i]
        total += wy @ (quad**2) @ wz
    return float(h * total)


def sharp_sweep_1d(g, half_widths, block=256):
    """Pointwise max over window half-widths of the mean oscillation of g
    over the (box-clipped) window [i-m, i+m]."""
    g = np.asarray(g, dtype=float)
    n = g.shape[0]
    out = np.zeros(n)
    for m in half_widths:
        m = int(m)
        offs = np.arange(-m, m + 1)
        for i0 in range(0, n, block):
            i1 = min(i0 + block, n)
            idx = np.arange(i0, i1)[:, None] + offs[None, :]
            valid = (idx >= 0) & (idx < n)
            vals = np.where(valid, g[np.clip(idx, 0, n - 1)], 0.0)
            cnt = valid.sum(axis=1)
            avg = vals.sum(axis=1) / cnt
            osc = (np.abs(vals - avg[:, None]) * valid).sum(axis=1) / cnt
            np.maximum(out[i0:i1], osc, out=out[i0:i1])
    return out

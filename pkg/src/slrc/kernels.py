"""Hot loops: the delay-coupled RK4 stepper and the NARMA10 recursion.

Each kernel exists twice, with identical signatures:

* ``*_numba`` -- scalar loops compiled with ``numba.njit``;
* ``*_numpy`` -- the same algorithm vectorized over nodes with plain numpy.

The module-level names ``advance`` and ``narma10_recursion`` point at the
variant selected by :mod:`slrc._backend`.

History layout
--------------
The delayed state lives in three ring buffers of length ``L >= delay + 2``:
``hz`` (state), ``hfr`` (derivative at the grid point, right limit) and ``hfl``
(derivative at the grid point, left limit).  Both limits are kept because the
drive jumps at segment boundaries; the cubic Hermite interpolant over
``[t_m, t_m+1]`` uses ``hfr[m]`` and ``hfl[m+1]`` so it never straddles a jump.
"""

from __future__ import annotations

import numpy as np

from ._backend import BACKEND, njit

DIVERGENCE_LIMIT = 1.0e6
_LIMIT2 = DIVERGENCE_LIMIT * DIVERGENCE_LIMIT
# State components below this are set to exactly zero.  A decaying state would
# otherwise sink into subnormal floats, which are two orders of magnitude
# slower to compute with; squares of anything above it stay normal.
FLUSH = 1.0e-150

STATUS_OK = 0
STATUS_DIVERGED = 1


@njit(cache=True, inline="always")
def _field(x, y, d, cx, cy, om, gr, gi):
    a = x * x + y * y
    pr = d + gr * a
    pi = om + gi * a
    return pr * x - pi * y + cx, pr * y + pi * x + cy


@njit(cache=True, fastmath={"contract"})
def advance_numba(z, hz, hfr, hfl, n, delay, levels, seg_steps, dt, omega,
                  gamma_re, gamma_im, src, dst, w_re, w_im, samples, traj, stride):
    nr = z.shape[0]
    L = hz.shape[0]
    ne = src.shape[0]
    om = omega
    gr = gamma_re
    gi = gamma_im

    zr = np.empty(nr)
    zi = np.empty(nr)
    k1r = np.empty(nr)
    k1i = np.empty(nr)
    c0r = np.zeros(nr)
    c0i = np.zeros(nr)
    cmr = np.empty(nr)
    cmi = np.empty(nr)
    c1r = np.empty(nr)
    c1i = np.empty(nr)
    mr = np.empty(nr)
    mi = np.empty(nr)
    for k in range(nr):
        zr[k] = z[k].real
        zi[k] = z[k].imag

    ia = (n - delay) % L
    for e in range(ne):
        q = hz[ia, src[e]]
        c0r[dst[e]] += w_re[e] * q.real - w_im[e] * q.imag
        c0i[dst[e]] += w_re[e] * q.imag + w_im[e] * q.real

    h2 = 0.5 * dt
    h6 = dt / 6.0
    h8 = 0.125 * dt
    ic = n % L
    d = levels[0]
    for k in range(nr):
        k1r[k], k1i[k] = _field(zr[k], zi[k], d[k], c0r[k], c0i[k], om, gr, gi)

    local = 0
    rec = 0
    for s in range(levels.shape[0]):
        d = levels[s]
        if s > 0:
            for k in range(nr):
                if d[k] != levels[s - 1, k]:
                    for q in range(nr):
                        k1r[q], k1i[q] = _field(zr[q], zi[q], d[q], c0r[q], c0i[q], om, gr, gi)
                    break
        for _ in range(seg_steps):
            ib = ia + 1
            if ib == L:
                ib = 0
            for k in range(nr):
                a0 = hz[ia, k]
                a1 = hz[ib, k]
                fa = hfr[ia, k]
                fb = hfl[ib, k]
                mr[k] = 0.5 * (a0.real + a1.real) + h8 * (fa.real - fb.real)
                mi[k] = 0.5 * (a0.imag + a1.imag) + h8 * (fa.imag - fb.imag)
                cmr[k] = 0.0
                cmi[k] = 0.0
                c1r[k] = 0.0
                c1i[k] = 0.0
            for e in range(ne):
                sr = src[e]
                t = dst[e]
                a = w_re[e]
                b = w_im[e]
                cmr[t] += a * mr[sr] - b * mi[sr]
                cmi[t] += a * mi[sr] + b * mr[sr]
                q = hz[ib, sr]
                c1r[t] += a * q.real - b * q.imag
                c1i[t] += a * q.imag + b * q.real
            bad = False
            for k in range(nr):
                x = zr[k]
                y = zi[k]
                dk = d[k]
                f1x = k1r[k]
                f1y = k1i[k]
                hz[ic, k] = complex(x, y)
                hfr[ic, k] = complex(f1x, f1y)
                f2x, f2y = _field(x + h2 * f1x, y + h2 * f1y, dk, cmr[k], cmi[k], om, gr, gi)
                f3x, f3y = _field(x + h2 * f2x, y + h2 * f2y, dk, cmr[k], cmi[k], om, gr, gi)
                f4x, f4y = _field(x + dt * f3x, y + dt * f3y, dk, c1r[k], c1i[k], om, gr, gi)
                x = x + h6 * (f1x + 2.0 * f2x + 2.0 * f3x + f4x)
                y = y + h6 * (f1y + 2.0 * f2y + 2.0 * f3y + f4y)
                if abs(x) < FLUSH:
                    x = 0.0
                if abs(y) < FLUSH:
                    y = 0.0
                zr[k] = x
                zi[k] = y
                k1r[k], k1i[k] = _field(x, y, dk, c1r[k], c1i[k], om, gr, gi)
                c0r[k] = c1r[k]
                c0i[k] = c1i[k]
                if not (x * x + y * y <= _LIMIT2):
                    bad = True
            n += 1
            ic += 1
            if ic == L:
                ic = 0
            for k in range(nr):
                hfl[ic, k] = complex(k1r[k], k1i[k])
            ia = ib
            local += 1
            if stride > 0 and local % stride == 0:
                for k in range(nr):
                    traj[rec, k] = complex(zr[k], zi[k])
                rec += 1
            if bad:
                for k in range(nr):
                    z[k] = complex(zr[k], zi[k])
                return n, STATUS_DIVERGED, rec
        for k in range(nr):
            samples[s, k] = complex(zr[k], zi[k])
    for k in range(nr):
        z[k] = complex(zr[k], zi[k])
    return n, STATUS_OK, rec


def _coupling_matrix(nr, src, dst, w_re, w_im):
    W = np.zeros((nr, nr), dtype=np.complex128)
    np.add.at(W, (dst, src), w_re + 1j * w_im)
    return W


def advance_numpy(z, hz, hfr, hfl, n, delay, levels, seg_steps, dt, omega,
                  gamma_re, gamma_im, src, dst, w_re, w_im, samples, traj, stride):
    # blow-up is reported through the status flag, not floating point warnings
    with np.errstate(over="ignore", invalid="ignore"):
        return _advance_numpy(z, hz, hfr, hfl, n, delay, levels, seg_steps, dt, omega,
                              gamma_re, gamma_im, src, dst, w_re, w_im, samples, traj, stride)


def _advance_numpy(z, hz, hfr, hfl, n, delay, levels, seg_steps, dt, omega,
                   gamma_re, gamma_im, src, dst, w_re, w_im, samples, traj, stride):
    nr = z.shape[0]
    L = hz.shape[0]
    W = _coupling_matrix(nr, src, dst, w_re, w_im)
    gamma = complex(gamma_re, gamma_im)
    rot = 1j * omega

    def field(zz, d, c):
        return (d + rot + gamma * (zz.real ** 2 + zz.imag ** 2)) * zz + c

    zc = z.copy()
    ia = (n - delay) % L
    c0 = W @ hz[ia]
    d = levels[0]
    k1 = field(zc, d, c0)
    h2 = 0.5 * dt
    h6 = dt / 6.0
    h8 = 0.125 * dt
    ic = n % L
    local = 0
    rec = 0
    for s in range(levels.shape[0]):
        d = levels[s]
        if s > 0 and not np.array_equal(d, levels[s - 1]):
            k1 = field(zc, d, c0)
        for _ in range(seg_steps):
            ib = (ia + 1) % L
            zm = 0.5 * (hz[ia] + hz[ib]) + h8 * (hfr[ia] - hfl[ib])
            cm = W @ zm
            c1 = W @ hz[ib]
            hz[ic] = zc
            hfr[ic] = k1
            k2 = field(zc + h2 * k1, d, cm)
            k3 = field(zc + h2 * k2, d, cm)
            k4 = field(zc + dt * k3, d, c1)
            zc = zc + h6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            zc.real[np.abs(zc.real) < FLUSH] = 0.0
            zc.imag[np.abs(zc.imag) < FLUSH] = 0.0
            k1 = field(zc, d, c1)
            c0 = c1
            n += 1
            ic = (ic + 1) % L
            hfl[ic] = k1
            ia = ib
            local += 1
            if stride > 0 and local % stride == 0:
                traj[rec] = zc
                rec += 1
            if not np.all(zc.real ** 2 + zc.imag ** 2 <= _LIMIT2):
                z[:] = zc
                return n, STATUS_DIVERGED, rec
        samples[s] = zc
    z[:] = zc
    return n, STATUS_OK, rec


@njit(cache=True)
def narma10_numba(u, limit):
    n = u.shape[0]
    A = np.zeros(n + 1)
    for k in range(n):
        window = 0.0
        for i in range(10):
            if k - i >= 0:
                window += A[k - i]
        lagged = u[k - 9] if k >= 9 else 0.0
        A[k + 1] = 0.3 * A[k] + 0.05 * A[k] * window + 1.5 * lagged * u[k] + 0.1
        if not (abs(A[k + 1]) <= limit):
            return A, k + 1
    return A, -1


def narma10_numpy(u, limit):
    n = u.shape[0]
    A = np.zeros(n + 1)
    lagged = np.zeros(n)
    lagged[9:] = u[:-9] if n > 9 else lagged[9:]
    drive = 1.5 * lagged * u + 0.1
    window = 0.0
    for k in range(n):
        window += A[k]
        if k >= 10:
            window -= A[k - 10]
        A[k + 1] = 0.3 * A[k] + 0.05 * A[k] * window + drive[k]
        if not (abs(A[k + 1]) <= limit):
            return A, k + 1
    return A, -1


if BACKEND == "numba":
    advance = advance_numba
    narma10_recursion = narma10_numba
else:
    advance = advance_numpy
    narma10_recursion = narma10_numpy

"""Compiled inner loops for trajectory integration.

Vector fields arrive as CSR-packed sparse polynomials: ``coefs[t]`` and
``exps[t, :]`` describe term t, and component j owns the terms in
``ptr[j]:ptr[j+1]``.  Region containment is tracked every step so
excursions between recorded samples cannot go unnoticed.

Status codes returned by the runners:
    0  completed
    1  region containment violated (excess factor returned)
    2  non-finite state encountered
    3  step size underflow (adaptive)
    4  record buffer overflow (adaptive)
"""

import numpy as np
from numba import njit

REGION_BALL = 0
REGION_BOX = 1

# Dormand-Prince 5(4) tableau.
_DP_A = np.array(
    [
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [1 / 5, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3 / 40, 9 / 40, 0.0, 0.0, 0.0, 0.0],
        [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0, 0.0],
        [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0, 0.0],
        [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0.0],
    ]
)
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array(
    [
        5179 / 57600,
        0.0,
        7571 / 16695,
        393 / 640,
        -92097 / 339200,
        187 / 2100,
        1 / 40,
    ]
)


@njit(cache=True)
def eval_field(coefs, exps, ptr, u, out):
    n = out.shape[0]
    for j in range(n):
        acc = 0.0
        for t in range(ptr[j], ptr[j + 1]):
            term = coefs[t]
            for i in range(n):
                e = exps[t, i]
                for _ in range(e):
                    term *= u[i]
            acc += term
        out[j] = acc


@njit(cache=True)
def _region_excess(u, kind, center, scale):
    if kind == REGION_BALL:
        acc = 0.0
        for i in range(u.shape[0]):
            d = u[i] - center[i]
            acc += d * d
        return np.sqrt(acc) / scale[0]
    worst = 0.0
    for i in range(u.shape[0]):
        e = abs(u[i] - center[i]) / scale[i]
        if e > worst:
            worst = e
    return worst


@njit(cache=True)
def rk4_run(
    coefs,
    exps,
    ptr,
    u0,
    dt,
    n_full,
    last_dt,
    rec_stride,
    kind,
    center,
    scale,
    excess_limit,
):
    """Classical fixed-step RK4 with a shortened final step.

    Records every ``rec_stride``-th step plus the initial and final states.
    Returns (times, states, n_recorded, status, max_excess, t_reached).
    """
    n = u0.shape[0]
    n_steps = n_full + (1 if last_dt > 0.0 else 0)
    max_rec = n_steps // rec_stride + 3
    times = np.empty(max_rec)
    states = np.empty((max_rec, n))

    u = u0.copy()
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)

    t = 0.0
    nrec = 0
    times[nrec] = t
    states[nrec] = u
    nrec += 1
    max_excess = _region_excess(u, kind, center, scale)
    if max_excess > excess_limit:
        return times, states, nrec, 1, max_excess, t

    for step in range(n_steps):
        h = dt if step < n_full else last_dt
        eval_field(coefs, exps, ptr, u, k1)
        for i in range(n):
            tmp[i] = u[i] + 0.5 * h * k1[i]
        eval_field(coefs, exps, ptr, tmp, k2)
        for i in range(n):
            tmp[i] = u[i] + 0.5 * h * k2[i]
        eval_field(coefs, exps, ptr, tmp, k3)
        for i in range(n):
            tmp[i] = u[i] + h * k3[i]
        eval_field(coefs, exps, ptr, tmp, k4)
        for i in range(n):
            u[i] = u[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        t += h

        finite = True
        for i in range(n):
            if not np.isfinite(u[i]):
                finite = False
        ex = _region_excess(u, kind, center, scale)
        if ex > max_excess:
            max_excess = ex
        record = ((step + 1) % rec_stride == 0) or (step == n_steps - 1)
        if record:
            times[nrec] = t
            states[nrec] = u
            nrec += 1
        if not finite:
            if not record:
                times[nrec] = t
                states[nrec] = u
                nrec += 1
            return times, states, nrec, 2, max_excess, t
        if ex > excess_limit:
            if not record:
                times[nrec] = t
                states[nrec] = u
                nrec += 1
            return times, states, nrec, 1, max_excess, t

    return times, states, nrec, 0, max_excess, t


@njit(cache=True)
def rk45_run(
    coefs,
    exps,
    ptr,
    u0,
    t_end,
    tol,
    dt_init,
    dt_min,
    max_records,
    kind,
    center,
    scale,
    excess_limit,
    a,
    b5,
    b4,
):
    """Dormand-Prince 5(4) with per-step mixed absolute/relative error <= tol.

    Every accepted step is recorded.  Returns the same tuple as rk4_run.
    """
    n = u0.shape[0]
    times = np.empty(max_records)
    states = np.empty((max_records, n))

    u = u0.copy()
    k = np.empty((7, n))
    tmp = np.empty(n)
    unew = np.empty(n)

    t = 0.0
    nrec = 0
    times[nrec] = t
    states[nrec] = u
    nrec += 1
    max_excess = _region_excess(u, kind, center, scale)
    if max_excess > excess_limit:
        return times, states, nrec, 1, max_excess, t

    h = dt_init
    while t < t_end:
        if h < dt_min:
            return times, states, nrec, 3, max_excess, t
        if t + h > t_end:
            h = t_end - t

        eval_field(coefs, exps, ptr, u, k[0])
        for s in range(1, 6):
            for i in range(n):
                acc = u[i]
                for m in range(s):
                    acc += h * a[s, m] * k[m, i]
                tmp[i] = acc
            eval_field(coefs, exps, ptr, tmp, k[s])
        for i in range(n):
            acc = u[i]
            for m in range(6):
                acc += h * b5[m] * k[m, i]
            unew[i] = acc
        eval_field(coefs, exps, ptr, unew, k[6])

        err = 0.0
        for i in range(n):
            e = 0.0
            for m in range(7):
                e += (b5[m] - b4[m]) * k[m, i]
            e = abs(h * e) / (tol * (1.0 + abs(u[i])))
            if e > err:
                err = e

        if err <= 1.0:
            t += h
            for i in range(n):
                u[i] = unew[i]
            finite = True
            for i in range(n):
                if not np.isfinite(u[i]):
                    finite = False
            ex = _region_excess(u, kind, center, scale)
            if ex > max_excess:
                max_excess = ex
            if nrec >= max_records:
                return times, states, nrec, 4, max_excess, t
            times[nrec] = t
            states[nrec] = u
            nrec += 1
            if not finite:
                return times, states, nrec, 2, max_excess, t
            if ex > excess_limit:
                return times, states, nrec, 1, max_excess, t

        if err == 0.0:
            factor = 5.0
        else:
            factor = 0.9 * err ** (-0.2)
            if factor < 0.2:
                factor = 0.2
            elif factor > 5.0:
                factor = 5.0
        h *= factor
    return times, states, nrec, 0, max_excess, t

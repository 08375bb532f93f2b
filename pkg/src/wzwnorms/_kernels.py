"""Hot loops: the Frobenius recurrence and the Dormand-Prince transport.

Each kernel is written once in numba-compatible numpy. When numba is
importable and ``WZWNORMS_DISABLE_NUMBA`` is unset (or ``0``) the public
names point at ``njit``-compiled versions; otherwise they are the plain
Python functions. The ``*_py`` names always refer to the uncompiled code,
which is what the benchmark compares against.
"""

import os

import numpy as np

_flag = os.environ.get("WZWNORMS_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _flag not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - depends on environment
    NUMBA_AVAILABLE = False


def frobenius_recurrence_py(diag, coupling, kappa, expo, lead, radius, tail_tol, n_max):
    """Coefficients of one Frobenius solution in the eigenbasis of the residue.

    Solves ``(kappa (m + expo) - diag) a_m = -coupling @ (a_0 + ... + a_{m-1})``
    which is the recurrence for ``kappa x f' = R f - C x/(1-x) f`` with ``R``
    diagonal. Stops once three consecutive terms ``|a_m| radius^m`` fall below
    ``tail_tol * |a_0|``.

    Returns ``(coeffs, n_terms, min_gap)`` where ``min_gap`` is the smallest
    ``|m + expo - diag/kappa|`` met, used to detect near-resonance.
    """
    dim = diag.shape[0]
    coeffs = np.zeros((n_max, dim))
    running = np.zeros(dim)
    for c in range(dim):
        coeffs[0, c] = lead[c]
        running[c] = lead[c]
    a0 = 0.0
    for c in range(dim):
        a0 = max(a0, abs(lead[c]))
    if a0 == 0.0:
        a0 = 1.0
    min_gap = 1e300
    small = 0
    n_terms = n_max
    rpow = 1.0
    for m in range(1, n_max):
        rpow *= radius
        amax = 0.0
        for c in range(dim):
            acc = 0.0
            for d in range(dim):
                acc -= coupling[c, d] * running[d]
            gap = m + expo - diag[c] / kappa
            if abs(gap) < min_gap:
                min_gap = abs(gap)
            val = acc / (kappa * gap)
            coeffs[m, c] = val
            if abs(val) > amax:
                amax = abs(val)
        for c in range(dim):
            running[c] += coeffs[m, c]
        if amax * rpow < tail_tol * a0:
            small += 1
            if small >= 3 and m >= 4:
                n_terms = m + 1
                break
        else:
            small = 0
    return coeffs[:n_terms].copy(), n_terms, min_gap


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1 / 5, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3 / 40, 9 / 40, 0.0, 0.0, 0.0, 0.0],
    [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0, 0.0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0, 0.0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0.0],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
])
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


def dopri_fundamental_py(M0, M1, kappa, kind, centre, radius, s0, s1, Y0, rtol, atol,
                         max_steps, C, A, B5, B4):
    """Adaptive DOPRI5(4) integration of ``Y' = A(s) Y`` from ``s0`` to ``s1``.

    ``A(s) = (M0/u + M1/(u-1)) u'(s) / kappa`` along the path ``u(s)``:
    ``kind == 0`` is the real segment ``u = s``, ``kind == 1`` the circle
    ``u = centre + radius e^{is}``.

    Returns ``(Y, accepted, rejected, err_sum, status)``; ``err_sum`` adds
    the accepted local error estimates and ``status`` is 0 on success, 1 on
    step-size underflow, 2 on exceeding ``max_steps``.
    """
    direction = 1.0 if s1 >= s0 else -1.0
    span = abs(s1 - s0)
    Y = Y0.copy()
    n = Y.shape[0]
    m = Y.shape[1]
    if span == 0.0:
        return Y, 0, 0, 0.0, 0
    h = min(span, 1e-3 * max(span, 1.0))
    s = s0
    accepted = 0
    rejected = 0
    err_sum = 0.0
    K = np.zeros((7, n, m), dtype=np.complex128)
    status = 0
    while True:
        remaining = abs(s1 - s)
        if remaining <= 1e-15 * max(1.0, abs(s1)):
            break
        if accepted + rejected >= max_steps:
            status = 2
            break
        if h > remaining:
            h = remaining
        hs = direction * h
        for st in range(7):
            Ys = Y.copy()
            for q in range(st):
                if A[st, q] != 0.0:
                    Ys += hs * A[st, q] * K[q]
            sv = s + C[st] * hs
            if kind == 0:
                u = sv + 0j
                du = 1.0 + 0j
            else:
                ph = np.exp(1j * sv)
                u = centre + radius * ph
                du = 1j * radius * ph
            K[st] = (M0 * (du / (kappa * u)) + M1 * (du / (kappa * (u - 1.0)))) @ Ys
        Y5 = Y.copy()
        E = np.zeros((n, m), dtype=np.complex128)
        for st in range(7):
            Y5 += hs * B5[st] * K[st]
            E += hs * (B5[st] - B4[st]) * K[st]
        err = 0.0
        for a in range(n):
            for b in range(m):
                sc = atol + rtol * max(abs(Y[a, b]), abs(Y5[a, b]))
                r = abs(E[a, b]) / sc
                if r > err:
                    err = r
        if err <= 1.0:
            s = s + hs
            Y = Y5
            accepted += 1
            emax = 0.0
            for a in range(n):
                for b in range(m):
                    if abs(E[a, b]) > emax:
                        emax = abs(E[a, b])
            err_sum += emax
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            rejected += 1
            fac = max(0.2, 0.9 * err ** -0.2)
        h = h * fac
        if h < 1e-14 * max(1.0, span):
            status = 1
            break
    return Y, accepted, rejected, err_sum, status


if NUMBA_AVAILABLE:
    frobenius_recurrence = njit(cache=True)(frobenius_recurrence_py)
    dopri_fundamental = njit(cache=True)(dopri_fundamental_py)
else:
    frobenius_recurrence = frobenius_recurrence_py
    dopri_fundamental = dopri_fundamental_py


def transport_kernel(M0, M1, kappa, kind, centre, radius, s0, s1, Y0, rtol, atol,
                     max_steps=200000, compiled=True):
    """Front door for :func:`dopri_fundamental`; ``compiled=False`` forces the Python path."""
    fn = dopri_fundamental if compiled else dopri_fundamental_py
    return fn(np.ascontiguousarray(M0, dtype=np.complex128),
              np.ascontiguousarray(M1, dtype=np.complex128),
              float(kappa), int(kind), float(centre), float(radius), float(s0), float(s1),
              np.ascontiguousarray(Y0, dtype=np.complex128), float(rtol), float(atol),
              int(max_steps), _C, _A, _B5, _B4)


"""Closed-form connection matrix of a 2x2 reduced KZ system via Gauss's formula.

Independent of the series and integrator code paths: it only uses the
residues, their eigenvectors and Gamma values.

In the eigenbasis of ``A = M0/kappa`` (eigenvalues ``a1, a2``) put
``f = u^{a1} (1-u)^{b1} Q g``. The first component of ``g`` solves the
hypergeometric equation with ``c = a1 - a2`` and ``{a, b} = -(eig(A+B) - a1 - b1)``,
where ``b1, b2`` are the eigenvalues of ``B = M1/kappa``. Gauss's
connection formula then maps the solutions at 0 to those at 1.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gamma, rgamma

from ..rootdata import DomainError
from .system import ReducedKZSystem, channel_vectors


def gauss_connection_matrix(sys: ReducedKZSystem, vectors0: np.ndarray | None = None,
                            vectors1: np.ndarray | None = None) -> np.ndarray:
    """``C`` with ``F0 = F1 @ C`` for the Frobenius bases at 0 and 1.

    Column ``i`` of ``F0`` is the solution ``u^{a_i}(v_i + O(u))``; column
    ``p`` of ``F1`` is ``(1-u)^{b_p}(w_p + O(1-u))``. Leading vectors default
    to :func:`channel_vectors`.
    """
    if sys.dim != 2:
        raise DomainError("the Gauss oracle covers 2x2 systems only")
    V0 = channel_vectors(sys, 0) if vectors0 is None else vectors0
    V1 = channel_vectors(sys, 1) if vectors1 is None else vectors1
    A = sys.M0 / sys.kappa
    B = sys.M1 / sys.kappa
    a_vals, Q = np.linalg.eigh(A)
    a1, a2 = a_vals
    Bt = Q.T @ B @ Q
    b_vals, Y = np.linalg.eigh(Bt)
    b1, b2 = b_vals
    alpha, beta = a2 - a1, b2 - b1
    s = np.linalg.eigvalsh(A + B) - a1 - b1
    ga, gb = -s[0], -s[1]
    gc = -alpha
    Bp12 = Bt[0, 1]
    if abs(Bp12) < 1e-14:
        raise DomainError("system is reducible; Gauss oracle does not apply")
    y0, yb = Y[:, 0], Y[:, 1]
    if min(abs(y0[0]), abs(yb[0])) < 1e-14:
        raise DomainError("degenerate eigenvector; Gauss oracle does not apply")

    def gauss(a, b, c):
        # coefficients of the regular and (1-u)^{c-a-b} solutions at u=1
        return (gamma(c) * gamma(c - a - b) * rgamma(c - a) * rgamma(c - b),
                gamma(c) * gamma(a + b - c) * rgamma(a) * rgamma(b))

    # solution with exponent a1, g = e1 + ..., first component F(a,b;c;u)
    p1, q1 = gauss(ga, gb, gc)
    # exponent a2, g = u^alpha (e2 + ...), first component gamma u^{1-c} F(a',b';c';u)
    gam = -Bp12 / (alpha + 1)
    p2, q2 = gauss(ga - gc + 1, gb - gc + 1, 2 - gc)
    # in g-coordinates: column i of F0 = sum_p Cg[p, i] (solution at 1 led by y_p)
    Cg = np.array([[p1 / y0[0], gam * p2 / y0[0]],
                   [q1 / yb[0], gam * q2 / yb[0]]])
    # re-express with the caller's leading vectors; Q-basis leading vectors are Q e_i and Q y_p
    lead0 = Q                      # columns: solutions at 0 led by Q e_i
    lead1 = Q @ Y                  # columns: solutions at 1 led by Q y_p
    s0 = np.array([_proportionality(V0[:, i], lead0[:, i]) for i in range(2)])
    s1 = np.array([_proportionality(V1[:, p], lead1[:, p]) for p in range(2)])
    # F0_user[:, i] = s0[i] F0_q[:, i];  F1_q[:, p] = F1_user[:, p] / s1[p]
    return (Cg / s1[:, None]) * s0[None, :]


def _proportionality(v: np.ndarray, w: np.ndarray) -> float:
    """``t`` with ``v = t w``; raises if the vectors are not parallel."""
    t = float(v @ w / (w @ w))
    if np.abs(v - t * w).max() > 1e-10 * np.abs(v).max():
        raise DomainError("leading vectors do not match the residue eigenvectors")
    return t

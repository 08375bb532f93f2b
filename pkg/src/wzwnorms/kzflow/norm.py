"""Norm of ``Phi_j^{jk}`` read off from the asymptotics of a flat section.

The flat section starts at ``u -> 0`` as ``u^{-Delta_k} (g (x) 1) g^o`` (the
channel ``j`` of ``Omega_01``). Near ``u = 1`` its most singular part is
``A (1-u)^{-2 Delta_k} Id (x) i_k``, and the norm is ``A dim_q(k)^{1/2}``.
"""

from __future__ import annotations

import math

import numpy as np

from ..modular import quantum_dimension
from ..norms import NormResult
from ..rootdata import DomainError, LevelContext, SpinLike, Weight, spin_str, twice_spin
from ..sl2rep import (NoIntertwiner, canonical_coevaluation, cg_intertwiner,
                      compose_with_identity, dualize)
from .frobenius import DEFAULT_RADIUS, frobenius_basis
from .system import ReducedKZSystem, reduce_four_point
from .transport import transport_info

SEED_TOL = 1e-10


def seed_vector(sys: ReducedKZSystem) -> np.ndarray:
    """Invariant-basis coordinates of ``(g (x) 1) g^o`` with ``g = g_j^{jk}``."""
    from fractions import Fraction
    j, k = Fraction(sys.two_j, 2), Fraction(sys.two_k, 2)
    g = cg_intertwiner(j, k, j)
    go = dualize(g)
    M = compose_with_identity(g, go)  # V_j -> V_j (x) V_k (x) V_k*
    vec = M.reshape(-1)
    coords = sys.restrict(vec)
    if np.abs(sys.embed(coords) - vec).max() > SEED_TOL * np.abs(vec).max():
        raise AssertionError("seed is not sl2-invariant")
    return coords


def singlet_vector(sys: ReducedKZSystem) -> np.ndarray:
    """Coordinates of ``Id_{V_j} (x) i_k``."""
    dj = sys.two_j + 1
    ik = canonical_coevaluation(sys.tensor.factors[1])
    vec = np.einsum("ab,c->acb", np.eye(dj), ik).reshape(-1)
    return sys.restrict(vec)


def connection_matrix(sys: ReducedKZSystem, r0: float = DEFAULT_RADIUS, r1: float = DEFAULT_RADIUS,
                      tol: float = 1e-12, bases=None) -> tuple[np.ndarray, float]:
    """``C`` with ``F0 = F1 @ C`` obtained by integrating from ``u=r0`` to ``u=1-r1``.

    Returns ``(C, error_bound)``.
    """
    F0b, F1b = bases if bases is not None else (frobenius_basis(sys, 0, r0), frobenius_basis(sys, 1, r1))
    T = transport_info(sys, r0, 1.0 - r1, tol)
    F0 = F0b.evaluate(r0)
    F1 = F1b.evaluate(1.0 - r1)
    C = np.linalg.solve(F1, T.matrix @ F0)
    cond = float(np.linalg.cond(F1))
    err = (T.error_bound + F0b.tail + F1b.tail) * cond * max(1.0, float(np.abs(C).max()))
    return C, err


def series_connection_matrix(sys: ReducedKZSystem, match: float = 0.5, dps: int | None = None):
    """Connection matrix from the two Frobenius series alone, matched at ``u = match``.

    With ``dps`` set the series are summed in mpmath at that many digits;
    this is the extended-precision route for ``kappa`` near resonance.
    """
    if dps is None:
        F0b = frobenius_basis(sys, 0, match, n_max=2000)
        F1b = frobenius_basis(sys, 1, 1 - match, n_max=2000)
        return np.linalg.solve(F1b.evaluate(match), F0b.evaluate(match))
    import mpmath
    with mpmath.workdps(dps):
        return _mp_connection(sys, match)


def _mp_connection(sys, match):
    import mpmath
    from .system import channel_vectors
    kappa = mpmath.mpf(sys.kappa)
    out = []
    for point, x in ((0, match), (1, 1 - match)):
        R, Cm = (sys.M0, sys.M1) if point == 0 else (sys.M1, sys.M0)
        R = mpmath.matrix(R.tolist())
        Cm = mpmath.matrix(Cm.tolist())
        V = channel_vectors(sys, point)
        exps = sys.channel_eigenvalues(point)
        x = mpmath.mpf(x)
        cols = []
        eps = mpmath.mpf(10) ** (-mpmath.mp.dps)
        for c, lam in enumerate(exps):
            e = mpmath.mpf(lam.numerator) / lam.denominator / kappa
            a = mpmath.matrix(V[:, c].tolist())
            S = a.copy()
            total = a.copy()
            xm = mpmath.mpf(1)
            for m in range(1, 20000):
                lhs = kappa * (m + e) * mpmath.eye(sys.dim) - R
                a = mpmath.lu_solve(lhs, -(Cm * S))
                S += a
                xm *= x
                total += a * xm
                if mpmath.norm(a) * xm < eps * mpmath.norm(total) and m > 5:
                    break
            cols.append(total * x ** e)
        F = mpmath.matrix(sys.dim, sys.dim)
        for c, col in enumerate(cols):
            for r in range(sys.dim):
                F[r, c] = col[r]
        out.append(F)
    C = mpmath.inverse(out[1]) * out[0]
    return np.array([[float(C[r, c]) for c in range(sys.dim)] for r in range(sys.dim)])


def _coefficient_A(sys: ReducedKZSystem, r0: float, r1: float, tol: float):
    F0b = frobenius_basis(sys, 0, r0)
    F1b = frobenius_basis(sys, 1, r1)
    seed = seed_vector(sys)
    cj = F0b.channels.index(sys.two_j)
    v = F0b.vectors[:, cj]
    sigma = float(v @ seed)
    if np.abs(seed - sigma * v).max() > SEED_TOL * np.abs(seed).max():
        raise AssertionError("seed vector is not in the j channel of Omega_01")
    C, err = connection_matrix(sys, r0, r1, tol, bases=(F0b, F1b))
    c0 = sigma * C[0, cj]                      # singlet channel is listed first
    w0 = F1b.vectors[:, 0]
    s = singlet_vector(sys)
    # (1-u)^{2 Delta_k} f -> c0 w0 = A s
    A = c0 * float(w0 @ s) / float(s @ s)
    return A, abs(sigma) * err


def norm_via_kz(j: SpinLike, k_spin: SpinLike, kappa: float, tol: float = 1e-10,
                r0: float = DEFAULT_RADIUS, r1: float = DEFAULT_RADIUS) -> NormResult:
    """``||Phi_j^{jk}||^2`` from the KZ connection (normalization ``g v_j = v_j (x) u + ...``)."""
    tj, tk = twice_spin(j), twice_spin(k_spin)
    if tk > 2 * tj:
        raise NoIntertwiner(f"no intertwiner V_{spin_str(tj)} -> V_{spin_str(tj)} (x) V_{spin_str(tk)}")
    sys = reduce_four_point(j, k_spin, kappa)
    A, bound = _coefficient_A(sys, r0, r1, tol)
    A_fine, _ = _coefficient_A(sys, r0, r1, max(tol / 16, 1e-13))
    err = 2.0 * abs(A - A_fine) + bound + 1e-14 * abs(A)
    qd = quantum_dimension(Weight((tk,)), LevelContext.generic(2, kappa))
    if qd <= 0:
        raise DomainError(f"dim_q(k) = {qd:.6g} is not positive at kappa={kappa}")
    value = float(A) * math.sqrt(qd)
    return NormResult(value, "kz-numeric", float(err * math.sqrt(abs(qd))), None, 0, (),
                      {"A": float(A), "A_error": float(err), "qdim_k": qd, "j": spin_str(tj),
                       "k": tk // 2, "kappa": float(kappa), "tol": tol,
                       "radii": [r0, r1], "dim": sys.dim})

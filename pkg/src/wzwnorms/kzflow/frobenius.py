"""Frobenius series solutions at the regular singular points ``u = 0`` and ``u = 1``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..rootdata import DomainError
from .system import ReducedKZSystem, channel_vectors

DEFAULT_RADIUS = 0.15
MAX_TERMS = 200
TAIL_TOL = 1e-12
NEAR_RESONANCE = 1e-10
RECURRENCE_TOL = 1e-13


class FrobeniusError(DomainError):
    pass


@dataclass(eq=False)
class FrobeniusBasis:
    """One series per channel: ``f_c = x^{e_c} (v_c + sum_m a_{c,m} x^m)``.

    ``x = u`` at ``point == 0`` and ``x = 1 - u`` at ``point == 1``; powers use
    the principal branch on ``0 < u < 1``.
    """

    point: int
    channels: list[int]
    exponents: np.ndarray
    vectors: np.ndarray
    coeffs: list[np.ndarray]
    radius: float
    tail: float
    recurrence_residual: float

    @property
    def order(self) -> int:
        return max(len(c) for c in self.coeffs) - 1

    def _x(self, u):
        return u if self.point == 0 else 1.0 - u

    def evaluate(self, u: float) -> np.ndarray:
        """Matrix whose column ``c`` is ``f_c(u)``."""
        x = self._x(u)
        if not 0 < x < 1:
            raise DomainError(f"u={u} outside the disc around u={self.point}")
        cols = []
        for e, a in zip(self.exponents, self.coeffs):
            p = x ** np.arange(len(a))
            cols.append((x ** e) * (p @ a))
        return np.column_stack(cols)

    def derivative(self, u: float) -> np.ndarray:
        """``d/du`` of :meth:`evaluate`."""
        x = self._x(u)
        sign = 1.0 if self.point == 0 else -1.0
        cols = []
        for e, a in zip(self.exponents, self.coeffs):
            m = np.arange(len(a))
            cols.append(sign * ((m + e) * x ** (m + e - 1)) @ a)
        return np.column_stack(cols)


def _series(R, C, kappa, expo, lead, radius, n_max):
    w, Q = np.linalg.eigh(R)
    coup = Q.T @ C @ Q
    lead_e = Q.T @ lead
    coeffs, n_terms, min_gap = _kernels.frobenius_recurrence(
        np.ascontiguousarray(w), np.ascontiguousarray(coup), float(kappa), float(expo),
        np.ascontiguousarray(lead_e), float(radius), 1e-16, int(n_max))
    return coeffs @ Q.T, n_terms, min_gap


def recurrence_residual(R, C, kappa, expo, coeffs) -> float:
    """Relative residual of ``(kappa (m+e) - R) a_m + C (a_0 + ... + a_{m-1})``."""
    S = np.cumsum(coeffs, axis=0)
    worst = float(np.abs((kappa * expo * np.eye(len(R)) - R) @ coeffs[0]).max())
    scale = float(np.abs(coeffs).max())
    for m in range(1, len(coeffs)):
        r = (kappa * (m + expo)) * coeffs[m] - R @ coeffs[m] + C @ S[m - 1]
        denom = max(kappa * (m + abs(expo)) * float(np.abs(coeffs[m]).max()),
                    float(np.abs(C @ S[m - 1]).max()), 1e-300)
        worst = max(worst, float(np.abs(r).max()) / denom)
    return worst if scale > 0 else 0.0


def frobenius_basis(sys: ReducedKZSystem, point: int, radius: float = DEFAULT_RADIUS,
                    n_max: int = MAX_TERMS) -> FrobeniusBasis:
    if point not in (0, 1):
        raise DomainError("point must be 0 or 1")
    if not 0 < radius < 1:
        raise DomainError("radius must lie in (0, 1)")
    # at u=1 the substitution x = 1-u swaps the roles of the two residues
    R, C = (sys.M0, sys.M1) if point == 0 else (sys.M1, sys.M0)
    exps = sys.exponents(point)
    V = channel_vectors(sys, point)
    coeffs, tail, worst_res = [], 0.0, 0.0
    for c, e in enumerate(exps):
        a, n_terms, min_gap = _series(R, C, sys.kappa, e, V[:, c], radius, n_max)
        if min_gap < NEAR_RESONANCE:
            raise FrobeniusError(
                f"recurrence denominator {min_gap:.3e} at u={point}: kappa={sys.kappa} is near resonance")
        last = float(np.abs(a[-1]).max()) * radius ** (len(a) - 1)
        t = last * radius / (1 - radius)
        if t > TAIL_TOL:
            raise FrobeniusError(
                f"series at u={point} did not converge within {n_max} terms (tail {t:.2e})")
        res = recurrence_residual(R, C, sys.kappa, e, a)
        if res > RECURRENCE_TOL:
            raise FrobeniusError(f"recurrence residual {res:.2e} exceeds {RECURRENCE_TOL}")
        coeffs.append(a)
        tail = max(tail, t)
        worst_res = max(worst_res, res)
    return FrobeniusBasis(point, list(sys.channels0 if point == 0 else sys.channels1),
                          exps, V, coeffs, radius, tail, worst_res)

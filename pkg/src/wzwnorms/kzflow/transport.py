"""Numerical parallel transport for the reduced KZ connection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..rootdata import DomainError
from .system import ReducedKZSystem

MIN_TOL = 1e-13


class TransportError(DomainError):
    pass


@dataclass
class TransportResult:
    matrix: np.ndarray
    steps: int
    rejected: int
    error_bound: float


def _run(sys, kind, centre, radius, s0, s1, tol, compiled=True):
    if tol < MIN_TOL:
        raise DomainError(f"tol must be >= {MIN_TOL}")
    n = sys.dim
    Y, acc, rej, err_sum, status = _kernels.transport_kernel(
        sys.M0, sys.M1, sys.kappa, kind, centre, radius, s0, s1, np.eye(n),
        rtol=tol, atol=tol * 1e-2, compiled=compiled)
    if status == 1:
        raise TransportError(f"step size underflow while transporting from {s0} to {s1}")
    if status == 2:
        raise TransportError("maximum number of integration steps exceeded")
    # local errors propagate through at most ||Y|| ||Y^-1||
    cond = float(np.linalg.cond(Y))
    return TransportResult(Y, acc, rej, max(err_sum, tol) * cond)


def transport_info(sys: ReducedKZSystem, a: float, b: float, tol: float = 1e-12,
                   compiled: bool = True) -> TransportResult:
    """Fundamental matrix ``Y`` with ``f(b) = Y f(a)`` along the real segment."""
    for x in (a, b):
        if not 0 < x < 1:
            raise DomainError(f"transport endpoints must lie in (0, 1), got {x}")
    res = _run(sys, 0, 0.0, 0.0, a, b, tol, compiled)
    res.matrix = res.matrix.real.copy()
    return res


def transport(sys: ReducedKZSystem, a: float, b: float, tol: float = 1e-12) -> np.ndarray:
    return transport_info(sys, a, b, tol).matrix


def circle_transport(sys: ReducedKZSystem, centre: float, radius: float, base_angle: float = 0.0,
                     tol: float = 1e-12) -> np.ndarray:
    """Transport once counter-clockwise around ``|u - centre| = radius``."""
    if centre not in (0.0, 1.0) or not 0 < radius < 1:
        raise DomainError("circle must enclose exactly one of u=0, u=1")
    return _run(sys, 1, centre, radius, base_angle, base_angle + 2 * np.pi, tol).matrix


def monodromy_eigenvalues(sys: ReducedKZSystem, point: int = 0, radius: float = 0.3,
                          tol: float = 1e-12) -> np.ndarray:
    """Eigenvalues of the numerically integrated local monodromy, sorted by phase."""
    M = circle_transport(sys, float(point), radius, np.pi if point == 1 else 0.0, tol)
    w = np.linalg.eigvals(M)
    return w[np.argsort(np.angle(w))]

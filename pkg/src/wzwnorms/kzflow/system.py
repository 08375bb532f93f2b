"""Reduction of the four-point KZ system to a Fuchsian ODE in one variable.

Points ``0, z1, z2, inf`` carry ``V_j, V_k, V_k*, V_j`` (the last one enters
the invariant space as ``V_j*``). On invariants
``Omega_01 + Omega_02 + Omega_12 = -C_k``, so flat sections are homogeneous
of degree ``-2 Delta_k`` and ``psi = z2^{-2 Delta_k} f(z1/z2)`` with

    kappa f'(u) = (M0/u + M1/(u-1)) f(u),

``M0 = Omega_01`` and ``M1 = Omega_12`` restricted to invariants.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..rootdata import DomainError, SpinLike, twice_spin
from ..sl2rep import TensorSystem, invariant_subspace, irrep

HOMOGENEITY_TOL = 1e-12
RESONANCE_TOL = 1e-10


class ResonanceError(DomainError):
    """Two local exponents at a singular point differ by a non-zero integer."""


def casimir2(two_j: int) -> Fraction:
    """``2j(j+1)`` from ``2j``."""
    return Fraction(two_j * (two_j + 2), 2)


@dataclass(eq=False)
class ReducedKZSystem:
    kappa: float
    two_j: int
    two_k: int
    tensor: TensorSystem
    inv_basis: np.ndarray
    M0: np.ndarray
    M1: np.ndarray
    M02: np.ndarray
    channels0: list[int]
    channels1: list[int]

    @property
    def dim(self) -> int:
        return self.M0.shape[0]

    def rhs(self, u, f):
        return (self.M0 / u + self.M1 / (u - 1.0)) @ f / self.kappa

    def residue(self, point: int) -> np.ndarray:
        return self.M0 if point == 0 else self.M1

    def channel_eigenvalues(self, point: int) -> list[Fraction]:
        """Exact eigenvalues of the residue, one per channel label."""
        if point == 0:
            cj, ck = casimir2(self.two_j), casimir2(self.two_k)
            return [(casimir2(c) - cj - ck) / 2 for c in self.channels0]
        ck = casimir2(self.two_k)
        return [(casimir2(c) - 2 * ck) / 2 for c in self.channels1]

    def exponents(self, point: int) -> np.ndarray:
        return np.array([float(x) for x in self.channel_eigenvalues(point)]) / self.kappa

    def homogeneity_residual(self) -> float:
        """``|M0 + M1 + M02 + C_k|``, which must vanish on invariants."""
        S = self.M0 + self.M1 + self.M02 + float(casimir2(self.two_k)) * np.eye(self.dim)
        return float(np.abs(S).max(initial=0.0))

    def embed(self, coords: np.ndarray) -> np.ndarray:
        """Invariant-basis coordinates to a vector of ``V_j (x) V_k (x) V_k* (x) V_j*``."""
        return self.inv_basis @ coords

    def restrict(self, vector: np.ndarray) -> np.ndarray:
        """Coordinates of an invariant vector (the projection residual is not checked here)."""
        return self.inv_basis.T @ vector


def _check_resonance(exps: np.ndarray, where: str):
    for a in range(len(exps)):
        for b in range(len(exps)):
            if a == b:
                continue
            d = exps[a] - exps[b]
            n = round(d)
            if n != 0 and abs(d - n) < RESONANCE_TOL:
                raise ResonanceError(
                    f"resonant exponents at u={where}: {exps[a]:.12g} - {exps[b]:.12g} = {d:.12g}")


def reduce_four_point(j: SpinLike, k_spin: SpinLike, kappa: float) -> ReducedKZSystem:
    tj, tk = twice_spin(j), twice_spin(k_spin)
    if tk % 2:
        raise DomainError("k_spin must be an integer spin (a weight-zero vector is needed)")
    kappa = float(kappa)
    if not kappa > 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    Vj, Vk = irrep(Fraction(tj, 2)), irrep(Fraction(tk, 2))
    tensor = TensorSystem((Vj, Vk, Vk.dual(), Vj.dual()))
    B = invariant_subspace(tensor)
    if B.shape[1] == 0:
        raise DomainError("invariant subspace is empty")
    M0 = B.T @ tensor.pair_casimir(0, 1) @ B
    M1 = B.T @ tensor.pair_casimir(1, 2) @ B
    M02 = B.T @ tensor.pair_casimir(0, 2) @ B
    # symmetric by construction up to rounding
    M0, M1, M02 = [(X + X.T) / 2 for X in (M0, M1, M02)]

    channels0 = list(range(abs(tj - tk), tj + tk + 1, 2))
    channels1 = list(range(0, min(tj, tk) * 2 + 1, 2))
    sys = ReducedKZSystem(kappa, tj, tk, tensor, B, M0, M1, M02, channels0, channels1)
    if len(channels0) != sys.dim or len(channels1) != sys.dim:
        raise AssertionError("invariant dimension disagrees with the channel count")
    res = sys.homogeneity_residual()
    if res > HOMOGENEITY_TOL * max(1.0, float(casimir2(tk))):
        raise AssertionError(f"homogeneity identity fails: residual {res:.3e}")
    _check_resonance(sys.exponents(0), "0")
    _check_resonance(sys.exponents(1), "1")
    return sys


def channel_vectors(sys: ReducedKZSystem, point: int) -> np.ndarray:
    """Unit eigenvectors of the residue, columns ordered like the channel labels.

    Each eigenvalue is matched to its exact channel value; the sign makes
    the first significant component positive.
    """
    R = sys.residue(point)
    w, V = np.linalg.eigh(R)
    targets = [float(x) for x in sys.channel_eigenvalues(point)]
    out = np.zeros_like(V)
    used = set()
    for c, t in enumerate(targets):
        i = int(np.argmin(np.abs(w - t)))
        if abs(w[i] - t) > 1e-9 * max(1.0, abs(t)) or i in used:
            raise AssertionError(f"residue spectrum {w} does not match channels {targets}")
        used.add(i)
        v = V[:, i]
        p = int(np.argmax(np.abs(v) > 1e-9))
        out[:, c] = v if v[p] > 0 else -v
    return out

"""Modular data of the level-K WZW category for sl_n."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .rootdata import (DomainError, LevelContext, RootSystemA, Weight, alcove_weights,
                       conformal_weight, dual_weight, root_pairings)

FUSION_TOL = 1e-9


class ConsistencyError(RuntimeError):
    """An internal identity failed beyond its tolerance."""


def _require_level(ctx: LevelContext):
    if ctx.K is None:
        raise DomainError("this operation needs an integer level K")


def t_matrix(ctx: LevelContext, with_central_charge: bool = False) -> np.ndarray:
    """``diag(exp(2 pi i (Delta_lam - c/24)))``; the shift only when asked."""
    _require_level(ctx)
    shift = ctx.central_charge / 24 if with_central_charge else 0.0
    h = np.array([conformal_weight(w, ctx) for w in alcove_weights(ctx)])
    return np.diag(np.exp(2j * np.pi * (h - shift)))


def _weyl_sum(x: np.ndarray, y: np.ndarray, kappa: float) -> complex:
    # sum_w eps(w) exp(-2 pi i (w x, y)/kappa) for S_n is a determinant
    return complex(np.linalg.det(np.exp(-2j * np.pi * np.outer(x, y) / kappa)))


def s_matrix(ctx: LevelContext) -> np.ndarray:
    """Kac-Peterson S matrix, rows and columns indexed by :func:`alcove_weights`.

    For sl2 this is ``sqrt(2/kappa) sin(pi (2j+1)(2l+1)/kappa)``; in general
    ``i^{|R+|} (n kappa^{n-1})^{-1/2} sum_w eps(w) e^{-2 pi i (w(lam+rho), mu+rho)/kappa}``.
    """
    _require_level(ctx)
    labels = alcove_weights(ctx)
    kappa = ctx.kappa
    if ctx.n == 2:
        a = np.array([w.coords[0] + 1 for w in labels], dtype=float)
        return (math.sqrt(2.0 / kappa) * np.sin(np.pi * np.outer(a, a) / kappa)).astype(complex)
    return s_matrix_weyl(ctx)


def s_matrix_weyl(ctx: LevelContext) -> np.ndarray:
    """The Weyl-group sum form of the S matrix, valid for every n."""
    _require_level(ctx)
    labels = alcove_weights(ctx)
    kappa = ctx.kappa
    rs = RootSystemA(ctx.n)
    shifted = [np.array([float(c) for c in rs.to_orthogonal(tuple(c + 1 for c in w.coords))])
               for w in labels]
    npos = len(rs.positive_roots)
    pref = (1j) ** npos / math.sqrt(ctx.n * kappa ** (ctx.n - 1))
    m = len(labels)
    S = np.zeros((m, m), dtype=complex)
    for a in range(m):
        for b in range(a, m):
            S[a, b] = S[b, a] = pref * _weyl_sum(shifted[a], shifted[b], kappa)
    return S


def charge_conjugation(ctx: LevelContext) -> np.ndarray:
    labels = alcove_weights(ctx)
    index = {w.coords: i for i, w in enumerate(labels)}
    C = np.zeros((len(labels), len(labels)))
    for i, w in enumerate(labels):
        C[i, index[dual_weight(w).coords]] = 1.0
    return C


def quantum_dimension(lam: Weight, ctx: LevelContext) -> float:
    """``prod_alpha [(alpha, lam+rho)]_q / [(alpha, rho)]_q`` with ``q = e^{i pi/kappa}``.

    For sl2 this is ``[2j+1]``. ``kappa = inf`` gives the Weyl dimension.
    """
    if lam.n != ctx.n:
        raise DomainError("rank mismatch")
    kappa = float(ctx.kappa)
    top = root_pairings(lam, shift=1)
    bottom = root_pairings(Weight.zero(lam.n), shift=1)
    if math.isinf(kappa):
        return float(np.prod([t / b for t, b in zip(top, bottom)]))
    val = 1.0
    for t, b in zip(top, bottom):
        den = math.sin(math.pi * b / kappa)
        if den == 0.0:
            raise DomainError(f"q-number denominator vanishes at kappa={kappa}")
        val *= math.sin(math.pi * t / kappa) / den
    return val


def verlinde_fusion(ctx: LevelContext, S: np.ndarray | None = None) -> np.ndarray:
    """``N[lam, mu, nu] = sum_s S_{lam s} S_{mu s} conj(S_{nu s}) / S_{0 s}``.

    Raises :class:`ConsistencyError` if an entry is not within ``1e-9`` of an integer.
    """
    _require_level(ctx)
    S = s_matrix(ctx) if S is None else S
    raw = np.einsum("as,bs,cs->abc", S, S, S.conj() / S[0][None, :])
    N = np.rint(raw.real)
    resid = float(np.abs(raw - N).max(initial=0.0))
    if resid > FUSION_TOL:
        raise ConsistencyError(f"Verlinde coefficients off integers by {resid:.3e}")
    if (N < 0).any():
        raise ConsistencyError("negative Verlinde coefficient")
    return N.astype(np.int64)


def truncated_cg_fusion(K: int) -> np.ndarray:
    """sl2 level-K fusion from ``|j1-j2| <= j <= min(j1+j2, K-j1-j2)``, in twice-spins."""
    m = K + 1
    N = np.zeros((m, m, m), dtype=np.int64)
    for a, b in itertools.product(range(m), repeat=2):
        for c in range(abs(a - b), min(a + b, 2 * K - a - b) + 1, 2):
            N[a, b, c] = 1
    return N


@dataclass
class ModularData:
    ctx: LevelContext
    labels: list
    S: np.ndarray
    T: np.ndarray
    C: np.ndarray
    central_charge: float
    qdims: np.ndarray

    @classmethod
    def build(cls, ctx: LevelContext) -> "ModularData":
        _require_level(ctx)
        labels = alcove_weights(ctx)
        S = s_matrix(ctx)
        return cls(ctx, labels, S, t_matrix(ctx, False), charge_conjugation(ctx),
                   ctx.central_charge, (S[0] / S[0, 0]).real.copy())

    def to_dict(self) -> dict:
        return {
            "n": self.ctx.n,
            "level": self.ctx.K,
            "kappa": self.ctx.kappa,
            "central_charge": self.central_charge,
            "labels": [label_dict(w) for w in self.labels],
            "S": complex_matrix(self.S),
            "T": [complex_pair(z) for z in np.diag(self.T)],
            "charge_conjugation": [int(np.argmax(r)) for r in self.C],
            "qdims": [float(x) for x in self.qdims],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def label_dict(w: Weight) -> dict:
    if w.n == 2:
        return {"twice": w.coords[0], "spin": w.label(), "coords": list(w.coords)}
    return {"coords": list(w.coords)}


def complex_pair(z) -> list:
    z = complex(z)
    # clean negative zeros so output is byte-stable
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def complex_matrix(M) -> list:
    return [[complex_pair(z) for z in row] for row in np.asarray(M)]


@dataclass
class ModularReport:
    ctx: LevelContext
    residuals: dict = field(default_factory=dict)
    tolerance: float = 1e-12

    @property
    def worst(self) -> float:
        return max(self.residuals.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return self.worst <= self.tolerance

    def to_dict(self) -> dict:
        return {"n": self.ctx.n, "level": self.ctx.K,
                "residuals": {k: float(v) for k, v in sorted(self.residuals.items())},
                "max_residual": float(self.worst), "passed": bool(self.passed)}


def _mx(A) -> float:
    return float(np.abs(A).max(initial=0.0))


def verify_modular_relations(ctx: LevelContext, S: np.ndarray | None = None,
                             tolerance: float = 1e-12) -> ModularReport:
    """Residuals of the SL2(Z) relations, Verlinde integrality and q-dimension agreement."""
    _require_level(ctx)
    S = s_matrix(ctx) if S is None else np.asarray(S, dtype=complex)
    T = t_matrix(ctx, True)
    C = charge_conjugation(ctx)
    I = np.eye(len(S))
    S2 = S @ S
    ST = S @ T
    rep = ModularReport(ctx, tolerance=tolerance)
    rep.residuals["S_symmetric"] = _mx(S - S.T)
    rep.residuals["S_unitary"] = _mx(S.conj().T @ S - I)
    rep.residuals["S2_eq_C"] = _mx(S2 - C)
    rep.residuals["C2_eq_I"] = _mx(C @ C - I)
    rep.residuals["S4_eq_I"] = _mx(S2 @ S2 - I)
    rep.residuals["ST3_eq_S2"] = _mx(ST @ ST @ ST - S2)
    rep.residuals["T_unitary"] = _mx(T.conj().T @ T - I)
    labels = alcove_weights(ctx)
    if S[0, 0].real != 0 and min(S[0].real) > 0:
        qd = np.array([quantum_dimension(w, ctx) for w in labels])
        rep.residuals["qdim_vs_S"] = _mx(qd - (S[0] / S[0, 0]))
    else:
        rep.residuals["qdim_vs_S"] = math.inf
    try:
        S_raw = np.einsum("as,bs,cs->abc", S, S, S.conj() / S[0][None, :])
        rep.residuals["verlinde_integrality"] = _mx(S_raw - np.rint(S_raw.real))
    except FloatingPointError:  # pragma: no cover
        rep.residuals["verlinde_integrality"] = math.inf
    return rep

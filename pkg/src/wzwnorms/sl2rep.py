"""Matrix models of sl2 irreps, tensor products and intertwiners.

The working model is the orthonormal weight basis with real entries
(``F = E^T``, ``H`` diagonal). Because every generator matrix is real the
antilinear involution fixing ``e, f, h`` is plain complex conjugation, so an
intertwiner and its conjugate share one matrix. Dual spaces are always
carried explicitly (generators act by ``-X^T`` on the dual basis); no
identification ``V ~ V*`` is ever used.

An integer-entry model (``integral=True``) is provided for exact checks of
the commutation relations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
import scipy.linalg

from .rootdata import DomainError, SpinLike, spin_str, twice_spin

GENERATORS = ("E", "F", "H")
COMMUTE_TOL = 1e-12


class NoIntertwiner(DomainError):
    """The requested Hom space is zero."""


@dataclass(frozen=True, eq=False)
class SpinRep:
    """Spin-j irrep (or its dual) with explicit generator matrices.

    Basis vector ``i`` has ``H``-eigenvalue ``2j - 2i`` (``i = 0..2j``); for a
    dual rep the basis is the dual basis and the eigenvalues flip sign.
    """

    two_j: int
    E: np.ndarray
    F: np.ndarray
    H: np.ndarray
    is_dual: bool = False
    unitary: bool = True

    @property
    def j(self) -> Fraction:
        return Fraction(self.two_j, 2)

    @property
    def dim(self) -> int:
        return self.two_j + 1

    @property
    def casimir(self) -> Fraction:
        """``2j(j+1)``, the value of ``EF + FE + H^2/2``."""
        return Fraction(self.two_j * (self.two_j + 2), 2)

    def gen(self, name: str) -> np.ndarray:
        return getattr(self, name)

    def dual(self) -> "SpinRep":
        return SpinRep(self.two_j, -self.E.T, -self.F.T, -self.H.T,
                       not self.is_dual, self.unitary)

    def weight_zero_index(self) -> int:
        if self.two_j % 2:
            raise DomainError("half-integer spin has no weight-zero vector")
        return self.two_j // 2

    def __repr__(self):
        star = "*" if self.is_dual else ""
        return f"SpinRep(j={spin_str(self.two_j)}{star})"

    def same_as(self, other: "SpinRep") -> bool:
        return (self.two_j == other.two_j and self.is_dual == other.is_dual
                and all(np.array_equal(self.gen(g), other.gen(g)) for g in GENERATORS))


@lru_cache(maxsize=64)
def _irrep_cached(two_j: int, integral: bool) -> SpinRep:
    d = two_j + 1
    i = np.arange(d)
    H = np.diag(two_j - 2 * i)
    if integral:
        # F e_i = e_{i+1},  E e_i = i (2j - i + 1) e_{i-1}
        E = np.zeros((d, d), dtype=np.int64)
        F = np.zeros((d, d), dtype=np.int64)
        for a in range(1, d):
            E[a - 1, a] = a * (two_j - a + 1)
            F[a, a - 1] = 1
        H = H.astype(np.int64)
    else:
        E = np.zeros((d, d))
        for a in range(1, d):
            E[a - 1, a] = np.sqrt(a * (two_j - a + 1))
        F = E.T.copy()
        H = H.astype(float)
    for X in (E, F, H):
        X.setflags(write=False)
    return SpinRep(two_j, E, F, H, False, not integral)


def irrep(j: SpinLike, integral: bool = False) -> SpinRep:
    """Spin-``j`` irreducible representation in the weight basis."""
    return _irrep_cached(twice_spin(j), bool(integral))


def commutator_residuals(rep: SpinRep) -> dict[str, float]:
    """Max-norm residuals of ``[H,E]=2E``, ``[H,F]=-2F``, ``[E,F]=H`` and the Casimir."""
    E, F, H = rep.E, rep.F, rep.H
    cas = E @ F + F @ E + (H @ H) / 2
    return {
        "HE": float(np.abs(H @ E - E @ H - 2 * E).max(initial=0)),
        "HF": float(np.abs(H @ F - F @ H + 2 * F).max(initial=0)),
        "EF": float(np.abs(E @ F - F @ E - H).max(initial=0)),
        "casimir": float(np.abs(cas - float(rep.casimir) * np.eye(rep.dim)).max(initial=0)),
    }


def _embed(X: np.ndarray, i: int, dims: Sequence[int]) -> np.ndarray:
    left = int(np.prod(dims[:i], dtype=np.int64))
    right = int(np.prod(dims[i + 1:], dtype=np.int64))
    return np.kron(np.kron(np.eye(left), X), np.eye(right))


@dataclass(eq=False)
class TensorSystem:
    """Ordered tensor product of sl2 irreps (and duals)."""

    factors: tuple[SpinRep, ...]
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.factors = tuple(self.factors)
        if not self.factors:
            raise DomainError("empty tensor product")

    @property
    def dims(self) -> list[int]:
        return [f.dim for f in self.factors]

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def _check_index(self, i: int):
        if not 0 <= i < len(self.factors):
            raise IndexError(f"factor index {i} out of range for {len(self.factors)} factors")

    def act(self, generator: str, i: int) -> np.ndarray:
        self._check_index(i)
        key = ("act", generator, i)
        if key not in self._cache:
            self._cache[key] = _embed(np.asarray(self.factors[i].gen(generator), float), i, self.dims)
        return self._cache[key]

    def total(self, generator: str) -> np.ndarray:
        key = ("total", generator)
        if key not in self._cache:
            self._cache[key] = sum(self.act(generator, i) for i in range(len(self.factors)))
        return self._cache[key]

    def pair_casimir(self, i: int, l: int) -> np.ndarray:
        """``Omega_il = E_i F_l + F_i E_l + H_i H_l / 2``.

        The dual-basis pairing is fixed by ``(e, f) = 1`` and ``(h, h) = 2``.
        """
        self._check_index(i)
        self._check_index(l)
        if i == l:
            raise DomainError("pair_casimir needs two distinct factors")
        key = ("omega",) + tuple(sorted((i, l)))
        if key not in self._cache:
            a, b = key[1], key[2]
            self._cache[key] = (self.act("E", a) @ self.act("F", b)
                                + self.act("F", a) @ self.act("E", b)
                                + self.act("H", a) @ self.act("H", b) / 2)
        return self._cache[key]

    def casimir_total(self, which: Sequence[int] | None = None) -> np.ndarray:
        idx = range(len(self.factors)) if which is None else which
        E = sum(self.act("E", i) for i in idx)
        F = sum(self.act("F", i) for i in idx)
        H = sum(self.act("H", i) for i in idx)
        return E @ F + F @ E + H @ H / 2


def pair_casimir(sys: TensorSystem, i: int, l: int) -> np.ndarray:
    return sys.pair_casimir(i, l)


def invariant_subspace(sys: TensorSystem) -> np.ndarray:
    """Orthonormal basis (as columns) of the sl2-invariants of the tensor product.

    A weight-zero vector killed by the total ``E`` spans a trivial
    submodule, so it is enough to take the kernel of ``E`` on weight zero.
    """
    h = np.diag(sys.total("H"))
    zero = np.flatnonzero(np.abs(h) < 0.5)
    if zero.size == 0:
        return np.zeros((sys.total_dim, 0))
    K = scipy.linalg.null_space(sys.total("E")[:, zero], rcond=1e-11)
    basis = np.zeros((sys.total_dim, K.shape[1]))
    basis[zero, :] = K
    # fix the sign of each column so the basis is reproducible
    for c in range(basis.shape[1]):
        p = np.argmax(np.abs(basis[:, c]) > 1e-9)
        if basis[p, c] < 0:
            basis[:, c] = -basis[:, c]
    return basis


@dataclass(eq=False)
class Intertwiner:
    """A linear map ``source -> targets[0] (x) targets[1] (x) ...``.

    ``matrix`` has shape ``(prod(target dims), source.dim)``.
    """

    source: SpinRep
    targets: tuple[SpinRep, ...]
    matrix: np.ndarray
    normalization: str = "unit"

    def residual(self) -> float:
        """Relative commutation residual ``max_x |x g - g x| / |g|``."""
        tgt = TensorSystem(self.targets)
        g = self.matrix
        scale = max(np.abs(g).max(initial=0.0), 1e-300)
        res = 0.0
        for name in GENERATORS:
            r = tgt.total(name) @ g - g @ np.asarray(self.source.gen(name), float)
            res = max(res, float(np.abs(r).max(initial=0.0)))
        return res / scale

    def as_tensor(self) -> np.ndarray:
        return self.matrix.reshape(*[t.dim for t in self.targets], self.source.dim)


def admissible(two_j1: int, two_j2: int, two_j: int) -> bool:
    return (abs(two_j1 - two_j2) <= two_j <= two_j1 + two_j2
            and (two_j1 + two_j2 + two_j) % 2 == 0)


def cg_intertwiner(j1: SpinLike, j2: SpinLike, j: SpinLike) -> Intertwiner:
    """The sl2 morphism ``g_j^{j1 j2}: V_j -> V_j1 (x) V_j2``.

    Built from the highest-weight vector of the ``j`` channel and then
    lowered with the total ``F``. When ``j1 == j`` and ``j2`` is an integer
    spin the map is scaled so that ``g(v_j) = v_j (x) u + ...`` with ``u`` the
    middle basis vector of ``V_j2``; otherwise it has unit Frobenius norm on
    the highest-weight vector with a positive leading entry.
    """
    t1, t2, t = twice_spin(j1), twice_spin(j2), twice_spin(j)
    if not admissible(t1, t2, t):
        raise NoIntertwiner(
            f"no intertwiner V_{spin_str(t)} -> V_{spin_str(t1)} (x) V_{spin_str(t2)}")
    r1, r2, r = irrep(Fraction(t1, 2)), irrep(Fraction(t2, 2)), irrep(Fraction(t, 2))
    tgt = TensorSystem((r1, r2))
    h = np.diag(tgt.total("H"))
    top = np.flatnonzero(np.abs(h - t) < 0.5)
    K = scipy.linalg.null_space(tgt.total("E")[:, top], rcond=1e-11)
    if K.shape[1] != 1:
        raise AssertionError(f"highest-weight space has dimension {K.shape[1]}, expected 1")
    hw = np.zeros(tgt.total_dim)
    hw[top] = K[:, 0]

    G = np.zeros((tgt.total_dim, r.dim))
    G[:, 0] = hw
    Ft = tgt.total("F")
    for a in range(1, r.dim):
        # F e_{a-1} = r.F[a, a-1] e_a in the source
        G[:, a] = Ft @ G[:, a - 1] / r.F[a, a - 1]

    if t1 == t and t2 % 2 == 0:
        coeff = G[0 * r2.dim + t2 // 2, 0]
        if abs(coeff) < 1e-12:
            raise AssertionError("highest-weight vector has no v_j (x) u component")
        G /= coeff
        tag = "hw-u"
    else:
        p = np.argmax(np.abs(hw) > 1e-12)
        G *= np.sign(hw[p])
        tag = "unit"
    return Intertwiner(r, (r1, r2), G, tag)


def identity_intertwiner(j: SpinLike) -> Intertwiner:
    """``V_j -> V_j (x) V_0``, the identity."""
    r = irrep(j)
    return Intertwiner(r, (r, irrep(0)), np.eye(r.dim), "identity")


def dualize(g: Intertwiner) -> Intertwiner:
    """``g: V_lam -> V_mu (x) V_nu``  to  ``g^o: V_mu -> V_lam (x) V_nu*``.

    In the real orthonormal model the conjugate of ``g`` has the same matrix,
    and turning it into a map out of ``V_mu`` is a pure index flip
    ``g^o[(a, c), b] = g[(b, c), a]``. Applying it twice returns ``g`` with
    ``V_nu**`` realized as ``V_nu``.
    """
    if len(g.targets) != 2:
        raise DomainError("dualize expects a map into a two-fold tensor product")
    src, (mu, nu) = g.source, g.targets
    if not (src.unitary and mu.unitary and nu.unitary):
        raise DomainError("dualize needs the orthonormal (unitary) model")
    T = g.as_tensor()  # [b, c, a]
    flipped = np.transpose(T, (2, 1, 0)).reshape(src.dim * nu.dim, mu.dim)
    return Intertwiner(mu, (src, nu.dual()), flipped, g.normalization + "^o")


def compose_with_identity(g: Intertwiner, h: Intertwiner) -> np.ndarray:
    """``(g (x) 1) h`` for ``h: V -> A (x) B`` and ``g: A -> C (x) D``.

    Returns the matrix of ``V -> C (x) D (x) B``.
    """
    if not g.source.same_as(h.targets[0]):
        raise DomainError("composition mismatch: g.source must equal h.targets[0]")
    B = h.targets[1].dim
    Hm = h.matrix.reshape(h.targets[0].dim, B, h.source.dim)
    out = np.einsum("xa,abv->xbv", g.matrix, Hm)
    return out.reshape(g.matrix.shape[0] * B, h.source.dim)


def canonical_coevaluation(nu: SpinLike | SpinRep) -> np.ndarray:
    """``i_nu(1) = sum_a e_a (x) e^a`` in ``V_nu (x) V_nu*``."""
    rep = nu if isinstance(nu, SpinRep) else irrep(nu)
    return np.eye(rep.dim).reshape(-1)


def hom_to_vector(matrix: np.ndarray) -> np.ndarray:
    """Map ``T: V -> W`` to ``sum_a T(e_a) (x) e^a`` in ``W (x) V*``."""
    return np.asarray(matrix).reshape(-1)

"""Root and weight arithmetic for the A-series.

Weights are kept in fundamental-weight coordinates as tuples of
non-negative integers. For sl2 the single coordinate is ``2j``, so spins
never pass through floating point. The bilinear form is the inverse
Cartan matrix, which for a simply-laced algebra is already normalized so
that the highest root has square length 2.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Optional, Sequence, Union

SpinLike = Union[int, float, Fraction, str]


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


def twice_spin(j: SpinLike) -> int:
    """Return ``2j`` as an int, accepting ints, Fractions, floats or ``"p/2"``."""
    if isinstance(j, str):
        try:
            j = Fraction(j.strip())
        except ValueError as exc:
            raise DomainError(f"cannot parse spin {j!r}") from exc
    if isinstance(j, bool):
        raise DomainError("spin must be numeric")
    if isinstance(j, float):
        if not math.isfinite(j):
            raise DomainError(f"spin must be finite, got {j}")
        tj = 2 * j
        if tj != round(tj):
            raise DomainError(f"spin {j} is not a half-integer")
        tj = int(round(tj))
    elif isinstance(j, Rational):
        tj = 2 * Fraction(j)
        if tj.denominator != 1:
            raise DomainError(f"spin {j} is not a half-integer")
        tj = int(tj)
    else:
        raise DomainError(f"unsupported spin type {type(j).__name__}")
    if tj < 0:
        raise DomainError(f"spin must be non-negative, got {Fraction(tj, 2)}")
    return tj


def spin_str(two_j: int) -> str:
    """Human form of a spin stored as ``2j``: ``"3/2"``, ``"1"``, ``"0"``."""
    return str(two_j // 2) if two_j % 2 == 0 else f"{two_j}/2"


@dataclass(frozen=True)
class RootSystemA:
    """Root data of sl_n in the orthogonal model ``e_1, ..., e_n``.

    Positive roots are ``e_a - e_b`` for ``a < b``; the ambient inner product
    is the Euclidean one, so ``(theta, theta) = 2``.
    """

    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise DomainError(f"rank parameter n must be an integer >= 2, got {self.n!r}")

    @property
    def rank(self) -> int:
        return self.n - 1

    @property
    def dual_coxeter(self) -> int:
        return self.n

    @property
    def dim(self) -> int:
        return self.n * self.n - 1

    @property
    def positive_roots(self) -> list[tuple[int, ...]]:
        roots = []
        for a, b in itertools.combinations(range(self.n), 2):
            v = [0] * self.n
            v[a], v[b] = 1, -1
            roots.append(tuple(v))
        return roots

    @property
    def positive_root_intervals(self) -> list[tuple[int, int]]:
        """Positive roots as ``(a, b)`` meaning ``alpha_a + ... + alpha_{b-1}``."""
        return [(a, b) for a, b in itertools.combinations(range(self.n), 2)]

    @property
    def simple_roots(self) -> list[tuple[int, ...]]:
        out = []
        for a in range(self.n - 1):
            v = [0] * self.n
            v[a], v[a + 1] = 1, -1
            out.append(tuple(v))
        return out

    @property
    def highest_root(self) -> tuple[int, ...]:
        v = [0] * self.n
        v[0], v[-1] = 1, -1
        return tuple(v)

    @property
    def rho(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(self.n - 1 - 2 * a, 2) for a in range(self.n))

    def to_orthogonal(self, coords: Sequence[int]) -> tuple[Fraction, ...]:
        """Map fundamental-weight coordinates to the traceless orthogonal model."""
        if len(coords) != self.rank:
            raise DomainError(f"expected {self.rank} coordinates, got {len(coords)}")
        # omega_i = e_1 + ... + e_i - (i/n) * (e_1 + ... + e_n)
        partial = [sum(coords[a:]) for a in range(self.rank)] + [0]
        shift = Fraction(sum(partial), self.n)
        return tuple(Fraction(p) - shift for p in partial)

    @staticmethod
    def dot(x: Sequence, y: Sequence):
        return sum(a * b for a, b in zip(x, y))


@lru_cache(maxsize=None)
def inverse_cartan(n: int) -> tuple[tuple[Fraction, ...], ...]:
    """Gram matrix of fundamental weights: ``min(i,j) * (n - max(i,j)) / n``."""
    r = n - 1
    return tuple(
        tuple(Fraction(min(i, j) * (n - max(i, j)), n) for j in range(1, r + 1))
        for i in range(1, r + 1)
    )


@dataclass(frozen=True)
class Weight:
    """Dominant integral weight of sl_n in fundamental-weight coordinates."""

    coords: tuple[int, ...]
    level: Optional[int] = None

    def __post_init__(self):
        coords = tuple(self.coords)
        object.__setattr__(self, "coords", coords)
        if len(coords) < 1:
            raise DomainError("a weight needs at least one coordinate")
        for c in coords:
            if not isinstance(c, int) or isinstance(c, bool) or c < 0:
                raise DomainError(f"coordinates must be non-negative integers, got {coords}")
        if self.level is not None:
            if not isinstance(self.level, int) or self.level < 0:
                raise DomainError(f"level must be a non-negative integer, got {self.level!r}")
            if self.theta_pairing > self.level:
                raise DomainError(
                    f"weight {coords} is not integrable at level {self.level}")

    @classmethod
    def spin(cls, j: SpinLike, level: Optional[int] = None) -> "Weight":
        return cls((twice_spin(j),), level)

    @classmethod
    def zero(cls, n: int, level: Optional[int] = None) -> "Weight":
        return cls((0,) * (n - 1), level)

    @classmethod
    def rho(cls, n: int) -> "Weight":
        return cls((1,) * (n - 1))

    @property
    def n(self) -> int:
        return len(self.coords) + 1

    @property
    def two_j(self) -> int:
        if self.n != 2:
            raise DomainError("two_j is only defined for sl2 weights")
        return self.coords[0]

    @property
    def theta_pairing(self) -> int:
        """``<lambda, theta^vee>`` which for type A is the coordinate sum."""
        return sum(self.coords)

    def label(self) -> str:
        if self.n == 2:
            return spin_str(self.coords[0])
        return "(" + ",".join(str(c) for c in self.coords) + ")"

    def __add__(self, other: "Weight") -> "Weight":
        if other.n != self.n:
            raise DomainError("rank mismatch")
        return Weight(tuple(a + b for a, b in zip(self.coords, other.coords)))


@dataclass(frozen=True)
class LevelContext:
    """Either an integer level ``K`` (with ``kappa = K + n``) or a bare real ``kappa``."""

    n: int
    K: Optional[int] = None
    kappa: Optional[float] = None

    def __post_init__(self):
        RootSystemA(self.n)
        if self.K is None and self.kappa is None:
            raise DomainError("need a level K or a value of kappa")
        if self.K is not None:
            if not isinstance(self.K, int) or isinstance(self.K, bool) or self.K < 0:
                raise DomainError(f"level must be a non-negative integer, got {self.K!r}")
            if self.kappa is None:
                object.__setattr__(self, "kappa", self.K + self.n)
            elif self.kappa != self.K + self.n:
                raise DomainError(f"kappa={self.kappa} inconsistent with K={self.K}, n={self.n}")
        if self.kappa == 0:
            raise DomainError("kappa must be non-zero")
        if isinstance(self.kappa, complex):
            raise DomainError("only real kappa is supported")

    @classmethod
    def at_level(cls, n: int, K: int) -> "LevelContext":
        return cls(n=n, K=K)

    @classmethod
    def generic(cls, n: int, kappa: float) -> "LevelContext":
        return cls(n=n, kappa=kappa)

    @property
    def has_level(self) -> bool:
        return self.K is not None

    @property
    def roots(self) -> RootSystemA:
        return RootSystemA(self.n)

    @property
    def central_charge(self) -> float:
        if self.K is None:
            raise DomainError("central charge needs an integer level")
        return self.K * (self.n * self.n - 1) / (self.K + self.n)


def alcove_weights(ctx: LevelContext) -> list[Weight]:
    """All dominant weights with ``<lambda, theta^vee> <= K``, sorted lexicographically."""
    if ctx.K is None:
        raise DomainError("alcove enumeration needs an integer level K >= 0")
    K, r = ctx.K, ctx.n - 1
    out = [Weight(c, K) for c in itertools.product(range(K + 1), repeat=r) if sum(c) <= K]
    out.sort(key=lambda w: w.coords)
    return out


def weight_inner_product(lam: Weight, mu: Weight) -> Fraction:
    """Bilinear form in the normalization ``(theta, theta) = 2``."""
    if lam.n != mu.n:
        raise DomainError(f"rank mismatch: sl_{lam.n} vs sl_{mu.n}")
    G = inverse_cartan(lam.n)
    return sum(
        (G[a][b] * x * y for a, x in enumerate(lam.coords) for b, y in enumerate(mu.coords)),
        Fraction(0),
    )


def casimir_value(lam: Weight) -> Fraction:
    """``(lambda, lambda + 2 rho)``; equals ``2j(j+1)`` for sl2."""
    two_rho = Weight((2,) * (lam.n - 1))
    return weight_inner_product(lam, lam + two_rho)


def conformal_weight(lam: Weight, ctx: LevelContext) -> float:
    if ctx.n != lam.n:
        raise DomainError("rank mismatch between weight and level context")
    return float(casimir_value(lam)) / (2.0 * ctx.kappa)


def dual_weight(lam: Weight) -> Weight:
    """``-w_0(lambda)``: for type A this reverses the Dynkin diagram."""
    return Weight(tuple(reversed(lam.coords)), lam.level)


def root_pairings(lam: Weight, shift: int = 1) -> list[int]:
    """``(alpha, lambda + shift * rho)`` for every positive root alpha.

    Roots are ordered as in :attr:`RootSystemA.positive_root_intervals`.
    Since ``(alpha_i, omega_j) = delta_ij`` the pairing is a coordinate sum
    over the simple roots making up alpha plus ``shift`` times its height.
    """
    rs = RootSystemA(lam.n)
    return [sum(lam.coords[a:b]) + shift * (b - a) for a, b in rs.positive_root_intervals]

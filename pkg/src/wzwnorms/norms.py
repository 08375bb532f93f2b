"""Closed-form norms of the intertwiners ``Phi_j^{jk}`` and the sl_n analogue.

Two brackets are used::

    [x]   = sin(pi x / kappa) / sin(pi / kappa)        (q-number, q = e^{i pi/kappa})
    [[x]] = Gamma(1 - x / kappa)

and the norm of ``Phi_j^{jk}`` is, up to a factor ``c(k, kappa)`` that does
not depend on ``j`` and is set to 1 here,

    prod_{i=1..k} [2j+1+i]/[2j+1-i] * ([[2j+1+i]] / [[2j+1-i]])^2.

At rational ``kappa`` individual brackets can vanish or blow up. Every
factor is then tracked as a leading Laurent coefficient together with its
order in a common shift of ``2j`` (or of ``lambda``), so the product has a
well-defined order: positive means the norm vanishes, negative means it
has a pole, zero means the limit is finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from scipy.special import gamma

from .rootdata import DomainError, SpinLike, Weight, root_pairings, spin_str, twice_spin

INTEGER_TOL = 1e-12


class BracketPole(ArithmeticError):
    """``[[x]]`` was evaluated at a pole, i.e. ``x = m kappa`` with ``m >= 1``."""

    def __init__(self, x, kappa):
        super().__init__(f"[[{x}]] has a pole at kappa={kappa}")
        self.x = x
        self.kappa = kappa


def _near_int(z: float) -> Optional[int]:
    n = round(z)
    return int(n) if abs(z - n) <= INTEGER_TOL * max(1.0, abs(z)) else None


def bracket_gamma(x: float, kappa: float) -> float:
    """``[[x]] = Gamma(1 - x/kappa)``; raises :class:`BracketPole` at poles."""
    z = 1.0 - float(x) / float(kappa)
    n = _near_int(z)
    if n is not None and n <= 0:
        raise BracketPole(x, kappa)
    return float(gamma(z))


def bracket_q(x: float, kappa: float) -> float:
    """``[x] = sin(pi x/kappa) / sin(pi/kappa)``."""
    if math.isinf(kappa):
        return float(x)
    den = math.sin(math.pi / kappa)
    if _near_int(1.0 / kappa) is not None:
        raise DomainError(f"[x] is undefined at kappa={kappa} (sin(pi/kappa) = 0)")
    return math.sin(math.pi * x / kappa) / den


def _laurent_q(x, kappa) -> tuple[float, int]:
    """Leading coefficient and order of ``[x + eps]`` in ``eps``."""
    n = _near_int(float(x) / kappa)
    if n is None:
        return bracket_q(x, kappa), 0
    return (math.pi / kappa) * (-1) ** (n % 2) / math.sin(math.pi / kappa), 1


def _laurent_gamma(x, kappa) -> tuple[float, int]:
    """Leading coefficient and order of ``[[x + eps]]`` in ``eps``."""
    z = 1.0 - float(x) / kappa
    n = _near_int(z)
    if n is None or n > 0:
        return float(gamma(z)), 0
    m = -n
    # Gamma(-m + d) ~ (-1)^m / (m! d), d = -eps/kappa
    return (-1) ** m * (-kappa) / math.factorial(m), -1


@dataclass(frozen=True)
class Factor:
    """One ``i``-factor ``[x+]/[x-] ([[x+]]/[[x-]])^2`` of a norm product."""

    index: tuple
    x_plus: Fraction
    x_minus: Fraction
    coefficient: float
    order: int

    @property
    def singular(self) -> bool:
        return self.order != 0 or not math.isfinite(self.coefficient)

    def describe(self) -> str:
        what = "zero" if self.order > 0 else "pole" if self.order < 0 else "regular"
        return f"i={self.index[-1]} x+={self.x_plus} x-={self.x_minus}: {what}"


@dataclass
class NormResult:
    """A norm value up to the ``j``-independent constant ``c(k, kappa) = 1``.

    ``order`` is the total Laurent order of the product; the value is 0 for
    a positive order and ``inf`` for a negative one. ``window`` is only set
    when ``kappa`` comes from an integer level.
    """

    value: float
    source: str
    error_estimate: float = 0.0
    window: Optional[bool] = None
    order: int = 0
    factors: tuple = ()
    details: dict = field(default_factory=dict)

    @property
    def finite_nonzero(self) -> bool:
        return self.order == 0 and math.isfinite(self.value) and self.value != 0

    @property
    def offending(self) -> list:
        return [f for f in self.factors if f.singular]


def _factor(index, xp: Fraction, xm: Fraction, kappa: float) -> Factor:
    qp, op = _laurent_q(float(xp), kappa)
    qm, om = _laurent_q(float(xm), kappa)
    gp, gop = _laurent_gamma(float(xp), kappa)
    gm, gom = _laurent_gamma(float(xm), kappa)
    order = op - om + 2 * (gop - gom)
    return Factor(index, xp, xm, (qp / qm) * (gp / gm) ** 2, order)


def _product(factors: Sequence[Factor]) -> tuple[float, int]:
    order = sum(f.order for f in factors)
    if order > 0:
        return 0.0, order
    if order < 0:
        return math.inf, order
    value = 1.0
    for f in factors:
        value *= f.coefficient
    return value, 0


def closed_form_arguments(j: SpinLike, k_spin: int) -> list[tuple[int, Fraction, Fraction]]:
    """``(i, 2j+1+i, 2j+1-i)`` for ``i = 1..k``, exact."""
    tj = twice_spin(j)
    k = _int_spin(k_spin)
    return [(i, Fraction(tj + 1 + i), Fraction(tj + 1 - i)) for i in range(1, k + 1)]


def _int_spin(k_spin) -> int:
    tk = twice_spin(k_spin)
    if tk % 2:
        raise DomainError("k must be an integer spin")
    return tk // 2


def integrability_window(K: int, j: SpinLike, k_spin: SpinLike) -> bool:
    """True iff ``k <= 2j <= K - k``."""
    if not isinstance(K, int) or K < 0:
        raise DomainError("K must be a non-negative integer")
    tj, k = twice_spin(j), _int_spin(k_spin)
    return k <= tj <= K - k


def _level_from_kappa(kappa: float, n: int) -> Optional[int]:
    m = _near_int(kappa)
    if m is not None and m - n >= 0:
        return m - n
    return None


def norm_closed_form(j: SpinLike, k_spin: SpinLike, kappa: float,
                     K: Optional[int] = None) -> NormResult:
    """Gamma-product value of ``||Phi_j^{jk}||^2`` with ``c(k, kappa) = 1``."""
    if K is not None:
        kappa = K + 2
    kappa = float(kappa)
    if not kappa > 0:
        raise DomainError("kappa must be positive")
    args = closed_form_arguments(j, k_spin)
    factors = tuple(_factor((i,), xp, xm, kappa) for i, xp, xm in args)
    value, order = _product(factors)
    level = K if K is not None else _level_from_kappa(kappa, 2)
    window = None if level is None else integrability_window(level, j, k_spin)
    return NormResult(value, "closed-form", 0.0, window, order, factors,
                      {"j": spin_str(twice_spin(j)), "k": _int_spin(k_spin), "kappa": kappa})


def norm_ratio(j1: SpinLike, j2: SpinLike, k_spin: SpinLike, kappa: float) -> float:
    """``||Phi_{j1}||^2 / ||Phi_{j2}||^2``; free of ``c(k, kappa)``."""
    a = norm_closed_form(j1, k_spin, kappa)
    b = norm_closed_form(j2, k_spin, kappa)
    if not (a.finite_nonzero and b.finite_nonzero):
        raise DomainError("ratio undefined: a norm is zero or infinite")
    return a.value / b.value


def _i_range(k: int, i_range: str) -> range:
    if i_range == "k-1":
        return range(1, k)
    if i_range == "k":
        return range(1, k + 1)
    raise DomainError(f"i_range must be 'k' or 'k-1', got {i_range!r}")


def conjecture_arguments(lam: Weight, k: int, i_range: str = "k-1"):
    """``(root, i, (alpha, lam + k rho) + i, (alpha, lam + k rho) - i)``, exact."""
    if k < 1:
        raise DomainError("k must be >= 1")
    pair = root_pairings(lam, shift=k)
    return [(r, i, Fraction(p + i), Fraction(p - i))
            for r, p in enumerate(pair) for i in _i_range(k, i_range)]


def conjecture_norm(n: int, lam: Weight, k: int, kappa: float,
                    i_range: str = "k-1") -> NormResult:
    """Conjectured sl_n norm: a product over positive roots of the sl2 factors.

    ``i_range="k-1"`` takes ``i = 1..k-1``; ``"k"`` takes ``i = 1..k``.
    """
    if lam.n != n:
        raise DomainError("weight rank does not match n")
    kappa = float(kappa)
    factors = tuple(_factor((r, i), xp, xm, kappa)
                    for r, i, xp, xm in conjecture_arguments(lam, k, i_range))
    value, order = _product(factors)
    return NormResult(value, "conjecture", 0.0, None, order, factors,
                      {"n": n, "lambda": list(lam.coords), "k": k, "i_range": i_range})


def conjecture_to_closed_form(lam: Weight, k: int, i_range: str = "k-1") -> tuple[Fraction, int]:
    """The sl2 dictionary: returns ``(j, k')`` with ``2j + 1 = (alpha, lam + k rho)``.

    With ``i_range="k"`` the insertion spin is ``k' = k``; with ``"k-1"`` it
    is ``k' = k - 1`` (the intertwiner ``V -> V (x) U`` has ``U`` of spin
    ``k-1``).
    """
    if lam.n != 2:
        raise DomainError("dictionary is only defined for sl2")
    p = root_pairings(lam, shift=k)[0]
    return Fraction(p - 1, 2), (k if i_range == "k" else k - 1)


def classical_product(j: SpinLike, k_spin: SpinLike) -> Fraction:
    """``prod_{i=1..k} (2j+1+i)/(2j+1-i)``, the kappa -> infinity limit."""
    out = Fraction(1)
    for _, xp, xm in closed_form_arguments(j, k_spin):
        if xm == 0:
            raise ZeroDivisionError(f"classical product has a zero denominator for j={j}")
        out *= xp / xm
    return out


def macdonald_limit(j: SpinLike, k_spin: SpinLike, kappa_large: float) -> float:
    """``norm_closed_form`` at large ``kappa``; tends to :func:`classical_product`."""
    if kappa_large < 1e6:
        raise DomainError("macdonald_limit expects kappa >= 1e6")
    return norm_closed_form(j, k_spin, kappa_large).value

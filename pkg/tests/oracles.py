"""Independent reference implementations used only by the tests.

None of these import the package's numerical code paths; they recompute the
same quantities by a different route (mpmath, brute-force sums, sympy).
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import mpmath
import numpy as np

# Frozen with mpmath at 30 digits before the package code was run.
CLOSED_HALF_1_KAPPA5 = 5.87348470179429     # (sin(3pi/5)/sin(pi/5)) (Gamma(2/5)/Gamma(4/5))^2
RATIO_1_OVER_HALF_KAPPA73 = 0.723423398433836  # closed form, k=1, kappa=7.3
CLOSED_3HALF_2_KAPPA73 = 36.4195585808827


def closed_form_mp(two_j: int, k: int, kappa, dps: int = 30):
    with mpmath.workdps(dps):
        kappa = mpmath.mpf(kappa)

        def q(x):
            return mpmath.sin(mpmath.pi * x / kappa) / mpmath.sin(mpmath.pi / kappa)

        def g(x):
            return mpmath.gamma(1 - mpmath.mpf(x) / kappa)

        v = mpmath.mpf(1)
        for i in range(1, k + 1):
            v *= q(two_j + 1 + i) / q(two_j + 1 - i) * (g(two_j + 1 + i) / g(two_j + 1 - i)) ** 2
        return float(v)


def perm_sign(p) -> int:
    s = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            t = p[i]
            p[i], p[t] = p[t], p[i]
            s = -s
    return s


def orthogonal(coords):
    """Fundamental-weight coordinates of sl_n to traceless R^n coordinates."""
    n = len(coords) + 1
    partial = [sum(coords[i:]) for i in range(n - 1)] + [0]
    mean = Fraction(sum(partial), n)
    return [Fraction(p) - mean for p in partial]


def s_matrix_bruteforce(n: int, K: int) -> np.ndarray:
    """Kac-Peterson S by an explicit sum over the symmetric group."""
    kappa = K + n
    weights = sorted(c for c in itertools.product(range(K + 1), repeat=n - 1) if sum(c) <= K)
    shifted = [[float(x) for x in orthogonal([c + 1 for c in w])] for w in weights]
    npos = n * (n - 1) // 2
    pref = (1j) ** npos / np.sqrt(n * kappa ** (n - 1))
    perms = list(itertools.permutations(range(n)))
    m = len(weights)
    S = np.zeros((m, m), dtype=complex)
    for a in range(m):
        for b in range(m):
            tot = 0j
            for p in perms:
                dot = sum(shifted[a][p[i]] * shifted[b][i] for i in range(n))
                tot += perm_sign(p) * np.exp(-2j * np.pi * dot / kappa)
            S[a, b] = pref * tot
    return S


def cg_rule(K: int) -> dict:
    """``{(2j1, 2j2, 2j): 1}`` for the level-K truncated Clebsch-Gordan rule."""
    out = {}
    for a in range(K + 1):
        for b in range(K + 1):
            c = abs(a - b)
            while c <= a + b:
                if a + b + c <= 2 * K:
                    out[(a, b, c)] = 1
                c += 2
    return out


def spin_matrices(two_j: int):
    """Textbook angular momentum matrices J+, J-, Jz (hbar = 1)."""
    j = Fraction(two_j, 2)
    ms = [j - i for i in range(two_j + 1)]
    d = two_j + 1
    Jp = np.zeros((d, d))
    for a in range(1, d):
        m = ms[a]
        Jp[a - 1, a] = np.sqrt(float(j * (j + 1) - m * (m + 1)))
    Jz = np.diag([float(m) for m in ms])
    return Jp, Jp.T, Jz


def casimir(two_j: int) -> Fraction:
    j = Fraction(two_j, 2)
    return 2 * j * (j + 1)


def omega_bruteforce(two_a: int, two_b: int) -> np.ndarray:
    """``E(x)F + F(x)E + H(x)H/2`` on V_a (x) V_b from the physics matrices."""
    Ap, Am, Az = spin_matrices(two_a)
    Bp, Bm, Bz = spin_matrices(two_b)
    # E = J+, F = J-, H = 2 Jz
    return np.kron(Ap, Bm) + np.kron(Am, Bp) + 2 * np.kron(Az, Bz)


def log_slope(xs, ys) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])

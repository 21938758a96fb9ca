"""
Small-degree polynomial tools used by the 6×6 block eigensolver.

Coefficient arrays are ordered highest degree first, as in ``numpy.polyval``.
"""

from __future__ import annotations

import cmath

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "characteristic_polynomial",
    "deflate_by_z2_minus_1",
    "solve_cubic",
    "solve_quartic",
    "newton_polish",
]

_CUBE_ROOTS_OF_UNITY = (1.0, complex(-0.5, 3**0.5 / 2), complex(-0.5, -(3**0.5) / 2))


def characteristic_polynomial(M: NDArray) -> NDArray[np.complex128]:
    """Coefficients of ``det(zI - M)`` by the Faddeev-LeVerrier recursion."""
    M = np.asarray(M, dtype=np.complex128)
    n = M.shape[0]
    coeffs = np.zeros(n + 1, dtype=np.complex128)
    coeffs[0] = 1.0
    Mk = np.zeros_like(M)
    eye = np.eye(n, dtype=np.complex128)
    for k in range(1, n + 1):
        Mk = M @ (Mk + coeffs[k - 1] * eye)
        coeffs[k] = -np.trace(Mk) / k
    return coeffs


def deflate_by_z2_minus_1(coeffs: NDArray) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """Divide a polynomial by ``z² - 1``; return ``(quotient, remainder)``.

    The remainder has two coefficients ``[r1, r0]`` (``r1 z + r0``).
    """
    q, r = np.polydiv(np.asarray(coeffs, dtype=np.complex128), np.array([1.0, 0.0, -1.0]))
    rem = np.zeros(2, dtype=np.complex128)
    rem[2 - len(r):] = r
    return q.astype(np.complex128), rem


def solve_cubic(b: complex, c: complex, d: complex) -> list[complex]:
    """Roots of ``z³ + b z² + c z + d`` by Cardano's formula (complex arithmetic)."""
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    disc = cmath.sqrt(q * q / 4.0 + p**3 / 27.0)
    # pick the branch that avoids cancellation
    u3 = -q / 2.0 + disc
    alt = -q / 2.0 - disc
    if abs(alt) > abs(u3):
        u3 = alt
    if abs(u3) == 0.0:
        return [-shift] * 3
    u = u3 ** (1.0 / 3.0)
    roots = []
    for w in _CUBE_ROOTS_OF_UNITY:
        uk = u * w
        roots.append(uk - p / (3.0 * uk) - shift)
    return roots


def _quadratic(b: complex, c: complex) -> tuple[complex, complex]:
    """Roots of ``z² + b z + c`` without catastrophic cancellation."""
    disc = cmath.sqrt(b * b - 4.0 * c)
    big = b + disc if abs(b + disc) >= abs(b - disc) else b - disc
    s = -big / 2.0
    if s == 0:
        return 0j, -b + 0j
    return s, c / s


def solve_quartic(coeffs: NDArray) -> list[complex]:
    """Roots of a monic quartic ``z⁴ + a z³ + b z² + c z + d`` by Ferrari's method.

    The depressed quartic ``y⁴ + p y² + q y + r`` is split into two quadratics
    through a root ``m`` of the resolvent cubic
    ``8m³ + 8p m² + (2p² - 8r) m - q² = 0``; the root of largest magnitude is
    taken so that ``√(2m)`` stays away from zero.
    """
    a0, a, b, c, d = (complex(v) for v in coeffs)
    if a0 != 1.0:
        a, b, c, d = a / a0, b / a0, c / a0, d / a0
    shift = a / 4.0
    p = b - 3.0 * a * a / 8.0
    q = c - a * b / 2.0 + a**3 / 8.0
    r = d - a * c / 4.0 + a * a * b / 16.0 - 3.0 * a**4 / 256.0

    scale = max(1.0, abs(p), abs(r) ** 0.5)
    if abs(q) <= 1e-14 * scale**1.5:
        # biquadratic: y⁴ + p y² + r
        w1, w2 = _quadratic(complex(p), complex(r))
        ys = []
        for w in (w1, w2):
            s = cmath.sqrt(w)
            ys += [s, -s]
        return [y - shift for y in ys]

    ms = solve_cubic(p, (p * p) / 4.0 - r, -(q * q) / 8.0)
    m = max(ms, key=abs)
    s = cmath.sqrt(2.0 * m)
    ys = []
    for sign in (1.0, -1.0):
        # y² - sign·s·y + (p/2 + m + sign·q/(2s)) = 0
        y1, y2 = _quadratic(-sign * s, p / 2.0 + m + sign * q / (2.0 * s))
        ys += [y1, y2]
    return [y - shift for y in ys]


def newton_polish(coeffs: NDArray, roots, max_iter: int = 50, tol: float = 1e-15) -> list[complex]:
    """Refine roots with at most ``max_iter`` Newton steps each."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    deriv = np.polyder(coeffs)
    out = []
    for z in roots:
        z = complex(z)
        for _ in range(max_iter):
            f = np.polyval(coeffs, z)
            df = np.polyval(deriv, z)
            if abs(df) < 1e-14:
                break
            step = f / df
            z_new = z - step
            # keep the step only if it does not increase the residual
            if abs(np.polyval(coeffs, z_new)) > abs(f):
                break
            z = z_new
            if abs(step) <= tol * max(1.0, abs(z)):
                break
        out.append(z)
    return out

"""
Momentum-space reduction of the walk.

After a discrete Fourier transform over the rotation index ``r``, the
``6n × 6n`` evolution operator splits into ``n`` independent 6×6 blocks

    U(k) = e^{2πik/n} M1 + e^{-2πik/n} M2 + M3,      k = 0, ..., n-1,

and every eigenpair ``(λ, ν)`` of ``U(k)`` lifts to the eigenpair
``(λ, ν ⊗ φ_k)`` of ``U`` with ``φ_k(r) = e^{2πikr/n}``.

Two independent eigen-routes are provided for each block:

* :func:`eigen_numeric` -- characteristic polynomial, deflation by the exact
  factor ``z² - 1``, Ferrari's method on the remaining quartic, then a
  null-space/Rayleigh refinement that also yields orthonormal eigenvectors.
* :func:`eigen_closed_form` -- the class-specific closed forms for the
  eigenvalues, with the general eigenvector formulas where they are
  well-conditioned.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
import scipy.linalg
from numpy.typing import NDArray
from scipy.optimize import linear_sum_assignment

from .coin import CoinClass, CoinMatrix, _theta_from_xy
from .errors import InputError, NumericalError
from .evolve import WalkState, _check_n, _local_step_array, local_blocks
from .polyroots import characteristic_polynomial, deflate_by_z2_minus_1, newton_polish, solve_quartic

__all__ = [
    "FourierBlock",
    "EigenSystem",
    "FullSpectrum",
    "dft_state",
    "idft_state",
    "build_Uk",
    "eigen_numeric",
    "eigen_closed_form",
    "closed_form_eigenvalues",
    "block_spectra",
    "full_spectrum",
    "multiset_distance",
    "eigen_phase",
    "spectrum_to_csv",
]

# Ferrari roots of a near-fourfold eigenvalue carry errors of order ε^(1/4) ≈ 1e-4;
# clusters are resolved by Schur, so merging generously is safe
CLUSTER_TOL = 1e-3
RESIDUAL_TARGET = 1e-9
RESIDUAL_FAIL = 1e-6
DENOM_TOL = 1e-8
# radicands below this are rounding noise at an exact double root


def eigen_phase(lam) -> NDArray[np.float64]:
    """Argument of ``lam`` in (-π, π]; ``-1`` maps to ``+π``."""
    ph = np.angle(np.asarray(lam, dtype=np.complex128))
    return np.where(ph <= -np.pi + 1e-12, ph + 2 * np.pi, ph)


@dataclass(frozen=True, eq=False)
class FourierBlock:
    k: int
    n: int
    matrix: NDArray[np.complex128]

    def unitarity_defect(self) -> float:
        M = self.matrix
        return float(np.abs(M.conj().T @ M - np.eye(6)).max())


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Six eigenpairs of one block, sorted by phase then imaginary part.

    ``eigenvectors[:, j]`` is the unit eigenvector for ``eigenvalues[j]``; its
    first component of magnitude above 1e-10 is real and positive.
    """

    eigenvalues: NDArray[np.complex128]
    eigenvectors: NDArray[np.complex128]
    residuals: NDArray[np.float64]
    k: int = 0
    n: int = 0
    method: str = "numeric"

    @property
    def phases(self) -> NDArray[np.float64]:
        return eigen_phase(self.eigenvalues)


# ---------------------------------------------------------------- transforms


def dft_state(state: WalkState) -> NDArray[np.complex128]:
    """Rows ``Ψ(k) = Σ_r e^{-2πikr/n} ψ(r)``, shape ``(n, 6)``."""
    return np.fft.fft(state.local_vectors, axis=0)


def idft_state(blocks: Sequence | NDArray, n: int) -> WalkState:
    """Inverse of :func:`dft_state`: ``ψ(r) = (1/n) Σ_k e^{2πikr/n} Ψ(k)``."""
    arr = np.asarray(blocks, dtype=np.complex128)
    if arr.shape != (n, 6):
        raise InputError(f"expected {n} blocks of length 6, got array of shape {arr.shape}")
    return WalkState.from_local_vectors(np.fft.ifft(arr, axis=0))


def build_Uk(coin: CoinMatrix, n: int, k: int) -> FourierBlock:
    """The 6×6 block acting on momentum ``k``."""
    _check_n(n)
    if not 0 <= k < n:
        raise InputError(f"k={k} outside [0, {n})")
    c = np.asarray(coin, dtype=np.float64)
    em = cmath.exp(-2j * math.pi * k / n)
    ep = em.conjugate()
    U = np.zeros((6, 6), dtype=np.complex128)
    U[0, 0::2] = c[0] * em
    U[1, 1::2] = c[0] * ep
    U[2, 0::2] = c[1]
    U[3, 1::2] = c[1]
    U[4, 1::2] = c[2]
    U[5, 0::2] = c[2]
    return FourierBlock(k, n, U)


# ------------------------------------------------------------ eigen helpers


def _clusters(values: NDArray, tol: float) -> list[list[int]]:
    """Single-linkage groups of indices whose values lie within ``tol``."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _null_space(A: NDArray, dim: int) -> NDArray:
    """Orthonormal basis of the ``dim`` smallest right singular directions of ``A``.

    For normal ``A`` these span the eigenspace of the ``dim`` eigenvalues of
    smallest modulus, even when they are split by far less than the cluster
    tolerance.
    """
    _, _, Vh = scipy.linalg.svd(A)
    return Vh[A.shape[0] - dim:].conj().T


def _fix_phase(v: NDArray) -> NDArray:
    v = v / np.linalg.norm(v)
    idx = np.flatnonzero(np.abs(v) > 1e-10)
    if idx.size:
        a = v[idx[0]]
        v = v * (abs(a) / a)
    return v


def _eigenspace(M: NDArray, center: complex, m: int, basis: NDArray | None = None) -> tuple[NDArray, NDArray]:
    """Eigenvalues and orthonormal eigenvectors for a cluster of size ``m`` near ``center``.

    With ``basis`` (orthonormal columns) the search is restricted to its span;
    for a normal ``M`` that span is the complement of eigenvectors found so far.
    """
    Q = np.eye(M.shape[0], dtype=np.complex128) if basis is None else basis
    A = Q.conj().T @ M @ Q
    eye = np.eye(A.shape[0])
    # a second pass centred on the Rayleigh values removes the O(δ) leakage
    # left by an inexact root at a multiple eigenvalue
    for _ in range(2):
        V = _null_space(A - center * eye, m)
        T, Z = scipy.linalg.schur(V.conj().T @ A @ V, output="complex")
        lam = np.diag(T).copy()
        center = lam.mean()
    return lam, Q @ (V @ Z)


def _complement(W: NDArray) -> NDArray:
    """Orthonormal basis of the orthogonal complement of the columns of ``W``."""
    if W.shape[1] == 0:
        return np.eye(W.shape[0], dtype=np.complex128)
    return scipy.linalg.null_space(W.conj().T).astype(np.complex128)


def _sorted_system(vals, vecs, M, k, n, method) -> EigenSystem:
    vals = np.asarray(vals, dtype=np.complex128)
    vecs = np.column_stack([_fix_phase(vecs[:, j]) for j in range(vecs.shape[1])])
    order = np.lexsort((vals.imag, eigen_phase(vals)))
    vals, vecs = vals[order], vecs[:, order]
    res = np.linalg.norm(M @ vecs - vecs * vals[None, :], axis=0)
    return EigenSystem(vals, vecs, res, k, n, method)


def _refine(M: NDArray, approx: Sequence[complex]) -> tuple[NDArray, NDArray]:
    approx = np.asarray(approx, dtype=np.complex128)
    vals = np.empty(6, dtype=np.complex128)
    vecs = np.empty((6, 6), dtype=np.complex128)
    col = 0
    for group in _clusters(approx, CLUSTER_TOL):
        # deflate: later clusters only see directions not yet claimed
        lam, V = _eigenspace(M, approx[group].mean(), len(group), _complement(vecs[:, :col]))
        vals[col:col + len(group)] = lam
        vecs[:, col:col + len(group)] = V
        col += len(group)
    return vals, vecs


def eigen_numeric(block: FourierBlock) -> EigenSystem:
    """Eigen-decomposition of one block via deflation and Ferrari's method.

    Raises
    ------
    NumericalError
        If ``z² - 1`` does not divide the characteristic polynomial, or a
        refined residual exceeds 1e-6.
    """
    M = np.asarray(block.matrix, dtype=np.complex128)
    coeffs = characteristic_polynomial(M)
    quartic, remainder = deflate_by_z2_minus_1(coeffs)
    if np.abs(remainder).max() > 1e-8:
        raise NumericalError(
            f"z^2 - 1 does not divide the characteristic polynomial (remainder {np.abs(remainder).max():.3e})"
        )
    roots = newton_polish(quartic, solve_quartic(quartic), max_iter=50)
    vals, vecs = _refine(M, [-1.0, 1.0, *roots])
    system = _sorted_system(vals, vecs, M, block.k, block.n, "numeric")
    worst = float(system.residuals.max())
    if worst > RESIDUAL_FAIL:
        raise NumericalError(f"eigen residual {worst:.3e} for block k={block.k}")
    V = system.eigenvectors
    defect = float(np.abs(V.conj().T @ V - np.eye(6)).max())
    if defect > RESIDUAL_FAIL:
        raise NumericalError(f"eigenvectors of block k={block.k} are not orthonormal (defect {defect:.3e})")
    return system


def _sqrt_nonneg(v: float) -> float:
    # radicands below are products of non-negative factors; clip roundoff
    return math.sqrt(max(v, 0.0))


def _unit_pair(cos_value: float, one_minus: float, one_plus: float) -> tuple[complex, complex]:
    """``e^{±iω}`` with ``cos ω = cos_value``, given accurate ``1 ∓ cos ω``."""
    s = _sqrt_nonneg(one_minus * one_plus)
    return complex(cos_value, s), complex(cos_value, -s)


def closed_form_eigenvalues(cls: CoinClass | str, x: float, y: float, n: int, k: int) -> NDArray[np.complex128]:
    """Eigenvalues ``λ_{k,1..6}`` of ``U(k)`` from the class closed forms (unsorted).

    Every radicand is evaluated as a product of factors that vanish only
    through squared half-angle sines or cosines of θ (recovered from
    ``(x, y)``) and of ``2πk/n``, so near-coincident eigenvalues split by
    the right amount instead of by the square root of roundoff.
    """
    cls = CoinClass.parse(cls)
    theta = _theta_from_xy(cls, x, y)
    phi = 2 * math.pi * k / n
    c = math.cos(phi)
    one_minus_c = 2 * math.sin(phi / 2) ** 2
    one_plus_c = 2 * math.cos(phi / 2) ** 2
    hs2, hc2 = math.sin(theta / 2) ** 2, math.cos(theta / 2) ** 2
    out = [-1.0 + 0j, 1.0 + 0j]
    if cls in (CoinClass.X, CoinClass.Y):
        u = x + 2 * x * c
        if cls is CoinClass.X:
            near, far = 4 * hs2 / 3, 4 * hc2  # 1 - x and 1 + 3x
            # (1 + u)(3 - u), each factor written without cancellation
            plus = near + 2 * x * one_plus_c if x >= 0 else far - 2 * x * one_minus_c
            minus = 3 * near + 2 * x * one_minus_c if x >= 0 else 3 - u
            pairs = [((x + 1) / 2, near * (x + 3)), ((u - 1) / 2, plus * minus)]
        else:
            near, far = 4 * hc2 / 3, 4 * hs2  # 1 + x and 1 - 3x
            # (1 - u)(3 + u)
            minus = near - 2 * x * one_plus_c if x <= 0 else far + 2 * x * one_minus_c
            plus = 3 * near - 2 * x * one_minus_c if x <= 0 else 3 + u
            pairs = [((x - 1) / 2, near * (3 - x)), ((u + 1) / 2, minus * plus)]
        for re, rad in pairs:
            im = _sqrt_nonneg(rad) / 2
            out.extend([complex(re, im), complex(re, -im)])
        return np.array(out, dtype=np.complex128)

    s = math.sin(phi)
    if cls is CoinClass.Z:
        mid = (1 - x - y + x * c) / 2
        rad = 1 + 2 * y * c + y * y - (x * s) ** 2
        x_plus_y = 4 * math.cos((theta - math.pi / 3) / 2) ** 2 / 3
        one_minus_y = 4 * math.sin((theta - 2 * math.pi / 3) / 2) ** 2 / 3
        # (1 - cw+)(1 - cw-) and (1 + cw+)(1 + cw-)
        prod_minus = one_minus_c * (1 + x) * x_plus_y / 2
        prod_plus = 2 * one_minus_y + one_minus_c * (x * x + x * y - 3 * x + y) / 2
    else:
        mid = (-1 - x - y + x * c) / 2
        rad = 1 - 2 * y * c + y * y - (x * s) ** 2
        neg_x_plus_y = 4 * math.sin((theta - math.pi / 3) / 2) ** 2 / 3
        one_plus_y = 4 * math.cos((theta - 2 * math.pi / 3) / 2) ** 2 / 3
        prod_minus = 2 * one_plus_y + one_minus_c * (x * x + x * y + 3 * x - y) / 2
        prod_plus = one_minus_c * (1 - x) * neg_x_plus_y / 2
    root = _sqrt_nonneg(rad) / 2
    hi, lo = mid + root, mid - root
    # the factor that can vanish comes from the product, the other directly
    lo_minus = 1 - lo
    hi_plus = 1 + hi
    hi_minus = prod_minus / lo_minus if lo_minus > 0.5 else 1 - hi
    lo_plus = prod_plus / hi_plus if hi_plus > 0.5 else 1 + lo
    out.extend(_unit_pair(hi, hi_minus, hi_plus))
    out.extend(_unit_pair(lo, lo_minus, lo_plus))
    return np.array(out, dtype=np.complex128)


def _general_eigenvector(cls: CoinClass, lam: complex, x: float, y: float, n: int, k: int):
    """General-position eigenvector formulas; ``None`` when a denominator is tiny."""
    e = cmath.exp(2j * math.pi * k / n)
    eb = e.conjugate()
    l = lam
    if cls is CoinClass.X:
        z = 1 - x - y
        d1 = 1 - l * x - l * x * e + l * l * x * e
        d2 = x - l * x - l * x * eb + l * l * eb
        nums = (l * (l * z + y), l * z + y, l * (z + l * y * e), z + l * y * eb, l * (x - l * x - l * x * e + l * l * e))
    elif cls is CoinClass.Y:
        z = 1 + x + y
        d1 = -1 + l * x + l * x * e + l * l * x * e
        d2 = -x - l * x - l * x * eb + l * l * eb
        nums = (-l * (l * z + y), -(l * z + y), l * (z + l * y * e), z + l * y * eb, l * (-x - l * x - l * x * e + l * l * e))
    elif cls is CoinClass.Z:
        z = 1 - x - y
        d1 = -1 + l * z + l * x * e + l * l * y * e
        d2 = -y - l * x - l * eb * z + l * l * eb
        nums = (l * (l - 1) * z, (l - 1) * z, l * (l * e - 1) * x, (l * eb - 1) * x, l * (-y - l * x - l * e * z + l * l * e))
    else:
        z = 1 + x + y
        d1 = 1 + l * z - l * x * e + l * l * y * e
        d2 = y - l * x + l * eb * z + l * l * eb
        nums = (-l * (l + 1) * z, -(l + 1) * z, l * (l * e + 1) * x, (l * eb + 1) * x, l * (y - l * x + l * e * z + l * l * e))
    if abs(d1) <= DENOM_TOL or abs(d2) <= DENOM_TOL:
        return None
    dens = (d1, d2, d1, d2, d1)
    return np.array([a / b for a, b in zip(nums, dens)] + [1.0], dtype=np.complex128)


def eigen_closed_form(cls: CoinClass | str, coin: CoinMatrix, n: int, k: int) -> EigenSystem:
    """Closed-form eigen-decomposition of ``U(k)`` for a coin of class ``cls``.

    Eigenvalues always come from the closed forms.  An eigenvector comes from
    the general formula when the eigenvalue is simple, both denominators exceed
    1e-8 and the resulting residual is below 1e-9; otherwise the null-space
    solver supplies it.
    """
    cls = CoinClass.parse(cls)
    if coin.cls is not cls:
        raise InputError(f"coin belongs to class {coin.cls.value}, not {cls.value}")
    block = build_Uk(coin, n, k)
    M = block.matrix
    vals = closed_form_eigenvalues(cls, coin.x, coin.y, n, k)
    vecs = np.empty((6, 6), dtype=np.complex128)
    pending = []
    for group in _clusters(vals, CLUSTER_TOL):
        if len(group) == 1:
            j = group[0]
            v = _general_eigenvector(cls, vals[j], coin.x, coin.y, n, k)
            if v is not None and np.all(np.isfinite(v)):
                v = v / np.linalg.norm(v)
                if np.linalg.norm(M @ v - vals[j] * v) <= RESIDUAL_TARGET:
                    vecs[:, j] = v
                    continue
        pending.append(group)
    done = [j for j in range(6) if not any(j in g for g in pending)]
    for group in pending:
        lam, V = _eigenspace(M, vals[group].mean(), len(group), _complement(vecs[:, done]))
        done += group
        # pair the subspace basis with the closed-form values by phase order
        src = np.argsort(eigen_phase(lam))
        dst = sorted(group, key=lambda i: float(eigen_phase(vals[i])))
        for a, b in zip(src, dst):
            vecs[:, b] = V[:, a]
    return _sorted_system(vals, vecs, M, k, n, "closed_form")


# ------------------------------------------------------------ full spectrum


def block_spectra(coin: CoinMatrix, n: int, parallel: bool = False) -> list[EigenSystem]:
    """:func:`eigen_numeric` for every ``k``, in ascending ``k``."""
    _check_n(n)

    def one(k: int) -> EigenSystem:
        return eigen_numeric(build_Uk(coin, n, k))

    if parallel:
        with ThreadPoolExecutor() as pool:
            return list(pool.map(one, range(n)))
    return [one(k) for k in range(n)]


@dataclass(frozen=True, eq=False)
class FullSpectrum:
    """All ``6n`` eigenpairs of ``U``; column ``i`` of ``eigenvectors`` pairs with ``eigenvalues[i]``."""

    n: int
    eigenvalues: NDArray[np.complex128]
    eigenvectors: NDArray[np.complex128]
    ks: NDArray[np.int64]
    js: NDArray[np.int64]
    residuals: NDArray[np.float64]
    blocks: tuple[EigenSystem, ...]

    def __len__(self) -> int:
        return self.eigenvalues.size

    def __iter__(self) -> Iterator[tuple[complex, NDArray[np.complex128]]]:
        for i in range(self.eigenvalues.size):
            yield complex(self.eigenvalues[i]), self.eigenvectors[:, i]


def _apply_U_columns(coin: CoinMatrix, V: NDArray, n: int) -> NDArray:
    """``U @ V`` for a batch of columns using the local recurrence."""
    B = V.shape[1]
    psi = V.reshape(6, n, B).transpose(1, 2, 0)  # (n, B, 6)
    out = _local_step_array(psi, local_blocks(coin))
    return out.transpose(2, 0, 1).reshape(6 * n, B)


def full_spectrum(coin: CoinMatrix, n: int, parallel: bool = False) -> FullSpectrum:
    """Assemble the ``6n`` eigenpairs of ``U`` from the block decompositions."""
    blocks = block_spectra(coin, n, parallel=parallel)
    r = np.arange(n)
    vals, vecs, ks, js = [], [], [], []
    for sys_ in blocks:
        phi = np.exp(2j * np.pi * sys_.k * r / n) / math.sqrt(n)
        for j in range(6):
            vals.append(sys_.eigenvalues[j])
            vecs.append(np.outer(sys_.eigenvectors[:, j], phi).reshape(-1))
            ks.append(sys_.k)
            js.append(j)
    V = np.column_stack(vecs)
    lam = np.array(vals, dtype=np.complex128)
    res = np.linalg.norm(_apply_U_columns(coin, V, n) - V * lam[None, :], axis=0)
    if res.max() > 1e-8:
        raise NumericalError(f"full-spectrum residual {res.max():.3e} exceeds 1e-8")
    return FullSpectrum(n, lam, V, np.array(ks), np.array(js), res, tuple(blocks))


def multiset_distance(a, b) -> float:
    """Largest pair distance under the optimal (min-cost) matching of two multisets."""
    a = np.asarray(a, dtype=np.complex128).reshape(-1)
    b = np.asarray(b, dtype=np.complex128).reshape(-1)
    if a.size != b.size:
        raise InputError(f"multisets differ in size ({a.size} vs {b.size})")
    D = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(D)
    return float(D[rows, cols].max()) if a.size else 0.0


def spectrum_to_csv(blocks: Sequence[EigenSystem]) -> str:
    """Rows ``k,j,re,im,phase,residual`` in ascending ``k`` then ``j``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "j", "re", "im", "phase", "residual"])
    for sys_ in blocks:
        ph = sys_.phases
        for j, lam in enumerate(sys_.eigenvalues):
            w.writerow([
                sys_.k, j,
                format(lam.real, ".17g"), format(lam.imag, ".17g"),
                format(ph[j], ".17g"), format(sys_.residuals[j], ".17g"),
            ])
    return buf.getvalue()

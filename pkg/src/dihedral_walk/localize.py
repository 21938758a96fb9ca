"""
Time-averaged vertex probabilities and their long-time limit.

The time average over ``t = 0..T-1`` is

    P̄(s, r, T) = (1/T) Σ_t Σ_l |ψ(l, s, r, t)|².

Expanding ``ψ(t)`` in the eigenbasis of ``U`` turns the time sum into a
Dirichlet kernel per eigenvalue pair, so the spectral route costs the same for
every ``T``.  As ``T → ∞`` only pairs of equal eigenvalues survive.  Equal
eigenvalues occur across different momentum blocks as well (``±1`` is in every
block), so the limit keeps the full projector onto each eigenspace.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from .cayley import DihedralVertex, vertex_index
from .coin import CoinClass, CoinMatrix, coin_from_theta
from .errors import InputError
from .evolve import WalkState, _check_n, _local_step_array, local_blocks, state_index
from .fourier import FullSpectrum, full_spectrum

__all__ = [
    "InitialCondition",
    "TimeAveragedResult",
    "SweepResult",
    "time_avg_direct",
    "time_avg_spectral",
    "limit_time_avg",
    "sweep_theta",
    "sweep_n",
    "time_average_kernel",
    "group_eigenvalues",
    "grid_local_extrema",
    "extremum_offsets",
]

LIMIT_GROUP_TOL = 1e-8
_KERNEL_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class InitialCondition:
    """Walker at vertex ``(s0, r0)`` with coin state ``coin_amplitudes``."""

    coin_amplitudes: NDArray[np.complex128]
    s0: int = 0
    r0: int = 0

    def __post_init__(self):
        a = np.array(self.coin_amplitudes, dtype=np.complex128).reshape(-1)
        if a.shape != (3,):
            raise InputError(f"coin state needs 3 amplitudes, got {a.size}")
        norm = float(np.vdot(a, a).real)
        if abs(norm - 1.0) > 1e-12:
            raise InputError(f"coin state is not normalized (‖a‖² = {norm!r})")
        if self.s0 not in (0, 1) or self.r0 < 0:
            raise InputError(f"invalid start vertex ({self.s0}, {self.r0})")
        a.setflags(write=False)
        object.__setattr__(self, "coin_amplitudes", a)

    @classmethod
    def basis(cls, l: int, s0: int = 0, r0: int = 0) -> "InitialCondition":
        a = np.zeros(3, dtype=np.complex128)
        if l not in (0, 1, 2):
            raise InputError(f"coin index must be 0, 1 or 2, got {l!r}")
        a[l] = 1.0
        return cls(a, s0, r0)

    @classmethod
    def uniform(cls, s0: int = 0, r0: int = 0) -> "InitialCondition":
        """``(|0⟩ + |1⟩ + |2⟩)/√3`` at ``(s0, r0)``."""
        return cls(np.full(3, 1.0 / math.sqrt(3.0), dtype=np.complex128), s0, r0)

    def state(self, n: int) -> WalkState:
        _check_n(n)
        if self.r0 >= n:
            raise InputError(f"start rotation r0={self.r0} outside [0, {n})")
        amp = np.zeros(6 * n, dtype=np.complex128)
        for l in range(3):
            amp[state_index(l, self.s0, self.r0, n)] = self.coin_amplitudes[l]
        return WalkState(n, amp)

    @property
    def vertex(self) -> DihedralVertex:
        return DihedralVertex(self.s0, self.r0)


@dataclass(frozen=True, eq=False)
class TimeAveragedResult:
    """``pbar[vertex_index(s, r)] = P̄(s, r, T)``; ``T`` is ``None`` for the limit.

    For ``method="limit"``, ``diagonal_only`` holds the diagonal-only long-time
    value at ``(0, r0)`` and ``(1, r0)``, i.e. without cross terms between equal
    eigenvalues of different blocks.
    """

    n: int
    T: Optional[int]
    pbar: NDArray[np.float64]
    method: str
    coin: Optional[CoinMatrix] = None
    init: Optional[InitialCondition] = None
    diagonal_only: Optional[NDArray[np.float64]] = None

    def at(self, s: int, r: int) -> float:
        return float(self.pbar[vertex_index(s, r, self.n)])

    def total(self) -> float:
        return float(self.pbar.sum())

    def ranked_vertices(self) -> list[DihedralVertex]:
        """Vertices in order of decreasing ``P̄`` (ties by index)."""
        order = np.lexsort((np.arange(self.pbar.size), -self.pbar))
        return [DihedralVertex(int(i) // self.n, int(i) % self.n) for i in order]

    def to_csv(self, label: float | int | None = None) -> str:
        """Rows ``theta_or_n,s,r,pbar``; ``label`` defaults to the coin angle."""
        if label is None:
            label = self.coin.theta if self.coin is not None and self.coin.theta is not None else self.n
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta_or_n", "s", "r", "pbar"])
        for s in (0, 1):
            for r in range(self.n):
                w.writerow([_fmt(label), s, r, _fmt(self.at(s, r))])
        return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


@dataclass(frozen=True)
class SweepResult:
    """``points[i] = (value, pbar at each of vertices)``, ascending in ``value``."""

    axis: str
    vertices: tuple[DihedralVertex, ...]
    points: tuple[tuple[float, tuple[float, ...]], ...]
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        vals = [p[0] for p in self.points]
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise InputError("sweep points must be ascending")

    @property
    def values(self) -> NDArray[np.float64]:
        return np.array([p[0] for p in self.points], dtype=np.float64)

    def series(self, vertex: tuple[int, int]) -> NDArray[np.float64]:
        """``P̄`` at ``vertex`` across the sweep."""
        v = DihedralVertex(*vertex)
        try:
            i = self.vertices.index(v)
        except ValueError:
            raise InputError(f"vertex {vertex!r} was not recorded") from None
        return np.array([p[1][i] for p in self.points], dtype=np.float64)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta_or_n", "s", "r", "pbar"])
        for value, pbars in self.points:
            for v, p in zip(self.vertices, pbars):
                w.writerow([_fmt(value), v.s, v.r, _fmt(p)])
        return buf.getvalue()


# ------------------------------------------------------------------ direct


def _vertex_probs_local(psi: NDArray) -> NDArray[np.float64]:
    a = np.abs(psi) ** 2
    return np.concatenate([a[:, 0::2].sum(axis=1), a[:, 1::2].sum(axis=1)])


def time_avg_direct(coin: CoinMatrix, n: int, init: InitialCondition, T: int) -> TimeAveragedResult:
    """Average of the vertex distribution over ``t = 0..T-1`` by time stepping."""
    if T < 1:
        raise InputError(f"T must be >= 1, got {T}")
    blocks = local_blocks(coin)
    psi = init.state(n).local_vectors
    acc = np.zeros(2 * n)
    for t in range(T):
        acc += _vertex_probs_local(psi)
        if t + 1 < T:
            psi = _local_step_array(psi, blocks)
    return TimeAveragedResult(n, T, acc / T, "direct", coin, init)


# ---------------------------------------------------------------- spectral


def time_average_kernel(lam_a: NDArray, lam_b: NDArray, T: int) -> NDArray[np.complex128]:
    """``(1/T) Σ_{t<T} (λ_a conj(λ_b))^t`` for unit-modulus eigenvalues.

    Evaluated as the Dirichlet kernel ``e^{iδ(T-1)/2} sin(Tδ/2) / (T sin(δ/2))``
    with ``δ = arg λ_a - arg λ_b`` wrapped to (-π, π]; equal to the geometric
    sum and free of the ``1/(1 - λ conj λ')`` blow-up near degeneracy.
    """
    pa = np.angle(np.asarray(lam_a))[:, None]
    pb = np.angle(np.asarray(lam_b))[None, :]
    d = np.remainder(pa - pb + np.pi, 2 * np.pi) - np.pi
    half = np.sin(d / 2.0)
    small = np.abs(half) < _KERNEL_EPS
    ratio = np.where(small, 1.0, np.sin(T * d / 2.0) / np.where(small, 1.0, T * half))
    return np.exp(0.5j * d * (T - 1)) * ratio


def _expansion(spec: FullSpectrum, init: InitialCondition, n: int):
    psi0 = init.state(n).amplitudes
    coeff = spec.eigenvectors.conj().T @ psi0
    # X[l, s, r, J] = a_J v_J(l, s, r)
    X = (spec.eigenvectors * coeff[None, :]).reshape(3, 2, n, -1)
    return coeff, X


def time_avg_spectral(
    coin: CoinMatrix,
    n: int,
    init: InitialCondition,
    T: int,
    spectrum: Optional[FullSpectrum] = None,
) -> TimeAveragedResult:
    """Time average from the eigen-expansion of the initial state.

    ``P̄(s, r) = Σ_l Σ_{J,J'} X_J G_{JJ'} conj(X_{J'})`` with
    ``X_J = a_J v_J(l, s, r)`` and ``G`` the time-average kernel.
    """
    if T < 1:
        raise InputError(f"T must be >= 1, got {T}")
    spec = spectrum if spectrum is not None else full_spectrum(coin, n)
    _, X = _expansion(spec, init, n)
    G = time_average_kernel(spec.eigenvalues, spec.eigenvalues, T)
    flat = X.reshape(6 * n, -1)
    vals = np.einsum("ij,jk,ik->i", flat, G, flat.conj()).real.reshape(3, 2, n)
    pbar = vals.sum(axis=0).reshape(-1)
    return TimeAveragedResult(n, T, pbar, "spectral", coin, init)


# ------------------------------------------------------------------- limit


def group_eigenvalues(lam: NDArray, tol: float = LIMIT_GROUP_TOL) -> list[NDArray[np.int64]]:
    """Index groups of eigenvalues chained within ``tol``, including across the ±π seam."""
    lam = np.asarray(lam)
    order = np.argsort(np.angle(lam), kind="stable")
    groups: list[list[int]] = [[int(order[0])]]
    for prev, cur in zip(order, order[1:]):
        if abs(lam[cur] - lam[prev]) <= tol:
            groups[-1].append(int(cur))
        else:
            groups.append([int(cur)])
    if len(groups) > 1 and abs(lam[groups[0][0]] - lam[groups[-1][-1]]) <= tol:
        groups[0] = groups.pop() + groups[0]
    return [np.array(g, dtype=np.int64) for g in groups]


def limit_time_avg(
    coin: CoinMatrix,
    n: int,
    init: InitialCondition,
    spectrum: Optional[FullSpectrum] = None,
) -> TimeAveragedResult:
    """``lim_{T→∞} P̄(s, r, T)`` from the eigenspace projections of the initial state."""
    spec = spectrum if spectrum is not None else full_spectrum(coin, n)
    coeff, X = _expansion(spec, init, n)
    pbar_grid = np.zeros((3, 2, n))
    for g in group_eigenvalues(spec.eigenvalues):
        pbar_grid += np.abs(X[..., g].sum(axis=-1)) ** 2
    pbar = pbar_grid.sum(axis=0).reshape(-1)

    # diagonal-only variant: Σ_J |a_J|² Σ_l |v_J(l, s, r0)|²
    r0 = init.r0
    V = spec.eigenvectors.reshape(3, 2, n, -1)
    weights = np.abs(coeff) ** 2
    diag = np.array([(weights * (np.abs(V[:, s, r0, :]) ** 2).sum(axis=0)).sum() for s in (0, 1)])
    return TimeAveragedResult(n, None, pbar, "limit", coin, init, diagonal_only=diag)


# ------------------------------------------------------------------ sweeps


def _normalize_vertices(vertices, n: int) -> tuple[DihedralVertex, ...]:
    out = []
    for v in vertices:
        s, r = v
        vertex_index(s, r, n)
        out.append(DihedralVertex(int(s), int(r)))
    return tuple(out)


def _run_points(fn, params, parallel: bool):
    if parallel:
        with ThreadPoolExecutor() as pool:
            return list(pool.map(fn, params))
    return [fn(p) for p in params]


def sweep_theta(
    cls: CoinClass | str,
    grid: int,
    n: int,
    init: InitialCondition,
    T: int,
    vertices: Sequence[tuple[int, int]],
    parallel: bool = False,
) -> SweepResult:
    """``P̄`` at ``vertices`` over ``grid`` equidistant angles spanning [-π, π]."""
    if grid < 2:
        raise InputError(f"grid must be >= 2, got {grid}")
    cls = CoinClass.parse(cls)
    verts = _normalize_vertices(vertices, n)
    thetas = np.linspace(-np.pi, np.pi, grid)

    def one(theta: float) -> tuple[float, tuple[float, ...]]:
        res = time_avg_direct(coin_from_theta(cls, theta), n, init, T)
        return float(theta), tuple(res.at(v.s, v.r) for v in verts)

    points = _run_points(one, thetas, parallel)
    return SweepResult("theta", verts, tuple(points), {"class": cls.value, "n": n, "T": T})


def sweep_n(
    cls: CoinClass | str,
    theta: float,
    ns: Sequence[int],
    init: InitialCondition,
    T: int,
    parallel: bool = False,
) -> SweepResult:
    """``P̄`` at the starting vertex for each graph size in ``ns``."""
    cls = CoinClass.parse(cls)
    ns = sorted(int(n) for n in ns)
    if not ns:
        raise InputError("ns must be non-empty")
    for n in ns:
        _check_n(n)
    coin = coin_from_theta(cls, theta)

    def one(n: int) -> tuple[int, tuple[float, ...]]:
        return n, (time_avg_direct(coin, n, init, T).at(init.s0, init.r0),)

    points = _run_points(one, ns, parallel)
    return SweepResult("n", (init.vertex,), tuple(points), {"class": cls.value, "theta": coin.theta, "T": T})


def grid_local_extrema(values: NDArray, periodic: bool = True) -> NDArray[np.int64]:
    """Indices of strict local maxima or minima of a sampled curve.

    With ``periodic=True`` the samples are taken on a closed θ-grid whose last
    point repeats the first (θ = -π and θ = π give the same coin); the
    duplicate is dropped and neighbours wrap around.
    """
    y = np.asarray(values, dtype=np.float64)
    if periodic:
        y = y[:-1]
        left, right = np.roll(y, 1), np.roll(y, -1)
        idx = np.arange(y.size)
    else:
        left, right = y[:-2], y[2:]
        y = y[1:-1]
        idx = np.arange(1, y.size + 1)
    ext = (y - left) * (right - y) < 0
    return idx[ext]


def extremum_offsets(sweep: SweepResult, vertex: tuple[int, int], angles: Sequence[float]) -> dict[float, float]:
    """Distance, in grid steps, from each angle to the nearest grid-local extremum of ``P̄(vertex)``."""
    if sweep.axis != "theta":
        raise InputError("extremum offsets need a theta sweep")
    th = sweep.values
    step = th[1] - th[0]
    ext = grid_local_extrema(sweep.series(vertex), periodic=True)
    out = {}
    for a in angles:
        if ext.size == 0:
            out[a] = math.inf
            continue
        d = np.abs(np.remainder(th[ext] - a + np.pi, 2 * np.pi) - np.pi)
        out[a] = float(d.min() / step)
    return out

"""
Shift and evolution operators, and position-basis time stepping.

State layout
------------
The walk lives on ``C^3 ⊗ C^2 ⊗ C^N`` (coin ``l``, reflection ``s``, rotation
``r``).  Amplitudes are stored flat with index ``l * 2N + s * N + r``, so
``amplitudes.reshape(3, 2, N)[l, s, r]`` is ``ψ(l, s, r)``.  The six amplitudes
sharing a rotation index ``r``, ordered ``(0,0), (0,1), (1,0), (1,1), (2,0),
(2,1)`` in ``(l, s)``, form the local 6-vector ``ψ(r)``.

Shift
-----
coin 0 moves along the cycle the walker is on (``r -> r+1`` on the inner cycle,
``r -> r-1`` on the outer), coin 1 stays, coin 2 flips ``s``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from .cayley import vertex_index
from .coin import CoinMatrix
from .errors import InputError

__all__ = [
    "WalkState",
    "EvolutionOperator",
    "PositionDistribution",
    "state_index",
    "basis_state",
    "local_blocks",
    "build_shift",
    "build_evolution",
    "step_dense",
    "step_local",
    "position_probabilities",
    "evolve_t",
    "evolve_local",
    "state_to_csv",
]

NORM_TOL = 1e-10


def _check_n(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 3:
        raise InputError(f"n must be an integer >= 3, got {n!r}")


def state_index(l: int, s: int, r: int, n: int) -> int:
    if l not in (0, 1, 2):
        raise InputError(f"coin index must be 0, 1 or 2, got {l!r}")
    return l * 2 * n + vertex_index(s, r, n)


@dataclass(frozen=True, eq=False)
class WalkState:
    """Normalized amplitude vector of length ``6n``."""

    n: int
    amplitudes: NDArray[np.complex128]

    def __post_init__(self):
        _check_n(self.n)
        amp = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amp.shape != (6 * self.n,):
            raise InputError(f"expected {6 * self.n} amplitudes, got {amp.size}")
        norm = float(np.vdot(amp, amp).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise InputError(f"state is not normalized (‖ψ‖² = {norm!r})")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def grid(self) -> NDArray[np.complex128]:
        """Amplitudes viewed as an array indexed ``[l, s, r]``."""
        return self.amplitudes.reshape(3, 2, self.n)

    @property
    def local_vectors(self) -> NDArray[np.complex128]:
        """Array of shape ``(n, 6)`` whose row ``r`` is the local 6-vector ψ(r)."""
        return self.amplitudes.reshape(6, self.n).T

    @classmethod
    def from_local_vectors(cls, vectors: NDArray) -> "WalkState":
        vectors = np.asarray(vectors, dtype=np.complex128)
        return cls(vectors.shape[0], vectors.T.reshape(-1))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def basis_state(l: int, s: int, r: int, n: int) -> WalkState:
    _check_n(n)
    amp = np.zeros(6 * n, dtype=np.complex128)
    amp[state_index(l, s, r, n)] = 1.0
    return WalkState(n, amp)


@dataclass(frozen=True, eq=False)
class EvolutionOperator:
    """Dense ``6n × 6n`` unitary, either the bare shift or ``S (C ⊗ I_2 ⊗ I_n)``."""

    n: int
    coin: Optional[CoinMatrix]
    matrix: NDArray[np.complex128]
    shift_only: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return 6 * self.n

    def unitarity_defect(self) -> float:
        U = self.matrix
        return float(np.abs(U.conj().T @ U - np.eye(self.dim)).max())


def build_shift(n: int) -> EvolutionOperator:
    """Permutation matrix of the conditional shift."""
    _check_n(n)
    S = np.zeros((6 * n, 6 * n), dtype=np.complex128)
    for s in (0, 1):
        step = 1 if s == 0 else -1
        for r in range(n):
            S[state_index(0, s, (r + step) % n, n), state_index(0, s, r, n)] = 1.0
            S[state_index(1, s, r, n), state_index(1, s, r, n)] = 1.0
            S[state_index(2, 1 - s, r, n), state_index(2, s, r, n)] = 1.0
    return EvolutionOperator(n, None, S, shift_only=True)


def build_evolution(coin: CoinMatrix, n: int) -> EvolutionOperator:
    """``U = S (C ⊗ I_2 ⊗ I_n)``."""
    S = build_shift(n).matrix
    coin_op = np.kron(np.asarray(coin, dtype=np.complex128), np.eye(2 * n))
    return EvolutionOperator(n, coin, S @ coin_op)


def local_blocks(coin: CoinMatrix | NDArray) -> tuple[NDArray, NDArray, NDArray]:
    """The 6×6 matrices ``(M1, M2, M3)`` of the local recurrence

    ``ψ(r, t+1) = M1 ψ(r+1, t) + M2 ψ(r-1, t) + M3 ψ(r, t)``.
    """
    c = np.asarray(coin, dtype=np.complex128)
    M1 = np.zeros((6, 6), dtype=np.complex128)
    M2 = np.zeros((6, 6), dtype=np.complex128)
    M3 = np.zeros((6, 6), dtype=np.complex128)
    M2[0, 0::2] = c[0]        # outer: (0,0,r) fed from r-1
    M1[1, 1::2] = c[0]        # (0,1,r) fed from r+1
    M3[2, 0::2] = c[1]        # coin 1 stays
    M3[3, 1::2] = c[1]
    M3[4, 1::2] = c[2]        # coin 2 swaps s
    M3[5, 0::2] = c[2]
    return M1, M2, M3


def step_dense(state: WalkState, U: EvolutionOperator) -> WalkState:
    if U.n != state.n:
        raise InputError(f"operator is for n={U.n}, state has n={state.n}")
    return WalkState(state.n, U.matrix @ state.amplitudes)


def _local_step_array(psi: NDArray, blocks) -> NDArray:
    M1, M2, M3 = blocks
    return np.roll(psi, -1, axis=0) @ M1.T + np.roll(psi, 1, axis=0) @ M2.T + psi @ M3.T


def step_local(state: WalkState, coin: CoinMatrix) -> WalkState:
    """One step in O(n) via the local 6×6 blocks; agrees with :func:`step_dense`."""
    psi = _local_step_array(state.local_vectors, local_blocks(coin))
    return WalkState.from_local_vectors(psi)


def evolve_local(state: WalkState, coin: CoinMatrix, t: int) -> WalkState:
    if t < 0:
        raise InputError(f"t must be non-negative, got {t}")
    blocks = local_blocks(coin)
    psi = state.local_vectors
    for _ in range(t):
        psi = _local_step_array(psi, blocks)
    return WalkState.from_local_vectors(psi)


def evolve_t(state0: WalkState, U: EvolutionOperator, t: int) -> WalkState:
    """Apply ``U`` ``t`` times; ``t = 0`` returns ``state0`` unchanged."""
    if t < 0:
        raise InputError(f"t must be non-negative, got {t}")
    if U.n != state0.n:
        raise InputError(f"operator is for n={U.n}, state has n={state0.n}")
    amp = state0.amplitudes
    for _ in range(t):
        amp = U.matrix @ amp
    return WalkState(state0.n, amp)


@dataclass(frozen=True, eq=False)
class PositionDistribution:
    """Vertex probabilities indexed by ``vertex_index(s, r)``."""

    p: NDArray[np.float64]
    time: int = 0

    def at(self, s: int, r: int) -> float:
        n = self.p.size // 2
        return float(self.p[vertex_index(s, r, n)])


def _vertex_probabilities(psi_grid: NDArray) -> NDArray[np.float64]:
    return (np.abs(psi_grid) ** 2).sum(axis=0).reshape(-1)


def position_probabilities(state: WalkState, time: int = 0) -> PositionDistribution:
    """``P(s, r) = Σ_l |ψ(l, s, r)|²``."""
    return PositionDistribution(_vertex_probabilities(state.grid), time)


def state_to_csv(state: WalkState) -> str:
    """CSV snapshot with columns ``l,s,r,re,im``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["l", "s", "r", "re", "im"])
    g = state.grid
    for l in range(3):
        for s in range(2):
            for r in range(state.n):
                a = g[l, s, r]
                w.writerow([l, s, r, format(a.real, ".17g"), format(a.imag, ".17g")])
    return buf.getvalue()

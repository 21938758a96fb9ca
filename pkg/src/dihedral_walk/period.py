"""
Periodicity of the walk: smallest ``τ ≥ 1`` with ``U^τ = I``.

Three independent routes are provided.

``theorem_period``
    Closed-form period formulas for each coin class, evaluated in exact
    integer arithmetic.
``spectral_period``
    Rational reconstruction of every eigenphase ``φ/2π`` across the Fourier
    blocks.  If all phases are rational, ``τ`` is the lcm of the denominators.
    If some eigenvalue has a rational cosine outside ``{0, ±1/2, ±1}``, Niven's
    theorem shows its phase is an irrational multiple of ``π`` and the walk is
    aperiodic.
``brute_force_period``
    Direct search over ``t ≤ t_max`` on the dense operator.

Notes
-----
For the ``Z`` and ``W`` classes at ``θ = 2π/3`` the period terms use the ratio
``k/N``: the block eigenvalues there are ``e^{±iπk/N}``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from .coin import CoinClass, CoinMatrix, coin_from_theta, normalize_theta
from .errors import CapacityError, InputError
from .evolve import _check_n, build_evolution
from .fourier import EigenSystem, block_spectra, eigen_phase

__all__ = [
    "PeriodResult",
    "PeriodFormulaTerm",
    "EigenphaseRational",
    "AperiodicWitness",
    "TheoremComparison",
    "theorem_period",
    "spectral_period",
    "brute_force_period",
    "verify_period",
    "niven_check",
    "eigenphase_rationals",
    "compare_with_theorem",
]

THETA_MATCH_TOL = 1e-12
ROOT_OF_UNITY_TOL = 1e-10
PERIOD_TOL = 1e-8
COSINE_DENOMINATOR_MAX = 1000
MAX_TAU_BITS = 4096
_NIVEN_VALUES = (0.0, 0.5, -0.5, 1.0, -1.0)


@dataclass(frozen=True)
class PeriodFormulaTerm:
    """One factor ``c_k · p_k`` of a period formula, with ``ratio = m_k / p_k`` in lowest terms."""

    k: int
    m_k: int
    p_k: int
    c_k: int
    ratio: Fraction

    def __post_init__(self):
        if math.gcd(self.m_k, self.p_k) != 1 or Fraction(self.m_k, self.p_k) != self.ratio:
            raise InputError(f"term {self!r} is not in lowest terms")

    @property
    def factor(self) -> int:
        return self.c_k * self.p_k

    def to_dict(self) -> dict:
        return {"k": self.k, "m_k": self.m_k, "p_k": self.p_k, "c_k": self.c_k}


@dataclass(frozen=True)
class EigenphaseRational:
    """Best rational ``p/q`` (``q ≤ q_max``) to ``phase(λ)/2π``; ``verified`` iff ``|λ^q - 1| ≤ 1e-10``."""

    lam: complex
    p: int
    q: int
    verified: bool
    k: int = 0
    j: int = 0


@dataclass(frozen=True)
class AperiodicWitness:
    """An eigenvalue whose phase is an irrational multiple of π."""

    lam: complex
    cosine: Optional[Fraction]
    k: Optional[int] = None
    j: Optional[int] = None
    reason: str = ""

    def describe(self) -> str:
        if self.cosine is None:
            return self.reason
        where = "" if self.k is None else f" at k={self.k}, j={self.j}"
        return f"cos(phi) = {self.cosine}{where}; rational and not in {{0, ±1/2, ±1}}"


@dataclass(frozen=True)
class PeriodResult:
    """Outcome of a period computation.

    ``outcome`` is ``"finite"`` (``tau`` set), ``"aperiodic"`` (``witness`` set)
    or ``"unknown"`` (``cap`` set).  ``method`` is ``"theorem"``,
    ``"spectral"`` or ``"brute"``.
    """

    outcome: str
    method: str
    tau: Optional[int] = None
    witness: Optional[AperiodicWitness] = None
    cap: Optional[int] = None
    terms: tuple[PeriodFormulaTerm, ...] = ()
    notes: tuple[str, ...] = ()

    @classmethod
    def finite(cls, tau: int, method: str, **kw) -> "PeriodResult":
        if tau.bit_length() > MAX_TAU_BITS:
            raise CapacityError(f"period exceeds {MAX_TAU_BITS} bits")
        return cls("finite", method, tau=int(tau), **kw)

    @classmethod
    def aperiodic(cls, witness: AperiodicWitness, method: str, **kw) -> "PeriodResult":
        return cls("aperiodic", method, witness=witness, **kw)

    @classmethod
    def unknown(cls, cap: int, method: str, **kw) -> "PeriodResult":
        return cls("unknown", method, cap=int(cap), **kw)

    @property
    def is_finite(self) -> bool:
        return self.outcome == "finite"

    def to_dict(self) -> dict:
        out: dict = {"method": self.method, "outcome": self.outcome}
        if self.tau is not None:
            out["tau"] = self.tau
        if self.witness is not None:
            out["witness"] = self.witness.describe()
        if self.cap is not None:
            out["cap"] = self.cap
        out["terms"] = [t.to_dict() for t in self.terms]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def __str__(self) -> str:
        if self.outcome == "finite":
            return f"Finite({self.tau})"
        if self.outcome == "aperiodic":
            return f"Aperiodic({self.witness.describe()})"
        return f"Unknown({self.cap})"


# ------------------------------------------------------------------ theorem


def _angle_close(a: float, b: float, tol: float = THETA_MATCH_TOL) -> bool:
    return abs(math.remainder(a - b, 2 * math.pi)) <= tol


def _terms(n: int, numerator: int, c_rule) -> list[PeriodFormulaTerm]:
    """Terms for ``ratio = numerator·k / n``, ``k = 1..n-1``."""
    out = []
    for k in range(1, n):
        ratio = Fraction(numerator * k, n)
        m, p = ratio.numerator, ratio.denominator
        out.append(PeriodFormulaTerm(k, m, p, c_rule(m), ratio))
    return out


def _lcm_result(base: int, terms: list[PeriodFormulaTerm], notes=()) -> PeriodResult:
    tau = math.lcm(base, *(t.factor for t in terms))
    return PeriodResult.finite(tau, "theorem", terms=tuple(terms), notes=tuple(notes))


def _even_one_else_two(m: int) -> int:
    return 1 if m % 2 == 0 else 2


def _always_two(m: int) -> int:
    return 2


def theorem_period(cls: CoinClass | str, theta: float, n: int) -> PeriodResult:
    """Evaluate the closed-form period formula for class ``cls`` at angle ``theta``.

    Special angles are matched within 1e-12 after normalization into
    (-π, π].  Any other angle falls through to the aperiodic branch.

    Examples
    --------
    >>> theorem_period("X", 2 * math.pi / 3, 7).tau
    6
    >>> theorem_period("X", 0.0, 4).tau
    4
    """
    cls = CoinClass.parse(cls)
    _check_n(n)
    th = normalize_theta(theta)
    third = 2 * math.pi / 3

    if cls is CoinClass.X:
        if _angle_close(th, 0.0):
            return _lcm_result(2, _terms(n, 2, _even_one_else_two))
        if _angle_close(th, third) or _angle_close(th, -third):
            return PeriodResult.finite(6, "theorem")
    elif cls is CoinClass.Y:
        if _angle_close(th, math.pi):
            return _lcm_result(2, _terms(n, n - 2, _always_two))
        if _angle_close(th, math.pi / 3) or _angle_close(th, -math.pi / 3):
            return PeriodResult.finite(6, "theorem")
    elif cls is CoinClass.Z:
        if _angle_close(th, third):
            return _lcm_result(2, _terms(n, 1, _always_two))
        if _angle_close(th, -third):
            return PeriodResult.finite(4, "theorem")
        if _angle_close(th, 0.0):
            return _lcm_result(4, _terms(n, 2, _even_one_else_two))
    else:
        if _angle_close(th, third):
            return _lcm_result(2, _terms(n, 1, _always_two))
        if _angle_close(th, -third):
            return PeriodResult.finite(4, "theorem")
        if _angle_close(th, 0.0):
            return _lcm_result(4, _terms(n, 2, _always_two))

    notes = ()
    for special in (0.0, third, -third, math.pi / 3, -math.pi / 3, math.pi):
        if _angle_close(th, special, 1e-6):
            notes = (f"theta={th!r} is within 1e-6 of special angle {special!r} but outside the 1e-12 match",)
            break
    witness = AperiodicWitness(complex("nan"), None, reason=f"class {cls.value} at theta={th!r}: no finite-period branch")
    return PeriodResult.aperiodic(witness, "theorem", notes=notes)


# ----------------------------------------------------------------- spectral


def niven_check(c: float) -> bool:
    """True iff ``c`` lies within 1e-10 of a rational cosine at a rational multiple of π.

    >>> niven_check(0.5), niven_check(1 / 3)
    (True, False)
    """
    c = float(c)
    if not math.isfinite(c) or abs(c) > 1.0 + 1e-12:
        raise InputError(f"cosine must lie in [-1, 1], got {c!r}")
    return any(abs(c - v) <= ROOT_OF_UNITY_TOL for v in _NIVEN_VALUES)


def eigenphase_rationals(systems: Sequence[EigenSystem], q_max: int) -> list[EigenphaseRational]:
    """Rational reconstruction of every block eigenphase (continued fractions)."""
    out = []
    for sys_ in systems:
        ph = sys_.phases
        for j, lam in enumerate(sys_.eigenvalues):
            frac = Fraction(float(ph[j]) / (2 * math.pi)).limit_denominator(q_max)
            q = frac.denominator
            ok = abs(complex(lam) ** q - 1.0) <= ROOT_OF_UNITY_TOL
            out.append(EigenphaseRational(complex(lam), frac.numerator, q, ok, sys_.k, j))
    return out


def _rational_cosine(c: float) -> Optional[Fraction]:
    frac = Fraction(c).limit_denominator(COSINE_DENOMINATOR_MAX)
    return frac if abs(float(frac) - c) <= ROOT_OF_UNITY_TOL else None


def spectral_period(
    coin: CoinMatrix,
    n: int,
    q_max: int = 10_000,
    parallel: bool = False,
    systems: Optional[Sequence[EigenSystem]] = None,
) -> PeriodResult:
    """Period from the eigenphases of all Fourier blocks.

    Parameters
    ----------
    q_max : int
        Largest denominator tried for each phase ``φ/2π``.
    systems : sequence of EigenSystem, optional
        Precomputed block decompositions.

    Returns
    -------
    PeriodResult
        ``Finite(τ)`` after a final ``‖U^τ - I‖ ≤ 1e-8`` check;
        ``Aperiodic`` only with a Niven witness (a rational cosine with
        denominator ≤ 1000 outside ``{0, ±1/2, ±1}``); ``Unknown(q_max)``
        otherwise.
    """
    if q_max < 2:
        raise InputError(f"q_max must be >= 2, got {q_max}")
    _check_n(n)
    if systems is None:
        systems = block_spectra(coin, n, parallel=parallel)
    rats = eigenphase_rationals(systems, q_max)
    failed = [r for r in rats if not r.verified]

    if not failed:
        tau = math.lcm(*(r.q for r in rats))
        lam = np.array([r.lam for r in rats])
        if tau <= 1000:
            U = build_evolution(coin, n).matrix
            dev = float(np.abs(np.linalg.matrix_power(U, tau) - np.eye(6 * n)).max())
            how = "dense matrix power"
        else:
            dev = float(np.abs(lam**tau - 1.0).max())
            how = "eigenvalue powers"
        if dev <= PERIOD_TOL:
            return PeriodResult.finite(tau, "spectral", notes=(f"verified by {how} (max dev {dev:.3e})",))
        return PeriodResult.unknown(q_max, "spectral", notes=(f"lcm {tau} failed the {how} check (dev {dev:.3e})",))

    best: Optional[AperiodicWitness] = None
    for r in failed:
        c = min(1.0, max(-1.0, r.lam.real))
        cos_frac = _rational_cosine(c)
        if cos_frac is None or niven_check(c):
            continue
        if best is None or cos_frac.denominator < best.cosine.denominator:
            best = AperiodicWitness(r.lam, cos_frac, r.k, r.j)
    if best is not None:
        return PeriodResult.aperiodic(best, "spectral")
    return PeriodResult.unknown(q_max, "spectral", notes=(f"{len(failed)} eigenphases not rational with q <= {q_max}",))


# -------------------------------------------------------------------- brute


def _max_dev_from_identity(P: NDArray) -> float:
    return float(np.abs(P - np.eye(P.shape[0])).max())


def brute_force_period(
    coin: CoinMatrix,
    n: int,
    t_max: int,
    tol: float = PERIOD_TOL,
    mode: str = "matrix",
) -> PeriodResult:
    """Smallest ``t ≤ t_max`` with ``max |U^t - I| ≤ tol``.

    ``mode="matrix"`` multiplies the dense operator repeatedly.
    ``mode="eigen"`` screens every ``t`` through the eigenvalues of the dense
    operator (``|λ^t - 1| = 2|sin(tφ/2)|``) and confirms each candidate with an
    explicit matrix power.  Since ``max |A| ≤ ‖A‖₂ ≤ dim · max |A|``, the screen
    at ``tol · dim`` cannot miss a period.
    """
    if t_max < 1:
        raise InputError(f"t_max must be >= 1, got {t_max}")
    U = build_evolution(coin, n).matrix
    dim = U.shape[0]
    if mode == "matrix":
        P = U.copy()
        for t in range(1, t_max + 1):
            if _max_dev_from_identity(P) <= tol:
                return PeriodResult.finite(t, "brute")
            P = P @ U
        return PeriodResult.unknown(t_max, "brute")
    if mode != "eigen":
        raise InputError(f"mode must be 'matrix' or 'eigen', got {mode!r}")

    phi = np.angle(np.linalg.eigvals(U))
    chunk = max(1, 2_000_000 // dim)
    screen = tol * dim
    for start in range(1, t_max + 1, chunk):
        ts = np.arange(start, min(t_max, start + chunk - 1) + 1)
        dev = (2.0 * np.abs(np.sin(np.outer(ts, phi) / 2.0))).max(axis=1)
        for t in ts[dev <= screen]:
            if _max_dev_from_identity(np.linalg.matrix_power(U, int(t))) <= tol:
                return PeriodResult.finite(int(t), "brute", notes=("eigenvalue screen, matrix-confirmed",))
    return PeriodResult.unknown(t_max, "brute", notes=("eigenvalue screen",))


def _divisors(m: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(m) + 1) if m % d == 0]
    return sorted(set(small + [m // d for d in small]))


def verify_period(coin: CoinMatrix, n: int, tau: int, tol: float = PERIOD_TOL) -> bool:
    """``U^τ ≈ I`` and no proper divisor ``d`` of ``τ`` has ``U^d ≈ I``."""
    if tau < 1:
        raise InputError(f"tau must be positive, got {tau}")
    U = build_evolution(coin, n).matrix
    for d in _divisors(tau):
        ok = _max_dev_from_identity(np.linalg.matrix_power(U, d)) <= tol
        if d < tau and ok:
            return False
        if d == tau:
            return ok
    return False


# ------------------------------------------------------------- comparisons


@dataclass(frozen=True)
class TheoremComparison:
    """Theorem value next to the spectral and brute-force oracles at one ``(θ, n)``."""

    cls: CoinClass
    theta: float
    n: int
    theorem: PeriodResult
    spectral: PeriodResult
    brute: PeriodResult
    notes: tuple[str, ...] = field(default=())

    @property
    def oracles_agree(self) -> bool:
        return _same(self.spectral, self.brute)

    @property
    def theorem_agrees(self) -> bool:
        return _same(self.theorem, self.brute)


def _same(a: PeriodResult, b: PeriodResult) -> bool:
    if a.is_finite or b.is_finite:
        return a.is_finite and b.is_finite and a.tau == b.tau
    # aperiodic and unknown both mean "no period found"
    return True


def compare_with_theorem(
    cls: CoinClass | str,
    thetas: Iterable[float],
    ns: Iterable[int],
    t_max: int = 200,
    relabel_shift: Optional[float] = None,
) -> list[TheoremComparison]:
    """Tabulate theorem vs spectral vs brute force.

    With ``relabel_shift`` set, each row also notes the theorem value at
    ``θ + relabel_shift`` so that a shifted angle convention can be checked.
    """
    cls = CoinClass.parse(cls)
    rows = []
    ns = list(ns)
    for th in thetas:
        for n in ns:
            coin = coin_from_theta(cls, th)
            thm = theorem_period(cls, th, n)
            spec = spectral_period(coin, n)
            brute = brute_force_period(coin, n, t_max)
            notes = []
            if relabel_shift is not None:
                alt = theorem_period(cls, th + relabel_shift, n)
                notes.append(f"theorem at theta{relabel_shift:+.6g}: {alt}")
            rows.append(TheoremComparison(cls, normalize_theta(th), n, thm, spec, brute, tuple(notes)))
    return rows

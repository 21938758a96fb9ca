"""
Generalized Grover coins of order three.

The real orthogonal 3×3 matrices that are linear combinations of permutation
matrices split into four one-parameter families, labelled here ``X``, ``Y``,
``Z`` and ``W``.  Every member is *permutative*: each row is a permutation of
the first row ``(x, y, z)``.

=====  ====================  ==========================  =================
class  third entry ``z``     row layout                   admissible ``x``
=====  ====================  ==========================  =================
X      ``1 - x - y``         cyclic right shifts          ``[-1/3, 1]``
Y      ``-1 - x - y``        cyclic right shifts          ``[-1, 1/3]``
Z      ``1 - x - y``         cyclic left shifts           ``[-1/3, 1]``
W      ``-1 - x - y``        cyclic left shifts           ``[-1, 1/3]``
=====  ====================  ==========================  =================

The angle ``theta`` is the canonical parameter.  For ``X``/``Z``::

    x = (2 cos θ + 1) / 3,   y = (1 - cos θ) / 3 + sin θ / √3

and for ``Y``/``W``::

    x = (2 cos θ - 1) / 3,   y = -(1 + cos θ) / 3 + sin θ / √3

The Grover matrix is ``X`` at ``θ = π`` (``x = -1/3, y = 2/3``).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
from numpy.typing import NDArray

from .errors import ConstraintError, InputError, RangeError

__all__ = [
    "CoinClass",
    "CoinMatrix",
    "CoinClassification",
    "normalize_theta",
    "constraint_residual",
    "coin_from_theta",
    "coin_from_xy",
    "classify_coin",
    "grover_coin",
    "signed_permutation_angles",
    "coin_to_json",
    "coin_from_json",
]

SELF_CHECK_TOL = 1e-12
CONSTRAINT_TOL = 1e-10
_SQRT3 = math.sqrt(3.0)


class CoinClass(str, enum.Enum):
    X = "X"
    Y = "Y"
    Z = "Z"
    W = "W"

    @property
    def sign(self) -> int:
        """+1 for the classes whose rows sum to 1, -1 for those summing to -1."""
        return 1 if self in (CoinClass.X, CoinClass.Z) else -1

    @property
    def x_range(self) -> tuple[float, float]:
        return (-1.0 / 3.0, 1.0) if self.sign > 0 else (-1.0, 1.0 / 3.0)

    @classmethod
    def parse(cls, value: "CoinClass | str") -> "CoinClass":
        if isinstance(value, CoinClass):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            raise InputError(f"unknown coin class {value!r}; expected one of X, Y, Z, W") from None


def normalize_theta(theta: float) -> float:
    """Map an angle onto the half-open interval (-π, π]."""
    theta = float(theta)
    if not math.isfinite(theta):
        raise InputError(f"theta must be finite, got {theta!r}")
    t = math.remainder(theta, 2.0 * math.pi)  # in [-π, π]
    if t <= -math.pi:
        t += 2.0 * math.pi
    return t


def constraint_residual(cls: CoinClass | str, x: float, y: float) -> float:
    """Evaluate ``x² + y² + xy ∓ x ∓ y`` (minus signs for X/Z, plus for Y/W)."""
    s = CoinClass.parse(cls).sign
    return x * x + y * y + x * y - s * x - s * y


def _xy_from_theta(cls: CoinClass, theta: float) -> tuple[float, float]:
    c, s = math.cos(theta), math.sin(theta)
    if cls.sign > 0:
        return (2.0 * c + 1.0) / 3.0, (1.0 - c) / 3.0 + s / _SQRT3
    return (2.0 * c - 1.0) / 3.0, -(1.0 + c) / 3.0 + s / _SQRT3


def _theta_from_xy(cls: CoinClass, x: float, y: float) -> float:
    if cls.sign > 0:
        c = (3.0 * x - 1.0) / 2.0
        s = _SQRT3 * (y - (1.0 - c) / 3.0)
    else:
        c = (3.0 * x + 1.0) / 2.0
        s = _SQRT3 * (y + (1.0 + c) / 3.0)
    return normalize_theta(math.atan2(s, c))


def _assemble(cls: CoinClass, x: float, y: float) -> NDArray[np.float64]:
    z = cls.sign - x - y
    if cls in (CoinClass.X, CoinClass.Y):
        rows = [[x, y, z], [z, x, y], [y, z, x]]
    else:
        rows = [[x, y, z], [y, z, x], [z, x, y]]
    return np.array(rows, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class CoinMatrix:
    """A validated member of one of the four coin classes.

    Attributes
    ----------
    entries : ndarray, shape (3, 3)
        Real orthogonal matrix ``C = [c_ij]`` (read-only).
    cls : CoinClass
    x, y : float
        First-row parameters.
    theta : float or None
        Angle in (-π, π] if known.
    """

    entries: NDArray[np.float64]
    cls: CoinClass
    x: float
    y: float
    theta: Optional[float] = None

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.float64)
        if arr.shape != (3, 3):
            raise InputError(f"coin entries must be 3x3, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def z(self) -> float:
        return self.cls.sign - self.x - self.y

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype)

    def __repr__(self) -> str:
        th = "None" if self.theta is None else f"{self.theta:.6g}"
        return f"CoinMatrix(cls={self.cls.value}, x={self.x:.6g}, y={self.y:.6g}, theta={th})"

    def check(self, tol: float = SELF_CHECK_TOL) -> None:
        """Assert every structural invariant; raise :class:`InputError` otherwise."""
        C = self.entries
        orth = np.abs(C.T @ C - np.eye(3)).max()
        if orth > tol:
            raise InputError(f"coin is not orthogonal (max |CᵀC - I| = {orth:.3e})")
        template = _assemble(self.cls, self.x, self.y)
        dev = np.abs(template - C).max()
        if dev > tol:
            raise InputError(f"coin rows do not follow the {self.cls.value} template (dev {dev:.3e})")
        res = abs(constraint_residual(self.cls, self.x, self.y))
        if res > tol:
            raise InputError(f"constraint residual {res:.3e} exceeds {tol:g}")


def coin_from_theta(cls: CoinClass | str, theta: float) -> CoinMatrix:
    """Build the coin of class ``cls`` at angle ``theta`` (radians).

    >>> coin_from_theta("X", math.pi).entries.round(12).tolist()[0]
    [-0.333333333333, 0.666666666667, 0.666666666667]
    """
    cls = CoinClass.parse(cls)
    th = normalize_theta(theta)
    x, y = _xy_from_theta(cls, th)
    coin = CoinMatrix(_assemble(cls, x, y), cls, x, y, th)
    coin.check(SELF_CHECK_TOL)
    return coin


def coin_from_xy(cls: CoinClass | str, x: float, y: float) -> CoinMatrix:
    """Build a coin from its first-row parameters, validating (not projecting) them.

    Raises
    ------
    RangeError
        If ``x`` is outside the class interval.
    ConstraintError
        If ``|x² + y² + xy ∓ x ∓ y| > 1e-10``.
    """
    cls = CoinClass.parse(cls)
    x, y = float(x), float(y)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise InputError("x and y must be finite")
    lo, hi = cls.x_range
    if x < lo - CONSTRAINT_TOL or x > hi + CONSTRAINT_TOL:
        raise RangeError(f"x={x!r} outside [{lo:.6g}, {hi:.6g}] for class {cls.value}")
    res = constraint_residual(cls, x, y)
    if abs(res) > CONSTRAINT_TOL:
        raise ConstraintError(
            f"(x, y) = ({x!r}, {y!r}) violates the class {cls.value} constraint (residual {res:.6g})",
            residual=res,
        )
    coin = CoinMatrix(_assemble(cls, x, y), cls, x, y, _theta_from_xy(cls, x, y))
    coin.check(max(CONSTRAINT_TOL * 10, SELF_CHECK_TOL))
    return coin


def grover_coin() -> CoinMatrix:
    """The order-3 Grover matrix, i.e. class ``X`` at ``θ = π``."""
    return coin_from_theta(CoinClass.X, math.pi)


@dataclass(frozen=True)
class CoinClassification:
    orthogonal: bool
    permutative: bool
    signed_permutation: Optional[str]  # "PlusP", "MinusP" or None


def classify_coin(coin: CoinMatrix | NDArray, tol: float = SELF_CHECK_TOL) -> CoinClassification:
    """Inspect a coin entrywise: orthogonality, permutativity, ±permutation form."""
    C = np.asarray(coin, dtype=np.float64)
    orthogonal = bool(np.abs(C.T @ C - np.eye(3)).max() <= tol)

    first = np.sort(C[0])
    permutative = all(np.abs(np.sort(row) - first).max() <= tol for row in C[1:])

    signed = None
    near_zero = np.abs(C) <= tol
    nonzero_per_row = (~near_zero).sum(axis=1)
    nonzero_per_col = (~near_zero).sum(axis=0)
    if np.all(nonzero_per_row == 1) and np.all(nonzero_per_col == 1):
        vals = C[~near_zero]
        if np.all(np.abs(vals - 1.0) <= tol):
            signed = "PlusP"
        elif np.all(np.abs(vals + 1.0) <= tol):
            signed = "MinusP"
    return CoinClassification(orthogonal, permutative, signed)


def signed_permutation_angles(cls: CoinClass | str) -> tuple[float, ...]:
    """Angles in (-π, π] at which the class member is ``±P`` for a permutation ``P``."""
    cls = CoinClass.parse(cls)
    if cls.sign > 0:
        return (-2.0 * math.pi / 3.0, 0.0, 2.0 * math.pi / 3.0)
    return (-math.pi / 3.0, math.pi / 3.0, math.pi)


def coin_to_dict(coin: CoinMatrix) -> dict[str, Any]:
    return {
        "class": coin.cls.value,
        "theta": coin.theta,
        "x": coin.x,
        "y": coin.y,
        "entries": [[float(v) for v in row] for row in coin.entries],
    }


def coin_to_json(coin: CoinMatrix) -> str:
    """Serialize as ``{class, theta, x, y, entries}``; floats round-trip exactly."""
    return json.dumps(coin_to_dict(coin))


def coin_from_json(text: str) -> CoinMatrix:
    """Inverse of :func:`coin_to_json`; re-validates the parameters."""
    data = json.loads(text)
    cls = CoinClass.parse(data["class"])
    if data.get("theta") is not None:
        coin = coin_from_theta(cls, data["theta"])
        if abs(coin.x - data["x"]) > CONSTRAINT_TOL or abs(coin.y - data["y"]) > CONSTRAINT_TOL:
            raise InputError("theta is inconsistent with (x, y)")
    else:
        coin = coin_from_xy(cls, data["x"], data["y"])
    if "entries" in data and np.abs(np.asarray(data["entries"]) - coin.entries).max() > CONSTRAINT_TOL:
        raise InputError("entries are inconsistent with (x, y)")
    return coin

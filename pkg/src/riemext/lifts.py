"""Points and tangent vectors of the cotangent bundle, and lifts of base objects.

A tangent vector at ``(x, omega)`` is stored in the coordinate frame
``(d_1..d_n, d_1*..d_n*)`` as a horizontal part ``h`` and a vertical part ``v``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .manifold import LocalForm, LocalVector, OneFormSpec, VectorFieldSpec

__all__ = [
    "CotangentPoint",
    "LiftVector",
    "complete_lift_at",
    "vertical_lift_at",
    "liouville_at",
    "contracted_at",
    "evaluation_fn",
    "local_vector",
    "local_form",
]

VectorLike = Union[VectorFieldSpec, LocalVector]
FormLike = Union[OneFormSpec, LocalForm]


@dataclass(frozen=True)
class CotangentPoint:
    x: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "omega", np.asarray(self.omega, dtype=float))
        if self.x.shape != self.omega.shape or self.x.ndim != 1:
            raise ValueError("x and omega must be 1-d arrays of equal length")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def coords(self) -> np.ndarray:
        return np.concatenate([self.x, self.omega])


@dataclass(frozen=True)
class LiftVector:
    h: np.ndarray
    v: np.ndarray

    @classmethod
    def from_array(cls, arr) -> "LiftVector":
        arr = np.asarray(arr, dtype=float)
        n = arr.shape[0] // 2
        return cls(arr[:n].copy(), arr[n:].copy())

    @classmethod
    def zero(cls, n: int) -> "LiftVector":
        return cls(np.zeros(n), np.zeros(n))

    def array(self) -> np.ndarray:
        return np.concatenate([self.h, self.v])

    def __add__(self, other: "LiftVector") -> "LiftVector":
        return LiftVector(self.h + other.h, self.v + other.v)

    def __sub__(self, other: "LiftVector") -> "LiftVector":
        return LiftVector(self.h - other.h, self.v - other.v)

    def __neg__(self) -> "LiftVector":
        return LiftVector(-self.h, -self.v)

    def __mul__(self, c: float) -> "LiftVector":
        return LiftVector(c * self.h, c * self.v)

    __rmul__ = __mul__

    def __truediv__(self, c: float) -> "LiftVector":
        return LiftVector(self.h / c, self.v / c)


def local_vector(X: VectorLike, x) -> LocalVector:
    return X if isinstance(X, LocalVector) else X.at(x)


def local_form(alpha: FormLike, x) -> LocalForm:
    return alpha if isinstance(alpha, LocalForm) else alpha.at(x)


def complete_lift_at(X: VectorLike, p: CotangentPoint) -> LiftVector:
    """X^C = X^i d_i - omega_h (d_i X^h) d_i*."""
    X = local_vector(X, p.x)
    return LiftVector(X.val.copy(), -(p.omega @ X.d1))


def vertical_lift_at(alpha: FormLike, p: CotangentPoint) -> LiftVector:
    alpha = local_form(alpha, p.x)
    return LiftVector(np.zeros(p.n), alpha.val.copy())


def liouville_at(p: CotangentPoint) -> LiftVector:
    return LiftVector(np.zeros(p.n), p.omega.copy())


def contracted_at(T, p: CotangentPoint) -> LiftVector:
    """C(T): the vertical lift of the 1-form ``omega o T`` (``T[k, j]`` a (1,1)-tensor)."""
    T = np.asarray(T, dtype=float)
    return LiftVector(np.zeros(p.n), p.omega @ T)


def evaluation_fn(X: VectorLike, p: CotangentPoint) -> float:
    """X^V(x, omega) = omega(X_x)."""
    return float(p.omega @ local_vector(X, p.x).val)

"""Tensor calculus on the base chart: a torsion-free connection, its curvature,
and covariant derivatives of vector fields, 1-forms and function differentials.

Indices are 0-based internally.  Christoffel arrays are laid out as
``gamma[k, i, j]`` for the coefficient of ``d_k`` in ``nabla_{d_i} d_j``, and
curvature as ``R[l, i, j, k]`` with ``R(d_i, d_j) d_k = R[l, i, j, k] d_l``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .expr import Expression, Jet, eval_jet, eval_jet2, parse

__all__ = [
    "ConnectionSpec",
    "VectorFieldSpec",
    "OneFormSpec",
    "ScalarFieldSpec",
    "ConnectionJet",
    "LocalVector",
    "LocalForm",
    "CurvatureAtPoint",
    "CheckResult",
    "christoffel_at",
    "connection_jet",
    "connection_jets_on",
    "nabla_vf_at",
    "curvature_at",
    "check_parallel",
    "nabla_df_at",
    "catalog",
    "CATALOG_NAMES",
]

DEFAULT_TOL = 1e-9


def _parse_all(items: Sequence, n: int) -> tuple[Expression, ...]:
    return tuple(e if isinstance(e, Expression) else parse(str(e), n) for e in items)


@dataclass(frozen=True)
class ConnectionSpec:
    """Symmetric connection given by Christoffel expressions.

    ``gamma[k][i][j]`` holds the expression for the coefficient with upper
    index ``k``; entries with ``i > j`` are mirrors of ``(k, j, i)``.
    """

    n: int
    gamma: tuple

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("base dimension must be at least 2")

    @classmethod
    def from_entries(cls, n: int, entries: Mapping | None = None) -> "ConnectionSpec":
        """Build from ``{(k, i, j): expr}`` or ``{"k,i,j": expr}`` with 1-based indices.

        Missing entries are zero; giving both ``(k,i,j)`` and ``(k,j,i)`` with
        different expressions is an error.
        """
        zero = parse("0", n)
        table: dict[tuple[int, int, int], Expression] = {}
        for key, text in (entries or {}).items():
            k, i, j = _parse_key(key, n)
            e = text if isinstance(text, Expression) else parse(str(text), n)
            lo = (k, min(i, j), max(i, j))
            if lo in table and table[lo] != e:
                raise ValueError(f"conflicting symmetric entries for gamma{lo}")
            table[lo] = e
        gamma = tuple(
            tuple(tuple(table.get((k, min(i, j), max(i, j)), zero) for j in range(n)) for i in range(n))
            for k in range(n)
        )
        return cls(n, gamma)

    @classmethod
    def flat(cls, n: int) -> "ConnectionSpec":
        return cls.from_entries(n, {})

    def entries(self) -> dict[str, str]:
        """Nonzero entries with ``i <= j`` keyed ``"k,i,j"`` (1-based)."""
        out = {}
        for k in range(self.n):
            for i in range(self.n):
                for j in range(i, self.n):
                    e = self.gamma[k][i][j]
                    if not (e.is_constant() and e.ev(()) == 0.0):
                        out[f"{k + 1},{i + 1},{j + 1}"] = e.to_string()
        return out


def _parse_key(key, n: int) -> tuple[int, int, int]:
    if isinstance(key, str):
        parts = key.replace(" ", "").split(",")
        if len(parts) != 3:
            raise ValueError(f"gamma key {key!r} must have the form 'k,i,j'")
        try:
            idx = tuple(int(p) for p in parts)
        except ValueError:
            raise ValueError(f"gamma key {key!r} is not a triple of integers") from None
    else:
        idx = tuple(int(p) for p in key)
    if len(idx) != 3 or not all(1 <= v <= n for v in idx):
        raise ValueError(f"gamma key {key!r} out of range 1..{n}")
    return idx[0] - 1, idx[1] - 1, idx[2] - 1


@dataclass(frozen=True)
class VectorFieldSpec:
    components: tuple

    @classmethod
    def parse(cls, items: Sequence, n: int) -> "VectorFieldSpec":
        if len(items) != n:
            raise ValueError(f"expected {n} components, got {len(items)}")
        return cls(_parse_all(items, n))

    @classmethod
    def coordinate(cls, k: int, n: int) -> "VectorFieldSpec":
        """The coordinate field d_k (1-based)."""
        return cls.parse(["1" if i == k - 1 else "0" for i in range(n)], n)

    @property
    def n(self) -> int:
        return len(self.components)

    def at(self, x: Sequence[float]) -> "LocalVector":
        jets = [eval_jet2(e, x) for e in self.components]
        return LocalVector(
            np.array([j.value for j in jets]),
            np.array([j.grad for j in jets]),
            np.array([j.hess for j in jets]),
        )


@dataclass(frozen=True)
class OneFormSpec:
    components: tuple

    @classmethod
    def parse(cls, items: Sequence, n: int) -> "OneFormSpec":
        if len(items) != n:
            raise ValueError(f"expected {n} components, got {len(items)}")
        return cls(_parse_all(items, n))

    @property
    def n(self) -> int:
        return len(self.components)

    def at(self, x: Sequence[float]) -> "LocalForm":
        jets = [eval_jet2(e, x) for e in self.components]
        return LocalForm(
            np.array([j.value for j in jets]),
            np.array([j.grad for j in jets]),
            np.array([j.hess for j in jets]),
        )


@dataclass(frozen=True)
class ScalarFieldSpec:
    expr: Expression

    @classmethod
    def parse(cls, text, n: int) -> "ScalarFieldSpec":
        return cls(text if isinstance(text, Expression) else parse(str(text), n))

    def at(self, x: Sequence[float]) -> Jet:
        return eval_jet2(self.expr, x)

    def differential(self, n: int) -> "_DifferentialSpec":
        return _DifferentialSpec(self, n)


@dataclass(frozen=True)
class _DifferentialSpec:
    """df as a 1-form; its 2-jet needs third derivatives, which are not tracked."""

    f: ScalarFieldSpec
    n: int

    def at(self, x):
        j = self.f.at(x)
        return LocalForm(j.grad.copy(), j.hess.copy(), None)


# --------------------------------------------------------------------------
# Pointwise jets of fields


@dataclass(frozen=True)
class LocalVector:
    """2-jet of a vector field at a point.

    ``d1[k, i] = d_i X^k`` and ``d2[k, i, j] = d_i d_j X^k``; ``d2`` may be
    ``None`` for fields produced by operations that lose a derivative.
    """

    val: np.ndarray
    d1: np.ndarray
    d2: np.ndarray | None = None

    @classmethod
    def constant(cls, val) -> "LocalVector":
        val = np.asarray(val, dtype=float)
        n = val.shape[0]
        return cls(val, np.zeros((n, n)), np.zeros((n, n, n)))

    def __add__(self, other: "LocalVector") -> "LocalVector":
        d2 = None if self.d2 is None or other.d2 is None else self.d2 + other.d2
        return LocalVector(self.val + other.val, self.d1 + other.d1, d2)

    def scale(self, c: float) -> "LocalVector":
        return LocalVector(c * self.val, c * self.d1, None if self.d2 is None else c * self.d2)


@dataclass(frozen=True)
class LocalForm:
    """2-jet of a 1-form: ``d1[i, j] = d_j alpha_i``, ``d2[i, j, k] = d_j d_k alpha_i``."""

    val: np.ndarray
    d1: np.ndarray
    d2: np.ndarray | None = None

    @classmethod
    def constant(cls, val) -> "LocalForm":
        val = np.asarray(val, dtype=float)
        n = val.shape[0]
        return cls(val, np.zeros((n, n)), np.zeros((n, n, n)))

    def __add__(self, other: "LocalForm") -> "LocalForm":
        d2 = None if self.d2 is None or other.d2 is None else self.d2 + other.d2
        return LocalForm(self.val + other.val, self.d1 + other.d1, d2)

    def scale(self, c: float) -> "LocalForm":
        return LocalForm(c * self.val, c * self.d1, None if self.d2 is None else c * self.d2)


@dataclass(frozen=True)
class ConnectionJet:
    """Christoffel symbols at a point with first and second derivatives.

    ``gamma[k, i, j]``, ``dgamma[k, i, j, m] = d_m gamma[k, i, j]``,
    ``d2gamma[k, i, j, m, l]``.
    """

    gamma: np.ndarray
    dgamma: np.ndarray
    d2gamma: np.ndarray

    @property
    def n(self) -> int:
        return self.gamma.shape[0]

    # -- covariant derivatives -------------------------------------------

    def nabla(self, X: LocalVector) -> np.ndarray:
        """Matrix of the (1,1)-tensor nabla X: ``T[k, j] = (nabla_{d_j} X)^k``."""
        return X.d1 + np.einsum("kjm,m->kj", self.gamma, X.val)

    def nabla_d1(self, X: LocalVector) -> np.ndarray:
        """``d_i`` of ``nabla(X)[k, j]``, laid out ``[k, j, i]``."""
        if X.d2 is None:
            raise ValueError("second derivatives of the field are required")
        return (
            X.d2
            + np.einsum("kjmi,m->kji", self.dgamma, X.val)
            + np.einsum("kjm,mi->kji", self.gamma, X.d1)
        )

    def covariant(self, X: LocalVector, Y: LocalVector) -> LocalVector:
        """nabla_X Y with its first derivatives."""
        T = self.nabla(Y)
        dT = self.nabla_d1(Y)
        val = T @ X.val
        d1 = np.einsum("kj,ji->ki", T, X.d1) + np.einsum("kji,j->ki", dT, X.val)
        return LocalVector(val, d1, None)

    def bracket(self, X: LocalVector, Y: LocalVector) -> LocalVector:
        """Lie bracket [X, Y] with its first derivatives."""
        val = Y.d1 @ X.val - X.d1 @ Y.val
        d1 = None
        if X.d2 is not None and Y.d2 is not None:
            d1 = (
                np.einsum("kij,i->kj", Y.d2, X.val)
                + np.einsum("ki,ij->kj", Y.d1, X.d1)
                - np.einsum("kij,i->kj", X.d2, Y.val)
                - np.einsum("ki,ij->kj", X.d1, Y.d1)
            )
        return LocalVector(val, d1 if d1 is not None else np.full((self.n, self.n), np.nan), None)

    def covariant_form(self, X: LocalVector, alpha: LocalForm) -> np.ndarray:
        """Value of nabla_X alpha: ``(nabla_X alpha)_j = X^i d_i alpha_j - gamma[m,i,j] X^i alpha_m``."""
        return alpha.d1 @ X.val - np.einsum("mij,i,m->j", self.gamma, X.val, alpha.val)

    def nabla_form(self, alpha: LocalForm) -> np.ndarray:
        """``(nabla_{d_i} alpha)_j`` laid out ``[i, j]``."""
        return alpha.d1.T - np.einsum("mij,m->ij", self.gamma, alpha.val)

    def curvature(self) -> "CurvatureAtPoint":
        g, dg = self.gamma, self.dgamma
        R = (
            np.einsum("ljki->lijk", dg)
            - np.einsum("likj->lijk", dg)
            + np.einsum("lim,mjk->lijk", g, g)
            - np.einsum("ljm,mik->lijk", g, g)
        )
        return CurvatureAtPoint(R)


@dataclass(frozen=True)
class CurvatureAtPoint:
    R: np.ndarray

    def apply(self, X, Y, Z) -> np.ndarray:
        """R(X, Y) Z as a vector."""
        return np.einsum("lijk,i,j,k->l", self.R, X, Y, Z)

    def bianchi_residual(self) -> float:
        cyc = self.R + np.einsum("lijk->ljki", self.R) + np.einsum("lijk->lkij", self.R)
        return float(np.max(np.abs(cyc)))

    def antisymmetry_residual(self) -> float:
        return float(np.max(np.abs(self.R + np.swapaxes(self.R, 1, 2))))

    def is_zero(self, tol: float = DEFAULT_TOL) -> bool:
        return bool(np.max(np.abs(self.R)) <= tol)


# --------------------------------------------------------------------------
# Operations


def connection_jet(c: ConnectionSpec, x: Sequence[float]) -> ConnectionJet:
    n = c.n
    gamma = np.zeros((n, n, n))
    dgamma = np.zeros((n, n, n, n))
    d2gamma = np.zeros((n, n, n, n, n))
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                jet = eval_jet2(c.gamma[k][i][j], x)
                for a, b in ((i, j), (j, i)):
                    gamma[k, a, b] = jet.value
                    dgamma[k, a, b] = jet.grad
                    d2gamma[k, a, b] = jet.hess
    return ConnectionJet(gamma, dgamma, d2gamma)


def connection_jets_on(c: ConnectionSpec, seeds: Sequence[Jet]) -> np.ndarray:
    """Christoffel symbols as jets in the variables behind ``seeds`` (object array)."""
    n = c.n
    out = np.empty((n, n, n), dtype=object)
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                out[k, i, j] = out[k, j, i] = eval_jet(c.gamma[k][i][j], seeds)
    return out


def christoffel_at(c: ConnectionSpec, x: Sequence[float]) -> np.ndarray:
    return connection_jet(c, x).gamma


def nabla_vf_at(c: ConnectionSpec, X: VectorFieldSpec, x: Sequence[float]) -> np.ndarray:
    """``M[i, j] = (nabla_{d_j} X)^i``."""
    return connection_jet(c, x).nabla(X.at(x))


def curvature_at(c: ConnectionSpec, x: Sequence[float]) -> CurvatureAtPoint:
    return connection_jet(c, x).curvature()


def nabla_df_at(c: ConnectionSpec, f: ScalarFieldSpec, x: Sequence[float]) -> np.ndarray:
    """``H[i, j] = d_i d_j f - gamma[m, i, j] d_m f``; symmetric for torsion-free connections."""
    jet = f.at(x)
    H = jet.hess - np.einsum("mij,m->ij", christoffel_at(c, x), jet.grad)
    return 0.5 * (H + H.T)


@dataclass
class CheckResult:
    """Outcome of one residual-based check."""

    name: str
    anchor: str
    max_residual: float
    tol: float
    passed: bool
    details: dict = field(default_factory=dict)

    @classmethod
    def at_most(cls, name: str, anchor: str, residuals: Iterable[float], tol: float, **details):
        r = max((float(v) for v in residuals), default=0.0)
        return cls(name, anchor, r, tol, bool(r <= tol), dict(details))

    @classmethod
    def at_least(cls, name: str, anchor: str, values: Iterable[float], bound: float, **details):
        """Passes when every value is at least ``bound`` (records the minimum)."""
        r = min((float(v) for v in values), default=0.0)
        return cls(name, anchor, r, bound, bool(r >= bound), dict(details, comparison=">="))


def check_parallel(
    c: ConnectionSpec, xi: VectorFieldSpec, pts: Sequence[Sequence[float]], tol: float = DEFAULT_TOL
) -> CheckResult:
    if len(pts) == 0:
        raise ValueError("need at least one sample point")
    res = [float(np.max(np.abs(nabla_vf_at(c, xi, x)))) for x in pts]
    return CheckResult.at_most("xi parallel", "nabla xi = 0", res, tol, points=len(pts))


# --------------------------------------------------------------------------
# Example catalog


@dataclass(frozen=True)
class Example:
    name: str
    connection: ConnectionSpec
    xi: VectorFieldSpec

    @property
    def n(self) -> int:
        return self.connection.n


def _example(name: str, n: int, entries: dict, xi_index: int) -> Example:
    return Example(name, ConnectionSpec.from_entries(n, entries), VectorFieldSpec.coordinate(xi_index, n))


CATALOG_NAMES = ("FLAT2", "POLY2", "PROD3")


def catalog(name: str) -> Example:
    """Bundled examples: flat plane, a non-flat plane and a non-flat 3-space."""
    if name == "FLAT2":
        return _example(name, 2, {}, 1)
    if name == "POLY2":
        return _example(name, 2, {"1,1,1": "x2"}, 2)
    if name == "PROD3":
        return _example(name, 3, {"2,2,2": "x3"}, 1)
    raise KeyError(f"unknown example {name!r}; choose from {', '.join(CATALOG_NAMES)}")

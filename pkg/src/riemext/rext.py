"""The natural Riemann extension on the cotangent bundle and its Levi-Civita connection.

Two routes to the connection are provided:

* :func:`lc_lifts` evaluates the closed formulas for covariant derivatives of
  complete lifts, vertical lifts and the Liouville field;
* :func:`lc_coords` computes Christoffel symbols of the ``2n x 2n`` coordinate
  metric from its exact first derivatives.

The second exists to audit the first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import Jet, seed_jets
from .lifts import (
    CotangentPoint,
    LiftVector,
    complete_lift_at,
    contracted_at,
    liouville_at,
    local_form,
    local_vector,
    vertical_lift_at,
)
from .manifold import ConnectionSpec, LocalForm, VectorFieldSpec, connection_jet, connection_jets_on

__all__ = [
    "RExtParams",
    "MetricAtPoint",
    "DegenerateMetricError",
    "metric_at",
    "metric_matrix",
    "signature",
    "lc_lifts",
    "lc_coords",
    "LC_CASES",
    "tstar_seeds",
    "jet_values",
    "jet_grads",
    "lc_two_route_residual",
    "lift_identities_residual",
]


class DegenerateMetricError(ValueError):
    """The metric is (numerically) singular at a sample point."""


@dataclass(frozen=True)
class RExtParams:
    a: float
    b: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"parameter a must be positive, got {self.a!r}")

    @property
    def proper(self) -> bool:
        return self.b != 0.0


@dataclass(frozen=True)
class MetricAtPoint:
    """Metric components in the frame ``(d_1..d_n, d_1*..d_n*)``."""

    G: np.ndarray

    @property
    def n(self) -> int:
        return self.G.shape[0] // 2

    def pair(self, U: LiftVector, V: LiftVector) -> float:
        return float(U.array() @ self.G @ V.array())

    def inverse(self) -> np.ndarray:
        _check_nondegenerate(self.G)
        return np.linalg.inv(self.G)


def metric_matrix(gamma, omega, a: float, b: float):
    """Metric components from Christoffel symbols and covector components.

    Works on float arrays and on object arrays of :class:`~riemext.expr.Jet`.
    """
    n = len(omega)
    obj = isinstance(gamma, np.ndarray) and gamma.dtype == object
    G = np.empty((2 * n, 2 * n), dtype=object if obj else float)
    for i in range(n):
        for j in range(n):
            s = b * (omega[i] * omega[j])
            for k in range(n):
                s = s - 2.0 * a * (omega[k] * gamma[k, i, j])
            G[i, j] = s
            G[i, n + j] = G[n + j, i] = a if i == j else 0.0
            G[n + i, n + j] = 0.0
    return G


def metric_at(c: ConnectionSpec, prm: RExtParams, p: CotangentPoint) -> MetricAtPoint:
    gamma = connection_jet(c, p.x).gamma
    return MetricAtPoint(metric_matrix(gamma, p.omega, prm.a, prm.b))


def _check_nondegenerate(G: np.ndarray, rel: float = 1e-12) -> None:
    scale = max(1.0, float(np.max(np.abs(G))))
    sv = np.linalg.svd(G, compute_uv=False)
    if sv[-1] <= rel * scale:
        raise DegenerateMetricError(f"metric is singular (smallest singular value {sv[-1]:.3e})")


def signature(m: MetricAtPoint | np.ndarray) -> tuple[int, int]:
    """Numbers of positive and negative eigenvalues."""
    G = m.G if isinstance(m, MetricAtPoint) else np.asarray(m, dtype=float)
    _check_nondegenerate(G)
    ev = np.linalg.eigvalsh(0.5 * (G + G.T))
    return int(np.sum(ev > 0)), int(np.sum(ev < 0))


# --------------------------------------------------------------------------
# Levi-Civita connection from lifted formulas

LC_CASES = ("CC", "CV", "VC", "VV", "CW", "VW", "WW")


def lc_lifts(
    c: ConnectionSpec,
    prm: RExtParams,
    case: str,
    p: CotangentPoint,
    X=None,
    Y=None,
    alpha=None,
    beta=None,
) -> LiftVector:
    """Covariant derivative of lifted fields.

    ``case`` names the pair (direction, field): ``C`` a complete lift, ``V`` a
    vertical lift of a 1-form, ``W`` the Liouville field.  Directions use ``X``
    or ``alpha``; fields use ``Y`` or ``beta``.
    """
    if case not in LC_CASES:
        raise ValueError(f"unknown case {case!r}; expected one of {LC_CASES}")
    a, b = prm.a, prm.b
    om = p.omega
    W = liouville_at(p)
    if case == "VV":
        return LiftVector.zero(p.n)
    if case == "VW":
        return vertical_lift_at(local_form(alpha, p.x), p)
    if case == "WW":
        return W
    cj = connection_jet(c, p.x)
    if case == "CW":
        X = local_vector(X, p.x)
        return -contracted_at(cj.nabla(X), p) + (b / a) * (om @ X.val) * W
    if case == "CV":
        X = local_vector(X, p.x)
        beta = local_form(beta, p.x)
        nb = LiftVector(np.zeros(p.n), cj.covariant_form(X, beta))
        return nb + (b / (2 * a)) * ((om @ X.val) * vertical_lift_at(beta, p) + (beta.val @ X.val) * W)
    if case == "VC":
        Y = local_vector(Y, p.x)
        alpha = local_form(alpha, p.x)
        i_alpha = LiftVector(np.zeros(p.n), alpha.val @ cj.nabla(Y))
        return -i_alpha + (b / (2 * a)) * ((om @ Y.val) * vertical_lift_at(alpha, p) + (alpha.val @ Y.val) * W)

    # case CC
    X = local_vector(X, p.x)
    Y = local_vector(Y, p.x)
    TX, TY = cj.nabla(X), cj.nabla(Y)
    R = cj.curvature().R
    nXY = cj.covariant(X, Y)
    nYX_val = TX @ Y.val
    wX, wY = om @ X.val, om @ Y.val
    # (R(., X) Y)[l, a] = R(d_a, X) Y
    RXY = np.einsum("labc,b,c->la", R, X.val, Y.val)
    RYX = np.einsum("labc,b,c->la", R, Y.val, X.val)
    out = (
        complete_lift_at(nXY, p)
        + contracted_at(TX @ TY + TY @ TX, p)
        + contracted_at(RXY + RYX, p)
    )
    corr = (
        wY * complete_lift_at(X, p)
        + wX * complete_lift_at(Y, p)
        + 2 * wY * contracted_at(TX, p)
        + 2 * wX * contracted_at(TY, p)
        + (om @ (nXY.val + nYX_val)) * W
    )
    return out - (b / (2 * a)) * corr + (b**2 / a**2) * wX * wY * W


# --------------------------------------------------------------------------
# Levi-Civita connection from coordinates


def tstar_seeds(p: CotangentPoint) -> tuple[list[Jet], list[Jet]]:
    """Jets of the coordinates ``x^i`` and ``omega_i`` in the 2n bundle variables."""
    m = 2 * p.n
    return seed_jets(p.x, m, 0), seed_jets(p.omega, m, p.n)


def jet_values(arr: np.ndarray) -> np.ndarray:
    return np.vectorize(lambda j: j.value if isinstance(j, Jet) else float(j), otypes=[float])(arr)


def jet_grads(arr: np.ndarray, m: int) -> np.ndarray:
    """Stack gradients: result has shape ``arr.shape + (m,)``."""
    out = np.zeros(arr.shape + (m,))
    for idx, j in np.ndenumerate(arr):
        if isinstance(j, Jet):
            out[idx] = j.grad
    return out


def metric_jets(c: ConnectionSpec, prm: RExtParams, p: CotangentPoint) -> np.ndarray:
    xs, ws = tstar_seeds(p)
    gamma = connection_jets_on(c, xs)
    return metric_matrix(gamma, np.array(ws, dtype=object), prm.a, prm.b)


def lc_coords(c: ConnectionSpec, prm: RExtParams, p: CotangentPoint) -> np.ndarray:
    """Christoffel symbols ``Gbar[A, B, C]`` of the bundle metric (Koszul formula)."""
    Gj = metric_jets(c, prm, p)
    G = jet_values(Gj)
    _check_nondegenerate(G)
    dG = jet_grads(Gj, 2 * p.n)  # dG[A, B, C] = d_C G_AB
    Ginv = np.linalg.inv(G)
    lower = 0.5 * (np.einsum("dcb->dbc", dG) + dG - np.einsum("bcd->dbc", dG))
    return np.einsum("ad,dbc->abc", Ginv, lower)


def metric_derivatives(c: ConnectionSpec, prm: RExtParams, p: CotangentPoint) -> np.ndarray:
    """``dG[A, B, C] = d_C G_AB``."""
    return jet_grads(metric_jets(c, prm, p), 2 * p.n)


def lc_two_route_residual(c: ConnectionSpec, prm: RExtParams, p: CotangentPoint) -> float:
    """Largest gap between :func:`lc_lifts` and :func:`lc_coords` on coordinate lifts.

    Coordinate lifts are ``(d_i)^C = d_i`` and ``(dx^j)^V = d_j*``; for the
    Liouville field ``W = omega_k d_k*`` the coordinate route adds the
    derivative of its components.
    """
    n = p.n
    Gb = lc_coords(c, prm, p)
    om = p.omega
    E = np.eye(n)
    worst = 0.0

    def gap(u: LiftVector, ref) -> None:
        nonlocal worst
        worst = max(worst, float(np.max(np.abs(u.array() - ref))))

    e_v = [np.concatenate([np.zeros(n), E[k]]) for k in range(n)]
    W_coords = [Gb[:, B, n:] @ om for B in range(2 * n)]
    for i in range(n):
        Xi = VectorFieldSpec.coordinate(i + 1, n)
        ai = LocalForm.constant(E[i])
        for j in range(n):
            Yj = VectorFieldSpec.coordinate(j + 1, n)
            bj = LocalForm.constant(E[j])
            gap(lc_lifts(c, prm, "CC", p, X=Xi, Y=Yj), Gb[:, i, j])
            gap(lc_lifts(c, prm, "CV", p, X=Xi, beta=bj), Gb[:, i, n + j])
            gap(lc_lifts(c, prm, "VC", p, alpha=ai, Y=Yj), Gb[:, n + i, j])
            gap(lc_lifts(c, prm, "VV", p, alpha=ai, beta=bj), Gb[:, n + i, n + j])
        gap(lc_lifts(c, prm, "CW", p, X=Xi), W_coords[i])
        gap(lc_lifts(c, prm, "VW", p, alpha=ai), e_v[i] + W_coords[n + i])
    ww = sum(om[k] * (e_v[k] + W_coords[n + k]) for k in range(n))
    gap(lc_lifts(c, prm, "WW", p), ww)
    return worst


def lift_identities_residual(
    c: ConnectionSpec, prm: RExtParams, p: CotangentPoint, X, T1, T2, alpha
) -> float:
    """Pairings of lifts under the metric: ``g(X^C, C(T)) = a omega(T X)`` and
    the vanishing pairings among ``W``, vertical lifts and contracted fields."""
    g = metric_at(c, prm, p)
    XC = complete_lift_at(X, p)
    C1, C2 = contracted_at(T1, p), contracted_at(T2, p)
    W = liouville_at(p)
    aV = vertical_lift_at(alpha, p)
    Xv = local_vector(X, p.x).val
    res = [
        g.pair(XC, C1) - prm.a * float(p.omega @ (np.asarray(T1) @ Xv)),
        g.pair(W, aV),
        g.pair(W, W),
        g.pair(W, C1),
        g.pair(C1, C2),
    ]
    return float(np.max(np.abs(res)))

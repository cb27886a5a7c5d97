"""The almost para-complex structure P on the cotangent bundle and its invariants.

``P`` acts on complete lifts by ``X^C + 2 C(nabla X) - (b/a) X^V W`` and on
vertical lifts by ``-1``; with ``b = 0`` this is the structure paired with the
classical (non-proper) extension.  The tensor ``Fbar(X, Y, Z) = g((nabla_X P) Y, Z)``
is computed from the lifted connection formulas and from a closed curvature
expression, and the harmonicity trace ``delta P`` from coordinate Christoffels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

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
from .manifold import DEFAULT_TOL, CheckResult, ConnectionSpec, LocalForm, connection_jet, connection_jets_on
from .rext import (
    RExtParams,
    _check_nondegenerate,
    jet_grads,
    jet_values,
    lc_coords,
    lc_lifts,
    metric_at,
    tstar_seeds,
)

__all__ = [
    "EndoAtPoint",
    "Lift",
    "C",
    "V",
    "p_at",
    "p_matrix",
    "check_apH",
    "fundamental_form",
    "fbar_direct",
    "fbar_closed",
    "fbar_tensor",
    "fbar_coords",
    "p_jets",
    "cyclic_check",
    "delta_p",
]


@dataclass(frozen=True)
class EndoAtPoint:
    Pmat: np.ndarray

    def apply(self, U: LiftVector) -> LiftVector:
        return LiftVector.from_array(self.Pmat @ U.array())

    def eigenranks(self, tol: float = 1e-8) -> tuple[int, int]:
        """Dimensions of the +1 and -1 eigenspaces."""
        m = self.Pmat.shape[0]
        I = np.eye(m)
        return (
            m - np.linalg.matrix_rank(self.Pmat - I, tol=tol),
            m - np.linalg.matrix_rank(self.Pmat + I, tol=tol),
        )


@dataclass(frozen=True)
class Lift:
    """A lifted base object used as an argument: ``kind`` is ``"C"`` or ``"V"``."""

    kind: str
    field: object

    def at(self, p: CotangentPoint) -> LiftVector:
        if self.kind == "C":
            return complete_lift_at(self.field, p)
        return vertical_lift_at(self.field, p)


def C(X) -> Lift:
    return Lift("C", X)


def V(alpha) -> Lift:
    return Lift("V", alpha)


def p_matrix(gamma, omega, a: float, b: float):
    """Matrix of P in the coordinate frame (float or jet entries).

    Column ``i`` is ``P(d_i)``: horizontal part ``e_i``, vertical part
    ``2 omega_k gamma[k, j, i] - (b/a) omega_i omega_j``; ``P(d_i*) = -d_i*``.
    """
    n = len(omega)
    obj = isinstance(gamma, np.ndarray) and gamma.dtype == object
    P = np.zeros((2 * n, 2 * n), dtype=object if obj else float)
    if obj:
        P[:] = 0.0
    for i in range(n):
        P[i, i] = 1.0
        P[n + i, n + i] = -1.0
        for j in range(n):
            s = -(b / a) * (omega[i] * omega[j])
            for k in range(n):
                s = s + 2.0 * (omega[k] * gamma[k, j, i])
            P[n + j, i] = s
    return P


def p_at(c: ConnectionSpec, prm: RExtParams, p: CotangentPoint) -> EndoAtPoint:
    """P at a point, assembled column by column from its action on d_i^C and d_i*."""
    n = p.n
    cj = connection_jet(c, p.x)
    W = liouville_at(p)
    cols = []
    for i in range(n):
        # nabla(d_i) has matrix gamma[:, :, i]
        col = LiftVector(np.eye(n)[i], np.zeros(n)) + 2 * contracted_at(cj.gamma[:, :, i], p)
        cols.append(col - (prm.b / prm.a) * p.omega[i] * W)
    for i in range(n):
        cols.append(LiftVector(np.zeros(n), -np.eye(n)[i]))
    return EndoAtPoint(np.column_stack([u.array() for u in cols]))


def check_apH(
    c: ConnectionSpec,
    prm: RExtParams,
    pts: Sequence[CotangentPoint],
    tol: float = DEFAULT_TOL,
    corrupt=None,
) -> CheckResult:
    """Almost para-Hermitian axioms: P^2 = Id, equal eigenranks, anti-isometry.

    ``corrupt`` optionally maps the P matrix before checking (negative controls).
    """
    worst = 0.0
    ranks_ok = True
    for p in pts:
        P = p_at(c, prm, p).Pmat
        if corrupt is not None:
            P = corrupt(P)
        G = metric_at(c, prm, p).G
        m = P.shape[0]
        r_sq = np.max(np.abs(P @ P - np.eye(m)))
        r_iso = np.max(np.abs(P.T @ G @ P + G))
        worst = max(worst, float(r_sq), float(r_iso))
        if EndoAtPoint(P).eigenranks() != (m // 2, m // 2):
            ranks_ok = False
    passed = worst <= tol and ranks_ok
    return CheckResult("almost para-Hermitian", "P^2 = Id, g(PU, PV) = -g(U, V)", worst, tol, passed, {"eigenranks_equal": ranks_ok})


def fundamental_form(c: ConnectionSpec, prm: RExtParams, p: CotangentPoint) -> np.ndarray:
    """Omega(U, V) = g(U, P V) as a matrix."""
    return metric_at(c, prm, p).G @ p_at(c, prm, p).Pmat


# --------------------------------------------------------------------------
# Fbar


def _lc(c, prm, p, U: Lift, target) -> LiftVector:
    """Covariant derivative along lift U of a lift or of W (``target == "W"``)."""
    if target == "W":
        return lc_lifts(c, prm, U.kind + "W", p, X=U.field, alpha=U.field)
    return lc_lifts(
        c, prm, U.kind + target.kind, p, X=U.field, alpha=U.field, Y=target.field, beta=target.field
    )


def _derive_eval(cj, U: Lift, Yloc, p: CotangentPoint) -> float:
    """U(Y^V) for the evaluation function of Y: omega([X, Y]) or alpha(Y)."""
    if U.kind == "C":
        return float(p.omega @ cj.bracket(local_vector(U.field, p.x), Yloc).val)
    return float(local_form(U.field, p.x).val @ Yloc.val)


def _nabla_P_lift(c, prm, p: CotangentPoint, U: Lift, Vl: Lift) -> LiftVector:
    """(nabla_U P) V = nabla_U (P V) - P (nabla_U V) through the lift algebra."""
    P = p_at(c, prm, p)
    base = _lc(c, prm, p, U, Vl)
    if Vl.kind == "V":
        return -base - P.apply(base)
    a, b = prm.a, prm.b
    n = p.n
    cj = connection_jet(c, p.x)
    Y = local_vector(Vl.field, p.x)
    T = cj.nabla(Y)
    dT = cj.nabla_d1(Y)
    # C(nabla Y) = sum_k omega_k (theta^k)^V with theta^k the k-th row of nabla Y
    nCT = LiftVector.zero(n)
    for k in range(n):
        theta = LocalForm(T[k].copy(), dT[k].copy())
        if U.kind == "C":
            dom = -float(p.omega @ local_vector(U.field, p.x).d1[:, k])
        else:
            dom = float(local_form(U.field, p.x).val[k])
        nCT = nCT + dom * vertical_lift_at(theta, p) + p.omega[k] * _lc(c, prm, p, U, V(theta))
    # Y^V W
    nYW = _derive_eval(cj, U, Y, p) * liouville_at(p) + float(p.omega @ Y.val) * _lc(c, prm, p, U, "W")
    nPV = base + 2 * nCT - (b / a) * nYW
    return nPV - P.apply(base)


def fbar_direct(c: ConnectionSpec, prm: RExtParams, p: CotangentPoint, X: Lift, Y: Lift, Z: Lift) -> float:
    g = metric_at(c, prm, p)
    return g.pair(_nabla_P_lift(c, prm, p, X, Y), Z.at(p))


def fbar_tensor(c: ConnectionSpec, prm: RExtParams, p: CotangentPoint) -> np.ndarray:
    """Fbar on arbitrary tangent vectors: ``F[A, B, C]`` in the coordinate frame.

    Only horizontal parts contribute: ``2a omega(R(Z_h, Y_h) X_h)``.
    """
    n = p.n
    R = connection_jet(c, p.x).curvature().R
    # F(X, Y, Z) = 2a omega_l R[l, z, y, x] X^x Y^y Z^z
    Fh = 2 * prm.a * np.einsum("l,lzyx->xyz", p.omega, R)
    F = np.zeros((2 * n, 2 * n, 2 * n))
    F[:n, :n, :n] = Fh
    return F


def fbar_closed(c: ConnectionSpec, prm: RExtParams, p: CotangentPoint, X: Lift, Y: Lift, Z: Lift) -> float:
    if not (X.kind == Y.kind == Z.kind == "C"):
        return 0.0
    u, v, w = (local_vector(L.field, p.x).val for L in (X, Y, Z))
    R = connection_jet(c, p.x).curvature()
    return float(2 * prm.a * (p.omega @ R.apply(w, v, u)))


def fbar_coords(c: ConnectionSpec, prm: RExtParams, p: CotangentPoint) -> np.ndarray:
    """Fbar from coordinate Christoffels: ``F[A, B, C] = g((nabla_A P) d_B, d_C)``."""
    G = metric_at(c, prm, p).G
    return np.einsum("dc,dab->abc", G, _nabla_P_coords(c, prm, p))


def cyclic_check(
    c: ConnectionSpec,
    prm: RExtParams,
    pts: Sequence[CotangentPoint],
    tol: float = DEFAULT_TOL,
    fbar=None,
) -> dict:
    """Cyclic sum of Fbar (almost para-Kaehler) and Fbar itself (para-Kaehler) over frame triples.

    ``fbar`` overrides the tensor builder (used for negative controls).
    """
    fbar = fbar or fbar_tensor
    cyc = []
    mag = []
    for p in pts:
        F = fbar(c, prm, p)
        S = F + np.einsum("abc->bca", F) + np.einsum("abc->cab", F)
        cyc.append(float(np.max(np.abs(S))))
        mag.append(float(np.max(np.abs(F))))
    cyc_check = CheckResult.at_most("cyclic sum of Fbar", "sum_cyc Fbar = 0", cyc, tol)
    return {
        "cyclic": cyc_check,
        "max_abs_fbar": max(mag, default=0.0),
        "almost_para_kaehler": cyc_check.passed,
        "para_kaehler": max(mag, default=0.0) <= tol,
    }


# --------------------------------------------------------------------------
# Harmonicity


def p_jets(c: ConnectionSpec, prm: RExtParams, p: CotangentPoint) -> np.ndarray:
    xs, ws = tstar_seeds(p)
    gamma = connection_jets_on(c, xs)
    return p_matrix(gamma, np.array(ws, dtype=object), prm.a, prm.b)


def _nabla_P_coords(c, prm, p) -> np.ndarray:
    """``DP[D, A, B] = (nabla_{d_A} P)^D_B``."""
    Pj = p_jets(c, prm, p)
    P = jet_values(Pj)
    dP = jet_grads(Pj, 2 * p.n)  # dP[D, B, A] = d_A P^D_B
    Gb = lc_coords(c, prm, p)
    return np.einsum("dba->dab", dP) + np.einsum("dae,eb->dab", Gb, P) - np.einsum("de,eab->dab", P, Gb)


def delta_p(c: ConnectionSpec, prm: RExtParams, p: CotangentPoint) -> np.ndarray:
    """Trace of nabla P with respect to the metric: ``G^{AB} (nabla_{d_A} P) d_B``."""
    G = metric_at(c, prm, p).G
    _check_nondegenerate(G)
    Ginv = np.linalg.inv(G)
    return np.einsum("ab,dab->d", Ginv, _nabla_P_coords(c, prm, p))

"""Level-set hypersurfaces ``ftilde = t`` of the cotangent bundle, ``ftilde = xi^V + f^V``.

Every quantity comes with an independent coordinate route used as an oracle:
the unit normal is rebuilt from the exact differential of ``ftilde`` and the
inverse metric, and the shape operator, the tensor ``Ftilde`` and ``d eta``
are recomputed from first-order jets of the ambient fields in the ``2n``
bundle coordinates.

Conventions: ``s = omega(xi)``; tangent vectors are arrays of length ``2n``
in the frame ``(d_i, d_i*)``; ``d eta(U, V) = 1/2 (U eta(V) - V eta(U) - eta([U, V]))``.

Besides the parallel field ``xi`` the closed formulas need ``xi(f) = 0``: the
cross term ``g(xi^C, (df)^V) = a xi(f)`` enters the length of ``grad ftilde``
and is dropped by the closed expressions.  :class:`HypersurfaceSpec` checks it.

The closed split of ``Ftilde`` into a curvature part, a metric part and a
``(Xf)(Zf)`` part is complete only when ``(nabla df)(X, Z) = omega(R(Z, xi) X)``
on tangent vectors.  In general a fourth term remains,

    (a / (sqrt(b) s)) * (eta(Y) D(X, Z) - eta(Z) D(X, Y)),
    D(X, Z) = omega(R(Z, xi) X) - (nabla df)(X, Z),

returned as the ``"F_corr"`` part.  It satisfies the class-10 identities, so
class memberships are unaffected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .classifier import ACMSample
from .expr import Jet, eval_jet
from .lifts import CotangentPoint, LiftVector, complete_lift_at, liouville_at
from .manifold import (
    DEFAULT_TOL,
    CheckResult,
    ConnectionSpec,
    LocalForm,
    LocalVector,
    ScalarFieldSpec,
    VectorFieldSpec,
    check_parallel,
    connection_jet,
    connection_jets_on,
    nabla_df_at,
)
from .parahermitian import fbar_tensor, p_at, p_matrix
from .rext import RExtParams, jet_grads, jet_values, lc_coords, metric_at, metric_matrix, tstar_seeds

__all__ = [
    "HypersurfaceSpec",
    "InducedStructure",
    "SampleRejected",
    "on_surface",
    "project_omega",
    "ftilde_value",
    "ftilde_differential",
    "grad_ftilde",
    "grad_ftilde_coords",
    "normal_at",
    "tangent_basis",
    "tangent_lift",
    "induced_structure_at",
    "phi_display",
    "weingarten_at",
    "weingarten_matrix",
    "weingarten_coords",
    "second_fundamental",
    "ftilde_parts",
    "ftilde_at",
    "ftilde_gauss",
    "ftilde_coords",
    "d_eta_at",
    "d_eta_matrix",
    "phi_form_at",
    "paracontact_residual",
    "acm_sample",
    "ambient_oracle",
    "PART_NAMES",
]

PART_NAMES = ("F'", "F''", "F'''", "F_corr")


class SampleRejected(ValueError):
    """A candidate point violates a sampling constraint."""


@dataclass(frozen=True)
class HypersurfaceSpec:
    c: ConnectionSpec
    prm: RExtParams
    xi: VectorFieldSpec
    f: ScalarFieldSpec
    t: float

    def __post_init__(self):
        if not self.prm.b > 0:
            raise ValueError(f"hypersurface checks need b > 0, got {self.prm.b!r}")
        if self.xi.n != self.c.n:
            raise ValueError("xi has the wrong number of components")
        if self.f.expr.max_index() > self.c.n:
            raise ValueError("f uses coordinates beyond the base dimension")

    @property
    def n(self) -> int:
        return self.c.n

    @property
    def a(self) -> float:
        return self.prm.a

    @property
    def b(self) -> float:
        return self.prm.b

    def xi_f(self, x) -> float:
        """The derivative xi(f) at x."""
        return float(self.xi.at(x).val @ self.f.at(x).grad)

    def validate(self, xs: Sequence, tol: float = DEFAULT_TOL) -> list[CheckResult]:
        """Hypotheses on the base data at the points ``xs``: xi parallel and xi(f) = 0."""
        par = check_parallel(self.c, self.xi, xs, tol)
        xif = CheckResult.at_most("xi(f) = 0", "xi(f) = 0", [abs(self.xi_f(x)) for x in xs], tol)
        return [par, xif]


# --------------------------------------------------------------------------
# Points


def ftilde_value(spec: HypersurfaceSpec, p: CotangentPoint) -> float:
    return float(p.omega @ spec.xi.at(p.x).val + spec.f.at(p.x).value)


def on_surface(spec: HypersurfaceSpec, p: CotangentPoint, tol: float = 1e-9) -> bool:
    return abs(ftilde_value(spec, p) - spec.t) <= tol * max(1.0, abs(spec.t))


def project_omega(spec: HypersurfaceSpec, x, raw_omega) -> CotangentPoint:
    """Shift ``raw_omega`` along the Euclidean dual of xi so that omega(xi) = t - f(x)."""
    x = np.asarray(x, dtype=float)
    raw = np.asarray(raw_omega, dtype=float)
    s = spec.t - spec.f.at(x).value
    if s == 0.0:
        raise SampleRejected("f(x) = t at this point")
    xv = spec.xi.at(x).val
    nx = float(xv @ xv)
    if nx == 0.0:
        raise SampleRejected("xi vanishes at this point")
    omega = raw + (s - float(raw @ xv)) / nx * xv
    return CotangentPoint(x, omega)


def _s(spec, p) -> float:
    s = float(p.omega @ spec.xi.at(p.x).val)
    if s == 0.0:
        raise SampleRejected("omega(xi) = 0")
    return s


# --------------------------------------------------------------------------
# Normal


def ftilde_differential(spec: HypersurfaceSpec, p: CotangentPoint) -> np.ndarray:
    """Exact components of d ftilde: ``(d_i f + omega_k d_i xi^k, xi^i)``."""
    X = spec.xi.at(p.x)
    return np.concatenate([spec.f.at(p.x).grad + p.omega @ X.d1, X.val])


def _bracket(spec, p) -> LiftVector:
    """``xi^C - (b/a) xi^V W + (df)^V``."""
    s = _s(spec, p)
    df = LiftVector(np.zeros(spec.n), spec.f.at(p.x).grad)
    return complete_lift_at(spec.xi, p) - (spec.b / spec.a) * s * liouville_at(p) + df


def grad_ftilde(spec: HypersurfaceSpec, p: CotangentPoint) -> LiftVector:
    return _bracket(spec, p) / spec.a


def grad_ftilde_coords(spec: HypersurfaceSpec, p: CotangentPoint) -> LiftVector:
    """Gradient from the inverse metric applied to the exact differential."""
    return LiftVector.from_array(metric_at(spec.c, spec.prm, p).inverse() @ ftilde_differential(spec, p))


def normal_at(spec: HypersurfaceSpec, p: CotangentPoint) -> LiftVector:
    """Unit time-like normal ``bracket / (sqrt(b) s)``.

    It points along grad ftilde when ``s > 0`` and against it when ``s < 0``;
    the closed expressions for the shape operator and Ftilde use this choice.
    """
    return _bracket(spec, p) / (math.sqrt(spec.b) * _s(spec, p))


# --------------------------------------------------------------------------
# Tangent vectors


def tangent_basis(spec: HypersurfaceSpec, p: CotangentPoint) -> list[LiftVector]:
    """``2n - 1`` tangent vectors: vertical lifts of a basis of ker xi, then
    ``d_i`` corrected by a vertical multiple of xi."""
    n = spec.n
    xv = spec.xi.at(p.x).val
    dft = ftilde_differential(spec, p)
    # orthonormal complement of xi
    q, _ = np.linalg.qr(np.column_stack([xv, np.eye(n)]))
    out = [LiftVector(np.zeros(n), q[:, k].copy()) for k in range(1, n)]
    nx = float(xv @ xv)
    for i in range(n):
        out.append(LiftVector(np.eye(n)[i], -dft[i] / nx * xv))
    return out


def _basis_matrix(spec, p) -> np.ndarray:
    return np.column_stack([u.array() for u in tangent_basis(spec, p)])


def tangent_lift(spec: HypersurfaceSpec, p: CotangentPoint, h, alpha) -> tuple[LocalVector, LocalForm]:
    """A field X with X(x) = h and a 1-form whose lifts are tangent at ``p``.

    ``alpha`` is projected onto ker xi.  X gets a linear part along xi chosen so
    that ``(Xf)(x) = omega(nabla_xi X)``; its complete lift then has vertical
    part ``-omega o dX``.
    """
    n = spec.n
    h = np.asarray(h, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    xv = spec.xi.at(p.x).val
    nx = float(xv @ xv)
    alpha = alpha - (alpha @ xv) / nx * xv
    s = _s(spec, p)
    gamma = connection_jet(spec.c, p.x).gamma
    r = float(spec.f.at(p.x).grad @ h - p.omega @ np.einsum("kij,i,j->k", gamma, xv, h))
    L = r / (s * nx) * np.outer(xv, xv)
    X = LocalVector(h, L, np.zeros((n, n, n)))
    return X, LocalForm(alpha, np.zeros((n, n)), np.zeros((n, n, n)))


# --------------------------------------------------------------------------
# Induced structure


@dataclass(frozen=True)
class InducedStructure:
    """The induced structure at one point, in ambient coordinates.

    ``phi`` is ``P - N (x) eta`` as a ``2n x 2n`` matrix (meaningful on tangent
    vectors), ``eta`` the covector ``g(., xibar)``, ``basis`` the ``2n x (2n-1)``
    matrix of tangent basis columns.
    """

    phi: np.ndarray
    xibar: np.ndarray
    eta: np.ndarray
    normal: np.ndarray
    G: np.ndarray
    basis: np.ndarray
    against_gradient: bool = False

    @property
    def m(self) -> int:
        return self.basis.shape[1]

    @property
    def g_restricted(self) -> np.ndarray:
        return self.basis.T @ self.G @ self.basis

    def coords(self, U) -> np.ndarray:
        """Coefficients of a tangent vector in the basis."""
        c, *_ = np.linalg.lstsq(self.basis, np.asarray(U, dtype=float), rcond=None)
        return c

    @property
    def phi_restricted(self) -> np.ndarray:
        return np.column_stack([self.coords(self.phi @ self.basis[:, k]) for k in range(self.m)])

    def invariant_residuals(self) -> dict[str, float]:
        B, G, phi, xi, eta = self.basis, self.G, self.phi, self.xibar, self.eta
        pB = phi @ B
        return {
            "phi_squared": float(np.max(np.abs(phi @ pB - B + np.outer(xi, eta @ B)))),
            "eta_xi": abs(float(eta @ xi) - 1.0),
            "phi_xi": float(np.max(np.abs(phi @ xi))),
            "compatible_metric": float(np.max(np.abs(pB.T @ G @ pB + B.T @ G @ B - np.outer(eta @ B, eta @ B)))),
            "phi_tangent": float(np.max(np.abs(self.normal @ G @ pB))),
            "xi_tangent": abs(float(self.normal @ G @ xi)),
        }


def induced_structure_at(spec: HypersurfaceSpec, p: CotangentPoint) -> InducedStructure:
    """phi = P - eta (x) N, xibar = P N, eta = g(., xibar)."""
    G = metric_at(spec.c, spec.prm, p).G
    P = p_at(spec.c, spec.prm, p).Pmat
    N = normal_at(spec, p).array()
    xib = P @ N
    eta = G @ xib
    phi = P - np.outer(N, eta)
    return InducedStructure(phi, xib, eta, N, G, _basis_matrix(spec, p), _s(spec, p) < 0)


def phi_display(spec: HypersurfaceSpec, p: CotangentPoint, X, w_coefficient: str = "closed") -> LiftVector:
    """phi X^C from the closed lift expression for a tangent complete lift.

    ``X^C + 2 C(nabla X) + c (Xf) W - eta(X^C) (xi^C + (df)^V) / (sqrt(b) s)``
    with ``c = -2/s``, which is what ``P - eta (x) N`` gives.  Passing
    ``w_coefficient="printed"`` uses ``c = -2a / (sqrt(b) s)`` instead; the two
    agree only when ``b = a^2``.
    """
    from .lifts import contracted_at, local_vector

    a, b = spec.a, spec.b
    s = _s(spec, p)
    Xl = local_vector(X, p.x)
    cj = connection_jet(spec.c, p.x)
    df = spec.f.at(p.x).grad
    Xf = float(df @ Xl.val)
    eta_x = -2 * a / (math.sqrt(b) * s) * Xf + math.sqrt(b) * float(p.omega @ Xl.val)
    if w_coefficient == "closed":
        cw = -2.0 / s
    elif w_coefficient == "printed":
        cw = -2 * a / (math.sqrt(b) * s)
    else:
        raise ValueError("w_coefficient must be 'closed' or 'printed'")
    xiC = complete_lift_at(spec.xi, p)
    dfV = LiftVector(np.zeros(spec.n), df)
    return (
        complete_lift_at(Xl, p)
        + 2 * contracted_at(cj.nabla(Xl), p)
        + cw * Xf * liouville_at(p)
        - (eta_x / (math.sqrt(b) * s)) * (xiC + dfV)
    )


# --------------------------------------------------------------------------
# Weingarten map


def _base_data(spec, p):
    x = p.x
    cj = connection_jet(spec.c, x)
    R = cj.curvature().R
    xv = spec.xi.at(x).val
    # K[x, z] = omega(R(Z, xi) X)
    K = np.einsum("l,lzkx,k->xz", p.omega, R, xv)
    H = nabla_df_at(spec.c, spec.f, x)
    df = spec.f.at(x).grad
    return R, K, H, df


def weingarten_matrix(spec: HypersurfaceSpec, p: CotangentPoint, st: InducedStructure | None = None) -> np.ndarray:
    """Closed expression of the shape operator as a ``2n x 2n`` matrix.

    On a tangent ``U = X^C + alpha^V`` it returns
    ``(sqrt(b)/2a)(U + eta(U) xibar) - (C(R(., xi) X) + (nabla_X df)^V) / (sqrt(b) s)
    - 2 (Xf) (df)^V / (sqrt(b) s^2)``.
    """
    st = st or induced_structure_at(spec, p)
    n = spec.n
    a, rb = spec.a, math.sqrt(spec.b)
    s = _s(spec, p)
    _, K, H, df = _base_data(spec, p)
    A = (rb / (2 * a)) * (np.eye(2 * n) + np.outer(st.xibar, st.eta))
    A[n:, :n] -= (K.T + H) / (rb * s) + 2 * np.outer(df, df) / (rb * s * s)
    return A


def weingarten_at(spec: HypersurfaceSpec, p: CotangentPoint, U) -> LiftVector:
    U = U.array() if isinstance(U, LiftVector) else np.asarray(U, dtype=float)
    return LiftVector.from_array(weingarten_matrix(spec, p) @ U)


def second_fundamental(spec: HypersurfaceSpec, p: CotangentPoint, U, V) -> float:
    U = U.array() if isinstance(U, LiftVector) else np.asarray(U, dtype=float)
    V = V.array() if isinstance(V, LiftVector) else np.asarray(V, dtype=float)
    G = metric_at(spec.c, spec.prm, p).G
    return float((weingarten_matrix(spec, p) @ U) @ G @ V)


# --------------------------------------------------------------------------
# Coordinate oracle


def _jet(value: float, grad) -> Jet:
    """First-order jet; the Hessian slot is unused downstream and left zero."""
    grad = np.asarray(grad, dtype=float)
    return Jet(value, grad, np.zeros((grad.shape[0], grad.shape[0])))


def _dot(row, col):
    out = 0.0
    for u, v in zip(row, col):
        out = out + u * v
    return out


@dataclass(frozen=True)
class _Ambient:
    """Values and first derivatives of the ambient fields near ``p``."""

    G: np.ndarray
    N: np.ndarray
    dN: np.ndarray  # dN[A, C] = d_C N^A
    phi: np.ndarray
    dphi: np.ndarray  # dphi[A, B, C] = d_C phi^A_B
    eta: np.ndarray
    deta: np.ndarray  # deta[B, C] = d_C eta_B
    Gb: np.ndarray


def _ambient(spec: HypersurfaceSpec, p: CotangentPoint) -> _Ambient:
    n, m = spec.n, 2 * spec.n
    a, b = spec.a, spec.b
    xs, ws = tstar_seeds(p)
    w = np.array(ws, dtype=object)
    gamma = connection_jets_on(spec.c, xs)
    Gj = metric_matrix(gamma, w, a, b)
    G = jet_values(Gj)
    dG = jet_grads(Gj, m)
    Gi = np.linalg.inv(G)
    dGi = -np.einsum("ab,bcm,cd->adm", Gi, dG, Gi)
    Ginv = np.empty((m, m), dtype=object)
    for A in range(m):
        for B in range(m):
            Ginv[A, B] = _jet(Gi[A, B], dGi[A, B])
    fj = eval_jet(spec.f.expr, xs)
    xij = [eval_jet(e, xs) for e in spec.xi.components]
    dft = np.empty(m, dtype=object)
    for i in range(n):
        # d_i f and d_i xi^k as jets: their gradients are Hessian rows
        d = _jet(fj.grad[i], fj.hess[i])
        for k in range(n):
            d = d + w[k] * _jet(xij[k].grad[i], xij[k].hess[i])
        dft[i] = d
        dft[n + i] = xij[i]
    grad = np.array([_dot(Ginv[A], dft) for A in range(m)], dtype=object)
    nrm2 = _dot(grad, [_dot(Gj[:, B], grad) for B in range(m)])
    # same orientation as normal_at: along grad ftilde exactly when omega(xi) > 0
    N = grad / (-nrm2).sqrt() * (1.0 if _s(spec, p) > 0 else -1.0)
    Pj = p_matrix(gamma, w, a, b)
    xib = np.array([_dot(Pj[A], N) for A in range(m)], dtype=object)
    eta = np.array([_dot(Gj[A], xib) for A in range(m)], dtype=object)
    phi = np.empty((m, m), dtype=object)
    for A in range(m):
        for B in range(m):
            phi[A, B] = Pj[A, B] - N[A] * eta[B]
    return _Ambient(
        G,
        jet_values(N),
        jet_grads(N, m),
        jet_values(phi),
        jet_grads(phi, m),
        jet_values(eta),
        jet_grads(eta, m),
        lc_coords(spec.c, spec.prm, p),
    )


def ambient_oracle(spec: HypersurfaceSpec, p: CotangentPoint) -> _Ambient:
    """Jets of the ambient normal, phi and eta at ``p``, shared by the coordinate routes."""
    return _ambient(spec, p)


def weingarten_coords(spec: HypersurfaceSpec, p: CotangentPoint, amb: _Ambient | None = None) -> np.ndarray:
    """``-nabla_U N`` from coordinate Christoffel symbols, as a matrix acting on U."""
    amb = amb or _ambient(spec, p)
    return -(amb.dN + np.einsum("abc,c->ab", amb.Gb, amb.N))


def ftilde_coords(
    spec: HypersurfaceSpec, p: CotangentPoint, B: np.ndarray | None = None, amb: _Ambient | None = None
) -> np.ndarray:
    """``Ftilde(X, Y, Z) = g((nabla_X phi) Y, Z) - h(X, Y) eta(Z)`` on basis columns.

    The ambient covariant derivative of the extended phi differs from the
    induced one by the normal component, which is removed through the second
    fundamental form.
    """
    amb = amb or _ambient(spec, p)
    B = _basis_matrix(spec, p) if B is None else B
    # Dphi[C, A, B] = (nabla_{d_C} phi)^A_B
    Dphi = (
        np.einsum("abc->cab", amb.dphi)
        + np.einsum("ace,eb->cab", amb.Gb, amb.phi)
        - np.einsum("ae,ecb->cab", amb.phi, amb.Gb)
    )
    A = weingarten_coords(spec, p, amb)
    h = B.T @ A.T @ amb.G @ B  # h[x, y] = g(A X, Y)
    amb_part = np.einsum("cx,cab,by,ad,dz->xyz", B, Dphi, B, amb.G, B)
    return amb_part - np.einsum("xy,z->xyz", h, amb.eta @ B)


def d_eta_matrix(spec: HypersurfaceSpec, p: CotangentPoint, amb: _Ambient | None = None) -> np.ndarray:
    """``1/2 (d_A eta_B - d_B eta_A)`` of the ambient 1-form ``g(., P N)``."""
    deta = (amb or _ambient(spec, p)).deta  # [B, A] = d_A eta_B
    return 0.5 * (deta.T - deta)


def d_eta_at(spec: HypersurfaceSpec, p: CotangentPoint, U, V) -> float:
    U = U.array() if isinstance(U, LiftVector) else np.asarray(U, dtype=float)
    V = V.array() if isinstance(V, LiftVector) else np.asarray(V, dtype=float)
    return float(U @ d_eta_matrix(spec, p) @ V)


def phi_form_at(spec: HypersurfaceSpec, p: CotangentPoint, U, V, st: InducedStructure | None = None) -> float:
    """``g(U, phi V)``."""
    st = st or induced_structure_at(spec, p)
    U = U.array() if isinstance(U, LiftVector) else np.asarray(U, dtype=float)
    V = V.array() if isinstance(V, LiftVector) else np.asarray(V, dtype=float)
    return float(U @ st.G @ st.phi @ V)


# --------------------------------------------------------------------------
# Ftilde


def ftilde_parts(
    spec: HypersurfaceSpec, p: CotangentPoint, B: np.ndarray | None = None, st: InducedStructure | None = None
) -> dict[str, np.ndarray]:
    """Components of Ftilde on the columns of ``B`` (default: the tangent basis)."""
    st = st or induced_structure_at(spec, p)
    B = st.basis if B is None else np.asarray(B, dtype=float)
    n = spec.n
    a, rb = spec.a, math.sqrt(spec.b)
    s = _s(spec, p)
    R, K, H, df = _base_data(spec, p)
    Bh = B[:n]
    eta = st.eta @ B
    g = B.T @ st.G @ B
    Kb = Bh.T @ K @ Bh
    Hb = Bh.T @ H @ Bh
    fb = df @ Bh
    # 2a omega(R(Z, Y) X)
    Rw = 2 * a * np.einsum("l,lzyx,xi,yj,zk->ijk", p.omega, R, Bh, Bh, Bh)

    def split(M):  # eta(Y) M(X, Z) - eta(Z) M(X, Y)
        return np.einsum("j,ik->ijk", eta, M) - np.einsum("k,ij->ijk", eta, M)

    return {
        "F'": Rw - (2 * a / (rb * s)) * split(Kb),
        "F''": (rb / (2 * a)) * split(g),
        "F'''": -(2 * a / (rb * s * s)) * split(np.outer(fb, fb)),
        "F_corr": (a / (rb * s)) * split(Kb - Hb),
    }


def ftilde_at(spec: HypersurfaceSpec, p: CotangentPoint, X, Y, Z) -> tuple[float, dict[str, float]]:
    """Ftilde(X, Y, Z) and the value of each component."""
    vecs = [U.array() if isinstance(U, LiftVector) else np.asarray(U, dtype=float) for U in (X, Y, Z)]
    parts = ftilde_parts(spec, p, np.column_stack(vecs))
    vals = {k: float(v[0, 1, 2]) for k, v in parts.items()}
    return sum(vals.values()), vals


def ftilde_gauss(
    spec: HypersurfaceSpec, p: CotangentPoint, B: np.ndarray | None = None, st: InducedStructure | None = None
) -> np.ndarray:
    """``Fbar(X, Y, Z) + eta(Y) h(X, Z) - eta(Z) h(X, Y)`` on the columns of ``B``."""
    st = st or induced_structure_at(spec, p)
    B = st.basis if B is None else np.asarray(B, dtype=float)
    Fb = np.einsum("abc,ai,bj,ck->ijk", fbar_tensor(spec.c, spec.prm, p), B, B, B)
    h = B.T @ weingarten_matrix(spec, p, st).T @ st.G @ B
    eta = st.eta @ B
    return Fb + np.einsum("j,ik->ijk", eta, h) - np.einsum("k,ij->ijk", eta, h)


def paracontact_residual(
    spec: HypersurfaceSpec, pts: Sequence[CotangentPoint], tol: float = DEFAULT_TOL
) -> CheckResult:
    """max |g(U, phi V) - d eta(U, V)| over tangent basis pairs.

    ``details["scale"]`` is ``|1 - sqrt(b)/2a| * max |g(U, phi V)|``, the size
    the residual takes when d eta is proportional to the fundamental form.
    """
    res, scale = [], []
    for p in pts:
        st = induced_structure_at(spec, p)
        B = st.basis
        phif = B.T @ st.G @ st.phi @ B
        de = B.T @ d_eta_matrix(spec, p) @ B
        res.append(float(np.max(np.abs(phif - de))))
        scale.append(abs(1 - math.sqrt(spec.b) / (2 * spec.a)) * float(np.max(np.abs(phif))))
    return CheckResult.at_most(
        "paracontact (phiform = d eta)", "phiform = d eta iff b = 4a^2", res, tol, scale=min(scale, default=0.0)
    )


def acm_sample(spec: HypersurfaceSpec, p: CotangentPoint, with_parts: bool = True) -> ACMSample:
    """The induced structure at ``p`` in the tangent basis, ready for classification."""
    st = induced_structure_at(spec, p)
    parts = ftilde_parts(spec, p, st=st)
    F = sum(parts.values())
    return ACMSample(
        st.m,
        st.g_restricted,
        st.phi_restricted,
        st.coords(st.xibar),
        st.eta @ st.basis,
        F,
        parts if with_parts else {},
    )

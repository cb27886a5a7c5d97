"""Pointwise classification of almost paracontact metric data.

A sample is the value at one point of ``(g, phi, xibar, eta, F)`` written in
some basis ``e_1..e_m`` of the tangent space (``m`` odd).  ``phi[a, b]`` is the
``a``-th component of ``phi e_b`` and ``F[i, j, k] = F(e_i, e_j, e_k)``.

The twelve class conditions are evaluated as the largest absolute deviation
of their defining identities over all basis triples.  Coefficients that depend
on the dimension use ``nu = (m - 1) / 2``.  The fundamental 2-form is taken as
``phiform(X, Y) = g(X, phi Y)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .manifold import CheckResult

__all__ = [
    "ACMSample",
    "ClassReport",
    "theta_forms",
    "class_residual",
    "class_residuals",
    "g5bar_residual",
    "named_verdicts",
    "dim3_check",
    "classify",
    "CLASS_IDS",
    "UNDECIDABLE",
]

CLASS_IDS = tuple(range(1, 13))
UNDECIDABLE = "undecidable without projections"


@dataclass(frozen=True)
class ACMSample:
    m: int
    g: np.ndarray
    phi: np.ndarray
    xibar: np.ndarray
    eta: np.ndarray
    F: np.ndarray
    parts: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("g", "phi", "xibar", "eta", "F"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        object.__setattr__(self, "parts", {k: np.asarray(v, dtype=float) for k, v in self.parts.items()})
        m = self.m
        if m < 3 or m % 2 == 0:
            raise ValueError(f"dimension must be odd and at least 3, got {m}")
        shapes = {"g": (m, m), "phi": (m, m), "xibar": (m,), "eta": (m,), "F": (m, m, m)}
        for name, shape in shapes.items():
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")
        for k, v in self.parts.items():
            if v.shape != (m, m, m):
                raise ValueError(f"part {k!r} has shape {v.shape}, expected {(m, m, m)}")
        if np.linalg.matrix_rank(self.g) < m:
            raise ValueError("metric is singular")

    @property
    def nu(self) -> float:
        return (self.m - 1) / 2

    def ginv(self) -> np.ndarray:
        return np.linalg.inv(self.g)

    def with_F(self, F, parts=None) -> "ACMSample":
        return ACMSample(self.m, self.g, self.phi, self.xibar, self.eta, F, parts or {})

    def invariant_residuals(self) -> dict[str, float]:
        """Deviations from the almost paracontact metric axioms."""
        m = self.m
        I = np.eye(m)
        phi, xi, eta, g = self.phi, self.xibar, self.eta, self.g
        return {
            "phi_squared": float(np.max(np.abs(phi @ phi - I + np.outer(xi, eta)))),
            "eta_xi": abs(float(eta @ xi) - 1.0),
            "phi_xi": float(np.max(np.abs(phi @ xi))),
            "eta_phi": float(np.max(np.abs(eta @ phi))),
            "compatible_metric": float(np.max(np.abs(phi.T @ g @ phi + g - np.outer(eta, eta)))),
            "F_antisymmetry": float(np.max(np.abs(self.F + np.swapaxes(self.F, 1, 2)))),
            "rank_phi": float(abs(np.linalg.matrix_rank(phi, tol=1e-8) - (m - 1))),
        }

    def to_json(self) -> dict:
        out = {
            "m": self.m,
            "g": self.g.tolist(),
            "phi": self.phi.tolist(),
            "xibar": self.xibar.tolist(),
            "eta": self.eta.tolist(),
            "F": self.F.tolist(),
        }
        if self.parts:
            out["parts"] = {k: v.tolist() for k, v in self.parts.items()}
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "ACMSample":
        try:
            return cls(
                int(data["m"]),
                data["g"],
                data["phi"],
                data["xibar"],
                data["eta"],
                data["F"],
                dict(data.get("parts") or {}),
            )
        except KeyError as exc:
            raise ValueError(f"sample is missing field {exc.args[0]!r}") from None

    @classmethod
    def load(cls, path) -> "ACMSample":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


# --------------------------------------------------------------------------
# Associated forms


def _theta(s: ACMSample, F: np.ndarray):
    ginv = s.ginv()
    theta = np.einsum("ij,ijk->k", ginv, F)
    # F(e_i, phi e_j, X) = phi[b, j] F[i, b, X]
    theta_star = np.einsum("ij,bj,ibk->k", ginv, s.phi, F)
    omega_form = np.einsum("a,b,abk->k", s.xibar, s.xibar, F)
    return theta, theta_star, omega_form


def theta_forms(s: ACMSample, F: np.ndarray | None = None):
    """``(theta, theta*, omega_form)`` as component arrays in the sample basis."""
    return _theta(s, s.F if F is None else np.asarray(F, dtype=float))


def _mx(*arrays) -> float:
    return max(float(np.max(np.abs(a))) if np.size(a) else 0.0 for a in arrays)


def _structure(s: ACMSample):
    g, phi, eta = s.g, s.phi, s.eta
    g_x_phiy = g @ phi  # g(X, phi Y)
    g_phix_phiy = phi.T @ g @ phi
    return g_x_phiy, g_phix_phiy, eta


def _vertical_parts(F, xi):
    """``F(X, Y, xibar)``."""
    return np.einsum("xya,a->xy", F, xi)


def class_residual(s: ACMSample, class_id: int, F: np.ndarray | None = None) -> float | None:
    """Deviation from the defining conditions of class ``class_id``.

    Returns ``None`` when the class is not defined in this dimension (class 1
    for ``m = 3``).
    """
    if class_id not in CLASS_IDS:
        raise ValueError(f"class id must be in 1..12, got {class_id!r}")
    F = s.F if F is None else np.asarray(F, dtype=float)
    phi, xi = s.phi, s.xibar
    nu = s.nu
    gxp, gpp, eta = _structure(s)
    theta, theta_star, _ = _theta(s, F)
    F_phiphi = np.einsum("ax,by,abz->xyz", phi, phi, F)  # F(phi X, phi Y, Z)
    F_xi_first = np.einsum("a,ayz->yz", xi, F)
    F_xi_second = np.einsum("a,xaz->xz", xi, F)
    Fv = _vertical_parts(F, xi)
    Fv_phiphi = np.einsum("ax,by,ab->xy", phi, phi, Fv)  # F(phi X, phi Y, xi)

    if class_id == 1:
        if s.m == 3:
            return None
        tp = theta @ phi
        tpp = theta @ phi @ phi
        rhs = (
            np.einsum("xy,z->xyz", gxp, tp)
            - np.einsum("xz,y->xyz", gxp, tp)
            - np.einsum("xy,z->xyz", gpp, tpp)
            + np.einsum("xz,y->xyz", gpp, tpp)
        ) / (2 * (nu - 1))
        return _mx(F - rhs)
    if class_id == 2:
        return _mx(F_phiphi + F, theta)
    if class_id == 3:
        return _mx(F_xi_first, F_xi_second, F + np.swapaxes(F, 0, 1))
    if class_id == 4:
        cyc = F + np.einsum("xyz->yzx", F) + np.einsum("xyz->zxy", F)
        return _mx(F_xi_first, F_xi_second, cyc)
    if class_id == 5:
        rhs = theta @ xi / (2 * nu) * (np.einsum("y,xz->xyz", eta, gpp) - np.einsum("z,xy->xyz", eta, gpp))
        return _mx(F - rhs)
    if class_id == 6:
        rhs = -(theta_star @ xi) / (2 * nu) * (np.einsum("y,xz->xyz", eta, gxp) - np.einsum("z,xy->xyz", eta, gxp))
        return _mx(F - rhs)
    # classes 7-10 share the first identity
    if class_id in (7, 8, 9, 10):
        base = F + np.einsum("y,xz->xyz", eta, Fv) - np.einsum("z,xy->xyz", eta, Fv)
        sym = Fv + Fv.T if class_id in (7, 9) else Fv - Fv.T
        phi_rel = Fv + Fv_phiphi if class_id in (7, 8) else Fv - Fv_phiphi
        extra = []
        if class_id == 7:
            extra.append(theta_star @ xi)
        if class_id == 8:
            extra.append(theta @ xi)
        return _mx(base, sym, phi_rel, np.array(extra))
    if class_id == 11:
        rhs = np.einsum("x,yz->xyz", eta, np.einsum("ab,ay,bz->yz", F_xi_first, phi, phi))
        return _mx(F - rhs)
    # class 12
    om = np.einsum("a,b,abk->k", xi, xi, F)
    rhs = np.einsum("x,y,z->xyz", eta, eta, om) - np.einsum("x,z,y->xyz", eta, eta, om)
    return _mx(F - rhs)


def class_residuals(s: ACMSample, F: np.ndarray | None = None) -> dict[int, float | None]:
    return {k: class_residual(s, k, F) for k in CLASS_IDS}


def g5bar_residual(s: ACMSample, F: np.ndarray | None = None) -> float:
    """|theta(xibar) + (m - 1)|: distance of theta(xibar) from its value on the subclass."""
    theta, _, _ = theta_forms(s, F)
    return abs(float(theta @ s.xibar) + (s.m - 1))


# --------------------------------------------------------------------------
# Verdicts


@dataclass
class ClassReport:
    residuals: dict
    members: list
    theta: np.ndarray
    theta_star: np.ndarray
    omega_form: np.ndarray
    theta_xi: float
    g5bar: float
    named: dict
    parts: dict

    def to_json(self) -> dict:
        return {
            "residuals": {str(k): v for k, v in self.residuals.items()},
            "members": list(self.members),
            "theta": self.theta.tolist(),
            "theta_star": self.theta_star.tolist(),
            "omega_form": self.omega_form.tolist(),
            "theta_xi": self.theta_xi,
            "g5bar_residual": self.g5bar,
            "named": self.named,
            "parts": self.parts,
        }


def _part_classes(s: ACMSample, F: np.ndarray, tol: float) -> dict:
    res = class_residuals(s, F)
    members = [k for k, r in res.items() if r is not None and r <= tol]
    g5b = g5bar_residual(s, F)
    return {
        "norm": _mx(F),
        "residuals": res,
        "members": members,
        "g5bar": 5 in members and g5b <= tol,
        "theta_xi": float(theta_forms(s, F)[0] @ s.xibar),
    }


def _template_fit(F, T) -> tuple[float, float]:
    nrm = float(np.sum(T * T))
    if nrm == 0.0:
        return 0.0, _mx(F)
    alpha = float(np.sum(F * T)) / nrm
    return alpha, _mx(F - alpha * T)


def named_verdicts(s: ACMSample, tol: float = 1e-9) -> dict:
    """Named-structure verdicts from class membership of the sample's components.

    With an explicit split (``s.parts``) each nonzero component is assigned its
    classes and the direct-sum statements are decided.  Without one the whole
    tensor is treated as a single component; when it lies in no single class
    the direct-sum verdicts are reported as undecidable.
    """
    split = bool(s.parts)
    parts = dict(s.parts) if split else {"F": s.F}
    info = {k: _part_classes(s, v, tol) for k, v in parts.items()}
    live = {k: v for k, v in info.items() if v["norm"] > tol}

    def kinds(v):
        out = set()
        for c in v["members"]:
            out.add(f"G{c}")
        if v["g5bar"]:
            out.add("G5bar")
        return out

    def all_in(allowed, need=None):
        if not all(kinds(v) & allowed for v in live.values()):
            return False
        if need is not None:
            return any(need in kinds(v) for v in live.values())
        return True

    # a G5 component must be in the subclass for the paracontact-type verdicts
    def g5_ok():
        return all(("G5" not in kinds(v)) or v["g5bar"] for v in live.values())

    verdicts = {
        "paracontact": all_in({"G4", "G5bar", "G10"}, "G5bar") and g5_ok(),
        "para_sasakian": all_in({"G5bar"}, "G5bar"),
        "k_paracontact": all_in({"G4", "G5bar"}, "G5bar") and g5_ok(),
        "quasi_para_sasakian": all_in({"G5", "G8"}),
    }
    if not split:
        single = bool(info["F"]["members"]) or info["F"]["norm"] <= tol
        if not single:
            for k in verdicts:
                verdicts[k] = UNDECIDABLE
    # template fits on the full tensor
    eta, g, phi = s.eta, s.g, s.phi
    T_sas = np.einsum("xy,z->xyz", g, eta) - np.einsum("y,xz->xyz", eta, g)
    T_ken = -(np.einsum("xy,z->xyz", g @ phi, eta) + np.einsum("y,xz->xyz", eta, phi.T @ g))
    a_s, r_s = _template_fit(s.F, T_sas)
    a_k, r_k = _template_fit(s.F, T_ken)
    verdicts["alpha_para_sasakian"] = {"alpha": a_s, "residual": r_s, "fits": r_s <= tol and abs(a_s) > tol}
    verdicts["alpha_para_kenmotsu"] = {"alpha": a_k, "residual": r_k, "fits": r_k <= tol and abs(a_k) > tol}
    verdicts["components"] = {
        k: {"norm": v["norm"], "classes": sorted(kinds(v), key=_class_key)} for k, v in info.items()
    }
    return verdicts


def _class_key(name: str):
    return (int(name[1:].replace("bar", "")), name)


def dim3_check(s: ACMSample, tol: float = 1e-9) -> CheckResult:
    """In dimension 3 a component satisfying the class-4 conditions must vanish."""
    if s.m != 3:
        raise ValueError(f"dim3_check needs m = 3, got {s.m}")
    parts = dict(s.parts) if s.parts else {"F": s.F}
    worst = 0.0
    offenders = []
    for name, P in parts.items():
        r4 = class_residual(s, 4, P)
        if r4 <= tol or name == "F'":
            nrm = _mx(P)
            worst = max(worst, nrm)
            if nrm > tol:
                offenders.append(name)
    return CheckResult(
        "dimension-3 collapse", "class-4 part vanishes in dimension 3", worst, tol, not offenders, {"nonzero_class4_parts": offenders}
    )


def classify(s: ACMSample, tol: float = 1e-9) -> ClassReport:
    res = class_residuals(s)
    members = [k for k, r in res.items() if r is not None and r <= tol]
    th, ths, om = theta_forms(s)
    parts = {k: _part_classes(s, v, tol)["members"] for k, v in s.parts.items()}
    return ClassReport(res, members, th, ths, om, float(th @ s.xibar), g5bar_residual(s), named_verdicts(s, tol), parts)

import math

import numpy as np
import pytest
from conftest import hypersurface, surface_points
from hypothesis import given, settings
from hypothesis import strategies as st

from riemext.classifier import class_residual, g5bar_residual, theta_forms
from riemext.hypersurface import (
    PART_NAMES,
    SampleRejected,
    acm_sample,
    ambient_oracle,
    d_eta_matrix,
    ftilde_at,
    ftilde_coords,
    ftilde_gauss,
    ftilde_parts,
    ftilde_value,
    grad_ftilde,
    grad_ftilde_coords,
    induced_structure_at,
    normal_at,
    on_surface,
    paracontact_residual,
    phi_display,
    project_omega,
    second_fundamental,
    tangent_basis,
    tangent_lift,
    weingarten_coords,
    weingarten_matrix,
)
from riemext.lifts import CotangentPoint, complete_lift_at, vertical_lift_at
from riemext.parahermitian import fbar_tensor
from riemext.rext import RExtParams, metric_at

# (base, f, t) with xi(f) = 0 on each base
CASES = [("FLAT2", "0", 2.0), ("FLAT2", "x2^2", 3.0), ("POLY2", "0", 2.0), ("POLY2", "x1^2", 3.0),
         ("PROD3", "0", 2.0), ("PROD3", "x2*x3", 3.0)]
BS = [1.0, 2.0, 4.0, 9.0]


@pytest.fixture(scope="module", params=[(c, b) for c in CASES for b in (1.0, 4.0)], ids=str)
def surf(request):
    (name, f, t), b = request.param
    spec = hypersurface(name, 1.0, b, f, t)
    return spec, surface_points(spec, 8)


def test_needs_positive_b():
    with pytest.raises(ValueError):
        hypersurface("FLAT2", b=0.0)


def test_validate_flags_xi_f():
    spec = hypersurface("FLAT2", f="x1")
    par, xif = spec.validate([[0.1, 0.2]])
    assert par.passed and not xif.passed


def test_projection_lands_on_level_set():
    spec = hypersurface("POLY2", f="x1^2", t=3.0)
    p = project_omega(spec, [0.5, -0.2], [1.0, 7.0])
    assert on_surface(spec, p) and ftilde_value(spec, p) == pytest.approx(3.0)
    with pytest.raises(SampleRejected):
        project_omega(hypersurface("FLAT2", t=0.0), [0.0, 0.0], [1.0, 1.0])


def test_zero_s_rejected():
    spec = hypersurface("FLAT2")
    with pytest.raises(SampleRejected):
        normal_at(spec, CotangentPoint([0.0, 0.0], [0.0, 1.0]))


def test_normal_and_gradient(surf):
    spec, pts = surf
    for p in pts:
        G = metric_at(spec.c, spec.prm, p).G
        N = normal_at(spec, p).array()
        gr = grad_ftilde(spec, p).array()
        s = float(p.omega @ spec.xi.at(p.x).val)
        assert abs(N @ G @ N + 1) <= 1e-10
        assert abs(gr @ G @ gr + spec.b * s * s / spec.a**2) <= 1e-9
        assert np.max(np.abs(gr - grad_ftilde_coords(spec, p).array())) <= 1e-9


def test_tangent_basis(surf):
    spec, pts = surf
    for p in pts:
        B = np.column_stack([u.array() for u in tangent_basis(spec, p)])
        G = metric_at(spec.c, spec.prm, p).G
        assert B.shape == (2 * spec.n, 2 * spec.n - 1)
        assert np.linalg.matrix_rank(B) == 2 * spec.n - 1
        assert np.max(np.abs(normal_at(spec, p).array() @ G @ B)) <= 1e-12


def test_induced_axioms(surf):
    spec, pts = surf
    for p in pts:
        st_ = induced_structure_at(spec, p)
        assert max(st_.invariant_residuals().values()) <= 1e-10
        assert max(acm_sample(spec, p).invariant_residuals().values()) <= 1e-10


def test_tangent_lifts_are_tangent(surf, rng):
    spec, pts = surf
    for p in pts:
        X, al = tangent_lift(spec, p, rng.uniform(-1, 1, spec.n), rng.uniform(-1, 1, spec.n))
        G = metric_at(spec.c, spec.prm, p).G
        N = normal_at(spec, p).array()
        assert abs(N @ G @ complete_lift_at(X, p).array()) <= 1e-12
        assert abs(N @ G @ vertical_lift_at(al, p).array()) <= 1e-12


def test_phi_display(surf, rng):
    spec, pts = surf
    for p in pts:
        st_ = induced_structure_at(spec, p)
        X, _ = tangent_lift(spec, p, rng.uniform(-1, 1, spec.n), np.zeros(spec.n))
        ref = st_.phi @ complete_lift_at(X, p).array()
        assert np.max(np.abs(phi_display(spec, p, X).array() - ref)) <= 1e-10


def test_printed_w_coefficient_agrees_only_when_b_is_a_squared():
    for b, agree in [(1.0, True), (4.0, False)]:
        spec = hypersurface("FLAT2", 1.0, b, "x2^2", 3.0)
        p = surface_points(spec, 1)[0]
        X, _ = tangent_lift(spec, p, [0.3, 0.8], [0.0, 0.0])
        gap = np.max(np.abs(phi_display(spec, p, X, "printed").array() - phi_display(spec, p, X).array()))
        assert bool(gap <= 1e-12) is agree
    with pytest.raises(ValueError):
        phi_display(spec, p, X, "other")


def test_shape_operator(surf):
    spec, pts = surf
    n = spec.n
    for p in pts:
        st_ = induced_structure_at(spec, p)
        B = st_.basis
        amb = ambient_oracle(spec, p)
        A, Ac = weingarten_matrix(spec, p, st_), weingarten_coords(spec, p, amb)
        assert np.max(np.abs((A - Ac) @ B)) <= 1e-9
        vert = B[:, : n - 1]
        assert np.max(np.abs(Ac @ vert - math.sqrt(spec.b) / (2 * spec.a) * vert)) <= 1e-12
        h = B.T @ A.T @ st_.G @ B
        assert np.max(np.abs(h - h.T)) <= 1e-9
        assert second_fundamental(spec, p, B[:, 0], B[:, -1]) == pytest.approx(h[0, -1], abs=1e-12)


def test_ftilde_routes(surf):
    spec, pts = surf
    for p in pts:
        st_ = induced_structure_at(spec, p)
        parts = ftilde_parts(spec, p, st=st_)
        assert tuple(parts) == PART_NAMES
        F = sum(parts.values())
        assert np.max(np.abs(F - ftilde_coords(spec, p))) <= 1e-9
        assert np.max(np.abs(F - ftilde_gauss(spec, p, st=st_))) <= 1e-9
        assert np.max(np.abs(F + F.transpose(0, 2, 1))) <= 1e-12


def test_ftilde_at_single_triple(surf):
    spec, pts = surf
    p = pts[0]
    B = induced_structure_at(spec, p).basis
    total, vals = ftilde_at(spec, p, B[:, 0], B[:, 1], B[:, -1])
    F = ftilde_coords(spec, p)
    assert total == pytest.approx(F[0, 1, -1], abs=1e-9)
    assert set(vals) == set(PART_NAMES)


def test_normal_slot_relation(surf):
    spec, pts = surf
    for p in pts:
        st_ = induced_structure_at(spec, p)
        B = st_.basis
        m = B.shape[1]
        phiB = st_.phi @ B
        lhs = np.einsum("abc,ai,bj,c->ij", fbar_tensor(spec.c, spec.prm, p), B, B, st_.normal)
        F = sum(ftilde_parts(spec, p, np.column_stack([B, phiB, st_.xibar]), st_).values())
        rhs = F[:m, m : 2 * m, 2 * m] + (weingarten_matrix(spec, p, st_) @ B).T @ st_.G @ phiB
        assert np.max(np.abs(lhs - rhs)) <= 1e-9


def test_part_classes(surf):
    spec, pts = surf
    for p in pts:
        s = acm_sample(spec, p)
        parts = s.parts
        assert class_residual(s, 4, parts["F'"]) <= 1e-9
        assert class_residual(s, 5, parts["F''"]) <= 1e-9
        assert class_residual(s, 10, parts["F'''"]) <= 1e-9
        assert class_residual(s, 10, parts["F_corr"]) <= 1e-9
        th = theta_forms(s, parts["F''"])[0] @ s.xibar
        assert th == pytest.approx(-(spec.n - 1) * math.sqrt(spec.b) / spec.a, abs=1e-9)


@pytest.mark.parametrize("name, f", [("FLAT2", "0"), ("PROD3", "0")])
def test_closed_split_complete_when_curvature_term_matches(name, f):
    spec = hypersurface(name, f=f)
    for p in surface_points(spec, 5):
        assert np.max(np.abs(ftilde_parts(spec, p)["F_corr"])) <= 1e-12


def test_correction_term_nonzero_on_curved_plane():
    spec = hypersurface("POLY2")
    p = surface_points(spec, 1)[0]
    assert np.max(np.abs(ftilde_parts(spec, p)["F_corr"])) > 0.1


@settings(max_examples=15, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.2, 12.0), st.sampled_from(CASES))
def test_d_eta_proportional_to_phi_form(a, b, case):
    name, f, t = case
    spec = hypersurface(name, a, b, f, t)
    for p in surface_points(spec, 2):
        st_ = induced_structure_at(spec, p)
        B = st_.basis
        phif = B.T @ st_.G @ st_.phi @ B
        de = B.T @ d_eta_matrix(spec, p) @ B
        assert np.max(np.abs(de - math.sqrt(b) / (2 * a) * phif)) <= 1e-9 * (1 + np.max(np.abs(phif)))


@pytest.mark.parametrize("case", CASES, ids=str)
@pytest.mark.parametrize("b", BS)
def test_paracontact_iff_b_is_4a2(case, b):
    name, f, t = case
    spec = hypersurface(name, 1.0, b, f, t)
    res = paracontact_residual(spec, surface_points(spec, 10), 1e-8)
    if b == 4.0:
        assert res.passed
    else:
        assert not res.passed and res.max_residual >= 0.1 * res.details["scale"] > 0


@pytest.mark.parametrize("b", BS)
def test_g5bar_of_metric_part(b):
    spec = hypersurface("PROD3", 1.0, b, "x2*x3", 3.0)
    for p in surface_points(spec, 5):
        s = acm_sample(spec, p)
        r = g5bar_residual(s, s.parts["F''"])
        if b == 4.0:
            assert r <= 1e-12
        else:
            assert r == pytest.approx(abs(2 - math.sqrt(b)) * (s.m - 1) / 2)


def test_sample_without_parts():
    spec = hypersurface("FLAT2")
    p = surface_points(spec, 1)[0]
    s = acm_sample(spec, p, with_parts=False)
    assert s.parts == {} and s.m == 3


def test_oracle_shared_matches_fresh():
    spec = hypersurface("PROD3", f="x2*x3", t=3.0)
    p = surface_points(spec, 1)[0]
    amb = ambient_oracle(spec, p)
    assert np.array_equal(ftilde_coords(spec, p, amb=amb), ftilde_coords(spec, p))
    assert np.array_equal(d_eta_matrix(spec, p, amb), d_eta_matrix(spec, p))


def test_negative_omega_xi_side():
    # the sampler keeps omega(xi) > 0; the formulas still hold for s < 0
    spec = hypersurface("FLAT2", t=-2.0)
    p = project_omega(spec, [0.2, 0.4], [0.0, 0.5])
    st_ = induced_structure_at(spec, p)
    assert st_.against_gradient
    assert max(st_.invariant_residuals().values()) <= 1e-10
    assert np.max(np.abs(sum(ftilde_parts(spec, p, st=st_).values()) - ftilde_coords(spec, p))) <= 1e-9
    B = st_.basis
    assert np.max(np.abs((weingarten_matrix(spec, p, st_) - weingarten_coords(spec, p)) @ B)) <= 1e-9
    assert np.max(np.abs(B.T @ (d_eta_matrix(spec, p) - st_.G @ st_.phi) @ B)) <= 1e-9


def test_parametrised_rext():
    spec = hypersurface("POLY2", 2.0, 3.0, "x1^2", 3.0)
    assert spec.prm == RExtParams(2.0, 3.0) and spec.n == 2

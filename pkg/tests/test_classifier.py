import json
import math

import numpy as np
import pytest
from conftest import hypersurface, surface_points
from hypothesis import given, settings
from hypothesis import strategies as st

from riemext.classifier import (
    CLASS_IDS,
    UNDECIDABLE,
    ACMSample,
    class_residual,
    class_residuals,
    classify,
    dim3_check,
    g5bar_residual,
    named_verdicts,
    theta_forms,
)
from riemext.hypersurface import acm_sample


def canonical(k):
    """Adapted basis (xi, u_1..u_k, v_1..v_k) with null u, v, phi u = u, phi v = -v."""
    m = 2 * k + 1
    g = np.zeros((m, m))
    g[0, 0] = 1.0
    g[1 : k + 1, k + 1 :] = np.eye(k)
    g[k + 1 :, 1 : k + 1] = np.eye(k)
    phi = np.diag([0.0] + [1.0] * k + [-1.0] * k)
    xi = np.eye(m)[0]
    return ACMSample(m, g, phi, xi, g @ xi, np.zeros((m, m, m)))


def split(s, M):
    return np.einsum("y,xz->xyz", s.eta, M) - np.einsum("z,xy->xyz", s.eta, M)


def change_basis(s, Q):
    Qi = np.linalg.inv(Q)
    move = lambda T: np.einsum("abc,ai,bj,ck->ijk", T, Q, Q, Q)
    return ACMSample(
        s.m, Q.T @ s.g @ Q, Qi @ s.phi @ Q, Qi @ s.xibar, s.eta @ Q, move(s.F), {k: move(v) for k, v in s.parts.items()}
    )


def random_antisymmetric(rng, m):
    F = rng.normal(size=(m, m, m))
    return F - F.transpose(0, 2, 1)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_canonical_axioms(k):
    s = canonical(k)
    assert max(s.invariant_residuals().values()) == 0.0
    assert s.nu == k


@pytest.mark.parametrize(
    "kwargs",
    [dict(m=4), dict(m=1), dict(g=np.zeros((3, 3))), dict(F=np.zeros((3, 3))), dict(phi=np.eye(2))],
)
def test_sample_validation(kwargs):
    s = canonical(1)
    base = dict(m=3, g=s.g, phi=s.phi, xibar=s.xibar, eta=s.eta, F=s.F)
    base.update(kwargs)
    with pytest.raises(ValueError):
        ACMSample(**base)


def test_json_round_trip(tmp_path):
    s = acm_sample(hypersurface("POLY2", f="x1^2", t=3.0), surface_points(hypersurface("POLY2", f="x1^2", t=3.0), 1)[0])
    path = tmp_path / "sample.json"
    path.write_text(json.dumps(s.to_json()))
    back = ACMSample.load(path)
    assert np.array_equal(back.F, s.F) and set(back.parts) == set(s.parts)
    with pytest.raises(ValueError):
        ACMSample.from_json({"m": 3})


def test_class_one_undefined_in_dimension_three():
    assert class_residual(canonical(1), 1) is None
    assert class_residual(canonical(2), 1) == 0.0
    with pytest.raises(ValueError):
        class_residual(canonical(1), 13)


def test_zero_tensor_in_every_class():
    res = class_residuals(canonical(2))
    assert all(r == 0.0 for r in res.values())


@pytest.mark.parametrize("k", [1, 2])
def test_metric_template_class_five(k):
    s = canonical(k)
    gpp = s.phi.T @ s.g @ s.phi
    F = 0.7 * split(s, gpp)
    members = [c for c, r in class_residuals(s, F).items() if r is not None and r <= 1e-12]
    assert members == [5]
    th = theta_forms(s, F)[0] @ s.xibar
    # theta(xi) = c (m - 1) for c times the phi-phi template, so -1 lands in the subclass
    assert th == pytest.approx(0.7 * 2 * k)
    assert g5bar_residual(s, -F / 0.7) <= 1e-12
    assert np.allclose(split(s, s.g), -split(s, gpp))


@pytest.mark.parametrize("k", [1, 2])
def test_phi_template_class_six(k):
    s = canonical(k)
    F = 1.3 * split(s, s.g @ s.phi)
    members = [c for c, r in class_residuals(s, F).items() if r is not None and r <= 1e-12]
    assert members == [6]


def test_eta_eta_template_class_twelve():
    s = canonical(2)
    om = np.array([0.0, 1.0, -2.0, 0.5, 3.0])
    F = np.einsum("x,y,z->xyz", s.eta, s.eta, om) - np.einsum("x,z,y->xyz", s.eta, s.eta, om)
    assert class_residual(s, 12, F) == 0.0
    assert np.allclose(theta_forms(s, F)[2], om - s.eta * (om @ s.xibar))


def test_generic_tensor_in_no_class(rng):
    s = canonical(2)
    F = random_antisymmetric(rng, 5)
    assert all(r is None or r > 1e-3 for r in class_residuals(s, F).values())
    nv = named_verdicts(s.with_F(F), 1e-9)
    assert nv["paracontact"] == UNDECIDABLE and nv["para_sasakian"] == UNDECIDABLE


CASES = [("FLAT2", "0", 2.0), ("POLY2", "x1^2", 3.0), ("PROD3", "0", 2.0), ("PROD3", "x2*x3", 3.0)]


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(CASES), st.sampled_from([1.0, 4.0]), st.integers(0, 2**32 - 1))
def test_memberships_basis_independent(case, b, seed):
    name, f, t = case
    spec = hypersurface(name, 1.0, b, f, t)
    s = acm_sample(spec, surface_points(spec, 1, seed=seed % 97)[0])
    rng = np.random.default_rng(seed)
    Q = np.eye(s.m) + 0.3 * rng.uniform(-1, 1, (s.m, s.m))
    s2 = change_basis(s, Q)
    assert max(s2.invariant_residuals().values()) <= 1e-9
    for part in s.parts:
        r1 = class_residuals(s, s.parts[part])
        r2 = class_residuals(s2, s2.parts[part])
        for c in CLASS_IDS:
            if r1[c] is None:
                assert r2[c] is None
            elif r1[c] <= 1e-12:
                assert r2[c] <= 1e-9
            elif r1[c] > 1e-3:
                assert r2[c] > 1e-9
    th1 = theta_forms(s)[0] @ s.xibar
    th2 = theta_forms(s2)[0] @ s2.xibar
    assert th1 == pytest.approx(th2, abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 50))
def test_classes_closed_under_linear_combination(u, v, seed):
    spec = hypersurface("PROD3", 1.0, 2.0, "x2*x3", 3.0)
    s1 = acm_sample(spec, surface_points(spec, 1, seed=seed)[0])
    for part, cls in [("F'", 4), ("F''", 5), ("F'''", 10), ("F_corr", 10)]:
        assert class_residual(s1, cls, u * s1.parts[part]) <= 1e-9 * (1 + abs(u))
    T = u * s1.parts["F'''"] + v * s1.parts["F_corr"]
    assert class_residual(s1, 10, T) <= 1e-9 * (1 + abs(u) + abs(v))


def test_alpha_para_sasakian_fit_on_flat_base():
    for b in (1.0, 4.0, 9.0):
        spec = hypersurface("FLAT2", 1.0, b)
        s = acm_sample(spec, surface_points(spec, 1)[0])
        nv = named_verdicts(s, 1e-9)
        fit = nv["alpha_para_sasakian"]
        assert fit["fits"] and fit["alpha"] == pytest.approx(-math.sqrt(b) / 2)
        assert nv["quasi_para_sasakian"] is True
        assert nv["para_sasakian"] is (b == 4.0)


def test_named_verdicts_on_product_base():
    for b in (2.0, 4.0):
        spec = hypersurface("PROD3", 1.0, b)
        s = acm_sample(spec, surface_points(spec, 1)[0])
        nv = named_verdicts(s, 1e-9)
        comps = nv["components"]
        assert comps["F'"]["classes"] == ["G4"]
        assert "G5" in comps["F''"]["classes"]
        assert nv["k_paracontact"] is (b == 4.0)
        assert nv["paracontact"] is (b == 4.0)
        assert nv["para_sasakian"] is False


def test_dim3_check():
    spec = hypersurface("POLY2", f="x1^2", t=3.0)
    s = acm_sample(spec, surface_points(spec, 1)[0])
    assert dim3_check(s).passed
    bad = s.with_F(s.F, dict(s.parts, **{"F'": s.parts["F''"]}))
    assert not dim3_check(bad).passed
    with pytest.raises(ValueError):
        dim3_check(acm_sample(hypersurface("PROD3"), surface_points(hypersurface("PROD3"), 1)[0]))


def test_classify_report():
    spec = hypersurface("FLAT2")
    s = acm_sample(spec, surface_points(spec, 1)[0])
    rep = classify(s, 1e-9)
    assert 5 in rep.members
    assert rep.theta_xi == pytest.approx(-2.0)
    assert rep.g5bar <= 1e-12
    js = rep.to_json()
    assert js["named"]["para_sasakian"] is True
    json.dumps(js)

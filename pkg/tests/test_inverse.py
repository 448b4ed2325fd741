import json
import math

import numpy as np
import pytest

from algact.groups import GroupDescriptor
from algact.inverse import (
    PRESETS,
    SolverConfig,
    SolverFailure,
    cg_inverse,
    default_grid,
    estimate_operator_norm,
    neumann_inverse,
    preset,
    solve,
    solver_report,
    torus_fft_inverse,
    verify_left_right,
)
from algact.oracle import FiniteModel, exact_inverse_finite
from algact.parse import parse_matrix
from algact.ring import GroupRingMatrix, TruncatedL2Matrix

Z = GroupDescriptor.parse("Z")
Z2 = GroupDescriptor.parse("Z^2")
F2 = GroupDescriptor.parse("F2")


def geometric(R):
    return {(k,): 2.0 ** -(k + 1) for k in range(R + 1)}


@pytest.mark.parametrize(
    "method,G",
    [(m, G) for m in ("neumann", "cg-normal", "torus-grid") for G in (Z, Z2, F2) if not (m == "torus-grid" and G is F2)],
)
def test_identity_inverts_to_delta(method, G):
    xi = solve(GroupRingMatrix.identity(G, 2), SolverConfig(radius=3, method=method))
    assert np.array_equal(xi.coeffs, TruncatedL2Matrix.delta(G, 2, 3).coeffs)
    assert xi.residual_left == xi.residual_right == 0.0


def test_cg_identity_one_iteration():
    xi = cg_inverse(GroupRingMatrix.identity(Z, 1), SolverConfig(radius=5, method="cg-normal"))
    assert xi.info["iterations"] <= 1


@pytest.mark.parametrize("R", [10, 25, 40])
def test_neumann_geometric_series(R):
    xi = neumann_inverse(parse_matrix(Z, "2e-g"), SolverConfig(radius=R))
    got = xi.entry(0, 0)
    want = geometric(R)
    assert set(got) == set(want)
    assert max(abs(got[g] - want[g]) for g in want) <= 1e-15
    assert xi.info["residual_left_full"] <= 2.0 ** -(R + 1)


def test_torus_aliasing_on_default_grid():
    xi = torus_fft_inverse(parse_matrix(Z, "2e-g"), SolverConfig(radius=40, method="torus-grid"))
    assert xi.info["grid"] == 4096 == default_grid(1, 40)
    assert xi.info["aliasing_error"] < 1e-10
    err = max(abs(xi.entry(0, 0).get(g, 0.0) - c) for g, c in geometric(40).items())
    assert err <= 1e-12


def test_torus_matches_cg_on_l1_dominant_z():
    f = parse_matrix(Z, "3e-g-g^2")
    t = solve(f, SolverConfig(radius=40, method="torus-grid"))
    c = solve(f, SolverConfig(radius=40, method="cg-normal"))
    assert np.max(np.abs(t.restrict(20).coeffs - c.restrict(20).coeffs)) <= 1e-8


def test_anticausal_inverse():
    # 1/(1-2z) = -sum_k 2^-(k+1) z^-(k+1) on |z| = 1
    f = parse_matrix(Z, "e-2g")
    for method in ("cg-normal", "torus-grid"):
        xi = solve(f, SolverConfig(radius=30, method=method))
        e = xi.entry(0, 0)
        for k in range(10):
            assert e.get((-k - 1,), 0.0) == pytest.approx(-(2.0 ** -(k + 1)), abs=1e-8)
        assert abs(e.get((1,), 0.0)) <= 1e-8
    with pytest.raises(SolverFailure):
        solve(f, SolverConfig(radius=30, method="neumann"))


def test_harmonic_cross_solver_agreement():
    f = preset("harmonic-f2").f
    n = solve(f, SolverConfig(radius=6, method="neumann"))
    c = solve(f, SolverConfig(radius=6, method="cg-normal"))
    e = F2.identity()
    assert abs(n.entry(0, 0)[e] - c.entry(0, 0)[e]) <= 1e-6


def test_harmonic_cg_history_monotone():
    xi = solve(preset("harmonic-f2").f, SolverConfig(radius=6, method="cg-normal"))
    h = xi.info["history"]
    assert len(h) >= 2 and all(b <= a for a, b in zip(h, h[1:]))


def test_least_squares_boundary():
    f = preset("harmonic-f2").f
    # least squares trades interior exactness for a smaller full residual
    d = solve(f, SolverConfig(radius=5, method="cg-normal"))
    ls = solve(f, SolverConfig(radius=5, method="cg-normal", boundary="least-squares", tol=0.05))
    assert ls.info["boundary"] == "least-squares"
    assert ls.info["residual_left_full"] <= d.info["residual_left_full"] + 1e-12
    assert abs(ls.entry(0, 0)[()] - d.entry(0, 0)[()]) < 0.05


@pytest.mark.parametrize("method", ["neumann", "cg-normal", "torus-grid"])
def test_e_minus_g_fails(method):
    with pytest.raises(SolverFailure) as info:
        solve(parse_matrix(Z, "e-g"), SolverConfig(radius=40, method=method))
    js = info.value.to_json()
    assert js["status"] == "failure" and js["method"] == method and js["reason"]


def test_failure_carries_history():
    with pytest.raises(SolverFailure) as info:
        solve(preset("harmonic-f2").f, SolverConfig(radius=6, max_iter=3))
    assert "max_iter" in str(info.value)
    assert len(info.value.history) >= 3


def test_torus_rejects_free_groups_and_bad_grid():
    with pytest.raises((SolverFailure, ValueError)):
        solve(preset("harmonic-f2").f, SolverConfig(radius=3, method="torus-grid"))
    with pytest.raises(ValueError):
        SolverConfig(method="torus-grid", grid=100)


@pytest.mark.parametrize(
    "kw", [dict(radius=-1), dict(tol=0.0), dict(method="lu"), dict(boundary="periodic"), dict(max_iter=0)]
)
def test_config_validation(kw):
    with pytest.raises(ValueError):
        SolverConfig(**kw)


def test_default_tolerances():
    assert SolverConfig().resolved_tol(F2) == 1e-6
    assert SolverConfig().resolved_tol(Z) == 1e-8
    assert SolverConfig(tol=1e-3).resolved_tol(Z) == 1e-3


def test_verify_left_right_exact_inverse_is_zero():
    G = GroupDescriptor.parse("Z/3")
    f = parse_matrix(G, "2e-g")
    rep = verify_left_right(f, exact_inverse_finite(FiniteModel(G, f)))
    assert rep["residual_left"] == rep["residual_right"] == 0


def test_verify_left_right_perturbed_identity():
    xi = TruncatedL2Matrix.delta(F2, 1, radius=3)
    coeffs = xi.coeffs.copy()
    coeffs[0, 0, 5] += 1e-3
    rep = verify_left_right(GroupRingMatrix.identity(F2, 1), TruncatedL2Matrix(F2, 3, coeffs))
    assert rep["residual_left_full"] == pytest.approx(1e-3)
    assert rep["residual_right_full"] == pytest.approx(1e-3)


def test_residuals_and_tail_mass_reported():
    xi = solve(parse_matrix(Z, "2e-g"), SolverConfig(radius=40))
    assert xi.residual_right <= 10 * xi.residual_left or xi.residual_right == 0.0
    true_tail = math.sqrt(sum(4.0 ** -(k + 1) for k in range(41, 80)))
    assert true_tail <= xi.tail_mass <= 1e-12


def test_operator_norm_estimate_below_kesten_bound():
    est = estimate_operator_norm(parse_matrix(F2, "a+a^-1+b+b^-1"), radius=6)
    assert 3.0 < est <= 2 * math.sqrt(3) + 1e-9


def test_solver_report_is_json():
    f = preset("l1-dominant-f2").f
    xi = solve(f, SolverConfig(radius=4))
    rep = solver_report(f, xi)
    text = json.dumps(rep, sort_keys=True)
    back = json.loads(text)
    for key in ("method", "R", "iterations", "residual_left", "residual_right", "interior_radius", "coefficients"):
        assert key in back


def test_presets():
    assert set(PRESETS) == {"l1-dominant-z", "l1-dominant-f2", "harmonic-f2", "li-example-f2"}
    assert preset("harmonic-f2").f == parse_matrix(F2, "4e-a-a^-1-b-b^-1")
    assert preset("li-example-f2").f == parse_matrix(F2, "3e+(e-a-a^2)b")
    assert preset("l1-dominant-z").f == parse_matrix(Z, "3e-g-g^2")
    with pytest.raises(KeyError):
        preset("nope")


@pytest.mark.parametrize("name", ["l1-dominant-z", "l1-dominant-f2"])
def test_l1_dominant_presets_converge(name):
    p = preset(name)
    xi = solve(p.f, SolverConfig(radius=40 if p.group.kind == "lattice" else 6))
    assert xi.residual_left <= SolverConfig().resolved_tol(p.group)

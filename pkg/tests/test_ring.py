import math
import random
from fractions import Fraction

import numpy as np
import pytest

from algact.groups import GroupDescriptor
from algact.inverse import SolverConfig, solve
from algact.parse import parse_matrix, parse_vector
from algact.ring import (
    DimensionError,
    FinSuppVector,
    GroupRingMatrix,
    TorusConfiguration,
    TruncatedL2Matrix,
    duality_pairing,
    hat,
    image_membership,
    inner,
    lambda_apply,
    mod1,
    q_map,
    r_apply,
    r_xi_apply,
    right_apply,
    star,
    torus_distance,
)
from algact.suites import random_matrix, random_vector

Z = GroupDescriptor.parse("Z")
Z2 = GroupDescriptor.parse("Z^2")
F2 = GroupDescriptor.parse("F2")


def M(G, s):
    return parse_matrix(G, s)


def V(G, s):
    return parse_vector(G, s)


# -- lambda ------------------------------------------------------------------------------


def test_lambda_identity_is_identity():
    rng = random.Random(0)
    for G in (Z2, F2):
        xi = random_matrix(rng, G, 2)
        assert lambda_apply(GroupRingMatrix.identity(G, 2), xi) == xi


def test_lambda_2e_minus_g_on_delta():
    assert lambda_apply(M(Z, "2e-g"), M(Z, "e")) == M(Z, "2e-g")
    x = TruncatedL2Matrix.delta(Z, 1, radius=3)
    y = lambda_apply(M(Z, "2e-g"), x)
    assert y.entry(0, 0) == {(0,): 2.0, (1,): -1.0}


def test_lambda_upper_triangular_matrix():
    f = M(Z, "[[e, g],[0, e]]")
    out = lambda_apply(f, GroupRingMatrix.identity(Z, 2))
    assert out.entry(0, 0) == {(0,): 1} and out.entry(0, 1) == {(1,): 1}
    assert out.entry(1, 1) == {(0,): 1} and out.entry(1, 0) == {}


def test_lambda_matches_ring_product_on_free_group():
    rng = random.Random(1)
    for _ in range(20):
        f, x = random_matrix(rng, F2, 2, radius=2), random_matrix(rng, F2, 2, radius=2)
        assert lambda_apply(f, x) == f @ x
        assert right_apply(x, f) == x @ f


def test_lambda_on_truncated_matches_exact():
    rng = random.Random(2)
    f = random_matrix(rng, F2, 2, radius=1, rational=False)
    x = random_matrix(rng, F2, 2, radius=2, rational=False)
    dense = lambda_apply(f, TruncatedL2Matrix.from_matrix(x, 3))
    exact = f @ x
    for i in range(2):
        for j in range(2):
            assert dense.entry(i, j) == pytest.approx({g: float(c) for g, c in exact.entry(i, j).items()})


def test_lambda_dimension_mismatch():
    with pytest.raises(DimensionError):
        lambda_apply(M(Z, "[[e, g],[0, e]]"), M(Z, "e"))


# -- r(f), r(xi) ---------------------------------------------------------------------------


def test_r_apply_examples():
    assert r_apply(GroupRingMatrix.identity(Z, 1), V(Z, "e+g")) == V(Z, "e+g")
    assert r_apply(M(Z, "2e-g"), V(Z, "e")) == V(Z, "2e-g")
    assert r_apply(M(Z, "2e-g"), V(Z, "e+g")) == V(Z, "2e+g-g^2")


def test_r_apply_uses_the_right_convention_on_free_group():
    # r(f) alpha = alpha * f (right multiplication in the group ring)
    f = M(F2, "a")
    assert r_apply(f, V(F2, "b")) == V(F2, "ba")


def test_r_xi_apply_on_basis_vector_gives_row():
    rng = random.Random(3)
    xi = random_matrix(rng, F2, 2)
    for k in range(2):
        got = r_xi_apply(xi, FinSuppVector.basis(F2, 2, k))
        assert got == xi.row(k)


def test_r_xi_geometric_series_telescopes():
    R = 30
    xi = TruncatedL2Matrix(Z, R, np.array([[[2.0 ** -(g[0] + 1) if g[0] >= 0 else 0.0 for g in Z.ball(R).elements]]]))
    out = r_xi_apply(xi, V(Z, "2e-g"))
    err = math.sqrt(sum((c - (1.0 if g == (0,) else 0.0)) ** 2 for (_, g), c in out.items()))
    assert err <= 2.0 ** -(R + 1)


# -- star, hat, pairing ----------------------------------------------------------------


def test_star_examples():
    assert star(M(Z, "g")) == M(Z, "g^-1")
    assert star(M(Z, "2e-g")) == M(Z, "2e-g^-1")
    s = star(M(Z, "[[e, g],[0, e]]"))
    assert s.entry(1, 0) == {(-1,): 1} and s.entry(0, 1) == {}


def test_star_conjugates_complex():
    x = GroupRingMatrix(Z, [[{(1,): 1 + 2j}]])
    assert star(x).entry(0, 0) == {(-1,): 1 - 2j}


def test_star_on_truncated_keeps_radius_and_swaps_residuals():
    xi = solve(M(F2, "5e-a-b-ab"), SolverConfig(radius=5))
    s = star(xi)
    assert s.radius == xi.radius
    assert (s.residual_left, s.residual_right) == (xi.residual_right, xi.residual_left)
    assert np.array_equal(star(s).coeffs, xi.coeffs)


def test_hat_examples():
    # hat(x) = x (delta_e (x) id) is x read as coefficient functions
    assert hat(GroupRingMatrix.identity(F2, 2)) == GroupRingMatrix.identity(F2, 2)
    assert hat(M(Z, "2e-g")) == M(Z, "2e-g")
    assert hat(V(F2, "[a, 2b]")) == V(F2, "[a, 2b]")


def test_inner_conjugates_second_argument():
    u = FinSuppVector(Z, [{(0,): 1j}])
    assert inner(u, u) == 1


def test_duality_pairing_examples():
    W = [(0, g) for g in Z.ball(2).elements]
    half = TorusConfiguration(Z, W, tuple(0.5 for _ in W))
    assert duality_pairing(half, V(Z, "0")) == 0
    assert duality_pairing(half, V(Z, "e+g")) == 0
    quarter = TorusConfiguration(Z, W, tuple(0.25 for _ in W))
    assert duality_pairing(quarter, V(Z, "e")) == 0.25
    with pytest.raises(ValueError):
        duality_pairing(quarter, V(Z, "g^3"))


def test_q_map_examples():
    assert q_map(M(Z, "3e-2g"), [(0, (0,)), (0, (1,))]).is_zero()
    assert q_map(GroupRingMatrix(Z, [[{(0,): 1.75}]]), [(0, (0,))]).value(0, (0,)) == 0.75
    assert q_map(GroupRingMatrix(Z, [[{(0,): -0.25}]]), [(0, (0,))]).value(0, (0,)) == 0.75


def test_torus_helpers():
    assert mod1(-0.25) == 0.75
    assert mod1(Fraction(-1, 3)) == Fraction(2, 3)
    assert torus_distance(0.95, 0.05) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        TorusConfiguration(Z, [(0, (0,)), (0, (0,))], (0.0, 0.0))


# -- membership -----------------------------------------------------------------------------


def test_image_membership_examples():
    f = M(Z, "2e-g")
    xi = solve(f, SolverConfig(radius=40))
    m = image_membership(f, xi, r_apply(f, V(Z, "e")))
    assert m.status == "yes" and m.witness == V(Z, "e")
    assert image_membership(f, xi, V(Z, "e")).status == "no"
    assert image_membership(f, xi, V(Z, "2e-g")).status == "yes"


def test_image_membership_free_group():
    p = parse_matrix(F2, "4e-a-a^-1-b-b^-1")
    xi = solve(p, SolverConfig(radius=6))
    beta = V(F2, "a - 2b")
    m = image_membership(p, xi, r_apply(p, beta))
    assert m.status == "yes" and m.witness == beta


# -- arithmetic -------------------------------------------------------------------------------


def test_group_ring_arithmetic():
    x = M(F2, "[[a, e],[0, b]]")
    assert x + (-x) == GroupRingMatrix.zeros(F2, 2, 2)
    assert x * 2 == x + x
    assert (x @ GroupRingMatrix.identity(F2, 2)) == x
    assert M(Z, "1/2 e").domain == "rational" and M(Z, "e").is_integer()


def test_truncated_restrict_extend_and_norm():
    xi = solve(M(Z, "2e-g"), SolverConfig(radius=20))
    r = xi.restrict(5)
    assert r.radius == 5 and r.coeffs.shape[-1] == 11
    back = r.extend(20)
    assert np.allclose(back.restrict(5).coeffs, r.coeffs) and back.norm() <= xi.norm()
    assert xi.norm() == pytest.approx(math.sqrt(sum(4.0 ** -(k + 1) for k in range(21))))
    masses = xi.sphere_masses()
    # squared mass per sphere; S_1 = {g, g^-1}
    assert masses[1] == pytest.approx(0.25**2)

"""Randomized algebraic laws (hypothesis)."""

from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from algact.groups import GroupDescriptor, free_reduce
from algact.measures import dirichlet_cosine_sum, dirichlet_kernel, dirichlet_sine_ratio
from algact.parse import format_map, format_matrix, parse_expr, parse_matrix
from algact.ring import FinSuppVector, GroupRingMatrix, lambda_apply, mod1, r_apply, star

F2 = GroupDescriptor.parse("F2")
Z2 = GroupDescriptor.parse("Z^2")

free_el = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=5).map(free_reduce)
lat_el = st.tuples(st.integers(-3, 3), st.integers(-3, 3))
coef = st.one_of(st.integers(-5, 5), st.fractions(min_value=-3, max_value=3, max_denominator=4))


def maps(el):
    return st.dictionaries(el, coef, max_size=3).map(lambda d: {g: c for g, c in d.items() if c})


def matrices(G, el, n):
    return st.lists(st.lists(maps(el), min_size=n, max_size=n), min_size=n, max_size=n).map(
        lambda rows: GroupRingMatrix(G, rows)
    )


settings.register_profile("repo", max_examples=60, deadline=None)
settings.load_profile("repo")


@given(free_el, free_el, free_el)
def test_free_group_laws(a, b, c):
    G = F2
    assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
    assert G.mul(a, G.inverse(a)) == G.identity()
    assert G.word_length(G.mul(a, b)) <= G.word_length(a) + G.word_length(b)
    assert G.word_length(G.inverse(a)) == G.word_length(a)


@given(free_el)
def test_free_element_text_roundtrip(a):
    assert F2.parse_element(F2.format_element(a)) == a


@given(st.data(), st.sampled_from([(F2, free_el), (Z2, lat_el)]))
def test_ring_laws(data, ge):
    G, el = ge
    x, y, z = (data.draw(matrices(G, el, 2)) for _ in range(3))
    assert (x @ y) @ z == x @ (y @ z)
    assert x @ (y + z) == x @ y + x @ z
    assert star(x @ y) == star(y) @ star(x)
    assert star(star(x)) == x
    assert lambda_apply(x, lambda_apply(y, z)) == lambda_apply(x @ y, z)


@given(st.data(), st.sampled_from([(F2, free_el), (Z2, lat_el)]))
def test_r_is_a_right_action(data, ge):
    G, el = ge
    f, g = data.draw(matrices(G, el, 2)), data.draw(matrices(G, el, 2))
    a = FinSuppVector(G, [data.draw(maps(el)) for _ in range(2)])
    b = FinSuppVector(G, [data.draw(maps(el)) for _ in range(2)])
    assert r_apply(f @ g, a) == r_apply(g, r_apply(f, a))
    assert r_apply(f, a + b) == r_apply(f, a) + r_apply(f, b)


@given(st.data(), st.sampled_from([(F2, free_el), (Z2, lat_el)]))
def test_format_parse_roundtrip(data, ge):
    G, el = ge
    d = data.draw(maps(el))
    assert parse_expr(G, format_map(G, d)) == d
    x = data.draw(matrices(G, el, 2))
    assert parse_matrix(G, format_matrix(x)) == x


@given(st.integers(0, 60), st.floats(-4, 4, allow_nan=False))
def test_dirichlet_bounded(m, t):
    v = dirichlet_kernel(m, t)
    assert -1.0 <= v <= 1.0


@given(st.integers(1, 50), st.floats(-2, 2, allow_nan=False))
def test_dirichlet_forms_agree(m, t):
    if abs(t - round(t)) > 1e-4:
        assert abs(dirichlet_cosine_sum(m, t) - dirichlet_sine_ratio(m, t)) <= 1e-12


@given(st.integers(1, 20), st.fractions(min_value=-2, max_value=2, max_denominator=50))
def test_dirichlet_rational_arguments(m, t):
    assert abs(dirichlet_kernel(m, t) - dirichlet_kernel(m, float(t))) <= 1e-12


@given(st.one_of(st.floats(-1e6, 1e6, allow_nan=False), st.fractions(max_denominator=100)))
def test_mod1_range(x):
    r = mod1(x)
    assert 0 <= r < 1
    d = float(x) - float(r)
    assert abs(d - round(d)) <= 1e-9 * max(1.0, abs(float(x)))
    if isinstance(x, Fraction):
        assert (x - r).denominator == 1

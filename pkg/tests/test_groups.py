import pytest

from algact.groups import BallTooLarge, GroupDescriptor, GroupError

Z = GroupDescriptor.parse("Z")
Z2 = GroupDescriptor.parse("Z^2")
F2 = GroupDescriptor.parse("F2")


def el(G, s):
    return G.parse_element(s)


def test_lattice_addition():
    assert Z2.mul((1, 2), (3, -1)) == (4, 1)


def test_free_reduction():
    assert F2.mul(el(F2, "a"), el(F2, "a^-1")) == F2.identity()
    assert F2.mul(el(F2, "ab"), el(F2, "b^-1a^-1")) == F2.identity()


def test_inverse_and_word_length():
    assert F2.inverse(el(F2, "ab")) == el(F2, "b^-1a^-1")
    assert Z.word_length((-3,)) == 3
    assert F2.word_length(el(F2, "ab^-1a")) == 3


@pytest.mark.parametrize("G,R,size", [(Z, 2, 5), (F2, 1, 5), (F2, 2, 17), (Z2, 1, 5), (Z2, 2, 13)])
def test_ball_sizes(G, R, size):
    assert len(G.ball(R)) == size == G.ball_size(R)


def test_ball_contents():
    assert sorted(g[0] for g in Z.ball(2).elements) == [-2, -1, 0, 1, 2]
    assert set(F2.ball(1).elements) == {(), (1,), (-1,), (2,), (-2,)}


def test_free_sphere_sizes():
    spheres = list(F2.ball(4).spheres())
    sizes = [hi - lo for _, lo, hi in spheres]
    assert sizes == [1, 4, 12, 36, 108]


def test_ball_is_sorted_by_length_and_prefix():
    b = F2.ball(3)
    assert list(b.lengths) == sorted(b.lengths)
    assert b.prefix(2) == 17


def test_inverse_perm():
    b = F2.ball(2)
    perm = b.inverse_perm
    for i, g in enumerate(b.elements):
        assert b.elements[perm[i]] == F2.inverse(g)


def test_group_laws_exhaustive_small_ball():
    for G in (Z2, F2, GroupDescriptor.parse("Z/3"), GroupDescriptor.parse("Z/2 x Z/2")):
        els = G.ball(1).elements
        e = G.identity()
        for a in els:
            assert G.mul(a, e) == a == G.mul(e, a)
            assert G.mul(a, G.inverse(a)) == e
            for b in els:
                for c in els:
                    assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))


def test_finite_groups():
    C3 = GroupDescriptor.parse("Z/3")
    assert C3.oracle_only and C3.order == 3
    g = el(C3, "g")
    assert C3.power(g, 3) == C3.identity()
    assert not Z.oracle_only
    assert GroupDescriptor.parse("1").order == 1


def test_power_and_format_roundtrip():
    g = el(F2, "ab")
    assert F2.power(g, -2) == F2.inverse(F2.mul(g, g))
    for s in ("e", "a", "a^-1", "ab^2a^-3", "b^-1a"):
        assert F2.format_element(el(F2, s)) == s
    for s in ("e", "g", "g^-4"):
        assert Z.format_element(el(Z, s)) == s


def test_table_left_and_right():
    b = F2.ball(2)
    t = b.ball if hasattr(b, "ball") else None
    tab = b.table((el(F2, "a"),), F2.ball(3), side="left")
    out = F2.ball(3)
    for j, h in enumerate(b.elements):
        assert out.elements[tab[0, j]] == F2.mul(el(F2, "a"), h)
    tab = b.table((el(F2, "a"),), b, side="right")
    for j, h in enumerate(b.elements):
        prod = F2.mul(h, el(F2, "a"))
        assert (tab[0, j] < 0) == (F2.word_length(prod) > 2)


@pytest.mark.parametrize("text", ["", "Q", "Z^0", "F0", "Z/0", "Z/-2"])
def test_bad_descriptors(text):
    with pytest.raises(GroupError):
        GroupDescriptor.parse(text)


def test_ball_cap():
    with pytest.raises(BallTooLarge):
        GroupDescriptor.parse("F3").ball(12, cap=1000)


def test_validate_rejects_unreduced_words():
    with pytest.raises(GroupError):
        F2.validate((1, -1))
    with pytest.raises(GroupError):
        Z2.validate((1,))

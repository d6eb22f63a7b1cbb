import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freemaps.errors import NoRemnant
from freemaps.remnant import has_remnant, sl_level
from freemaps.wagner import (
    directly_related,
    fixed_point_classes,
    isolated_tail_count,
    lefschetz_number,
    nielsen_number,
    w_count,
    wagner_tails,
)
from freemaps.words import Endomorphism, Word, iterate

from oracles import naive_classes, word
from strategies import endomorphisms, permutations, relabel, sl_maps


def _pairs(tails):
    return [(str(t.w), str(t.wbar), t.index) for t in tails]


def test_tails_of_squaring_map():
    tails = wagner_tails(Endomorphism.power_map(2))
    assert _pairs(tails) == [("1", "1", 1), ("1", "A", -1), ("a", "1", -1)]
    assert tails[0].is_base


def test_negative_exponent_case_formula():
    # phi(a) = A: v and vbar are empty, so the tail is (A, a)
    (base, t) = wagner_tails(Endomorphism.power_map(-1))
    assert (str(t.w), str(t.wbar), t.index) == ("A", "a", 1)
    # phi(a) = bAb: v = b, vbar = b, so (bA, Ba)
    phi = Endomorphism([word("bAb", 2), word("b", 2)])
    t = wagner_tails(phi)[1]
    assert (t.w, t.wbar) == (word("bA", 2), word("Ba", 2))


def test_tail_words_satisfy_defining_identity():
    # for every occurrence tail, phi(a_i) = w a_i wbar^-1
    phi = Endomorphism([word("abbaB", 2), word("baBab", 2)])
    for t in wagner_tails(phi)[1:]:
        a = Word((t.generator,), 2)
        assert t.w * a * ~t.wbar == phi.image(t.generator)


def test_tail_count_growth_map(growth_map):
    tails = wagner_tails(growth_map)
    assert len(tails) == 6
    assert sum(t.is_base for t in tails) == 1


def test_generator_missing_from_its_image():
    phi = Endomorphism([word("b", 2), word("ab", 2)])
    tails = wagner_tails(phi)
    assert [t.generator for t in tails] == [None, 2]


def test_direct_relation_examples():
    base, t1, t2 = wagner_tails(Endomorphism.power_map(2))
    assert directly_related(base, t1)
    assert directly_related(t1, t2)
    # (b, B) and (a, A) share nothing
    _, ta, tb = wagner_tails(Endomorphism([word("bab", 2), word("aba", 2)]))
    assert (str(ta), str(tb)) == ("(b, B)", "(a, A)")
    assert not directly_related(ta, tb)


def test_inside_remnant_tails_unrelated(orbit_map):
    phi = iterate(orbit_map, 2)
    tails = wagner_tails(phi)
    inside = [t for t in tails if t.inside_remnant]
    assert inside
    for t in inside:
        assert not any(directly_related(t, u) for u in tails if u is not t)


def test_classes_of_power_maps():
    part = fixed_point_classes(Endomorphism.power_map(2))
    assert part.classes == [(0, 1, 2)]
    assert part.index_sums == [-1]
    assert nielsen_number(Endomorphism.power_map(3)) == 2
    assert nielsen_number(Endomorphism.power_map(1)) == 0


@pytest.mark.parametrize("d", [d for d in range(-5, 6) if d != 0])
def test_circle_nielsen_numbers(d):
    assert nielsen_number(Endomorphism.power_map(d)) == abs(1 - d)


def test_circle_zero_map_needs_uncertified_count():
    phi = Endomorphism.power_map(0)
    with pytest.raises(NoRemnant) as info:
        nielsen_number(phi)
    assert info.value.partition is not None
    assert nielsen_number(phi, require_remnant=False) == 1


def test_growth_map_nielsen_sequence(growth_map):
    assert nielsen_number(growth_map) == 3
    expected = {2: 19, 3: 93, 4: 431}
    for n, value in expected.items():
        assert nielsen_number(iterate(growth_map, n)) == value


def test_growth_map_counts(growth_map):
    assert w_count(growth_map) == 1
    # base, (1, bABB), (1, BAbA), (baBa, 1) form one class; (abb, b) and (baB, BAb) are alone
    assert isolated_tail_count(growth_map) == 2
    assert lefschetz_number(growth_map) == -2


def test_isolated_count_squaring_map():
    assert isolated_tail_count(Endomorphism.power_map(2)) == 0


def test_lefschetz_examples():
    assert lefschetz_number(Endomorphism.identity(2)) == -1
    for d in range(-4, 5):
        assert lefschetz_number(Endomorphism.power_map(d)) == 1 - d


def test_w_count_short_remnants():
    # remnants of length <= 2 have no interior letters
    phi = Endomorphism([word("ab", 2), word("ba", 2)])
    assert w_count(phi, require_remnant=False) == 0


def test_no_remnant_errors():
    phi = Endomorphism([Word.identity(2), word("b", 2)])
    for f in (nielsen_number, isolated_tail_count, w_count):
        with pytest.raises(NoRemnant):
            f(phi)


def test_orbit_map_wbound(orbit_map):
    for n in (1, 2, 3):
        assert w_count(iterate(orbit_map, n)) >= 3**n - 6


@settings(max_examples=200)
@given(endomorphisms(max_len=7))
def test_index_sum_is_lefschetz(phi):
    part = fixed_point_classes(phi)
    assert sum(t.index for t in part.tails) == lefschetz_number(phi)
    assert sum(part.index_sums) == lefschetz_number(phi)


@settings(max_examples=200)
@given(endomorphisms(max_len=7))
def test_fast_partition_matches_all_pairs(phi):
    part = fixed_point_classes(phi)
    fast = {frozenset(c) for c in part.classes}
    assert fast == naive_classes(part.tails, directly_related)


@settings(max_examples=150)
@given(endomorphisms(max_len=7))
def test_count_chain(phi):
    if not has_remnant(phi):
        return
    part = fixed_point_classes(phi)
    assert part.nielsen_count >= part.isolated_count >= part.w_count
    assert part.w_count == w_count(phi)
    for c in part.classes:
        if any(part.tails[k].inside_remnant for k in c):
            assert len(c) == 1


@settings(max_examples=100)
@given(st.data())
def test_nielsen_invariant_under_relabelling(data):
    phi = data.draw(endomorphisms(ranks=(2, 3), max_len=7))
    perm = data.draw(permutations(phi.rank))
    psi = relabel(phi, perm)
    require = has_remnant(phi)
    assert nielsen_number(phi, require) == nielsen_number(psi, require)


@settings(max_examples=25, deadline=None)
@given(sl_maps(p=6), st.integers(1, 3))
def test_w_bound_for_powers(phi, n):
    l, m = sl_level(phi), phi.rank
    assert w_count(iterate(phi, n)) >= l**n * m**n - 2 * m

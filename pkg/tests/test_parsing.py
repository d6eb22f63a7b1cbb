import json

import pytest
from hypothesis import given

from freemaps.errors import ParseError
from freemaps.parsing import (
    UnreducedImageWarning,
    format_endomorphism,
    parse_endomorphism,
    parse_structured,
    to_structured,
)
from freemaps.words import Endomorphism

from oracles import word
from strategies import endomorphisms


def test_letter_format_with_whitespace(growth_map):
    phi = parse_endomorphism("a->abb aB; b->ba Bab")
    assert phi == growth_map
    assert phi.image(1) == word("abbaB", 2)


def test_three_generator_map(orbit_map):
    assert orbit_map.rank == 3
    assert [str(w) for w in orbit_map.images] == ["abc", "cAba", "ACab"]


def test_unreduced_image_rejected_or_reduced():
    with pytest.raises(ParseError):
        parse_endomorphism("a->aA b; b->b")
    with pytest.warns(UnreducedImageWarning):
        phi = parse_endomorphism("a->aA b; b->b", auto_reduce=True)
    assert phi.image(1) == word("b", 2)


def test_letter_beyond_rank():
    with pytest.raises(ParseError) as info:
        parse_endomorphism("a->ac; b->b")
    assert info.value.position == 4


@pytest.mark.parametrize(
    "text",
    ["", "a->a; a->b", "a->b; c->a; d->a", "ab->a", "a=>a", "a->a?"],
)
def test_syntax_errors(text):
    with pytest.raises(ParseError):
        parse_endomorphism(text)


def test_identity_and_empty_images():
    phi = parse_endomorphism("a->1; b->")
    assert all(w.is_identity() for w in phi.images)


def test_structured_format(growth_map):
    data = {"rank": 2, "images": [[1, 2, 2, 1, -2], [2, 1, -2, 1, 2]]}
    assert parse_structured(data) == growth_map
    assert parse_endomorphism(json.dumps(data)) == growth_map
    with pytest.raises(ParseError):
        parse_structured({"rank": 2, "images": [[3], [1]]})
    with pytest.raises(ParseError):
        parse_structured({"rank": 2, "images": [[1, -1], [2]]})
    with pytest.raises(ParseError):
        parse_endomorphism("{not json")


def test_large_rank_uses_json():
    phi = Endomorphism.identity(30)
    text = format_endomorphism(phi)
    assert text.startswith("{")
    assert parse_endomorphism(text) == phi


@given(endomorphisms(ranks=(1, 2, 3, 5)))
def test_format_round_trip(phi):
    assert parse_endomorphism(format_endomorphism(phi)) == phi
    assert parse_structured(to_structured(phi)) == phi

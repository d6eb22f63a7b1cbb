"""Text and JSON formats for words and endomorphisms.

Letter format::

    a->abbaB; b->baBab

Lowercase letters are generators, uppercase their inverses, ``1`` (or nothing)
is the identity.  Whitespace is ignored.  Structured format::

    {"rank": 2, "images": [[1, 2, 2, 1, -2], [2, 1, -2, 1, 2]]}
"""

from __future__ import annotations

import json
import warnings

from freemaps.errors import ParseError
from freemaps.words import Endomorphism, Word, reduce

STRUCTURED_FORMAT = "freemaps.endomorphism/1"


class UnreducedImageWarning(UserWarning):
    pass


def _letter_value(ch: str, rank: int, pos: int) -> int:
    g = ord(ch.lower()) - ord("a") + 1
    if not ch.isascii() or not ch.isalpha():
        raise ParseError(f"unexpected character {ch!r}", pos)
    if g > rank:
        raise ParseError(f"letter {ch!r} is beyond rank {rank}", pos)
    return g if ch.islower() else -g


def _word_letters(text: str, rank: int, offset: int = 0) -> list[int]:
    letters = []
    for k, ch in enumerate(text):
        if ch.isspace() or ch == "1":
            continue
        letters.append(_letter_value(ch, rank, offset + k))
    return letters


def _is_reduced(letters: list[int]) -> bool:
    return all(x != -y for x, y in zip(letters, letters[1:]))


def parse_word(text: str, rank: int, auto_reduce: bool = False) -> Word:
    letters = _word_letters(text, rank)
    if not _is_reduced(letters):
        if not auto_reduce:
            raise ParseError(f"word {text.strip()!r} is not reduced")
        return reduce(letters, rank)
    return Word(letters, rank)


def parse_rules(text: str, auto_reduce: bool = False) -> Endomorphism:
    rules = []
    offset = 0
    for chunk in text.split(";"):
        if chunk.strip():
            rules.append((chunk, offset))
        offset += len(chunk) + 1
    if not rules:
        raise ParseError("no rules found", 0)
    rank = len(rules)
    if rank > 26:
        raise ParseError("letter format supports at most 26 generators; use the JSON format")

    images: dict[int, list[int]] = {}
    raw_text: dict[int, str] = {}
    for chunk, start in rules:
        arrow = chunk.find("->")
        if arrow < 0:
            raise ParseError("expected '->' in rule", start)
        lhs = "".join(chunk[:arrow].split())
        lhs_pos = start + len(chunk[:arrow]) - len(chunk[:arrow].lstrip())
        if len(lhs) != 1 or not lhs.isascii() or not lhs.islower():
            raise ParseError(f"left side must be a single lowercase generator, got {lhs!r}", lhs_pos)
        g = _letter_value(lhs, rank, lhs_pos)
        if g in images:
            raise ParseError(f"generator {lhs!r} defined twice", lhs_pos)
        images[g] = _word_letters(chunk[arrow + 2 :], rank, start + arrow + 2)
        raw_text[g] = chunk[arrow + 2 :].strip()

    missing = [chr(ord("a") + g - 1) for g in range(1, rank + 1) if g not in images]
    if missing:
        raise ParseError(f"no rule for generator(s) {', '.join(missing)}")
    return _build(images, rank, raw_text, auto_reduce)


def _build(images: dict[int, list[int]], rank: int, labels: dict[int, str], auto_reduce: bool) -> Endomorphism:
    words = []
    for g in range(1, rank + 1):
        letters = images[g]
        if not _is_reduced(letters):
            if not auto_reduce:
                raise ParseError(f"image of generator {g} ({labels[g]!r}) is not reduced")
            warnings.warn(f"image of generator {g} ({labels[g]!r}) was not reduced; reducing", UnreducedImageWarning, stacklevel=3)
            words.append(reduce(letters, rank))
        else:
            words.append(Word(letters, rank))
    return Endomorphism(words, rank)


def parse_structured(data: dict | str, auto_reduce: bool = False) -> Endomorphism:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from exc
    if not isinstance(data, dict) or "images" not in data:
        raise ParseError("structured map needs an 'images' array")
    raw = data["images"]
    rank = data.get("rank", len(raw))
    if not isinstance(rank, int) or rank < 1 or len(raw) != rank:
        raise ParseError(f"rank {rank!r} does not match {len(raw)} images")
    images: dict[int, list[int]] = {}
    for g, img in enumerate(raw, start=1):
        if not isinstance(img, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in img):
            raise ParseError(f"image {g} must be a list of signed integers")
        for x in img:
            if x == 0 or abs(x) > rank:
                raise ParseError(f"letter {x} in image {g} is outside rank {rank}")
        images[g] = list(img)
    return _build(images, rank, {g: str(v) for g, v in images.items()}, auto_reduce)


def parse_endomorphism(text: str, auto_reduce: bool = False) -> Endomorphism:
    """Parse either format, deciding by the first non-blank character."""
    if text.lstrip().startswith("{"):
        return parse_structured(text, auto_reduce)
    return parse_rules(text, auto_reduce)


def to_structured(phi: Endomorphism) -> dict:
    return {
        "format": STRUCTURED_FORMAT,
        "rank": phi.rank,
        "images": [list(w.letters) for w in phi.images],
    }


def format_endomorphism(phi: Endomorphism) -> str:
    """Letter format when the rank allows it, JSON otherwise."""
    if phi.rank <= 26:
        return str(phi)
    return json.dumps(to_structured(phi))

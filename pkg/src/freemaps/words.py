"""Reduced words in a free group of finite rank, and endomorphisms of it.

A letter is stored as a nonzero int: ``+g`` is the generator ``a_g`` and
``-g`` its inverse, with ``g`` in ``1..rank``.  Words are immutable tuples of
such ints that never contain an adjacent pair ``(x, -x)``.
"""

from __future__ import annotations

import random
import string
from collections.abc import Iterable, Iterator, Sequence
from typing import NamedTuple, Union

from freemaps.errors import BudgetExceeded, CapExceeded, RankError

DEFAULT_LENGTH_CAP = 10**6
DEFAULT_ENUMERATION_BUDGET = 10**7

_LOWER = string.ascii_lowercase


class Letter(NamedTuple):
    generator: int
    sign: int

    def __int__(self) -> int:
        return self.sign * self.generator

    @classmethod
    def from_int(cls, x: int) -> Letter:
        return cls(abs(x), 1 if x > 0 else -1)


LetterLike = Union[int, Letter]


def _as_int(x: LetterLike, rank: int) -> int:
    if isinstance(x, Letter):
        if x.sign not in (1, -1):
            raise ValueError(f"letter sign must be +1 or -1, got {x.sign}")
        x = x.sign * x.generator
    x = int(x)
    if x == 0 or abs(x) > rank:
        raise RankError(f"letter {x} outside rank {rank}")
    return x


def _letter_str(x: int, rank: int) -> str:
    if rank <= 26:
        c = _LOWER[abs(x) - 1]
        return c if x > 0 else c.upper()
    return str(x)


class Word:
    """A reduced word.  Build one with :func:`reduce` or :meth:`parse`.

    The constructor trusts its input; pass ``check=True`` to validate it.
    """

    __slots__ = ("letters", "rank")

    def __init__(self, letters: Iterable[int] = (), rank: int = 1, check: bool = False):
        self.letters = tuple(letters)
        self.rank = rank
        if check:
            for x in self.letters:
                _as_int(x, rank)
            for x, y in zip(self.letters, self.letters[1:]):
                if x == -y:
                    raise ValueError(f"word is not reduced: {self.letters}")

    @classmethod
    def identity(cls, rank: int) -> Word:
        return cls((), rank)

    @classmethod
    def generator(cls, g: int, rank: int, sign: int = 1) -> Word:
        return cls((_as_int(Letter(g, sign), rank),), rank)

    @classmethod
    def parse(cls, text: str, rank: int) -> Word:
        """Parse ``"abbaB"`` style text (uppercase = inverse, ``1`` = identity).

        The result is reduced; use :func:`freemaps.parsing.parse_word` for the
        strict variant that rejects unreduced input.
        """
        from freemaps.parsing import parse_word

        return parse_word(text, rank, auto_reduce=True)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __getitem__(self, k):
        return self.letters[k]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Word):
            return NotImplemented
        return self.rank == other.rank and self.letters == other.letters

    def __hash__(self) -> int:
        return hash((self.rank, self.letters))

    def __mul__(self, other: Word) -> Word:
        return concat(self, other)

    def __invert__(self) -> Word:
        return invert(self)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        sep = "" if self.rank <= 26 else " "
        return sep.join(_letter_str(x, self.rank) for x in self.letters)

    def __repr__(self) -> str:
        return f"Word({str(self)!r}, rank={self.rank})"

    def inverse(self) -> Word:
        return invert(self)

    def is_identity(self) -> bool:
        return not self.letters


def _cancel_into(stack: list[int], piece: Sequence[int]) -> None:
    # stack and piece are both reduced, so only the seam can cancel
    k = 0
    n = min(len(stack), len(piece))
    while k < n and stack[-1 - k] == -piece[k]:
        k += 1
    if k:
        del stack[-k:]
    stack.extend(piece[k:] if k else piece)


def cancellation_length(u: Sequence[int], v: Sequence[int]) -> int:
    """Number of letters of ``u`` (equivalently of ``v``) cancelled in ``u*v``."""
    k = 0
    n = min(len(u), len(v))
    while k < n and u[-1 - k] == -v[k]:
        k += 1
    return k


def reduce(raw: Iterable[LetterLike], rank: int) -> Word:
    """Freely reduce a sequence of letters."""
    stack: list[int] = []
    for x in raw:
        x = _as_int(x, rank)
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return Word(stack, rank)


def _check_rank(u: Word, v: Word) -> None:
    if u.rank != v.rank:
        raise RankError(f"rank mismatch: {u.rank} vs {v.rank}")


def concat(u: Word, v: Word) -> Word:
    _check_rank(u, v)
    k = cancellation_length(u.letters, v.letters)
    if k == 0:
        return Word(u.letters + v.letters, u.rank)
    return Word(u.letters[: len(u) - k] + v.letters[k:], u.rank)


def invert(w: Word) -> Word:
    return Word(tuple(-x for x in reversed(w.letters)), w.rank)


def letter_count(w: Word, i: int) -> int:
    """How many times ``a_i`` or its inverse occurs in ``w``."""
    if not 1 <= i <= w.rank:
        raise RankError(f"generator {i} outside rank {w.rank}")
    return sum(1 for x in w.letters if x == i or x == -i)


def signed_letter_count(w: Word, i: int) -> int:
    if not 1 <= i <= w.rank:
        raise RankError(f"generator {i} outside rank {w.rank}")
    return sum(1 if x > 0 else -1 for x in w.letters if abs(x) == i)


class Endomorphism:
    """An endomorphism of the free group, given by the images of generators."""

    __slots__ = ("rank", "images", "_inverses")

    def __init__(self, images: Sequence[Word], rank: int | None = None):
        images = tuple(images)
        if rank is None:
            rank = len(images)
        if rank < 1 or len(images) != rank:
            raise RankError(f"need exactly {rank} images, got {len(images)}")
        for k, w in enumerate(images):
            if w.rank != rank:
                raise RankError(f"image of generator {k + 1} has rank {w.rank}, expected {rank}")
        self.rank = rank
        self.images = images
        self._inverses: tuple[Word, ...] | None = None

    @classmethod
    def identity(cls, rank: int) -> Endomorphism:
        return cls([Word((g,), rank) for g in range(1, rank + 1)], rank)

    @classmethod
    def from_lists(cls, images: Sequence[Sequence[LetterLike]], rank: int | None = None) -> Endomorphism:
        """Build from signed-int (or Letter) lists, reducing each image."""
        rank = len(images) if rank is None else rank
        return cls([reduce(img, rank) for img in images], rank)

    @classmethod
    def power_map(cls, d: int) -> Endomorphism:
        """The rank-one map ``a -> a^d``."""
        s = 1 if d >= 0 else -1
        return cls([Word((s,) * abs(d), 1)], 1)

    @property
    def inverse_images(self) -> tuple[Word, ...]:
        if self._inverses is None:
            self._inverses = tuple(invert(w) for w in self.images)
        return self._inverses

    def image(self, i: int) -> Word:
        return self.images[i - 1]

    def __call__(self, w: Word) -> Word:
        return apply(self, w)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Endomorphism):
            return NotImplemented
        return self.rank == other.rank and self.images == other.images

    def __hash__(self) -> int:
        return hash((self.rank, self.images))

    def __repr__(self) -> str:
        return f"Endomorphism({format_rules(self)!r})"

    def __str__(self) -> str:
        return format_rules(self)

    def lengths(self) -> tuple[int, ...]:
        return tuple(len(w) for w in self.images)


def format_rules(phi: Endomorphism) -> str:
    names = [_letter_str(g, phi.rank) for g in range(1, phi.rank + 1)]
    return "; ".join(f"{n}->{w}" for n, w in zip(names, phi.images))


def apply(phi: Endomorphism, w: Word) -> Word:
    if phi.rank != w.rank:
        raise RankError(f"rank mismatch: map has rank {phi.rank}, word has rank {w.rank}")
    images, inverses = phi.images, phi.inverse_images
    stack: list[int] = []
    for x in w.letters:
        _cancel_into(stack, images[x - 1].letters if x > 0 else inverses[-x - 1].letters)
    return Word(stack, phi.rank)


def compose(phi: Endomorphism, psi: Endomorphism) -> Endomorphism:
    """``phi o psi``: first ``psi``, then ``phi``."""
    if phi.rank != psi.rank:
        raise RankError(f"rank mismatch: {phi.rank} vs {psi.rank}")
    return Endomorphism([apply(phi, w) for w in psi.images], phi.rank)


def iterate(phi: Endomorphism, n: int, length_cap: int = DEFAULT_LENGTH_CAP) -> Endomorphism:
    """The ``n``-th power of ``phi``.

    Raises :class:`CapExceeded` as soon as an image of some intermediate power
    is longer than ``length_cap`` letters.
    """
    if n < 1:
        raise ValueError(f"power must be >= 1, got {n}")
    for power in iterate_chain(phi, n, length_cap):
        pass
    return power


def iterate_chain(phi: Endomorphism, n_max: int, length_cap: int = DEFAULT_LENGTH_CAP) -> Iterator[Endomorphism]:
    """Yield ``phi, phi^2, ..., phi^n_max``, sharing the work between powers."""
    _check_cap(phi, 1, length_cap)
    current = phi
    yield current
    for k in range(2, n_max + 1):
        # phi^k(a_i) = phi^(k-1)(phi(a_i)), so only the images of phi are expanded
        current = compose(current, phi)
        _check_cap(current, k, length_cap)
        yield current


def _check_cap(phi: Endomorphism, k: int, cap: int) -> None:
    longest = max(phi.lengths())
    if longest > cap:
        raise CapExceeded(
            f"an image of the {k}-th power has {longest} letters, above the cap of {cap}",
            power=k,
            length=longest,
        )


def count_words_exact(m: int, p: int) -> int:
    """Number of reduced words of length exactly ``p`` in rank ``m``."""
    if m < 1 or p < 0:
        raise ValueError("need m >= 1 and p >= 0")
    if p == 0:
        return 1
    return 2 * m * (2 * m - 1) ** (p - 1)


def count_words_at_most(m: int, p: int) -> int:
    """Size of the ball of radius ``p``."""
    if m < 1 or p < 0:
        raise ValueError("need m >= 1 and p >= 0")
    if m == 1:
        return 2 * p + 1
    return (m * (2 * m - 1) ** p - 1) // (m - 1)


def _alphabet(m: int) -> list[int]:
    out = []
    for g in range(1, m + 1):
        out += [g, -g]
    return out


def enumerate_words(m: int, p: int, budget: int = DEFAULT_ENUMERATION_BUDGET) -> Iterator[Word]:
    """Every reduced word of length <= ``p``, shortest first."""
    total = count_words_at_most(m, p)
    if total > budget:
        raise BudgetExceeded(f"{total} words exceed the budget of {budget}", count=total)
    alphabet = _alphabet(m)
    level: list[tuple[int, ...]] = [()]
    for length in range(p + 1):
        for letters in level:
            yield Word(letters, m)
        if length == p:
            break
        level = [w + (x,) for w in level for x in alphabet if not w or w[-1] != -x]


def sample_uniform_word(m: int, p: int, rng: random.Random) -> Word:
    """A word drawn uniformly from the ball of radius ``p``.

    Uses exact integer arithmetic for the length draw, so it stays uniform
    for any ``p``.
    """
    u = rng.randrange(count_words_at_most(m, p))
    length = 0
    while u >= count_words_exact(m, length):
        u -= count_words_exact(m, length)
        length += 1
    return Word(_random_letters(m, length, rng), m)


def sample_word_of_length(m: int, length: int, rng: random.Random) -> Word:
    return Word(_random_letters(m, length, rng), m)


def _random_letters(m: int, length: int, rng: random.Random) -> list[int]:
    if length == 0:
        return []
    alphabet = _alphabet(m)
    letters = [alphabet[rng.randrange(2 * m)]]
    for _ in range(length - 1):
        # pick among the 2m-1 letters that do not undo the previous one
        k = rng.randrange(2 * m - 1)
        x = alphabet[k]
        if x == -letters[-1]:
            x = alphabet[2 * m - 1]
        letters.append(x)
    return letters

"""Wagner's remnant of an endomorphism, and the sets R_k and S_l."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from freemaps.words import Endomorphism, Word, cancellation_length, letter_count

Span = tuple[int, int]


@dataclass(frozen=True)
class RemnantDecomposition:
    """Per-generator remnant spans.

    ``spans[i - 1]`` is ``(start, end)``, 1-indexed and inclusive, into the
    image of generator ``i``, or ``None`` when that generator has no remnant.
    """

    phi: Endomorphism
    spans: tuple[Optional[Span], ...]

    def span(self, i: int) -> Optional[Span]:
        return self.spans[i - 1]

    def remnant(self, i: int) -> Optional[Word]:
        span = self.spans[i - 1]
        if span is None:
            return None
        start, end = span
        img = self.phi.images[i - 1]
        return Word(img.letters[start - 1 : end], img.rank)

    def remnants(self) -> list[Optional[Word]]:
        return [self.remnant(i) for i in range(1, self.phi.rank + 1)]

    @property
    def has_remnant(self) -> bool:
        return all(s is not None for s in self.spans)

    def lengths(self) -> tuple[int, ...]:
        return tuple(0 if s is None else s[1] - s[0] + 1 for s in self.spans)

    def is_interior(self, i: int, position: int) -> bool:
        """True when ``position`` is inside the remnant of ``a_i``, not at either end."""
        span = self.spans[i - 1]
        return span is not None and span[0] < position < span[1]


def _erosions(phi: Endomorphism, i: int) -> tuple[int, int]:
    x = phi.images[i - 1].letters
    left = right = 0
    for j in range(1, phi.rank + 1):
        img = phi.images[j - 1].letters
        inv = phi.inverse_images[j - 1].letters
        # z * phi(a_i) with z in {phi(a_j), phi(a_j)^-1}, except phi(a_i)^-1
        left = max(left, cancellation_length(img, x))
        right = max(right, cancellation_length(x, img))
        if j != i:
            left = max(left, cancellation_length(inv, x))
            right = max(right, cancellation_length(x, inv))
    return left, right


def remnant_decomposition(phi: Endomorphism) -> RemnantDecomposition:
    spans: list[Optional[Span]] = []
    for i in range(1, phi.rank + 1):
        n = len(phi.images[i - 1])
        if n == 0:
            spans.append(None)
            continue
        left, right = _erosions(phi, i)
        spans.append((left + 1, n - right) if left + right < n else None)
    return RemnantDecomposition(phi, tuple(spans))


def has_remnant(phi: Endomorphism) -> bool:
    return remnant_decomposition(phi).has_remnant


def in_rk(phi: Endomorphism, k: int, decomposition: RemnantDecomposition | None = None) -> bool:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    rd = decomposition or remnant_decomposition(phi)
    return rd.has_remnant and min(rd.lengths()) >= k


def sl_level(phi: Endomorphism, decomposition: RemnantDecomposition | None = None) -> int:
    """Largest ``l`` with ``phi`` in S_l, or 0 if there is none."""
    rd = decomposition or remnant_decomposition(phi)
    if not rd.has_remnant:
        return 0
    m = phi.rank
    return min(letter_count(rem, i) for rem in rd.remnants() for i in range(1, m + 1))


def in_sl(phi: Endomorphism, l: int, decomposition: RemnantDecomposition | None = None) -> bool:
    if l < 1:
        raise ValueError(f"l must be >= 1, got {l}")
    return sl_level(phi, decomposition) >= l


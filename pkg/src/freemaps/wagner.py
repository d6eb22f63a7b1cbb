"""Wagner's algorithm: tails, fixed point classes and the Nielsen number."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from freemaps.errors import NoRemnant
from freemaps.remnant import RemnantDecomposition, remnant_decomposition
from freemaps.words import Endomorphism, Word, signed_letter_count


class UnionFind:
    def __init__(self, n: int = 0):
        self.parent = list(range(n))
        self.size = [1] * n

    def add(self) -> int:
        self.parent.append(len(self.parent))
        self.size.append(1)
        return len(self.parent) - 1

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> int:
        x, y = self.find(x), self.find(y)
        if x == y:
            return x
        if self.size[x] < self.size[y]:
            x, y = y, x
        self.parent[y] = x
        self.size[x] += self.size[y]
        return x


# A boundary word of a tail is always a prefix of phi(a_i) or of phi(a_i)^-1.
# It is keyed as (string id, prefix length) with string id 2*(i-1) for the
# image and 2*(i-1)+1 for its inverse.
Key = tuple[int, int]


@dataclass(frozen=True)
class WagnerTail:
    """A Wagner tail ``(w, wbar)``.

    The base tail ``(1, 1)`` has ``generator=None``.  Other tails come from
    the letter at ``position`` (1-indexed) of ``phi(a_generator)``, which is
    ``a_generator ** exponent``.
    """

    rank: int
    generator: Optional[int] = None
    position: int = 0
    exponent: int = 1
    inside_remnant: bool = False
    image: Optional[Word] = field(default=None, repr=False, compare=False)

    @property
    def is_base(self) -> bool:
        return self.generator is None

    @property
    def index(self) -> int:
        # the base tail gets +1 so that the indices add up to the Lefschetz number
        return 1 if self.is_base else -self.exponent

    def keys(self) -> tuple[Key, Key]:
        if self.is_base:
            return (0, 0), (0, 0)
        n = len(self.image)
        s = 2 * (self.generator - 1)
        if self.exponent == 1:
            return (s, self.position - 1), (s + 1, n - self.position)
        return (s, self.position), (s + 1, n - self.position + 1)

    @property
    def w(self) -> Word:
        if self.is_base:
            return Word.identity(self.rank)
        (_, p), _ = self.keys()
        return Word(self.image.letters[:p], self.rank)

    @property
    def wbar(self) -> Word:
        if self.is_base:
            return Word.identity(self.rank)
        _, (_, p) = self.keys()
        n = len(self.image)
        return Word(tuple(-x for x in reversed(self.image.letters[n - p :])), self.rank)

    def words(self) -> tuple[Word, Word]:
        return self.w, self.wbar

    def __str__(self) -> str:
        return f"({self.w}, {self.wbar})"


def wagner_tails(phi: Endomorphism, decomposition: RemnantDecomposition | None = None) -> list[WagnerTail]:
    """All Wagner tails: the base tail first, then by generator and position."""
    rd = decomposition or remnant_decomposition(phi)
    tails = [WagnerTail(phi.rank)]
    for i, img in enumerate(phi.images, start=1):
        for pos, x in enumerate(img.letters, start=1):
            if x == i or x == -i:
                tails.append(
                    WagnerTail(
                        phi.rank,
                        generator=i,
                        position=pos,
                        exponent=1 if x > 0 else -1,
                        inside_remnant=rd.is_interior(i, pos),
                        image=img,
                    )
                )
    return tails


def directly_related(t1: WagnerTail, t2: WagnerTail) -> bool:
    return bool(set(t1.words()) & set(t2.words()))


@dataclass
class FixedPointClassPartition:
    phi: Endomorphism
    tails: list[WagnerTail]
    classes: list[tuple[int, ...]]
    index_sums: list[int]
    has_remnant: bool

    @property
    def nielsen_count(self) -> int:
        """Number of classes with nonzero index sum."""
        return sum(1 for s in self.index_sums if s != 0)

    @property
    def isolated_count(self) -> int:
        return sum(1 for c in self.classes if len(c) == 1)

    @property
    def w_count(self) -> int:
        return sum(1 for t in self.tails if t.inside_remnant)

    def essential_classes(self) -> list[tuple[int, ...]]:
        return [c for c, s in zip(self.classes, self.index_sums) if s != 0]


def _lcp_table(strings: list[np.ndarray]) -> list[list[int]]:
    k = len(strings)
    lcp = [[0] * k for _ in range(k)]
    for s in range(k):
        lcp[s][s] = len(strings[s])
        for t in range(s + 1, k):
            n = min(len(strings[s]), len(strings[t]))
            diff = np.flatnonzero(strings[s][:n] != strings[t][:n])
            lcp[s][t] = lcp[t][s] = int(diff[0]) if diff.size else n
    return lcp


def fixed_point_classes(phi: Endomorphism, decomposition: RemnantDecomposition | None = None) -> FixedPointClassPartition:
    rd = decomposition or remnant_decomposition(phi)
    tails = wagner_tails(phi, rd)

    strings = []
    for img in phi.images:
        arr = np.asarray(img.letters, dtype=np.int64)
        strings += [arr, -arr[::-1]]
    lcp = _lcp_table(strings)

    def canonical(key: Key) -> Key:
        s, p = key
        if p == 0:
            return (-1, 0)
        row = lcp[s]
        # two prefixes of length p agree iff their strings share p letters
        for t in range(len(strings)):
            if row[t] >= p:
                return (t, p)
        raise AssertionError("unreachable")

    uf = UnionFind(len(tails))
    nodes: dict[Key, int] = {}
    for k, tail in enumerate(tails):
        for key in tail.keys():
            c = canonical(key)
            node = nodes.get(c)
            if node is None:
                nodes[c] = k
            else:
                uf.union(node, k)

    blocks: dict[int, list[int]] = {}
    for k in range(len(tails)):
        blocks.setdefault(uf.find(k), []).append(k)
    classes = sorted((tuple(b) for b in blocks.values()), key=lambda c: c[0])
    sums = [sum(tails[k].index for k in c) for c in classes]
    return FixedPointClassPartition(phi, tails, classes, sums, rd.has_remnant)


def _certified(phi: Endomorphism, require_remnant: bool) -> FixedPointClassPartition:
    part = fixed_point_classes(phi)
    if require_remnant and not part.has_remnant:
        raise NoRemnant(f"{phi} does not have remnant; Wagner's count is not certified", partition=part)
    return part


def nielsen_number(phi: Endomorphism, require_remnant: bool = True) -> int:
    """Nielsen number of a map inducing ``phi``.

    With ``require_remnant=False`` the class count is returned even when
    Wagner's theorem does not apply.
    """
    return _certified(phi, require_remnant).nielsen_count


def isolated_tail_count(phi: Endomorphism, require_remnant: bool = True) -> int:
    return _certified(phi, require_remnant).isolated_count


def w_count(phi: Endomorphism, require_remnant: bool = True) -> int:
    rd = remnant_decomposition(phi)
    if require_remnant and not rd.has_remnant:
        raise NoRemnant(f"{phi} does not have remnant")
    total = 0
    for i, img in enumerate(phi.images, start=1):
        total += sum(1 for pos, x in enumerate(img.letters, start=1) if abs(x) == i and rd.is_interior(i, pos))
    return total


def lefschetz_number(phi: Endomorphism) -> int:
    return 1 - sum(signed_letter_count(phi.images[i - 1], i) for i in range(1, phi.rank + 1))

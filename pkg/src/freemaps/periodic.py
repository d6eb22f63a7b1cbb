"""Periodic points of the standard form map, encoded by addresses.

A location is the 1-based position of a letter in the concatenation
``phi(a_1) phi(a_2) ... phi(a_m)``.  Block ``i`` holds the locations of
``phi(a_i)``.  The location graph has an edge ``r -> r'`` whenever ``r'`` is in
the block of the generator of the letter at ``r`` (the sign is ignored).  A
fixed point of the ``n``-th power other than the base point corresponds to a
closed walk ``(r_1, ..., r_n)`` in this graph, its address.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass
from functools import cached_property

from freemaps.dynamics import OccurrenceMatrix, occurrence_matrix
from freemaps.errors import BudgetExceeded, NotInSl
from freemaps.remnant import remnant_decomposition, sl_level
from freemaps.words import Endomorphism

DEFAULT_BUDGET = 10**6

Address = tuple[int, ...]


@dataclass(frozen=True)
class Location:
    r: int
    block: int
    position: int
    letter: int

    @property
    def generator(self) -> int:
        return abs(self.letter)

    @property
    def sign(self) -> int:
        return 1 if self.letter > 0 else -1


class LocationTable:
    def __init__(self, phi: Endomorphism):
        self.phi = phi
        sums = [0]
        for img in phi.images:
            sums.append(sums[-1] + len(img))
        self.prefix_sums = tuple(sums)
        self.locations = tuple(
            Location(sums[i - 1] + pos, i, pos, x)
            for i, img in enumerate(phi.images, start=1)
            for pos, x in enumerate(img.letters, start=1)
        )

    def __len__(self) -> int:
        return self.prefix_sums[-1]

    def __getitem__(self, r: int) -> Location:
        if not 1 <= r <= len(self):
            raise IndexError(f"location {r} outside 1..{len(self)}")
        return self.locations[r - 1]

    def block_range(self, i: int) -> range:
        return range(self.prefix_sums[i - 1] + 1, self.prefix_sums[i] + 1)

    def block_of(self, r: int) -> int:
        return self[r].block

    def location_of(self, i: int, position: int) -> int:
        return self.prefix_sums[i - 1] + position

    def is_round_trip(self, address: Address) -> bool:
        n = len(address)
        return n > 0 and all(
            address[(t + 1) % n] in self.block_range(self[address[t]].generator) for t in range(n)
        )


def location_table(phi: Endomorphism) -> LocationTable:
    return LocationTable(phi)


def fixed_point_count(phi: Endomorphism, n: int) -> int:
    """Fixed points of the ``n``-th power of the standard form, base point included."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 1 + occurrence_matrix(phi).power(n).trace()


class _Walker:
    """Shared state for depth-first walks in the location graph."""

    def __init__(self, phi: Endomorphism, n: int):
        self.table = LocationTable(phi)
        self.n = n
        B = occurrence_matrix(phi)
        # reach[k][g][i]: some k further locations lead from block g to a letter of a_i
        self.reach = [[[v > 0 for v in row] for row in B.power(k).rows] for k in range(n)]

    @cached_property
    def total(self) -> int:
        return occurrence_matrix(self.table.phi).power(self.n).trace()

    def check_budget(self, budget: int) -> None:
        if self.total > budget:
            raise BudgetExceeded(f"{self.total} round trips exceed the budget of {budget}", count=self.total)


def enumerate_round_trips(phi: Endomorphism, n: int, budget: int = DEFAULT_BUDGET) -> Iterator[Address]:
    """Every closed walk of length ``n``, in lexicographic order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    walker = _Walker(phi, n)
    walker.check_budget(budget)
    table, reach = walker.table, walker.reach
    path: list[int] = []

    def extend(block: int, target: int) -> Iterator[Address]:
        remaining = n - len(path) - 1
        for r in table.block_range(block):
            g = table[r].generator
            if not reach[remaining][g - 1][target - 1]:
                continue
            path.append(r)
            if remaining == 0:
                yield tuple(path)
            else:
                yield from extend(g, target)
            path.pop()

    for r1 in range(1, len(table) + 1):
        loc = table[r1]
        if not reach[n - 1][loc.generator - 1][loc.block - 1]:
            continue
        path.append(r1)
        if n == 1:
            yield (r1,)
        else:
            yield from extend(loc.generator, loc.block)
        path.pop()


def minimal_period(address: Address) -> int:
    n = len(address)
    for d in range(1, n + 1):
        if n % d == 0 and all(address[t] == address[t % d] for t in range(n)):
            return d
    raise ValueError("empty address")


def orbit_of(address: Address) -> list[Address]:
    """Distinct cyclic shifts, starting with ``address`` itself."""
    return [address[k:] + address[:k] for k in range(minimal_period(address))]


@dataclass(frozen=True)
class PeriodicPointRecord:
    label: int
    address: Address
    minimal_period: int
    orbit: tuple[int, ...]

    def name(self, n: int) -> str:
        return f"{self.label}_{n}"


def _scan_addresses(phi: Endomorphism, n: int, walker: _Walker) -> Iterator[Address]:
    # Depth-first over the unreduced expansion of phi^n(a_i): the letter at
    # location r is expanded into phi(a_g)^s with s the accumulated sign, so a
    # block is read backwards under an odd number of inverse letters.
    table, reach = walker.table, walker.reach
    path: list[int] = []

    def expand(block: int, orientation: int, target: int) -> Iterator[Address]:
        remaining = n - len(path) - 1
        rng = table.block_range(block)
        for r in rng if orientation > 0 else reversed(rng):
            loc = table[r]
            if not reach[remaining][loc.generator - 1][target - 1]:
                continue
            path.append(r)
            if remaining == 0:
                yield tuple(path)
            else:
                yield from expand(loc.generator, orientation * loc.sign, target)
            path.pop()

    for i in range(1, phi.rank + 1):
        yield from expand(i, 1, i)


def label_fixed_points(phi: Endomorphism, n: int, budget: int = DEFAULT_BUDGET) -> list[PeriodicPointRecord]:
    """Label the fixed points of the ``n``-th power as ``0_n, 1_n, ...``.

    Label ``k`` goes to the ``k``-th occurrence of ``a_i`` or its inverse in the
    unreduced ``phi^n(a_i)``, counted left to right over ``i = 1..m``; label 0
    is the base point with the empty address.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    walker = _Walker(phi, n)
    walker.check_budget(budget)
    addresses = list(_scan_addresses(phi, n, walker))
    label_of = {a: k for k, a in enumerate(addresses, start=1)}
    records = [PeriodicPointRecord(0, (), 1, (0,))]
    for k, a in enumerate(addresses, start=1):
        orbit = tuple(label_of[b] for b in orbit_of(a))
        records.append(PeriodicPointRecord(k, a, len(orbit), orbit))
    return records


def minimal_period_census(phi: Endomorphism, n: int, budget: int = DEFAULT_BUDGET) -> dict[int, int]:
    """Round trips of length ``n`` grouped by minimal period (every divisor listed)."""
    census = {d: 0 for d in divisors(n)}
    for a in enumerate_round_trips(phi, n, budget):
        census[minimal_period(a)] += 1
    return census


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def mobius(n: int) -> int:
    result, k = 1, 2
    while k * k <= n:
        if n % k == 0:
            n //= k
            if n % k == 0:
                return 0
            result = -result
        k += 1
    return -result if n > 1 else result


def primitive_walk_count(B: OccurrenceMatrix, d: int) -> int:
    """Closed walks of length ``d`` whose minimal period is exactly ``d``."""
    return sum(mobius(d // e) * B.power(e).trace() for e in divisors(d))


def mobius_census(phi: Endomorphism, n: int) -> dict[int, int]:
    """Same table as :func:`minimal_period_census`, from traces alone."""
    B = occurrence_matrix(phi)
    return {d: primitive_walk_count(B, d) for d in divisors(n)}


def _certified_setup(phi: Endomorphism, l: int, n: int):
    if n < 2:
        raise ValueError("the construction needs n >= 2")
    rd = remnant_decomposition(phi)
    level = sl_level(phi, rd)
    if l < 1 or level < l:
        raise NotInSl(f"{phi} is not in S_{l}", level=level)
    return rd, LocationTable(phi)


def certified_minimal_addresses(phi: Endomorphism, l: int, n: int, budget: int = DEFAULT_BUDGET) -> Iterator[Address]:
    """Addresses built by the minimal-period construction for maps in S_l.

    For each block ``k``: ``r_1`` is a letter strictly inside the remnant of
    ``a_k`` whose generator is not ``a_k``; ``r_2..r_{n-1}`` follow the
    location graph avoiding letters of ``a_k``; ``r_n`` is a letter of ``a_k``.
    No later location can revisit block ``k``, so each address has minimal
    period ``n``.
    """
    total = certified_minimal_points(phi, l, n)
    if total > budget:
        raise BudgetExceeded(f"{total} addresses exceed the budget of {budget}", count=total)
    rd, table = _certified_setup(phi, l, n)
    path: list[int] = []

    def extend(block: int, k: int) -> Iterator[Address]:
        last = len(path) == n - 1
        for r in table.block_range(block):
            g = table[r].generator
            if (g == k) != last:
                continue
            path.append(r)
            if last:
                yield tuple(path)
            else:
                yield from extend(g, k)
            path.pop()

    for k in range(1, phi.rank + 1):
        for r1 in table.block_range(k):
            loc = table[r1]
            if loc.generator == k or not rd.is_interior(k, loc.position):
                continue
            path.append(r1)
            yield from extend(loc.generator, k)
            path.pop()


def certified_minimal_points(phi: Endomorphism, l: int, n: int) -> int:
    """Number of addresses produced by :func:`certified_minimal_addresses`."""
    rd, table = _certified_setup(phi, l, n)
    B = occurrence_matrix(phi).rows
    m = phi.rank
    total = 0
    for k in range(1, m + 1):
        counts = [0] * m
        for r1 in table.block_range(k):
            loc = table[r1]
            if loc.generator != k and rd.is_interior(k, loc.position):
                counts[loc.generator - 1] += 1
        for _ in range(n - 2):
            counts = [
                0 if j == k - 1 else sum(counts[g] * B[g][j] for g in range(m))
                for j in range(m)
            ]
        total += sum(counts[g] * B[g][k - 1] for g in range(m))
    return total

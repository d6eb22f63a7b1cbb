"""Exact and Monte Carlo densities of sets of endomorphisms.

An endomorphism of rank ``m`` is an ``m``-tuple of words; the density at
radius ``p`` is the fraction of tuples in the ball ``G_p^m`` that satisfy a
predicate.

Sampling is split into fixed-size chunks, and chunk ``c`` draws from
``random.Random(f"{seed}:{c}")``.  Estimates therefore depend only on the seed
and the sample count, never on how many worker processes ran the chunks.
"""

from __future__ import annotations

import itertools
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from statistics import NormalDist
from typing import Callable, Optional, Sequence

from freemaps.errors import BudgetExceeded, DomainError
from freemaps.remnant import in_rk, in_sl, remnant_decomposition
from freemaps.words import Endomorphism, count_words_at_most, enumerate_words, sample_uniform_word

CHUNK_SIZE = 1000
CONFIDENCE = 0.99
DEFAULT_EXACT_BUDGET = 10**6

CSV_COLUMNS = ("m", "p", "predicate", "samples", "hits", "estimate", "ci_lo", "ci_hi", "seed")


@dataclass(frozen=True)
class Predicate:
    """A named, picklable endomorphism predicate.

    ``kind`` is one of ``remnant``, ``Rk``, ``Sl``, ``true``, ``false``.
    """

    kind: str
    param: int = 0

    def __call__(self, phi: Endomorphism) -> bool:
        if self.kind == "remnant":
            return remnant_decomposition(phi).has_remnant
        if self.kind == "Rk":
            return in_rk(phi, self.param)
        if self.kind == "Sl":
            return in_sl(phi, self.param)
        if self.kind == "true":
            return True
        if self.kind == "false":
            return False
        raise ValueError(f"unknown predicate kind {self.kind!r}")

    @property
    def name(self) -> str:
        return f"{self.kind}={self.param}" if self.kind in ("Rk", "Sl") else self.kind


def parse_predicate(text: str) -> Predicate:
    """``remnant``, ``Rk=<k>``, ``Sl=<l>``, ``true`` or ``false``."""
    text = text.strip()
    if text in ("remnant", "true", "false"):
        return Predicate(text)
    kind, sep, value = text.partition("=")
    if sep and kind in ("Rk", "Sl") and value.strip().isdigit() and int(value) >= 1:
        return Predicate(kind, int(value))
    raise ValueError(f"unknown predicate {text!r}; expected remnant, Rk=<k>, Sl=<l>, true or false")


def wilson_interval(hits: int, n: int, confidence: float = CONFIDENCE) -> tuple[float, float]:
    if n <= 0:
        raise ValueError("need at least one trial")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    phat = hits / n
    denom = 1 + z * z / n
    centre = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass(frozen=True)
class DensityEstimate:
    m: int
    p: int
    predicate: str
    samples: int
    hits: int
    estimate: float
    ci_lo: float
    ci_hi: float
    seed: Optional[int]

    def contains(self, value: float) -> bool:
        return self.ci_lo <= value <= self.ci_hi

    def as_row(self) -> dict:
        return asdict(self)


def sample_endomorphism(m: int, p: int, rng: random.Random) -> Endomorphism:
    """``m`` independent uniform draws from the ball of radius ``p``."""
    if m < 1 or p < 0:
        raise ValueError("need m >= 1 and p >= 0")
    return Endomorphism([sample_uniform_word(m, p, rng) for _ in range(m)], m)


def chunk_rng(seed: int, chunk: int) -> random.Random:
    return random.Random(f"{seed}:{chunk}")


def _chunks(samples: int) -> list[tuple[int, int]]:
    return [(c, min(CHUNK_SIZE, samples - c * CHUNK_SIZE)) for c in range(math.ceil(samples / CHUNK_SIZE))]


class PredicateError(RuntimeError):
    def __init__(self, sample_index: int, cause: BaseException):
        super().__init__(f"predicate failed on sample {sample_index}: {cause!r}")
        self.sample_index = sample_index


def _run_chunk(args: tuple[Callable[[Endomorphism], bool], int, int, int, int, int]) -> int:
    predicate, m, p, seed, chunk, size = args
    rng = chunk_rng(seed, chunk)
    hits = 0
    for k in range(size):
        phi = sample_endomorphism(m, p, rng)
        try:
            hits += bool(predicate(phi))
        except Exception as exc:
            raise PredicateError(chunk * CHUNK_SIZE + k, exc) from exc
    return hits


def _predicate_name(predicate) -> str:
    return getattr(predicate, "name", None) or getattr(predicate, "__name__", repr(predicate))


def estimate_density(predicate: Callable[[Endomorphism], bool], m: int, p: int, samples: int, seed: int, workers: int = 1) -> DensityEstimate:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    jobs = [(predicate, m, p, seed, c, size) for c, size in _chunks(samples)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(_run_chunk, jobs))
    else:
        hits = sum(map(_run_chunk, jobs))
    lo, hi = wilson_interval(hits, samples)
    return DensityEstimate(m, p, _predicate_name(predicate), samples, hits, hits / samples, lo, hi, seed)


def exact_density(predicate: Callable[[Endomorphism], bool], m: int, p: int, budget: int = DEFAULT_EXACT_BUDGET) -> Fraction:
    """Exact fraction of the ``|G_p|^m`` tuples that satisfy ``predicate``."""
    total = count_words_at_most(m, p) ** m
    if total > budget:
        raise BudgetExceeded(f"{total} maps exceed the budget of {budget}", count=total)
    ball = list(enumerate_words(m, p))
    hits = sum(1 for images in itertools.product(ball, repeat=m) if predicate(Endomorphism(images, m)))
    return Fraction(hits, total)


def conditional_complement_bound(m: int, k: int) -> float:
    """Upper bound on the share of R_k maps outside S_1: ``((2m-3)/(2m-1))^(k-2)``."""
    if m < 2:
        raise DomainError("the bound needs rank m >= 2")
    if k < 2:
        raise DomainError("the bound needs k >= 2")
    return ((2 * m - 3) / (2 * m - 1)) ** (k - 2)


def density_curve(predicate: Callable[[Endomorphism], bool], m: int, p_list: Sequence[int], samples: int, seed: int, workers: int = 1) -> list[DensityEstimate]:
    return [estimate_density(predicate, m, p, samples, seed, workers) for p in p_list]


@dataclass(frozen=True)
class ConditionalCount:
    """Among sampled maps in R_k, how many fall outside S_1."""

    m: int
    p: int
    k: int
    in_rk: int
    outside_s1: int
    bound: float

    @property
    def fraction(self) -> float:
        return self.outside_s1 / self.in_rk if self.in_rk else 0.0

    @property
    def sigma(self) -> float:
        """Binomial standard deviation of the fraction if it sat exactly at the bound."""
        return math.sqrt(self.bound * (1 - self.bound) / self.in_rk) if self.in_rk else math.inf


def conditional_complement_counts(m: int, p: int, ks: Sequence[int], samples: int, seed: int) -> list[ConditionalCount]:
    """One shared sample of maps, conditioned on R_k for each ``k`` in ``ks``."""
    counts = {k: [0, 0] for k in ks}
    for c, size in _chunks(samples):
        rng = chunk_rng(seed, c)
        for _ in range(size):
            phi = sample_endomorphism(m, p, rng)
            rd = remnant_decomposition(phi)
            if not rd.has_remnant:
                continue
            shortest = min(rd.lengths())
            outside = not in_sl(phi, 1, rd)
            for k in ks:
                if shortest >= k:
                    counts[k][0] += 1
                    counts[k][1] += outside
    return [ConditionalCount(m, p, k, a, b, conditional_complement_bound(m, k)) for k, (a, b) in counts.items()]

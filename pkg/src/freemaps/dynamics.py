"""Growth invariants: Nielsen number sequences, spectral bounds, entropy."""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from freemaps.errors import CapExceeded, NoRemnant, NonConvergence, NotInSl
from freemaps.remnant import remnant_decomposition, sl_level
from freemaps.wagner import fixed_point_classes, lefschetz_number
from freemaps.words import DEFAULT_LENGTH_CAP, Endomorphism, iterate_chain, letter_count

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 10**5


@dataclass(frozen=True)
class OccurrenceMatrix:
    """Square matrix of nonnegative Python ints."""

    rows: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def transpose(self) -> OccurrenceMatrix:
        return OccurrenceMatrix(tuple(zip(*self.rows)))

    def to_numpy(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def __matmul__(self, other: OccurrenceMatrix) -> OccurrenceMatrix:
        cols = list(zip(*other.rows))
        return OccurrenceMatrix(tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.rows))

    def power(self, n: int) -> OccurrenceMatrix:
        """Exact ``n``-th power (``n >= 0``) by repeated squaring."""
        k = self.size
        result = OccurrenceMatrix(tuple(tuple(int(i == j) for j in range(k)) for i in range(k)))
        base = self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def trace(self) -> int:
        return sum(self.rows[i][i] for i in range(self.size))

    def row_sums(self) -> tuple[int, ...]:
        return tuple(sum(r) for r in self.rows)


def occurrence_matrix(phi: Endomorphism) -> OccurrenceMatrix:
    """``B[i][j]`` = occurrences of ``a_j`` or its inverse in ``phi(a_i)`` (0-indexed)."""
    m = phi.rank
    return OccurrenceMatrix(tuple(tuple(letter_count(img, j) for j in range(1, m + 1)) for img in phi.images))


def fox_magnitude_matrix(phi: Endomorphism) -> OccurrenceMatrix:
    """Entrywise magnitude of the Fox Jacobian: entry ``(i, j)`` counts ``a_i`` in ``phi(a_j)``."""
    return occurrence_matrix(phi).transpose()


@dataclass(frozen=True)
class SpectralRadius:
    value: float
    lower: float
    upper: float
    iterations: int

    def __float__(self) -> float:
        return self.value


def _perron_root(a: np.ndarray, tol: float, max_iter: int) -> SpectralRadius:
    # a is irreducible; a + I is then primitive, so the Collatz-Wielandt
    # bracket of the power iterates closes
    k = a.shape[0]
    shifted = a + np.eye(k)
    x = np.ones(k)
    lo, hi = 0.0, math.inf
    for it in range(1, max_iter + 1):
        y = shifted @ x
        ratios = y / x
        lo, hi = max(lo, float(ratios.min())), min(hi, float(ratios.max()))
        if hi - lo <= 2 * tol:
            return SpectralRadius((lo + hi) / 2 - 1, lo - 1, hi - 1, it)
        x = y / y.max()
    raise NonConvergence("power iteration did not converge", lo - 1, hi - 1)


def spectral_radius(matrix: OccurrenceMatrix | Sequence[Sequence[float]] | np.ndarray, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> SpectralRadius:
    """Perron root of a nonnegative square matrix with a certified bracket.

    The matrix is split into strongly connected components; each irreducible
    block is handled by shifted power iteration, and ``lower``/``upper`` are
    Collatz-Wielandt bounds that bracket the returned value.
    """
    if isinstance(matrix, OccurrenceMatrix):
        a = matrix.to_numpy()
    else:
        a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if (a < 0).any():
        raise ValueError("matrix must be nonnegative")
    if a.shape[0] == 0:
        return SpectralRadius(0.0, 0.0, 0.0, 0)

    n_comp, labels = connected_components(csr_matrix(a > 0), directed=True, connection="strong")
    best = SpectralRadius(0.0, 0.0, 0.0, 0)
    iterations = 0
    for c in range(n_comp):
        idx = np.flatnonzero(labels == c)
        block = a[np.ix_(idx, idx)]
        if len(idx) == 1 and block[0, 0] == 0:
            continue
        r = _perron_root(block, tol, max_iter)
        iterations += r.iterations
        if r.value > best.value:
            best = r
    return SpectralRadius(best.value, best.lower, best.upper, iterations)


@dataclass(frozen=True)
class AsymptoticBounds:
    """Bounds on the asymptotic Nielsen number.

    ``lower`` is ``l*m`` when membership in S_l is proven, else ``None``.
    ``upper`` is Jiang's bound (as cited): ``max(1, spectral radius)``.
    """

    lower: Optional[float]
    upper: float
    spectral: SpectralRadius
    level: int
    note: str = ""


def asymptotic_bounds(phi: Endomorphism, l: Optional[int] = None, require_lower: bool = False, tol: float = DEFAULT_TOL) -> AsymptoticBounds:
    """``(l*m, max(1, rho))``.

    When ``l`` is None the largest ``l`` with ``phi`` in S_l is used.  If
    ``phi`` is not in S_l the lower bound is ``None`` (or :class:`NotInSl` is
    raised when ``require_lower`` is set).
    """
    rho = spectral_radius(fox_magnitude_matrix(phi), tol)
    upper = max(1.0, rho.value)
    level = sl_level(phi)
    if l is None:
        l = level
    if l >= 1 and level >= l:
        return AsymptoticBounds(float(l * phi.rank), upper, rho, level)
    note = f"not in S_{l}" if l >= 1 else "not in S_1"
    if require_lower:
        raise NotInSl(f"{phi} is {note}; lower bound refused", level=level)
    return AsymptoticBounds(None, upper, rho, level, note)


@dataclass(frozen=True)
class ClosedFormBounds:
    l: int
    m: int
    n: int
    w_bound: int
    pn_bound: Optional[int]
    remnant_letter_bound: int

    @property
    def w_bound_clamped(self) -> int:
        return max(0, self.w_bound)

    @property
    def pn_bound_clamped(self) -> Optional[int]:
        return None if self.pn_bound is None else max(0, self.pn_bound)


def closed_form_bounds(l: int, m: int, n: int) -> ClosedFormBounds:
    """The three lower bounds for maps in S_l, reported raw (possibly negative).

    ``pn_bound`` needs ``n >= 2``; it is ``None`` for ``n = 1`` where the
    formula has a negative power of ``m - 1``.
    """
    if l < 1 or m < 1 or n < 1:
        raise ValueError("need l, m, n >= 1")
    w = l**n * m**n - 2 * m
    pn = m * ((m - 1) * l - 2) * (m - 1) ** (n - 2) * l ** (n - 1) if n >= 2 else None
    return ClosedFormBounds(l, m, n, w, pn, l**n * m ** (n - 1))


@dataclass(frozen=True)
class NielsenRow:
    n: int
    nielsen: int
    root: float
    w_count: int
    isolated: int
    lefschetz: int
    elapsed: float


@dataclass
class NielsenSequence:
    rows: list[NielsenRow] = field(default_factory=list)
    stopped_at: Optional[int] = None
    reason: str = ""


def nielsen_row(n: int, power: Endomorphism) -> NielsenRow:
    """Wagner's algorithm on an already computed ``n``-th power."""
    t0 = time.perf_counter()
    part = fixed_point_classes(power)
    if not part.has_remnant:
        raise NoRemnant(f"power {n} does not have remnant", partition=part)
    N = part.nielsen_count
    return NielsenRow(n, N, N ** (1.0 / n), part.w_count, part.isolated_count, lefschetz_number(power), time.perf_counter() - t0)


def nielsen_sequence(phi: Endomorphism, n_max: int, length_cap: int = DEFAULT_LENGTH_CAP, workers: int = 1) -> NielsenSequence:
    """``N(phi^n)`` for ``n = 1..n_max``.

    Stops early, recording ``stopped_at``, when an iterate passes
    ``length_cap``.  ``elapsed`` in each row covers the Wagner step only.
    """
    if not remnant_decomposition(phi).has_remnant:
        raise NoRemnant(f"{phi} does not have remnant")
    seq = NielsenSequence()
    powers: list[tuple[int, Endomorphism]] = []
    try:
        for n, power in enumerate(iterate_chain(phi, n_max, length_cap), start=1):
            powers.append((n, power))
    except CapExceeded as exc:
        seq.stopped_at = exc.power
        seq.reason = str(exc)
    if workers > 1 and len(powers) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            seq.rows = list(pool.map(nielsen_row, *zip(*powers)))
    else:
        seq.rows = [nielsen_row(n, p) for n, p in powers]
    return seq


@dataclass(frozen=True)
class EntropyEstimates:
    lengths: tuple[int, ...]
    rates: tuple[float, ...]
    estimate: float
    lower_bound: Optional[float]
    level: int


def entropy_estimates(phi: Endomorphism, n_max: int, length_cap: int = DEFAULT_LENGTH_CAP, l: Optional[int] = None) -> EntropyEstimates:
    """Finite-``n`` estimate of the fundamental group entropy.

    ``rates[n-1]`` is ``log(L_n)/n`` with ``L_n`` the longest image of
    ``phi^n`` (a trivial image counts as length 1).  ``lower_bound`` is
    ``log(l*m)`` when ``phi`` is in S_l.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    lengths = tuple(max(p.lengths()) for p in iterate_chain(phi, n_max, length_cap))
    rates = tuple(math.log(max(L, 1)) / n for n, L in enumerate(lengths, start=1))
    level = sl_level(phi)
    if l is None:
        l = level
    lower = math.log(l * phi.rank) if l >= 1 and level >= l else None
    return EntropyEstimates(lengths, rates, rates[-1], lower, level)

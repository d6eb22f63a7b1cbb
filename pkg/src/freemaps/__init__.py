"""Nielsen fixed point invariants of endomorphisms of finitely generated free groups."""

from freemaps.errors import (
    BudgetExceeded,
    CapExceeded,
    DomainError,
    FreemapsError,
    NoRemnant,
    NonConvergence,
    NotInSl,
    ParseError,
    RankError,
)
from freemaps.parsing import parse_endomorphism
from freemaps.remnant import has_remnant, in_rk, in_sl, remnant_decomposition
from freemaps.wagner import fixed_point_classes, lefschetz_number, nielsen_number
from freemaps.words import Endomorphism, Letter, Word, apply, compose, concat, invert, iterate, reduce

__version__ = "0.1.0"

# --- tests/conftest.py ---
import logging
import os
import sys
from fractions import Fraction

import pytest
from hypothesis import strategies as st

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from lattice_core import ALL, EVEN, ODD, ResidueMask, make_term, seq_element  # noqa: E402
import pl_functions as plf  # noqa: E402

SMALL_RATIOS = [Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1)]
MASKS = [ALL, ODD, EVEN, ResidueMask(3, 0), ResidueMask(3, 1), ResidueMask(3, 2)]

rationals = st.fractions(min_value=-4, max_value=4, max_denominator=6)
positive_rationals = st.fractions(min_value=Fraction(1, 6), max_value=4, max_denominator=6)
masks = st.sampled_from(MASKS)
ratios = st.sampled_from(SMALL_RATIOS)


@st.composite
def tail_terms(draw):
    return make_term(draw(rationals), draw(ratios), draw(masks))


@st.composite
def seq_elements(draw, max_overrides: int = 4, max_terms: int = 3):
    overrides = draw(st.dictionaries(st.integers(min_value=1, max_value=8), rationals, max_size=max_overrides))
    terms = draw(st.lists(tail_terms(), max_size=max_terms))
    start = draw(st.integers(min_value=max(overrides, default=0) + 1, max_value=10))
    return seq_element(overrides, terms, start)


@st.composite
def pl_functions(draw, continuous: bool = False):
    """Funkcje PL na siatce o mianowniku 8; z continuous=True łamane przez wierzchołki."""
    inner = draw(st.lists(st.integers(min_value=1, max_value=7), max_size=3, unique=True))
    grid = [Fraction(0)] + sorted(Fraction(k, 8) for k in inner) + [Fraction(1)]
    if continuous:
        return plf.pl_from_vertices([(x, draw(rationals)) for x in grid])
    pieces = [(draw(rationals), draw(rationals)) for _ in grid[1:]]
    values = [draw(rationals) for _ in grid]
    return plf.pl_from_pieces(grid, pieces, values)


def sample_points():
    """Punkty kontrolne: siatka 1/16 plus punkty wewnątrz przedziałów siatki 1/8."""
    return sorted({Fraction(k, 16) for k in range(17)} | {Fraction(2 * k + 1, 32) for k in range(16)})


@pytest.fixture(autouse=True)
def _quiet_library_logs():
    logging.getLogger().setLevel(logging.WARNING)
    yield

# --- sequences.py ---
"""
Generatory rodzin elementów (ElementSequence) indeksowanych przez n >= 1.

Każdy generator to niemutowalny opis z polem `space` i metodą `to_form()`,
która sprowadza go do postaci normalnej z family_forms. Świadkowie
(WitnessSequence) używają tej samej gramatyki; o ich poprawności decyduje
convergence.check_decreasing_null.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Optional, Tuple, Union

import family_forms as ff
from errors import DomainMismatch, IllFormedGrammar, Unsupported
from family_forms import RankTerm, Window
from lattice_core import (ALL, PL_SPACES, SEQUENCE_SPACES, ResidueMask, SeqElement, SpaceTag, TailTerm, constant,
                          element_zero, exact_root, seq_element, seq_restrict_mask, seq_scale, to_rat, unit_vector)
from pl_functions import PLFunction

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Constant:
    element: Any
    space: SpaceTag = SpaceTag.C

    def to_form(self):
        return ff.form_constant(self.element, self.space)


@dataclass(frozen=True)
class PrefixSum:
    """a_n = suma pattern(j)·e_j po pierwszych n indeksach j zgodnych z maską."""
    mask: ResidueMask = ALL
    pattern: SeqElement = constant(1)
    space: SpaceTag = SpaceTag.C

    def to_form(self):
        m, s = self.mask
        first = s if s >= 1 else m
        return ff.seq_form(windows=[Window(m, first - m, seq_restrict_mask(self.pattern, self.mask))], space=self.space)


@dataclass(frozen=True)
class ScaledBasisSum:
    """a_n = suma_{k<=n} coeff·ratio^k · e_{slope·k + offset}."""
    coeff: Fraction
    ratio: Fraction
    slope: int = 1
    offset: int = 0
    space: SpaceTag = SpaceTag.C

    def to_form(self):
        if self.slope < 1 or self.slope + self.offset < 1:
            raise IllFormedGrammar(f"Indeksy slope·k + offset muszą być >= 1 (slope={self.slope}, offset={self.offset})")
        root = exact_root(to_rat(self.ratio), self.slope)
        if root is None or root == 0:
            raise Unsupported(f"Iloraz {self.ratio} nie ma dokładnego pierwiastka stopnia {self.slope}")
        mask = ResidueMask(self.slope, self.offset % self.slope)
        # j = slope·k + offset  =>  ratio^k = root^(j - offset)
        term = TailTerm(to_rat(self.coeff) * root ** (-self.offset), root, mask)
        pattern = seq_element({}, [term], self.slope + self.offset)
        return ff.seq_form(windows=[Window(self.slope, self.offset, pattern)], space=self.space)


@dataclass(frozen=True)
class BasisVectors:
    """a_n = coeff·e_{slope·n + offset}."""
    slope: int = 1
    offset: int = 0
    coeff: Fraction = Fraction(1)
    space: SpaceTag = SpaceTag.C0

    def to_form(self):
        if self.slope < 1 or self.slope + self.offset < 1:
            raise IllFormedGrammar(f"Indeksy slope·n + offset muszą być >= 1 (slope={self.slope}, offset={self.offset})")
        level = constant(to_rat(self.coeff))
        return ff.seq_form(windows=[Window(self.slope, self.offset, level),
                                    Window(self.slope, self.offset - 1, constant(-to_rat(self.coeff)))],
                           space=self.space)


@dataclass(frozen=True)
class TailTruncation:
    """a_n = base·[j > slope·n + offset]."""
    base: SeqElement
    slope: int = 1
    offset: int = 0
    space: SpaceTag = SpaceTag.C

    def to_form(self):
        return ff.seq_form(head=self.base, windows=[Window(self.slope, self.offset, seq_scale(-1, self.base))],
                           space=self.space)


@dataclass(frozen=True)
class PLFamily:
    """alpha·phi_n + beta·rho_n + base w C[0,1] lub L1."""
    alpha: Fraction = Fraction(1)
    beta: Fraction = Fraction(0)
    base: Optional[PLFunction] = None
    space: SpaceTag = SpaceTag.L1

    def to_form(self):
        if self.space not in (SpaceTag.C01, SpaceTag.L1):
            raise DomainMismatch(f"Rodzina PL wymaga przestrzeni C01 lub L1 (otrzymano {self.space})")
        return ff.pl_form(self.alpha, self.beta, self.base, self.space)


@dataclass(frozen=True)
class DirectSumPair:
    """n -> (first(n), second(n)) w C[0,1] ⊕ L1."""
    first: Any
    second: Any
    space: SpaceTag = SpaceTag.CL1

    def to_form(self):
        cform = _as_pl_form(family_form(self.first), SpaceTag.C01)
        lform = _as_pl_form(family_form(self.second), SpaceTag.L1)
        return ff.DirectSumFamilyForm(cform, lform)


def _as_pl_form(form, space: SpaceTag) -> ff.PLFamilyForm:
    if not isinstance(form, ff.PLFamilyForm):
        raise DomainMismatch("Składowa sumy prostej musi być rodziną funkcji PL")
    return ff.PLFamilyForm(form.alpha, form.beta, form.base, space)


@dataclass(frozen=True)
class AffineCombo:
    """alpha·A + beta·B."""
    alpha: Fraction
    first: Any
    beta: Fraction
    second: Any

    @property
    def space(self) -> SpaceTag:
        return self.first.space

    def to_form(self):
        _same_space(self.first, self.second)
        return ff.form_add(ff.form_scale(self.alpha, family_form(self.first)),
                           ff.form_scale(self.beta, family_form(self.second)))


@dataclass(frozen=True)
class Modulated:
    """a_n = weights(n)·element."""
    weights: SeqElement
    element: SeqElement
    space: SpaceTag = SpaceTag.C

    def to_form(self):
        return ff.seq_form(ranks=[RankTerm(self.weights, self.element)], space=self.space)


@dataclass(frozen=True)
class Scalar:
    """Rodzina w R: a_n = values(n)."""
    values: SeqElement
    space: SpaceTag = SpaceTag.REAL

    def to_form(self):
        return ff.seq_form(ranks=[RankTerm(self.values, unit_vector(1))], space=SpaceTag.REAL)


@dataclass(frozen=True)
class LatticeCombo:
    kind: str
    first: Any
    second: Any

    @property
    def space(self) -> SpaceTag:
        return self.first.space

    def to_form(self):
        if self.kind not in ("sup", "inf"):
            raise IllFormedGrammar(f"Nieznany rodzaj kresu: '{self.kind}'")
        _same_space(self.first, self.second)
        return ff.form_lattice(family_form(self.first), family_form(self.second), self.kind)


@dataclass(frozen=True)
class Modulus:
    base: Any

    @property
    def space(self) -> SpaceTag:
        return self.base.space

    def to_form(self):
        return ff.form_abs(family_form(self.base))


@dataclass(frozen=True)
class Image:
    """n -> op(A(n)); op musi udostępniać apply_form i codomain."""
    op: Any
    base: Any

    @property
    def space(self) -> SpaceTag:
        return self.op.codomain

    def to_form(self):
        return self.op.apply_form(family_form(self.base), self.base.space)


ElementSequence = Union[Constant, PrefixSum, ScaledBasisSum, BasisVectors, TailTruncation, PLFamily, DirectSumPair,
                        AffineCombo, Modulated, Scalar, LatticeCombo, Modulus, Image]
WitnessSequence = ElementSequence


def _same_space(a, b) -> None:
    if a.space != b.space and not ({a.space, b.space} <= SEQUENCE_SPACES):
        raise DomainMismatch(f"Generatory z różnych przestrzeni: {a.space} vs {b.space}")


@lru_cache(maxsize=1024)
def family_form(sequence):
    """Postać normalna generatora (zapamiętywana)."""
    form = sequence.to_form()
    logger.debug(f"Postać normalna {type(sequence).__name__}: {ff.describe_form(form)}")
    return form


def seq_eval(sequence, n: int):
    """Dokładny element a_n."""
    if n < 1:
        raise IllFormedGrammar(f"Indeks rodziny musi być >= 1 (otrzymano {n})")
    return ff.form_eval(family_form(sequence), n)


def zero_sequence(space: SpaceTag):
    return Constant(element_zero(space), space)


# --- Rodziny ciągów (do zbieżności kolektywnej) ---

@dataclass(frozen=True)
class FiniteFamily:
    members: Tuple[Any, ...]
    limits: Tuple[Any, ...]

    def __post_init__(self):
        if len(self.members) != len(self.limits):
            raise IllFormedGrammar(f"Rodzina ma {len(self.members)} członków, ale {len(self.limits)} granic")

    @property
    def space(self) -> SpaceTag:
        return self.members[0].space if self.members else SpaceTag.C


@dataclass(frozen=True)
class CoordinateFamily:
    """Członkowie k -> (n -> base(n)(k)) w R, z granicami limit(k)."""
    base: Any
    limit: SeqElement

    @property
    def space(self) -> SpaceTag:
        return SpaceTag.REAL


@dataclass(frozen=True)
class ScalarMultipleFamily:
    """{lambda·(a_n) : lambda w R} z granicami lambda·limit."""
    base: Any
    limit: Any

    @property
    def space(self) -> SpaceTag:
        return self.base.space


SequenceFamily = Union[FiniteFamily, CoordinateFamily, ScalarMultipleFamily]


def is_pl_space(space: SpaceTag) -> bool:
    return space in PL_SPACES

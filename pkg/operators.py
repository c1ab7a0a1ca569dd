# --- operators.py ---
"""
Dokładne opisy operatorów i ich rachunek.

Operatory na kratach ciągów sprowadzane są do postaci wierszowej
    (Tx)(n) = d(n)·x(n) + suma_k f_k(x)·y_k(n)
(przekątna d + skończony rząd), co pozwala dokładnie liczyć obrazy rodzin,
dodatniość wierszy i normy. Operatory na C[0,1] ⊕ L1 to macierze
(phi, psi) -> (a·phi, b·psi + c·phi).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, List, NamedTuple, Optional, Sequence, Tuple, Union

import family_forms as ff
import pl_functions as plf
from errors import DomainMismatch, IllFormedGrammar, NoStabilization, NotInC, Unsupported
from family_forms import RankTerm
from lattice_core import (ONE, SEQUENCE_SPACES, ZERO, SeqElement, SpaceTag, constant, element_membership,
                          first_negative_index, first_nonzero_index, partial_sum_sequence, seq_abs, seq_add,
                          seq_divide, seq_element, seq_limit, seq_multiply, seq_negative_part, seq_positive_part,
                          seq_scale, seq_sub, seq_sup_norm, seq_total_sum, space_membership, to_rat, unit_vector, zero)
from pl_functions import DirectSumElement
from utils import format_rational
from verdicts import Inconclusive, NoPreimageCertificate, OrderViolation, Refuted, Verdict, Verified

logger = logging.getLogger(__name__)


# --- Funkcjonały na c ---

@dataclass(frozen=True)
class DualFunctionalC:
    """f(x) = suma_n weights(n)·x(n) + lim_coeff·lim(x)."""
    weights: SeqElement
    lim_coeff: Fraction = Fraction(0)

    def __post_init__(self):
        if any(t.ratio == 1 for t in self.weights.tail):
            raise IllFormedGrammar(f"Wagi funkcjonału nie są sumowalne: {self.weights}")

    def norm(self) -> Fraction:
        return seq_total_sum(seq_abs(self.weights)) + abs(self.lim_coeff)

    def to_json_dict(self):
        return {"weights": self.weights.to_json_dict(), "lim_coeff": format_rational(self.lim_coeff)}


def coordinate_functional(k: int) -> DualFunctionalC:
    return DualFunctionalC(unit_vector(k))


def limit_functional() -> DualFunctionalC:
    return DualFunctionalC(zero(), ONE)


def functional_eval(f: DualFunctionalC, x: SeqElement) -> Fraction:
    """Dokładna wartość f(x); przy lim_coeff != 0 wymaga x w c."""
    value = seq_total_sum(seq_multiply(f.weights, x))
    if f.lim_coeff:
        value += f.lim_coeff * seq_limit(x)
    return value


def functional_positive_part(f: DualFunctionalC) -> DualFunctionalC:
    return DualFunctionalC(seq_positive_part(f.weights), max(f.lim_coeff, ZERO))


def functional_negative_part(f: DualFunctionalC) -> DualFunctionalC:
    return DualFunctionalC(seq_negative_part(f.weights), max(-f.lim_coeff, ZERO))


def functional_scale(alpha, f: DualFunctionalC) -> DualFunctionalC:
    a = to_rat(alpha)
    return DualFunctionalC(seq_scale(a, f.weights), a * f.lim_coeff)


# --- Opisy operatorów ---

@dataclass(frozen=True)
class _Operator:
    def apply_form(self, form, space: SpaceTag):
        return apply_family(self, form)


@dataclass(frozen=True)
class Diagonal(_Operator):
    coeffs: SeqElement
    domain: SpaceTag = SpaceTag.C
    codomain: SpaceTag = SpaceTag.C

    def compact_assumption(self) -> bool:
        """Przekątna o współczynnikach znikających traktowana jako zwarta (założenie, nie dowód)."""
        return isinstance(space_membership(self.coeffs, SpaceTag.C0), Verified)


@dataclass(frozen=True)
class FiniteRank(_Operator):
    terms: Tuple[Tuple[DualFunctionalC, SeqElement], ...]
    domain: SpaceTag = SpaceTag.C
    codomain: SpaceTag = SpaceTag.C


@dataclass(frozen=True)
class Embed0Phi(_Operator):
    domain: SpaceTag = SpaceTag.CL1
    codomain: SpaceTag = SpaceTag.CL1


@dataclass(frozen=True)
class DirectSumMatrix(_Operator):
    """(phi, psi) -> (a·phi, b·psi + c·phi)."""
    a: Fraction
    b: Fraction
    c: Fraction
    domain: SpaceTag = SpaceTag.CL1
    codomain: SpaceTag = SpaceTag.CL1


@dataclass(frozen=True)
class Identity(_Operator):
    space: SpaceTag = SpaceTag.C

    @property
    def domain(self) -> SpaceTag:
        return self.space

    @property
    def codomain(self) -> SpaceTag:
        return self.space


@dataclass(frozen=True)
class EvalFunctional(_Operator):
    """T_k a = a_k."""
    k: int
    domain: SpaceTag = SpaceTag.C0

    @property
    def codomain(self) -> SpaceTag:
        return SpaceTag.REAL


@dataclass(frozen=True)
class Scaled(_Operator):
    factor: Fraction
    op: Any

    @property
    def domain(self) -> SpaceTag:
        return self.op.domain

    @property
    def codomain(self) -> SpaceTag:
        return self.op.codomain


@dataclass(frozen=True)
class SumOp(_Operator):
    first: Any
    second: Any

    def __post_init__(self):
        if (self.first.domain, self.first.codomain) != (self.second.domain, self.second.codomain):
            raise DomainMismatch(
                f"Suma operatorów o różnych przestrzeniach: {self.first.domain}->{self.first.codomain} "
                f"vs {self.second.domain}->{self.second.codomain}")

    @property
    def domain(self) -> SpaceTag:
        return self.first.domain

    @property
    def codomain(self) -> SpaceTag:
        return self.first.codomain


OperatorDesc = Union[Diagonal, FiniteRank, Embed0Phi, DirectSumMatrix, Identity, EvalFunctional, Scaled, SumOp]


# --- Postać wierszowa ---

class RowForm(NamedTuple):
    diag: SeqElement
    terms: Tuple[Tuple[DualFunctionalC, SeqElement], ...]


def is_pl_operator(op) -> bool:
    return op.domain in (SpaceTag.CL1, SpaceTag.C01, SpaceTag.L1)


def row_form(op) -> RowForm:
    if isinstance(op, Diagonal):
        return RowForm(op.coeffs, ())
    if isinstance(op, FiniteRank):
        return RowForm(zero(), tuple(op.terms))
    if isinstance(op, Identity) and op.space in SEQUENCE_SPACES:
        return RowForm(constant(1), ())
    if isinstance(op, EvalFunctional):
        return RowForm(zero(), ((coordinate_functional(op.k), unit_vector(1)),))
    if isinstance(op, Scaled):
        inner = row_form(op.op)
        a = to_rat(op.factor)
        return RowForm(seq_scale(a, inner.diag), tuple((f, seq_scale(a, y)) for f, y in inner.terms))
    if isinstance(op, SumOp):
        first, second = row_form(op.first), row_form(op.second)
        return RowForm(seq_add(first.diag, second.diag), first.terms + second.terms)
    raise DomainMismatch(f"Operator {type(op).__name__} nie działa na kratach ciągów")


def pl_matrix(op) -> Tuple[Fraction, Fraction, Fraction]:
    """(a, b, c) dla operatorów na C[0,1] ⊕ L1 (oraz a = b dla identyczności na C01/L1)."""
    if isinstance(op, Embed0Phi):
        return ZERO, ZERO, ONE
    if isinstance(op, DirectSumMatrix):
        return to_rat(op.a), to_rat(op.b), to_rat(op.c)
    if isinstance(op, Identity) and op.space in (SpaceTag.CL1, SpaceTag.C01, SpaceTag.L1):
        return ONE, ONE, ZERO
    if isinstance(op, Scaled):
        a, b, c = pl_matrix(op.op)
        f = to_rat(op.factor)
        return f * a, f * b, f * c
    if isinstance(op, SumOp):
        a1, b1, c1 = pl_matrix(op.first)
        a2, b2, c2 = pl_matrix(op.second)
        return a1 + a2, b1 + b2, c1 + c2
    raise DomainMismatch(f"Operator {type(op).__name__} nie działa na C[0,1] ⊕ L1")


# --- Aplikacja ---

def _require_domain(op, x) -> None:
    verdict = element_membership(x, op.domain)
    if not isinstance(verdict, Verified):
        raise DomainMismatch(f"Element {x} spoza dziedziny {op.domain}: {verdict.to_json_dict()}")


def _apply_rows(rows: RowForm, x: SeqElement) -> SeqElement:
    out = seq_multiply(rows.diag, x)
    for f, y in rows.terms:
        out = seq_add(out, seq_scale(functional_eval(f, x), y))
    return out


def op_apply(op, x):
    """Dokładny obraz T(x); element musi należeć do dziedziny operatora."""
    _require_domain(op, x)
    if is_pl_operator(op):
        a, b, c = pl_matrix(op)
        if isinstance(x, DirectSumElement):
            cpart = plf.pl_scale(a, x.cpart)
            lpart = plf.pl_combine(plf.pl_scale(b, x.lpart), plf.pl_scale(c, x.cpart), "add")
            return DirectSumElement(cpart, lpart)
        return plf.pl_scale(a, x)
    try:
        return _apply_rows(row_form(op), x)
    except NotInC as e:
        raise DomainMismatch(f"Funkcjonał z granicą wymaga elementu z c: {e}") from e


def scalar_sequence(f: DualFunctionalC, form: ff.SeqFamilyForm) -> SeqElement:
    """n -> f(F(n)) jako element w zmiennej n."""
    try:
        out = constant(functional_eval(f, form.head))
        for w in form.windows:
            out = seq_add(out, partial_sum_sequence(seq_multiply(f.weights, w.pattern), w.slope, w.offset))
        for r in form.ranks:
            out = seq_add(out, seq_scale(functional_eval(f, r.vector), r.coeffs))
        length = len(form.prefix)
        if not length:
            return out
        start = max(length + 1, out.start)
        overrides = {n: functional_eval(f, form.prefix[n - 1]) if n <= length else out.value(n)
                     for n in range(1, start)}
        return seq_element(overrides, out.tail, start)
    except NotInC as e:
        raise DomainMismatch(f"Funkcjonał z granicą na rodzinie spoza c: {e}") from e


def apply_family(op, form):
    """Obraz rodziny w postaci normalnej: n -> T(F(n))."""
    if is_pl_operator(op):
        a, b, c = pl_matrix(op)
        if isinstance(form, ff.DirectSumFamilyForm):
            cform = ff.form_scale(a, form.cform)
            moved = ff.PLFamilyForm(form.cform.alpha, form.cform.beta, form.cform.base, SpaceTag.L1)
            lform = ff.form_add(ff.form_scale(b, form.lform), ff.form_scale(c, moved))
            return ff.DirectSumFamilyForm(cform, lform)
        if isinstance(form, ff.PLFamilyForm):
            return ff.form_scale(a, form)
        raise DomainMismatch("Operator na funkcjach PL zastosowany do rodziny ciągów")
    if not isinstance(form, ff.SeqFamilyForm):
        raise DomainMismatch("Operator na ciągach zastosowany do rodziny funkcji PL")
    rows = row_form(op)
    image = ff.map_elements(form, lambda v: seq_multiply(rows.diag, v))
    image = ff.seq_form(image.head, image.windows, image.ranks, [_apply_rows(rows, p) for p in form.prefix],
                        op.codomain)
    extra = [RankTerm(scalar_sequence(f, form), y) for f, y in rows.terms]
    return ff.seq_form(image.head, image.windows, image.ranks + tuple(extra), image.prefix, op.codomain)


# --- Skończony rząd ---

def finite_rank_decompose(op: FiniteRank) -> Tuple[FiniteRank, FiniteRank]:
    """T = T1 - T2 z T1 = suma f_k^+ ⊗ y_k, T2 = suma f_k^- ⊗ y_k."""
    pos = tuple((functional_positive_part(f), y) for f, y in op.terms)
    neg = tuple((functional_negative_part(f), y) for f, y in op.terms)
    return FiniteRank(pos, op.domain, op.codomain), FiniteRank(neg, op.domain, op.codomain)


def as_finite_rank(op: Diagonal) -> FiniteRank:
    """Przekątna o skończonym nośniku jako suma d(n)·e_n* ⊗ e_n."""
    if op.coeffs.tail:
        raise Unsupported("Przekątna o nieskończonym nośniku nie jest skończonego rzędu")
    terms = tuple((coordinate_functional(n), unit_vector(n, d)) for n, d in op.coeffs.overrides)
    return FiniteRank(terms, op.domain, op.codomain)


def finite_rank_view(op) -> Optional[FiniteRank]:
    """Operator na ciągach jako suma f_k ⊗ y_k, gdy jego przekątna ma skończony nośnik; inaczej None."""
    if is_pl_operator(op):
        return None
    rows = row_form(op)
    if rows.diag.tail:
        return None
    diagonal = as_finite_rank(Diagonal(rows.diag, op.domain, op.codomain))
    return FiniteRank(diagonal.terms + rows.terms, op.domain, op.codomain)


def gauss_jordan_solve(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Optional[List[Fraction]]:
    """Rozwiązanie szczególne A·c = rhs nad liczbami wymiernymi (zmienne wolne = 0) albo None."""
    rows = [list(map(Fraction, row)) + [Fraction(b)] for row, b in zip(matrix, rhs)]
    n_cols = len(matrix[0]) if matrix else 0
    pivots: List[int] = []
    r = 0
    for col in range(n_cols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][col]
        rows[r] = [v / lead for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                factor = rows[i][col]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    if any(all(v == 0 for v in row[:-1]) and row[-1] != 0 for row in rows):
        return None
    solution = [ZERO] * n_cols
    for i, col in enumerate(pivots):
        solution[col] = rows[i][-1]
    return solution


def _preimage_candidates(op: FiniteRank, size: int) -> List[SeqElement]:
    out = []
    if op.domain in (SpaceTag.C, SpaceTag.LINF):
        out.append(constant(1))
    out += [unit_vector(k) for k in range(1, size + 1)]
    return out


def finite_rank_preimage(op: FiniteRank, target: SeqElement, hint: Optional[SeqElement] = None):
    """x z dziedziny z T x = target albo NoPreimageCertificate (względem przeszukanych kandydatów)."""
    if not op.terms:
        if target.is_zero():
            return zero()
        return NoPreimageCertificate("zero operator", target)
    if hint is not None and isinstance(element_membership(hint, op.domain), Verified):
        if op_apply(op, hint) == target:
            return hint
    size = max([8] + [f.weights.start + len(op.terms) for f, _ in op.terms])
    candidates = _preimage_candidates(op, size)
    matrix = [[functional_eval(f, v) for v in candidates] for f, _ in op.terms]
    # wartości f_k(x) wyznaczone przez target, jeśli y_k są liniowo niezależne
    basis_rows = [[y.value(j) for _, y in op.terms] for j in range(1, size + 1)]
    target_values = [target.value(j) for j in range(1, size + 1)]
    values_needed = gauss_jordan_solve(basis_rows, target_values)
    if values_needed is not None:
        coeffs = gauss_jordan_solve(matrix, values_needed)
        if coeffs is not None:
            x = zero()
            for c, v in zip(coeffs, candidates):
                x = seq_add(x, seq_scale(c, v))
            if op_apply(op, x) == target:
                return x
    return NoPreimageCertificate("no grammar candidate solves the finite-rank system",
                                 {"candidates": len(candidates), "rank": len(op.terms)})


def finite_rank_levi_limit(op: FiniteRank, sequence, bound) -> Tuple[SeqElement, Any]:
    """(limit, przeciwobraz): T x_m ->o suma (a_k - b_k) y_k, a_k = lim f_k^+(x_m), b_k = lim f_k^-(x_m)."""
    from convergence import verify_increasing_bounded
    from sequences import family_form
    form = family_form(sequence)
    if not isinstance(form, ff.SeqFamilyForm):
        raise DomainMismatch("finite_rank_levi_limit wymaga rodziny ciągów")
    verify_increasing_bounded(sequence, bound)
    limit = zero()
    for f, y in op.terms:
        a_k = seq_limit(scalar_sequence(functional_positive_part(f), form))
        b_k = seq_limit(scalar_sequence(functional_negative_part(f), form))
        limit = seq_add(limit, seq_scale(a_k - b_k, y))
    try:
        hint = ff.form_pointwise_limit(form)
    except NoStabilization:
        hint = None
    preimage = finite_rank_preimage(op, limit, hint)
    logger.debug(f"finite_rank_levi_limit: granica {limit}, przeciwobraz {preimage}")
    return limit, preimage


# --- Porządek operatorów ---

def _support_size_at_most_one(x: SeqElement) -> Tuple[Optional[int], bool]:
    first = first_nonzero_index(x)
    if first is None:
        return None, True
    return first, first_nonzero_index(x, first + 1) is None


def _rank_one_offdiag_ok(f: DualFunctionalC, y: SeqElement) -> bool:
    """y(n)·w(j) >= 0 dla wszystkich n != j."""
    for ys, ws in ((seq_positive_part(y), seq_negative_part(f.weights)),
                   (seq_negative_part(y), seq_positive_part(f.weights))):
        y_first, y_single = _support_size_at_most_one(ys)
        w_first, w_single = _support_size_at_most_one(ws)
        if y_first is None or w_first is None:
            continue
        if not (y_single and w_single and y_first == w_first):
            return False
    return True


def _difference_rows(s, t) -> RowForm:
    if (s.domain, s.codomain) != (t.domain, t.codomain):
        raise DomainMismatch(f"Porównanie operatorów o różnych przestrzeniach: {s.domain}->{s.codomain} vs "
                             f"{t.domain}->{t.codomain}")
    rs, rt = row_form(s), row_form(t)
    return RowForm(seq_sub(rt.diag, rs.diag), rt.terms + tuple((functional_scale(-1, f), y) for f, y in rs.terms))


def op_order(s, t, pair_search_limit: int = 64) -> Verdict:
    """S <= T: Verified, Refuted(OrderViolation z dodatnim x) albo Inconclusive po przeszukaniu par."""
    if is_pl_operator(s) or is_pl_operator(t):
        if (s.domain, s.codomain) != (t.domain, t.codomain):
            raise DomainMismatch("Porównanie operatorów o różnych przestrzeniach")
        diff = [b - a for a, b in zip(pl_matrix(s), pl_matrix(t))]
        if all(v >= 0 for v in diff):
            return Verified(method="matrix coefficients")
        one = plf.pl_constant(1)
        zero_f = plf.pl_constant(0)
        x = DirectSumElement(one, zero_f) if diff[0] < 0 or diff[2] < 0 else DirectSumElement(zero_f, one)
        return Refuted(OrderViolation(x, "negative matrix coefficient"))
    rows = _difference_rows(s, t)
    diag_row = rows.diag
    lim_row = zero()
    for f, y in rows.terms:
        diag_row = seq_add(diag_row, seq_multiply(y, f.weights))
        lim_row = seq_add(lim_row, seq_scale(f.lim_coeff, y))
    bad = first_negative_index(diag_row)
    if bad is not None:
        return Refuted(OrderViolation(unit_vector(bad), "diagonal"))
    if first_negative_index(lim_row) is not None:
        return Refuted(OrderViolation(constant(1), "limit functional"))
    if all(_rank_one_offdiag_ok(f, y) for f, y in rows.terms):
        return Verified(method="diagonal and rank-one sign pattern")
    for n in range(1, pair_search_limit + 1):
        for j in range(1, pair_search_limit + 1):
            if j == n:
                continue
            entry = sum((y.value(n) * f.weights.value(j) for f, y in rows.terms), ZERO)
            if entry < 0:
                return Refuted(OrderViolation(unit_vector(j), f"off-diagonal entry ({n}, {j})"))
    logger.warning(f"op_order: brak rozstrzygnięcia dla wyrazów pozadiagonalnych (przeszukano {pair_search_limit}x"
                   f"{pair_search_limit})")
    return Inconclusive(pair_search_limit, "off-diagonal entries undecided")


def op_leq_witness(s, t, pair_search_limit: int = 64) -> Tuple[bool, Optional[Any]]:
    """(S <= T, dodatni x z (T - S)x nie >= 0, o ile został znaleziony)."""
    verdict = op_order(s, t, pair_search_limit)
    if isinstance(verdict, Refuted):
        return False, verdict.certificate.witness
    return isinstance(verdict, Verified), None


def op_leq(s, t, pair_search_limit: int = 64) -> bool:
    """Zachowawczo: False także wtedy, gdy porządek nie został rozstrzygnięty (patrz op_order)."""
    return isinstance(op_order(s, t, pair_search_limit), Verified)


def op_positivity(op, pair_search_limit: int = 64) -> Verdict:
    return op_order(Scaled(ZERO, op), op, pair_search_limit)


def op_is_positive(op, pair_search_limit: int = 64) -> bool:
    return isinstance(op_positivity(op, pair_search_limit), Verified)


# --- Normy ---

class NormDetail(NamedTuple):
    value: Fraction
    exact: bool


def op_norm_detail(a, b) -> NormDetail:
    if is_pl_operator(a) or is_pl_operator(b):
        if pl_matrix(a) == pl_matrix(b):
            return NormDetail(ZERO, True)
        raise Unsupported("Norma różnicy operatorów na C[0,1] ⊕ L1 nie jest obsługiwana")
    rows = _difference_rows(b, a)
    diag_norm = seq_sup_norm(rows.diag)
    terms = [(f, y) for f, y in rows.terms if not y.is_zero() and (not f.weights.is_zero() or f.lim_coeff)]
    if not terms:
        return NormDetail(diag_norm, True)
    bound = diag_norm + sum((f.norm() * seq_sup_norm(y) for f, y in terms), ZERO)
    return NormDetail(bound, diag_norm == 0 and len(terms) == 1)


def op_norm_dist(a, b) -> Fraction:
    """||A - B||: dokładnie dla przekątnej i rzędu jeden, w pozostałych przypadkach górne ograniczenie."""
    detail = op_norm_detail(a, b)
    if not detail.exact:
        logger.debug(f"op_norm_dist: górne ograniczenie {format_rational(detail.value)}")
    return detail.value


# --- Przeciwobrazy ---

def diagonal_preimage(op: Diagonal, y: SeqElement, domain: SpaceTag):
    """x z D x = y w przestrzeni `domain` albo NoPreimageCertificate."""
    if y.is_zero():
        return zero()
    try:
        x = seq_divide(y, op.coeffs)
    except Unsupported as e:
        return NoPreimageCertificate("unbounded quotient", str(e))
    verdict = space_membership(x, domain)
    if isinstance(verdict, Verified):
        return x
    return NoPreimageCertificate("membership", verdict.certificate)


def pl_preimage(op, target: DirectSumElement):
    """Przeciwobraz dla (phi, psi) -> (a·phi, b·psi + c·phi) z ciągłą pierwszą składową."""
    a, b, c = pl_matrix(op)
    zero_f = plf.pl_constant(0)
    if a != 0:
        phi = plf.pl_scale(1 / a, target.cpart)
        rest = plf.pl_sub(target.lpart, plf.pl_scale(c, phi))
        if b != 0:
            return DirectSumElement(phi, plf.pl_scale(1 / b, rest))
        if plf.pl_equal(rest, zero_f, "ae"):
            return DirectSumElement(phi, zero_f)
        return NoPreimageCertificate("second component not in the range", rest)
    if not plf.pl_equal(target.cpart, zero_f, "everywhere"):
        return NoPreimageCertificate("first component must vanish", target.cpart)
    if c != 0:
        candidate = plf.pl_scale(1 / c, target.lpart)
        continuous = plf.pl_continuous_version(candidate)
        if continuous is None:
            return NoPreimageCertificate("jump", plf.pl_continuity(candidate, ignore_point_values=True).certificate)
        return DirectSumElement(continuous, zero_f)
    if b != 0:
        return DirectSumElement(zero_f, plf.pl_scale(1 / b, target.lpart))
    if plf.pl_equal(target.lpart, zero_f, "ae"):
        return DirectSumElement(zero_f, zero_f)
    return NoPreimageCertificate("zero operator", target.lpart)


def describe_operator(op) -> str:
    if isinstance(op, Diagonal):
        return f"Diagonal({op.coeffs})"
    if isinstance(op, FiniteRank):
        return f"FiniteRank(rank={len(op.terms)})"
    if isinstance(op, Scaled):
        return f"{format_rational(to_rat(op.factor))}·{describe_operator(op.op)}"
    if isinstance(op, SumOp):
        return f"({describe_operator(op.first)} + {describe_operator(op.second)})"
    if isinstance(op, EvalFunctional):
        return f"T_{op.k}"
    if isinstance(op, Identity):
        return f"I_{op.space}"
    return type(op).__name__

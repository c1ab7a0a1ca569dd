# --- convergence.py ---
"""
Zbieżność porządkowa rodzin indeksowanych przez n.

Świadek p_n (WitnessSequence) jest poprawny, gdy maleje i ma punktowe
infimum 0; w rozważanych kratach (porządek punktowy lub punktowy p.w.)
jest to równoważne p_n ↓ 0 w sensie porządku. Nierówności |a_n - c| <= p_n
sprawdzane są wyczerpująco do horyzontu, a dalej symbolicznie przez
family_forms.form_nonneg. Werdykty są wartościami: Verified / Refuted
(z certyfikatem do ponownego sprawdzenia) / Inconclusive.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Iterable, Optional, Sequence, Tuple

import family_forms as ff
import pl_functions as plf
from errors import (NoClosedForm, NoStabilization, NotBounded, NotInC, NotMonotone, NotSummable, UnboundedWitness,
                    Unsupported, WitnessInvalid, WitnessMissing)
from family_forms import COUNTEREXAMPLE_SCAN, RankTerm
from lattice_core import (ONE, SEQUENCE_SPACES, ZERO, SeqElement, SpaceTag, constant, element_abs, element_lattice,
                          element_membership, element_sub, first_negative_index, first_nonzero_index, hull_in_space,
                          pl_mode, real, scalar_majorant, seq_abs, seq_add, seq_element, seq_limit, seq_negative_part,
                          seq_positive_part, seq_scale, seq_sub, seq_sup_norm, space_membership, tail_sup_majorant,
                          to_rat, zero)
from pl_functions import DirectSumElement, PLFunction
from sequences import (AffineCombo, CoordinateFamily, DirectSumPair, FiniteFamily, LatticeCombo, Modulated,
                       PLFamily, Scalar, ScalarMultipleFamily, TailTruncation, family_form, seq_eval, zero_sequence)
from utils import format_rational
from verdicts import (EnvelopeLowerBound, FailedDominationAt, Inconclusive, JumpList, LimitEscapesSpace,
                      MembershipRefutation, NotDecreasingAt, PointwiseInfPositive, Refuted, Verified, Verdict,
                      conjunction)

logger = logging.getLogger(__name__)

DEFAULT_HORIZON = 128
RECHECK_SAMPLES = 256


# --- Wartości we współrzędnych ---

def _element_at(x, coordinate) -> Fraction:
    if isinstance(x, SeqElement):
        return x.value(int(coordinate))
    if isinstance(x, PLFunction):
        return x(coordinate)
    part, point = coordinate
    return (x.cpart if part == "C" else x.lpart)(point)


def _value_at(form, n: int, coordinate) -> Fraction:
    if isinstance(form, ff.SeqFamilyForm):
        return ff.form_value_at(form, n, int(coordinate))
    return _element_at(ff.form_eval(form, n), coordinate)


def _nonzero_coordinate(x, space: SpaceTag) -> Optional[Any]:
    """Współrzędna (punkt p.w. dla PL), w której x != 0, albo None."""
    if isinstance(x, SeqElement):
        return first_nonzero_index(x)
    if isinstance(x, PLFunction):
        return plf.pl_nonzero_point(x, "ae")
    point = plf.pl_nonzero_point(x.cpart, "ae")
    if point is not None:
        return "C", point
    point = plf.pl_nonzero_point(x.lpart, "ae")
    return ("L1", point) if point is not None else None


def _domination_gap(dev, w, space: SpaceTag) -> Optional[Any]:
    """Współrzędna, w której dev <= w nie zachodzi, albo None."""
    if isinstance(dev, SeqElement):
        return first_negative_index(seq_sub(w, dev))
    if isinstance(dev, PLFunction):
        return plf.pl_negative_point(plf.pl_sub(w, dev), pl_mode(space))
    point = plf.pl_negative_point(plf.pl_sub(w.cpart, dev.cpart), "everywhere")
    if point is not None:
        return "C", point
    point = plf.pl_negative_point(plf.pl_sub(w.lpart, dev.lpart), "ae")
    return ("L1", point) if point is not None else None


def _coordinate_sequence(form, coordinate) -> SeqElement:
    if isinstance(form, ff.SeqFamilyForm):
        return ff.form_coordinate(form, int(coordinate))
    return ff.form_coordinate(form, coordinate)


# --- Świadkowie p_n ↓ 0 ---

def _witness_membership(form, space: SpaceTag) -> Optional[Tuple[Any, Any]]:
    """(element W(n), refutacja), gdy pewne W(n) leży poza przestrzenią; None w przeciwnym razie."""
    if space in (SpaceTag.LINF, SpaceTag.L1):
        return None
    if isinstance(form, ff.SeqFamilyForm):
        parts = [form.head] + [r.vector for r in form.ranks]
        if all(isinstance(space_membership(p, space), Verified) for p in parts):
            samples = range(1, len(form.prefix) + 1)
        else:
            samples = range(1, len(form.prefix) + 5)
        for n in samples:
            element = ff.form_eval(form, n)
            verdict = space_membership(element, space)
            if not isinstance(verdict, Verified):
                return element, verdict.certificate
        return None
    base = form.base if isinstance(form, ff.PLFamilyForm) else form.cform.base
    if space == SpaceTag.L1:
        return None
    verdict = plf.pl_continuity(base)
    if isinstance(verdict, Verified):
        return None
    return ff.form_eval(form, 1), verdict.certificate


@lru_cache(maxsize=512)
def check_decreasing_null(witness) -> Verdict:
    """Verified, gdy W(n+1) <= W(n) dla wszystkich n i każda współrzędna W(n) dąży do 0."""
    form = family_form(witness)
    escaped = _witness_membership(form, witness.space)
    if escaped is not None:
        return Refuted(LimitEscapesSpace(*escaped), note="witness element outside its space")
    step = ff.form_decreasing(form)
    if step.status == "failed":
        n, coordinate = step.n, step.coordinate
        cert = NotDecreasingAt(n, coordinate, _value_at(form, n, coordinate), _value_at(form, n + 1, coordinate))
        logger.debug(f"Świadek nie maleje: n={n}, współrzędna {coordinate}")
        return Refuted(cert)
    if step.status == "unknown":
        return Inconclusive(COUNTEREXAMPLE_SCAN, f"monotonicity undecided at coordinate {step.coordinate}")
    try:
        limit = ff.form_pointwise_limit(form)
    except NoStabilization as e:
        return Inconclusive(COUNTEREXAMPLE_SCAN, str(e))
    coordinate = _nonzero_coordinate(limit, witness.space)
    if coordinate is None:
        return Verified(method="decreasing with pointwise limit 0", witness=witness)
    value = _element_at(limit, coordinate)
    if value > 0:
        logger.debug(f"Punktowe infimum świadka dodatnie we współrzędnej {coordinate}: {format_rational(value)}")
        return Refuted(PointwiseInfPositive(coordinate, value))
    n = first_negative_index(_coordinate_sequence(form, coordinate))
    return Refuted(FailedDominationAt(n, coordinate, ZERO, _value_at(form, n, coordinate)),
                   note="witness takes negative values")


def _require_witness(witness) -> None:
    verdict = check_decreasing_null(witness)
    if not isinstance(verdict, Verified):
        raise WitnessInvalid(f"Świadek {type(witness).__name__} nie spełnia p_n ↓ 0: {verdict.to_json_dict()}")


# --- Dominacja |dev(n)| <= W(n) ---

def _check_dominated(dev_form, w_form, space: SpaceTag, horizon: int, member: Optional[int] = None) -> Verdict:
    """|dev(n)| <= W(n) dla wszystkich n: wyczerpująco do horyzontu, dalej symbolicznie."""
    for n in range(1, horizon + 1):
        dev = element_abs(ff.form_eval(dev_form, n))
        w = ff.form_eval(w_form, n)
        coordinate = _domination_gap(dev, w, space)
        if coordinate is not None:
            lhs, rhs = _element_at(dev, coordinate), _element_at(w, coordinate)
            logger.debug(f"Dominacja zawodzi: n={n}, współrzędna {coordinate}, "
                         f"{format_rational(lhs)} > {format_rational(rhs)}")
            return Refuted(FailedDominationAt(n, coordinate, lhs, rhs, member=member))
    try:
        limit = ff.form_pointwise_limit(dev_form)
        coordinate = _nonzero_coordinate(limit, space)
        if coordinate is not None:
            gap = seq_sub(_coordinate_sequence(w_form, coordinate),
                          seq_abs(_coordinate_sequence(dev_form, coordinate)))
            n = first_negative_index(gap)
            if n is not None:
                return Refuted(FailedDominationAt(n, coordinate, abs(_value_at(dev_form, n, coordinate)),
                                                  _value_at(w_form, n, coordinate), member=member))
        results = [ff.form_nonneg(ff.form_sub(w_form, dev_form), horizon + 1),
                   ff.form_nonneg(ff.form_add(w_form, dev_form), horizon + 1)]
    except (NoStabilization, Unsupported, NoClosedForm) as e:
        return Inconclusive(horizon, f"tail not matched symbolically: {e}")
    for result in results:
        if result.status == "failed":
            n, coordinate = result.n, result.coordinate
            return Refuted(FailedDominationAt(n, coordinate, abs(_value_at(dev_form, n, coordinate)),
                                              _value_at(w_form, n, coordinate), member=member))
    if all(r.proved for r in results):
        return Verified(method=f"exhaustive n <= {horizon} + symbolic tail")
    return Inconclusive(horizon, "tail lower bound undecided")


def check_order_convergence(sequence, limit, witness, horizon: int = DEFAULT_HORIZON) -> Verdict:
    """|S(n) - limit| <= W(n) dla wszystkich n."""
    _require_witness(witness)
    s_form = family_form(sequence)
    dev_form = ff.form_sub(s_form, ff.form_constant(limit, s_form.space))
    verdict = _check_dominated(dev_form, family_form(witness), sequence.space, horizon)
    if isinstance(verdict, Verified):
        return Verified(method=verdict.method, witness=witness, limit=limit)
    return verdict


# --- Warunek Cauchy'ego ---

def _monotone(form) -> Optional[int]:
    """+1 dla rodziny rosnącej, -1 dla malejącej, None gdy nie wiadomo."""
    try:
        if ff.form_decreasing(ff.form_scale(-1, form)).proved:
            return 1
        if ff.form_decreasing(form).proved:
            return -1
    except Unsupported as e:
        logger.debug(f"Monotoniczność rodziny nierozstrzygnięta: {e}")
    return None


def _cauchy_pair(form, n: int, coordinate, bound: Fraction) -> Optional[Tuple[int, int, Fraction]]:
    base = _value_at(form, n, coordinate)
    for m in range(n + 1, n + COUNTEREXAMPLE_SCAN + 1):
        lhs = abs(_value_at(form, m, coordinate) - base)
        if lhs > bound:
            return n, m, lhs
    return None


def _check_cauchy_forms(s_form, w_form, space: SpaceTag, horizon: int, member: Optional[int] = None) -> Verdict:
    direction = _monotone(s_form)
    if direction is not None:
        try:
            top = ff.form_pointwise_limit(s_form)
        except NoStabilization as e:
            return Inconclusive(horizon, str(e))
        envelope = ff.form_scale(direction, ff.form_sub(ff.form_constant(top, s_form.space), s_form))
        result = ff.form_nonneg(ff.form_sub(w_form, envelope))
        if result.proved:
            return Verified(method="monotone envelope")
        if result.status == "unknown":
            return Inconclusive(horizon, f"envelope domination undecided at {result.coordinate}")
        n, coordinate = result.n, result.coordinate
        rhs = _value_at(w_form, n, coordinate)
        pair = _cauchy_pair(s_form, n, coordinate, rhs)
        if pair is None:
            return Refuted(FailedDominationAt(n, coordinate, _value_at(envelope, n, coordinate), rhs,
                                              member=member), note="envelope exceeds witness")
        return Refuted(FailedDominationAt(n, coordinate, pair[2], rhs, pair=(pair[0], pair[1]), member=member))
    try:
        top = ff.form_pointwise_limit(s_form)
        dev = ff.form_sub(s_form, ff.form_constant(top, s_form.space))
        half = ff.form_scale(Fraction(1, 2), w_form)
        if (ff.form_nonneg(ff.form_sub(half, dev)).proved and ff.form_nonneg(ff.form_add(half, dev)).proved):
            return Verified(method="twice the distance to the pointwise limit")
    except (NoStabilization, Unsupported) as e:
        logger.debug(f"Test przez granicę punktową niedostępny: {e}")
    # W maleje, więc wystarczy porównać parę (n', n'') z W(min(n', n''))
    values = [ff.form_eval(s_form, n) for n in range(1, horizon + 1)]
    for n in range(1, horizon + 1):
        w = ff.form_eval(w_form, n)
        for m in range(n + 1, horizon + 1):
            dev = element_abs(element_sub(values[m - 1], values[n - 1]))
            coordinate = _domination_gap(dev, w, space)
            if coordinate is not None:
                return Refuted(FailedDominationAt(n, coordinate, _element_at(dev, coordinate),
                                                  _element_at(w, coordinate), pair=(n, m), member=member))
    return Inconclusive(horizon, "pairs up to the horizon dominated, tail not matched symbolically")


def check_order_cauchy(sequence, witness, horizon: int = DEFAULT_HORIZON) -> Verdict:
    """|S(n') - S(n'')| <= W(n) dla n', n'' >= n."""
    _require_witness(witness)
    verdict = _check_cauchy_forms(family_form(sequence), family_form(witness), sequence.space, horizon)
    if isinstance(verdict, Verified):
        return Verified(method=verdict.method, witness=witness)
    return verdict


# --- Rodziny: zbieżność kolektywna ---

def _family_limits(family, limits):
    return tuple(limits) if limits is not None else family.limits


def _with_member(verdict: Verdict, member: int) -> Verdict:
    if isinstance(verdict, Refuted) and isinstance(verdict.certificate, FailedDominationAt):
        return Refuted(replace(verdict.certificate, member=member), verdict.note)
    return verdict


def _lifted_witness(witness, base_form) -> ff.SeqFamilyForm:
    """Świadek skalarny s(n) podniesiony do s(n)·𝟙 w kracie współrzędnych rodziny."""
    scalar = ff.form_coordinate(family_form(witness), 1)
    return ff.seq_form(ranks=[RankTerm(scalar, constant(1))], space=base_form.space)


def _envelope_measure(family, n: int, kind: str) -> Fraction:
    form = family_form(family.base)
    if kind == "oscillation":
        return seq_sup_norm(seq_sub(ff.form_eval(form, n + 1), ff.form_eval(form, n)))
    return seq_sup_norm(seq_sub(ff.form_eval(form, n), family.limit))


def envelope_certificate(family, kind: str = "deviation") -> Optional[EnvelopeLowerBound]:
    """EnvelopeLowerBound, gdy obwiednia rodziny współrzędnych jest ograniczona z dołu przez c > 0."""
    if not isinstance(family, CoordinateFamily):
        return None
    form = family_form(family.base)
    if kind == "oscillation":
        measured = ff.form_sub(ff.form_shift(form, 1), form)
    else:
        measured = ff.form_sub(form, ff.form_constant(family.limit, form.space))
    try:
        bound, valid_from = ff.envelope_lower_bound(measured)
    except (NoClosedForm, Unsupported) as e:
        logger.debug(f"Brak obwiedni w postaci zamkniętej: {e}")
        return None
    if bound <= 0:
        return None
    start = max(1, valid_from)
    samples = tuple((n, _envelope_measure(family, n, kind)) for n in range(start, start + 4))
    logger.debug(f"Obwiednia ({kind}) >= {format_rational(bound)} od n={start}")
    return EnvelopeLowerBound(_describe_family(family), bound, samples, kind)


def check_collective(family, limits, witness, horizon: int = DEFAULT_HORIZON) -> Verdict:
    """Jeden świadek W dominuje |a_n - c_a| dla każdego członka rodziny."""
    _require_witness(witness)
    w_form = family_form(witness)
    if isinstance(family, FiniteFamily) or isinstance(family, (list, tuple)):
        members = family.members if isinstance(family, FiniteFamily) else tuple(family)
        targets = _family_limits(family, limits) if isinstance(family, FiniteFamily) else tuple(limits)
        verdicts = []
        for i, (member, limit) in enumerate(zip(members, targets)):
            s_form = family_form(member)
            dev = ff.form_sub(s_form, ff.form_constant(limit, s_form.space))
            verdict = _check_dominated(dev, w_form, member.space, horizon, member=i)
            verdicts.append(verdict)
            if isinstance(verdict, Refuted):
                break
        verdict = conjunction(verdicts)
    elif isinstance(family, CoordinateFamily):
        cert = envelope_certificate(family, "deviation")
        if cert is not None:
            return Refuted(cert)
        base = family_form(family.base)
        dev = ff.form_sub(base, ff.form_constant(family.limit if limits is None else limits, base.space))
        verdict = _check_dominated(dev, _lifted_witness(witness, base), base.space, horizon)
        if isinstance(verdict, Refuted):
            c = verdict.certificate
            verdict = Refuted(FailedDominationAt(c.n, 1, c.lhs, c.rhs, member=int(c.coordinate)))
    elif isinstance(family, ScalarMultipleFamily):
        verdict = _scaled_family(family, w_form, horizon, cauchy=False)
    else:
        raise Unsupported(f"Nieobsługiwany rodzaj rodziny: {type(family).__name__}")
    if isinstance(verdict, Verified):
        return Verified(method=verdict.method, witness=witness)
    return verdict


def _scaled_family(family: ScalarMultipleFamily, w_form, horizon: int, cauchy: bool) -> Verdict:
    """{lambda·(a_n)}: niezerowe odchylenie przeskalowane ponad W(n)."""
    s_form = family_form(family.base)
    target = None if cauchy else ff.form_constant(family.limit, s_form.space)
    for n in range(1, horizon + 1):
        pairs = [(n, n + 1)] if cauchy else [(n, n)]
        for first, second in pairs:
            value = ff.form_eval(s_form, first)
            other = ff.form_eval(s_form, second) if cauchy else ff.form_eval(target, first)
            dev = element_sub(value, other)
            coordinate = _nonzero_coordinate(dev, family.space)
            if coordinate is None:
                continue
            d = abs(_element_at(dev, coordinate))
            rhs = _value_at(w_form, n, coordinate)
            scale = (abs(rhs) + 1) / d
            return Refuted(FailedDominationAt(n, coordinate, scale * d, rhs,
                                              pair=(first, second) if cauchy else None, scale=scale))
    try:
        if cauchy:
            diff = ff.form_sub(ff.form_shift(s_form, 1), s_form)
        else:
            diff = ff.form_sub(s_form, target)
        if ff.form_nonneg(diff).proved and ff.form_nonneg(ff.form_scale(-1, diff)).proved:
            return Verified(method="family is constant at its limit")
    except Unsupported as e:
        logger.debug(f"Rodzina skalowana: {e}")
    return Inconclusive(horizon, "no nonzero deviation up to the horizon")


def check_collective_cauchy(family, witness, horizon: int = DEFAULT_HORIZON) -> Verdict:
    """Kolektywny warunek Cauchy'ego z jednym świadkiem."""
    _require_witness(witness)
    w_form = family_form(witness)
    if isinstance(family, FiniteFamily):
        verdicts = []
        for i, member in enumerate(family.members):
            verdict = _check_cauchy_forms(family_form(member), w_form, member.space, horizon, member=i)
            verdicts.append(_with_member(verdict, i))
            if isinstance(verdict, Refuted):
                break
        verdict = conjunction(verdicts)
    elif isinstance(family, CoordinateFamily):
        cert = envelope_certificate(family, "oscillation")
        if cert is not None:
            return Refuted(cert)
        base = family_form(family.base)
        verdict = _check_cauchy_forms(base, _lifted_witness(witness, base), base.space, horizon)
        if isinstance(verdict, Refuted) and isinstance(verdict.certificate, FailedDominationAt):
            c = verdict.certificate
            verdict = Refuted(replace(c, coordinate=1, member=int(c.coordinate)))
    elif isinstance(family, ScalarMultipleFamily):
        verdict = _scaled_family(family, w_form, horizon, cauchy=True)
    else:
        raise Unsupported(f"Nieobsługiwany rodzaj rodziny: {type(family).__name__}")
    if isinstance(verdict, Verified):
        return Verified(method=verdict.method, witness=witness)
    return verdict


# --- Kombinatory świadków ---

@dataclass(frozen=True)
class GeometricWeights:
    """alpha_i = first·ratio^(i-1), i >= 1."""
    first: Fraction
    ratio: Fraction

    def total(self) -> Fraction:
        r = abs(to_rat(self.ratio))
        if r >= 1:
            raise NotSummable(f"Iloraz wag {format_rational(r)} >= 1")
        return abs(to_rat(self.first)) / (1 - r)


def _scaled_witness(c: Fraction, witness):
    return witness if c == 1 else AffineCombo(c, witness, ZERO, witness)


def _validated(witness):
    verdict = check_decreasing_null(witness)
    if not isinstance(verdict, Verified):
        raise WitnessInvalid(f"Wynik kombinacji nie jest świadkiem p_n ↓ 0: {verdict.to_json_dict()}")
    return witness


def combine_witness(kind: str, first, second=None, alpha=1, beta=1):
    """Świadek dla union / linear / modulus / convex zbudowany z P (i Q)."""
    _require_witness(first)
    if second is not None:
        _require_witness(second)
    if kind in ("modulus", "convex"):
        return first
    if second is None:
        raise WitnessInvalid(f"Kombinacja '{kind}' wymaga dwóch świadków")
    if kind == "union":
        if first == second:
            return first
        combined = LatticeCombo("sup", first, second)
        try:
            family_form(combined)
        except Unsupported as e:
            logger.debug(f"Kres świadków poza gramatyką ({e}), używam sumy P + Q")
            combined = AffineCombo(ONE, first, ONE, second)
        return _validated(combined)
    if kind == "linear":
        return _validated(AffineCombo(abs(to_rat(alpha)), first, abs(to_rat(beta)), second))
    raise WitnessInvalid(f"Nieznany rodzaj kombinacji świadków: '{kind}'")


def _below_bound(witness, bound: Fraction) -> bool:
    top = seq_eval(witness, 1)
    if isinstance(top, SeqElement):
        return first_negative_index(seq_sub(constant(bound), top)) is None
    cap = plf.pl_constant(bound)
    if isinstance(top, PLFunction):
        return plf.pl_leq(top, cap, pl_mode(witness.space))
    return plf.pl_leq(top.cpart, cap, "everywhere") and plf.pl_leq(top.lpart, cap, "ae")


def l1_witness(weights, witnesses: Sequence, bound=1):
    """p_n = suma_i |alpha_i|·p_{i,n} dla świadków ograniczonych przez bound·𝟙."""
    witnesses = list(witnesses)
    if not witnesses:
        raise WitnessInvalid("l1_witness wymaga co najmniej jednego świadka")
    cap = to_rat(bound)
    for w in witnesses:
        _require_witness(w)
        if not _below_bound(w, cap):
            raise UnboundedWitness(f"Świadek {type(w).__name__} przekracza ograniczenie {format_rational(cap)}")
    if isinstance(weights, GeometricWeights):
        if len(witnesses) != 1:
            raise NotSummable("Wagi geometryczne wymagają jednego powtarzanego świadka")
        total = weights.total()
        if total > 1:
            raise NotSummable(f"Suma |alpha_i| = {format_rational(total)} > 1")
        return _validated(_scaled_witness(total, witnesses[0]))
    try:
        coeffs = [abs(to_rat(a)) for a in weights]
    except (TypeError, ValueError) as e:
        raise NotSummable(f"Wagi bez postaci zamkniętej: {e}") from e
    if len(coeffs) != len(witnesses):
        raise NotSummable(f"{len(coeffs)} wag dla {len(witnesses)} świadków")
    if sum(coeffs) > 1:
        raise NotSummable(f"Suma |alpha_i| = {format_rational(sum(coeffs))} > 1")
    result = _scaled_witness(coeffs[0], witnesses[0])
    for c, w in zip(coeffs[1:], witnesses[1:]):
        result = AffineCombo(ONE, result, c, w)
    return _validated(result)


# --- Granice ---

def pointwise_limit(sequence) -> Tuple[Any, Dict[SpaceTag, Verdict]]:
    """(granica punktowa, werdykty przynależności); dla PL granica w każdym punkcie."""
    limit = ff.form_pointwise_limit(family_form(sequence))
    if isinstance(limit, SeqElement):
        spaces = [SpaceTag.C00, SpaceTag.C0, SpaceTag.C, SpaceTag.LINF]
        if sequence.space == SpaceTag.REAL:
            spaces.append(SpaceTag.REAL)
    elif isinstance(limit, PLFunction):
        spaces = [SpaceTag.C01, SpaceTag.L1]
    else:
        spaces = [SpaceTag.CL1]
    memberships = {tag: element_membership(limit, tag) for tag in spaces}
    return limit, memberships


def construct_limit(sequence, witness, space: Optional[SpaceTag] = None, horizon: int = DEFAULT_HORIZON) -> Verdict:
    """Verified(limit=x) z |S(n) - x| <= W(n) albo Refuted(LimitEscapesSpace)."""
    space = space or sequence.space
    cauchy = check_order_cauchy(sequence, witness, horizon)
    if not isinstance(cauchy, Verified):
        return cauchy
    limit, _ = pointwise_limit(sequence)
    membership = element_membership(limit, space)
    if not isinstance(membership, Verified):
        logger.debug(f"Granica punktowa poza {space}")
        return Refuted(LimitEscapesSpace(limit, membership.certificate))
    verdict = check_order_convergence(sequence, limit, witness, horizon)
    if isinstance(verdict, Verified):
        return Verified(method="order Cauchy + pointwise limit", witness=witness, limit=limit)
    return verdict


def family_envelope(family, n: int, kind: str = "deviation", limits=None):
    """q_n = sup po rodzinie |a_n - c_a| (albo oscylacja sup_{n',n''>=n} |a_n' - a_n''|)."""
    if isinstance(family, CoordinateFamily):
        form = family_form(family.base)
        if kind == "deviation":
            return real(seq_sup_norm(seq_sub(ff.form_eval(form, n), family.limit)))
        direction = _monotone(form)
        if direction is None:
            raise NoClosedForm("Oscylacja rodziny niemonotonicznej nie ma postaci zamkniętej")
        top = ff.form_pointwise_limit(form)
        return real(seq_sup_norm(seq_sub(top, ff.form_eval(form, n))))
    if isinstance(family, FiniteFamily):
        targets = _family_limits(family, limits)
        envelope = None
        for member, limit in zip(family.members, targets):
            form = family_form(member)
            if kind == "deviation":
                q = element_abs(element_sub(ff.form_eval(form, n), limit))
            else:
                direction = _monotone(form)
                if direction is None:
                    raise NoClosedForm("Oscylacja rodziny niemonotonicznej nie ma postaci zamkniętej")
                q = element_abs(element_sub(ff.form_pointwise_limit(form), ff.form_eval(form, n)))
            envelope = q if envelope is None else _element_sup(envelope, q)
        if envelope is None:
            raise NoClosedForm("Pusta rodzina")
        return envelope
    if isinstance(family, ScalarMultipleFamily):
        form = family_form(family.base)
        dev = element_sub(ff.form_eval(form, n), family.limit)
        if _nonzero_coordinate(dev, family.space) is None:
            return dev
        raise NoClosedForm("Obwiednia rodziny {lambda·a_n} jest nieograniczona")
    raise NoClosedForm(f"Nieobsługiwany rodzaj rodziny: {type(family).__name__}")


def _element_sup(x, y):
    return element_lattice(x, y, "sup")


# --- Rodziny rosnące i ograniczone ---

def _bound_form(bound, form):
    cap = bound if isinstance(bound, (SeqElement, PLFunction, DirectSumElement)) else None
    if cap is None:
        m = to_rat(bound)
        if isinstance(form, ff.SeqFamilyForm):
            cap = constant(m)
        elif isinstance(form, ff.PLFamilyForm):
            cap = plf.pl_constant(m)
        else:
            cap = DirectSumElement(plf.pl_constant(m), plf.pl_constant(m))
    return ff.form_constant(cap, form.space)


def verify_increasing_bounded(sequence, bound) -> None:
    """Rzuca NotMonotone / NotBounded, gdy rodzina nie jest rosnąca, dodatnia i ograniczona przez bound·𝟙."""
    form = family_form(sequence)
    try:
        step = ff.form_decreasing(ff.form_scale(-1, form))
    except Unsupported as e:
        raise NotMonotone(f"Monotoniczność rodziny nierozstrzygalna w gramatyce: {e}") from e
    if not step.proved:
        raise NotMonotone(f"Rodzina nie jest rosnąca (n={step.n}, współrzędna {step.coordinate})")
    first = ff.form_nonneg(form, 1)
    if first.status == "failed" and first.n == 1:
        raise NotBounded(f"Rodzina nie jest dodatnia (współrzędna {first.coordinate})")
    gap = ff.form_nonneg(ff.form_sub(_bound_form(bound, form), form))
    if not gap.proved:
        raise NotBounded(f"Rodzina nie jest ograniczona przez {bound} (n={gap.n}, współrzędna {gap.coordinate})")
    logger.debug(f"Rodzina {type(sequence).__name__} rosnąca i ograniczona przez {bound}")


def norm_witness(sequence):
    """Skalarny świadek tau(n) ↓ 0 z ||S(n) - granica punktowa||_sup <= tau(n) (rodziny ciągów)."""
    form = family_form(sequence)
    if not isinstance(form, ff.SeqFamilyForm):
        raise WitnessMissing("Świadek normowy tylko dla rodzin ciągów")
    try:
        limit = ff.form_pointwise_limit(form)
    except NoStabilization as e:
        raise WitnessMissing(f"Rodzina bez granicy punktowej: {e}") from e
    tau = zero()
    for w in form.windows:
        tau = seq_add(tau, tail_sup_majorant(seq_abs(w.pattern), w.slope, w.offset))
    for r in form.ranks:
        try:
            drift = scalar_majorant(seq_sub(r.coeffs, constant(seq_limit(r.coeffs))))
        except NotInC as e:
            raise WitnessMissing(f"Współczynnik {r.coeffs} nie ma granicy: {e}") from e
        tau = seq_add(tau, seq_scale(seq_sup_norm(r.vector), drift))
    if form.prefix:
        length = len(form.prefix)
        top = max(seq_sup_norm(seq_sub(p, limit)) for p in form.prefix)
        tau = seq_add(tau, seq_element({n: top for n in range(1, length + 1)}, (), length + 1))
    if tau.is_zero():
        return zero_sequence(SpaceTag.REAL)
    return _validated(Scalar(tau))


# --- Kanoniczni świadkowie ---

def _majorant_in(x: SeqElement, space: SpaceTag) -> SeqElement:
    """x >= 0 albo jego majoranta w przestrzeni (o ile istnieje w gramatyce)."""
    hull = hull_in_space(x, space) if space in SEQUENCE_SPACES else None
    return hull if hull is not None else x


def _seq_canonical(form: ff.SeqFamilyForm, space: SpaceTag):
    parts = []
    for w in form.windows:
        parts.append(TailTruncation(_majorant_in(seq_abs(w.pattern), space), w.slope, w.offset, space))
    limit = ff.form_pointwise_limit(form)
    for r in form.ranks:
        try:
            tau = scalar_majorant(seq_sub(r.coeffs, constant(seq_limit(r.coeffs))))
        except NotInC as e:
            raise WitnessMissing(f"Współczynnik {r.coeffs} nie ma granicy: {e}") from e
        for vec in (seq_positive_part(r.vector), seq_negative_part(r.vector)):
            if not vec.is_zero():
                parts.append(Modulated(tau, _majorant_in(vec, space), space))
    if form.prefix:
        length = len(form.prefix)
        top = None
        for n in range(1, length + 1):
            dev = seq_abs(seq_sub(form.prefix[n - 1], limit))
            top = dev if top is None else _element_sup(top, dev)
        indicator = seq_element({n: 1 for n in range(1, length + 1)}, (), length + 1)
        parts.append(Modulated(indicator, _majorant_in(top, space), space))
    return parts


def _pl_canonical(form: ff.PLFamilyForm, role: SpaceTag) -> PLFamily:
    a, b = abs(form.alpha), abs(form.beta)
    base = plf.pl_scale(a, plf.half_indicator())
    if role == SpaceTag.C01:
        return PLFamily(-a, a + b, base, SpaceTag.C01)
    return PLFamily(-a, b, base, SpaceTag.L1)


def canonical_witness(sequence, space: Optional[SpaceTag] = None):
    """Świadek p_n ↓ 0 dominujący |S(n) - granica punktowa| zbudowany z postaci normalnej S."""
    space = space or sequence.space
    form = family_form(sequence)
    if isinstance(form, ff.PLFamilyForm):
        witness = _pl_canonical(form, space)
    elif isinstance(form, ff.DirectSumFamilyForm):
        witness = DirectSumPair(_pl_canonical(form.cform, SpaceTag.C01), _pl_canonical(form.lform, SpaceTag.L1))
    else:
        try:
            parts = _seq_canonical(form, space)
        except NoStabilization as e:
            raise WitnessMissing(f"Rodzina bez granicy punktowej: {e}") from e
        if not parts:
            return zero_sequence(space)
        witness = parts[0]
        for part in parts[1:]:
            witness = AffineCombo(ONE, witness, ONE, part)
    verdict = check_decreasing_null(witness)
    if not isinstance(verdict, Verified):
        raise WitnessMissing(f"Kanoniczny świadek nie leży w {space}: {verdict.to_json_dict()}")
    return witness


# --- Ponowne sprawdzanie certyfikatów ---

def _recheck_domination(cert: FailedDominationAt, sequence, limit, witness, family) -> bool:
    w_form = family_form(witness)
    coordinate = cert.coordinate
    if family is not None and cert.member is not None:
        if isinstance(family, FiniteFamily):
            sequence, limit = family.members[cert.member], family.limits[cert.member]
        elif isinstance(family, CoordinateFamily):
            base = family_form(family.base)
            k = cert.member
            if cert.pair is not None:
                lhs = abs(ff.form_value_at(base, cert.pair[0], k) - ff.form_value_at(base, cert.pair[1], k))
            else:
                lhs = abs(ff.form_value_at(base, cert.n, k) - family.limit.value(k))
            return lhs > _value_at(w_form, cert.n, 1)
    if isinstance(family, ScalarMultipleFamily):
        sequence, limit = family.base, family.limit
    rhs = _value_at(w_form, cert.n, coordinate)
    if sequence is None:
        return rhs < 0
    s_form = family_form(sequence)
    if cert.pair is not None:
        first, second = cert.pair
        if min(first, second) < cert.n:
            return False
        lhs = abs(_value_at(s_form, first, coordinate) - _value_at(s_form, second, coordinate))
    else:
        lhs = abs(_value_at(s_form, cert.n, coordinate) - _element_at(limit, coordinate))
    if cert.scale is not None:
        lhs *= abs(cert.scale)
    return lhs > rhs


def recheck_certificate(cert, sequence=None, limit=None, witness=None, family=None,
                        samples: Iterable[int] = (1, 2, 4, 16, 64, 256, 1024)) -> bool:
    """Jedna niezależna ewaluacja potwierdzająca certyfikat."""
    if isinstance(cert, FailedDominationAt):
        return _recheck_domination(cert, sequence, limit, witness, family)
    if isinstance(cert, NotDecreasingAt):
        form = family_form(witness)
        return _value_at(form, cert.n + 1, cert.coordinate) > _value_at(form, cert.n, cert.coordinate)
    if isinstance(cert, PointwiseInfPositive):
        form = family_form(witness)
        return cert.bound > 0 and all(_value_at(form, n, cert.index) >= cert.bound for n in samples)
    if isinstance(cert, EnvelopeLowerBound):
        if family is None:
            return cert.bound > 0 and all(value >= cert.bound for _, value in cert.samples)
        return cert.bound > 0 and all(_envelope_measure(family, n, cert.reason) >= cert.bound and
                                      value >= cert.bound for n, value in cert.samples)
    if isinstance(cert, LimitEscapesSpace):
        refutation = cert.refutation
        if isinstance(refutation, MembershipRefutation):
            return isinstance(space_membership(cert.limit, SpaceTag(refutation.space)), Refuted)
        if isinstance(refutation, JumpList):
            target = cert.limit.cpart if isinstance(cert.limit, DirectSumElement) else cert.limit
            return isinstance(plf.pl_continuity(target), Refuted)
    raise Unsupported(f"Brak procedury sprawdzenia dla {type(cert).__name__}")


def recheck_domination(sequence, limit, witness, samples: int = RECHECK_SAMPLES, seed: int = 0,
                       top: int = 4096) -> bool:
    """Brutalne sprawdzenie |S(n) - limit| <= W(n) w losowych indeksach."""
    rng = random.Random(seed)
    s_form, w_form = family_form(sequence), family_form(witness)
    for _ in range(samples):
        n = rng.randint(1, top)
        dev = element_abs(element_sub(ff.form_eval(s_form, n), limit))
        if _domination_gap(dev, ff.form_eval(w_form, n), sequence.space) is not None:
            logger.warning(f"Losowe sprawdzenie zawiodło dla n={n}")
            return False
    return True


def _describe_family(family) -> str:
    if isinstance(family, CoordinateFamily):
        return f"coordinates of {type(family.base).__name__}"
    if isinstance(family, FiniteFamily):
        return f"finite family of {len(family.members)}"
    return f"scalar multiples of {type(family.base).__name__}"

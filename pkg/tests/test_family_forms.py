# --- tests/test_family_forms.py ---
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from conftest import pl_functions, rationals, sample_points, seq_elements
from errors import NoClosedForm, NoStabilization, Unsupported
import family_forms as ff
from family_forms import RankTerm, Window
from lattice_core import ODD, SpaceTag, constant, geometric, seq_abs, seq_scale, unit_vector, zero
import pl_functions as plf
from sequences import BasisVectors, PrefixSum, TailTruncation, family_form

HALF = Fraction(1, 2)
SMALL = seq_elements(max_overrides=2, max_terms=2)


@st.composite
def window_forms(draw, max_windows: int = 3):
    windows = draw(st.lists(st.builds(Window, st.integers(1, 2), st.integers(-1, 2), SMALL),
                            max_size=max_windows))
    return ff.seq_form(head=draw(SMALL), windows=windows)


def test_seq_form_merges_equal_thresholds():
    form = ff.seq_form(windows=[Window(1, 0, constant(1)), Window(1, 0, constant(-1)), Window(2, 0, constant(2))])
    assert form.windows == (Window(2, 0, constant(2)),)
    with pytest.raises(Unsupported):
        ff.seq_form(windows=[Window(0, 1, constant(1))])


def test_rank_terms_with_equal_vectors_are_merged():
    form = ff.seq_form(ranks=[RankTerm(constant(1), unit_vector(2)), RankTerm(constant(-1), unit_vector(2))])
    assert form.ranks == ()


def test_rank_terms_with_proportional_vectors_are_merged():
    doubled = RankTerm(constant(1), seq_scale(2, unit_vector(2)))
    form = ff.seq_form(ranks=[doubled, RankTerm(constant(-2), unit_vector(2))])
    assert form.ranks == ()
    kept = ff.seq_form(ranks=[doubled, RankTerm(constant(1), unit_vector(2))])
    assert kept.ranks == (RankTerm(constant(3), unit_vector(2)),)


def test_normalized_vector_has_unit_leading_coordinate():
    scale, unit = ff.normalized_vector(seq_scale(3, geometric(1, HALF)))
    assert scale == Fraction(3, 2)
    assert unit == seq_scale(2, geometric(1, HALF))
    assert ff.normalized_vector(seq_scale(-4, unit_vector(5))) == (4, seq_scale(-1, unit_vector(5)))
    assert ff.normalized_vector(zero()) == (1, zero())


def test_form_eval_rejects_index_zero():
    with pytest.raises(Unsupported):
        ff.form_eval(family_form(PrefixSum()), 0)


@given(window_forms())
@settings(derandomize=True, max_examples=80, deadline=None)
def test_coordinate_sequence_matches_evaluation(form):
    for j in range(1, 13):
        column = ff.form_coordinate(form, j)
        assert [column.value(n) for n in range(1, 13)] == [ff.form_value_at(form, n, j) for n in range(1, 13)]


@given(window_forms())
@settings(derandomize=True, max_examples=60, deadline=None)
def test_shift_advances_index(form):
    shifted = ff.form_shift(form, 1)
    for n in range(1, 8):
        assert ff.form_eval(shifted, n) == ff.form_eval(form, n + 1)


@given(window_forms())
@settings(derandomize=True, max_examples=60, deadline=None)
def test_pointwise_limit_is_eventual_value(form):
    limit = ff.form_pointwise_limit(form)
    for j in range(1, 16):
        assert ff.form_value_at(form, j + 3, j) == limit.value(j)


@given(window_forms())
@settings(derandomize=True, max_examples=120, deadline=None)
def test_nonneg_decision_is_sound(form):
    result = ff.form_nonneg(form)
    if result.status == "failed":
        assert ff.form_value_at(form, result.n, result.coordinate) < 0
    elif result.proved:
        for n in range(1, 10):
            assert all(ff.form_value_at(form, n, j) >= 0 for j in range(1, 40))


@given(window_forms(), window_forms(), st.sampled_from(["sup", "inf"]))
@settings(derandomize=True, max_examples=60, deadline=None)
def test_lattice_of_forms_is_pointwise(f, g, kind):
    pick = max if kind == "sup" else min
    combined = ff.form_lattice(f, g, kind)
    for n in range(1, 8):
        assert [ff.form_value_at(combined, n, j) for j in range(1, 25)] == [
            pick(ff.form_value_at(f, n, j), ff.form_value_at(g, n, j)) for j in range(1, 25)]


@given(window_forms())
@settings(derandomize=True, max_examples=60, deadline=None)
def test_envelope_bound_is_a_lower_bound(form):
    bound, valid_from = ff.envelope_lower_bound(form)
    for n in range(valid_from, valid_from + 10):
        assert ff.form_sup_norm_at(form, n) >= bound


def test_decreasing_truncation_and_increasing_prefix():
    assert ff.form_decreasing(family_form(TailTruncation(constant(1), 2, 0))).proved
    result = ff.form_decreasing(family_form(PrefixSum()))
    assert result.status == "failed"
    form = family_form(PrefixSum())
    assert ff.form_value_at(form, result.n + 1, result.coordinate) > ff.form_value_at(form, result.n,
                                                                                       result.coordinate)


def test_basis_vectors_keep_unit_envelope():
    bound, valid_from = ff.envelope_lower_bound(family_form(BasisVectors()))
    assert bound == 1
    assert ff.form_sup_norm_at(family_form(BasisVectors()), valid_from) == 1


def test_envelope_of_rank_terms_with_nonzero_limit_is_not_closed():
    form = ff.seq_form(ranks=[RankTerm(geometric(1, HALF), constant(1))])
    with pytest.raises(NoClosedForm):
        ff.envelope_lower_bound(form)
    with pytest.raises(NoClosedForm):
        ff.envelope_lower_bound(ff.pl_form(1))


def test_rank_terms_without_limits_do_not_stabilize():
    oscillating = ff.seq_form(ranks=[RankTerm(constant(1, ODD), unit_vector(1))])
    with pytest.raises(NoStabilization):
        ff.form_pointwise_limit(oscillating)


def test_rank_term_nonneg_uses_coefficient_floor():
    form = ff.seq_form(head=constant(1), ranks=[RankTerm(geometric(-1, HALF), constant(1))])
    assert ff.form_nonneg(form).proved
    falling = ff.seq_form(head=constant(Fraction(1, 4)), ranks=[RankTerm(geometric(-1, HALF), constant(1))])
    result = ff.form_nonneg(falling)
    assert result.status == "failed" and result.n == 1


def test_abs_of_single_rank_term():
    form = ff.seq_form(ranks=[RankTerm(geometric(-1, HALF), constant(1, ODD))])
    assert ff.form_eval(ff.form_abs(form), 2) == seq_abs(ff.form_eval(form, 2))
    with pytest.raises(Unsupported):
        ff.form_abs(ff.seq_form(head=constant(1), ranks=form.ranks))


def test_map_elements_applies_to_every_part():
    form = family_form(TailTruncation(constant(1), 1, 0))
    doubled = ff.map_elements(form, lambda x: seq_scale(2, x))
    for n in range(1, 5):
        assert ff.form_eval(doubled, n) == seq_scale(2, ff.form_eval(form, n))


def test_describe_form_mentions_windows():
    text = ff.describe_form(family_form(PrefixSum(ODD)))
    assert "j<=2n-1" in text


# --- Rodziny PL ---

@given(pl_functions(), rationals, rationals)
@settings(derandomize=True, max_examples=60, deadline=None)
def test_pl_coordinates_follow_evaluation(base, alpha, beta):
    form = ff.pl_form(alpha, beta, base, SpaceTag.C01)
    for x in sample_points():
        column = ff.form_coordinate(form, x)
        for n in range(1, 8):
            assert column.value(n) == ff.form_eval(form, n)(x)


@given(pl_functions(continuous=True), rationals, rationals)
@settings(derandomize=True, max_examples=80, deadline=None)
def test_pl_nonneg_decision_is_sound(base, alpha, beta):
    form = ff.pl_form(alpha, beta, base, SpaceTag.C01)
    result = ff.form_nonneg(form)
    if result.status == "failed":
        assert ff.form_eval(form, result.n)(result.coordinate) < 0
    else:
        assert result.proved
        for n in range(1, 8):
            member = ff.form_eval(form, n)
            assert all(member(x) >= 0 for x in sample_points())


@given(rationals, rationals)
@settings(derandomize=True, max_examples=40)
def test_pl_decreasing_by_signs(alpha, beta):
    assume(alpha != 0 or beta != 0)
    form = ff.pl_form(alpha, beta, plf.pl_constant(0), SpaceTag.L1)
    result = ff.form_decreasing(form)
    assert result.proved == (alpha <= 0 and beta >= 0)
    if not result.proved:
        x = result.coordinate
        assert ff.form_eval(form, result.n)(x) < ff.form_eval(form, result.n + 1)(x)


def test_pl_pointwise_limit_is_half_open_indicator():
    assert ff.form_pointwise_limit(ff.pl_form(1)) == plf.phi_limit()
    pair = ff.DirectSumFamilyForm(ff.pl_form(0, 0, plf.pl_constant(1), SpaceTag.C01), ff.pl_form(1))
    assert ff.form_pointwise_limit(pair) == plf.DirectSumElement(plf.pl_constant(1), plf.phi_limit())


def test_pl_shift_and_lattice_limits():
    with pytest.raises(Unsupported):
        ff.form_shift(ff.pl_form(1), 1)
    constant_form = ff.pl_form(base=plf.pl_constant(2))
    assert ff.form_shift(constant_form, 3) is constant_form
    with pytest.raises(Unsupported):
        ff.form_lattice(ff.pl_form(1), ff.pl_form(0, 1), "sup")
    with pytest.raises(Unsupported):
        ff.form_add(ff.pl_form(1), family_form(PrefixSum()))


def test_zero_form_is_nonneg():
    assert ff.form_nonneg(ff.seq_form(head=zero())).proved

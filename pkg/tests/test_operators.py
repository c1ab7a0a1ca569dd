# --- tests/test_operators.py ---
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import positive_rationals, rationals, seq_elements
import convergence as cv
from errors import DomainMismatch, IllFormedGrammar, NotInC, Unsupported, ZeroCoefficient
from lattice_core import (EVEN, ODD, SpaceTag, constant, from_values, geometric, seq_abs, seq_add, seq_scale,
                          seq_sub, seq_sup_norm, seq_truncate, unit_vector, zero)
import operators as ops
from operators import (Diagonal, DualFunctionalC, Embed0Phi, EvalFunctional, FiniteRank, Identity, Scaled, SumOp,
                       functional_eval)
import pl_functions as plf
from sequences import Constant, Image, PrefixSum, seq_eval
from verdicts import Inconclusive, JumpList, NoPreimageCertificate, OrderViolation, Refuted, Verified

HALF = Fraction(1, 2)
G = geometric(1, HALF)
T_RANK_ONE = FiniteRank(((DualFunctionalC(G), constant(1)),))
SUMMABLE_RATIOS = st.sampled_from([Fraction(1, 4), HALF, Fraction(3, 4)])


def coords(x, upto=16):
    return [x.value(j) for j in range(1, upto + 1)]


@st.composite
def summable_weights(draw):
    head = draw(st.dictionaries(st.integers(1, 5), rationals, max_size=3))
    return seq_add(from_values(head), geometric(draw(rationals), draw(SUMMABLE_RATIOS)))


@st.composite
def convergent_elements(draw):
    head = draw(st.dictionaries(st.integers(1, 5), rationals, max_size=3))
    tail = seq_add(constant(draw(rationals)), geometric(draw(rationals), draw(SUMMABLE_RATIOS)))
    return seq_add(from_values(head), tail)


@st.composite
def finite_diagonals(draw):
    return from_values(draw(st.dictionaries(st.integers(1, 8), rationals, max_size=4)))


# --- Funkcjonały ---

def test_functional_evaluation():
    assert functional_eval(DualFunctionalC(G), constant(1)) == 1
    assert functional_eval(ops.limit_functional(), constant(3)) == 3
    assert functional_eval(ops.coordinate_functional(2), G) == Fraction(1, 4)
    assert DualFunctionalC(G, Fraction(-2)).norm() == 3


def test_limit_functional_needs_convergent_argument():
    with pytest.raises(NotInC):
        functional_eval(ops.limit_functional(), constant(1, ODD))


def test_non_summable_weights_are_rejected():
    with pytest.raises(IllFormedGrammar):
        DualFunctionalC(constant(1))


@given(summable_weights(), rationals, convergent_elements())
@settings(derandomize=True, max_examples=80, deadline=None)
def test_functional_splits_into_positive_and_negative_parts(weights, lim_coeff, x):
    f = DualFunctionalC(weights, lim_coeff)
    plus, minus = ops.functional_positive_part(f), ops.functional_negative_part(f)
    assert functional_eval(f, x) == functional_eval(plus, x) - functional_eval(minus, x)
    assert f.norm() == plus.norm() + minus.norm()
    assert functional_eval(ops.functional_scale(-2, f), x) == -2 * functional_eval(f, x)


# --- Aplikacja ---

def test_diagonal_acts_pointwise():
    image = ops.op_apply(Diagonal(G), constant(2))
    assert coords(image) == [2 * G.value(j) for j in range(1, 17)]


def test_apply_checks_domain():
    with pytest.raises(DomainMismatch):
        ops.op_apply(Diagonal(G), constant(1, ODD))
    assert coords(ops.op_apply(Diagonal(G, SpaceTag.LINF, SpaceTag.LINF), constant(1, ODD)), 4) == [
        HALF, 0, Fraction(1, 8), 0]


def test_eval_functional_and_identity():
    assert ops.op_apply(EvalFunctional(2), geometric(3, HALF)) == unit_vector(1, Fraction(3, 4))
    assert ops.op_apply(Identity(), constant(5)) == constant(5)
    assert ops.op_apply(Scaled(3, Identity()), constant(1)) == constant(3)


def test_sum_of_operators_needs_equal_spaces():
    with pytest.raises(DomainMismatch):
        SumOp(Diagonal(G), EvalFunctional(1))
    total = SumOp(Diagonal(G), Identity())
    assert coords(ops.op_apply(total, constant(1)), 4) == [1 + G.value(j) for j in range(1, 5)]


def test_embedding_moves_first_component():
    pair = plf.DirectSumElement(plf.phi(3), plf.pl_constant(1))
    image = ops.op_apply(Embed0Phi(), pair)
    assert plf.pl_equal(image.cpart, plf.pl_constant(0))
    assert plf.pl_equal(image.lpart, plf.phi(3))


def test_direct_sum_matrix_mixes_components():
    m = ops.DirectSumMatrix(2, 1, 1)
    image = ops.op_apply(m, plf.DirectSumElement(plf.phi(3), plf.pl_constant(1)))
    assert plf.pl_equal(image.cpart, plf.pl_scale(2, plf.phi(3)))
    assert plf.pl_equal(image.lpart, plf.pl_combine(plf.pl_constant(1), plf.phi(3), "add"))
    assert ops.pl_matrix(SumOp(m, Embed0Phi())) == (2, 1, 2)
    assert ops.op_leq(Embed0Phi(), m)
    leq, witness = ops.op_leq_witness(m, Embed0Phi())
    assert not leq and plf.pl_equal(witness.cpart, plf.pl_constant(1))


def test_row_form_of_pl_operator_is_rejected():
    with pytest.raises(DomainMismatch):
        ops.row_form(Embed0Phi())
    with pytest.raises(DomainMismatch):
        ops.pl_matrix(Diagonal(G))
    assert ops.pl_matrix(Scaled(2, Embed0Phi())) == (0, 0, 2)


@given(finite_diagonals(), seq_elements(max_overrides=3, max_terms=2))
@settings(derandomize=True, max_examples=80, deadline=None)
def test_finite_diagonal_as_finite_rank(coeffs, x):
    diagonal = Diagonal(coeffs, SpaceTag.LINF, SpaceTag.LINF)
    rank = ops.as_finite_rank(diagonal)
    assert coords(ops.op_apply(rank, x), 20) == coords(ops.op_apply(diagonal, x), 20)
    assert ops.finite_rank_view(diagonal) is not None


def test_infinite_diagonal_is_not_finite_rank():
    with pytest.raises(Unsupported):
        ops.as_finite_rank(Diagonal(G))
    assert ops.finite_rank_view(Diagonal(G)) is None
    assert ops.finite_rank_view(Embed0Phi()) is None


def test_compact_assumption_follows_vanishing_coefficients():
    assert Diagonal(G).compact_assumption()
    assert not Diagonal(constant(1)).compact_assumption()


# --- Układy liniowe ---

def test_gauss_jordan_solves_square_system():
    assert ops.gauss_jordan_solve([[1, 2], [3, 4]], [5, 6]) == [-4, Fraction(9, 2)]


def test_gauss_jordan_sets_free_variables_to_zero():
    assert ops.gauss_jordan_solve([[1, 1]], [2]) == [2, 0]


def test_gauss_jordan_detects_inconsistency():
    assert ops.gauss_jordan_solve([[1, 1], [2, 2]], [1, 3]) is None


# --- Granice i przeciwobrazy skończonego rzędu ---

def test_finite_rank_limit_of_even_prefix():
    limit, preimage = ops.finite_rank_levi_limit(T_RANK_ONE, PrefixSum(EVEN), 1)
    assert limit == constant(Fraction(1, 3))
    assert preimage == constant(Fraction(1, 3))
    assert ops.op_apply(T_RANK_ONE, preimage) == limit


@given(st.lists(st.tuples(summable_weights(), seq_elements(max_overrides=2, max_terms=1)), min_size=1, max_size=2))
@settings(derandomize=True, max_examples=40, deadline=None)
def test_finite_rank_limit_of_full_prefix_is_image_of_one(terms):
    op = FiniteRank(tuple((DualFunctionalC(w), y) for w, y in terms), SpaceTag.LINF, SpaceTag.LINF)
    limit, preimage = ops.finite_rank_levi_limit(op, PrefixSum(space=SpaceTag.LINF), 1)
    assert limit == ops.op_apply(op, constant(1))
    assert preimage == constant(1)


INCREASING_C = [PrefixSum(ODD), PrefixSum(EVEN), PrefixSum(), Constant(constant(1), SpaceTag.C)]


def seeded_finite_rank(seed: int) -> FiniteRank:
    """Operator rzędu <= 4 o skończenie nośnych wagach."""
    rng = random.Random(seed)
    terms = []
    for _ in range(rng.randint(1, 4)):
        weights = from_values({j: Fraction(rng.randint(-3, 3), 4) for j in range(1, rng.randint(2, 7))})
        vector = seq_add(from_values({j: Fraction(rng.randint(-2, 2), 2) for j in range(1, 4)}),
                         constant(Fraction(rng.randint(0, 2), 2)))
        terms.append((DualFunctionalC(weights, Fraction(rng.randint(-2, 2), 4)), vector))
    return FiniteRank(tuple(terms))


@pytest.mark.parametrize("seed", range(20))
def test_finite_rank_limit_matches_late_images(seed):
    op = seeded_finite_rank(seed)
    for sequence in INCREASING_C:
        limit, _ = ops.finite_rank_levi_limit(op, sequence, 1)
        assert coords(limit, 20) == coords(ops.op_apply(op, seq_eval(sequence, 16)), 20)
        image = Image(op, sequence)
        assert isinstance(cv.check_order_convergence(image, limit, cv.canonical_witness(image)), Verified)


def test_zero_operator_preimage():
    empty = FiniteRank(())
    assert ops.finite_rank_preimage(empty, zero()) == zero()
    missing = ops.finite_rank_preimage(empty, constant(1))
    assert isinstance(missing, NoPreimageCertificate) and missing.reason == "zero operator"


def test_finite_rank_decomposition():
    f = DualFunctionalC(seq_sub(unit_vector(1), unit_vector(2)))
    op = FiniteRank(((f, constant(1)),))
    plus, minus = ops.finite_rank_decompose(op)
    x = from_values({1: 3, 2: 5})
    assert ops.op_apply(plus, x) == constant(3)
    assert ops.op_apply(minus, x) == constant(5)
    assert ops.op_apply(op, x) == constant(-2)


def test_diagonal_preimage_outcomes():
    d = Diagonal(G)
    oscillating = ops.diagonal_preimage(d, geometric(1, HALF, EVEN), SpaceTag.C)
    assert isinstance(oscillating, NoPreimageCertificate) and oscillating.reason == "membership"
    assert ops.diagonal_preimage(d, geometric(1, HALF, EVEN), SpaceTag.LINF) == constant(1, EVEN)
    growing = ops.diagonal_preimage(d, constant(1), SpaceTag.LINF)
    assert isinstance(growing, NoPreimageCertificate) and growing.reason == "unbounded quotient"
    assert ops.diagonal_preimage(d, zero(), SpaceTag.C) == zero()


def test_diagonal_preimage_with_vanishing_class_is_rejected():
    quarter_on_even = Diagonal(geometric(1, Fraction(1, 4), EVEN))
    with pytest.raises(ZeroCoefficient):
        ops.diagonal_preimage(quarter_on_even, geometric(1, HALF), SpaceTag.LINF)


def test_diagonal_preimage_with_zero_head_coefficient_is_rejected():
    d = Diagonal(seq_sub(constant(1), unit_vector(3)))
    with pytest.raises(ZeroCoefficient):
        ops.diagonal_preimage(d, constant(1), SpaceTag.LINF)
    assert ops.diagonal_preimage(Diagonal(seq_add(constant(1), unit_vector(3))), constant(2), SpaceTag.C).value(3) == 1


def test_pl_preimage_of_jump_is_refused():
    target = plf.DirectSumElement(plf.pl_constant(0), plf.phi_limit())
    result = ops.pl_preimage(Embed0Phi(), target)
    assert isinstance(result, NoPreimageCertificate) and result.reason == "jump"
    assert isinstance(result.detail, JumpList)
    assert result.detail.jumps[0].location == HALF


def test_pl_preimage_of_continuous_part():
    target = plf.DirectSumElement(plf.pl_constant(0), plf.phi(3))
    result = ops.pl_preimage(Embed0Phi(), target)
    assert plf.pl_equal(result.cpart, plf.phi(3))
    moved = ops.pl_preimage(Embed0Phi(), plf.DirectSumElement(plf.pl_constant(1), plf.phi(3)))
    assert moved.reason == "first component must vanish"


# --- Porządek i normy ---

def test_diagonal_is_dominated_by_rank_one_operator():
    assert ops.op_leq(Diagonal(G), T_RANK_ONE)
    assert ops.op_leq_witness(T_RANK_ONE, Diagonal(G)) == (False, unit_vector(2))


def test_positivity():
    assert ops.op_is_positive(Diagonal(G))
    assert not ops.op_is_positive(Scaled(-1, Diagonal(G)))
    assert ops.op_is_positive(Identity())
    assert ops.op_is_positive(Embed0Phi())
    assert not ops.op_is_positive(Scaled(-1, Embed0Phi()))


@st.composite
def sequence_operators(draw):
    if draw(st.booleans()):
        return Diagonal(draw(finite_diagonals()))
    functional = DualFunctionalC(draw(summable_weights()), draw(rationals))
    return FiniteRank(((functional, draw(finite_diagonals())),))


@st.composite
def positive_vectors(draw):
    return from_values(draw(st.dictionaries(st.integers(1, 8), positive_rationals, min_size=1, max_size=4)))


@given(sequence_operators(), finite_diagonals(), finite_diagonals(), rationals)
@settings(derandomize=True, max_examples=60, deadline=None)
def test_apply_is_linear(op, x, y, lam):
    combined = ops.op_apply(op, seq_add(x, seq_scale(lam, y)))
    separate = seq_add(ops.op_apply(op, x), seq_scale(lam, ops.op_apply(op, y)))
    assert coords(combined, 20) == coords(separate, 20)


@given(sequence_operators(), sequence_operators(), finite_diagonals(), positive_vectors())
@settings(derandomize=True, max_examples=60, deadline=None)
def test_operator_order_implies_order_of_images(s, t, d, x):
    raised = Diagonal(seq_add(d, seq_abs(d)))
    assert ops.op_leq(Diagonal(d), raised)
    for low, high in ((s, t), (Diagonal(d), raised)):
        if ops.op_leq(low, high):
            gap = seq_sub(ops.op_apply(high, x), ops.op_apply(low, x))
            assert all(v >= 0 for v in coords(gap, 20))


def test_far_negative_entry_is_undecided_below_search_limit():
    far = FiniteRank(((DualFunctionalC(seq_sub(unit_vector(1), unit_vector(100))), unit_vector(1)),))
    undecided = ops.op_positivity(far, 64)
    assert isinstance(undecided, Inconclusive) and undecided.horizon == 64
    assert not ops.op_is_positive(far, 64)
    found = ops.op_positivity(far, 128)
    assert isinstance(found, Refuted) and isinstance(found.certificate, OrderViolation)
    assert found.certificate.witness == unit_vector(100)
    assert ops.op_apply(far, unit_vector(100)).value(1) == -1


def test_order_verdicts_carry_witnesses():
    assert isinstance(ops.op_order(Diagonal(G), T_RANK_ONE), Verified)
    refuted = ops.op_order(Identity(), Scaled(-1, Identity()))
    assert isinstance(refuted, Refuted) and refuted.certificate.reason == "diagonal"
    pl = ops.op_order(Embed0Phi(), Scaled(-1, Embed0Phi()))
    assert isinstance(pl, Refuted) and pl.certificate.reason == "negative matrix coefficient"


def test_pl_order_requires_equal_spaces():
    with pytest.raises(DomainMismatch):
        ops.op_leq(Embed0Phi(), Identity())


@given(finite_diagonals(), finite_diagonals())
@settings(derandomize=True, max_examples=80, deadline=None)
def test_diagonal_order_and_distance(d1, d2):
    gap = seq_sub(d2, d1)
    assert ops.op_leq(Diagonal(d1), Diagonal(d2)) == all(v >= 0 for v in coords(gap, 10))
    assert ops.op_norm_dist(Diagonal(d1), Diagonal(d2)) == seq_sup_norm(gap)


@pytest.mark.parametrize("i", [1, 2, 5])
def test_distance_to_truncated_diagonal(i):
    assert ops.op_norm_dist(Diagonal(G), Diagonal(seq_truncate(G, i))) == Fraction(1, 2 ** (i + 1))


def test_rank_one_distance_is_exact():
    detail = ops.op_norm_detail(FiniteRank(()), T_RANK_ONE)
    assert detail == ops.NormDetail(1, True)
    bound = ops.op_norm_detail(Diagonal(seq_scale(2, G)), T_RANK_ONE)
    assert not bound.exact and bound.value == 2


def test_describe_operator():
    assert ops.describe_operator(Scaled(2, Identity())) == "2·I_C"
    assert ops.describe_operator(T_RANK_ONE) == "FiniteRank(rank=1)"
    assert ops.describe_operator(EvalFunctional(3)) == "T_3"
    assert ops.describe_operator(Embed0Phi()) == "Embed0Phi"

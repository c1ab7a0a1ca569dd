# --- tests/test_levi_lab.py ---
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import rationals
import convergence as cv
from errors import (DomainMismatch, NotMonotone, NotSummable, PairingIncomplete, PositivityMissing, Unsupported,
                    WitnessMissing)
import levi_lab as lab
from lattice_core import (EVEN, ODD, SpaceTag, constant, from_values, geometric, seq_add, seq_scale, seq_sub,
                          unit_vector)
import operators as ops
from sequences import AffineCombo, Image, PrefixSum, TailTruncation
from verdicts import Inconclusive, LimitEscapesSpace, NoPreimageCertificate, Refuted, Verified

HALF = Fraction(1, 2)
D = ops.Diagonal(geometric(1, HALF))
T = ops.FiniteRank(((ops.DualFunctionalC(geometric(1, HALF)), constant(1)),))
EVEN_CATALOG = lab.TestCatalog(SpaceTag.C, (lab.CatalogEntry("even_prefix", PrefixSum(EVEN), Fraction(1)),))
ODD_CATALOG = lab.TestCatalog(SpaceTag.C, (lab.CatalogEntry("odd_prefix", PrefixSum(ODD), Fraction(1)),))


@pytest.fixture(scope="module")
def rank_one_set():
    return lab.collective_set([T], EVEN_CATALOG)


# --- Katalog ---

def test_default_catalog_names_and_determinism():
    catalog = lab.catalog_default(SpaceTag.C)
    assert catalog.names() == ["odd_prefix", "even_prefix", "full_prefix", "const_one"] + [
        f"random_{i}" for i in range(1, 11)]
    assert catalog == lab.catalog_default(SpaceTag.C)
    assert catalog.seed == lab.DEFAULT_SEED


@pytest.mark.parametrize("space", [SpaceTag.C, SpaceTag.LINF, SpaceTag.C0, SpaceTag.L1, SpaceTag.CL1])
def test_default_catalogs_are_increasing_and_bounded(space):
    catalog = lab.catalog_default(space, seed=7, random_entries=4)
    assert len(catalog.entries) == len(lab.catalog_default(space, random_entries=0).entries) + 4
    assert catalog.to_json_dict()["space"] == space.value


def test_catalog_rejects_foreign_or_decreasing_entries():
    with pytest.raises(DomainMismatch):
        lab.TestCatalog(SpaceTag.C, (lab.CatalogEntry("x", PrefixSum(space=SpaceTag.LINF), Fraction(1)),))
    with pytest.raises(NotMonotone):
        lab.TestCatalog(SpaceTag.C, (lab.CatalogEntry("x", TailTruncation(constant(1)), Fraction(1)),))


# --- Klasyfikacja ---

def test_identity_on_c_is_only_quasi():
    verdicts = lab.classify_levi(ops.Identity(SpaceTag.C), ODD_CATALOG)
    assert isinstance(verdicts.quasi, Verified)
    assert isinstance(verdicts.quasi_c, Refuted)
    assert isinstance(verdicts.quasi_c.certificate, LimitEscapesSpace)
    assert isinstance(verdicts.sigma_levi, Refuted)


def test_rank_one_operator_is_sigma_levi_on_default_catalog():
    verdicts = lab.classify_levi(T, lab.catalog_default(SpaceTag.C, random_entries=0))
    assert isinstance(verdicts.sigma_levi, Verified)
    assert verdicts.sigma_levi.note == lab.CATALOG_LABEL
    assert [e.entry for e in verdicts.evidence] == ["odd_prefix", "even_prefix", "full_prefix", "const_one"]


def test_diagonal_into_c0_has_no_preimage():
    verdicts = lab.classify_levi(ops.Diagonal(geometric(1, HALF), SpaceTag.C, SpaceTag.C0), EVEN_CATALOG)
    assert isinstance(verdicts.quasi_c, Verified)
    assert isinstance(verdicts.sigma_levi, Refuted)
    assert isinstance(verdicts.sigma_levi.certificate, NoPreimageCertificate)


def test_embedding_refutes_sigma_levi_with_jump():
    catalog = lab.catalog_default(SpaceTag.CL1, random_entries=0)
    verdicts = lab.classify_levi(ops.Embed0Phi(), catalog)
    assert isinstance(verdicts.sigma_levi, Refuted)
    assert verdicts.sigma_levi.certificate.reason == "jump"
    data = verdicts.to_json_dict()
    assert set(data) == {"sigmaLevi", "quasiC", "quasi", "evidence"}


def test_classification_checks_domain():
    with pytest.raises(DomainMismatch):
        lab.classify_levi(ops.Embed0Phi(), EVEN_CATALOG)


def test_collective_classification_input_checks():
    with pytest.raises(DomainMismatch):
        lab.classify_collective(lab.FiniteSet(()), EVEN_CATALOG)
    with pytest.raises(DomainMismatch):
        lab.classify_collective(lab.FiniteSet((ops.Identity(SpaceTag.C), ops.EvalFunctional(1))), EVEN_CATALOG)
    with pytest.raises(Unsupported):
        lab.classify_collective("not a set", EVEN_CATALOG)


def test_singleton_set_agrees_with_single_operator():
    single = lab.classify_levi(T, EVEN_CATALOG)
    collective = lab.classify_collective(lab.FiniteSet((T,)), EVEN_CATALOG)
    assert single == collective


SUMMABLE_RATIOS = st.sampled_from([Fraction(1, 4), HALF, Fraction(3, 4)])
FINITE = st.builds(from_values, st.dictionaries(st.integers(1, 6), rationals, max_size=3))


@st.composite
def c_operators(draw):
    kind = draw(st.sampled_from(["finite", "vanishing", "constant", "rank_one"]))
    if kind == "finite":
        return ops.Diagonal(draw(FINITE))
    if kind == "vanishing":
        return ops.Diagonal(seq_add(draw(FINITE), geometric(draw(rationals), draw(SUMMABLE_RATIOS))))
    if kind == "constant":
        return ops.Diagonal(constant(draw(rationals)))
    weights = geometric(draw(rationals), draw(SUMMABLE_RATIOS))
    vector = seq_add(draw(FINITE), constant(draw(rationals)))
    return ops.FiniteRank(((ops.DualFunctionalC(weights), vector),))


def _statuses(verdicts):
    return verdicts.quasi.status, verdicts.quasi_c.status, verdicts.sigma_levi.status


@given(c_operators())
@settings(derandomize=True, max_examples=15, deadline=None)
def test_sigma_levi_implies_quasi_c_implies_quasi(op):
    verdicts = lab.classify_levi(op, EVEN_CATALOG)
    if isinstance(verdicts.sigma_levi, Verified):
        assert isinstance(verdicts.quasi_c, Verified)
    if isinstance(verdicts.quasi_c, Verified):
        assert isinstance(verdicts.quasi, Verified)


@given(c_operators())
@settings(derandomize=True, max_examples=20, deadline=None)
def test_singleton_sets_agree_with_their_operator(op):
    single = lab.classify_levi(op, EVEN_CATALOG)
    collective = lab.classify_collective(lab.FiniteSet((op,)), EVEN_CATALOG)
    assert _statuses(single) == _statuses(collective)


@given(FINITE, rationals, SUMMABLE_RATIOS)
@settings(derandomize=True, max_examples=15, deadline=None)
def test_diagonal_with_vanishing_coefficients_is_quasi_c(head, c, ratio):
    diagonal = ops.Diagonal(seq_add(head, geometric(c, ratio, EVEN)), SpaceTag.C, SpaceTag.C0)
    assert diagonal.compact_assumption()
    assert isinstance(lab.classify_levi(diagonal, EVEN_CATALOG).quasi_c, Verified)


# --- Kombinacje ---

def test_affine_pair_needs_summable_coefficients(rank_one_set):
    with pytest.raises(NotSummable):
        lab.collective_combine(rank_one_set, rank_one_set, "affinePair", 1, 1)
    with pytest.raises(WitnessMissing):
        lab.collective_combine(rank_one_set, None, "affinePair")
    with pytest.raises(Unsupported):
        lab.collective_combine(rank_one_set, rank_one_set, "median")


def test_affine_pair_with_halves_is_verified(rank_one_set):
    combined = lab.collective_combine(rank_one_set, rank_one_set, "affinePair", HALF, HALF)
    assert isinstance(combined.verdict, Verified)
    assert [name for name, _ in combined.witnesses] == ["even_prefix"]


def test_half_image_converges_with_half_witness(rank_one_set):
    witness = rank_one_set.witness_for("even_prefix")
    limit, _ = ops.finite_rank_levi_limit(T, PrefixSum(EVEN), 1)
    assert limit == constant(Fraction(1, 3))
    images = Image(ops.Scaled(HALF, T), PrefixSum(EVEN))
    verdict = cv.check_order_convergence(images, seq_scale(HALF, limit), AffineCombo(HALF, witness, 0, witness))
    assert isinstance(verdict, Verified)


def test_l1_series_with_geometric_weights(rank_one_set):
    combined = lab.collective_combine(rank_one_set, mode="l1Series", weights=cv.GeometricWeights(HALF, HALF))
    assert isinstance(combined.verdict, Verified)
    assert combined.norm_bound == 1
    with pytest.raises(NotSummable):
        lab.collective_combine(rank_one_set, mode="l1Series", weights=cv.GeometricWeights(1, HALF))


def test_l1_series_with_explicit_weights(rank_one_set):
    combined = lab.collective_combine(rank_one_set, mode="l1Series", weights=[Fraction(1, 3)])
    assert isinstance(combined.verdict, Verified)
    assert combined.norm_bound == Fraction(1, 3)
    with pytest.raises(NotSummable):
        lab.collective_combine(rank_one_set, mode="l1Series", weights=[Fraction(1, 3), Fraction(1, 3)])


# --- Transfer dominacji ---

def test_domination_transfers_quasi_only(rank_one_set):
    result = lab.domination_transfer([D], rank_one_set, {0: 0})
    assert isinstance(result.quasi, Verified)
    assert isinstance(result.sigma_levi, Refuted)
    assert set(result.to_json_dict()) == {"quasi", "quasiC", "sigmaLevi"}


def test_domination_transfer_preconditions(rank_one_set):
    with pytest.raises(PositivityMissing):
        lab.domination_transfer([ops.Scaled(-1, D)], rank_one_set, {0: 0})
    with pytest.raises(PairingIncomplete):
        lab.domination_transfer([D], rank_one_set, {})
    with pytest.raises(PairingIncomplete):
        lab.domination_transfer([ops.Diagonal(constant(2))], rank_one_set, {0: 0})


def test_domination_with_undecided_positivity_is_inconclusive(rank_one_set):
    quarter = Fraction(1, 4)
    far = ops.FiniteRank(((ops.DualFunctionalC(seq_scale(quarter, seq_sub(unit_vector(1), unit_vector(100)))),
                           unit_vector(1)),))
    result = lab.domination_transfer([far], rank_one_set, {0: 0})
    assert isinstance(result.quasi, Inconclusive)
    assert isinstance(result.sigma_levi, Inconclusive)
    assert result.witnesses == ()
    with pytest.raises(PositivityMissing):
        lab.domination_transfer([far], rank_one_set, {0: 0}, pair_search_limit=128)


# --- Scenariusze ---

def test_every_scenario_claim_holds():
    reports = lab.run_scenario_suite()
    assert {r.scenario for r in reports} == set(lab.SCENARIOS)
    failed = [(r.scenario, r.claim, r.computed) for r in reports if not r.passed]
    assert failed == []


def test_scenario_subset_and_report_shape():
    reports = lab.run_scenario_suite(only=["identity_c"])
    assert reports and all(r.scenario == "identity_c" for r in reports)
    assert set(reports[0].to_json_dict()) == {"scenario", "claim", "verdict", "expected", "passed", "certificate",
                                              "micros"}


@pytest.mark.parametrize("name", ["example1_c0", "collective_combinations", "Tk_not_collective"])
def test_named_scenarios_pass(name):
    reports = lab.run_scenario_suite(only=[name])
    assert reports and all(r.scenario == name for r in reports)
    assert [r.claim for r in reports if not r.passed] == []


def test_example1_reports_order_limit_outside_c():
    claims = {r.claim: r for r in lab.run_scenario_suite(only=["example1_c0"])}
    assert claims["order limit is sum 4^-k e_2k"].computed == "verified"
    assert claims["no preimage in c"].computed == "membership"


def test_failing_claim_is_reported_not_raised():
    def boom():
        raise ValueError("x")

    report = lab._claim("s", "c", "verified", boom)
    assert not report.passed
    assert report.computed.startswith("error:")

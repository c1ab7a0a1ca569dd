# --- levi_lab.py ---
"""
Klasyfikacja operatorów (sigma-Levi / quasi-c-sigma-Levi / quasi-sigma-Levi)
na katalogu rosnących, ograniczonych rodzin oraz zestaw scenariuszy regresyjnych.

Kwantyfikator "dla każdej rosnącej ograniczonej rodziny" zastępuje skończony
katalog, więc Verified zawsze oznacza "względem katalogu i gramatyki";
Refuted jest bezwzględne i niesie certyfikat.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import convergence as cv
import family_forms as ff
import operators as ops
import pl_functions as plf
from errors import (DomainMismatch, NoStabilization, NotBounded, NotInC, NotMonotone, NotSummable,
                    PairingIncomplete, PositivityMissing, Unsupported, WitnessInvalid, WitnessMissing,
                    ZeroCoefficient)
from lattice_core import (ALL, EVEN, ODD, SEQUENCE_SPACES, SpaceTag, class_limits, constant,
                          element_membership, element_zero, geometric, make_mask, make_term, real, seq_element,
                          seq_sup_norm, seq_truncate, to_rat, unit_vector, zero)
from sequences import (AffineCombo, BasisVectors, Constant, CoordinateFamily, DirectSumPair, FiniteFamily, Image,
                       PLFamily, PrefixSum, Scalar, ScalarMultipleFamily, ScaledBasisSum, TailTruncation,
                       family_form, seq_eval, zero_sequence)
from utils import Stopwatch, format_rational
from verdicts import (EnvelopeLowerBound, Inconclusive, JumpList, LimitEscapesSpace, NoPreimageCertificate, Refuted,
                      Verified, Verdict, jsonable)

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20240917
RANDOM_ENTRIES = 10
CATALOG_LABEL = "relative to catalog and grammar"


# --- Katalog ---

class CatalogEntry(NamedTuple):
    name: str
    sequence: Any
    bound: Fraction


@dataclass(frozen=True)
class TestCatalog:
    """Rosnące, dodatnie, ograniczone rodziny w przestrzeni `space` (sprawdzane przy tworzeniu)."""
    space: SpaceTag
    entries: Tuple[CatalogEntry, ...]
    seed: Optional[int] = None

    def __post_init__(self):
        for entry in self.entries:
            if entry.sequence.space != self.space:
                raise DomainMismatch(f"Pozycja '{entry.name}' leży w {entry.sequence.space}, katalog w {self.space}")
            cv.verify_increasing_bounded(entry.sequence, entry.bound)

    def names(self) -> List[str]:
        return [e.name for e in self.entries]

    def to_json_dict(self):
        return {"space": self.space.value, "seed": self.seed,
                "entries": [{"name": e.name, "sequence": type(e.sequence).__name__,
                             "bound": format_rational(e.bound)} for e in self.entries]}


def _canonical_entries(space: SpaceTag) -> List[CatalogEntry]:
    one = Fraction(1)
    if space in (SpaceTag.C, SpaceTag.LINF):
        return [CatalogEntry("odd_prefix", PrefixSum(ODD, space=space), one),
                CatalogEntry("even_prefix", PrefixSum(EVEN, space=space), one),
                CatalogEntry("full_prefix", PrefixSum(ALL, space=space), one),
                CatalogEntry("const_one", Constant(constant(1), space), one)]
    if space in (SpaceTag.C0, SpaceTag.C00):
        return [CatalogEntry("full_prefix", PrefixSum(ALL, space=space), one),
                CatalogEntry("odd_prefix", PrefixSum(ODD, space=space), one),
                CatalogEntry("even_prefix", PrefixSum(EVEN, space=space), one),
                CatalogEntry("const_e1", Constant(unit_vector(1), space), one)]
    if space == SpaceTag.REAL:
        return [CatalogEntry("half_steps", _half_steps(), one),
                CatalogEntry("const_one", Constant(real(1), SpaceTag.REAL), one)]
    if space == SpaceTag.CL1:
        zero_l1 = PLFamily(0, 0, None, SpaceTag.L1)
        return [CatalogEntry("phi_pair", DirectSumPair(PLFamily(1, 0, None, SpaceTag.C01), zero_l1), one),
                CatalogEntry("phi_in_l1", DirectSumPair(PLFamily(0, 0, None, SpaceTag.C01),
                                                        PLFamily(1, 0, None, SpaceTag.L1)), one),
                CatalogEntry("const_pair", DirectSumPair(PLFamily(0, 0, plf.pl_constant(1), SpaceTag.C01),
                                                         PLFamily(0, 0, plf.pl_constant(1), SpaceTag.L1)), one)]
    return [CatalogEntry("phi", PLFamily(1, 0, None, space), Fraction(1)),
            CatalogEntry("const_one", Constant(plf.pl_constant(1), space), Fraction(1))]


def _half_steps() -> Scalar:
    """Rodzina skalarna 1 - 2^-n."""
    return Scalar(seq_element({}, [make_term(1, 1), make_term(-1, Fraction(1, 2))], 1))


def _random_entry(rng: random.Random, space: SpaceTag, index: int) -> CatalogEntry:
    name = f"random_{index}"
    if space in SEQUENCE_SPACES - {SpaceTag.REAL}:
        if rng.random() < 0.5:
            modulus = rng.randint(1, 3)
            mask = make_mask(modulus, rng.randrange(modulus))
            coeff = Fraction(rng.randint(1, 4), 4)
            ratio = rng.choice([Fraction(1), Fraction(1, 2), Fraction(1, 3)])
            return CatalogEntry(name, PrefixSum(mask, geometric(coeff, ratio), space), coeff)
        slope = rng.randint(1, 2)
        ratio = rng.choice([Fraction(1), Fraction(1, 4), Fraction(1, 9)])
        coeff = Fraction(rng.randint(1, 4), 4)
        return CatalogEntry(name, ScaledBasisSum(coeff, ratio, slope, rng.randint(0, 2), space), coeff)
    if space == SpaceTag.REAL:
        top = Fraction(rng.randint(1, 4), 4)
        ratio = rng.choice([Fraction(1, 2), Fraction(1, 3), Fraction(3, 4)])
        return CatalogEntry(name, Scalar(seq_element({}, [make_term(top, 1), make_term(-top, ratio)], 1)), top)
    alpha = Fraction(rng.randint(1, 4), 4)
    level = Fraction(rng.randint(0, 2), 4)
    if space == SpaceTag.CL1:
        first = PLFamily(alpha, 0, plf.pl_constant(level), SpaceTag.C01)
        second = PLFamily(rng.choice([Fraction(0), alpha]), 0, None, SpaceTag.L1)
        return CatalogEntry(name, DirectSumPair(first, second), alpha + level)
    return CatalogEntry(name, PLFamily(alpha, 0, plf.pl_constant(level), space), alpha + level)


def catalog_default(space: SpaceTag, seed: int = DEFAULT_SEED, random_entries: int = RANDOM_ENTRIES) -> TestCatalog:
    """Kanoniczne rodziny przestrzeni oraz `random_entries` pseudolosowych pozycji (ustalone ziarno)."""
    rng = random.Random(seed)
    entries = _canonical_entries(space)
    entries += [_random_entry(rng, space, i) for i in range(1, random_entries + 1)]
    logger.debug(f"Katalog {space}: {len(entries)} pozycji (ziarno {seed})")
    return TestCatalog(space, tuple(entries), seed)


# --- Werdykty właściwości ---

class EntryEvidence(NamedTuple):
    entry: str
    sigma_levi: Verdict
    quasi_c: Verdict
    quasi: Verdict


@dataclass(frozen=True)
class PropertyVerdicts:
    sigma_levi: Verdict
    quasi_c: Verdict
    quasi: Verdict
    evidence: Tuple[EntryEvidence, ...] = ()

    def to_json_dict(self):
        return {
            "sigmaLevi": self.sigma_levi.to_json_dict(),
            "quasiC": self.quasi_c.to_json_dict(),
            "quasi": self.quasi.to_json_dict(),
            "evidence": [{"entry": e.entry, "sigmaLevi": e.sigma_levi.to_json_dict(),
                          "quasiC": e.quasi_c.to_json_dict(), "quasi": e.quasi.to_json_dict()}
                         for e in self.evidence],
        }


def _aggregate(verdicts: Sequence[Verdict], names: Sequence[str]) -> Verdict:
    for verdict, name in zip(verdicts, names):
        if isinstance(verdict, Refuted):
            return Refuted(verdict.certificate, note=f"entry '{name}'" + (f": {verdict.note}" if verdict.note else ""))
    for verdict, name in zip(verdicts, names):
        if isinstance(verdict, Inconclusive):
            return Inconclusive(verdict.horizon, f"entry '{name}': {verdict.reason}")
    return Verified(method="catalog", note=CATALOG_LABEL)


def _doubled(witness):
    return AffineCombo(Fraction(2), witness, Fraction(0), witness)


def _tail_escape(image, codomain: SpaceTag) -> Optional[EnvelopeLowerBound]:
    """Rosnący obraz w c0/c00, którego granica punktowa ma niezerowy ogon: żaden świadek w c0 go nie zdominuje."""
    if codomain not in (SpaceTag.C0, SpaceTag.C00):
        return None
    form = family_form(image)
    if not isinstance(form, ff.SeqFamilyForm):
        return None
    try:
        if not ff.form_decreasing(ff.form_scale(-1, form)).proved:
            return None
        top = ff.form_pointwise_limit(form)
    except (NoStabilization, Unsupported):
        return None
    bound = max(abs(lim) for _, lim in class_limits(top))
    if bound == 0:
        return None
    samples = tuple((n, seq_sup_norm(ff.form_eval(ff.form_sub(ff.form_constant(top, form.space), form), n)))
                    for n in range(1, 5))
    return EnvelopeLowerBound(f"image tail in {codomain}", bound, samples, "tail limit")


def _entry_quasi_c(image, codomain: SpaceTag, horizon: int) -> Verdict:
    try:
        limit, _ = cv.pointwise_limit(image)
    except NoStabilization as e:
        return Inconclusive(horizon, f"no pointwise limit: {e}")
    membership = element_membership(limit, codomain)
    if not isinstance(membership, Verified):
        return Refuted(LimitEscapesSpace(limit, membership.certificate))
    try:
        witness = cv.canonical_witness(image, codomain)
    except WitnessMissing as e:
        return Inconclusive(horizon, str(e))
    return cv.check_order_convergence(image, limit, witness, horizon)


def _entry_quasi(image, codomain: SpaceTag, horizon: int, quasi_c: Verdict) -> Verdict:
    if isinstance(quasi_c, Verified):
        return Verified(method="order convergent", witness=_doubled(quasi_c.witness))
    escape = _tail_escape(image, codomain)
    if escape is not None:
        return Refuted(escape)
    try:
        witness = cv.canonical_witness(image, codomain)
    except WitnessMissing as e:
        return Inconclusive(horizon, str(e))
    return cv.check_order_cauchy(image, witness, horizon)


def _entry_sigma(op, entry: CatalogEntry, quasi_c: Verdict, horizon: int) -> Verdict:
    if not isinstance(quasi_c, Verified):
        return quasi_c
    limit = quasi_c.limit
    finite = ops.finite_rank_view(op)
    if finite is not None:
        try:
            fr_limit, preimage = ops.finite_rank_levi_limit(finite, entry.sequence, entry.bound)
        except (NotMonotone, NotBounded, NotInC, DomainMismatch) as e:
            return Inconclusive(horizon, str(e))
        if isinstance(preimage, NoPreimageCertificate):
            return Inconclusive(horizon, "no preimage found in the grammar")
        if fr_limit != limit:
            return Inconclusive(horizon, "finite-rank limit differs from the pointwise limit")
        return Verified(method="finite rank", witness=quasi_c.witness, limit=limit, note=f"preimage {preimage}")
    if isinstance(op, ops.Identity):
        return Verified(method="identity", witness=quasi_c.witness, limit=limit)
    if ops.is_pl_operator(op):
        preimage = ops.pl_preimage(op, limit)
        if isinstance(preimage, NoPreimageCertificate):
            return Refuted(preimage)
        return Verified(method="direct-sum preimage", witness=quasi_c.witness, limit=limit)
    rows = ops.row_form(op)
    if rows.terms:
        return Inconclusive(horizon, "diagonal plus finite rank: preimage search not supported")
    try:
        preimage = ops.diagonal_preimage(ops.Diagonal(rows.diag, op.domain, op.codomain), limit, op.domain)
    except ZeroCoefficient as e:
        return Inconclusive(horizon, str(e))
    if isinstance(preimage, NoPreimageCertificate):
        return Refuted(preimage)
    return Verified(method="diagonal preimage", witness=quasi_c.witness, limit=limit)


def _check_domain(op, catalog: TestCatalog) -> None:
    if op.domain != catalog.space:
        raise DomainMismatch(f"Operator o dziedzinie {op.domain} na katalogu z {catalog.space}")


def classify_levi(op, catalog: TestCatalog, horizon: int = cv.DEFAULT_HORIZON) -> PropertyVerdicts:
    """sigma-Levi / quasi-c / quasi dla jednego operatora na wszystkich pozycjach katalogu."""
    _check_domain(op, catalog)
    evidence = []
    for entry in catalog.entries:
        image = Image(op, entry.sequence)
        try:
            quasi_c = _entry_quasi_c(image, op.codomain, horizon)
            quasi = _entry_quasi(image, op.codomain, horizon, quasi_c)
            sigma = _entry_sigma(op, entry, quasi_c, horizon)
        except (Unsupported, NoStabilization) as e:
            logger.debug(f"Pozycja '{entry.name}': {e}")
            quasi_c = quasi = sigma = Inconclusive(horizon, str(e))
        evidence.append(EntryEvidence(entry.name, sigma, quasi_c, quasi))
    return _summarize(ops.describe_operator(op), evidence)


def _summarize(label: str, evidence: List[EntryEvidence]) -> PropertyVerdicts:
    names = [e.entry for e in evidence]
    result = PropertyVerdicts(_aggregate([e.sigma_levi for e in evidence], names),
                              _aggregate([e.quasi_c for e in evidence], names),
                              _aggregate([e.quasi for e in evidence], names),
                              tuple(evidence))
    logger.info(f"Klasyfikacja {label}: sigmaLevi={result.sigma_levi.status}, quasiC={result.quasi_c.status}, "
                f"quasi={result.quasi.status}")
    return result


# --- Zbiory operatorów ---

@dataclass(frozen=True)
class FiniteSet:
    ops: Tuple[Any, ...]

    @property
    def domain(self) -> SpaceTag:
        return self.ops[0].domain

    @property
    def codomain(self) -> SpaceTag:
        return self.ops[0].codomain


@dataclass(frozen=True)
class EvalFunctionalFamily:
    """{T_k : k >= 1}, T_k a = a_k."""
    domain: SpaceTag = SpaceTag.C0

    @property
    def codomain(self) -> SpaceTag:
        return SpaceTag.REAL


@dataclass(frozen=True)
class ScaledOperatorFamily:
    """{lambda·T : lambda w R}."""
    op: Any

    @property
    def domain(self) -> SpaceTag:
        return self.op.domain

    @property
    def codomain(self) -> SpaceTag:
        return self.op.codomain


OperatorSet = Union[FiniteSet, EvalFunctionalFamily, ScaledOperatorFamily]


def _shared_witness(witnesses: Sequence[Any]):
    shared = witnesses[0]
    for w in witnesses[1:]:
        shared = cv.combine_witness("union", shared, w)
    return shared


def _finite_entry(op_set: FiniteSet, entry: CatalogEntry, horizon: int) -> EntryEvidence:
    images = [Image(op, entry.sequence) for op in op_set.ops]
    codomain = op_set.codomain
    limits = []
    for i, image in enumerate(images):
        limit, _ = cv.pointwise_limit(image)
        membership = element_membership(limit, codomain)
        if not isinstance(membership, Verified):
            refuted = Refuted(LimitEscapesSpace(limit, membership.certificate), note=f"member {i}")
            return EntryEvidence(entry.name, refuted, refuted, _collective_quasi(images, codomain, horizon))
        limits.append(limit)
    family = FiniteFamily(tuple(images), tuple(limits))
    try:
        shared = _shared_witness([cv.canonical_witness(image, codomain) for image in images])
        quasi_c = cv.check_collective(family, None, shared, horizon)
    except (WitnessMissing, WitnessInvalid) as e:
        quasi_c = Inconclusive(horizon, str(e))
    if isinstance(quasi_c, Verified):
        quasi = Verified(method="collectively order convergent", witness=_doubled(quasi_c.witness))
        sigmas = [_entry_sigma(op, entry, Verified(quasi_c.method, quasi_c.witness, limit), horizon)
                  for op, limit in zip(op_set.ops, limits)]
        sigma = _aggregate(sigmas, [f"{entry.name}/member {i}" for i in range(len(sigmas))])
        if isinstance(sigma, Verified):
            sigma = Verified(method="collective", witness=quasi_c.witness)
    else:
        quasi = _collective_quasi(images, codomain, horizon)
        sigma = quasi_c
    return EntryEvidence(entry.name, sigma, quasi_c, quasi)


def _collective_quasi(images, codomain: SpaceTag, horizon: int) -> Verdict:
    for image in images:
        escape = _tail_escape(image, codomain)
        if escape is not None:
            return Refuted(escape)
    try:
        shared = _shared_witness([cv.canonical_witness(image, codomain) for image in images])
    except (WitnessMissing, WitnessInvalid) as e:
        return Inconclusive(horizon, str(e))
    family = FiniteFamily(tuple(images), tuple(element_zero(codomain) for _ in images))
    return cv.check_collective_cauchy(family, shared, horizon)


def _coordinate_entry(entry: CatalogEntry, horizon: int) -> EntryEvidence:
    limit, _ = cv.pointwise_limit(entry.sequence)
    family = CoordinateFamily(entry.sequence, limit)
    cert = cv.envelope_certificate(family, "deviation")
    if cert is not None:
        quasi_c: Verdict = Refuted(cert)
    else:
        try:
            quasi_c = cv.check_collective(family, None, cv.norm_witness(entry.sequence), horizon)
        except (WitnessMissing, WitnessInvalid) as e:
            quasi_c = Inconclusive(horizon, str(e))
    if isinstance(quasi_c, Verified):
        quasi = Verified(method="collectively order convergent", witness=_doubled(quasi_c.witness))
    else:
        cert = cv.envelope_certificate(family, "oscillation")
        if cert is not None:
            quasi = Refuted(cert)
        else:
            try:
                quasi = cv.check_collective_cauchy(family, _doubled(cv.norm_witness(entry.sequence)), horizon)
            except (WitnessMissing, WitnessInvalid) as e:
                quasi = Inconclusive(horizon, str(e))
    # każdy T_k jest surjekcją na R, więc przeciwobraz istnieje dla każdego k
    return EntryEvidence(entry.name, quasi_c, quasi_c, quasi)


def _scaled_entry(op_set: ScaledOperatorFamily, entry: CatalogEntry, horizon: int) -> EntryEvidence:
    image = Image(op_set.op, entry.sequence)
    limit, _ = cv.pointwise_limit(image)
    family = ScalarMultipleFamily(image, limit)
    try:
        witness = cv.canonical_witness(image, op_set.codomain)
    except WitnessMissing:
        witness = zero_sequence(op_set.codomain)
    quasi_c = cv.check_collective(family, None, witness, horizon)
    quasi = cv.check_collective_cauchy(family, witness, horizon)
    sigma = quasi_c
    if isinstance(quasi_c, Verified):
        sigma = _entry_sigma(op_set.op, entry, Verified(quasi_c.method, witness, limit), horizon)
    return EntryEvidence(entry.name, sigma, quasi_c, quasi)


def classify_collective(op_set, catalog: TestCatalog, horizon: int = cv.DEFAULT_HORIZON) -> PropertyVerdicts:
    """Jak classify_levi, ale z jednym wspólnym świadkiem dla wszystkich operatorów zbioru."""
    if isinstance(op_set, FiniteSet):
        if not op_set.ops:
            raise DomainMismatch("Pusty zbiór operatorów")
        if len({(op.domain, op.codomain) for op in op_set.ops}) > 1:
            raise DomainMismatch("Operatory zbioru mają różne dziedziny lub przeciwdziedziny")
        if len(op_set.ops) == 1:
            return classify_levi(op_set.ops[0], catalog, horizon)
    elif not isinstance(op_set, (EvalFunctionalFamily, ScaledOperatorFamily)):
        raise Unsupported(f"Nieobsługiwany rodzaj zbioru operatorów: {type(op_set).__name__}")
    _check_domain(op_set, catalog)
    evidence = []
    for entry in catalog.entries:
        try:
            if isinstance(op_set, FiniteSet):
                evidence.append(_finite_entry(op_set, entry, horizon))
            elif isinstance(op_set, EvalFunctionalFamily):
                evidence.append(_coordinate_entry(entry, horizon))
            else:
                evidence.append(_scaled_entry(op_set, entry, horizon))
        except (Unsupported, NoStabilization) as e:
            logger.debug(f"Pozycja '{entry.name}': {e}")
            unknown = Inconclusive(horizon, str(e))
            evidence.append(EntryEvidence(entry.name, unknown, unknown, unknown))
    return _summarize(type(op_set).__name__, evidence)


# --- Kombinacje zbiorów ---

@dataclass(frozen=True)
class CollectiveSet:
    """Zbiór operatorów z wspólnymi świadkami quasi-c i Cauchy'ego dla pozycji katalogu."""
    ops: Tuple[Any, ...]
    catalog: TestCatalog
    witnesses: Tuple[Tuple[str, Any], ...] = ()
    cauchy_witnesses: Tuple[Tuple[str, Any], ...] = ()

    def witness_for(self, name: str):
        for entry, witness in self.witnesses:
            if entry == name:
                return witness
        raise WitnessMissing(f"Brak wspólnego świadka quasi-c dla pozycji '{name}'")

    def cauchy_witness_for(self, name: str):
        for entry, witness in self.cauchy_witnesses:
            if entry == name:
                return witness
        raise WitnessMissing(f"Brak wspólnego świadka Cauchy'ego dla pozycji '{name}'")


def collective_set(operators: Sequence[Any], catalog: TestCatalog,
                   horizon: int = cv.DEFAULT_HORIZON) -> CollectiveSet:
    """Zbiór z wyznaczonymi (i sprawdzonymi) świadkami dla każdej pozycji katalogu."""
    verdicts = classify_collective(FiniteSet(tuple(operators)), catalog, horizon)
    witnesses, cauchy = [], []
    for e in verdicts.evidence:
        if isinstance(e.quasi_c, Verified) and e.quasi_c.witness is not None:
            witnesses.append((e.entry, e.quasi_c.witness))
        if isinstance(e.quasi, Verified) and e.quasi.witness is not None:
            cauchy.append((e.entry, e.quasi.witness))
    return CollectiveSet(tuple(operators), catalog, tuple(witnesses), tuple(cauchy))


@dataclass(frozen=True)
class CombinedSet:
    ops: Tuple[Any, ...]
    witnesses: Tuple[Tuple[str, Any], ...]
    verdict: Verdict
    norm_bound: Optional[Fraction] = None

    def to_json_dict(self):
        return {"operators": [ops.describe_operator(op) for op in self.ops],
                "verdict": self.verdict.to_json_dict(),
                "norm_bound": jsonable(self.norm_bound)}


def _reverify(operators: Sequence[Any], catalog: TestCatalog, witnesses: Sequence[Tuple[str, Any]],
              horizon: int) -> Verdict:
    verdicts = []
    for entry, (name, witness) in zip(catalog.entries, witnesses):
        images = tuple(Image(op, entry.sequence) for op in operators)
        limits = tuple(cv.pointwise_limit(image)[0] for image in images)
        verdicts.append(cv.check_collective(FiniteFamily(images, limits), None, witness, horizon))
    return _aggregate(verdicts, [name for name, _ in witnesses])


def _operator_norm(op) -> Optional[Fraction]:
    try:
        return ops.op_norm_dist(op, ops.Scaled(Fraction(0), op))
    except (Unsupported, DomainMismatch):
        return None


def _witness_bound(witness) -> Fraction:
    """sup p_1, czyli ograniczenie całego malejącego świadka."""
    top = seq_eval(witness, 1)
    if isinstance(top, plf.DirectSumElement):
        return max(plf.pl_sup_norm(top.cpart), plf.pl_sup_norm(top.lpart, essential=True))
    if isinstance(top, plf.PLFunction):
        return plf.pl_sup_norm(top, essential=witness.space == SpaceTag.L1)
    return seq_sup_norm(top)


def collective_combine(first: CollectiveSet, second: Optional[CollectiveSet] = None, mode: str = "affinePair",
                       alpha=1, beta=1, weights=None, horizon: int = cv.DEFAULT_HORIZON) -> CombinedSet:
    """affinePair: {alpha·T + beta·S} ze świadkiem p_n + q_n; l1Series: suma alpha_i·T_i ze świadkiem l1_witness."""
    catalog = first.catalog
    if mode == "affinePair":
        if second is None:
            raise WitnessMissing("affinePair wymaga dwóch zbiorów")
        if second.catalog.names() != catalog.names():
            raise DomainMismatch("Zbiory sprawdzone na różnych katalogach")
        a, b = to_rat(alpha), to_rat(beta)
        if abs(a) + abs(b) > 1:
            raise NotSummable(f"|alpha| + |beta| = {format_rational(abs(a) + abs(b))} > 1")
        if a == 1 and b == 0:
            combined = first.ops
        else:
            combined = tuple(ops.SumOp(ops.Scaled(a, t), ops.Scaled(b, s)) for t in first.ops for s in second.ops)
        witnesses = tuple((e.name, AffineCombo(Fraction(1), first.witness_for(e.name), Fraction(1),
                                               second.witness_for(e.name))) for e in catalog.entries)
        verdict = _reverify(combined, catalog, witnesses, horizon)
        return CombinedSet(tuple(combined), witnesses, verdict)
    if mode == "l1Series":
        if isinstance(weights, cv.GeometricWeights):
            if len(first.ops) != 1:
                raise NotSummable("Wagi geometryczne wymagają jednego operatora")
            signed_total = to_rat(weights.first) / (1 - to_rat(weights.ratio))
            weights.total()  # iloraz < 1
            series = ops.Scaled(signed_total, first.ops[0])
            copies = 1
        else:
            coeffs = [to_rat(w) for w in (weights or ())]
            if len(coeffs) != len(first.ops):
                raise NotSummable(f"{len(coeffs)} wag dla {len(first.ops)} operatorów")
            series = ops.Scaled(coeffs[0], first.ops[0])
            for c, op in zip(coeffs[1:], first.ops[1:]):
                series = ops.SumOp(series, ops.Scaled(c, op))
            copies = len(coeffs)
        witnesses = []
        for entry in catalog.entries:
            shared = first.witness_for(entry.name)
            witnesses.append((entry.name, cv.l1_witness(weights, [shared] * copies, _witness_bound(shared))))
        verdict = _reverify([series], catalog, witnesses, horizon)
        norm = _operator_norm(series)
        return CombinedSet((series,), tuple(witnesses), verdict, norm)
    raise Unsupported(f"Nieznany tryb kombinacji: '{mode}'")


# --- Transfer dominacji ---

@dataclass(frozen=True)
class TransferResult:
    witnesses: Tuple[Tuple[str, Any], ...]
    quasi: Verdict
    quasi_c: Verdict
    sigma_levi: Verdict

    def to_json_dict(self):
        return {"quasi": self.quasi.to_json_dict(), "quasiC": self.quasi_c.to_json_dict(),
                "sigmaLevi": self.sigma_levi.to_json_dict()}


def domination_transfer(dominated: Sequence[Any], dominating: CollectiveSet, pairing: Mapping[int, int],
                        horizon: int = cv.DEFAULT_HORIZON, pair_search_limit: int = 64) -> TransferResult:
    """W_A = 2·W_C dla A zdominowanego przez C; quasi-c i sigma-Levi A raportowane osobno."""
    catalog = dominating.catalog
    undecided = []
    for i, s in enumerate(dominated):
        j = pairing.get(i)
        if j is None or not 0 <= j < len(dominating.ops):
            raise PairingIncomplete(f"Brak pary dla operatora nr {i}")
        positivity = ops.op_positivity(s, pair_search_limit)
        if isinstance(positivity, Refuted):
            raise PositivityMissing(f"Operator {ops.describe_operator(s)} nie jest dodatni")
        order = ops.op_order(s, dominating.ops[j], pair_search_limit)
        if isinstance(order, Refuted):
            raise PairingIncomplete(f"{ops.describe_operator(s)} <= {ops.describe_operator(dominating.ops[j])} "
                                    f"nie zachodzi")
        if isinstance(positivity, Inconclusive):
            undecided.append(f"0 <= {ops.describe_operator(s)}")
        if isinstance(order, Inconclusive):
            undecided.append(f"{ops.describe_operator(s)} <= {ops.describe_operator(dominating.ops[j])}")
    if undecided:
        logger.warning(f"Transfer dominacji: nierozstrzygnięte założenia: {', '.join(undecided)}")
        pending = Inconclusive(pair_search_limit, f"order precondition undecided: {'; '.join(undecided)}")
        return TransferResult((), pending, pending, pending)
    witnesses, verdicts = [], []
    codomain = dominated[0].codomain
    for entry in catalog.entries:
        witness = _doubled(dominating.cauchy_witness_for(entry.name))
        images = tuple(Image(op, entry.sequence) for op in dominated)
        family = FiniteFamily(images, tuple(element_zero(codomain) for _ in images))
        witnesses.append((entry.name, witness))
        verdicts.append(cv.check_collective_cauchy(family, witness, horizon))
    quasi = _aggregate(verdicts, catalog.names())
    report = classify_collective(FiniteSet(tuple(dominated)), catalog, horizon)
    logger.info(f"Transfer dominacji: quasi={quasi.status}, quasiC={report.quasi_c.status}, "
                f"sigmaLevi={report.sigma_levi.status}")
    return TransferResult(tuple(witnesses), quasi, report.quasi_c, report.sigma_levi)


# --- Scenariusze ---

@dataclass(frozen=True)
class ScenarioReport:
    scenario: str
    claim: str
    expected: str
    computed: str
    passed: bool
    certificate: Any = None
    micros: int = 0

    def to_json_dict(self):
        return {"scenario": self.scenario, "claim": self.claim, "verdict": self.computed,
                "expected": self.expected, "passed": self.passed,
                "certificate": jsonable(self.certificate), "micros": self.micros}


def _status(verdict: Verdict) -> Tuple[str, Any]:
    return verdict.status, getattr(verdict, "certificate", None)


def _claim(scenario: str, claim: str, expected: str, run: Callable[[], Tuple[str, Any]]) -> ScenarioReport:
    watch = Stopwatch()
    try:
        computed, certificate = run()
    except Exception as e:
        logger.error(f"Scenariusz '{scenario}', teza '{claim}': błąd {e}", exc_info=True)
        computed, certificate = f"error: {e}", None
    report = ScenarioReport(scenario, claim, expected, computed, computed == expected, certificate, watch.micros)
    logger.debug(f"[{scenario}] {claim}: {computed} (oczekiwano {expected})")
    return report


def _geometric_half():
    return geometric(1, Fraction(1, 2))


def _scenario_embedding(horizon: int) -> List[ScenarioReport]:
    name = "embedding_c_plus_l1"
    catalog = TestCatalog(SpaceTag.CL1, (
        CatalogEntry("phi_pair", DirectSumPair(PLFamily(1, 0, None, SpaceTag.C01), PLFamily(0, 0, None, SpaceTag.L1)),
                     Fraction(1)),))
    cache: Dict[str, PropertyVerdicts] = {}

    def verdicts() -> PropertyVerdicts:
        if "v" not in cache:
            cache["v"] = classify_levi(ops.Embed0Phi(), catalog, horizon)
        return cache["v"]

    def jump() -> Tuple[str, Any]:
        cert = verdicts().sigma_levi.certificate
        jumps = cert.detail if isinstance(cert, NoPreimageCertificate) else None
        if not isinstance(jumps, JumpList):
            return "no jump", cert
        return format_rational(jumps.jumps[0].location), jumps

    return [_claim(name, "quasiC", "verified", lambda: _status(verdicts().quasi_c)),
            _claim(name, "sigmaLevi", "refuted", lambda: _status(verdicts().sigma_levi)),
            _claim(name, "limit jumps at", "1/2", jump)]


def _scenario_identity(horizon: int) -> List[ScenarioReport]:
    name = "identity_c"
    catalog = TestCatalog(SpaceTag.C, (CatalogEntry("odd_prefix", PrefixSum(ODD), Fraction(1)),))
    witness = TailTruncation(constant(1), 2, 0)
    cache: Dict[str, PropertyVerdicts] = {}

    def verdicts() -> PropertyVerdicts:
        if "v" not in cache:
            cache["v"] = classify_levi(ops.Identity(SpaceTag.C), catalog, horizon)
        return cache["v"]

    def escape() -> Tuple[str, Any]:
        cert = verdicts().quasi_c.certificate
        return ("rechecked" if cv.recheck_certificate(cert) else "not rechecked"), cert

    return [_claim(name, "witness decreasing to 0", "verified", lambda: _status(cv.check_decreasing_null(witness))),
            _claim(name, "odd prefix sums are order Cauchy", "verified",
                   lambda: _status(cv.check_order_cauchy(PrefixSum(ODD), witness, horizon))),
            _claim(name, "quasi", "verified", lambda: _status(verdicts().quasi)),
            _claim(name, "quasiC", "refuted", lambda: _status(verdicts().quasi_c)),
            _claim(name, "limit escapes c", "rechecked", escape)]


def _scenario_diagonal(horizon: int) -> List[ScenarioReport]:
    name = "example1_c0"
    coeffs = _geometric_half()
    s = ops.Diagonal(coeffs, SpaceTag.C, SpaceTag.C0)
    catalog = TestCatalog(SpaceTag.C, (CatalogEntry("even_prefix", PrefixSum(EVEN), Fraction(1)),))
    cache: Dict[str, PropertyVerdicts] = {}

    def verdicts() -> PropertyVerdicts:
        if "v" not in cache:
            cache["v"] = classify_levi(s, catalog, horizon)
        return cache["v"]

    def norms() -> Tuple[str, Any]:
        values = [(i, ops.op_norm_dist(s, ops.Diagonal(seq_truncate(coeffs, i), SpaceTag.C, SpaceTag.C0)))
                  for i in range(1, 17)]
        ok = all(value == Fraction(1, 2 ** (i + 1)) for i, value in values)
        return ("2^-(i+1)" if ok else "mismatch"), values

    def truncations() -> Tuple[str, Any]:
        results = [classify_levi(ops.Diagonal(seq_truncate(coeffs, i), SpaceTag.C, SpaceTag.C0), catalog, horizon)
                   for i in range(1, 4)]
        statuses = sorted({r.sigma_levi.status for r in results})
        return ",".join(statuses), None

    # suma 4^-k e_2k: 2^-j na parzystych j
    quarter_sum = geometric(1, Fraction(1, 2), EVEN)
    images = Image(s, PrefixSum(EVEN))

    def order_limit() -> Tuple[str, Any]:
        limit, _ = cv.pointwise_limit(images)
        if limit != quarter_sum:
            return "mismatch", limit
        verdict = cv.check_order_convergence(images, limit, TailTruncation(limit, 2, 0, SpaceTag.C0), horizon)
        return verdict.status, limit

    def no_preimage() -> Tuple[str, Any]:
        result = ops.diagonal_preimage(s, quarter_sum, SpaceTag.C)
        return (result.reason if isinstance(result, NoPreimageCertificate) else "found"), result

    return [_claim(name, "order limit is sum 4^-k e_2k", "verified", order_limit),
            _claim(name, "no preimage in c", "membership", no_preimage),
            _claim(name, "quasiC", "verified", lambda: _status(verdicts().quasi_c)),
            _claim(name, "sigmaLevi", "refuted", lambda: _status(verdicts().sigma_levi)),
            _claim(name, "compact (assumed)", "True", lambda: (str(s.compact_assumption()), None)),
            _claim(name, "norm distance to truncations", "2^-(i+1)", norms),
            _claim(name, "truncations sigmaLevi", "verified", truncations)]


def _scenario_evaluations(horizon: int) -> List[ScenarioReport]:
    name = "Tk_not_collective"
    catalog = TestCatalog(SpaceTag.C0, (CatalogEntry("full_prefix", PrefixSum(ALL, space=SpaceTag.C0),
                                                     Fraction(1)),))
    family = CoordinateFamily(PrefixSum(ALL, space=SpaceTag.C0), constant(1))

    def envelope() -> Tuple[str, Any]:
        values = [(n, cv.family_envelope(family, n, "oscillation")) for n in range(1, horizon + 1)]
        ok = all(v == real(1) for _, v in values)
        return ("1" if ok else "not 1"), [(n, format_rational(v.value(1))) for n, v in values]

    return [_claim(name, "collective quasi", "refuted",
                   lambda: _status(classify_collective(EvalFunctionalFamily(SpaceTag.C0), catalog, horizon).quasi)),
            _claim(name, "oscillation envelope", "1", envelope),
            _claim(name, "single functional sigmaLevi", "verified",
                   lambda: _status(classify_levi(ops.EvalFunctional(3, SpaceTag.C0), catalog, horizon).sigma_levi))]


def _scenario_domination(horizon: int) -> List[ScenarioReport]:
    name = "domination_rank_one"
    s = ops.Diagonal(_geometric_half(), SpaceTag.C, SpaceTag.C)
    t = ops.FiniteRank(((ops.DualFunctionalC(_geometric_half()), constant(1)),), SpaceTag.C, SpaceTag.C)
    catalog = TestCatalog(SpaceTag.C, (CatalogEntry("even_prefix", PrefixSum(EVEN), Fraction(1)),))

    def rank_one() -> Tuple[str, Any]:
        limit, preimage = ops.finite_rank_levi_limit(t, PrefixSum(EVEN), 1)
        ok = limit == constant(Fraction(1, 3)) and preimage == constant(Fraction(1, 3))
        return ("1/3" if ok else "mismatch"), {"limit": limit, "preimage": preimage}

    def transfer() -> Tuple[str, Any]:
        result = domination_transfer([s], collective_set([t], catalog, horizon), {0: 0}, horizon)
        return result.quasi.status, result.to_json_dict()

    return [_claim(name, "0 <= S", "True", lambda: (str(ops.op_is_positive(s)), None)),
            _claim(name, "S <= T", "True", lambda: (str(ops.op_leq(s, t)), None)),
            _claim(name, "rank-one limit and preimage", "1/3", rank_one),
            _claim(name, "T sigmaLevi", "verified", lambda: _status(classify_levi(t, catalog, horizon).sigma_levi)),
            _claim(name, "quasi transfers to S", "verified", transfer),
            _claim(name, "S sigmaLevi", "refuted", lambda: _status(classify_levi(s, catalog, horizon).sigma_levi))]


def _scenario_collective(horizon: int) -> List[ScenarioReport]:
    name = "collective_remarks"
    scalar_witness = Scalar(_geometric_half())
    deltas = CoordinateFamily(BasisVectors(1, 0, Fraction(1), SpaceTag.LINF), zero())
    scaled = ScalarMultipleFamily(Scalar(_geometric_half()), real(0))
    sequence = ScaledBasisSum(Fraction(1), Fraction(1, 4), 2, 0)

    def singleton() -> Tuple[str, Any]:
        limit, _ = cv.pointwise_limit(sequence)
        witness = cv.canonical_witness(sequence)
        single = cv.check_order_convergence(sequence, limit, witness, horizon)
        collective = cv.check_collective(FiniteFamily((sequence,), (limit,)), None, witness, horizon)
        return ("same" if single.status == collective.status else "differ"), single.status

    odd_linf = PrefixSum(ODD, space=SpaceTag.LINF)
    return [_claim(name, "deltas collectively null", "refuted",
                   lambda: _status(cv.check_collective(deltas, None, scalar_witness, horizon))),
            _claim(name, "scalar multiples collectively null", "refuted",
                   lambda: _status(cv.check_collective(scaled, None, scalar_witness, horizon))),
            _claim(name, "singleton family", "same", singleton),
            _claim(name, "limit in l-infinity", "verified",
                   lambda: _status(cv.construct_limit(odd_linf, TailTruncation(constant(1), 2, -1, SpaceTag.LINF),
                                                      SpaceTag.LINF, horizon))),
            _claim(name, "limit in c", "refuted",
                   lambda: _status(cv.construct_limit(PrefixSum(ODD), TailTruncation(constant(1), 2, -1),
                                                      SpaceTag.C, horizon)))]


def _scenario_combinations(horizon: int) -> List[ScenarioReport]:
    name = "collective_combinations"
    t = ops.FiniteRank(((ops.DualFunctionalC(_geometric_half()), constant(1)),), SpaceTag.C, SpaceTag.C)
    catalog = TestCatalog(SpaceTag.C, (CatalogEntry("even_prefix", PrefixSum(EVEN), Fraction(1)),))
    cache: Dict[str, CollectiveSet] = {}

    def base() -> CollectiveSet:
        if "s" not in cache:
            cache["s"] = collective_set([t], catalog, horizon)
        return cache["s"]

    def affine() -> Tuple[str, Any]:
        half = Fraction(1, 2)
        combined = collective_combine(base(), base(), "affinePair", half, half, horizon=horizon)
        return combined.verdict.status, combined.verdict.to_json_dict()

    def series() -> Tuple[str, Any]:
        weights = cv.GeometricWeights(Fraction(1, 2), Fraction(1, 2))
        combined = collective_combine(base(), mode="l1Series", weights=weights, horizon=horizon)
        return combined.verdict.status, {"norm_bound": combined.norm_bound}

    return [_claim(name, "affinePair 1/2, 1/2 with p_n + q_n", "verified", affine),
            _claim(name, "l1Series geometric 1/2", "verified", series)]


SCENARIOS: Dict[str, Callable[[int], List[ScenarioReport]]] = {
    "embedding_c_plus_l1": _scenario_embedding,
    "identity_c": _scenario_identity,
    "example1_c0": _scenario_diagonal,
    "Tk_not_collective": _scenario_evaluations,
    "domination_rank_one": _scenario_domination,
    "collective_combinations": _scenario_combinations,
    "collective_remarks": _scenario_collective,
}


def run_scenario_suite(horizon: int = cv.DEFAULT_HORIZON, only: Optional[Sequence[str]] = None) -> List[ScenarioReport]:
    """Wszystkie scenariusze z ustalonymi oczekiwanymi werdyktami; porażki są wpisami raportu."""
    reports: List[ScenarioReport] = []
    for name, scenario in SCENARIOS.items():
        if only and name not in only:
            continue
        watch = Stopwatch()
        logger.info(f"--- Scenariusz: {name} ---")
        batch = scenario(horizon)
        reports.extend(batch)
        passed = sum(r.passed for r in batch)
        logger.info(f"--- Scenariusz {name}: {passed}/{len(batch)} tez zgodnych ({watch.elapsed:.2f} s) ---")
    return reports

# --- model_io.py ---
"""
Pliki modeli (JSON) i raporty.

Model to obiekt JSON z sekcjami `elements`, `sequences`, `witnesses`,
`operators`, `sets`, `catalogs`, `families`. Każdy rekord ma znacznik
`kind`; liczby wymierne zapisujemy jako "p/q" albo liczby całkowite.
Pola rekordów mogą odwoływać się po nazwie do obiektów zadeklarowanych
wcześniej (sekcje czytane są w powyższej kolejności). Parser jest ścisły:
nieznane pola i liczby zmiennoprzecinkowe to błędy.

Serializator zapisuje postać kanoniczną: wszystko rozwinięte (bez odwołań),
elementy w postaci normalnej, klucze posortowane, wcięcie 4.
"""

import json
import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

import operators as ops
import pl_functions as plf
import sequences as sq
from errors import IllFormedGrammar, LeviError, ModelError, ModelSyntaxError, UnknownName, UnknownSpace
from lattice_core import (ALL, ResidueMask, SeqElement, SpaceTag, constant, geometric, make_mask, make_term,
                          parse_space, real, seq_element, unit_vector)
from levi_lab import (CatalogEntry, EvalFunctionalFamily, FiniteSet, ScaledOperatorFamily, TestCatalog,
                      catalog_default)
from utils import format_rational, natural_sorted
from verdicts import jsonable

logger = logging.getLogger(__name__)

SECTIONS = ("elements", "sequences", "witnesses", "operators", "sets", "catalogs", "families")


class _FloatLiteral(str):
    """Liczba zmiennoprzecinkowa z JSON; odrzucana przy konwersji na liczbę wymierną."""


@dataclass
class ModelTable:
    """Tablica nazwanych obiektów modelu, po jednym słowniku na sekcję."""
    elements: Dict[str, Any] = field(default_factory=dict)
    sequences: Dict[str, Any] = field(default_factory=dict)
    witnesses: Dict[str, Any] = field(default_factory=dict)
    operators: Dict[str, Any] = field(default_factory=dict)
    sets: Dict[str, Any] = field(default_factory=dict)
    catalogs: Dict[str, Any] = field(default_factory=dict)
    families: Dict[str, Any] = field(default_factory=dict)

    def section(self, name: str) -> Dict[str, Any]:
        return getattr(self, name)

    def lookup(self, name: str, *sections: str) -> Any:
        for section in sections or SECTIONS:
            table = self.section(section)
            if name in table:
                return table[name]
        raise UnknownName(f"Nieznana nazwa '{name}' (sekcje: {', '.join(sections or SECTIONS)})")

    def names(self) -> Dict[str, List[str]]:
        return {s: natural_sorted(self.section(s)) for s in SECTIONS if self.section(s)}


# --- Odczyt wartości ---

class _Reader:
    """Kontekst parsowania: tablica (dla odwołań po nazwie) i bieżąca ścieżka w dokumencie."""

    def __init__(self, table: ModelTable):
        self.table = table
        self.path = ""

    def fail(self, exc_type, message: str):
        raise exc_type(message, path=self.path)

    def rat(self, value) -> Fraction:
        if isinstance(value, _FloatLiteral):
            self.fail(IllFormedGrammar, f"Liczba zmiennoprzecinkowa {value} niedozwolona, użyj zapisu \"p/q\"")
        if isinstance(value, bool) or not isinstance(value, (int, str)):
            self.fail(ModelSyntaxError, f"Oczekiwano liczby wymiernej, otrzymano {value!r}")
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            self.fail(ModelSyntaxError, f"Niepoprawna liczba wymierna '{value}'")

    def integer(self, value) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(ModelSyntaxError, f"Oczekiwano liczby całkowitej, otrzymano {value!r}")
        return value

    def boolean(self, value) -> bool:
        if not isinstance(value, bool):
            self.fail(ModelSyntaxError, f"Oczekiwano wartości logicznej, otrzymano {value!r}")
        return value

    def text(self, value) -> str:
        if not isinstance(value, str) or isinstance(value, _FloatLiteral):
            self.fail(ModelSyntaxError, f"Oczekiwano napisu, otrzymano {value!r}")
        return value

    def space(self, value) -> SpaceTag:
        try:
            return parse_space(self.text(value))
        except UnknownSpace as e:
            self.fail(UnknownSpace, e.message)

    def mask(self, value) -> ResidueMask:
        if not (isinstance(value, list) and len(value) == 2):
            self.fail(ModelSyntaxError, f"Maska to para [moduł, reszta], otrzymano {value!r}")
        return make_mask(self.integer(value[0]), self.integer(value[1]))

    def listing(self, value) -> list:
        if not isinstance(value, list):
            self.fail(ModelSyntaxError, f"Oczekiwano listy, otrzymano {value!r}")
        return value

    def record(self, value, kinds: Dict[str, "_Kind"], sections: Tuple[str, ...]):
        if isinstance(value, str) and not isinstance(value, _FloatLiteral):
            try:
                return self.table.lookup(value, *sections)
            except UnknownName as e:
                self.fail(UnknownName, e.message)
        if not isinstance(value, dict):
            self.fail(ModelSyntaxError, f"Oczekiwano rekordu albo nazwy, otrzymano {value!r}")
        kind = value.get("kind")
        if kind not in kinds:
            self.fail(ModelSyntaxError, f"Nieznany rodzaj '{kind}' (dozwolone: {', '.join(sorted(kinds))})")
        return kinds[kind].build(self, value)


class _Kind:
    """Rodzaj rekordu: klasa/fabryka i pola (nazwa w JSON, atrybut, kod typu)."""

    def __init__(self, factory: Callable, *fields_: Tuple[str, str, str], cls: Optional[type] = None):
        self.factory = factory
        self.fields = fields_
        self.cls = cls if cls is not None else (factory if isinstance(factory, type) else None)

    def build(self, reader: _Reader, record: Dict[str, Any]):
        allowed = {json_name for json_name, _, _ in self.fields}
        unknown = sorted(set(record) - allowed - {"kind"})
        if unknown:
            reader.fail(ModelSyntaxError, f"Nieznane pola rekordu '{record.get('kind')}': {', '.join(unknown)}")
        parent = reader.path
        args = {}
        for json_name, attr, code in self.fields:
            if json_name in record:
                reader.path = f"{parent}.{json_name}"
                args[attr] = READERS[code](reader, record[json_name])
        reader.path = parent
        try:
            return self.factory(**args)
        except TypeError as e:
            reader.fail(ModelSyntaxError, f"Niepełny rekord '{record.get('kind')}': {e}")

    def dump(self, kind: str, obj) -> Dict[str, Any]:
        out: Dict[str, Any] = {"kind": kind}
        for json_name, attr, code in self.fields:
            value = getattr(obj, attr)
            if value is not None:
                out[json_name] = WRITERS[code](value)
        return out


def _tail_term(r: _Reader, v):
    if not isinstance(v, dict):
        r.fail(ModelSyntaxError, f"Wyraz ogona to rekord {{coeff, ratio, mask}}, otrzymano {v!r}")
    unknown = sorted(set(v) - {"coeff", "ratio", "mask"})
    if unknown:
        r.fail(ModelSyntaxError, f"Nieznane pola wyrazu ogona: {', '.join(unknown)}")
    mask = r.mask(v["mask"]) if "mask" in v else ALL
    return make_term(r.rat(v.get("coeff", 0)), r.rat(v.get("ratio", 1)), mask)


def _overrides(r: _Reader, v):
    if not isinstance(v, dict):
        r.fail(ModelSyntaxError, f"Nadpisania to obiekt {{indeks: wartość}}, otrzymano {v!r}")
    out = {}
    for key, value in v.items():
        try:
            index = int(key)
        except ValueError:
            r.fail(ModelSyntaxError, f"Indeks nadpisania '{key}' nie jest liczbą całkowitą")
        out[index] = r.rat(value)
    return out


def _pair(r: _Reader, v):
    if not (isinstance(v, list) and len(v) == 2):
        r.fail(ModelSyntaxError, f"Oczekiwano pary [a, b], otrzymano {v!r}")
    return r.rat(v[0]), r.rat(v[1])


def _subrecord(r: _Reader, v, kind: _Kind, label: str):
    if not isinstance(v, dict):
        r.fail(ModelSyntaxError, f"{label} to rekord, otrzymano {v!r}")
    return kind.build(r, {"kind": label, **v})


def _typed_element(r: _Reader, v, cls, label: str):
    x = r.record(v, ELEMENT_KINDS, ("elements",))
    if not isinstance(x, cls):
        r.fail(IllFormedGrammar, f"Oczekiwano {label}, otrzymano {type(x).__name__}")
    return x


def _rank_term(r: _Reader, v):
    if not isinstance(v, dict):
        r.fail(ModelSyntaxError, f"Składnik rzędu to rekord {{functional, vector}}, otrzymano {v!r}")
    unknown = sorted(set(v) - {"functional", "vector"})
    if unknown:
        r.fail(ModelSyntaxError, f"Nieznane pola składnika rzędu: {', '.join(unknown)}")
    if "functional" not in v or "vector" not in v:
        r.fail(ModelSyntaxError, "Składnik rzędu wymaga pól 'functional' i 'vector'")
    return (_subrecord(r, v["functional"], FUNCTIONAL_KIND, "functional"),
            _typed_element(r, v["vector"], SeqElement, "elementu ciągowego"))


READERS: Dict[str, Callable[[_Reader, Any], Any]] = {
    "rat": lambda r, v: r.rat(v),
    "int": lambda r, v: r.integer(v),
    "bool": lambda r, v: r.boolean(v),
    "text": lambda r, v: r.text(v),
    "space": lambda r, v: r.space(v),
    "mask": lambda r, v: r.mask(v),
    "rats": lambda r, v: tuple(r.rat(x) for x in r.listing(v)),
    "pairs": lambda r, v: tuple(_pair(r, x) for x in r.listing(v)),
    "overrides": _overrides,
    "tail": lambda r, v: tuple(_tail_term(r, x) for x in r.listing(v)),
    "element": lambda r, v: r.record(v, ELEMENT_KINDS, ("elements",)),
    "elements": lambda r, v: tuple(r.record(x, ELEMENT_KINDS, ("elements",)) for x in r.listing(v)),
    "seq_element": lambda r, v: _typed_element(r, v, SeqElement, "elementu ciągowego"),
    "pl_element": lambda r, v: _typed_element(r, v, plf.PLFunction, "funkcji kawałkami liniowej"),
    "sequence": lambda r, v: r.record(v, SEQUENCE_KINDS, ("sequences", "witnesses")),
    "sequences": lambda r, v: tuple(r.record(x, SEQUENCE_KINDS, ("sequences", "witnesses")) for x in r.listing(v)),
    "operator": lambda r, v: r.record(v, OPERATOR_KINDS, ("operators",)),
    "operators": lambda r, v: tuple(r.record(x, OPERATOR_KINDS, ("operators",)) for x in r.listing(v)),
    "rank_terms": lambda r, v: tuple(_rank_term(r, x) for x in r.listing(v)),
    "entries": lambda r, v: tuple(_subrecord(r, x, ENTRY_KIND, "entry") for x in r.listing(v)),
}


# --- Zapis wartości ---

def dump_element(x) -> Dict[str, Any]:
    """Element w postaci kanonicznej ("seq" / "pl" / "pair")."""
    if isinstance(x, SeqElement):
        return {"kind": "seq",
                "overrides": {str(i): format_rational(v) for i, v in x.overrides},
                "tail": [{"coeff": format_rational(t.coeff), "ratio": format_rational(t.ratio),
                          "mask": [t.mask.modulus, t.mask.residue]} for t in x.tail],
                "start": x.start}
    if isinstance(x, plf.PLFunction):
        return {"kind": "pl", **x.to_json_dict()}
    if isinstance(x, plf.DirectSumElement):
        return {"kind": "pair", "cpart": dump_element(x.cpart), "lpart": dump_element(x.lpart)}
    raise IllFormedGrammar(f"Nie umiem zapisać elementu typu {type(x).__name__}")


def _dump_by_kind(kinds: Dict[str, "_Kind"], obj) -> Dict[str, Any]:
    for kind, record_kind in kinds.items():
        if record_kind.cls is not None and type(obj) is record_kind.cls:
            return record_kind.dump(kind, obj)
    raise IllFormedGrammar(f"Nie umiem zapisać obiektu typu {type(obj).__name__}")


def dump_sequence(s) -> Dict[str, Any]:
    return _dump_by_kind(SEQUENCE_KINDS, s)


def dump_operator(op) -> Dict[str, Any]:
    return _dump_by_kind(OPERATOR_KINDS, op)


WRITERS: Dict[str, Callable[[Any], Any]] = {
    "rat": format_rational,
    "int": int,
    "bool": bool,
    "text": str,
    "space": lambda t: t.value,
    "mask": lambda m: [m.modulus, m.residue],
    "rats": lambda xs: [format_rational(x) for x in xs],
    "pairs": lambda xs: [[format_rational(a), format_rational(b)] for a, b in xs],
    "element": dump_element,
    "elements": lambda xs: [dump_element(x) for x in xs],
    "seq_element": dump_element,
    "pl_element": dump_element,
    "sequence": dump_sequence,
    "sequences": lambda xs: [dump_sequence(x) for x in xs],
    "operator": dump_operator,
    "operators": lambda xs: [dump_operator(x) for x in xs],
    "rank_terms": lambda terms: [{"functional": {"weights": dump_element(f.weights), "lim_coeff": format_rational(f.lim_coeff)},
                                  "vector": dump_element(y)} for f, y in terms],
    "entries": lambda entries: [{"name": e.name, "sequence": dump_sequence(e.sequence),
                                 "bound": format_rational(e.bound)} for e in entries],
}


# --- Rodzaje rekordów ---

def _seq(overrides=None, tail=(), start=None):
    return seq_element(overrides, tail, start)


def _constant(value, mask=ALL):
    return constant(value, mask)


def _geometric(coeff, ratio, mask=ALL):
    return geometric(coeff, ratio, mask)


def _catalog_default(space, seed=None, random_entries=None):
    kwargs = {k: v for k, v in (("seed", seed), ("random_entries", random_entries)) if v is not None}
    return catalog_default(space, **kwargs)


ELEMENT_KINDS: Dict[str, _Kind] = {
    "seq": _Kind(_seq, ("overrides", "overrides", "overrides"), ("tail", "tail", "tail"), ("start", "start", "int")),
    "zero": _Kind(seq_element),
    "unit": _Kind(unit_vector, ("k", "k", "int"), ("coeff", "coeff", "rat")),
    "constant": _Kind(_constant, ("value", "value", "rat"), ("mask", "mask", "mask")),
    "geometric": _Kind(_geometric, ("coeff", "coeff", "rat"), ("ratio", "ratio", "rat"), ("mask", "mask", "mask")),
    "real": _Kind(real, ("value", "value", "rat")),
    "pl": _Kind(plf.pl_from_pieces, ("breakpoints", "breakpoints", "rats"), ("pieces", "pieces", "pairs"),
                ("values", "values", "rats")),
    "pl_vertices": _Kind(plf.pl_from_vertices, ("points", "points", "pairs")),
    "pl_constant": _Kind(plf.pl_constant, ("value", "c", "rat")),
    "pl_indicator": _Kind(plf.pl_indicator, ("lo", "lo", "rat"), ("hi", "hi", "rat"),
                          ("include_lo", "include_lo", "bool"), ("include_hi", "include_hi", "bool")),
    "phi": _Kind(plf.phi, ("n", "n", "int")),
    "phi_limit": _Kind(plf.phi_limit),
    "half_indicator": _Kind(plf.half_indicator),
    "pair": _Kind(plf.DirectSumElement, ("cpart", "cpart", "pl_element"), ("lpart", "lpart", "pl_element")),
}

SEQUENCE_KINDS: Dict[str, _Kind] = {
    "constant": _Kind(sq.Constant, ("element", "element", "element"), ("space", "space", "space")),
    "prefix_sum": _Kind(sq.PrefixSum, ("mask", "mask", "mask"), ("pattern", "pattern", "seq_element"),
                        ("space", "space", "space")),
    "scaled_basis_sum": _Kind(sq.ScaledBasisSum, ("coeff", "coeff", "rat"), ("ratio", "ratio", "rat"),
                              ("slope", "slope", "int"), ("offset", "offset", "int"), ("space", "space", "space")),
    "basis_vectors": _Kind(sq.BasisVectors, ("slope", "slope", "int"), ("offset", "offset", "int"),
                           ("coeff", "coeff", "rat"), ("space", "space", "space")),
    "tail_truncation": _Kind(sq.TailTruncation, ("base", "base", "seq_element"), ("slope", "slope", "int"),
                             ("offset", "offset", "int"), ("space", "space", "space")),
    "pl_family": _Kind(sq.PLFamily, ("alpha", "alpha", "rat"), ("beta", "beta", "rat"),
                       ("base", "base", "pl_element"), ("space", "space", "space")),
    "direct_sum": _Kind(sq.DirectSumPair, ("first", "first", "sequence"), ("second", "second", "sequence")),
    "affine": _Kind(sq.AffineCombo, ("alpha", "alpha", "rat"), ("first", "first", "sequence"),
                    ("beta", "beta", "rat"), ("second", "second", "sequence")),
    "modulated": _Kind(sq.Modulated, ("weights", "weights", "seq_element"), ("element", "element", "seq_element"),
                       ("space", "space", "space")),
    "scalar": _Kind(sq.Scalar, ("values", "values", "seq_element")),
    "lattice": _Kind(sq.LatticeCombo, ("op", "kind", "text"), ("first", "first", "sequence"),
                     ("second", "second", "sequence")),
    "modulus": _Kind(sq.Modulus, ("base", "base", "sequence")),
    "image": _Kind(sq.Image, ("operator", "op", "operator"), ("base", "base", "sequence")),
}

OPERATOR_KINDS: Dict[str, _Kind] = {
    "diagonal": _Kind(ops.Diagonal, ("coeffs", "coeffs", "seq_element"), ("domain", "domain", "space"),
                      ("codomain", "codomain", "space")),
    "finite_rank": _Kind(ops.FiniteRank, ("terms", "terms", "rank_terms"), ("domain", "domain", "space"),
                         ("codomain", "codomain", "space")),
    "embed0phi": _Kind(ops.Embed0Phi),
    "direct_sum_matrix": _Kind(ops.DirectSumMatrix, ("a", "a", "rat"), ("b", "b", "rat"), ("c", "c", "rat")),
    "identity": _Kind(ops.Identity, ("space", "space", "space")),
    "eval_functional": _Kind(ops.EvalFunctional, ("k", "k", "int"), ("domain", "domain", "space")),
    "scaled": _Kind(ops.Scaled, ("factor", "factor", "rat"), ("operator", "op", "operator")),
    "sum": _Kind(ops.SumOp, ("first", "first", "operator"), ("second", "second", "operator")),
}

SET_KINDS: Dict[str, _Kind] = {
    "finite": _Kind(FiniteSet, ("operators", "ops", "operators")),
    "eval_functionals": _Kind(EvalFunctionalFamily, ("domain", "domain", "space")),
    "scaled_multiples": _Kind(ScaledOperatorFamily, ("operator", "op", "operator")),
}

CATALOG_KINDS: Dict[str, _Kind] = {
    "explicit": _Kind(TestCatalog, ("space", "space", "space"), ("entries", "entries", "entries"),
                      ("seed", "seed", "int")),
    "default": _Kind(_catalog_default, ("space", "space", "space"), ("seed", "seed", "int"),
                     ("random_entries", "random_entries", "int")),
}

FAMILY_KINDS: Dict[str, _Kind] = {
    "finite": _Kind(sq.FiniteFamily, ("members", "members", "sequences"), ("limits", "limits", "elements")),
    "coordinate": _Kind(sq.CoordinateFamily, ("base", "base", "sequence"), ("limit", "limit", "seq_element")),
    "scalar_multiple": _Kind(sq.ScalarMultipleFamily, ("base", "base", "sequence"), ("limit", "limit", "element")),
}

FUNCTIONAL_KIND = _Kind(ops.DualFunctionalC, ("weights", "weights", "seq_element"),
                        ("lim_coeff", "lim_coeff", "rat"))
ENTRY_KIND = _Kind(CatalogEntry, ("name", "name", "text"), ("sequence", "sequence", "sequence"),
                   ("bound", "bound", "rat"))

SECTION_KINDS: Dict[str, Dict[str, _Kind]] = {
    "elements": ELEMENT_KINDS,
    "sequences": SEQUENCE_KINDS,
    "witnesses": SEQUENCE_KINDS,
    "operators": OPERATOR_KINDS,
    "sets": SET_KINDS,
    "catalogs": CATALOG_KINDS,
    "families": FAMILY_KINDS,
}


# --- Parsowanie ---

def _no_duplicates(pairs: List[Tuple[str, Any]]) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for key, value in pairs:
        if key in out:
            raise ModelSyntaxError(f"Powtórzony klucz '{key}'")
        out[key] = value
    return out


def _locate(text: str, path: str) -> Tuple[Optional[int], Optional[int]]:
    """(linia, kolumna) klucza rekordu wskazanego ścieżką "sekcja.nazwa[.pole...]"."""
    parts = [p for p in path.split(".") if p]
    offset = 0
    found = None
    for part in parts:
        idx = text.find(f'"{part}"', offset)
        if idx < 0:
            break
        found = offset = idx
    if found is None:
        return None, None
    line = text.count("\n", 0, found) + 1
    column = found - (text.rfind("\n", 0, found) + 1) + 1
    return line, column


def _positioned(e: Exception, text: str, path: str) -> ModelError:
    if isinstance(e, ModelError):
        where = e.path or path
        line, column = (e.line, e.column) if e.line is not None else _locate(text, where)
        return type(e)(e.message, line, column, where)
    line, column = _locate(text, path)
    return IllFormedGrammar(f"{type(e).__name__}: {e}", line, column, path)


def parse_model(text: str) -> ModelTable:
    """Tablica nazwanych obiektów albo pierwszy błąd (ModelError z linią i kolumną)."""
    try:
        document = json.loads(text, parse_float=_FloatLiteral, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as e:
        raise ModelSyntaxError(e.msg, e.lineno, e.colno) from e
    except ModelSyntaxError as e:
        raise _positioned(e, text, "") from e
    if not isinstance(document, dict):
        raise ModelSyntaxError("Model musi być obiektem JSON z sekcjami", 1, 1)
    unknown = sorted(set(document) - set(SECTIONS))
    if unknown:
        line, column = _locate(text, unknown[0])
        raise ModelSyntaxError(f"Nieznane sekcje: {', '.join(unknown)}", line, column, unknown[0])
    table = ModelTable()
    reader = _Reader(table)
    for section in SECTIONS:
        records = document.get(section, {})
        if not isinstance(records, dict):
            line, column = _locate(text, section)
            raise ModelSyntaxError(f"Sekcja '{section}' musi być obiektem {{nazwa: rekord}}", line, column, section)
        for name, record in records.items():
            reader.path = f"{section}.{name}"
            try:
                table.section(section)[name] = reader.record(record, SECTION_KINDS[section], (section,))
            except (ModelError, LeviError) as e:
                raise _positioned(e, text, reader.path) from e
    counts = ", ".join(f"{s}: {len(table.section(s))}" for s in SECTIONS if table.section(s))
    logger.debug(f"Model wczytany ({counts or 'pusty'})")
    return table


def _dump_record(section: str, obj) -> Dict[str, Any]:
    if section == "elements":
        return dump_element(obj)
    if section == "catalogs":
        return CATALOG_KINDS["explicit"].dump("explicit", obj)
    return _dump_by_kind(SECTION_KINDS[section], obj)


def serialize_model(table: ModelTable) -> str:
    """Postać kanoniczna: parse_model(serialize_model(t)) == t."""
    document = {section: {name: _dump_record(section, obj) for name, obj in table.section(section).items()}
                for section in SECTIONS if table.section(section)}
    return json.dumps(document, indent=4, ensure_ascii=False, sort_keys=True) + "\n"


def load_model(filepath: str) -> ModelTable:
    """Wczytuje plik modelu; brak pliku -> FileNotFoundError, błędy treści -> ModelError z położeniem."""
    if not os.path.exists(filepath):
        raise FileNotFoundError(f"Plik modelu '{filepath}' nie istnieje")
    with open(filepath, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        table = parse_model(text)
    except ModelError as e:
        raise type(e)(e.message, e.line, e.column, f"{filepath}:{e.path}" if e.path else filepath) from e
    logger.info(f"✓ Wczytano model '{filepath}' ({sum(len(v) for v in table.names().values())} obiektów)")
    return table


def save_model(table: ModelTable, filepath: str) -> bool:
    try:
        with open(filepath, "w", encoding="utf-8") as f:
            f.write(serialize_model(table))
        logger.info(f"✓ Model zapisany w '{filepath}'")
        return True
    except (OSError, IllFormedGrammar) as e:
        logger.error(f"Błąd zapisu modelu do '{filepath}': {e}", exc_info=True)
        return False


# --- Raporty ---

def verdict_record(scenario: str, claim: str, verdict, micros: int = 0, expected: Optional[str] = None) -> Dict[str, Any]:
    """Rekord raportu ze stałymi nazwami pól."""
    record = {"scenario": scenario, "claim": claim, "verdict": verdict.status,
              "certificate": jsonable(getattr(verdict, "certificate", None)), "micros": micros,
              "detail": verdict.to_json_dict()}
    if expected is not None:
        record["expected"] = expected
        record["passed"] = verdict.status == expected
    return record


def format_structured(records: Iterable[Dict[str, Any]]) -> str:
    """Jeden obiekt JSON na linię, liczby wymierne jako "p/q"."""
    return "".join(json.dumps(jsonable(r), ensure_ascii=False, sort_keys=True) + "\n" for r in records)


def format_text(records: Iterable[Dict[str, Any]]) -> str:
    lines = []
    for r in records:
        mark = ""
        if "passed" in r:
            mark = "✓ " if r["passed"] else "✗ "
        line = f"{mark}[{r['scenario']}] {r['claim']}: {r['verdict']}"
        if "expected" in r and not r.get("passed", True):
            line += f" (oczekiwano {r['expected']})"
        if r.get("certificate") is not None:
            line += f"\n    certyfikat: {json.dumps(jsonable(r['certificate']), ensure_ascii=False, sort_keys=True)}"
        lines.append(line)
    return "\n".join(lines) + ("\n" if lines else "")


def save_report(records: List[Dict[str, Any]], filepath: str) -> bool:
    """Zapisuje rekordy raportu (format strukturalny) do pliku."""
    try:
        with open(filepath, "w", encoding="utf-8") as f:
            f.write(format_structured(records))
        logger.info(f"✓ Raport ({len(records)} rekordów) zapisany w '{filepath}'")
        return True
    except OSError as e:
        logger.error(f"Błąd zapisu raportu do '{filepath}': {e}", exc_info=True)
        return False

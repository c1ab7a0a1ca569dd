# --- tests/test_model_io.py ---
import json
from fractions import Fraction

import pytest

from errors import IllFormedGrammar, ModelSyntaxError, UnknownName, UnknownSpace
from lattice_core import ODD, SpaceTag, constant, geometric, unit_vector
import levi_lab as lab
import model_io
import operators as ops
import pl_functions as plf
import sequences as sq
from verdicts import Refuted, Verified, NotDecreasingAt

MODEL = """{
    "elements": {
        "half": {"kind": "geometric", "coeff": 1, "ratio": "1/2"},
        "one": {"kind": "constant", "value": 1},
        "spike": {"kind": "pl_indicator", "lo": "1/2", "hi": "1/2", "include_lo": true, "include_hi": true}
    },
    "sequences": {
        "odd": {"kind": "prefix_sum", "mask": [2, 1]},
        "weighted": {"kind": "prefix_sum", "pattern": "half", "space": "linf"},
        "phi_pair": {"kind": "direct_sum",
                     "first": {"kind": "pl_family", "alpha": 1, "space": "C01"},
                     "second": {"kind": "pl_family", "space": "L1"}}
    },
    "witnesses": {
        "tail": {"kind": "tail_truncation", "base": "one", "slope": 2}
    },
    "operators": {
        "D": {"kind": "diagonal", "coeffs": "half"},
        "T": {"kind": "finite_rank", "terms": [{"functional": {"weights": "half"}, "vector": "one"}]},
        "half_T": {"kind": "scaled", "factor": "1/2", "operator": "T"}
    },
    "sets": {
        "pair": {"kind": "finite", "operators": ["D", "T"]},
        "evals": {"kind": "eval_functionals", "domain": "C0"}
    },
    "catalogs": {
        "default_c": {"kind": "default", "space": "C", "random_entries": 2},
        "odd_only": {"kind": "explicit", "space": "C",
                     "entries": [{"name": "odd_prefix", "sequence": "odd", "bound": 1}]}
    },
    "families": {
        "single": {"kind": "finite", "members": ["odd"], "limits": [{"kind": "constant", "value": 1, "mask": [2, 1]}]}
    }
}
"""


def test_parse_model_builds_named_objects():
    table = model_io.parse_model(MODEL)
    assert table.elements["half"] == geometric(1, Fraction(1, 2))
    assert table.elements["spike"] == plf.pl_indicator(Fraction(1, 2), Fraction(1, 2))
    assert table.sequences["odd"] == sq.PrefixSum(ODD)
    assert table.sequences["weighted"].space is SpaceTag.LINF
    assert table.witnesses["tail"] == sq.TailTruncation(constant(1), 2, 0)
    assert table.operators["T"] == ops.FiniteRank(((ops.DualFunctionalC(geometric(1, Fraction(1, 2))), constant(1)),))
    assert table.operators["half_T"].op is table.operators["T"]
    assert table.sets["pair"] == lab.FiniteSet((table.operators["D"], table.operators["T"]))
    assert table.catalogs["default_c"].names()[-1] == "random_2"
    assert table.families["single"].limits == (constant(1, ODD),)


def test_lookup_and_natural_names():
    table = model_io.parse_model('{"elements": {"x10": {"kind": "zero"}, "x2": {"kind": "unit", "k": 3}}}')
    assert table.names() == {"elements": ["x2", "x10"]}
    assert table.lookup("x2") == unit_vector(3)
    with pytest.raises(UnknownName):
        table.lookup("x3")


def test_ratio_outside_unit_interval_reports_position():
    text = '{\n    "elements": {\n        "g": {"kind": "geometric", "coeff": 1, "ratio": "3/2"}\n    }\n}\n'
    with pytest.raises(IllFormedGrammar) as info:
        model_io.parse_model(text)
    assert info.value.line == 3
    assert info.value.path == "elements.g"


def test_float_literals_are_rejected():
    text = '{"elements": {"h": {"kind": "constant", "value": 0.5}}}'
    with pytest.raises(IllFormedGrammar) as info:
        model_io.parse_model(text)
    assert info.value.line == 1
    assert "p/q" in info.value.message


@pytest.mark.parametrize("text, error", [
    ('{"elements": {"u": {"kind": "unit", "k": 1, "scale": 2}}}', ModelSyntaxError),
    ('{"elements": {"u": {"kind": "spline"}}}', ModelSyntaxError),
    ('{"sequences": {"s": {"kind": "prefix_sum", "space": "H1"}}}', UnknownSpace),
    ('{"sequences": {"s": {"kind": "prefix_sum", "pattern": "nope"}}}', UnknownName),
    ('{"elements": {"u": {"kind": "zero"}, "u": {"kind": "zero"}}}', ModelSyntaxError),
    ('{"elements": {"u": ', ModelSyntaxError),
    ('{"bogus": {}}', ModelSyntaxError),
    ('[1, 2]', ModelSyntaxError),
    ('{"elements": []}', ModelSyntaxError),
    ('{"elements": {"m": {"kind": "constant", "value": 1, "mask": [2, 2]}}}', IllFormedGrammar),
    ('{"elements": {"u": {"kind": "unit", "k": "1"}}}', ModelSyntaxError),
])
def test_malformed_models(text, error):
    with pytest.raises(error):
        model_io.parse_model(text)


def test_references_must_point_backwards():
    text = '{"elements": {"a": "b", "b": {"kind": "zero"}}}'
    with pytest.raises(UnknownName):
        model_io.parse_model(text)
    with pytest.raises(UnknownName):
        model_io.parse_model('{"sequences": {"s": {"kind": "image", "operator": "T", "base": {"kind": "prefix_sum"}}}}')


def test_serialization_round_trip():
    table = model_io.parse_model(MODEL)
    text = model_io.serialize_model(table)
    again = model_io.parse_model(text)
    assert again == table
    assert model_io.serialize_model(again) == text
    assert json.loads(text)["catalogs"]["default_c"]["kind"] == "explicit"


def test_dump_element_is_canonical():
    data = model_io.dump_element(geometric(1, Fraction(1, 2), ODD))
    assert data == {"kind": "seq", "overrides": {}, "start": 1,
                    "tail": [{"coeff": "1", "ratio": "1/2", "mask": [2, 1]}]}
    with pytest.raises(IllFormedGrammar):
        model_io.dump_element("x")


def test_load_and_save_model(tmp_path):
    with pytest.raises(FileNotFoundError):
        model_io.load_model(str(tmp_path / "missing.json"))
    path = tmp_path / "model.json"
    path.write_text(MODEL, encoding="utf-8")
    table = model_io.load_model(str(path))
    out = tmp_path / "canonical.json"
    assert model_io.save_model(table, str(out)) is True
    assert out.read_text(encoding="utf-8") == model_io.serialize_model(table)
    assert model_io.save_model(table, str(tmp_path)) is False


def test_load_model_prefixes_error_path(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"elements": {"h": {"kind": "constant", "value": 0.5}}}', encoding="utf-8")
    with pytest.raises(IllFormedGrammar) as info:
        model_io.load_model(str(path))
    assert info.value.path.startswith(str(path))


# --- Raporty ---

def test_verdict_record_fields():
    record = model_io.verdict_record("s", "c", Verified(method="m"), 12, expected="verified")
    assert record["verdict"] == "verified" and record["passed"] is True
    assert record["certificate"] is None and record["micros"] == 12
    refuted = model_io.verdict_record("s", "c", Refuted(NotDecreasingAt(1, 2, Fraction(1, 3), 1)))
    assert refuted["certificate"]["value_n"] == "1/3"
    assert "passed" not in refuted


def test_structured_and_text_formats(tmp_path):
    records = [model_io.verdict_record("s", "c", Verified(method="m"), expected="refuted"),
               {"scenario": "t", "claim": "d", "verdict": "verified", "certificate": None, "bound": Fraction(3, 4)}]
    lines = model_io.format_structured(records).splitlines()
    assert len(lines) == 2
    assert json.loads(lines[1])["bound"] == "3/4"
    text = model_io.format_text(records)
    assert "✗ [s] c: verified (oczekiwano refuted)" in text
    assert "[t] d: verified" in text
    assert model_io.format_text([]) == ""
    path = tmp_path / "report.jsonl"
    assert model_io.save_report(records, str(path)) is True
    assert len(path.read_text(encoding="utf-8").splitlines()) == 2

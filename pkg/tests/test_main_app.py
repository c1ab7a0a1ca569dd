# --- tests/test_main_app.py ---
import json

import pytest

import main_app
from main_app import EXIT_INCONCLUSIVE, EXIT_INPUT_ERROR, EXIT_OK, EXIT_REFUTED, exit_code_for, main, parse_expectations

MODEL = {
    "elements": {
        "one": {"kind": "constant", "value": 1},
        "odd_ones": {"kind": "constant", "value": 1, "mask": [2, 1]},
    },
    "sequences": {
        "odd": {"kind": "prefix_sum", "mask": [2, 1], "space": "LINF"},
        "odd_c": {"kind": "prefix_sum", "mask": [2, 1]},
        "full": {"kind": "prefix_sum"},
    },
    "witnesses": {
        "w_odd": {"kind": "tail_truncation", "base": "one", "slope": 2, "offset": -1, "space": "LINF"},
        "w_bad": {"kind": "tail_truncation", "base": "one", "slope": 1, "offset": 1},
    },
    "operators": {
        "I": {"kind": "identity", "space": "C"},
    },
    "catalogs": {
        "odd_only": {"kind": "explicit", "space": "C",
                     "entries": [{"name": "odd_prefix", "sequence": "odd_c", "bound": 1}]},
    },
}


@pytest.fixture
def cli(tmp_path, monkeypatch):
    for name in ("LEVI_HORIZON", "LEVI_CATALOG_SEED", "LOG_LEVEL"):
        monkeypatch.setenv(name, "")
    model = tmp_path / "model.json"
    model.write_text(json.dumps(MODEL, indent=4), encoding="utf-8")
    common = ["--env-file", str(tmp_path / "missing.env"), "--config-file", str(tmp_path / "missing.ini")]

    def run(*args):
        return main(common + [a.replace("MODEL", str(model)) for a in args])

    run.tmp_path = tmp_path
    run.monkeypatch = monkeypatch
    return run


def test_convergence_verified(cli, capsys):
    assert cli("check-convergence", "MODEL", "odd", "odd_ones", "w_odd") == EXIT_OK
    assert "[check-convergence] converges: verified" in capsys.readouterr().out


def test_expectation_mismatch_exits_with_refuted_code(cli):
    assert cli("check-convergence", "MODEL", "odd", "odd_ones", "w_odd", "--expect", "refuted") == EXIT_REFUTED


def test_refutation_without_expectation_is_success(cli, capsys):
    assert cli("check-convergence", "MODEL", "full", "one", "w_bad") == EXIT_OK
    assert "converges: refuted" in capsys.readouterr().out
    assert cli("check-convergence", "MODEL", "full", "one", "w_bad", "--expect", "verified") == EXIT_REFUTED


def test_structured_output_is_json_lines(cli, capsys):
    assert cli("--format", "structured", "check-convergence", "MODEL", "full", "one", "w_bad") == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    record = json.loads(lines[0])
    assert record["verdict"] == "refuted"
    assert record["certificate"]["kind"] == "failed_domination"


def test_format_and_horizon_after_command_name(cli, capsys):
    assert cli("check-cauchy", "MODEL", "odd", "w_odd", "--format", "structured", "--horizon", "16") == EXIT_OK
    record = json.loads(capsys.readouterr().out.splitlines()[0])
    assert record["verdict"] == "verified"
    assert cli("check-cauchy", "MODEL", "odd", "w_odd", "--horizon", "0") == EXIT_INPUT_ERROR


def test_global_format_survives_command_parser():
    args = main_app.build_parser().parse_args(["--format", "structured", "check-cauchy", "m", "s", "w"])
    assert args.format == "structured"
    assert args.horizon is None


def test_classify_identity_with_expectations(cli, capsys):
    assert cli("classify", "MODEL", "I", "--catalog", "odd_only", "--expect", "quasi=verified",
               "--expect", "quasiC=refuted") == EXIT_OK
    out = capsys.readouterr().out
    assert "✓ [I] quasi: verified" in out
    assert cli("classify", "MODEL", "I", "--catalog", "odd_only", "--expect", "quasiC=verified") == EXIT_REFUTED


def test_classify_rejects_unknown_property(cli):
    assert cli("classify", "MODEL", "I", "--catalog", "odd_only", "--expect", "kb=verified") == EXIT_INPUT_ERROR


@pytest.mark.parametrize("args", [
    ("check-convergence", "MISSING", "odd", "odd_ones", "w_odd"),
    ("check-convergence", "MODEL", "nope", "odd_ones", "w_odd"),
    ("check-cauchy", "MODEL", "odd", "odd_ones"),
    ("--horizon", "0", "check-cauchy", "MODEL", "odd", "w_odd"),
    ("no-such-command",),
])
def test_input_errors(cli, args):
    args = tuple(str(cli.tmp_path / "missing.json") if a == "MISSING" else a for a in args)
    assert cli(*args) == EXIT_INPUT_ERROR


def test_malformed_model_is_input_error(cli):
    bad = cli.tmp_path / "bad.json"
    bad.write_text('{"elements": {"x": {"kind": "constant", "value": 0.5}}}', encoding="utf-8")
    assert cli("check-cauchy", str(bad), "odd", "w_odd") == EXIT_INPUT_ERROR


def test_bad_horizon_in_environment_is_input_error(cli):
    cli.monkeypatch.setenv("LEVI_HORIZON", "abc")
    assert cli("check-cauchy", "MODEL", "odd", "w_odd") == EXIT_INPUT_ERROR


def test_help_exits_cleanly(cli, capsys):
    assert cli("--help") == EXIT_OK
    assert "scenarios" in capsys.readouterr().out


def test_scenarios_subset_and_report(cli, capsys):
    report = cli.tmp_path / "report.jsonl"
    assert cli("scenarios", "--only", "identity_c", "--report", str(report)) == EXIT_OK
    out = capsys.readouterr().out
    assert out.count("✓ [identity_c]") == len(report.read_text(encoding="utf-8").splitlines())
    assert all(json.loads(line)["passed"] for line in report.read_text(encoding="utf-8").splitlines())


def test_cauchy_check_verified(cli, capsys):
    assert cli("check-cauchy", "MODEL", "odd", "w_odd", "--expect", "verified") == EXIT_OK
    assert "✓ [check-cauchy] cauchy: verified" in capsys.readouterr().out


# --- Funkcje pomocnicze ---

def test_parse_expectations():
    assert parse_expectations(None, "claim") == {}
    assert parse_expectations(["verified"], "claim") == {"claim": "verified"}
    assert parse_expectations(["quasiC=refuted, quasi=Verified"], "sigmaLevi") == {"quasiC": "refuted",
                                                                                    "quasi": "verified"}


@pytest.mark.parametrize("records, code", [
    ([], EXIT_OK),
    ([{"verdict": "refuted"}], EXIT_OK),
    ([{"verdict": "inconclusive"}], EXIT_INCONCLUSIVE),
    ([{"verdict": "verified", "expected": "verified", "passed": True}], EXIT_OK),
    ([{"verdict": "verified", "expected": "refuted", "passed": False}], EXIT_REFUTED),
    ([{"verdict": "inconclusive", "expected": "verified", "passed": False}], EXIT_INCONCLUSIVE),
    ([{"verdict": "inconclusive"}, {"verdict": "refuted", "expected": "verified", "passed": False}], EXIT_REFUTED),
    ([{"verdict": "refuted", "expected": "verified", "passed": False}, {"verdict": "inconclusive"}], EXIT_REFUTED),
    ([{"verdict": "inconclusive", "expected": "inconclusive", "passed": True}], EXIT_OK),
])
def test_exit_code_for(records, code):
    assert exit_code_for(records) == code


def test_pairing_parser():
    assert main_app._parse_pairing(None, 2) == {0: 0, 1: 1}
    assert main_app._parse_pairing("0:1,1:0", 2) == {0: 1, 1: 0}

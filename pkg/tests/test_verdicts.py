# --- tests/test_verdicts.py ---
from fractions import Fraction

from verdicts import (FailedDominationAt, Inconclusive, Jump, JumpList, MembershipRefutation, Refuted, Verified,
                      conjunction, is_refuted, is_verified, jsonable)

HALF = Fraction(1, 2)


def test_jsonable_writes_rationals_as_strings():
    assert jsonable({"a": HALF, "b": [Fraction(3), True, None], 1: (2, "x")}) == {
        "a": "1/2", "b": ["3", True, None], "1": [2, "x"]}


def test_certificate_records_carry_their_kind():
    cert = FailedDominationAt(3, 2, Fraction(5, 4), HALF)
    data = cert.to_json_dict()
    assert data["kind"] == "failed_domination"
    assert (data["n"], data["lhs"], data["rhs"]) == (3, "5/4", "1/2")
    jumps = JumpList((Jump(HALF, Fraction(1), Fraction(0), Fraction(0)),)).to_json_dict()
    assert jumps["jumps"][0]["location"] == "1/2"
    assert MembershipRefutation("C", "oscillation", ((2, 1, Fraction(1)),)).to_json_dict()["classes"] == [
        [2, 1, "1"]]


def test_verdict_serialization():
    assert Verified(method="closed form").to_json_dict()["status"] == "verified"
    refuted = Refuted(FailedDominationAt(1, 1, Fraction(1), Fraction(0)), note="n")
    assert refuted.to_json_dict()["note"] == "n"
    assert Inconclusive(64, "scan").to_json_dict() == {"status": "inconclusive", "horizon": 64, "reason": "scan"}


def test_conjunction_prefers_refutation():
    v, r, i = Verified(method="a"), Refuted("x"), Inconclusive(8)
    assert conjunction([v, i, r]) is r
    assert conjunction([v, i]) is i
    assert conjunction([v]) is v
    assert conjunction([v, Verified(method="b")]).method == "conjunction"
    assert conjunction([]).method == "empty"
    assert is_verified(v) and is_refuted(r) and not is_verified(i)

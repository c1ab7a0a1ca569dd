# --- tests/test_utils.py ---
import logging
from fractions import Fraction

import pytest

from utils import Stopwatch, format_rational, natural_sorted, setup_logging


@pytest.mark.parametrize("value, text", [(Fraction(3, 4), "3/4"), (Fraction(-6, 3), "-2"), (0, "0"), (5, "5")])
def test_format_rational(value, text):
    assert format_rational(value) == text


def test_natural_sorted():
    assert natural_sorted(["s10", "s2", "s1"]) == ["s1", "s2", "s10"]
    assert natural_sorted([("b", 2), ("a10", 1), ("a9", 3)], key=lambda p: p[0]) == [("a9", 3), ("a10", 1), ("b", 2)]


def test_setup_logging_replaces_handlers(tmp_path):
    log_file = tmp_path / "run.log"
    setup_logging("debug", log_to_file=True, log_file=str(log_file))
    setup_logging("warning", log_to_file=True, log_file=str(log_file))
    root = logging.getLogger()
    assert root.level == logging.WARNING
    assert len(root.handlers) == 2
    setup_logging("nonsense")
    assert root.level == logging.INFO and len(root.handlers) == 1


def test_stopwatch_is_monotone():
    watch = Stopwatch()
    first = watch.micros
    assert watch.micros >= first >= 0

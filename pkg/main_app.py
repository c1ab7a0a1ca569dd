#!/usr/bin/env python3
# --- main_app.py ---

import argparse
import logging
import sys
import time
from typing import Any, Dict, List, Optional, Sequence

import config_loader
import convergence as cv
import levi_lab
import model_io
from errors import LeviError, ModelError, UnknownName
from lattice_core import to_rat
from utils import Stopwatch, setup_logging

logger = logging.getLogger(__name__)

DEFAULT_ENV_FILE_PATH = ".env"

EXIT_OK = 0
EXIT_REFUTED = 2
EXIT_INCONCLUSIVE = 3
EXIT_INPUT_ERROR = 4

PROPERTIES = ("sigmaLevi", "quasiC", "quasi")


def parse_expectations(values: Optional[Sequence[str]], default_claim: str) -> Dict[str, str]:
    """['verified'] -> {default_claim: 'verified'}; ['quasiC=refuted'] -> {'quasiC': 'refuted'}."""
    out: Dict[str, str] = {}
    for value in values or ():
        for part in value.split(","):
            part = part.strip()
            if not part:
                continue
            claim, _, status = part.rpartition("=")
            out[claim.strip() or default_claim] = status.strip().lower()
    return out


def exit_code_for(records: List[Dict[str, Any]]) -> int:
    """0 gdy wszystko zgodne z oczekiwaniami; 2 sprzeczność z oczekiwaniem; 3 wynik nierozstrzygnięty.

    Sprzeczność ma pierwszeństwo przed nierozstrzygnięciem.
    """
    mismatch = any(not r.get("passed", True) and r["verdict"] != "inconclusive" for r in records)
    if mismatch:
        return EXIT_REFUTED
    if any(r["verdict"] == "inconclusive" and not ("expected" in r and r.get("passed")) for r in records):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _parse_rationals(text: str) -> List[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


def _parse_pairing(text: Optional[str], size: int) -> Dict[int, int]:
    if not text:
        return {i: i for i in range(size)}
    pairing = {}
    for part in text.split(","):
        left, _, right = part.partition(":")
        try:
            pairing[int(left)] = int(right)
        except ValueError as e:
            raise ModelError(f"Niepoprawne parowanie '{part}' (oczekiwano i:j)") from e
    return pairing


class Application:
    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config: Dict[str, Any] = {}
        self.table: Optional[model_io.ModelTable] = None
        logger.debug("Application zainicjalizowana z argumentami: %s", args)

    def setup(self) -> bool:
        logger.debug("--- Konfiguracja Aplikacji ---")
        try:
            self.config = config_loader.get_env_config(env_file_path=self.args.env_file,
                                                       config_ini_path=self.args.config_file)
        except ValueError as e:
            logger.critical(f"Krytyczny błąd konfiguracji: {e}")
            return False
        except Exception as e:
            logger.critical(f"Nieoczekiwany błąd ładowania konfiguracji: {e}", exc_info=True)
            return False

        level = getattr(logging, str(self.config.get("log_level", "INFO")).upper(), None)
        if isinstance(level, int) and level != logging.getLogger().getEffectiveLevel():
            logging.getLogger().setLevel(level)
            for handler in logging.getLogger().handlers:
                handler.setLevel(level)
        if self.args.horizon is not None:
            if self.args.horizon < 1:
                logger.critical(f"--horizon musi być dodatni (otrzymano {self.args.horizon})")
                return False
            self.config["horizon"] = self.args.horizon
        if self.args.format is not None:
            self.config["default_format"] = self.args.format
        return True

    @property
    def horizon(self) -> int:
        return self.config.get("horizon", cv.DEFAULT_HORIZON)

    def run(self) -> int:
        app_start_time = time.time()
        logger.info(f"=== Uruchamianie polecenia '{self.args.command}' ===")
        if not self.setup():
            return EXIT_INPUT_ERROR
        try:
            records = self._dispatch()
        except ModelError as e:
            logger.error(f"Błąd modelu: {e}")
            return EXIT_INPUT_ERROR
        except FileNotFoundError as e:
            logger.error(f"Brak pliku: {e}")
            return EXIT_INPUT_ERROR
        except LeviError as e:
            logger.error(f"Błąd danych wejściowych ({type(e).__name__}): {e}")
            return EXIT_INPUT_ERROR
        except Exception as e:
            logger.critical(f"Nieoczekiwany błąd podczas wykonywania polecenia: {e}", exc_info=True)
            return EXIT_INPUT_ERROR
        self._emit(records)
        code = exit_code_for(records)
        logger.info(f"=== Zakończono (kod wyjścia {code}). Całkowity czas: {time.time() - app_start_time:.2f} sek. ===")
        return code

    # --- Polecenia ---

    def _dispatch(self) -> List[Dict[str, Any]]:
        command = self.args.command
        if command == "scenarios":
            return self._scenarios()
        self.table = model_io.load_model(self.args.model)
        handlers = {
            "check-convergence": self._check_convergence,
            "check-cauchy": self._check_cauchy,
            "check-collective": self._check_collective,
            "classify": self._classify,
            "classify-set": self._classify_set,
            "combine": self._combine,
            "dominate": self._dominate,
        }
        logger.info(f"--- Polecenie {command} ---")
        watch = Stopwatch()
        records = handlers[command]()
        logger.info(f"--- Zakończono {command} (czas: {watch.elapsed:.2f} sek.) ---")
        return records

    def _lookup(self, name: str, *sections: str):
        return self.table.lookup(name, *sections)

    def _single(self, claim: str, run) -> List[Dict[str, Any]]:
        expected = parse_expectations(self.args.expect, claim)
        watch = Stopwatch()
        verdict = run()
        return [model_io.verdict_record(self.args.command, claim, verdict, watch.micros, expected.get(claim))]

    def _check_convergence(self):
        sequence = self._lookup(self.args.sequence, "sequences", "witnesses")
        limit = self._lookup(self.args.limit, "elements")
        witness = self._lookup(self.args.witness, "witnesses", "sequences")
        return self._single("converges", lambda: cv.check_order_convergence(sequence, limit, witness, self.horizon))

    def _check_cauchy(self):
        sequence = self._lookup(self.args.sequence, "sequences", "witnesses")
        witness = self._lookup(self.args.witness, "witnesses", "sequences")
        return self._single("cauchy", lambda: cv.check_order_cauchy(sequence, witness, self.horizon))

    def _check_collective(self):
        family = self._lookup(self.args.family, "families")
        witness = self._lookup(self.args.witness, "witnesses", "sequences")
        if self.args.cauchy:
            return self._single("collective cauchy",
                                lambda: cv.check_collective_cauchy(family, witness, self.horizon))
        return self._single("collective", lambda: cv.check_collective(family, None, witness, self.horizon))

    def _catalog(self, space):
        if self.args.catalog:
            return self._lookup(self.args.catalog, "catalogs")
        return levi_lab.catalog_default(space, self.config.get("catalog_seed", levi_lab.DEFAULT_SEED),
                                        self.config.get("random_catalog_entries", levi_lab.RANDOM_ENTRIES))

    def _property_records(self, label: str, verdicts: levi_lab.PropertyVerdicts, micros: int):
        expected = parse_expectations(self.args.expect, "sigmaLevi")
        unknown = sorted(set(expected) - set(PROPERTIES))
        if unknown:
            raise ModelError(f"Nieznane właściwości w --expect: {', '.join(unknown)}")
        values = {"sigmaLevi": verdicts.sigma_levi, "quasiC": verdicts.quasi_c, "quasi": verdicts.quasi}
        records = [model_io.verdict_record(label, prop, values[prop], micros, expected.get(prop))
                   for prop in PROPERTIES]
        if self.args.evidence:
            for e in verdicts.evidence:
                for prop, verdict in (("sigmaLevi", e.sigma_levi), ("quasiC", e.quasi_c), ("quasi", e.quasi)):
                    records.append(model_io.verdict_record(label, f"{prop}[{e.entry}]", verdict))
        return records

    def _classify(self):
        op = self._lookup(self.args.operator, "operators")
        catalog = self._catalog(op.domain)
        watch = Stopwatch()
        verdicts = levi_lab.classify_levi(op, catalog, self.horizon)
        return self._property_records(self.args.operator, verdicts, watch.micros)

    def _classify_set(self):
        op_set = self._lookup(self.args.set, "sets")
        catalog = self._catalog(op_set.domain)
        watch = Stopwatch()
        verdicts = levi_lab.classify_collective(op_set, catalog, self.horizon)
        return self._property_records(self.args.set, verdicts, watch.micros)

    def _finite_set(self, name: str):
        op_set = self._lookup(name, "sets")
        if not isinstance(op_set, levi_lab.FiniteSet):
            raise UnknownName(f"Zbiór '{name}' musi być skończony (rodzaj 'finite')")
        return op_set

    def _combine(self):
        first_set = self._finite_set(self.args.first)
        catalog = self._catalog(first_set.domain)
        first = levi_lab.collective_set(first_set.ops, catalog, self.horizon)
        second = None
        if self.args.second:
            second = levi_lab.collective_set(self._finite_set(self.args.second).ops, catalog, self.horizon)
        weights = None
        if self.args.geometric:
            head, ratio = _parse_rationals(self.args.geometric)
            weights = cv.GeometricWeights(to_rat(head), to_rat(ratio))
        elif self.args.weights:
            weights = _parse_rationals(self.args.weights)
        watch = Stopwatch()
        combined = levi_lab.collective_combine(first, second, self.args.mode, self.args.alpha, self.args.beta,
                                               weights, self.horizon)
        expected = parse_expectations(self.args.expect, "combined")
        record = model_io.verdict_record("combine", "combined", combined.verdict, watch.micros,
                                         expected.get("combined"))
        record["operators"] = combined.to_json_dict()["operators"]
        record["norm_bound"] = combined.to_json_dict()["norm_bound"]
        return [record]

    def _dominate(self):
        dominated = self._finite_set(self.args.dominated)
        dominating_set = self._finite_set(self.args.dominating)
        catalog = self._catalog(dominating_set.domain)
        dominating = levi_lab.collective_set(dominating_set.ops, catalog, self.horizon)
        pairing = _parse_pairing(self.args.pairing, len(dominated.ops))
        watch = Stopwatch()
        result = levi_lab.domination_transfer(dominated.ops, dominating, pairing, self.horizon,
                                              self.config.get("pair_search_limit", 64))
        expected = parse_expectations(self.args.expect, "quasi")
        micros = watch.micros
        return [model_io.verdict_record("dominate", "quasi", result.quasi, micros, expected.get("quasi")),
                model_io.verdict_record("dominate", "quasiC", result.quasi_c, micros, expected.get("quasiC")),
                model_io.verdict_record("dominate", "sigmaLevi", result.sigma_levi, micros, expected.get("sigmaLevi"))]

    def _scenarios(self):
        reports = levi_lab.run_scenario_suite(self.horizon, self.args.only)
        records = [r.to_json_dict() for r in reports]
        report_path = self.args.report or self.config.get("report_file")
        if report_path:
            model_io.save_report(records, report_path)
        passed = sum(r.passed for r in reports)
        logger.info(f"Scenariusze: {passed}/{len(reports)} tez zgodnych z oczekiwaniami")
        return records

    def _emit(self, records: List[Dict[str, Any]]) -> None:
        if self.config.get("default_format") == "structured":
            sys.stdout.write(model_io.format_structured(records))
        else:
            sys.stdout.write(model_io.format_text(records))
        sys.stdout.flush()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Weryfikator zbieżności w porządku i klas operatorów sigma-Levi (dokładna arytmetyka wymierna).",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    parser.add_argument("--config-file", default=config_loader.DEFAULT_CONFIG_FILE, help="Ścieżka do pliku config.ini.")
    parser.add_argument("--env-file", default=DEFAULT_ENV_FILE_PATH, help="Ścieżka do pliku .env.")
    parser.add_argument("--horizon", type=int, default=None,
                        help=f"Horyzont sprawdzania (nadpisuje config.ini i {config_loader.HORIZON_ENV_VAR}).")
    parser.add_argument("--format", choices=config_loader.REPORT_FORMATS, default=None,
                        help="Format raportu na stdout (nadpisuje config.ini).")

    # --horizon i --format także po nazwie polecenia; SUPPRESS nie nadpisuje wartości globalnych
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--horizon", type=int, default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    common.add_argument("--format", choices=config_loader.REPORT_FORMATS, default=argparse.SUPPRESS,
                        help=argparse.SUPPRESS)

    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help_text, parents=[common])

    def with_expect(p: argparse.ArgumentParser) -> argparse.ArgumentParser:
        p.add_argument("--expect", action="append", default=None,
                       help="Oczekiwany werdykt: 'verified' albo 'właściwość=status' (można powtarzać).")
        return p

    p = with_expect(command("check-convergence", "|S(n) - L| <= W(n) i W ↓ 0."))
    p.add_argument("model")
    p.add_argument("sequence")
    p.add_argument("limit")
    p.add_argument("witness")

    p = with_expect(command("check-cauchy", "Warunek Cauchy'ego w porządku ze świadkiem W."))
    p.add_argument("model")
    p.add_argument("sequence")
    p.add_argument("witness")

    p = with_expect(command("check-collective", "Jeden świadek dla całej rodziny ciągów."))
    p.add_argument("model")
    p.add_argument("family")
    p.add_argument("witness")
    p.add_argument("--cauchy", action="store_true", help="Sprawdź kolektywny warunek Cauchy'ego.")

    for name, target, help_text in (("classify", "operator", "Klasyfikacja operatora na katalogu."),
                                     ("classify-set", "set", "Klasyfikacja zbioru operatorów.")):
        p = with_expect(command(name, help_text))
        p.add_argument("model")
        p.add_argument(target)
        p.add_argument("--catalog", default=None, help="Nazwa katalogu z modelu (domyślnie katalog standardowy).")
        p.add_argument("--evidence", action="store_true", help="Dołącz werdykty dla każdej pozycji katalogu.")

    p = with_expect(command("combine", "Kombinacja zbiorów kolektywnie sigma-Levi."))
    p.add_argument("model")
    p.add_argument("first")
    p.add_argument("second", nargs="?", default=None)
    p.add_argument("--mode", choices=("affinePair", "l1Series"), default="affinePair")
    p.add_argument("--alpha", default="1")
    p.add_argument("--beta", default="1")
    p.add_argument("--weights", default=None, help="Wagi l1Series, np. '1/2,1/4'.")
    p.add_argument("--geometric", default=None, help="Wagi geometryczne 'pierwsza,iloraz', np. '1/2,1/2'.")
    p.add_argument("--catalog", default=None)

    p = with_expect(command("dominate", "Przeniesienie świadka przez dominację S <= T."))
    p.add_argument("model")
    p.add_argument("dominated")
    p.add_argument("dominating")
    p.add_argument("--pairing", default=None, help="Parowanie 'i:j,...' (domyślnie i:i).")
    p.add_argument("--catalog", default=None)

    p = command("scenarios", "Zestaw scenariuszy regresyjnych.")
    p.add_argument("--report", default=None, help="Zapisz rekordy (JSON na linię) do pliku.")
    p.add_argument("--only", action="append", default=None, choices=sorted(levi_lab.SCENARIOS),
                   help="Uruchom tylko wskazane scenariusze.")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    temp_config = config_loader.load_config(config_loader.DEFAULT_CONFIG_FILE)
    setup_logging(level_str=temp_config.get("log_level", "INFO"),
                  log_to_file=temp_config.get("log_to_file", False),
                  log_file=temp_config.get("log_file_name", "levi_verifier.log"))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT_ERROR
    return Application(args).run()


if __name__ == "__main__":
    sys.exit(main())

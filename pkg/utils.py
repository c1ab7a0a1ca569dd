# --- utils.py ---

import sys
import time
import logging
from fractions import Fraction
from typing import Any, Callable, Iterable, List, Optional, TypeVar

# Spróbuj zaimportować colorlog; jeśli nie ma, ustaw flagę i użyj standardowego formattera
try:
    from colorlog import ColoredFormatter

    COLORLOG_AVAILABLE = True
except ImportError:
    COLORLOG_AVAILABLE = False

try:
    import natsort

    NATSORT_AVAILABLE = True
except ImportError:
    NATSORT_AVAILABLE = False

T = TypeVar("T")


# Konfiguracja logowania
def setup_logging(level_str: str = "INFO", log_to_file: bool = False,
                  log_file: str = "levi_verifier.log") -> None:
    """
    Konfiguruje logowanie do konsoli (z kolorami, jeśli colorlog jest dostępny)
    i opcjonalnie do pliku.
    Konsola to stderr - stdout jest zarezerwowany dla raportów (format structured).
    """
    numeric_level = getattr(logging, str(level_str).upper(), None)
    if not isinstance(numeric_level, int):
        # Użyj print, bo logger może jeszcze nie być w pełni skonfigurowany
        print(f"OSTRZEŻENIE: Nieprawidłowy poziom logowania: {level_str}. Używam INFO.", file=sys.stderr)
        numeric_level = logging.INFO

    log_format_str = "%(asctime)s - %(levelname)-8s - [%(name)s:%(lineno)d] - %(message)s"
    log_datefmt_str = "%Y-%m-%d %H:%M:%S"

    root_logger = logging.getLogger()
    # Usuń istniejące handlery, aby uniknąć duplikowania logów przy wielokrotnym wywołaniu
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
        handler.close()

    root_logger.setLevel(numeric_level)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(numeric_level)

    if COLORLOG_AVAILABLE:
        console_formatter = ColoredFormatter(
            fmt="%(log_color)s" + log_format_str,
            datefmt=log_datefmt_str,
            reset=True,
            log_colors={
                'DEBUG': 'cyan',
                'INFO': 'green',
                'WARNING': 'yellow',
                'ERROR': 'red',
                'CRITICAL': 'red,bg_white',
            },
            secondary_log_colors={},
            style='%'
        )
    else:
        console_formatter = logging.Formatter(log_format_str, datefmt=log_datefmt_str)

    console_handler.setFormatter(console_formatter)
    root_logger.addHandler(console_handler)

    file_logging_configured_successfully = False
    if log_to_file:
        try:
            file_handler = logging.FileHandler(log_file, mode='a', encoding='utf-8')
            file_handler.setLevel(numeric_level)
            file_handler.setFormatter(logging.Formatter(log_format_str, datefmt=log_datefmt_str))
            root_logger.addHandler(file_handler)
            file_logging_configured_successfully = True
        except Exception as e:
            print(f"KRYTYCZNY BŁĄD: Nie udało się skonfigurować logowania do pliku '{log_file}': {e}", file=sys.stderr)

    if COLORLOG_AVAILABLE:
        logging.getLogger("colorlog").setLevel(logging.WARNING)

    final_status_parts = [f"Logowanie skonfigurowane (Poziom: {level_str}"]
    final_status_parts.append(f"Kolory konsoli: {'Tak' if COLORLOG_AVAILABLE else 'Nie'}")
    if log_to_file:
        final_status_parts.append(
            f"Plik: {'Tak' if file_logging_configured_successfully else f'NIE ({log_file} - błąd)'}")
    else:
        final_status_parts.append("Plik: Nie")
    logging.getLogger(__name__).debug(", ".join(final_status_parts) + ").")


logger_utils = logging.getLogger(__name__)


def format_rational(value: Any) -> str:
    """Zapis liczby wymiernej jako "p/q" (albo "p" dla całkowitych)."""
    q = Fraction(value)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def natural_sorted(items: Iterable[T], key: Optional[Callable[[T], Any]] = None) -> List[T]:
    """
    Sortuje nazwy "naturalnie" (S2 przed S10), jeśli natsort jest dostępny.
    W przeciwnym razie zwykłe sortowanie leksykograficzne.
    """
    items = list(items)
    if NATSORT_AVAILABLE:
        try:
            return natsort.natsorted(items, key=key)
        except Exception as e:
            logger_utils.warning(f"Błąd natsort ({e}). Używam standardowego sortowania.")
    return sorted(items, key=key) if key else sorted(items, key=str)


class Stopwatch:
    """Mierzy czas fazy; `elapsed` w sekundach, `micros` w mikrosekundach."""

    def __init__(self) -> None:
        self._start = time.perf_counter()

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self._start

    @property
    def micros(self) -> int:
        return int(self.elapsed * 1_000_000)

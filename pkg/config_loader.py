# --- config_loader.py ---
import configparser
import logging
import os
from typing import Any, Dict, Optional

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_FILE = "config.ini"
HORIZON_ENV_VAR = "LEVI_HORIZON"
SEED_ENV_VAR = "LEVI_CATALOG_SEED"

REPORT_FORMATS = ("text", "structured")


def _strip_quotes(value: str) -> str:
    value = value.strip()
    if (value.startswith('"') and value.endswith('"')) or (value.startswith("'") and value.endswith("'")):
        return value[1:-1]
    return value


def _get_typed_value(config_parser: configparser.ConfigParser, section: str, option: str,
                     expected_type: type, default_value: Optional[Any] = None) -> Any:
    """
    Pobiera wartość z konfiguracji i konwertuje ją na oczekiwany typ.
    Brak opcji albo pusta wartość tekstowa -> default_value; błędna wartość -> default_value z wpisem w logu.
    """
    try:
        if expected_type == bool:
            return config_parser.getboolean(section, option)
        if expected_type == int:
            return config_parser.getint(section, option)
        raw = config_parser.get(section, option)
        if raw is None:
            return default_value
        value = _strip_quotes(raw)
        if not value and isinstance(default_value, str) and default_value:
            logger.debug(f"Opcja '{option}' w sekcji '{section}' jest pusta. Używam wartości domyślnej: '{default_value}'")
            return default_value
        return value
    except (configparser.NoSectionError, configparser.NoOptionError):
        return default_value
    except ValueError as e:
        logger.error(f"Błąd konwersji wartości {section}/{option} na typ {expected_type.__name__}: {e}. "
                     f"Używam wartości domyślnej: {default_value}")
        return default_value


def load_config(config_path: str = DEFAULT_CONFIG_FILE) -> Dict[str, Any]:
    config_parser = configparser.ConfigParser(allow_no_value=True, inline_comment_prefixes=('#', ';'))
    parsed_config: Dict[str, Any] = {}

    if not os.path.exists(config_path):
        logger.warning(f"Plik konfiguracyjny '{config_path}' nie został znaleziony. Użyte zostaną wartości domyślne z kodu.")
    else:
        try:
            if config_parser.read(config_path, encoding='utf-8'):
                logger.info(f"Pomyślnie wczytano plik konfiguracyjny: {config_path}")
            else:
                logger.warning(f"Plik konfiguracyjny '{config_path}' jest pusty lub nieczytelny. Użyte zostaną wartości domyślne.")
        except configparser.Error as e:
            logger.error(f"Błąd parsowania pliku konfiguracyjnego '{config_path}': {e}. Użyte zostaną wartości domyślne.")

    config_map = {
        "log_level": ("DEFAULT", "log_level", str, "INFO"),
        "log_to_file": ("DEFAULT", "log_to_file", bool, False),
        "log_file_name": ("DEFAULT", "log_file_name", str, "levi_verifier.log"),
        "horizon": ("Verification", "horizon", int, 128),
        "catalog_seed": ("Verification", "catalog_seed", int, 20240917),
        "random_catalog_entries": ("Verification", "random_catalog_entries", int, 10),
        "recheck_samples": ("Verification", "recheck_samples", int, 256),
        "pair_search_limit": ("Verification", "pair_search_limit", int, 64),
        "default_format": ("Report", "default_format", str, "text"),
        "report_file": ("Report", "report_file", str, ""),
    }

    for key_name, (section_ini, option_ini, exp_type, default_val_code) in config_map.items():
        parsed_config[key_name] = _get_typed_value(config_parser, section_ini, option_ini, exp_type, default_val_code)

    for key_name in ("horizon", "random_catalog_entries", "recheck_samples", "pair_search_limit"):
        if parsed_config[key_name] < 1 and key_name != "random_catalog_entries":
            default = config_map[key_name][3]
            logger.error(f"Wartość '{key_name}' = {parsed_config[key_name]} musi być dodatnia. Używam {default}.")
            parsed_config[key_name] = default
    if parsed_config["random_catalog_entries"] < 0:
        logger.error("Wartość 'random_catalog_entries' nie może być ujemna. Używam 10.")
        parsed_config["random_catalog_entries"] = 10
    if parsed_config["default_format"] not in REPORT_FORMATS:
        logger.error(f"Nieznany format raportu '{parsed_config['default_format']}'. Używam 'text'.")
        parsed_config["default_format"] = "text"

    logger.debug("Konfiguracja po wczytaniu z .ini (przed .env): %s", parsed_config)
    return parsed_config


def _positive_int(env_var_name: str, raw: str) -> int:
    try:
        value = int(raw.strip())
    except ValueError:
        value = 0
    if value < 1:
        msg = f"Zmienna środowiskowa {env_var_name} musi być dodatnią liczbą całkowitą (otrzymano '{raw}')"
        logger.critical(msg)
        raise ValueError(msg)
    return value


def get_env_config(env_file_path: str = ".env", config_ini_path: str = DEFAULT_CONFIG_FILE) -> Dict[str, Any]:
    """config.ini, potem .env / zmienne środowiskowe (LEVI_HORIZON, LEVI_CATALOG_SEED, LOG_LEVEL)."""
    app_config = load_config(config_ini_path)

    if os.path.exists(env_file_path):
        load_dotenv(dotenv_path=env_file_path, override=True)
        logger.info(f"Pomyślnie załadowano zmienne środowiskowe z pliku: {env_file_path}")
    else:
        logger.debug(f"Plik .env ('{env_file_path}') nie został znaleziony. Używam zmiennych systemowych i config.ini.")

    horizon_env = os.getenv(HORIZON_ENV_VAR)
    if horizon_env is not None and horizon_env.strip():
        horizon = _positive_int(HORIZON_ENV_VAR, horizon_env)
        if horizon != app_config["horizon"]:
            logger.info(f"Nadpisano 'horizon' wartością ze zmiennej {HORIZON_ENV_VAR}: {horizon} "
                        f"(poprzednio {app_config['horizon']}).")
        app_config["horizon"] = horizon

    seed_env = os.getenv(SEED_ENV_VAR)
    if seed_env is not None and seed_env.strip():
        try:
            app_config["catalog_seed"] = int(seed_env.strip())
            logger.info(f"Nadpisano 'catalog_seed' wartością ze zmiennej {SEED_ENV_VAR}: {app_config['catalog_seed']}.")
        except ValueError:
            logger.error(f"Zmienna {SEED_ENV_VAR}='{seed_env}' nie jest liczbą całkowitą. Pozostawiono wartość z .ini.")

    level_env = os.getenv("LOG_LEVEL")
    if level_env is not None and level_env.strip():
        app_config["log_level"] = level_env.strip().upper()

    return app_config

"""
Settings, config files and logging.

Environment defaults come from `.env` through python-dotenv; `--config` files
are YAML or dotenv-style `key = value` lines.
"""
import hashlib
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict

import yaml
from dotenv import dotenv_values, load_dotenv

from exceptions import ConfigError

__version__ = "1.0.0"
CONFIG_SCHEMA_VERSION = 1

# Load environment variables from .env
load_dotenv()

SETTINGS: Dict[str, Any] = {
    "SEED": int(os.getenv("SYNC_SIM_SEED", "42")),
    "OUT_DIR": os.getenv("SYNC_SIM_OUT_DIR", "results"),
    "FORMAT": os.getenv("SYNC_SIM_FORMAT", "both"),
    "JOBS": int(os.getenv("SYNC_SIM_JOBS", "1")),
    "LOG_LEVEL": os.getenv("SYNC_SIM_LOG_LEVEL", "INFO").upper(),
    "LOG_FILE": os.getenv("SYNC_SIM_LOG_FILE", ""),
}

_LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logger(name: str, level: str = None) -> logging.Logger:
    """
    Setup logging configuration for a component.

    Handlers go to stderr (and to SYNC_SIM_LOG_FILE when set); they are
    attached only once per logger name.

    Args:
        name (str): Logger name, usually the component class name.
        level (str, optional): Level name. Defaults to SYNC_SIM_LOG_LEVEL.

    Returns:
        logging.Logger: The configured logger.
    """
    logger = logging.getLogger(name)
    logger.setLevel(level or SETTINGS["LOG_LEVEL"])
    if getattr(logger, "_sync_sim_configured", False):
        return logger

    formatter = logging.Formatter(_LOG_FORMAT)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(formatter)
    logger.addHandler(handler)
    if SETTINGS["LOG_FILE"]:
        file_handler = logging.FileHandler(SETTINGS["LOG_FILE"])
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)
    logger.propagate = False
    logger._sync_sim_configured = True
    return logger


def load_config_file(path: str) -> Dict[str, str]:
    """
    Read a config file into a flat mapping of normalised key -> raw string.

    Plain-text files hold `key = value` lines; `.yaml`/`.yml` files hold a flat
    mapping. Keys may use `-` or `_`; they are returned with `_`.

    Raises:
        ConfigError: If the file cannot be parsed or is not a flat mapping.
        OSError: If the file cannot be read.
    """
    config_path = Path(path)
    if not config_path.is_file():
        raise FileNotFoundError(f"Config file not found: {path}")

    if config_path.suffix.lower() in (".yaml", ".yml"):
        with open(config_path, "r", encoding="utf-8") as f:
            try:
                raw = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise ConfigError(f"Invalid YAML in {path}: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError(f"Config file {path} must contain a mapping")
        items = {}
        for key, value in raw.items():
            if isinstance(value, (list, tuple)):
                value = ",".join(str(v) for v in value)
            items[str(key)] = None if value is None else str(value)
    else:
        items = dotenv_values(config_path)

    parsed = {}
    for key, value in items.items():
        if value is None:
            raise ConfigError(f"Config key '{key}' in {path} has no value")
        parsed[key.strip().replace("-", "_")] = value.strip()
    return parsed


def config_hash(effective: Dict[str, Any]) -> str:
    """SHA-256 of the canonical JSON form of an effective configuration."""
    canonical = json.dumps(effective, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

"""Pipeline configuration: flat INI sections, fail-closed key validation,
environment overrides via SECTION__KEY."""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

# section -> key -> parser
_SCHEMA: dict[str, dict[str, type]] = {
    "ingest": {
        "overlap_ratio": float,
        "gap_factor": float,
        "top_band": float,
        "bottom_band": float,
        "max_edit_distance": int,
        "lexicon_path": str,
    },
    "corpus": {
        "train_ratio": float,
        "validation_ratio": float,
        "test_ratio": float,
    },
    "qa": {
        "max_seq_len": int,
        "stride": int,
        "max_answer_tokens": int,
        "n_best": int,
    },
    "metrics": {
        "embedder": str,  # "test" or a bundle directory
        "idf_weighting": bool,
    },
    "genbench": {
        "endpoint": str,
        "max_new_tokens": int,
        "temperature": float,
        "seed": int,
        "retry_max": int,
        "timeout_s": float,
        "in_flight": int,
    },
    "paths": {
        "ontology_path": str,
        "model_bundle_dir": str,
        "embedder_bundle_dir": str,
        "work_dir": str,
    },
    "global": {
        "seed": int,
    },
}

_PATH_KEYS = {
    ("ingest", "lexicon_path"),
    ("paths", "ontology_path"),
    ("paths", "model_bundle_dir"),
    ("paths", "embedder_bundle_dir"),
    ("paths", "work_dir"),
}


def _parse_value(section: str, key: str, raw: str):
    kind = _SCHEMA[section][key]
    try:
        if kind is bool:
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return kind(raw)
    except ValueError:
        raise ConfigError(
            f"bad value for {section}.{key}", value=raw, expected=kind.__name__
        ) from None


@dataclass
class PipelineConfig:
    values: dict[str, dict[str, object]] = field(default_factory=dict)

    def get(self, section: str, key: str, default=None):
        return self.values.get(section, {}).get(key, default)

    def set(self, section: str, key: str, raw: str) -> None:
        if section not in _SCHEMA or key not in _SCHEMA[section]:
            raise ConfigError(f"unknown config key {section}.{key}")
        self.values.setdefault(section, {})[key] = _parse_value(section, key, raw)

    def validate_paths(self) -> None:
        for section, key in _PATH_KEYS:
            value = self.get(section, key)
            if value is not None and not Path(str(value)).exists():
                raise ConfigError(
                    f"configured path does not exist: {section}.{key}", path=str(value)
                )


def load_config(path: str | Path | None, environ: dict[str, str] | None = None) -> PipelineConfig:
    """Read the INI file (if any), then apply SECTION__KEY env overrides."""
    config = PipelineConfig()
    if path is not None:
        parser = configparser.ConfigParser()
        read = parser.read(str(path))
        if not read:
            raise ConfigError("config file not found", path=str(path))
        for section in parser.sections():
            if section not in _SCHEMA:
                raise ConfigError(f"unknown config section {section!r}")
            for key, raw in parser.items(section):
                config.set(section, key, raw)
    environ = os.environ if environ is None else environ
    for name, raw in environ.items():
        if "__" not in name:
            continue
        section, _, key = name.partition("__")
        section, key = section.lower(), key.lower()
        if section in _SCHEMA and key in _SCHEMA[section]:
            config.set(section, key, raw)
    config.validate_paths()
    return config

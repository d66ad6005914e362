"""
fermicolor configuration management

Pydantic models for every tunable of a run (graph and model sources, routing
weights, restart count, placement, output and logging), plus a
``ConfigManager`` that layers defaults, a YAML/JSON file and ``FERMICOLOR_``
environment variables.
"""

from __future__ import annotations

import json
import logging
import logging.handlers
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

logger = logging.getLogger(__name__)


class FermicolorConfigError(Exception):
    """Base exception for fermicolor configuration errors."""
    pass


class ConfigValidationError(FermicolorConfigError):
    """Raised when configuration validation fails."""
    pass


class ConfigLoadError(FermicolorConfigError):
    """Raised when configuration loading fails."""
    pass


LogLevel = Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
Mode = Literal["weak", "strong"]
ModeSelection = Literal["weak", "strong", "both"]
GraphFamily = Literal[
    "star", "complete", "line", "grid", "bottleneck", "heavy_hexagon", "triangular"
]
ModelKind = Literal["all_to_all", "nn_hopping", "file"]
Placement = Literal["auto", "identity", "random", "lattice"]
EnumerationStrategy = Literal["greedy", "canned"]
OutputFormat = Literal["yaml", "json"]

ENV_PREFIX = "FERMICOLOR_"
ENV_NESTING = "__"

_GRAPH_FAMILIES = (
    "star", "complete", "line", "grid", "bottleneck", "heavy_hexagon", "triangular"
)
_MODEL_KINDS = ("all_to_all", "nn_hopping")
_SOURCE_KEYS = {"graph": {"family", "path"}, "model": {"kind", "path"}}


class RoutingParams(BaseModel):
    """Edge-weight parameters of the congestion-aware router."""

    phys_penalty: float = Field(
        default=5.0, ge=0, description="Weight added per physical endpoint of an edge"
    )
    used_increment: float = Field(
        default=3.0, ge=0, description="Weight added to every edge of each routed path"
    )
    base_weight: float = Field(default=1.0, gt=0, description="Weight of an unused edge")
    seed: int = Field(default=0, description="Seed for the interaction shuffle")


class GraphSource(BaseModel):
    """Where the system graph comes from: a generator family or a graph file."""

    family: Optional[GraphFamily] = Field(default=None, description="Generator family")
    size: Optional[int] = Field(default=None, ge=2, description="Generator size parameter")
    path: Optional[str] = Field(default=None, description="Graph file (YAML or JSON)")

    @model_validator(mode="after")
    def check_exactly_one_source(self) -> GraphSource:
        if (self.family is None) == (self.path is None):
            raise ValueError("Exactly one of graph family or graph path must be given")
        return self

    @classmethod
    def parse(cls, text: str) -> GraphSource:
        """Parse ``family[:size]`` or a file path."""
        name, _, size = text.partition(":")
        if name in _GRAPH_FAMILIES:
            return cls(family=name, size=int(size) if size else None)  # type: ignore[arg-type]
        return cls(path=text)

    def describe(self) -> str:
        if self.path is not None:
            return self.path
        return f"{self.family}:{self.size}" if self.size is not None else str(self.family)


class ModelSource(BaseModel):
    """Interaction model: all-to-all, nearest-neighbour hopping or a model file."""

    kind: ModelKind = Field(default="all_to_all", description="Model constructor")
    size: Optional[int] = Field(default=None, ge=2, description="N modes or lattice side L")
    path: Optional[str] = Field(default=None, description="Model file (YAML or JSON)")

    @model_validator(mode="after")
    def check_source(self) -> ModelSource:
        if self.kind == "file" and self.path is None:
            raise ValueError("Model kind 'file' needs a path")
        if self.kind == "nn_hopping" and self.size is None:
            raise ValueError("Model kind 'nn_hopping' needs a lattice side")
        return self

    @classmethod
    def parse(cls, text: str) -> ModelSource:
        """Parse ``all_to_all[:N]``, ``nn_hopping:L`` or a file path."""
        name, _, size = text.partition(":")
        if name in _MODEL_KINDS:
            return cls(kind=name, size=int(size) if size else None)  # type: ignore[arg-type]
        return cls(kind="file", path=text)


class OutputConfig(BaseModel):
    """Output settings."""

    directory: Optional[str] = Field(default=None, description="Directory for written files")
    format: OutputFormat = Field(default="yaml", description="Structured-text format")


class LoggingConfig(BaseModel):
    """Logging configuration settings."""

    level: LogLevel = Field(default="INFO", description="Log level")
    format: str = Field(
        default="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        description="Log format string"
    )
    file: Optional[str] = Field(default=None, description="Log file path")
    max_file_size: int = Field(default=10485760, ge=1024, description="Maximum log file size in bytes")
    backup_count: int = Field(default=5, ge=1, description="Number of backup log files")
    console_output: bool = Field(default=True, description="Enable console output")
    structured_logging: bool = Field(default=False, description="Enable structured JSON logging")

    @field_validator('file')
    def validate_log_file(cls, v: Optional[str]) -> Optional[str]:
        """Validate log file path."""
        if v:
            log_path = Path(v)
            try:
                log_path.parent.mkdir(parents=True, exist_ok=True)
                if log_path.exists() and not os.access(log_path, os.W_OK):
                    raise ValueError(f"Log file is not writable: {v}")
            except OSError as e:
                raise ValueError(f"Invalid log file path: {v} ({e})")
        return v


class RunConfig(BaseModel):
    """Complete description of a run or sweep."""

    graph: GraphSource = Field(
        default_factory=lambda: GraphSource(family="star", size=4), description="System graph"
    )
    model: Optional[ModelSource] = Field(
        default=None, description="Interaction model; all-to-all over physical vertices if absent"
    )
    mode: ModeSelection = Field(default="both", description="Conflict rule(s) to color")
    restarts: int = Field(default=1, ge=1, description="Seeded restarts per mode")
    placements: int = Field(
        default=1, ge=1, description="Random placements per sweep size; placement k uses seed + k"
    )
    seed: int = Field(default=0, description="Base seed; restart i uses seed + i")
    routing: RoutingParams = Field(default_factory=RoutingParams, description="Router weights")
    placement: Placement = Field(default="auto", description="Mode-to-vertex placement")
    enumeration: EnumerationStrategy = Field(
        default="greedy", description="Edge enumeration for strong coloring"
    )
    workers: int = Field(default=1, ge=1, description="Concurrent restart workers")
    clique_seeds: Optional[int] = Field(
        default=None, ge=1, description="Seeds tried by the greedy clique bound"
    )
    record_timings: bool = Field(default=False, description="Add wall time to sweep rows")
    output: OutputConfig = Field(default_factory=OutputConfig, description="Output settings")
    logging: LoggingConfig = Field(default_factory=LoggingConfig, description="Logging settings")

    @property
    def modes(self) -> List[Mode]:
        if self.mode == "both":
            return ["weak", "strong"]
        return [self.mode]

    def to_dict(self) -> Dict[str, Any]:
        """Convert configuration to dictionary."""
        return self.model_dump()

    def save_to_file(self, file_path: Union[str, Path]) -> Path:
        """Save the resolved configuration; it loads back to an equal config."""
        path = Path(file_path)

        try:
            path.parent.mkdir(parents=True, exist_ok=True)

            if path.suffix.lower() in ['.yaml', '.yml']:
                with open(path, 'w') as f:
                    yaml.safe_dump(self.to_dict(), f, default_flow_style=False, sort_keys=False)
            elif path.suffix.lower() == '.json':
                with open(path, 'w') as f:
                    json.dump(self.to_dict(), f, indent=2)
            else:
                raise ConfigLoadError(f"Unsupported file format: {path.suffix}")

            logger.info(f"Configuration saved to: {path}")
            return path

        except ConfigLoadError:
            raise
        except Exception as e:
            raise ConfigLoadError(f"Failed to save configuration to {path}: {e}")


class ConfigManager:
    """Layers defaults, a configuration file, environment variables and overrides."""

    def __init__(self, config: Optional[RunConfig] = None) -> None:
        self._config = config or RunConfig()
        self._config_sources: List[str] = []
        logger.debug(f"ConfigManager initialized for graph {self._config.graph.describe()}")

    @property
    def config(self) -> RunConfig:
        """Get current configuration."""
        return self._config

    @property
    def sources(self) -> List[str]:
        """Get list of configuration sources loaded."""
        return self._config_sources.copy()

    def load_from_file(self, file_path: Union[str, Path]) -> None:
        """
        Load configuration from file.

        Args:
            file_path: Path to configuration file (JSON or YAML)

        Raises:
            ConfigLoadError: If file loading fails
            ConfigValidationError: If configuration validation fails
        """
        path = Path(file_path)

        if not path.exists():
            raise ConfigLoadError(f"Configuration file not found: {path}")

        if not path.is_file():
            raise ConfigLoadError(f"Configuration path is not a file: {path}")

        try:
            with open(path, 'r') as f:
                if path.suffix.lower() in ['.yaml', '.yml']:
                    data = yaml.safe_load(f)
                elif path.suffix.lower() == '.json':
                    data = json.load(f)
                else:
                    raise ConfigLoadError(f"Unsupported file format: {path.suffix}")
        except yaml.YAMLError as e:
            raise ConfigLoadError(f"Failed to parse YAML file {path}: {e}")
        except json.JSONDecodeError as e:
            raise ConfigLoadError(f"Failed to parse JSON file {path}: {e}")
        except OSError as e:
            raise ConfigLoadError(f"Failed to read configuration from {path}: {e}")

        if not isinstance(data, dict):
            raise ConfigLoadError("Configuration file must contain a dictionary/object")

        self._merge_config(data)
        self._config_sources.append(str(path))
        logger.info(f"Configuration loaded from: {path}")

    def load_from_env(self, prefix: str = ENV_PREFIX) -> None:
        """
        Load configuration from environment variables.

        ``FERMICOLOR_ROUTING__PHYS_PENALTY=7`` sets ``routing.phys_penalty``.

        Args:
            prefix: Environment variable prefix (default: "FERMICOLOR_")
        """
        env_config: Dict[str, Any] = {}

        for key, value in sorted(os.environ.items()):
            if key.startswith(prefix):
                config_key = key[len(prefix):].lower()
                self._set_nested_value(env_config, config_key, value)

        if env_config:
            self._merge_config(env_config)
            self._config_sources.append(f"environment (prefix: {prefix})")
            logger.info(f"Configuration loaded from environment variables with prefix: {prefix}")

    def load_overrides(self, overrides: Dict[str, Any]) -> None:
        """Merge explicit (e.g. command-line) settings; ``None`` values are skipped."""
        cleaned = _drop_none(overrides)
        if cleaned:
            self._merge_config(cleaned)
            self._config_sources.append("overrides")

    def load_defaults(self) -> None:
        """Reset to the built-in defaults."""
        self._config = RunConfig()
        self._config_sources.append("defaults")

    def validate(self) -> bool:
        """
        Validate current configuration.

        Returns:
            True if configuration is valid

        Raises:
            ConfigValidationError: If validation fails
        """
        try:
            RunConfig(**self._config.model_dump())
            logger.debug("Configuration validation successful")
            return True
        except ValidationError as e:
            raise ConfigValidationError(f"Configuration validation failed: {e}")

    def _merge_config(self, new_config: dict[str, Any]) -> None:
        """Merge new configuration with existing configuration."""
        current_dict = self._config.model_dump()
        merged = self._deep_merge(current_dict, new_config)
        # naming a new source replaces the section; a bare size updates it in place
        for section, source_keys in _SOURCE_KEYS.items():
            update = new_config.get(section)
            if isinstance(update, dict) and source_keys & update.keys():
                merged[section] = update

        try:
            self._config = RunConfig(**merged)
        except ValidationError as e:
            raise ConfigValidationError(f"Configuration merge validation failed: {e}")

    def _deep_merge(self, base: dict[str, Any], update: dict[str, Any]) -> dict[str, Any]:
        """Deep merge two dictionaries."""
        result = base.copy()

        for key, value in update.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._deep_merge(result[key], value)
            else:
                result[key] = value

        return result

    def _set_nested_value(self, config: Dict[str, Any], key_path: str, value: str) -> None:
        """Set a nested configuration value from a flat key path.

        ``routing__phys_penalty`` -> ``{"routing": {"phys_penalty": value}}``
        """
        keys = key_path.split(ENV_NESTING)

        converted_value: Any = value
        if value.lower() in ['true', 'false']:
            converted_value = value.lower() == 'true'
        elif value.lstrip('-').isdigit():
            converted_value = int(value)
        else:
            try:
                converted_value = float(value)
            except ValueError:
                pass

        current = config
        for key in keys[:-1]:
            current = current.setdefault(key, {})
        current[keys[-1]] = converted_value


def _drop_none(data: Dict[str, Any]) -> Dict[str, Any]:
    result: Dict[str, Any] = {}
    for key, value in data.items():
        if isinstance(value, dict):
            nested = _drop_none(value)
            if nested:
                result[key] = nested
        elif value is not None:
            result[key] = value
    return result


def load_config(
    file_path: Optional[Union[str, Path]] = None,
    env_prefix: str = ENV_PREFIX,
    overrides: Optional[Dict[str, Any]] = None,
) -> RunConfig:
    """
    Load configuration from defaults, an optional file, the environment and overrides.

    Later sources win: defaults < file < environment < overrides.

    Args:
        file_path: Optional configuration file path
        env_prefix: Environment variable prefix
        overrides: Optional nested settings, typically from command-line flags

    Returns:
        Loaded configuration
    """
    manager = ConfigManager()
    manager.load_defaults()

    if file_path:
        manager.load_from_file(file_path)

    manager.load_from_env(env_prefix)

    if overrides:
        manager.load_overrides(overrides)

    manager.validate()

    return manager.config


class JsonLineFormatter(logging.Formatter):
    """One JSON object per record, for structured logging."""

    def format(self, record: logging.LogRecord) -> str:
        payload = {
            "time": self.formatTime(record),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        return json.dumps(payload)


def configure_logging(settings: LoggingConfig) -> logging.Logger:
    """Install handlers on the ``fermicolor`` logger according to ``settings``."""
    root = logging.getLogger("fermicolor")
    root.setLevel(settings.level)
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()

    formatter: logging.Formatter
    if settings.structured_logging:
        formatter = JsonLineFormatter()
    else:
        formatter = logging.Formatter(settings.format)

    if settings.console_output:
        console = logging.StreamHandler(sys.stderr)
        console.setFormatter(formatter)
        root.addHandler(console)

    if settings.file:
        file_handler = logging.handlers.RotatingFileHandler(
            settings.file,
            maxBytes=settings.max_file_size,
            backupCount=settings.backup_count,
        )
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)

    if not root.handlers:
        root.addHandler(logging.NullHandler())
    return root

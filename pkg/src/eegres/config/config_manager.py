"""Configuration manager for run-config files and command-line overrides."""

import json
import logging
from pathlib import Path
from typing import Any

from eegres.config.settings import Settings
from eegres.config.validation import ConfigValidator, ValidationError

logger = logging.getLogger(__name__)


class ConfigManager:
    """Build the effective settings of a run.

    Settings come from the environment (and `.env`), then from an optional
    JSON run-config file whose top-level keys are section names, then from
    `--set section.key=value` overrides.
    """

    def __init__(self, config_path: Path | None = None):
        """Initialize config manager.

        Args:
            config_path: Optional path to a JSON run-config file
        """
        self.config_path = config_path
        self._settings: Settings | None = None
        self._runtime_config: dict[str, Any] = {}

    @property
    def settings(self) -> Settings:
        """Get current settings."""
        if self._settings is None:
            raise RuntimeError("Settings not loaded. Call load() first.")
        return self._settings

    def load(self, overrides: list[str] | None = None) -> Settings:
        """Load settings from environment, config file and overrides.

        Args:
            overrides: `section.key=value` strings, applied last

        Returns:
            Loaded Settings instance
        """
        self._runtime_config = {}
        if self.config_path is not None:
            if not self.config_path.exists():
                raise ValidationError(f"Settings file not found: {self.config_path}")
            try:
                self._runtime_config = json.loads(self.config_path.read_text())
            except json.JSONDecodeError as e:
                raise ValidationError(
                    f"Invalid JSON in settings file {self.config_path}: {e}"
                ) from e
            logger.info(f"Loaded run config from {self.config_path}")

        self._settings = Settings()
        self._apply_runtime_overrides()

        for text in overrides or []:
            key, value = ConfigValidator.parse_assignment(text)
            self.set_value(key, value)

        return self._settings

    def set_value(self, key: str, value: Any) -> None:
        """Set a configuration value by dotted key.

        Args:
            key: Configuration key, e.g. 'svm.c'
            value: New value (already validated)
        """
        section_name, _, field_name = key.partition(".")
        try:
            section = self.settings.section(section_name)
        except KeyError:
            raise ValidationError(f"Unknown settings section: {section_name}") from None
        if field_name not in type(section).model_fields:
            raise ValidationError(f"Unknown setting: {key}")

        setattr(section, field_name, value)
        logger.debug(f"Configuration override: {key} = {value}")

    def snapshot(self) -> dict[str, Any]:
        """Return the effective settings as JSON-compatible data."""
        return self.settings.model_dump(mode="json")

    def _apply_runtime_overrides(self) -> None:
        """Apply run-config file overrides through the validator."""
        for section_name, values in self._runtime_config.items():
            if not isinstance(values, dict):
                raise ValidationError(
                    f"Section '{section_name}' in {self.config_path} must be an object"
                )
            for field_name, raw in values.items():
                key = f"{section_name}.{field_name}"
                value = ConfigValidator.validate_setting(key, str(raw))
                self.set_value(key, value)

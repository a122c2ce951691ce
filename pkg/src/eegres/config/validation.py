"""Validation of command-line setting overrides and feature triples."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, ClassVar

from eegres.errors import InputError


class ValidationError(InputError):
    """Raised when configuration validation fails."""


@dataclass
class ValidationResult:
    """Result of a configuration validation."""

    valid: bool
    value: Any = None
    error: str | None = None


class ConfigValidator:
    """Validates `--set section.key=value` overrides."""

    # Define valid ranges and types for each setting
    VALIDATION_RULES: ClassVar[dict[str, dict[str, Any]]] = {
        "feature.budget": {
            "type": int,
            "min": 1,
            "max": 100_000,
            "unit": "features",
            "description": "Total number of features",
        },
        "feature.f_max": {
            "type": float,
            "min": 1e-6,
            "max": 1e6,
            "unit": "Hz",
            "description": "Maximum spectral feature frequency",
        },
        "cv.folds": {
            "type": int,
            "min": 2,
            "max": 10_000,
            "unit": "folds",
            "description": "Cross-validation folds",
        },
        "cv.seed": {
            "type": int,
            "min": 0,
            "max": 2**64 - 1,
            "unit": "",
            "description": "Base seed",
        },
        "svm.c": {
            "type": float,
            "min": 1e-12,
            "max": 1e12,
            "unit": "",
            "description": "SVM regularization strength",
        },
        "svm.tolerance": {
            "type": float,
            "min": 1e-15,
            "max": 1.0,
            "unit": "",
            "description": "SMO KKT tolerance",
        },
        "svm.max_iter_factor": {
            "type": int,
            "min": 1,
            "max": 1_000_000,
            "unit": "x n^2",
            "description": "SMO pair-update cap per squared sample count",
        },
        "clustering.restarts": {
            "type": int,
            "min": 1,
            "max": 1000,
            "unit": "restarts",
            "description": "k-means restarts",
        },
        "clustering.max_iter": {
            "type": int,
            "min": 1,
            "max": 100_000,
            "unit": "iterations",
            "description": "Lloyd iterations per restart",
        },
        "clustering.jacobi_tolerance": {
            "type": float,
            "min": 1e-16,
            "max": 1e-2,
            "unit": "",
            "description": "Eigensolver off-diagonal tolerance",
        },
        "clustering.jacobi_max_sweeps": {
            "type": int,
            "min": 1,
            "max": 10_000,
            "unit": "sweeps",
            "description": "Eigensolver sweep cap",
        },
        "sweep.workers": {
            "type": int,
            "min": 1,
            "max": 256,
            "unit": "workers",
            "description": "Configurations evaluated concurrently",
        },
        "sweep.diagnostics": {
            "type": bool,
            "unit": "",
            "description": "Write per-fold graph diagnostics",
        },
    }

    @classmethod
    def get_configurable_keys(cls) -> list[str]:
        """Get list of all configurable setting keys."""
        return list(cls.VALIDATION_RULES.keys())

    @classmethod
    def validate(cls, key: str, value: str) -> ValidationResult:
        """
        Validate a configuration value.

        Args:
            key: Setting key (e.g., "svm.c")
            value: String value to validate and convert

        Returns:
            ValidationResult with converted value or error message
        """
        if key not in cls.VALIDATION_RULES:
            return ValidationResult(
                valid=False,
                error=f"Unknown setting: {key} (valid: "
                + ", ".join(cls.VALIDATION_RULES)
                + ")",
            )

        rules = cls.VALIDATION_RULES[key]

        try:
            if rules["type"] is int:
                converted_value: Any = int(value)
            elif rules["type"] is float:
                converted_value = float(value)
            elif rules["type"] is bool:
                converted_value = value.lower() in ("true", "1", "yes", "on")
            else:
                converted_value = value
        except ValueError:
            type_name = rules["type"].__name__
            return ValidationResult(
                valid=False,
                error=f"Invalid value: '{value}' is not a valid {type_name}",
            )

        if "min" in rules and converted_value < rules["min"]:
            return ValidationResult(
                valid=False,
                error=f"Value {converted_value} for {key} is below minimum "
                f"({rules['min']} {rules['unit']})".rstrip(),
            )

        if "max" in rules and converted_value > rules["max"]:
            return ValidationResult(
                valid=False,
                error=f"Value {converted_value} for {key} is above maximum "
                f"({rules['max']} {rules['unit']})".rstrip(),
            )

        return ValidationResult(valid=True, value=converted_value)

    @classmethod
    def validate_setting(cls, key: str, value: str) -> Any:
        """
        Validate and return a configuration value, raising on error.

        Raises:
            ValidationError: If validation fails
        """
        result = cls.validate(key, value)
        if not result.valid:
            raise ValidationError(result.error or "Validation failed")
        return result.value

    @classmethod
    def parse_assignment(cls, text: str) -> tuple[str, Any]:
        """Parse and validate a `section.key=value` override."""
        key, sep, value = text.partition("=")
        if not sep:
            raise ValidationError(f"Expected KEY=VALUE, got '{text}'")
        key = key.strip()
        return key, cls.validate_setting(key, value.strip())

    @staticmethod
    def parse_triple(text: str) -> tuple[int, int, int]:
        """Parse a feature resolution triple written as 'F,T,G'."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ValidationError(f"Expected F,T,G, got '{text}'")
        try:
            n_f, n_t, n_g = (int(p) for p in parts)
        except ValueError:
            raise ValidationError(f"Non-integer feature count in '{text}'") from None
        if min(n_f, n_t, n_g) < 1:
            raise ValidationError(f"Feature counts must be >= 1, got '{text}'")
        return n_f, n_t, n_g

    @classmethod
    def format_help(cls) -> str:
        """Format help text for all configurable settings."""
        lines = ["Configurable settings (--set KEY=VALUE):", ""]

        for key, rules in cls.VALIDATION_RULES.items():
            lines.append(f"  {key}")
            lines.append(f"      {rules.get('description', '')}")
            if "min" in rules and "max" in rules:
                unit = rules.get("unit", "")
                lines.append(f"      Range: {rules['min']}-{rules['max']} {unit}")

        return "\n".join(lines)

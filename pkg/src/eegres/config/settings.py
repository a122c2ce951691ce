"""Pydantic settings for eegres configuration."""

from __future__ import annotations

import logging
from functools import lru_cache
from pathlib import Path
from typing import Any

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)


class FeatureSettings(BaseSettings):
    """Feature budget and spectral range."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="EEGRES_FEATURE_",
        extra="ignore",
    )

    budget: int = Field(
        default=60,
        ge=1,
        description="Total number of features (n_f * n_t * n_g)",
    )
    f_max: float = Field(
        default=45.0,
        gt=0,
        description="Target maximum frequency of the spectral features (Hz)",
    )


class CrossValidationSettings(BaseSettings):
    """Subject-grouped cross-validation."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="EEGRES_CV_",
        extra="ignore",
    )

    folds: int = Field(default=10, ge=2, description="Number of folds")
    seed: int = Field(
        default=0,
        ge=0,
        lt=2**64,
        description="Base seed for fold shuffling and clustering",
    )


class SvmSettings(BaseSettings):
    """SVM regularization and SMO solver limits."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="EEGRES_SVM_",
        extra="ignore",
    )

    c: float = Field(default=1.0, gt=0, description="Regularization strength")
    tolerance: float = Field(
        default=1e-3,
        gt=0,
        description="KKT violation tolerance of the SMO solver",
    )
    max_iter_factor: int = Field(
        default=10,
        ge=1,
        description="Pair-update cap as a multiple of n_samples squared",
    )


class ClusteringSettings(BaseSettings):
    """Spectral clustering of channels."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="EEGRES_CLUSTER_",
        extra="ignore",
    )

    restarts: int = Field(default=10, ge=1, description="k-means restarts")
    max_iter: int = Field(
        default=300,
        ge=1,
        description="Lloyd iterations per restart",
    )
    jacobi_tolerance: float = Field(
        default=1e-10,
        gt=0,
        description="Off-diagonal Frobenius tolerance of the eigensolver",
    )
    jacobi_max_sweeps: int = Field(
        default=100,
        ge=1,
        description="Maximum number of cyclic Jacobi sweeps",
    )


class SweepSettings(BaseSettings):
    """Sweep execution."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="EEGRES_SWEEP_",
        extra="ignore",
    )

    workers: int = Field(
        default=4,
        ge=1,
        le=256,
        description="Configurations evaluated concurrently",
    )
    diagnostics: bool = Field(
        default=False,
        description="Write per-fold graph diagnostics next to the report",
    )


class Settings(BaseSettings):
    """Main application settings."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="EEGRES_",
        extra="ignore",
        env_nested_delimiter="__",
    )

    # Nested settings
    feature: FeatureSettings = Field(default_factory=FeatureSettings)
    cv: CrossValidationSettings = Field(default_factory=CrossValidationSettings)
    svm: SvmSettings = Field(default_factory=SvmSettings)
    clustering: ClusteringSettings = Field(default_factory=ClusteringSettings)
    sweep: SweepSettings = Field(default_factory=SweepSettings)

    # Runtime settings
    log_level: str = Field(default="INFO", description="Logging level")
    log_dir: Path | None = Field(
        default=None,
        description="Directory for the debug log file (console only if unset)",
    )

    @field_validator("log_level", mode="before")
    @classmethod
    def normalize_log_level(cls, v: Any) -> str:
        """Accept log levels in any case."""
        level = str(v).upper()
        if level not in logging.getLevelNamesMapping():
            raise ValueError(f"Unknown log level: {v}")
        return level

    def section(self, name: str) -> BaseSettings:
        """Get a nested settings section by name."""
        sections: dict[str, BaseSettings] = {
            "feature": self.feature,
            "cv": self.cv,
            "svm": self.svm,
            "clustering": self.clustering,
            "sweep": self.sweep,
        }
        if name not in sections:
            raise KeyError(name)
        return sections[name]


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


def reload_settings() -> Settings:
    """Reload settings (clear cache and reload)."""
    get_settings.cache_clear()
    return get_settings()

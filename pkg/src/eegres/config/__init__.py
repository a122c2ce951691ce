"""Configuration management for eegres."""

from eegres.config.config_manager import ConfigManager
from eegres.config.settings import Settings, get_settings
from eegres.config.validation import ConfigValidator

__all__ = ["ConfigManager", "ConfigValidator", "Settings", "get_settings"]

"""Application factory and dependency container."""

from __future__ import annotations

import argparse
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from eegres.config.config_manager import ConfigManager
from eegres.config.settings import Settings
from eegres.config.validation import ConfigValidator

logger = logging.getLogger(__name__)


@dataclass
class Container:
    """Dependency container for one CLI invocation.

    Holds the effective settings and the flags the command was called with.
    """

    settings: Settings
    config_manager: ConfigManager
    flags: dict[str, Any] = field(default_factory=dict)

    def override(self, values: dict[str, Any]) -> None:
        """Apply command flags as settings overrides; None means not given."""
        for key, value in values.items():
            if value is None:
                continue
            validated = ConfigValidator.validate_setting(key, str(value))
            self.config_manager.set_value(key, validated)

    def metadata(self) -> dict[str, Any]:
        """Flags and effective settings, for result files."""
        return {"flags": self.flags, "settings": self.config_manager.snapshot()}


def _json_safe(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, list | tuple):
        return [_json_safe(v) for v in value]
    return value


def create_app(
    config_path: Path | None = None,
    overrides: list[str] | None = None,
    flags: dict[str, Any] | None = None,
) -> Container:
    """Create the container for a command.

    Args:
        config_path: Optional JSON run-config file
        overrides: `section.key=value` strings from `--set`
        flags: Parsed command-line flags, echoed into result metadata

    Returns:
        Initialized Container
    """
    config_manager = ConfigManager(config_path)
    settings = config_manager.load(overrides)
    if config_path is not None:
        logger.info(f"Loaded run configuration from {config_path}")
    return Container(
        settings=settings,
        config_manager=config_manager,
        flags={k: _json_safe(v) for k, v in (flags or {}).items()},
    )


async def main(args: argparse.Namespace) -> None:
    """Run the subcommand selected in `args`."""
    from eegres.services.commands import COMMANDS

    container = create_app(
        config_path=args.settings,
        overrides=args.set,
        flags=vars(args),
    )
    handler = COMMANDS[args.command]
    logger.debug(f"Running command {args.command} with {container.flags}")
    await handler(container, args)

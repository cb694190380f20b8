#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
This module handles the runtime settings of the simulator.

Settings come from environment variables, optionally loaded from a .env file.
Experiment physics lives in the JSON experiment configs (see configs/), not here.
"""

import os
from typing import Optional

from dotenv import load_dotenv
from loguru import logger

LOG_LEVELS = ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL")


class Settings:
    """
    Process-wide settings.

    Loads configuration from environment variables prefixed with SMTJ_.
    """

    def __init__(self):
        """Initialize the settings."""
        load_dotenv()
        self._load_settings()
        self.validate()

    def _load_settings(self):
        """Load all settings variables."""

        # Logging
        self.LOG_LEVEL: str = os.getenv("SMTJ_LOG_LEVEL", "INFO").upper()
        self.LOG_DIR: Optional[str] = os.getenv("SMTJ_LOG_DIR") or None

        # Outputs
        self.OUT_DIR: str = os.getenv("SMTJ_OUT_DIR", "results")

        # Runs
        self.DEFAULT_SEED: int = self._get_int("SMTJ_DEFAULT_SEED", 20240917)
        self.WORKERS: int = self._get_int("SMTJ_WORKERS", 1)

    def _get_int(self, name: str, default: int) -> int:
        """Read an integer variable, falling back to ``default`` on junk."""
        raw = os.getenv(name)
        if raw is None or raw.strip() == "":
            return default
        try:
            return int(raw)
        except ValueError:
            logger.error(f"Setting {name}={raw!r} is not an integer, using {default}")
            return default

    def validate(self) -> bool:
        """
        Validate the loaded settings.

        Returns:
            True if the settings are usable as-is, False otherwise.
        """
        problems = []
        if self.LOG_LEVEL not in LOG_LEVELS:
            problems.append(f"SMTJ_LOG_LEVEL={self.LOG_LEVEL}")
        if self.WORKERS < 1:
            problems.append(f"SMTJ_WORKERS={self.WORKERS}")
        if not 0 <= self.DEFAULT_SEED < 2**64:
            problems.append(f"SMTJ_DEFAULT_SEED={self.DEFAULT_SEED}")

        if problems:
            logger.error(f"Invalid settings: {', '.join(problems)}")
            return False

        logger.debug("Settings loaded successfully")
        return True


# Global settings instance
settings = Settings()

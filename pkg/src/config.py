"""
Configuration management for the lpmask command line
"""
import os
from dataclasses import dataclass

from .models import AuditConfig

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass
class Config:
    """Application configuration"""

    # Logging
    LOG_LEVEL: str = "INFO"

    # Solver / oracle
    ORACLE_MAX_VARS: int = 6

    # Resampling caps
    KEYGEN_MAX_ATTEMPTS: int = 64
    GENERATOR_MAX_ATTEMPTS: int = 256

    # Probes
    PROBE_SAMPLES: int = 100

    @classmethod
    def from_env(cls) -> 'Config':
        """Load configuration from environment variables; all of them are optional"""

        log_level = os.getenv('LOG_LEVEL', 'INFO').upper()
        if log_level not in LOG_LEVELS:
            raise ValueError(f"LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}, got {log_level}")

        config = cls(
            LOG_LEVEL=log_level,
            ORACLE_MAX_VARS=_int_env('ORACLE_MAX_VARS', 6),
            KEYGEN_MAX_ATTEMPTS=_int_env('KEYGEN_MAX_ATTEMPTS', 64),
            GENERATOR_MAX_ATTEMPTS=_int_env('GENERATOR_MAX_ATTEMPTS', 256),
            PROBE_SAMPLES=_int_env('PROBE_SAMPLES', 100),
        )
        return config

    def audit_config(self) -> AuditConfig:
        return AuditConfig(
            KEYGEN_MAX_ATTEMPTS=self.KEYGEN_MAX_ATTEMPTS,
            GENERATOR_MAX_ATTEMPTS=self.GENERATOR_MAX_ATTEMPTS,
            ORACLE_MAX_VARS=self.ORACLE_MAX_VARS,
            PROBE_SAMPLES=self.PROBE_SAMPLES,
        )


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name, str(default))
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")
    if value < 1:
        raise ValueError(f"{name} must be positive, got {value}")
    return value

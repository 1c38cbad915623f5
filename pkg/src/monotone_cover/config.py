"""Configuration management with Pydantic validation."""

import tomllib
from pathlib import Path
from typing import Any, Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Config(BaseSettings):
    """Solver configuration with environment variable support.

    Every setting can be overridden with a ``MONOCOVER_``-prefixed environment
    variable or a ``.env`` file in the working directory.

    Attributes:
        epsilon: Absolute tolerance for every numeric comparison against a
            strict inequality (floors, satisfaction tests, saturation)
        safety_factor: Multiplier for the solve step limit
            ``safety_factor * (sum |deps(S)| + n)``
        bisection_iterations: Iterations for generic minimal-step searches
        oracle_budget: Maximum enumeration states for the exact oracle
        default_seed: Seed used when a command does not pass one
        montecarlo_trials: Default number of trials for randomized harnesses
        heap_stepsize: Use the heap-based CMIP driver instead of the naive one
        log_level: Logging level

    Example:
        >>> config = Config()
        >>> config.epsilon
        1e-09

        >>> # Load from file
        >>> config = Config.from_toml(Path("monocover.toml"))

        >>> # Override with environment variables
        >>> os.environ["MONOCOVER_ORACLE_BUDGET"] = "1000"
        >>> Config().oracle_budget
        1000
    """

    model_config = SettingsConfigDict(
        env_prefix="MONOCOVER_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Numerics
    epsilon: float = Field(
        default=1e-9,
        gt=0,
        le=1e-3,
        description="Global absolute tolerance",
    )
    bisection_iterations: int = Field(
        default=64,
        ge=8,
        description="Iterations for generic minimal-step searches",
    )

    # Solver limits
    safety_factor: int = Field(
        default=10,
        ge=1,
        description="Step limit multiplier",
    )
    oracle_budget: int = Field(
        default=10_000_000,
        ge=1,
        description="Maximum enumeration states for the exact oracle",
    )
    heap_stepsize: bool = Field(
        default=True,
        description="Use the heap-based CMIP driver",
    )

    # Randomness
    default_seed: int = Field(
        default=0,
        ge=0,
        description="Seed used when none is given",
    )
    montecarlo_trials: int = Field(
        default=10_000,
        ge=1,
        description="Default trials for randomized harnesses",
    )

    # Monitoring
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        default="WARNING",
        description="Logging level",
    )

    @field_validator("log_level", mode="before")
    @classmethod
    def normalize_log_level(cls, v: Any) -> Any:
        """Accept lower-case level names.

        Args:
            v: Raw log level

        Returns:
            Upper-cased level name when a string was given
        """
        if isinstance(v, str):
            return v.upper()
        return v

    @classmethod
    def from_toml(cls, path: Path) -> "Config":
        """Load configuration from TOML file.

        Both a flat table and a ``[monocover]`` section are accepted.

        Args:
            path: Path to TOML file

        Returns:
            Config: Loaded configuration

        Raises:
            FileNotFoundError: If file doesn't exist
            ValueError: If TOML is invalid

        Example:
            >>> config = Config.from_toml(Path("monocover.toml"))
            >>> config.safety_factor
            10
        """
        if not path.exists():
            raise FileNotFoundError(f"Config file not found: {path}")

        with open(path, "rb") as f:
            data = tomllib.load(f)

        section = data.get("monocover", data)
        return cls(**section)

    def to_dict(self) -> dict[str, Any]:
        """Convert config to dictionary.

        Returns:
            dict: Configuration as dictionary
        """
        return self.model_dump()


# Global configuration instance
_config: Config | None = None


def get_config() -> Config:
    """Get global configuration instance.

    Returns:
        Config: Global configuration

    Example:
        >>> get_config().epsilon
        1e-09
    """
    global _config
    if _config is None:
        _config = Config()
    return _config


def set_config(config: Config | None) -> None:
    """Set global configuration instance.

    Passing ``None`` drops the cached instance so the next
    :func:`get_config` call re-reads the environment.

    Args:
        config: Configuration to set

    Example:
        >>> set_config(Config(epsilon=1e-12))
        >>> get_config().epsilon
        1e-12
    """
    global _config
    _config = config


def eps() -> float:
    """Shortcut for the configured global tolerance."""
    return get_config().epsilon

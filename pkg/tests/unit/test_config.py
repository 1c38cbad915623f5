"""Unit tests for configuration management."""

from pathlib import Path

import pytest
from pydantic import ValidationError

from monotone_cover.config import Config, eps, get_config, set_config


@pytest.mark.unit
class TestConfig:
    """Test suite for Config class."""

    def test_default_config(self):
        """Test creating config with default values."""
        config = Config()

        assert config.epsilon == 1e-9
        assert config.bisection_iterations == 64
        assert config.safety_factor == 10
        assert config.oracle_budget == 10_000_000
        assert config.heap_stepsize is True
        assert config.default_seed == 0
        assert config.montecarlo_trials == 10_000
        assert config.log_level == "WARNING"

    def test_config_from_toml_section(self, tmp_path: Path):
        """Test loading config from a [monocover] section.

        Args:
            tmp_path: Pytest temporary directory
        """
        path = tmp_path / "monocover.toml"
        path.write_text(
            """
[monocover]
epsilon = 1e-12
safety_factor = 3
heap_stepsize = false
log_level = "debug"
"""
        )

        config = Config.from_toml(path)

        assert config.epsilon == 1e-12
        assert config.safety_factor == 3
        assert config.heap_stepsize is False
        assert config.log_level == "DEBUG"

    def test_config_from_flat_toml(self, tmp_path: Path):
        """Test loading config from a flat table.

        Args:
            tmp_path: Pytest temporary directory
        """
        path = tmp_path / "flat.toml"
        path.write_text("oracle_budget = 500\ndefault_seed = 7\n")

        config = Config.from_toml(path)

        assert config.oracle_budget == 500
        assert config.default_seed == 7

    def test_config_from_nonexistent_file(self, tmp_path: Path):
        """Test loading from non-existent file raises error.

        Args:
            tmp_path: Pytest temporary directory
        """
        with pytest.raises(FileNotFoundError, match="not found"):
            Config.from_toml(tmp_path / "nonexistent.toml")

    def test_config_from_invalid_toml(self, tmp_path: Path):
        """Test loading from invalid TOML raises error.

        Args:
            tmp_path: Pytest temporary directory
        """
        invalid_toml = tmp_path / "invalid.toml"
        invalid_toml.write_text("this is not valid toml [[[")

        # TOMLDecodeError subclasses ValueError
        with pytest.raises(ValueError):
            Config.from_toml(invalid_toml)

    def test_epsilon_validation(self):
        """Test epsilon must lie in (0, 1e-3]."""
        assert Config(epsilon=1e-3).epsilon == 1e-3

        with pytest.raises(ValidationError, match="greater than 0"):
            Config(epsilon=0)

        with pytest.raises(ValidationError, match="less than or equal to 0.001"):
            Config(epsilon=0.01)

    def test_limit_validation(self):
        """Test lower bounds on the integer limits."""
        with pytest.raises(ValidationError):
            Config(safety_factor=0)

        with pytest.raises(ValidationError):
            Config(bisection_iterations=4)

        with pytest.raises(ValidationError):
            Config(oracle_budget=0)

        with pytest.raises(ValidationError):
            Config(default_seed=-1)

    def test_log_level_normalized(self):
        """Test lower-case level names are accepted."""
        assert Config(log_level="info").log_level == "INFO"

        with pytest.raises(ValidationError):
            Config(log_level="verbose")

    def test_config_to_dict(self):
        """Test converting config to dictionary."""
        data = Config(safety_factor=4).to_dict()

        assert data["safety_factor"] == 4
        assert data["epsilon"] == 1e-9
        assert set(data) >= {"oracle_budget", "heap_stepsize", "montecarlo_trials", "log_level"}


@pytest.mark.unit
class TestEnvironmentOverrides:
    """Test suite for MONOCOVER_ environment variables."""

    def test_env_override(self, monkeypatch: pytest.MonkeyPatch):
        """Test a prefixed variable overrides the default.

        Args:
            monkeypatch: Pytest monkeypatch fixture
        """
        monkeypatch.setenv("MONOCOVER_ORACLE_BUDGET", "1000")

        assert Config().oracle_budget == 1000

    def test_env_is_case_insensitive(self, monkeypatch: pytest.MonkeyPatch):
        """Test lower-case variable names are honoured.

        Args:
            monkeypatch: Pytest monkeypatch fixture
        """
        monkeypatch.setenv("monocover_safety_factor", "2")

        assert Config().safety_factor == 2

    def test_invalid_env_value(self, monkeypatch: pytest.MonkeyPatch):
        """Test an out-of-range environment value fails validation.

        Args:
            monkeypatch: Pytest monkeypatch fixture
        """
        monkeypatch.setenv("MONOCOVER_EPSILON", "1")

        with pytest.raises(ValidationError):
            Config()


@pytest.mark.unit
class TestGlobalConfig:
    """Test suite for the process-wide config accessors."""

    def test_get_config_caches(self):
        """Test get_config returns the same instance until reset."""
        first = get_config()

        assert get_config() is first

    def test_set_config(self):
        """Test set_config replaces the global instance."""
        set_config(Config(epsilon=1e-12))

        assert get_config().epsilon == 1e-12
        assert eps() == 1e-12

    def test_reset_rereads_environment(self, monkeypatch: pytest.MonkeyPatch):
        """Test set_config(None) makes the next access re-read the environment.

        Args:
            monkeypatch: Pytest monkeypatch fixture
        """
        assert get_config().default_seed == 0
        monkeypatch.setenv("MONOCOVER_DEFAULT_SEED", "42")

        set_config(None)

        assert get_config().default_seed == 42

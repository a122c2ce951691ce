"""Unit tests for configuration validation."""

import pytest

from eegres.config.validation import ConfigValidator, ValidationError
from eegres.errors import InputError


class TestConfigValidator:
    """Tests for ConfigValidator class."""

    def test_validate_budget_valid(self):
        """Test valid feature budgets."""
        assert ConfigValidator.validate_setting("feature.budget", "60") == 60
        assert ConfigValidator.validate_setting("feature.budget", "180") == 180
        assert ConfigValidator.validate_setting("feature.budget", "1") == 1

    def test_validate_budget_invalid_range(self):
        """Test a budget below 1 is rejected."""
        with pytest.raises(ValidationError) as exc_info:
            ConfigValidator.validate_setting("feature.budget", "0")
        assert "below minimum" in str(exc_info.value)

    def test_validate_budget_invalid_type(self):
        """Test non-integer budgets are rejected."""
        with pytest.raises(ValidationError) as exc_info:
            ConfigValidator.validate_setting("feature.budget", "abc")
        assert "valid int" in str(exc_info.value)

    def test_validate_f_max(self):
        """Test f_max converts to float."""
        assert ConfigValidator.validate_setting("feature.f_max", "45") == 45.0
        assert ConfigValidator.validate_setting("feature.f_max", "40.5") == 40.5

    def test_validate_folds(self):
        """Test fold counts below 2 are rejected."""
        assert ConfigValidator.validate_setting("cv.folds", "10") == 10
        with pytest.raises(ValidationError):
            ConfigValidator.validate_setting("cv.folds", "1")

    def test_validate_seed_range(self):
        """Test seeds span the unsigned 64-bit range."""
        assert ConfigValidator.validate_setting("cv.seed", str(2**64 - 1)) == 2**64 - 1
        with pytest.raises(ValidationError):
            ConfigValidator.validate_setting("cv.seed", "-1")
        with pytest.raises(ValidationError, match="above maximum"):
            ConfigValidator.validate_setting("cv.seed", str(2**64))

    def test_validate_svm_c(self):
        """Test C must be positive."""
        assert ConfigValidator.validate_setting("svm.c", "0.5") == 0.5
        with pytest.raises(ValidationError):
            ConfigValidator.validate_setting("svm.c", "0")

    def test_validate_bool(self):
        """Test boolean flags accept the usual spellings."""
        assert ConfigValidator.validate_setting("sweep.diagnostics", "true") is True
        assert ConfigValidator.validate_setting("sweep.diagnostics", "ON") is True
        assert ConfigValidator.validate_setting("sweep.diagnostics", "0") is False

    def test_validate_unknown_key(self):
        """Test unknown keys are rejected with the list of valid keys."""
        result = ConfigValidator.validate("svm.kernel", "linear")
        assert not result.valid
        assert result.error is not None
        assert "Unknown setting" in result.error
        assert "svm.c" in result.error

    def test_validation_error_is_input_error(self):
        """Test validation failures map to the input-error exit code."""
        with pytest.raises(InputError) as exc_info:
            ConfigValidator.validate_setting("sweep.workers", "0")
        assert exc_info.value.exit_code == 1

    def test_parse_assignment(self):
        """Test KEY=VALUE parsing with whitespace."""
        assert ConfigValidator.parse_assignment("svm.c = 2") == ("svm.c", 2.0)
        with pytest.raises(ValidationError, match="KEY=VALUE"):
            ConfigValidator.parse_assignment("svm.c")

    def test_parse_triple(self):
        """Test F,T,G parsing."""
        assert ConfigValidator.parse_triple("6,5,2") == (6, 5, 2)
        assert ConfigValidator.parse_triple(" 60, 1 ,1") == (60, 1, 1)

    @pytest.mark.parametrize("text", ["6,5", "6,5,2,1", "a,5,2", "6,0,10"])
    def test_parse_triple_invalid(self, text):
        """Test malformed triples are rejected."""
        with pytest.raises(ValidationError):
            ConfigValidator.parse_triple(text)

    def test_format_help(self):
        """Test the help text lists every key."""
        text = ConfigValidator.format_help()
        for key in ConfigValidator.get_configurable_keys():
            assert key in text
        assert "Range: 2-10000 folds" in text

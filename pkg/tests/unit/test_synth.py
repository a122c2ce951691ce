"""Unit tests for the synthetic dataset generator."""

import numpy as np
import pydantic
import pytest
from scipy import signal

from eegres.core.synth import (
    BASELINE_CORRELATION,
    EffectDimension,
    SynthSpec,
    block_correlation,
    equicorrelation,
    matched_block_correlation,
    synthesize,
)


def spec_with(effect: EffectDimension, size: float, **kwargs) -> SynthSpec:
    params = {
        "n_subjects_per_class": 8,
        "samples_per_subject": 2,
        "n_channels": 8,
        "n_times": 2048,
        "fs": 128.0,
        "seed": 3,
    }
    params.update(kwargs)
    return SynthSpec(effect_dimension=effect, effect_size=size, **params)


def auc(negatives: np.ndarray, positives: np.ndarray) -> float:
    """Probability that a positive score exceeds a negative one."""
    wins = (positives[:, None] > negatives[None, :]).mean()
    ties = (positives[:, None] == negatives[None, :]).mean()
    return float(wins + 0.5 * ties)


def by_label(bundle, statistic):
    values = np.array([statistic(s.data) for s in bundle])
    labels = np.array([s.label for s in bundle])
    return values[labels == 0], values[labels == 1]


class TestSynthSpec:
    """Tests for SynthSpec validation."""

    def test_defaults(self):
        """Test the default spec is valid and effect-free."""
        spec = SynthSpec()
        assert spec.effect_dimension is EffectDimension.NONE
        assert spec.strength == 0.0

    def test_strength_mapping(self):
        """Test effect size e maps to e / (1 + e)."""
        assert spec_with(EffectDimension.SPATIAL, 1.0).strength == 0.5
        assert spec_with(EffectDimension.SPATIAL, 3.0).strength == 0.75

    @pytest.mark.parametrize(
        "field,value",
        [("fs", 16.0), ("n_channels", 1), ("effect_size", -1.0), ("seed", -1)],
    )
    def test_rejects_invalid(self, field, value):
        """Test out-of-range fields are rejected."""
        with pytest.raises(pydantic.ValidationError):
            SynthSpec(**{field: value})

    def test_spatial_effect_needs_three_channels(self):
        """Test a two-channel spatial spec is rejected."""
        with pytest.raises(pydantic.ValidationError, match="3 channels"):
            spec_with(EffectDimension.SPATIAL, 1.0, n_channels=2)

    def test_parses_json(self):
        """Test a spec round-trips through JSON text."""
        spec = spec_with(EffectDimension.TEMPORAL, 2.0)
        assert SynthSpec.model_validate_json(spec.model_dump_json()) == spec


class TestCorrelationMatrices:
    """Tests for the mixing correlation matrices."""

    def test_equicorrelation(self):
        """Test unit diagonal and common off-diagonal value."""
        c = equicorrelation(3, 0.3)
        np.testing.assert_array_equal(np.diag(c), 1.0)
        assert c[0, 1] == c[1, 2] == 0.3

    def test_block_correlation(self):
        """Test within- and between-block values of a 4-channel matrix."""
        c = block_correlation(4, within=0.9, between=0.1)
        assert c[0, 1] == 0.9
        assert c[2, 3] == 0.9
        assert c[0, 2] == 0.1
        assert c[1, 1] == 1.0

    @pytest.mark.parametrize("n_channels", [3, 4, 7, 8, 19])
    @pytest.mark.parametrize("strength", [0.25, 0.75, 0.99])
    def test_matched_block_correlation(self, n_channels, strength):
        """Test unit diagonal, block contrast and the baseline sum of squares."""
        rho = BASELINE_CORRELATION
        c = matched_block_correlation(n_channels, rho, strength)
        baseline = equicorrelation(n_channels, rho)

        np.testing.assert_array_equal(np.diag(c), 1.0)
        assert np.sum(c**2) == pytest.approx(np.sum(baseline**2), rel=1e-12)
        assert c[-1, -2] > rho
        assert c[0, -1] == pytest.approx(rho * (1.0 - strength))
        assert np.linalg.eigvalsh(c).min() > 0.0

    def test_matched_block_correlation_at_zero_strength(self):
        """Test strength 0 reproduces the equicorrelated baseline."""
        np.testing.assert_allclose(
            matched_block_correlation(6, 0.4, 0.0), equicorrelation(6, 0.4)
        )


class TestSynthesize:
    """Tests for synthesize()."""

    def test_layout(self):
        """Test sample count, shapes, subjects and labels."""
        bundle = synthesize(spec_with(EffectDimension.NONE, 0.0))
        assert len(bundle) == 32
        assert bundle.channel_names[0] == "ch00"
        assert all(s.data.shape == (8, 2048) for s in bundle)
        labels = bundle.subject_labels()
        assert sum(labels.values()) == 8
        assert labels["ctrl000"] == 0
        assert labels["pat007"] == 1
        assert bundle.history[0]["step"] == "synthesize"

    def test_deterministic(self):
        """Test the same spec gives bit-identical bundles."""
        spec = spec_with(EffectDimension.SPECTRAL, 1.0)
        assert synthesize(spec).equals(synthesize(spec))

    def test_seed_changes_data(self):
        """Test different seeds give different data."""
        a = synthesize(spec_with(EffectDimension.NONE, 0.0, seed=1))
        b = synthesize(spec_with(EffectDimension.NONE, 0.0, seed=2))
        assert not a.equals(b)

    def test_unit_baseline_power(self):
        """Test the baseline has roughly unit variance per channel."""
        bundle = synthesize(spec_with(EffectDimension.NONE, 0.0))
        variance = np.mean([s.data.var(axis=1).mean() for s in bundle])
        assert 0.8 < variance < 1.2

    def test_null_effect_permutation(self):
        """Test effect size 0 gives no label dependence of total power."""
        bundle = synthesize(spec_with(EffectDimension.NONE, 0.0))
        values = np.array([np.log(np.mean(s.data**2)) for s in bundle])
        labels = np.array([s.label for s in bundle])

        def gap(lab: np.ndarray) -> float:
            return abs(values[lab == 1].mean() - values[lab == 0].mean())

        observed = gap(labels)
        rng = np.random.default_rng(0)
        null = np.array([gap(rng.permutation(labels)) for _ in range(1000)])
        p_value = (1 + np.sum(null >= observed)) / 1001
        assert p_value > 0.01

    def test_spectral_effect_band_power(self):
        """Test planted 8-12 Hz power separates the classes."""
        bundle = synthesize(spec_with(EffectDimension.SPECTRAL, 4.0))

        def band_power(data: np.ndarray) -> float:
            freqs, pxx = signal.welch(data, fs=128.0, nperseg=256, axis=1)
            band = (freqs >= 8.0) & (freqs <= 12.0)
            return float(pxx[:, band].mean())

        negatives, positives = by_label(bundle, band_power)
        assert auc(negatives, positives) > 0.9

    def test_spectral_effect_preserves_power(self):
        """Test the spectral effect leaves total power unchanged."""
        bundle = synthesize(spec_with(EffectDimension.SPECTRAL, 4.0))
        negatives, positives = by_label(bundle, lambda d: float(np.mean(d**2)))
        assert abs(positives.mean() - negatives.mean()) < 0.2

    def test_spatial_effect_block_correlation(self):
        """Test class 1 channels correlate more strongly within the first block."""
        bundle = synthesize(spec_with(EffectDimension.SPATIAL, 4.0))
        negatives, positives = by_label(
            bundle, lambda d: float(np.corrcoef(d)[0, 1])
        )
        assert positives.min() > negatives.max()

    def test_spatial_effect_matches_channel_power(self):
        """Test every channel keeps unit power in both classes."""
        bundle = synthesize(spec_with(EffectDimension.SPATIAL, 4.0))
        labels = np.array([s.label for s in bundle])
        power = np.array([np.mean(s.data**2, axis=1) for s in bundle])

        for label in (0, 1):
            per_channel = power[labels == label].mean(axis=0)
            np.testing.assert_allclose(per_channel, 1.0, atol=0.15)

    def test_spatial_effect_hidden_in_channel_sum(self):
        """Test fluctuations of the channel-summed power do not separate classes."""
        bundle = synthesize(spec_with(EffectDimension.SPATIAL, 4.0))
        negatives, positives = by_label(
            bundle, lambda d: float(np.var(np.sum(d**2, axis=0)))
        )
        assert 0.2 < auc(negatives, positives) < 0.8

    def test_spatial_effect_visible_between_blocks(self):
        """Test the power contrast of the two channel blocks separates classes."""
        bundle = synthesize(spec_with(EffectDimension.SPATIAL, 4.0))

        def contrast(data: np.ndarray) -> float:
            power = data**2
            return float(np.var(power[:4].mean(axis=0) - power[4:].mean(axis=0)))

        negatives, positives = by_label(bundle, contrast)
        assert auc(negatives, positives) > 0.9

    def test_temporal_effect_envelope(self):
        """Test class 1 has more power in the first half than the second."""
        bundle = synthesize(spec_with(EffectDimension.TEMPORAL, 4.0))

        def half_ratio(data: np.ndarray) -> float:
            half = data.shape[1] // 2
            return float(np.mean(data[:, :half] ** 2) / np.mean(data[:, half:] ** 2))

        negatives, positives = by_label(bundle, half_ratio)
        assert positives.min() > 3.0
        assert negatives.max() < 1.5

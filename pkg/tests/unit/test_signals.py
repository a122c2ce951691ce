"""Unit tests for signal samples, bundles, decimation and partitioning."""

import numpy as np
import pytest

from eegres.core.signals import (
    DatasetBundle,
    SignalSample,
    decimate,
    decimate_bundle,
    partition,
    partition_bundle,
    round_half_away,
)
from eegres.errors import SignalError


def two_rows(values: list[float], fs: float = 1.0) -> SignalSample:
    """Sample whose two channels both hold `values`."""
    return SignalSample(data=np.array([values, values]), fs=fs, subject_id="a", label=0)


class TestSignalSample:
    """Tests for SignalSample invariants."""

    def test_valid_sample(self, make_sample):
        """Test shape properties of a valid sample."""
        sample = make_sample(n_channels=3, n_times=100, fs=50.0)
        assert sample.n_channels == 3
        assert sample.n_times == 100
        assert sample.duration_seconds == 2.0

    def test_data_is_read_only_copy(self):
        """Test sample data is copied and frozen."""
        raw = np.ones((2, 4))
        sample = SignalSample(data=raw, fs=1.0, subject_id="a", label=1)
        raw[0, 0] = 5.0
        assert sample.data[0, 0] == 1.0
        with pytest.raises(ValueError):
            sample.data[0, 0] = 2.0

    @pytest.mark.parametrize(
        "data",
        [np.ones(10), np.ones((1, 10)), np.ones((2, 1)), np.ones((2, 2, 2))],
    )
    def test_rejects_bad_shapes(self, data):
        """Test fewer than 2 channels or time points is rejected."""
        with pytest.raises(SignalError):
            SignalSample(data=data, fs=1.0, subject_id="a", label=0)

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_rejects_non_finite(self, bad):
        """Test NaN and infinite entries are rejected."""
        data = np.zeros((2, 5))
        data[1, 3] = bad
        with pytest.raises(SignalError, match="non-finite"):
            SignalSample(data=data, fs=1.0, subject_id="a", label=0)

    @pytest.mark.parametrize("fs", [0.0, -1.0, float("nan"), float("inf")])
    def test_rejects_bad_sampling_rate(self, fs):
        """Test non-positive or non-finite sampling rates are rejected."""
        with pytest.raises(SignalError):
            SignalSample(data=np.zeros((2, 5)), fs=fs, subject_id="a", label=0)

    def test_rejects_bad_label(self):
        """Test labels other than 0 and 1 are rejected."""
        with pytest.raises(SignalError):
            SignalSample(data=np.zeros((2, 5)), fs=1.0, subject_id="a", label=2)


class TestRounding:
    """Tests for half-away-from-zero rounding."""

    def test_halves_round_away(self):
        """Test .5 cases round away from zero."""
        assert round_half_away(2.5) == 3
        assert round_half_away(3.5) == 4
        assert round_half_away(-2.5) == -3
        assert round_half_away(2.49) == 2


class TestDecimate:
    """Tests for block-mean decimation."""

    def test_block_means(self):
        """Test the hand-computed block means."""
        sample = two_rows([1, 3, 5, 7, 2, 4, 6, 8], fs=8.0)
        out = decimate(sample, 2)
        np.testing.assert_array_equal(out.data[0], [2, 6, 3, 7])
        np.testing.assert_array_equal(out.data[1], [2, 6, 3, 7])
        assert out.fs == 4.0

    def test_factor_one_is_identity(self, make_sample):
        """Test factor 1 returns the sample unchanged."""
        sample = make_sample()
        assert decimate(sample, 1).equals(sample)

    def test_output_shape(self):
        """Test 23x24580 at 2048 Hz by 4 gives 23x6145 at 512 Hz."""
        sample = SignalSample(
            data=np.zeros((23, 24580)), fs=2048.0, subject_id="a", label=1
        )
        out = decimate(sample, 4)
        assert out.data.shape == (23, 6145)
        assert out.fs == 512.0
        assert out.subject_id == "a"
        assert out.label == 1

    def test_trailing_points_dropped(self):
        """Test points that do not fill a block are dropped."""
        out = decimate(two_rows([1, 1, 3, 3, 9]), 2)
        np.testing.assert_array_equal(out.data[0], [1, 3])

    @pytest.mark.parametrize("factor", [0, -2])
    def test_rejects_non_positive_factor(self, factor, make_sample):
        """Test factor < 1 raises."""
        with pytest.raises(SignalError):
            decimate(make_sample(), factor)

    def test_rejects_factor_above_length(self, make_sample):
        """Test factor > N_t raises."""
        with pytest.raises(SignalError, match="exceeds"):
            decimate(make_sample(n_times=10), 11)

    def test_rejects_single_point_output(self, make_sample):
        """Test a decimation that leaves one point raises."""
        with pytest.raises(SignalError):
            decimate(make_sample(n_times=10), 6)

    def test_composition(self, make_sample):
        """Test decimating by 6 equals decimating by 2 then by 3."""
        sample = make_sample(n_times=120)
        direct = decimate(sample, 6)
        chained = decimate(decimate(sample, 2), 3)
        np.testing.assert_allclose(direct.data, chained.data, rtol=0, atol=1e-12)
        assert direct.fs == chained.fs


class TestPartition:
    """Tests for fixed-window partitioning."""

    def test_three_windows(self, make_sample):
        """Test 100 points at 10 Hz with 3 s windows gives three 30-point windows."""
        sample = make_sample(n_times=100, fs=10.0, subject_id="x", label=1)
        windows = partition(sample, 3.0)
        assert len(windows) == 3
        assert all(w.data.shape == (4, 30) for w in windows)
        assert all(w.subject_id == "x" and w.label == 1 for w in windows)

    def test_windows_concatenate_to_prefix(self, make_sample):
        """Test windows are disjoint, ordered and form a prefix of the input."""
        sample = make_sample(n_times=100, fs=10.0)
        joined = np.concatenate([w.data for w in partition(sample, 3.0)], axis=1)
        np.testing.assert_array_equal(joined, sample.data[:, :90])

    def test_single_full_window(self):
        """Test a 60 s window on a 60 s recording keeps the whole sample."""
        sample = SignalSample(
            data=np.zeros((19, 30000)), fs=500.0, subject_id="a", label=0
        )
        windows = partition(sample, 60.0)
        assert len(windows) == 1
        assert windows[0].data.shape == (19, 30000)

    def test_window_longer_than_recording(self, make_sample):
        """Test an oversized window yields no samples."""
        assert partition(make_sample(n_times=100, fs=10.0), 1000.0) == []

    def test_rejects_degenerate_window(self, make_sample):
        """Test a window shorter than 2 points raises."""
        with pytest.raises(SignalError):
            partition(make_sample(n_times=100, fs=10.0), 0.1)

    def test_window_length_rounds_half_away(self, make_sample):
        """Test window length 2.5 points rounds to 3."""
        windows = partition(make_sample(n_times=10, fs=1.0), 2.5)
        assert [w.n_times for w in windows] == [3, 3, 3]


class TestDatasetBundle:
    """Tests for DatasetBundle."""

    def test_rejects_channel_mismatch(self, make_sample):
        """Test samples must match the declared channel count."""
        with pytest.raises(SignalError, match="channels"):
            DatasetBundle(
                name="b",
                fs=64.0,
                channel_names=["a", "b", "c"],
                samples=[make_sample(n_channels=4)],
            )

    def test_rejects_sampling_rate_mismatch(self, make_sample):
        """Test samples must share the bundle's sampling rate."""
        with pytest.raises(SignalError, match="fs"):
            DatasetBundle(
                name="b",
                fs=128.0,
                channel_names=["a", "b", "c", "d"],
                samples=[make_sample(fs=64.0)],
            )

    def test_subject_registry(self, make_sample):
        """Test subjects map to their sample indices in first-seen order."""
        samples = [
            make_sample(subject_id="b", label=1),
            make_sample(subject_id="a", label=0),
            make_sample(subject_id="b", label=1),
        ]
        bundle = DatasetBundle("b", 64.0, ["w", "x", "y", "z"], samples)
        assert bundle.subjects() == {"b": [0, 2], "a": [1]}
        assert bundle.subject_labels() == {"b": 1, "a": 0}

    def test_curated_drops_unkept(self, make_sample):
        """Test curated() keeps only samples flagged keep."""
        samples = [make_sample(seed=i, keep=i != 1) for i in range(3)]
        bundle = DatasetBundle("b", 64.0, ["w", "x", "y", "z"], samples)
        curated = bundle.curated()
        assert len(curated) == 2
        assert curated.samples[1].equals(samples[2])

    def test_min_n_times_of_empty_bundle(self):
        """Test min_n_times needs samples."""
        bundle = DatasetBundle("b", 64.0, ["x", "y"], [])
        with pytest.raises(SignalError):
            _ = bundle.min_n_times

    def test_decimate_bundle_records_step(self, small_bundle):
        """Test bundle decimation halves fs and records the method."""
        out = decimate_bundle(small_bundle, 2)
        assert out.fs == small_bundle.fs / 2
        assert all(s.n_times == 256 for s in out)
        assert out.history[-1] == {
            "step": "decimate",
            "method": "block_mean",
            "factor": 2,
        }

    def test_partition_bundle(self, small_bundle):
        """Test partitioning multiplies the sample count."""
        out = partition_bundle(small_bundle, 2.0)
        assert len(out) == 4 * len(small_bundle)
        assert out.history[-1]["step"] == "partition"
        assert out.subjects().keys() == small_bundle.subjects().keys()

"""Multivariate signal samples, dataset bundles and their preparation."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
import numpy.typing as npt

from eegres.errors import SignalError

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]


def round_half_away(x: float) -> int:
    """Round to the nearest integer, halves away from zero."""
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


@dataclass(frozen=True, eq=False)
class SignalSample:
    """One channels x time recording with its subject and class label."""

    data: FloatArray
    fs: float
    subject_id: str
    label: int  # 0 = control, 1 = patient
    keep: bool = True

    def __post_init__(self) -> None:
        data = np.array(self.data, dtype=np.float64, copy=True)
        if data.ndim != 2:
            raise SignalError(f"Sample data must be 2-D, got shape {data.shape}")
        n_c, n_t = data.shape
        if n_c < 2 or n_t < 2:
            raise SignalError(f"Sample needs >= 2 channels and times, got {n_c}x{n_t}")
        if not (math.isfinite(self.fs) and self.fs > 0):
            raise SignalError(f"Sampling rate must be positive, got {self.fs}")
        if not np.isfinite(data).all():
            raise SignalError(
                f"Sample of subject {self.subject_id} has non-finite values"
            )
        if self.label not in (0, 1):
            raise SignalError(f"Label must be 0 or 1, got {self.label}")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "fs", float(self.fs))

    @property
    def n_channels(self) -> int:
        return int(self.data.shape[0])

    @property
    def n_times(self) -> int:
        return int(self.data.shape[1])

    @property
    def duration_seconds(self) -> float:
        return self.n_times / self.fs

    def with_data(self, data: FloatArray, fs: float | None = None) -> SignalSample:
        """Copy of this sample with new data, inheriting metadata."""
        return replace(self, data=data, fs=self.fs if fs is None else fs)

    def equals(self, other: SignalSample) -> bool:
        """Exact equality of data and metadata."""
        return (
            self.fs == other.fs
            and self.subject_id == other.subject_id
            and self.label == other.label
            and self.keep == other.keep
            and self.data.shape == other.data.shape
            and bool(np.array_equal(self.data, other.data))
        )


@dataclass(eq=False)
class DatasetBundle:
    """An ordered collection of samples sharing channel layout and rate."""

    name: str
    fs: float
    channel_names: list[str]
    samples: list[SignalSample] = field(default_factory=list)
    # Preparation steps applied so far, e.g. {"step": "decimate", ...}
    history: list[dict[str, Any]] = field(default_factory=list)

    def __post_init__(self) -> None:
        n_c = len(self.channel_names)
        if n_c < 2:
            raise SignalError(f"Bundle {self.name} needs >= 2 channels, got {n_c}")
        for index, sample in enumerate(self.samples):
            if sample.n_channels != n_c:
                raise SignalError(
                    f"Sample {index} has {sample.n_channels} channels, "
                    f"bundle declares {n_c}"
                )
            if sample.fs != self.fs:
                raise SignalError(
                    f"Sample {index} has fs={sample.fs}, bundle declares fs={self.fs}"
                )

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[SignalSample]:
        return iter(self.samples)

    @property
    def n_channels(self) -> int:
        return len(self.channel_names)

    @property
    def min_n_times(self) -> int:
        if not self.samples:
            raise SignalError(f"Bundle {self.name} has no samples")
        return min(s.n_times for s in self.samples)

    def subjects(self) -> dict[str, list[int]]:
        """Subject registry: subject id -> sample indices, in first-seen order."""
        registry: dict[str, list[int]] = {}
        for index, sample in enumerate(self.samples):
            registry.setdefault(sample.subject_id, []).append(index)
        return registry

    def subject_labels(self) -> dict[str, int]:
        """Label of each subject, taken from its first sample."""
        return {
            subject: self.samples[indices[0]].label
            for subject, indices in self.subjects().items()
        }

    def curated(self) -> DatasetBundle:
        """Bundle restricted to samples whose keep flag is set."""
        kept = [s for s in self.samples if s.keep]
        if len(kept) != len(self.samples):
            logger.info(
                f"Curated bundle {self.name}: {len(kept)} of "
                f"{len(self.samples)} samples kept"
            )
        return self.derive(kept)

    def derive(
        self,
        samples: list[SignalSample],
        fs: float | None = None,
        step: dict[str, Any] | None = None,
    ) -> DatasetBundle:
        """New bundle with the same layout and the given samples."""
        history = list(self.history)
        if step is not None:
            history.append(step)
        return DatasetBundle(
            name=self.name,
            fs=self.fs if fs is None else fs,
            channel_names=list(self.channel_names),
            samples=samples,
            history=history,
        )

    def equals(self, other: DatasetBundle) -> bool:
        """Exact equality of layout, metadata and all sample data."""
        return (
            self.name == other.name
            and self.fs == other.fs
            and self.channel_names == other.channel_names
            and len(self.samples) == len(other.samples)
            and all(
                a.equals(b)
                for a, b in zip(self.samples, other.samples, strict=True)
            )
        )


def decimate(sample: SignalSample, factor: int) -> SignalSample:
    """
    Downsample by replacing each block of `factor` points with its mean.

    Trailing points that do not fill a block are dropped. The block mean is a
    crude anti-aliasing filter.
    """
    if factor < 1:
        raise SignalError(f"Decimation factor must be >= 1, got {factor}")
    if factor > sample.n_times:
        raise SignalError(
            f"Decimation factor {factor} exceeds sample length {sample.n_times}"
        )
    if factor == 1:
        return sample

    n_out = sample.n_times // factor
    if n_out < 2:
        raise SignalError(
            f"Decimation by {factor} leaves {n_out} time point(s) of {sample.n_times}"
        )
    blocks = sample.data[:, : n_out * factor].reshape(sample.n_channels, n_out, factor)
    return sample.with_data(blocks.mean(axis=2), fs=sample.fs / factor)


def partition(sample: SignalSample, window_seconds: float) -> list[SignalSample]:
    """
    Split a sample into consecutive non-overlapping windows.

    The window length is round(window_seconds * fs) points; a trailing partial
    window is discarded. A window longer than the recording yields no samples.
    """
    if not (math.isfinite(window_seconds) and window_seconds > 0):
        raise SignalError(f"Window length must be positive, got {window_seconds}")
    length = round_half_away(window_seconds * sample.fs)
    if length < 2:
        raise SignalError(
            f"Window of {window_seconds}s at {sample.fs} Hz has {length} point(s)"
        )

    n_windows = sample.n_times // length
    return [
        sample.with_data(sample.data[:, i * length : (i + 1) * length])
        for i in range(n_windows)
    ]


def decimate_bundle(bundle: DatasetBundle, factor: int) -> DatasetBundle:
    """Decimate every sample of a bundle and record the step."""
    samples = [decimate(s, factor) for s in bundle.samples]
    logger.info(f"Decimated {len(samples)} samples of {bundle.name} by {factor}")
    return bundle.derive(
        samples,
        fs=bundle.fs / factor,
        step={"step": "decimate", "method": "block_mean", "factor": factor},
    )


def partition_bundle(bundle: DatasetBundle, window_seconds: float) -> DatasetBundle:
    """Partition every sample of a bundle into fixed windows and record the step."""
    samples = [w for s in bundle.samples for w in partition(s, window_seconds)]
    logger.info(
        f"Partitioned {len(bundle)} samples of {bundle.name} into "
        f"{len(samples)} windows of {window_seconds:g}s"
    )
    return bundle.derive(
        samples,
        step={"step": "partition", "window_seconds": window_seconds},
    )

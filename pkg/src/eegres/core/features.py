"""Spectro-temporal feature extraction: segmentation, per-segment PSD, pooling.

Temporal grouping uses the floor index j // (n_seg // n_t_feat). The divisor is
the number of segments; dividing by the segment length instead does not
partition the segments into n_t_feat groups. Segments past the last full group
are clamped into the last group.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from numpy.lib.stride_tricks import sliding_window_view

from eegres.core.signals import FloatArray, SignalSample, round_half_away
from eegres.errors import FeatureError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FeatureConfig:
    """Spectral x temporal x spatial feature counts under a fixed budget."""

    n_f_feat: int
    n_t_feat: int
    n_g_feat: int
    f_max: float = 45.0

    def __post_init__(self) -> None:
        if min(self.n_f_feat, self.n_t_feat, self.n_g_feat) < 1:
            raise FeatureError(f"Feature counts must be >= 1, got {self.triple}")
        if not self.f_max > 0:
            raise FeatureError(f"f_max must be positive, got {self.f_max}")

    @property
    def n_feat_budget(self) -> int:
        return self.n_f_feat * self.n_t_feat * self.n_g_feat

    @property
    def triple(self) -> tuple[int, int, int]:
        return (self.n_f_feat, self.n_t_feat, self.n_g_feat)

    @property
    def key(self) -> str:
        """Compact label such as '60x1x1'."""
        return "x".join(str(n) for n in self.triple)


@dataclass(frozen=True, eq=False)
class SegmentTensor:
    """Half-overlapping segments, shape N_c x N_seg x N_t_seg."""

    values: FloatArray
    fs: float

    @property
    def n_segments(self) -> int:
        return int(self.values.shape[1])

    @property
    def segment_length(self) -> int:
        return int(self.values.shape[2])


@dataclass(frozen=True, eq=False)
class PsdTensor:
    """Per-segment power spectra, shape N_c x N_seg x N_f_feat."""

    values: FloatArray


@dataclass(frozen=True, eq=False)
class PooledTensor:
    """Tensor with one axis replaced by a group axis.

    Axis order stays channel/group, segment/time-group, frequency.
    """

    values: FloatArray


@dataclass(frozen=True, eq=False)
class AssignmentMatrix:
    """Group-averaging matrix n_in x n_out; right-multiplication averages groups."""

    values: FloatArray
    group_index: tuple[int, ...]

    @property
    def n_in(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_out(self) -> int:
        return int(self.values.shape[1])

    @property
    def group_sizes(self) -> list[int]:
        return np.bincount(self.group_index, minlength=self.n_out).tolist()

    @classmethod
    def from_groups(
        cls, group_index: list[int] | tuple[int, ...], n_groups: int
    ) -> AssignmentMatrix:
        """Build the averaging matrix of a surjective group index."""
        index = np.asarray(group_index, dtype=np.intp)
        if index.size and (index.min() < 0 or index.max() >= n_groups):
            raise FeatureError(f"Group index out of range 0..{n_groups - 1}")
        sizes = np.bincount(index, minlength=n_groups)
        if (sizes == 0).any():
            empty = np.flatnonzero(sizes == 0).tolist()
            raise FeatureError(f"Empty group(s): {empty}")
        values = np.zeros((index.size, n_groups))
        values[np.arange(index.size), index] = 1.0 / sizes[index]
        values.flags.writeable = False
        return cls(values=values, group_index=tuple(int(g) for g in index))


def segment_length(n_f_feat: int, fs: float, f_max: float) -> int:
    """Segment length giving n_f_feat bins up to f_max: [n_f_feat * fs / f_max]."""
    if n_f_feat < 1 or not fs > 0 or not f_max > 0:
        raise FeatureError(
            f"Arguments must be positive: n_f_feat={n_f_feat}, fs={fs}, f_max={f_max}"
        )
    length = round_half_away(n_f_feat * fs / f_max)
    if length < 2:
        raise FeatureError(
            f"Degenerate segment length {length} for n_f_feat={n_f_feat}, "
            f"fs={fs}, f_max={f_max}"
        )
    return length


def segment_count(n_times: int, n_t_seg: int) -> int:
    """Number of complete half-overlapping segments of length n_t_seg."""
    if n_t_seg < 2 or n_t_seg > n_times:
        return 0
    return (n_times - n_t_seg) // (n_t_seg // 2) + 1


def segment(sample: SignalSample, n_t_seg: int) -> SegmentTensor:
    """Cut a sample into segments of n_t_seg points overlapping by half."""
    if n_t_seg < 2:
        raise FeatureError(f"Segment length must be >= 2, got {n_t_seg}")
    if n_t_seg > sample.n_times:
        raise FeatureError(
            f"Segment length {n_t_seg} exceeds sample length {sample.n_times}"
        )
    hop = n_t_seg // 2
    n_seg = segment_count(sample.n_times, n_t_seg)
    windows = sliding_window_view(sample.data, n_t_seg, axis=1)[:, ::hop][:, :n_seg]
    return SegmentTensor(values=windows, fs=sample.fs)


def hanning_window(n: int) -> FloatArray:
    """Hanning window scaled by 1/n: w_i = sin(i*pi/(n-1))^2 / n."""
    if n < 2:
        raise FeatureError(f"Window length must be >= 2, got {n}")
    i = np.arange(n)
    w: FloatArray = np.sin(i * np.pi / (n - 1)) ** 2 / n
    # exact zeros and symmetry regardless of sin rounding at pi
    w[0] = w[-1] = 0.0
    w = 0.5 * (w + w[::-1])
    return w


def dft_matrix(n: int, n_bins: int) -> npt.NDArray[np.complex128]:
    """First n_bins columns of the n-point DFT matrix, exp(-2*pi*i*k*m/n)."""
    k = np.arange(n)[:, None]
    m = np.arange(n_bins)[None, :]
    # reduce k*m modulo n before scaling for accurate phases
    return np.exp(-2j * np.pi * ((k * m) % n) / n)


def psd(segments: SegmentTensor, n_f_feat: int) -> PsdTensor:
    """
    Hanning-windowed power spectrum of every segment, not averaged over segments.

    Bins 0..n_f_feat-1 of the DFT (DC included), squared magnitude divided by
    the window energy sum(w^2).
    """
    n = segments.segment_length
    if n_f_feat < 1:
        raise FeatureError(f"n_f_feat must be >= 1, got {n_f_feat}")
    if n_f_feat > n:
        raise FeatureError(f"n_f_feat={n_f_feat} exceeds segment length {n}")

    w = hanning_window(n)
    windowed = segments.values * w
    spectrum = windowed @ dft_matrix(n, n_f_feat)
    power = (spectrum.real**2 + spectrum.imag**2) / np.sum(w**2)
    return PsdTensor(values=power)


def temporal_group_index(j: int, n_seg: int, n_t_feat: int) -> int:
    """Temporal group of segment j: min(j // (n_seg // n_t_feat), n_t_feat - 1)."""
    if not 1 <= n_t_feat <= n_seg:
        raise FeatureError(
            f"Need 1 <= n_t_feat <= n_seg, got n_t_feat={n_t_feat}, n_seg={n_seg}"
        )
    if not 0 <= j < n_seg:
        raise FeatureError(f"Segment index {j} out of range 0..{n_seg - 1}")
    return min(j // (n_seg // n_t_feat), n_t_feat - 1)


def temporal_assignment(n_seg: int, n_t_feat: int) -> AssignmentMatrix:
    """Averaging matrix mapping n_seg segments onto n_t_feat temporal groups."""
    groups = [temporal_group_index(j, n_seg, n_t_feat) for j in range(n_seg)]
    return AssignmentMatrix.from_groups(groups, n_t_feat)


def pool_temporal(
    psd_tensor: PsdTensor | PooledTensor, s: AssignmentMatrix
) -> PooledTensor:
    """Average segments within temporal groups: out[i,m,n] = sum_j x[i,j,n] s[j,m]."""
    values = psd_tensor.values
    if values.ndim != 3 or values.shape[1] != s.n_in:
        raise FeatureError(
            f"Segment axis of length {values.shape[1] if values.ndim == 3 else '?'} "
            f"does not match assignment of {s.n_in} inputs"
        )
    return PooledTensor(values=np.einsum("ijn,jm->imn", values, s.values))


def spectro_temporal(sample: SignalSample, config: FeatureConfig) -> PooledTensor:
    """Segment, PSD and temporal pooling of one sample (channels kept)."""
    n_t_seg = segment_length(config.n_f_feat, sample.fs, config.f_max)
    segments = segment(sample, n_t_seg)
    if config.n_t_feat > segments.n_segments:
        raise FeatureError(
            f"n_t_feat={config.n_t_feat} exceeds {segments.n_segments} segments"
        )
    spectra = psd(segments, config.n_f_feat)
    assignment = temporal_assignment(segments.n_segments, config.n_t_feat)
    return pool_temporal(spectra, assignment)


def flatten(tensor: PooledTensor) -> FloatArray:
    """Row-major flattening: spatial-major, then temporal, then spectral."""
    flat: FloatArray = np.ascontiguousarray(tensor.values).reshape(-1)
    return flat

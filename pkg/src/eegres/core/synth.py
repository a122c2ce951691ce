"""Synthetic datasets with class structure planted in one feature dimension."""

from __future__ import annotations

import logging
import math
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import signal

from eegres.core.signals import DatasetBundle, FloatArray, SignalSample

logger = logging.getLogger(__name__)

BASELINE_CORRELATION = 0.4
BASELINE_CUTOFF_HZ = 40.0
EFFECT_BAND_HZ = (8.0, 12.0)
LOWPASS_TAPS = 33
BANDPASS_TAPS = 129


class EffectDimension(Enum):
    """Feature dimension that carries the class difference."""

    SPECTRAL = "spectral"
    SPATIAL = "spatial"
    TEMPORAL = "temporal"
    NONE = "none"


class SynthSpec(BaseModel):
    """Parameters of a synthetic two-class dataset."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "synthetic"
    n_subjects_per_class: int = Field(default=10, ge=1)
    samples_per_subject: int = Field(default=2, ge=1)
    n_channels: int = Field(default=8, ge=2)
    n_times: int = Field(default=2048, ge=2)
    fs: float = Field(default=128.0, ge=32.0)
    effect_dimension: EffectDimension = EffectDimension.NONE
    effect_size: float = Field(default=0.0, ge=0.0, allow_inf_nan=False)
    seed: int = Field(default=0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def _spatial_needs_blocks(self) -> SynthSpec:
        if self.effect_dimension is EffectDimension.SPATIAL and self.n_channels < 3:
            raise ValueError("A spatial effect needs at least 3 channels")
        return self

    @property
    def strength(self) -> float:
        """Effect size mapped into [0, 1)."""
        return self.effect_size / (1.0 + self.effect_size)


def _unit_taps(taps: FloatArray) -> FloatArray:
    # unit energy so that filtered white noise keeps unit variance
    return taps / np.linalg.norm(taps)


def _filtered_noise(
    rng: np.random.Generator, taps: FloatArray, n_rows: int, n_times: int
) -> FloatArray:
    warmup = len(taps) - 1
    white = rng.standard_normal((n_rows, n_times + warmup))
    filtered: FloatArray = signal.lfilter(taps, 1.0, white, axis=1)
    return filtered[:, warmup:]


def equicorrelation(n_channels: int, rho: float) -> FloatArray:
    """Correlation matrix with a common off-diagonal value."""
    c = np.full((n_channels, n_channels), rho)
    np.fill_diagonal(c, 1.0)
    return c


def block_correlation(n_channels: int, within: float, between: float) -> FloatArray:
    """Two-block correlation: channels [0, n/2) and [n/2, n)."""
    half = n_channels // 2
    in_a = np.arange(n_channels) < half
    same_block = in_a[:, None] == in_a[None, :]
    c = np.where(same_block, within, between)
    np.fill_diagonal(c, 1.0)
    return c


def matched_block_correlation(
    n_channels: int, rho: float, strength: float
) -> FloatArray:
    """
    Two-block correlation with the squared-correlation sum of equicorrelation.

    Between-block correlation falls to rho * (1 - strength); within-block
    correlation rises so that sum(C**2) equals that of equicorrelation(n, rho).
    Channel-summed power of Gaussian channels mixed by either matrix then has
    the same mean and autocovariance. Strength 0 gives equicorrelation.
    """
    n_a = n_channels // 2
    n_b = n_channels - n_a
    within_pairs = n_a * (n_a - 1) + n_b * (n_b - 1)
    between_pairs = 2 * n_a * n_b
    if within_pairs == 0:
        raise ValueError(f"Two blocks need at least 3 channels, got {n_channels}")
    between = rho * (1.0 - strength)
    within = math.sqrt(
        (n_channels * (n_channels - 1) * rho**2 - between_pairs * between**2)
        / within_pairs
    )
    return block_correlation(n_channels, within=within, between=between)


def _mixing(correlation: FloatArray) -> FloatArray:
    n = correlation.shape[0]
    return np.linalg.cholesky(correlation + 1e-12 * np.eye(n))


class _Generator:
    """Draws samples for both classes of one SynthSpec."""

    def __init__(self, spec: SynthSpec) -> None:
        self.spec = spec
        self.rng = np.random.default_rng(spec.seed)
        fs = spec.fs
        self.lowpass = _unit_taps(
            signal.firwin(LOWPASS_TAPS, min(BASELINE_CUTOFF_HZ, 0.4 * fs), fs=fs)
        )
        self.bandpass = _unit_taps(
            signal.firwin(BANDPASS_TAPS, EFFECT_BAND_HZ, pass_zero=False, fs=fs)
        )
        n_c = spec.n_channels
        self.uniform = _mixing(equicorrelation(n_c, BASELINE_CORRELATION))
        self.blocks: FloatArray | None = None
        if spec.effect_dimension is EffectDimension.SPATIAL:
            self.blocks = _mixing(
                matched_block_correlation(n_c, BASELINE_CORRELATION, spec.strength)
            )

    def _baseline(self, mixing: FloatArray) -> FloatArray:
        spec = self.spec
        sources = _filtered_noise(self.rng, self.lowpass, spec.n_channels, spec.n_times)
        mixed: FloatArray = mixing @ sources
        return mixed

    def draw(self, label: int) -> FloatArray:
        spec = self.spec
        effect = spec.effect_dimension
        if label == 0 or effect is EffectDimension.NONE:
            return self._baseline(self.uniform)

        t = spec.strength
        if effect is EffectDimension.SPECTRAL:
            base = self._baseline(self.uniform)
            band = self.uniform @ _filtered_noise(
                self.rng, self.bandpass, spec.n_channels, spec.n_times
            )
            # band power replaces broadband power; total power is unchanged
            return np.sqrt(1.0 - t) * base + np.sqrt(t) * band

        if effect is EffectDimension.SPATIAL:
            assert self.blocks is not None
            return self._baseline(self.blocks)

        # temporal
        x = self._baseline(self.uniform)
        half = spec.n_times // 2
        envelope = np.empty(spec.n_times)
        envelope[:half] = np.sqrt(1.0 + t)
        envelope[half:] = np.sqrt(1.0 - t)
        return x * envelope[None, :]


def synthesize(spec: SynthSpec) -> DatasetBundle:
    """
    Generate a deterministic two-class dataset.

    Baseline: unit-variance low-pass noise with equicorrelated channels.
    Class 1 additionally carries the effect of `spec.effect_dimension`:
    - spectral: power moved into the 8-12 Hz band, total power preserved
    - spatial: two-block correlation with unit power per channel and the
      squared-correlation sum of the baseline
    - temporal: more power in the first half than in the second half
    An effect size of 0 makes both classes identically distributed.
    """
    generator = _Generator(spec)
    samples: list[SignalSample] = []
    for label, prefix in ((0, "ctrl"), (1, "pat")):
        for subject in range(spec.n_subjects_per_class):
            subject_id = f"{prefix}{subject:03d}"
            for _ in range(spec.samples_per_subject):
                samples.append(
                    SignalSample(
                        data=generator.draw(label),
                        fs=spec.fs,
                        subject_id=subject_id,
                        label=label,
                    )
                )

    logger.info(
        f"Synthesized {len(samples)} samples ({spec.effect_dimension.value} "
        f"effect, size {spec.effect_size:g}, seed {spec.seed})"
    )
    return DatasetBundle(
        name=spec.name,
        fs=spec.fs,
        channel_names=[f"ch{i:02d}" for i in range(spec.n_channels)],
        samples=samples,
        history=[{"step": "synthesize", **spec.model_dump(mode="json")}],
    )

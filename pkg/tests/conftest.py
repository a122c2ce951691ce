"""Pytest configuration and shared fixtures."""

import os
from collections.abc import Callable, Generator
from pathlib import Path

import numpy as np
import pytest

from eegres.config.settings import Settings, get_settings
from eegres.core.signals import DatasetBundle, SignalSample
from eegres.core.synth import EffectDimension, SynthSpec, synthesize

# ============================================================================
# Settings
# ============================================================================


@pytest.fixture(autouse=True)
def clean_settings(
    monkeypatch: pytest.MonkeyPatch, tmp_path: Path
) -> Generator[None, None, None]:
    """Isolate every test from EEGRES_* variables and any local .env file."""
    for key in list(os.environ):
        if key.startswith("EEGRES_"):
            monkeypatch.delenv(key)
    monkeypatch.chdir(tmp_path)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def test_settings() -> Settings:
    """Default settings with two workers."""
    settings = Settings()
    settings.sweep.workers = 2
    return settings


# ============================================================================
# Samples and bundles
# ============================================================================


@pytest.fixture
def make_sample() -> Callable[..., SignalSample]:
    """Factory for random samples."""

    def _make(
        n_channels: int = 4,
        n_times: int = 256,
        fs: float = 64.0,
        subject_id: str = "s000",
        label: int = 0,
        seed: int = 0,
        keep: bool = True,
    ) -> SignalSample:
        rng = np.random.default_rng(seed)
        return SignalSample(
            data=rng.standard_normal((n_channels, n_times)),
            fs=fs,
            subject_id=subject_id,
            label=label,
            keep=keep,
        )

    return _make


@pytest.fixture
def small_spec() -> SynthSpec:
    """Six subjects per class, two samples each, no class effect."""
    return SynthSpec(
        name="small",
        n_subjects_per_class=6,
        samples_per_subject=2,
        n_channels=4,
        n_times=512,
        fs=64.0,
        effect_dimension=EffectDimension.NONE,
        effect_size=0.0,
        seed=7,
    )


@pytest.fixture
def small_bundle(small_spec: SynthSpec) -> DatasetBundle:
    """Synthetic bundle of 24 samples, 4 channels x 512 points at 64 Hz."""
    return synthesize(small_spec)


@pytest.fixture
def separable_bundle() -> DatasetBundle:
    """Class 1 samples carry ten times the amplitude of class 0 samples."""
    rng = np.random.default_rng(11)
    samples = []
    for label in (0, 1):
        for subject in range(6):
            for _ in range(2):
                scale = 10.0 if label else 1.0
                samples.append(
                    SignalSample(
                        data=scale * rng.standard_normal((4, 256)),
                        fs=64.0,
                        subject_id=f"{'pat' if label else 'ctrl'}{subject:03d}",
                        label=label,
                    )
                )
    return DatasetBundle(
        name="separable",
        fs=64.0,
        channel_names=[f"ch{i:02d}" for i in range(4)],
        samples=samples,
    )


# ============================================================================
# Temporary Files
# ============================================================================


@pytest.fixture
def bundle_dir(tmp_path: Path) -> Path:
    """Temporary bundle directory path."""
    return tmp_path / "bundle"


@pytest.fixture
def report_dir(tmp_path: Path) -> Path:
    """Temporary report directory path."""
    return tmp_path / "report"

"""On-disk dataset bundles: manifest.json plus little-endian float32 payloads."""

from __future__ import annotations

import json
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any, Literal

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from eegres.core.features import PooledTensor
from eegres.core.signals import DatasetBundle, SignalSample
from eegres.errors import BundleError, SignalError

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
TENSOR_INDEX_NAME = "tensors.json"
PAYLOAD_DTYPE = np.dtype("<f4")
PAYLOAD_SUFFIX = ".f32"


class SampleEntry(BaseModel):
    """Manifest record of one sample payload."""

    model_config = ConfigDict(extra="forbid")

    file: str
    subject_id: str
    label: Literal[0, 1]
    n_time: int = Field(ge=2)
    keep: bool = True


class Manifest(BaseModel):
    """Bundle manifest."""

    model_config = ConfigDict(extra="forbid")

    name: str
    fs: float = Field(gt=0, allow_inf_nan=False)
    n_channels: int = Field(ge=2)
    channel_names: list[str]
    samples: list[SampleEntry] = Field(default_factory=list)
    history: list[dict[str, Any]] = Field(default_factory=list)

    @model_validator(mode="after")
    def _channel_names_match(self) -> Manifest:
        if len(self.channel_names) != self.n_channels:
            raise ValueError(
                f"{len(self.channel_names)} channel names for "
                f"{self.n_channels} channels"
            )
        return self


def _payload_name(index: int) -> str:
    return f"sample_{index:05d}{PAYLOAD_SUFFIX}"


def load_bundle(path: Path) -> DatasetBundle:
    """
    Read a bundle directory, samples in manifest order.

    Raises:
        BundleError: On a missing or malformed manifest, a payload whose size
            differs from n_channels * n_time, or non-finite values
    """
    path = Path(path)
    manifest_path = path / MANIFEST_NAME
    if not manifest_path.is_file():
        raise BundleError(f"Missing manifest: {manifest_path}")
    try:
        manifest = Manifest.model_validate_json(manifest_path.read_text())
    except ValidationError as e:
        raise BundleError(f"Invalid manifest {manifest_path}: {e}") from e

    samples: list[SignalSample] = []
    for entry in manifest.samples:
        payload = path / entry.file
        if not payload.is_file():
            raise BundleError(f"Missing payload file: {payload}")
        values = np.fromfile(payload, dtype=PAYLOAD_DTYPE)
        expected = manifest.n_channels * entry.n_time
        if values.size != expected:
            raise BundleError(
                f"Payload size mismatch in {payload}: {values.size} values, "
                f"expected {manifest.n_channels}x{entry.n_time}={expected}"
            )
        if not np.isfinite(values).all():
            raise BundleError(f"Non-finite values in {payload}")
        try:
            samples.append(
                SignalSample(
                    data=values.astype(np.float64).reshape(
                        manifest.n_channels, entry.n_time
                    ),
                    fs=manifest.fs,
                    subject_id=entry.subject_id,
                    label=entry.label,
                    keep=entry.keep,
                )
            )
        except SignalError as e:
            raise BundleError(f"Invalid sample {payload}: {e.message}") from e

    logger.info(
        f"Loaded bundle {manifest.name} with {len(samples)} samples from {path}"
    )
    try:
        return DatasetBundle(
            name=manifest.name,
            fs=manifest.fs,
            channel_names=manifest.channel_names,
            samples=samples,
            history=manifest.history,
        )
    except SignalError as e:
        raise BundleError(f"Invalid bundle {path}: {e.message}") from e


def save_bundle(bundle: DatasetBundle, path: Path) -> None:
    """
    Write a bundle directory; sample data is stored as float32.

    Raises:
        BundleError: If the directory or files cannot be written
    """
    path = Path(path)
    entries = [
        SampleEntry(
            file=_payload_name(index),
            subject_id=sample.subject_id,
            label=1 if sample.label else 0,
            n_time=sample.n_times,
            keep=sample.keep,
        )
        for index, sample in enumerate(bundle.samples)
    ]
    manifest = Manifest(
        name=bundle.name,
        fs=bundle.fs,
        n_channels=bundle.n_channels,
        channel_names=bundle.channel_names,
        samples=entries,
        history=bundle.history,
    )
    try:
        path.mkdir(parents=True, exist_ok=True)
        for entry, sample in zip(entries, bundle.samples, strict=True):
            # row-major: channel after channel
            np.ascontiguousarray(sample.data, dtype=PAYLOAD_DTYPE).tofile(
                path / entry.file
            )
        (path / MANIFEST_NAME).write_text(manifest.model_dump_json(indent=2))
    except OSError as e:
        raise BundleError(f"Cannot write bundle to {path}: {e}") from e
    logger.info(f"Saved bundle {bundle.name} with {len(bundle)} samples to {path}")


def read_csv_sample(
    file: Path, fs: float, subject_id: str, label: int
) -> tuple[list[str], SignalSample]:
    """One sample from a CSV file: header of channel names, one row per time point."""
    try:
        frame = pd.read_csv(file)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise BundleError(f"Cannot read CSV {file}: {e}") from e
    try:
        data = frame.to_numpy(dtype=np.float64).T
    except ValueError as e:
        raise BundleError(f"Non-numeric values in {file}: {e}") from e
    try:
        sample = SignalSample(data=data, fs=fs, subject_id=subject_id, label=label)
    except SignalError as e:
        raise BundleError(f"Invalid sample in {file}: {e.message}") from e
    return [str(c) for c in frame.columns], sample


def import_csv(
    files: Sequence[Path],
    fs: float,
    subject_id: str,
    label: int,
    name: str = "imported",
    existing: DatasetBundle | None = None,
) -> DatasetBundle:
    """
    Build a bundle from CSV files of one subject, appending to `existing`.

    Raises:
        BundleError: If files are unreadable or their channels disagree
    """
    channel_names = list(existing.channel_names) if existing is not None else None
    samples = list(existing.samples) if existing is not None else []
    for file in files:
        columns, sample = read_csv_sample(Path(file), fs, subject_id, label)
        if channel_names is None:
            channel_names = columns
        elif columns != channel_names:
            raise BundleError(
                f"Channels of {file} ({columns}) differ from the bundle's "
                f"({channel_names})"
            )
        samples.append(sample)

    if channel_names is None:
        raise BundleError("No CSV files given")
    logger.info(f"Imported {len(files)} CSV file(s) for subject {subject_id}")
    step = {"step": "import_csv", "subject_id": subject_id, "files": len(files)}
    try:
        if existing is not None:
            return existing.derive(samples, step=step)
        return DatasetBundle(
            name=name,
            fs=fs,
            channel_names=channel_names,
            samples=samples,
            history=[step],
        )
    except SignalError as e:
        raise BundleError(f"Cannot import CSV files: {e.message}") from e


def dump_tensors(
    tensors: Sequence[PooledTensor],
    samples: Sequence[SignalSample],
    path: Path,
    config_key: str,
) -> None:
    """Write feature tensors as float32 payloads with a JSON index."""
    path = Path(path)
    index = []
    try:
        path.mkdir(parents=True, exist_ok=True)
        for i, (tensor, sample) in enumerate(zip(tensors, samples, strict=True)):
            file = f"tensor_{i:05d}{PAYLOAD_SUFFIX}"
            np.ascontiguousarray(tensor.values, dtype=PAYLOAD_DTYPE).tofile(path / file)
            index.append(
                {
                    "file": file,
                    "subject_id": sample.subject_id,
                    "label": sample.label,
                    "shape": list(tensor.values.shape),
                }
            )
        (path / TENSOR_INDEX_NAME).write_text(
            json.dumps({"config": config_key, "tensors": index}, indent=2)
        )
    except OSError as e:
        raise BundleError(f"Cannot write tensors to {path}: {e}") from e
    logger.info(f"Wrote {len(index)} {config_key} tensors to {path}")

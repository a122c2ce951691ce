"""Command handlers for the eegres CLI."""

from __future__ import annotations

import argparse
import logging
from collections.abc import Callable, Coroutine
from pathlib import Path
from typing import TYPE_CHECKING, Any

import pydantic

from eegres.config.validation import ConfigValidator, ValidationError
from eegres.core.evaluation import (
    evaluate_config,
    folds_for_bundle,
    grid_for_bundle,
    run_sweep,
)
from eegres.core.features import FeatureConfig, spectro_temporal
from eegres.core.signals import DatasetBundle, decimate_bundle, partition_bundle
from eegres.core.synth import SynthSpec, synthesize
from eegres.infra.bundle_store import (
    MANIFEST_NAME,
    dump_tensors,
    import_csv,
    load_bundle,
    save_bundle,
)
from eegres.services.reports import export_report, load_result, write_edge_csv

if TYPE_CHECKING:
    from eegres.app import Container

logger = logging.getLogger(__name__)

Handler = Callable[["Container", argparse.Namespace], Coroutine[Any, Any, None]]


def _feature_config(text: str, f_max: float) -> FeatureConfig:
    return FeatureConfig(*ConfigValidator.parse_triple(text), f_max=f_max)


def _curated(path: Path) -> DatasetBundle:
    return load_bundle(path).curated()


async def cmd_synth(container: Container, args: argparse.Namespace) -> None:
    """Generate a synthetic bundle from a JSON SynthSpec."""
    spec_path = Path(args.spec)
    if not spec_path.is_file():
        raise ValidationError(f"Synth spec not found: {spec_path}")
    try:
        spec = SynthSpec.model_validate_json(spec_path.read_text())
    except pydantic.ValidationError as e:
        raise ValidationError(f"Invalid synth spec {spec_path}: {e}") from e
    save_bundle(synthesize(spec), args.out)


async def cmd_import_csv(container: Container, args: argparse.Namespace) -> None:
    """Import CSV samples of one subject, appending to an existing bundle."""
    out = Path(args.out)
    existing = load_bundle(out) if (out / MANIFEST_NAME).is_file() else None
    bundle = import_csv(
        [Path(f) for f in args.files],
        fs=args.fs,
        subject_id=args.subject,
        label=args.label,
        name=args.name,
        existing=existing,
    )
    save_bundle(bundle, out)


async def cmd_decimate(container: Container, args: argparse.Namespace) -> None:
    save_bundle(decimate_bundle(load_bundle(args.bundle), args.factor), args.out)


async def cmd_partition(container: Container, args: argparse.Namespace) -> None:
    bundle = partition_bundle(load_bundle(args.bundle), args.window_seconds)
    save_bundle(bundle, args.out)


async def cmd_sweep(container: Container, args: argparse.Namespace) -> None:
    """Cross-validate every feasible configuration and write the report."""
    container.override(
        {
            "feature.budget": args.budget,
            "feature.f_max": args.fmax,
            "cv.folds": args.folds,
            "cv.seed": args.seed,
            "sweep.workers": args.workers,
            "sweep.diagnostics": True if args.diagnostics else None,
        }
    )
    settings = container.settings
    bundle = _curated(args.bundle)
    grid = grid_for_bundle(bundle, settings.feature.budget, settings.feature.f_max)
    folds = folds_for_bundle(bundle, settings.cv.folds, settings.cv.seed)

    result = await run_sweep(bundle, grid, folds, settings=settings)
    result.metadata.update(container.metadata())
    export_report(result, args.out)

    summary = result.summary()
    print(f"configs: {summary['n_configs']} (failed: {summary['n_failed']})")
    if summary["best"] is not None:
        best = summary["best"]
        print(f"best: {best['config']} accuracy {best['accuracy']:.4f}")


async def cmd_edge(container: Container, args: argparse.Namespace) -> None:
    """Write the triangle-edge accuracy path of a saved sweep."""
    points = write_edge_csv(load_result(args.result), args.out)
    logger.info(f"Wrote {len(points)} edge points to {args.out}")


async def cmd_eval(container: Container, args: argparse.Namespace) -> None:
    """Print per-fold accuracies of the given configurations."""
    container.override(
        {"cv.folds": args.folds, "cv.seed": args.seed, "feature.f_max": args.fmax}
    )
    settings = container.settings
    bundle = _curated(args.bundle)
    folds = folds_for_bundle(bundle, settings.cv.folds, settings.cv.seed)
    for text in args.config:
        config = _feature_config(text, settings.feature.f_max)
        evaluation = evaluate_config(bundle, config, folds, settings=settings)
        accuracies = " ".join(f"{a:.6f}" for a in evaluation.accuracies)
        print(f"{config.key} mean {evaluation.mean_accuracy:.6f} folds {accuracies}")


async def cmd_features(container: Container, args: argparse.Namespace) -> None:
    """Dump the temporally pooled tensors of one configuration."""
    container.override({"feature.f_max": args.fmax})
    bundle = _curated(args.bundle)
    config = _feature_config(args.config, container.settings.feature.f_max)
    tensors = [spectro_temporal(s, config) for s in bundle]
    dump_tensors(tensors, bundle.samples, args.out, config.key)


COMMANDS: dict[str, Handler] = {
    "synth": cmd_synth,
    "import-csv": cmd_import_csv,
    "decimate": cmd_decimate,
    "partition": cmd_partition,
    "sweep": cmd_sweep,
    "edge": cmd_edge,
    "eval": cmd_eval,
    "features": cmd_features,
}

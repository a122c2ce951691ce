"""Resolution-configuration sweep with subject-grouped cross-validation."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from datetime import UTC, datetime
from enum import Enum
from typing import TYPE_CHECKING, Any

import numpy as np

from eegres.config.settings import get_settings
from eegres.core.features import (
    FeatureConfig,
    PooledTensor,
    flatten,
    segment_count,
    segment_length,
    spectro_temporal,
)
from eegres.core.graph import GraphPooling
from eegres.core.signals import DatasetBundle, FloatArray, SignalSample
from eegres.core.svm import KernelParams, SvmModel, rbf_gamma, train
from eegres.errors import FeatureError, FoldError, GridError
from eegres.infra.scheduler import TaskScheduler

if TYPE_CHECKING:
    from eegres.config.settings import Settings

logger = logging.getLogger(__name__)

Triple = tuple[int, int, int]


# =============================================================================
# Configuration grid
# =============================================================================


def divisor_triples(budget: int) -> list[Triple]:
    """All ordered positive triples with product `budget`, lexicographic."""
    if budget < 1:
        raise GridError(f"Feature budget must be >= 1, got {budget}")
    divisors = [d for d in range(1, budget + 1) if budget % d == 0]
    return [
        (n_f, n_t, budget // (n_f * n_t))
        for n_f in divisors
        for n_t in divisors
        if (budget // n_f) % n_t == 0
    ]


@dataclass(frozen=True)
class ConfigGrid:
    """Feasible configurations of one budget for one dataset."""

    budget: int
    configs: tuple[FeatureConfig, ...]
    n_channels: int
    fs: float
    f_max: float
    min_n_times: int

    def __len__(self) -> int:
        return len(self.configs)

    @property
    def triples(self) -> list[Triple]:
        return [c.triple for c in self.configs]

    def to_dict(self) -> dict[str, Any]:
        return {
            "budget": self.budget,
            "n_channels": self.n_channels,
            "fs": self.fs,
            "f_max": self.f_max,
            "min_n_times": self.min_n_times,
            "configs": [list(t) for t in self.triples],
        }


def config_feasible(
    triple: Triple, n_c: int, min_n_t: int, fs: float, f_max: float
) -> bool:
    """Whether a triple can be extracted from every sample of a dataset."""
    n_f, n_t, n_g = triple
    if n_g > n_c:
        return False
    try:
        n_t_seg = segment_length(n_f, fs, f_max)
    except FeatureError:
        return False
    return n_t_seg <= min_n_t and n_f <= n_t_seg and n_t <= segment_count(
        min_n_t, n_t_seg
    )


def enumerate_configs(
    budget: int, n_c: int, min_n_t: int, fs: float, f_max: float
) -> ConfigGrid:
    """
    Every feasible (n_f, n_t, n_g) with n_f * n_t * n_g = budget, sorted.

    Raises:
        GridError: If no triple is feasible
    """
    feasible = [
        t
        for t in divisor_triples(budget)
        if config_feasible(t, n_c, min_n_t, fs, f_max)
    ]
    if not feasible:
        raise GridError(
            f"No feasible configuration for budget {budget} "
            f"(n_c={n_c}, min_n_t={min_n_t}, fs={fs}, f_max={f_max})"
        )
    logger.info(f"Feature budget {budget}: {len(feasible)} feasible configurations")
    return ConfigGrid(
        budget=budget,
        configs=tuple(FeatureConfig(*t, f_max=f_max) for t in feasible),
        n_channels=n_c,
        fs=fs,
        f_max=f_max,
        min_n_times=min_n_t,
    )


def grid_for_bundle(bundle: DatasetBundle, budget: int, f_max: float) -> ConfigGrid:
    """Configuration grid constrained by a bundle's layout."""
    return enumerate_configs(
        budget, bundle.n_channels, bundle.min_n_times, bundle.fs, f_max
    )


# =============================================================================
# Subject-grouped folds
# =============================================================================


@dataclass(frozen=True)
class FoldSpec:
    """Fold of every subject; all samples of a subject share its fold."""

    fold_assignments: dict[str, int]
    k: int
    seed: int

    def __post_init__(self) -> None:
        used = set(self.fold_assignments.values())
        if used != set(range(self.k)):
            raise FoldError(f"Folds {sorted(set(range(self.k)) - used)} are empty")

    def fold_of(self, subject_id: str) -> int:
        try:
            return self.fold_assignments[subject_id]
        except KeyError:
            raise FoldError(f"Subject {subject_id} has no fold") from None

    def subjects_in(self, fold: int) -> list[str]:
        return [s for s, f in self.fold_assignments.items() if f == fold]

    def sizes(self) -> list[int]:
        return [len(self.subjects_in(f)) for f in range(self.k)]


def _interleave(subjects: list[str], labels: dict[str, int]) -> list[str]:
    by_class: dict[int, list[str]] = {}
    for subject in subjects:
        by_class.setdefault(labels[subject], []).append(subject)
    queues = [by_class[c] for c in sorted(by_class)]
    order: list[str] = []
    for position in range(max(len(q) for q in queues)):
        order.extend(q[position] for q in queues if position < len(q))
    return order


def grouped_kfold(subject_labels: dict[str, int], k: int, seed: int) -> FoldSpec:
    """
    Assign subjects to k folds, balancing fold sizes and class counts.

    Subjects are shuffled with `seed`, interleaved by class, and each goes to
    the fold with the fewest subjects, then the fewest of its class, then the
    lowest index.

    Raises:
        FoldError: If k < 2 or k exceeds the number of subjects
    """
    subjects = list(subject_labels)
    if k < 2:
        raise FoldError(f"Need at least 2 folds, got {k}")
    if k > len(subjects):
        raise FoldError(f"Cannot split {len(subjects)} subjects into {k} folds")

    permutation = np.random.default_rng(seed).permutation(len(subjects))
    shuffled = [subjects[i] for i in permutation]

    sizes = [0] * k
    class_counts: dict[int, list[int]] = {}
    assignments: dict[str, int] = {}
    for subject in _interleave(shuffled, subject_labels):
        counts = class_counts.setdefault(subject_labels[subject], [0] * k)
        fold = min(range(k), key=lambda f: (sizes[f], counts[f]))
        assignments[subject] = fold
        sizes[fold] += 1
        counts[fold] += 1

    # keep the caller's subject order in the mapping
    ordered = {s: assignments[s] for s in subjects}
    logger.debug(f"Fold sizes for k={k}, seed={seed}: {sizes}")
    return FoldSpec(fold_assignments=ordered, k=k, seed=seed)


def folds_for_bundle(bundle: DatasetBundle, k: int, seed: int) -> FoldSpec:
    return grouped_kfold(bundle.subject_labels(), k, seed)


def fold_seed(seed: int, config: FeatureConfig, fold: int) -> int:
    """Per-fold clustering seed derived from base seed, triple and fold."""
    sequence = np.random.SeedSequence([seed, *config.triple, fold])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


# =============================================================================
# Per-fold model
# =============================================================================


def svm_labels(samples: Sequence[SignalSample]) -> FloatArray:
    """Class labels 0/1 mapped to -1/+1."""
    return np.array([2.0 * s.label - 1.0 for s in samples])


@dataclass(frozen=True, eq=False)
class FoldModel:
    """Everything learned from one training fold."""

    config: FeatureConfig
    pooling: GraphPooling
    svm: SvmModel

    @property
    def gamma(self) -> float:
        return self.svm.params.gamma

    def features(self, tensors: Sequence[PooledTensor]) -> FloatArray:
        """Spatially pooled, flattened feature matrix."""
        return np.stack([flatten(self.pooling.pool(t)) for t in tensors])

    def predict_tensors(self, tensors: Sequence[PooledTensor]) -> FloatArray:
        return self.svm.predict(self.features(tensors)).astype(np.float64)

    def predict(self, samples: Sequence[SignalSample]) -> FloatArray:
        """Labels in {-1, +1} for raw samples."""
        return self.predict_tensors([spectro_temporal(s, self.config) for s in samples])


def fit_fold(
    train_samples: Sequence[SignalSample],
    config: FeatureConfig,
    seed: int,
    settings: Settings | None = None,
    train_tensors: Sequence[PooledTensor] | None = None,
) -> FoldModel:
    """
    Fit graph pooling, gamma and the SVM on training samples only.

    `train_tensors` may carry the precomputed spectro-temporal tensors of
    `train_samples`, in the same order.

    Raises:
        FoldError: If the training samples hold a single class
    """
    settings = settings or get_settings()
    if len({s.label for s in train_samples}) < 2:
        raise FoldError(f"Training fold for {config.key} holds a single class")
    if train_tensors is None:
        train_tensors = [spectro_temporal(s, config) for s in train_samples]

    pooling = GraphPooling.fit(
        train_samples, config.n_g_feat, seed, settings=settings.clustering
    )
    x = np.stack([flatten(pooling.pool(t)) for t in train_tensors])
    params = KernelParams(gamma=rbf_gamma(x), c=settings.svm.c)
    model = train(
        x,
        svm_labels(train_samples),
        params,
        tolerance=settings.svm.tolerance,
        max_iter_factor=settings.svm.max_iter_factor,
    )
    return FoldModel(config=config, pooling=pooling, svm=model)


@dataclass
class FoldEvaluation:
    """Test-fold outcome of one configuration."""

    fold: int
    accuracy: float
    n_train: int
    n_test: int
    converged: bool
    diagnostics: dict[str, Any] | None = None


@dataclass
class ConfigEvaluation:
    """Per-fold outcomes of one configuration."""

    config: FeatureConfig
    folds: list[FoldEvaluation]

    @property
    def accuracies(self) -> list[float]:
        return [f.accuracy for f in self.folds]

    @property
    def mean_accuracy(self) -> float:
        return math.fsum(self.accuracies) / len(self.folds)


def evaluate_config(
    bundle: DatasetBundle,
    config: FeatureConfig,
    folds: FoldSpec,
    settings: Settings | None = None,
    diagnostics: bool = False,
) -> ConfigEvaluation:
    """
    Cross-validated accuracy of one configuration.

    Spectro-temporal tensors are computed once per sample; graph pooling,
    gamma and the SVM are fitted per fold on training samples only.
    """
    settings = settings or get_settings()
    samples = bundle.samples
    tensors = [spectro_temporal(s, config) for s in samples]
    fold_index = np.array([folds.fold_of(s.subject_id) for s in samples])
    y = svm_labels(samples)

    outcomes: list[FoldEvaluation] = []
    for fold in range(folds.k):
        train_idx = np.flatnonzero(fold_index != fold)
        test_idx = np.flatnonzero(fold_index == fold)
        if test_idx.size == 0:
            raise FoldError(f"Fold {fold} has no samples")

        model = fit_fold(
            [samples[i] for i in train_idx],
            config,
            fold_seed(folds.seed, config, fold),
            settings=settings,
            train_tensors=[tensors[i] for i in train_idx],
        )
        predicted = model.predict_tensors([tensors[i] for i in test_idx])
        accuracy = float(np.mean(predicted == y[test_idx]))
        logger.debug(f"{config.key} fold {fold}: accuracy {accuracy:.3f}")

        record = None
        if diagnostics:
            record = {
                "config": list(config.triple),
                "fold": fold,
                "gamma": model.gamma,
                "n_support_vectors": len(model.svm.dual_coefficients),
                **model.pooling.diagnostics(),
            }
        outcomes.append(
            FoldEvaluation(
                fold=fold,
                accuracy=accuracy,
                n_train=int(train_idx.size),
                n_test=int(test_idx.size),
                converged=model.svm.converged,
                diagnostics=record,
            )
        )
    return ConfigEvaluation(config=config, folds=outcomes)


# =============================================================================
# Sweep
# =============================================================================


class ConfigStatus(Enum):
    """Outcome of one configuration in a sweep."""

    OK = "ok"
    FAILED = "failed"


@dataclass
class ConfigResult:
    """Sweep entry of one configuration."""

    triple: Triple
    status: ConfigStatus
    fold_accuracies: list[float] = field(default_factory=list)
    mean_accuracy: float | None = None
    reason: str | None = None
    converged: bool = True
    diagnostics: list[dict[str, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status is ConfigStatus.OK

    @property
    def key(self) -> str:
        return "x".join(str(n) for n in self.triple)

    @classmethod
    def from_evaluation(cls, evaluation: ConfigEvaluation) -> ConfigResult:
        return cls(
            triple=evaluation.config.triple,
            status=ConfigStatus.OK,
            fold_accuracies=evaluation.accuracies,
            mean_accuracy=evaluation.mean_accuracy,
            converged=all(f.converged for f in evaluation.folds),
            diagnostics=[f.diagnostics for f in evaluation.folds if f.diagnostics],
        )


@dataclass
class SweepResult:
    """Accuracy of every configuration of a grid, keyed by triple."""

    dataset: str
    budget: int
    seed: int
    k: int
    results: dict[Triple, ConfigResult]
    timestamp: str = field(default_factory=lambda: datetime.now(UTC).isoformat())
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.results = dict(sorted(self.results.items()))

    def __len__(self) -> int:
        return len(self.results)

    def successful(self) -> list[ConfigResult]:
        return [r for r in self.results.values() if r.ok]

    def failed(self) -> list[ConfigResult]:
        return [r for r in self.results.values() if not r.ok]

    def _vertex(self, axis: int) -> ConfigResult | None:
        ok = self.successful()
        if not ok:
            return None
        top = max(r.triple[axis] for r in ok)
        return next(r for r in ok if r.triple[axis] == top)

    def summary(self) -> dict[str, Any]:
        """Best configuration, vertex accuracies and failure count."""
        ok = self.successful()
        best = None
        for r in ok:
            assert r.mean_accuracy is not None
            if best is None or r.mean_accuracy > (best.mean_accuracy or 0.0):
                best = r
        vertices = {}
        for name, axis in (("spectral", 0), ("temporal", 1), ("spatial", 2)):
            vertex = self._vertex(axis)
            vertices[name] = (
                None
                if vertex is None
                else {"config": vertex.key, "accuracy": vertex.mean_accuracy}
            )
        return {
            "n_configs": len(self.results),
            "n_failed": len(self.failed()),
            "n_not_converged": sum(1 for r in ok if not r.converged),
            "best": None
            if best is None
            else {"config": best.key, "accuracy": best.mean_accuracy},
            "vertices": vertices,
        }


async def run_sweep(
    bundle: DatasetBundle,
    grid: ConfigGrid,
    folds: FoldSpec,
    settings: Settings | None = None,
    workers: int | None = None,
    diagnostics: bool | None = None,
) -> SweepResult:
    """
    Evaluate every configuration of the grid, concurrently.

    A configuration that raises is recorded as failed with the error message;
    the sweep continues.
    """
    settings = settings or get_settings()
    workers = workers or settings.sweep.workers
    diagnostics = settings.sweep.diagnostics if diagnostics is None else diagnostics
    if not grid.configs:
        raise GridError("Cannot sweep an empty grid")

    scheduler: TaskScheduler[ConfigEvaluation] = TaskScheduler(workers=workers)
    for config in grid.configs:
        scheduler.add_task(
            config.key,
            lambda c=config: evaluate_config(bundle, c, folds, settings, diagnostics),
        )
    outcomes = await scheduler.run_all()
    stats = scheduler.get_stats()
    raised = sum(task["error_count"] for task in stats["tasks"].values())
    logger.debug(
        f"Scheduler ran {stats['task_count']} tasks on {stats['workers']} "
        f"worker(s), {raised} raised"
    )

    results: dict[Triple, ConfigResult] = {}
    for config in grid.configs:
        outcome = outcomes[config.key]
        if outcome.ok and outcome.value is not None:
            entry = ConfigResult.from_evaluation(outcome.value)
            logger.info(f"{config.key}: mean accuracy {entry.mean_accuracy:.4f}")
        else:
            entry = ConfigResult(
                triple=config.triple,
                status=ConfigStatus.FAILED,
                reason=f"{type(outcome.error).__name__}: {outcome.error}",
            )
            logger.warning(f"{config.key}: failed ({entry.reason})")
        results[config.triple] = entry

    result = SweepResult(
        dataset=bundle.name,
        budget=grid.budget,
        seed=folds.seed,
        k=folds.k,
        results=results,
        metadata={"grid": grid.to_dict(), "folds": folds.fold_assignments},
    )
    best = result.summary()["best"]
    logger.info(
        f"Sweep of {len(result)} configurations done, "
        f"{len(result.failed())} failed, best {best}"
    )
    return result


# =============================================================================
# Triangle views
# =============================================================================


@dataclass(frozen=True)
class EdgePoint:
    """One configuration on the triangle perimeter."""

    position: int
    triple: Triple
    accuracy: float

    @property
    def key(self) -> str:
        return "x".join(str(n) for n in self.triple)


def edge_traversal(result: SweepResult) -> list[EdgePoint]:
    """
    Successful configurations on the triangle edges, in perimeter order.

    Starts at the maximal-spectral vertex, runs along the minimal-spatial
    edge towards maximal-temporal, along the minimal-spectral edge towards
    maximal-spatial, then along the minimal-temporal edge back. Each
    configuration appears once, at its first visit.
    """
    ok = result.successful()
    if not ok:
        return []
    min_f = min(r.triple[0] for r in ok)
    min_t = min(r.triple[1] for r in ok)
    min_g = min(r.triple[2] for r in ok)

    edges = [
        sorted((r for r in ok if r.triple[2] == min_g), key=lambda r: -r.triple[0]),
        sorted((r for r in ok if r.triple[0] == min_f), key=lambda r: -r.triple[1]),
        sorted((r for r in ok if r.triple[1] == min_t), key=lambda r: -r.triple[2]),
    ]
    seen: set[Triple] = set()
    path: list[EdgePoint] = []
    for edge in edges:
        for r in edge:
            if r.triple in seen:
                continue
            seen.add(r.triple)
            assert r.mean_accuracy is not None
            path.append(EdgePoint(len(path), r.triple, r.mean_accuracy))
    return path


@dataclass(frozen=True)
class TrianglePoint:
    """Position of a configuration on the log-scaled configuration simplex."""

    triple: Triple
    spectral_share: float
    temporal_share: float
    spatial_share: float
    log_spatial_temporal_ratio: float
    accuracy: float


def triangle_coordinates(result: SweepResult) -> list[TrianglePoint]:
    """Barycentric shares log(n_x) / log(budget) of successful configurations.

    A budget of 1 puts every configuration at the centre.
    """
    points = []
    log_budget = math.log(result.budget) if result.budget > 1 else 0.0
    for r in result.successful():
        assert r.mean_accuracy is not None
        n_f, n_t, n_g = r.triple
        if log_budget > 0:
            shares = [math.log(n) / log_budget for n in r.triple]
        else:
            shares = [1.0 / 3.0] * 3
        points.append(
            TrianglePoint(
                triple=r.triple,
                spectral_share=shares[0],
                temporal_share=shares[1],
                spatial_share=shares[2],
                log_spatial_temporal_ratio=math.log(n_g / n_t),
                accuracy=r.mean_accuracy,
            )
        )
    return points

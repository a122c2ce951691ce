"""Functional-connectivity graph, spectral clustering of channels, spatial pooling."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

import numpy as np
import numpy.typing as npt

from eegres.core.features import AssignmentMatrix, PooledTensor
from eegres.core.signals import FloatArray, SignalSample
from eegres.errors import FeatureError, ZeroVarianceError
from eegres.infra.linalg import Eigensystem, jacobi_eigh

if TYPE_CHECKING:
    from eegres.config.settings import ClusteringSettings

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-12

IntArray = npt.NDArray[np.intp]


@dataclass(frozen=True, eq=False)
class AdjacencyMatrix:
    """Symmetric channel affinity with zero diagonal and entries in [0, 1]."""

    values: FloatArray

    def __post_init__(self) -> None:
        a = np.asarray(self.values, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise FeatureError(f"Adjacency must be square, got shape {a.shape}")
        if not np.allclose(a, a.T, rtol=0.0, atol=SYMMETRY_TOLERANCE):
            raise FeatureError("Adjacency must be symmetric")
        if np.any(np.diag(a) != 0.0):
            raise FeatureError("Adjacency must have a zero diagonal")
        if a.min(initial=0.0) < 0.0 or a.max(initial=0.0) > 1.0:
            raise FeatureError("Adjacency entries must lie in [0, 1]")
        object.__setattr__(self, "values", a)

    @property
    def n_channels(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True, eq=False)
class LaplacianMatrix:
    """Unnormalized graph Laplacian D - A."""

    values: FloatArray

    @property
    def n_channels(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class ClusterAssignment:
    """Cluster of every channel, surjective onto 0..n_clusters-1."""

    group_index: tuple[int, ...]
    n_clusters: int

    def __post_init__(self) -> None:
        counts = np.bincount(self.group_index, minlength=self.n_clusters)
        if len(counts) != self.n_clusters or (counts == 0).any():
            raise FeatureError(
                f"Assignment {self.group_index} does not cover "
                f"{self.n_clusters} non-empty clusters"
            )

    def members(self) -> list[list[int]]:
        """Channel indices of each cluster."""
        groups: list[list[int]] = [[] for _ in range(self.n_clusters)]
        for channel, cluster in enumerate(self.group_index):
            groups[cluster].append(channel)
        return groups


def _abs_correlation(data: FloatArray) -> tuple[FloatArray, npt.NDArray[np.bool_]]:
    centered = data - data.mean(axis=1, keepdims=True)
    norms = np.sqrt(np.einsum("ij,ij->i", centered, centered))
    active = norms > 0.0
    safe = np.where(active, norms, 1.0)
    unit = centered / safe[:, None]
    # rows of constant channels are zero, so their correlations are 0
    corr = np.abs(unit @ unit.T)
    return corr, active


def training_adjacency(samples: Sequence[SignalSample]) -> AdjacencyMatrix:
    """
    Mean absolute Pearson correlation between channels over training samples.

    A channel that is constant within one sample contributes correlation 0 for
    that sample. Samples are reduced in their given order.

    Raises:
        FeatureError: If no samples are given or channel counts differ
        ZeroVarianceError: If a channel is constant in every sample
    """
    if not samples:
        raise FeatureError("Adjacency needs at least one training sample")
    n_c = samples[0].n_channels
    total = np.zeros((n_c, n_c))
    ever_active = np.zeros(n_c, dtype=bool)
    for sample in samples:
        if sample.n_channels != n_c:
            raise FeatureError(
                f"Sample of {sample.subject_id} has {sample.n_channels} channels, "
                f"expected {n_c}"
            )
        corr, active = _abs_correlation(sample.data)
        total += corr
        ever_active |= active

    if not ever_active.all():
        constant = np.flatnonzero(~ever_active).tolist()
        raise ZeroVarianceError(
            f"Channel(s) {constant} are constant in every training sample"
        )

    a = total / len(samples)
    a = np.clip(0.5 * (a + a.T), 0.0, 1.0)
    np.fill_diagonal(a, 0.0)
    return AdjacencyMatrix(values=a)


def laplacian(a: AdjacencyMatrix) -> LaplacianMatrix:
    """L = diag(A 1) - A."""
    values = np.diag(a.values.sum(axis=1)) - a.values
    return LaplacianMatrix(values=values)


def _check_k(k: int, n_c: int) -> None:
    if not 1 <= k <= n_c:
        raise FeatureError(f"Embedding dimension must be in 1..{n_c}, got {k}")


def spectral_embed(
    l: LaplacianMatrix,  # noqa: E741
    k: int,
    tolerance: float = 1e-10,
    max_sweeps: int = 100,
) -> FloatArray:
    """
    Rows of the k eigenvectors of L with the smallest eigenvalues.

    Eigenvectors have unit norm and their largest-magnitude entry positive.

    Raises:
        ConvergenceError: If the eigensolver exhausts its sweeps
    """
    _check_k(k, l.n_channels)
    system = jacobi_eigh(l.values, tolerance=tolerance, max_sweeps=max_sweeps)
    return _embedding(system, k)


def _embedding(system: Eigensystem, k: int) -> FloatArray:
    points: FloatArray = np.ascontiguousarray(system.vectors[:, :k])
    return points


def _sq_distances(points: FloatArray, centroids: FloatArray) -> FloatArray:
    diff = points[:, None, :] - centroids[None, :, :]
    d: FloatArray = np.einsum("ijk,ijk->ij", diff, diff)
    return d


def _kmeans_plus_plus(
    points: FloatArray, n_clusters: int, rng: np.random.Generator
) -> FloatArray:
    n = points.shape[0]
    chosen = [int(rng.integers(n))]
    nearest = _sq_distances(points, points[chosen])[:, 0]
    for _ in range(1, n_clusters):
        total = float(nearest.sum())
        if total > 0.0:
            pick = int(rng.choice(n, p=nearest / total))
        else:
            pick = int(rng.integers(n))
        chosen.append(pick)
        nearest = np.minimum(nearest, _sq_distances(points, points[[pick]])[:, 0])
    centroids: FloatArray = points[chosen].copy()
    return centroids


def _repair_empty(
    labels: IntArray, points: FloatArray, centroids: FloatArray, n_clusters: int
) -> None:
    """Move the point farthest from its centroid into each empty cluster."""
    for cluster in range(n_clusters):
        counts = np.bincount(labels, minlength=n_clusters)
        if counts[cluster] > 0:
            continue
        own = np.einsum(
            "ij,ij->i", points - centroids[labels], points - centroids[labels]
        )
        movable = counts[labels] > 1
        own = np.where(movable, own, -np.inf)
        donor = int(np.argmax(own))
        labels[donor] = cluster
        centroids[cluster] = points[donor]


def _centroids(points: FloatArray, labels: IntArray, n_clusters: int) -> FloatArray:
    sums = np.zeros((n_clusters, points.shape[1]))
    np.add.at(sums, labels, points)
    counts = np.bincount(labels, minlength=n_clusters)
    centroids: FloatArray = sums / counts[:, None]
    return centroids


def _lloyd(
    points: FloatArray,
    n_clusters: int,
    rng: np.random.Generator,
    max_iter: int,
) -> tuple[IntArray, float]:
    centroids = _kmeans_plus_plus(points, n_clusters, rng)
    labels: IntArray | None = None
    for _ in range(max_iter):
        new_labels = np.argmin(_sq_distances(points, centroids), axis=1)
        _repair_empty(new_labels, points, centroids, n_clusters)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        centroids = _centroids(points, labels, n_clusters)
    assert labels is not None
    centroids = _centroids(points, labels, n_clusters)
    wcss = float(np.sum((points - centroids[labels]) ** 2))
    return labels, wcss


def _canonical(labels: IntArray, n_clusters: int) -> tuple[int, ...]:
    first_member = [int(np.flatnonzero(labels == c)[0]) for c in range(n_clusters)]
    order = np.argsort(first_member, kind="stable")
    rename = np.empty(n_clusters, dtype=np.intp)
    rename[order] = np.arange(n_clusters)
    return tuple(int(rename[c]) for c in labels)


def kmeans(
    points: FloatArray,
    n_clusters: int,
    seed: int,
    restarts: int = 10,
    max_iter: int = 300,
) -> ClusterAssignment:
    """
    Lloyd's k-means with k-means++ seeding and restarts.

    Restart seeds are spawned from `seed`; the restart with the lowest
    within-cluster sum of squares wins (earliest on ties). Clusters are
    numbered by their smallest member index.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n = points.shape[0]
    if not 1 <= n_clusters <= n:
        raise FeatureError(f"Cannot form {n_clusters} clusters from {n} points")
    if n_clusters == 1:
        return ClusterAssignment(group_index=(0,) * n, n_clusters=1)

    best_labels: IntArray | None = None
    best_wcss = np.inf
    for child in np.random.SeedSequence(seed).spawn(restarts):
        labels, wcss = _lloyd(
            points, n_clusters, np.random.default_rng(child), max_iter
        )
        if wcss < best_wcss:
            best_labels, best_wcss = labels, wcss

    assert best_labels is not None
    return ClusterAssignment(
        group_index=_canonical(best_labels, n_clusters), n_clusters=n_clusters
    )


def spatial_assignment(ca: ClusterAssignment, n_c: int) -> AssignmentMatrix:
    """Averaging matrix n_c x n_clusters for a channel clustering."""
    if len(ca.group_index) != n_c:
        raise FeatureError(
            f"Assignment covers {len(ca.group_index)} channels, expected {n_c}"
        )
    return AssignmentMatrix.from_groups(ca.group_index, ca.n_clusters)


def pool_spatial(x: PooledTensor, s: AssignmentMatrix) -> PooledTensor:
    """Average channels within clusters: out[l,m,n] = sum_i x[i,m,n] s[i,l]."""
    values = x.values
    if values.ndim != 3 or values.shape[0] != s.n_in:
        raise FeatureError(
            f"Channel axis of shape {values.shape} does not match assignment "
            f"of {s.n_in} inputs"
        )
    return PooledTensor(values=np.einsum("imn,il->lmn", values, s.values))


@dataclass(frozen=True, eq=False)
class GraphPooling:
    """Spatial pooling fitted on one training set."""

    clusters: ClusterAssignment
    assignment: AssignmentMatrix
    adjacency: AdjacencyMatrix | None = None
    eigenvalues: FloatArray | None = None

    @classmethod
    def fit(
        cls,
        samples: Sequence[SignalSample],
        n_groups: int,
        seed: int,
        settings: ClusteringSettings | None = None,
    ) -> GraphPooling:
        """
        Cluster channels from the connectivity of the given samples.

        One group needs no graph: every channel joins cluster 0.
        """
        if not samples:
            raise FeatureError("Graph pooling needs at least one training sample")
        n_c = samples[0].n_channels
        _check_k(n_groups, n_c)
        if n_groups == 1:
            clusters = ClusterAssignment(group_index=(0,) * n_c, n_clusters=1)
            return cls(clusters=clusters, assignment=spatial_assignment(clusters, n_c))

        tolerance = settings.jacobi_tolerance if settings else 1e-10
        max_sweeps = settings.jacobi_max_sweeps if settings else 100
        restarts = settings.restarts if settings else 10
        max_iter = settings.max_iter if settings else 300

        adjacency = training_adjacency(samples)
        system = jacobi_eigh(
            laplacian(adjacency).values, tolerance=tolerance, max_sweeps=max_sweeps
        )
        clusters = kmeans(
            _embedding(system, n_groups),
            n_groups,
            seed,
            restarts=restarts,
            max_iter=max_iter,
        )
        sizes = [len(m) for m in clusters.members()]
        logger.debug(f"Channel clusters for {n_groups} groups: sizes {sizes}")
        return cls(
            clusters=clusters,
            assignment=spatial_assignment(clusters, n_c),
            adjacency=adjacency,
            eigenvalues=system.values,
        )

    def pool(self, x: PooledTensor) -> PooledTensor:
        return pool_spatial(x, self.assignment)

    def diagnostics(self) -> dict[str, Any]:
        """JSON-compatible record of the fitted graph and clustering."""
        return {
            "n_clusters": self.clusters.n_clusters,
            "group_index": list(self.clusters.group_index),
            "adjacency": None
            if self.adjacency is None
            else self.adjacency.values.tolist(),
            "eigenvalues": None
            if self.eigenvalues is None
            else self.eigenvalues.tolist(),
        }

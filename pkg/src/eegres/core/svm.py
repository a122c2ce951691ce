"""Binary soft-margin RBF support vector machine trained by SMO."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field

from eegres.core.signals import FloatArray
from eegres.errors import FoldError, InputError, ZeroVarianceError

logger = logging.getLogger(__name__)

# Curvature floor for non-positive-definite pairs
TAU = 1e-12
KERNEL_BLOCK_ROWS = 64


@dataclass(frozen=True)
class KernelParams:
    """RBF coefficient gamma and regularization strength c."""

    gamma: float
    c: float = 1.0

    def __post_init__(self) -> None:
        for name, value in (("gamma", self.gamma), ("c", self.c)):
            if not (math.isfinite(value) and value > 0):
                raise InputError(f"{name} must be finite and positive, got {value}")


def rbf_gamma(features: FloatArray) -> float:
    """
    Kernel coefficient 1 / (n_feat * Var(X)).

    Var is the population variance over all entries of the training matrix.

    Raises:
        ZeroVarianceError: If all entries are equal
    """
    x = np.atleast_2d(np.asarray(features, dtype=np.float64))
    variance = float(np.var(x))
    if variance == 0.0:
        raise ZeroVarianceError("Training features have zero variance")
    return 1.0 / (x.shape[1] * variance)


def rbf_kernel(a: FloatArray, b: FloatArray, gamma: float) -> float:
    """exp(-gamma * ||a - b||^2)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InputError(f"Vector shapes differ: {a.shape} vs {b.shape}")
    diff = a - b
    return math.exp(-gamma * float(np.dot(diff, diff)))


def kernel_matrix(a: FloatArray, b: FloatArray, gamma: float) -> FloatArray:
    """RBF kernel between the rows of a and the rows of b.

    Squared distances are summed from exact differences, in row blocks.
    """
    if a.shape[1] != b.shape[1]:
        raise InputError(
            f"Feature lengths differ: {a.shape[1]} vs {b.shape[1]}"
        )
    out = np.empty((a.shape[0], b.shape[0]))
    for start in range(0, a.shape[0], KERNEL_BLOCK_ROWS):
        block = a[start : start + KERNEL_BLOCK_ROWS]
        diff = block[:, None, :] - b[None, :, :]
        out[start : start + len(block)] = np.exp(
            -gamma * np.einsum("ijk,ijk->ij", diff, diff)
        )
    return out


class _SvmRecord(BaseModel):
    """Serialized model layout."""

    model_config = ConfigDict(extra="forbid")

    gamma: float = Field(gt=0)
    c: float = Field(gt=0)
    bias: float
    support_vectors: list[list[float]]
    dual_coefficients: list[float]


def _format_json(value: Any) -> str:
    """JSON text with floats written to 17 significant digits."""
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, dict):
        items = (f"{json.dumps(k)}: {_format_json(v)}" for k, v in value.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(value, list):
        return "[" + ", ".join(_format_json(v) for v in value) + "]"
    return json.dumps(value)


@dataclass(frozen=True, eq=False)
class SvmModel:
    """Trained decision function sum_i coef_i k(sv_i, x) + bias."""

    support_vectors: FloatArray
    dual_coefficients: FloatArray  # alpha_i * y_i
    bias: float
    params: KernelParams
    converged: bool = True
    violation: float = 0.0
    iterations: int = 0

    @property
    def n_features(self) -> int:
        return int(self.support_vectors.shape[1])

    def decision_function(self, x: FloatArray) -> FloatArray:
        """Decision values of the rows of x (or of a single vector)."""
        points = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if points.shape[1] != self.n_features:
            raise InputError(
                f"Expected {self.n_features} features, got {points.shape[1]}"
            )
        if len(self.dual_coefficients) == 0:
            return np.full(points.shape[0], self.bias)
        k = kernel_matrix(points, self.support_vectors, self.params.gamma)
        values: FloatArray = k @ self.dual_coefficients + self.bias
        return values

    def predict(self, x: FloatArray) -> npt.NDArray[np.int_]:
        """Labels in {-1, +1}; a decision value of exactly 0 gives +1."""
        return np.where(self.decision_function(x) >= 0.0, 1, -1)

    def to_json(self) -> str:
        return _format_json(
            {
                "gamma": self.params.gamma,
                "c": self.params.c,
                "bias": float(self.bias),
                "support_vectors": self.support_vectors.tolist(),
                "dual_coefficients": self.dual_coefficients.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> SvmModel:
        record = _SvmRecord.model_validate_json(text)
        vectors = np.asarray(record.support_vectors, dtype=np.float64)
        if vectors.size == 0:
            vectors = vectors.reshape(0, 0)
        return cls(
            support_vectors=vectors,
            dual_coefficients=np.asarray(record.dual_coefficients, dtype=np.float64),
            bias=record.bias,
            params=KernelParams(gamma=record.gamma, c=record.c),
        )


def predict(model: SvmModel, x: FloatArray) -> tuple[int, float]:
    """Label and decision value of one feature vector."""
    vector = np.asarray(x, dtype=np.float64)
    if vector.ndim != 1:
        raise InputError(f"Expected a single feature vector, got shape {vector.shape}")
    value = float(model.decision_function(vector)[0])
    return (1 if value >= 0.0 else -1), value


def _rho(alpha: FloatArray, y: FloatArray, grad: FloatArray, c: float) -> float:
    """Offset from free vectors, or the midpoint of the feasible interval."""
    yg = y * grad
    at_upper = alpha >= c
    at_lower = alpha <= 0.0
    free = ~(at_upper | at_lower)
    if free.any():
        return float(np.sum(yg[free]) / np.count_nonzero(free))

    # bounded vectors constrain rho from above (ub) or below (lb)
    to_ub = (at_upper & (y < 0)) | (at_lower & (y > 0))
    to_lb = (at_upper & (y > 0)) | (at_lower & (y < 0))
    ub = float(yg[to_ub].min()) if to_ub.any() else math.inf
    lb = float(yg[to_lb].max()) if to_lb.any() else -math.inf
    return (ub + lb) / 2.0


def train(
    features: FloatArray,
    labels: FloatArray,
    params: KernelParams,
    tolerance: float = 1e-3,
    max_iter_factor: int = 10,
    max_updates: int | None = None,
) -> SvmModel:
    """
    Solve the soft-margin dual with SMO and maximal-violating-pair selection.

    Stops when the violation m - M drops below `tolerance` or after
    `max_iter_factor * n**2` pair updates (or `max_updates`, if given); in
    the latter case the model is returned with converged=False and a warning
    is logged.

    Raises:
        InputError: If labels are not +/-1
        FoldError: If a class is missing
    """
    x = np.atleast_2d(np.asarray(features, dtype=np.float64))
    y = np.asarray(labels, dtype=np.float64)
    n = x.shape[0]
    if y.shape != (n,):
        raise InputError(f"Expected {n} labels, got shape {y.shape}")
    if not np.isin(y, (-1.0, 1.0)).all():
        raise InputError("Labels must be -1 or +1")
    if not ((y > 0).any() and (y < 0).any()):
        raise FoldError("Training set contains a single class")

    c = params.c
    q = np.outer(y, y) * kernel_matrix(x, x, params.gamma)
    alpha = np.zeros(n)
    grad = -np.ones(n)
    if max_updates is None:
        max_updates = max_iter_factor * n * n

    updates = 0
    violation = math.inf
    while True:
        up = ((y > 0) & (alpha < c)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < c))
        score = -y * grad
        i = int(np.argmax(np.where(up, score, -math.inf)))
        j = int(np.argmin(np.where(low, score, math.inf)))
        violation = float(score[i] - score[j]) if up.any() and low.any() else 0.0
        if violation < tolerance:
            break
        if updates >= max_updates:
            logger.warning(
                f"SMO stopped after {updates} updates with violation "
                f"{violation:.3e} (tolerance {tolerance:.1e})"
            )
            break

        old_i, old_j = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = max(q[i, i] + q[j, j] + 2.0 * q[i, j], TAU)
            delta = (-grad[i] - grad[j]) / quad
            diff = old_i - old_j
            a_i, a_j = old_i + delta, old_j + delta
            if diff > 0:
                if a_j < 0:
                    a_j, a_i = 0.0, diff
            elif a_i < 0:
                a_i, a_j = 0.0, -diff
            if diff > 0:
                if a_i > c:
                    a_i, a_j = c, c - diff
            elif a_j > c:
                a_j, a_i = c, c + diff
        else:
            quad = max(q[i, i] + q[j, j] - 2.0 * q[i, j], TAU)
            delta = (grad[i] - grad[j]) / quad
            total = old_i + old_j
            a_i, a_j = old_i - delta, old_j + delta
            if total > c:
                if a_i > c:
                    a_i, a_j = c, total - c
            elif a_j < 0:
                a_j, a_i = 0.0, total
            if total > c:
                if a_j > c:
                    a_j, a_i = c, total - c
            elif a_i < 0:
                a_i, a_j = 0.0, total

        alpha[i], alpha[j] = a_i, a_j
        grad += q[:, i] * (a_i - old_i) + q[:, j] * (a_j - old_j)
        updates += 1

    converged = violation < tolerance
    support = alpha > 0.0
    bias = -_rho(alpha, y, grad, c)
    logger.debug(
        f"SMO: {updates} updates, {int(np.count_nonzero(support))} support "
        f"vectors, violation {violation:.3e}"
    )
    return SvmModel(
        support_vectors=x[support].copy(),
        dual_coefficients=(alpha * y)[support],
        bias=bias,
        params=params,
        converged=converged,
        violation=violation,
        iterations=updates,
    )

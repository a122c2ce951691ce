"""Cyclic Jacobi eigensolver for small symmetric matrices."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from eegres.core.signals import FloatArray
from eegres.errors import ConvergenceError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Eigensystem:
    """Eigenvalues in ascending order with unit eigenvectors as columns."""

    values: FloatArray
    vectors: FloatArray
    sweeps: int


def _off_norm(a: FloatArray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _rotation(app: float, aqq: float, apq: float) -> tuple[float, float]:
    """Cosine and sine of the rotation that zeroes a_pq."""
    tau = (aqq - app) / (2.0 * apq)
    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
    c = 1.0 / math.sqrt(1.0 + t * t)
    return c, t * c


def canonical_signs(vectors: FloatArray) -> FloatArray:
    """Flip each column so that its largest-magnitude entry is positive.

    Ties go to the lowest row index.
    """
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.where(vectors[pivots, np.arange(vectors.shape[1])] < 0, -1.0, 1.0)
    flipped: FloatArray = vectors * signs
    return flipped


def jacobi_eigh(
    matrix: FloatArray,
    tolerance: float = 1e-10,
    max_sweeps: int = 100,
) -> Eigensystem:
    """
    Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Pairs (p, q) are visited row by row in every sweep. Iteration stops once
    the off-diagonal Frobenius norm falls below `tolerance` times the
    Frobenius norm of the input (absolute `tolerance` for a zero matrix).
    Equal eigenvalues keep the solver's column order.

    Raises:
        ConvergenceError: If `max_sweeps` sweeps do not reach the tolerance
    """
    a = np.array(matrix, dtype=np.float64, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {a.shape}")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    threshold = tolerance * max(float(np.linalg.norm(a)), 1.0)

    sweeps = 0
    while _off_norm(a) > threshold:
        if sweeps >= max_sweeps:
            raise ConvergenceError(
                f"Jacobi eigensolver did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {_off_norm(a):.3e})"
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                c, s = _rotation(a[p, p], a[q, q], apq)
                # A <- J^T A J applied to rows then columns p, q
                row_p = a[p, :].copy()
                a[p, :] = c * row_p - s * a[q, :]
                a[q, :] = s * row_p + c * a[q, :]
                col_p = a[:, p].copy()
                a[:, p] = c * col_p - s * a[:, q]
                a[:, q] = s * col_p + c * a[:, q]
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
        sweeps += 1

    eigenvalues = np.diag(a).copy()
    order = np.argsort(eigenvalues, kind="stable")
    vectors = v[:, order]
    vectors /= np.linalg.norm(vectors, axis=0)
    logger.debug(f"Jacobi converged after {sweeps} sweep(s) for n={n}")
    return Eigensystem(
        values=eigenvalues[order],
        vectors=canonical_signs(vectors),
        sweeps=sweeps,
    )

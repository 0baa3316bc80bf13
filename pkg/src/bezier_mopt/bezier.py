"""Bezier simplex model: evaluation, design matrices, least-squares fitting.

A Bezier simplex of degree D maps the probability simplex into R^L as a
convex-weighted combination of control points: b(t) = P' z(t) where z(t) is
the Bernstein basis vector and P stacks one control point per multi-index,
in canonical order. Fitting a batch of (weight, point) pairs is an ordinary
linear least-squares problem in P.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ._kernels import bernstein_design
from .simplex import MultiIndexSet, enumerate_multi_indices, weight_vector

# A design matrix is declared numerically singular when its smallest
# singular value falls below this fraction of the largest. Random weight
# batches are nonsingular with probability one, but finite precision needs
# a concrete threshold; the solver reacts to this error by resampling.
SINGULARITY_RTOL = 1e-10


class SingularFitError(ValueError):
    """Raised when the design matrix is rank-deficient to working precision."""

    def __init__(self, message: str, smallest_singular_value: float):
        super().__init__(message)
        self.smallest_singular_value = float(smallest_singular_value)


@dataclass(eq=False)
class BezierSimplex:
    """Degree-D Bezier simplex with control points stacked in canonical order.

    `control_points` has one row per multi-index of `basis` and L columns.
    Instances are immutable by convention; evaluation is pure.
    """

    basis: MultiIndexSet
    control_points: np.ndarray

    def __post_init__(self):
        self.control_points = np.asarray(self.control_points, dtype=np.float64)
        if self.control_points.ndim != 2:
            raise ValueError("control_points must be a 2-D array")
        if self.control_points.shape[0] != self.basis.size:
            raise ValueError(
                f"control_points has {self.control_points.shape[0]} rows, "
                f"basis needs {self.basis.size}")
        if not np.all(np.isfinite(self.control_points)):
            raise ValueError("control_points must be finite")

    @property
    def num_objectives(self) -> int:
        return self.basis.num_objectives

    @property
    def degree(self) -> int:
        return self.basis.degree

    @property
    def ambient_dim(self) -> int:
        return self.control_points.shape[1]

    def evaluate(self, t) -> np.ndarray:
        """Point on the hypersurface at weight t, an (L,) vector."""
        arr = weight_vector(t, dim=self.basis.num_objectives)
        z = bernstein_design(arr[None, :], self.basis._exponents_f64,
                             self.basis.coefficients)
        return (z @ self.control_points)[0]

    def evaluate_batch(self, weights) -> np.ndarray:
        """Evaluate at every row of `weights`; returns (N, L)."""
        arr = np.asarray(weights, dtype=np.float64)
        z = bernstein_design(arr, self.basis._exponents_f64, self.basis.coefficients)
        return z @ self.control_points

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "M": self.basis.num_objectives,
            "D": self.basis.degree,
            "L": self.ambient_dim,
            "index_order": self.basis.exponents.tolist(),
            "control_points": self.control_points.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "BezierSimplex":
        for key in ("M", "D", "L", "index_order", "control_points"):
            if key not in doc:
                raise ValueError(f"model document is missing field {key!r}")
        basis = enumerate_multi_indices(int(doc["M"]), int(doc["D"]))
        order = np.asarray(doc["index_order"], dtype=np.int64)
        if order.shape != basis.exponents.shape or not np.array_equal(order, basis.exponents):
            raise ValueError("index_order does not match the canonical enumeration")
        control = np.asarray(doc["control_points"], dtype=np.float64)
        if control.ndim != 2 or control.shape != (basis.size, int(doc["L"])):
            raise ValueError(
                f"control_points shape {control.shape} does not match "
                f"({basis.size}, {doc['L']})")
        return cls(basis=basis, control_points=control)


def save_model(model: BezierSimplex, path) -> None:
    """Write the model JSON document. Floats are written in Python's
    shortest round-trip representation, so reloading is bit-exact."""
    with open(path, "w", newline="\n") as fh:
        json.dump(model.to_dict(), fh, indent=2)
        fh.write("\n")


def load_model(path) -> BezierSimplex:
    with open(path) as fh:
        return BezierSimplex.from_dict(json.load(fh))


def design_matrix(weights, basis: MultiIndexSet) -> np.ndarray:
    """Stack Bernstein basis vectors for a weight batch; (N, J).

    Every row sums to one and all entries lie in [0, 1].
    """
    arr = np.asarray(weights, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("weights must be a nonempty (N, M) array")
    if arr.shape[1] != basis.num_objectives:
        raise ValueError(
            f"weights have dimension {arr.shape[1]}, basis expects "
            f"{basis.num_objectives}")
    return bernstein_design(arr, basis._exponents_f64, basis.coefficients)


def check_design(design: np.ndarray) -> tuple[float, float]:
    """Singular-value gate for a prepared design matrix.

    Returns (smallest, largest) singular values; raises SingularFitError
    when the matrix is effectively rank-deficient (including N < J, where
    the normal equations cannot be regular).
    """
    n_rows, n_basis = design.shape
    if n_rows < n_basis:
        raise SingularFitError(
            f"{n_rows} samples cannot determine {n_basis} control points",
            smallest_singular_value=0.0)
    sv = np.linalg.svd(design, compute_uv=False)
    if sv[-1] < SINGULARITY_RTOL * sv[0]:
        raise SingularFitError(
            f"design matrix is numerically singular "
            f"(smallest singular value {sv[-1]:.3e})",
            smallest_singular_value=sv[-1])
    return float(sv[-1]), float(sv[0])


def solve_prepared(design: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Least-squares control points for a prepared, full-rank design matrix.

    Column-pivoted thin QR rather than the explicit normal-equation
    inverse, for conditioning; the minimizer is identical.
    """
    q, r, piv = scipy.linalg.qr(design, mode="economic", pivoting=True)
    y = scipy.linalg.solve_triangular(r, q.T @ targets, lower=False)
    control = np.empty_like(y)
    control[piv] = y
    return control


def fit_least_squares(weights, points, basis: MultiIndexSet) -> BezierSimplex:
    """Fit control points minimizing the mean squared residual over the batch.

    `weights` is (N, M), `points` is (N, L), and N must be at least the
    basis size. Raises SingularFitError for rank-deficient designs, carrying
    the offending smallest singular value.
    """
    pts = np.asarray(points, dtype=np.float64)
    arr = np.asarray(weights, dtype=np.float64)
    if pts.ndim != 2 or arr.ndim != 2 or pts.shape[0] != arr.shape[0]:
        raise ValueError("weights and points must be 2-D with matching row counts")
    design = design_matrix(arr, basis)
    check_design(design)
    return BezierSimplex(basis=basis, control_points=solve_prepared(design, pts))


def fit_normal_equations(weights, points, basis: MultiIndexSet) -> BezierSimplex:
    """Reference fit through the explicit normal equations (Z'Z) P = Z'X.

    Kept as an independent cross-check of the QR path; numerically inferior
    on ill-conditioned designs, mathematically the same minimizer.
    """
    pts = np.asarray(points, dtype=np.float64)
    design = design_matrix(weights, basis)
    check_design(design)
    gram = design.T @ design
    control = np.linalg.solve(gram, design.T @ pts)
    return BezierSimplex(basis=basis, control_points=control)
